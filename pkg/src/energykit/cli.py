"""Command-line frontend.

Every subcommand emits one JSON record per line on stdout (and appends it to
``--out`` when given).  Options may also come from ``--config FILE`` holding
either a JSON object or flat ``key=value`` lines; explicit flags win.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable

from . import __version__
from .errors import BudgetExceeded, InvariantError, ParseError
from .fitting import FitResult, InsufficientData, fit_exponent

__all__ = ["main", "run", "ExperimentConfig", "ResultRecord", "fit_exponent", "FitResult"]

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_BUDGET, EXIT_INVARIANT = 0, 1, 2, 3, 4
JSON_SAFE = 2**53


@dataclass(frozen=True)
class ExperimentConfig:
    command: str
    options: dict

    def canonical(self) -> str:
        opts = {k: v for k, v in self.options.items() if k not in _NON_SEMANTIC and v is not None}
        return json.dumps({"command": self.command, "options": opts}, sort_keys=True, default=str)

    @property
    def digest(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()[:16]


_NON_SEMANTIC = {"out", "cache_dir", "csv", "config", "threads", "no_cache", "func"}


@dataclass
class ResultRecord:
    config_hash: str
    command: str
    payload: Any
    timestamp: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat())
    version: str = __version__
    millis: float | None = None

    def to_json(self) -> dict:
        rec = {
            "config_hash": self.config_hash,
            "command": self.command,
            "payload": json_safe(self.payload),
            "timestamp": self.timestamp,
            "version": self.version,
        }
        if self.millis is not None:
            rec["millis"] = self.millis
        return rec


def _split_timing(payload):
    # wall-clock time lives beside the timestamp so payloads stay reproducible
    if isinstance(payload, dict) and "millis" in payload:
        payload = dict(payload)
        return payload, payload.pop("millis")
    return payload, None


def json_safe(obj):
    """Integers beyond 2^53 become decimal strings; Fractions become 'p/q'; complex becomes {re, im}."""
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, int):
        return str(obj) if abs(obj) > JSON_SAFE else obj
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else str(obj)
    if isinstance(obj, dict):
        return {str(k): json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [json_safe(v) for v in obj]
    if hasattr(obj, "item"):
        return json_safe(obj.item())
    return str(obj)


# ---------------------------------------------------------------------------
# config handling
# ---------------------------------------------------------------------------


def load_config_file(path: str) -> dict:
    text = Path(path).read_text()
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            data = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON config: {exc.msg}", exc.pos) from None
        if not isinstance(data, dict):
            raise ParseError("JSON config must be an object", 0)
        return {k.replace("-", "_"): v for k, v in data.items()}
    out = {}
    offset = 0
    for line in text.splitlines(keepends=True):
        body = line.split("#", 1)[0].strip()
        if body:
            if "=" not in body:
                raise ParseError(f"expected key=value, got {body!r}", offset)
            key, val = body.split("=", 1)
            out[key.strip().replace("-", "_")] = val.strip().strip('"').strip("'")
        offset += len(line.encode())
    return out


def _int_list(text) -> list[int]:
    if isinstance(text, (list, tuple)):
        return [int(v) for v in text]
    try:
        return [int(v) for v in str(text).replace(" ", "").split(",") if v]
    except ValueError:
        raise ParseError(f"expected a comma-separated integer list, got {text!r}", 0) from None


def _pairs(text) -> list[tuple[float, float]]:
    if isinstance(text, (list, tuple)):
        return [(float(a), float(b)) for a, b in text]
    out = []
    for item in str(text).replace(" ", "").split(","):
        if not item:
            continue
        try:
            b, c = item.split(":")
            out.append((float(b), float(c)))
        except ValueError:
            raise ParseError(f"expected B:count pairs, got {item!r}", 0) from None
    return out


def _instance(opts: dict, B: int | None = None):
    """GeneralInstance from either --poly (energy deduction) or --f/--g/--a/--b."""
    from .energy import GeneralInstance
    from .polyarith import parse_poly, parse_univariate

    k = int(opts["k"])
    B = int(B if B is not None else (opts.get("B") or 1))
    if opts.get("poly"):
        return GeneralInstance.from_energy(parse_univariate(opts["poly"]), k, B)
    if not (opts.get("f") and opts.get("g")):
        raise ParseError("need --poly or both --f and --g", 0)
    return GeneralInstance(parse_poly(opts["f"]), parse_poly(opts["g"]), int(opts.get("a") or 1),
                           int(opts.get("b") or 1), k, B)


# ---------------------------------------------------------------------------
# subcommands; each returns a list of payloads
# ---------------------------------------------------------------------------


def cmd_count(opts: dict) -> list:
    from .energy import Budget, EnergyInstance, energy_bruteforce, energy_mitm, general_bruteforce, general_count
    from .polyarith import parse_univariate

    budget = Budget(max_ops=int(opts.get("max_ops") or 10**9))
    B = int(opts["B"])
    algo = opts.get("algo") or "mitm"
    if opts.get("f"):
        inst = _instance(opts, B)
        res = general_bruteforce(inst, budget) if algo == "brute" else general_count(inst, budget)
        desc = f"{opts['f']}|{opts['g']}|{inst.a}|{inst.b}|{inst.k}|{B}"
    else:
        inst = EnergyInstance(parse_univariate(opts["poly"]), int(opts["k"]), B)
        res = energy_bruteforce(inst, budget) if algo == "brute" else energy_mitm(inst, budget)
        desc = f"{opts['poly']}|{inst.k}|{B}"
    return [{
        "instance_hash": hashlib.sha256(desc.encode()).hexdigest()[:16],
        "count": str(res.count),
        "algo": res.algorithm,
        "millis": round(res.seconds * 1000, 3),
    }]


def _scan_counter(opts: dict) -> Callable[[int], int]:
    from .energy import EnergyInstance, curve_count_in_box, energy_mitm, general_count
    from .polyarith import parse_poly, parse_univariate

    kind = opts.get("kind") or "energy"
    if kind == "energy":
        f = parse_univariate(opts["poly"])
        k = int(opts["k"])
        return lambda B: energy_mitm(EnergyInstance(f, k, B)).count
    if kind == "general":
        return lambda B: general_count(_instance(opts, B)).count
    if kind == "curve":
        F = parse_poly(opts["f"])
        level = int(opts["k"])
        return lambda B: curve_count_in_box(F, level, B).count
    raise ParseError(f"unknown scan kind {kind!r}", 0)


def write_scan_csv(path: str, pairs) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["B", "count", "log10B", "log10count"])
        for B, c in pairs:
            w.writerow([B, c, f"{math.log10(B):.6f}", f"{math.log10(c):.6f}" if c > 0 else "nan"])


def cmd_scan(opts: dict) -> list:
    if opts.get("pairs"):
        pairs = _pairs(opts["pairs"])
    else:
        Bs = _int_list(opts["Bs"])
        if any(b2 <= b1 for b1, b2 in zip(Bs, Bs[1:])):
            raise ParseError("B list must be strictly increasing", 0)
        counter = _scan_counter(opts)
        pairs = [(B, counter(B)) for B in Bs]
    fit = fit_exponent(pairs)
    if opts.get("csv"):
        write_scan_csv(opts["csv"], pairs)
    return [{
        "pairs": [[b, c] for b, c in pairs],
        "slope": fit.slope,
        "intercept_log10": fit.intercept,
        "stderr": fit.stderr,
        "dropped_zero_B": list(fit.dropped),
    }]


def cmd_expsum(opts: dict) -> list:
    from .ffield import build_sieve_surface, phi_sum, psi_direct, sigma_t

    kind = opts.get("kind") or "sigma"
    M = int(opts.get("M") or 0)
    N = int(opts.get("N") or 0)
    inst = _instance(opts)
    t0 = time.perf_counter()
    if kind == "phi":
        h = int(opts["h"])
        val = phi_sum(abs(h), M, N, inst)
        params = {"h": h, "M": M, "N": N}
    else:
        surface = build_sieve_surface(inst, int(opts["h"]))
        p = int(opts["p"])
        if kind == "sigma":
            t = int(opts.get("t") or 0)
            val = sigma_t(t, p, M, N, surface)
            params = {"t": t, "p": p, "h": int(opts["h"]), "M": M, "N": N}
        elif kind == "psi":
            q = int(opts["q"])
            i, j = int(opts.get("i") or 0), int(opts.get("j") or 0)
            val = psi_direct(i, j, M, N, p, q, int(opts["h"]), surface)
            params = {"i": i, "j": j, "p": p, "q": q, "h": int(opts["h"]), "m": M, "n": N}
        else:
            raise ParseError(f"unknown exponential sum {kind!r}", 0)
    return [{
        "kind": kind,
        "parameters": params,
        "re": val.real,
        "im": val.imag,
        "exact_integer": val.exact_integer,
        "terms": val.terms,
        "millis": round((time.perf_counter() - t0) * 1000, 3),
    }]


def cmd_congruence(opts: dict) -> list:
    from .congruence import count_roots_mod_prime_power, count_roots_naive
    from .polyarith import parse_univariate

    Q = parse_univariate(opts["poly"])
    p, l = int(opts["p"]), int(opts["l"])
    out = {"poly": opts["poly"], "p": p, "l": l, "count": count_roots_mod_prime_power(Q, p, l)}
    if opts.get("naive"):
        out["naive"] = count_roots_naive(Q, p**l)
    return [out]


def cmd_delta(opts: dict) -> list:
    from .congruence import delta_f, lines_mod_p

    inst = _instance(opts)
    p = int(opts["p"]) if opts.get("p") else None
    cert = delta_f(inst, int(opts["M"]), int(opts["N"]), p)
    rec = cert.to_json(inst.d)
    rec["A"] = [str(a) for a in cert.A]
    rec["B"] = [str(b) for b in cert.B]
    rec["mirrored"] = cert.mirrored
    if p is not None:
        rec["prime"] = p
        rec["small_prime"] = cert.small_prime
        rec["lines_mod_p"] = lines_mod_p(inst.f, inst.k, cert.M, cert.N, p)
        rec["divisible"] = cert.value % p == 0
    return [rec]


def cmd_lines(opts: dict) -> list:
    from .geometry import gamma_n_line_report, lines_in_level, rational_line_check
    from .polyarith import parse_poly, parse_univariate

    k = int(opts["k"])
    if opts.get("n"):
        inst = _instance(opts)
        return gamma_n_line_report(inst, int(opts["n"]), int(opts["B"])).to_json()
    if opts.get("poly"):
        res = rational_line_check(parse_univariate(opts["poly"]), k)
        return [{
            "poly": opts["poly"],
            "k": k,
            "has_line": res.has_line,
            "rational_lines": [[str(a), str(b)] for a, b in res.rational_lines],
            "genuine_candidates": len(res.lines),
        }]
    cands = lines_in_level(parse_poly(opts["f"]), k)
    return [{"f": opts["f"], "k": k, "lines": [c.describe() for c in cands]}]


def cmd_census(opts: dict) -> list:
    from .geometry import singular_census

    inst = _instance(opts)
    fam = opts.get("family") or "gamma"
    c = singular_census(inst, fam, int(opts.get("bound") or opts.get("B") or 50))
    rec = c.to_json()
    rec["leading_matches"] = c.leading_matches
    rec["polynomial"] = str(c.polynomial)
    return [rec]


def cmd_sieve(opts: dict) -> list:
    from .sieve import SieveContext, sieve_bound

    inst = _instance(opts)
    Q = float(opts["Q"]) if opts.get("Q") else None
    ctx = SieveContext.build(inst, int(opts["h"]), Q=Q, alpha=int(opts.get("alpha") or 1))
    rep = sieve_bound(ctx)
    rec = rep.to_json()
    rec["per_pair"] = [{"p": p, "q": q, "value": v} for (p, q), v in sorted(rep.per_pair.items())]
    return [rec]


def cmd_exponents(opts: dict) -> list:
    from .sieve import balance_exponents, exponent_calculator

    ds = _int_list(opts["d"])
    out = []
    for d in ds:
        rec = exponent_calculator(d).to_json()
        e1, e2 = balance_exponents(d)
        rec["balance"] = {"Q_exponent": f"1/{3 * d}", "sieve_error": str(e1), "tail_error": str(e2)}
        out.append(rec)
    return out


COMMANDS: dict[str, Callable[[dict], list]] = {
    "count": cmd_count,
    "scan": cmd_scan,
    "expsum": cmd_expsum,
    "congruence": cmd_congruence,
    "delta": cmd_delta,
    "lines": cmd_lines,
    "census": cmd_census,
    "sieve": cmd_sieve,
    "exponents": cmd_exponents,
}


# ---------------------------------------------------------------------------
# cache and dispatch
# ---------------------------------------------------------------------------


def _cache_lookup(cache_dir: Path, cfg: ExperimentConfig):
    path = cache_dir / f"{cfg.command}.jsonl"
    if not path.exists():
        return None
    hits = []
    with path.open() as fh:
        for line in fh:
            try:
                rec = json.loads(line)
            except json.JSONDecodeError:
                continue
            if rec.get("config_hash") == cfg.digest:
                hits.append(rec)
    return hits or None


def _cache_store(cache_dir: Path, cfg: ExperimentConfig, records: list[dict]) -> None:
    cache_dir.mkdir(parents=True, exist_ok=True)
    with (cache_dir / f"{cfg.command}.jsonl").open("a") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def run(cfg: ExperimentConfig, stream=None) -> tuple[int, list[dict]]:
    """Execute one configuration; returns (exit status, emitted records)."""
    stream = stream if stream is not None else sys.stdout
    opts = cfg.options
    cache_dir = opts.get("cache_dir")
    records = None
    if cache_dir and not opts.get("no_cache"):
        records = _cache_lookup(Path(cache_dir), cfg)
    if records is None:
        payloads = COMMANDS[cfg.command](opts)
        records = []
        for p in payloads:
            body, millis = _split_timing(p)
            records.append(ResultRecord(cfg.digest, cfg.command, body, millis=millis).to_json())
        if cache_dir:
            _cache_store(Path(cache_dir), cfg, records)
    lines = [json.dumps(r, sort_keys=True) for r in records]
    for line in lines:
        stream.write(line + "\n")
    if opts.get("out"):
        with open(opts["out"], "a") as fh:
            fh.write("".join(line + "\n" for line in lines))
    return EXIT_OK, records


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="energykit", description="Additive energy and sieve toolkit")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON or key=value file supplying any option")
    common.add_argument("--out", help="append JSON-lines records to this file")
    common.add_argument("--cache-dir", help="directory of per-command JSON-lines caches")
    common.add_argument("--no-cache", action="store_true", help="recompute even on a cache hit")
    common.add_argument("--threads", type=int, default=1)

    inst = argparse.ArgumentParser(add_help=False)
    inst.add_argument("--poly", help="univariate p(x); uses f = p(x) - p(y)")
    inst.add_argument("--f", help="bivariate f(x, y)")
    inst.add_argument("--g", help="bivariate g(x, y) of degree deg f - 1")
    inst.add_argument("--a", type=int)
    inst.add_argument("--b", type=int)
    inst.add_argument("--k", type=int)
    inst.add_argument("--B", type=int)

    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("count", parents=[common, inst], help="exact energy or general count")
    p.add_argument("--algo", choices=["mitm", "brute"])
    p.add_argument("--max-ops", type=int)

    p = sub.add_parser("scan", parents=[common, inst], help="growth exponent over a B list")
    p.add_argument("--kind", choices=["energy", "general", "curve"])
    p.add_argument("--Bs", help="comma-separated increasing B values")
    p.add_argument("--pairs", help="precomputed B:count pairs, comma separated")
    p.add_argument("--csv", help="write B,count,log10B,log10count table")

    p = sub.add_parser("expsum", parents=[common, inst], help="Sigma_t, Phi or Psi sums")
    p.add_argument("--kind", choices=["sigma", "phi", "psi"])
    for name in ("h", "p", "q", "t", "i", "j", "M", "N"):
        p.add_argument(f"--{name}", type=int)

    p = sub.add_parser("congruence", parents=[common], help="roots of Q mod p^l")
    p.add_argument("--poly")
    p.add_argument("--p", type=int)
    p.add_argument("--l", type=int)
    p.add_argument("--naive", action="store_true", default=None)

    p = sub.add_parser("delta", parents=[common, inst], help="line certificate Delta_f(M, N, k)")
    for name in ("M", "N", "p"):
        p.add_argument(f"--{name}", type=int)

    p = sub.add_parser("lines", parents=[common, inst], help="line classification")
    p.add_argument("--n", type=int, help="report lines of Gamma_n instead")

    p = sub.add_parser("census", parents=[common, inst], help="singular-member census")
    p.add_argument("--family", choices=["gamma", "K", "P"])
    p.add_argument("--bound", type=int, help="root search bound")

    p = sub.add_parser("sieve", parents=[common, inst], help="polynomial sieve report")
    p.add_argument("--h", type=int)
    p.add_argument("--Q", type=float)
    p.add_argument("--alpha", type=int)

    p = sub.add_parser("exponents", parents=[common], help="refined exponent bookkeeping")
    p.add_argument("--d", help="degree or comma-separated degrees")
    return ap


_REQUIRED = {
    "count": ("B",),
    "congruence": ("poly", "p", "l"),
    "delta": ("k", "M", "N"),
    "lines": ("k",),
    "census": ("k",),
    "sieve": ("k", "h"),
    "exponents": ("d",),
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    opts = {k: v for k, v in vars(args).items() if v is not None}
    cmd = opts.pop("command")
    try:
        if "config" in opts:
            merged = load_config_file(opts["config"])
            merged.update(opts)
            opts = merged
        missing = [k for k in _REQUIRED.get(cmd, ()) if opts.get(k) in (None, "")]
        if missing:
            raise ParseError(f"missing required option(s): {', '.join(missing)}", 0)
        status, _ = run(ExperimentConfig(cmd, opts))
        return status
    except (ParseError, InsufficientData, KeyError, ValueError) as exc:
        _report(exc)
        return EXIT_PARSE if not isinstance(exc, InvariantError) else EXIT_INVARIANT
    except BudgetExceeded as exc:
        _report(exc)
        return EXIT_BUDGET
    except InvariantError as exc:
        _report(exc)
        return EXIT_INVARIANT


def _report(exc: Exception) -> None:
    msg = f"missing option {exc}" if isinstance(exc, KeyError) else str(exc)
    print(f"energykit: error: {msg}", file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
