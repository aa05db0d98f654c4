"""Command-line frontend.

Exit codes: 0 success, 1 usage or input error, 2 verification failure.
Every CSV/JSON record carries the RunConfig that produced it, so
``signspan rerun FILE`` reproduces it.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from typing import Optional

from . import __version__, eta
from .bounds import DEFAULT_C, DEFAULT_EPSILON, bounds_table
from .estimators import CSV_FIELDS, mc_estimate
from .events import (
    EventKind,
    EventSpec,
    count_kso_independent_tuples,
    delta,
    exact_event_count,
    kso_check,
)
from .signspace import parse_matrix_text
from .verify import run_battery

WORKERS_ENV = "SIGNSPAN_WORKERS"

EXIT_OK, EXIT_USAGE, EXIT_FAIL = 0, 1, 2

SQUARE_EVENTS = {EventKind.SINGULAR_PM1.value, EventKind.SINGULAR_01.value}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


@dataclass
class RunConfig:
    subcommand: str
    event: Optional[str] = None
    p: Optional[int] = None
    n: Optional[int] = None
    m: Optional[int] = None
    trials: Optional[int] = None
    seed: Optional[int] = None
    confidence: float = 0.95
    workers: int = 1
    force: bool = False
    format: str = "csv"
    output: Optional[str] = None
    # subcommand-specific
    count: Optional[str] = None
    delta: bool = False
    k: Optional[int] = None
    symmetry: bool = True
    matrix: Optional[str] = None
    config: Optional[str] = None
    weights: list[str] = field(default_factory=list)
    prime: Optional[int] = None
    n_range: Optional[str] = None
    epsilon: str = str(DEFAULT_EPSILON)
    c: str = str(DEFAULT_C)
    only: list[str] = field(default_factory=list)
    samples: int = 100

    def record(self) -> dict:
        return {"version": __version__, "config": asdict(self)}

    @classmethod
    def from_record(cls, rec: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        cfg = rec["config"]
        unknown = set(cfg) - known
        if unknown:
            raise ValueError(f"unknown RunConfig fields {sorted(unknown)}")
        return cls(**cfg)


def parse_n_range(text: str) -> list[int]:
    """'4', '2..10' (inclusive) or '4,8,16'."""
    try:
        if ".." in text:
            lo, hi = text.split("..")
            ns = list(range(int(lo), int(hi) + 1))
        else:
            ns = [int(x) for x in text.split(",")]
    except ValueError:
        raise ValueError(f"bad n range {text!r}") from None
    if not ns:
        raise ValueError(f"empty n range {text!r}")
    return ns


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"not a rational number: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="signspan", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"signspan {__version__}")
    sub = ap.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    def common(sp, fmt=True):
        sp.add_argument("--workers", type=int, default=None, help=f"worker threads (default ${WORKERS_ENV} or 1)")
        if fmt:
            sp.add_argument("--format", choices=["csv", "json"], default="csv")
            sp.add_argument("--output", "-o", default=None, help="write here instead of stdout")

    kinds = [k.value for k in EventKind]

    sp = sub.add_parser("estimate", help="Monte Carlo estimate with a Wilson interval")
    sp.add_argument("--event", choices=kinds, required=True)
    sp.add_argument("-p", type=int, default=None, help="rows (defaults to n for singularity events)")
    sp.add_argument("-n", "--n", type=int, required=True)
    sp.add_argument("-m", type=int, default=None)
    sp.add_argument("--trials", type=int, required=True)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--confidence", type=float, default=0.95)
    common(sp)

    sp = sub.add_parser("exact", help="exhaustive probabilities and counts")
    what = sp.add_mutually_exclusive_group(required=True)
    what.add_argument("--event", choices=kinds)
    what.add_argument("--count", choices=["kso-tuples"])
    what.add_argument("--delta", action="store_true")
    what.add_argument("--matrix", help="'+'/'-' matrix file: report a KSO witness")
    sp.add_argument("-p", type=int, default=None)
    sp.add_argument("-n", "--n", type=int, default=None)
    sp.add_argument("-m", type=int, default=None)
    sp.add_argument("-k", type=int, default=None)
    sp.add_argument("--force", action="store_true", help="ignore size guards")
    sp.add_argument("--no-symmetry", dest="symmetry", action="store_false")
    common(sp, fmt=False)
    sp.add_argument("--output", "-o", default=None)

    sp = sub.add_parser("eta", help="eta* by homology and by flag sums")
    sp.add_argument("config", help="point configuration JSON")
    sp.add_argument("--weights", action="append", default=[], help="comma-separated rationals; repeatable")
    sp.add_argument("--field", dest="prime", type=int, default=None, help="prime for GF(p) homology (default: rationals)")
    sp.add_argument("--force", action="store_true")
    sp.add_argument("--output", "-o", default=None)

    sp = sub.add_parser("bounds", help="closed-form bounds and leading terms")
    sp.add_argument("--n", dest="n_range", required=True, help="e.g. 2..10 or 4,8,16")
    sp.add_argument("-p", type=int, default=None)
    sp.add_argument("-m", type=int, default=None)
    sp.add_argument("--epsilon", default=str(DEFAULT_EPSILON))
    sp.add_argument("-c", default=str(DEFAULT_C))
    sp.add_argument("--output", "-o", default=None)

    sp = sub.add_parser("verify", help="desk-scale verification battery")
    sp.add_argument("--only", action="append", default=[], help="run only this check; repeatable")
    sp.add_argument("--samples", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    common(sp, fmt=False)

    sp = sub.add_parser("rerun", help="re-execute the RunConfig embedded in an output file")
    sp.add_argument("record", help="CSV or JSON output of an earlier run")
    return ap


def resolve_workers(flag: Optional[int]) -> int:
    if flag is not None:
        w = flag
    elif os.environ.get(WORKERS_ENV):
        try:
            w = int(os.environ[WORKERS_ENV])
        except ValueError:
            raise ValueError(f"${WORKERS_ENV} must be an integer") from None
    else:
        w = 1
    if w < 1:
        raise ValueError("workers must be positive")
    return w


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    kw = {k: v for k, v in vars(ns).items() if k in {f.name for f in fields(RunConfig)} and v is not None}
    if "workers" in vars(ns):
        kw["workers"] = resolve_workers(ns.workers)
    if kw.get("event") in SQUARE_EVENTS and ns.subcommand in ("estimate", "exact") and kw.get("p") is None:
        kw["p"] = kw.get("n")
    return RunConfig(**kw)


def _event(cfg: RunConfig) -> EventSpec:
    if cfg.n is None:
        raise UsageError("the event needs -n")
    if cfg.p is None:
        raise UsageError("the event needs -p")
    return EventSpec(EventKind(cfg.event), cfg.p, cfg.n, cfg.m)


def _emit(text: str, cfg: RunConfig):
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json_out(payload: dict, cfg: RunConfig):
    _emit(json.dumps({**cfg.record(), **payload}, indent=2) + "\n", cfg)


def _csv_out(header: list[str], rows: list[dict], cfg: RunConfig):
    buf = io.StringIO()
    buf.write("# " + json.dumps(cfg.record(), sort_keys=True) + "\n")
    w = csv.DictWriter(buf, fieldnames=header, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    _emit(buf.getvalue(), cfg)


def cmd_estimate(cfg: RunConfig) -> int:
    if cfg.seed is None:
        raise UsageError("estimate needs --seed")
    if cfg.trials is None or cfg.trials < 1:
        raise UsageError("estimate needs a positive --trials")
    est = mc_estimate(_event(cfg), cfg.trials, cfg.seed, cfg.confidence, cfg.workers)
    row = est.csv_row()
    if cfg.format == "json":
        _json_out({"estimate": row, "upper_one_sided": repr(est.upper_one_sided)}, cfg)
    else:
        _csv_out(CSV_FIELDS, [row], cfg)
    return EXIT_OK


def _frac(x: Fraction) -> str:
    return str(x)


def cmd_exact(cfg: RunConfig) -> int:
    if cfg.matrix:
        with open(cfg.matrix) as fh:
            M = parse_matrix_text(fh.read())
        rep = kso_check(M)
        payload = {"p": M.p, "n": M.n, "kso": rep is not None}
        if rep is not None:
            payload.update(witness=str(rep.witness), coefficients=[_frac(c) for c in rep.coefficients], support=rep.support)
    elif cfg.count == "kso-tuples":
        if cfg.n is None:
            raise UsageError("--count kso-tuples needs -n")
        payload = {"quantity": "kso_independent_tuples", "n": cfg.n, "count": count_kso_independent_tuples(cfg.n, force=cfg.force)}
    elif cfg.delta:
        if cfg.n is None or cfg.k is None:
            raise UsageError("--delta needs -n and -k")
        payload = {"quantity": "delta", "n": cfg.n, "k": cfg.k, "value": _frac(delta(cfg.n, cfg.k, force=cfg.force))}
    else:
        e = _event(cfg)
        count, total = exact_event_count(e, symmetry=cfg.symmetry, workers=cfg.workers, force=cfg.force)
        payload = {
            "event": e.kind.value,
            "p": e.p,
            "n": e.n,
            "m": e.m,
            "count": count,
            "total": total,
            "probability": _frac(Fraction(count, total)),
        }
    _json_out(payload, cfg)
    return EXIT_OK


def _parse_weights(text: str) -> list[Fraction]:
    return [_fraction(x.strip()) for x in text.split(",")]


def cmd_eta(cfg: RunConfig) -> int:
    with open(cfg.config) as fh:
        raw = fh.read()
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ValueError(f"{cfg.config}: {exc}") from None
    H = eta.PointConfig.from_json(raw)
    weight_sets = [list(H.weights)]
    extra = data.get("weight_sets", []) if isinstance(data, dict) else []
    weight_sets += [[_fraction(str(w)) for w in ws] for ws in extra]
    weight_sets += [_parse_weights(w) for w in cfg.weights]
    # validate every weight set before any heavy work
    for ws in weight_sets:
        H.with_weights(ws)
    if cfg.prime is not None and cfg.prime < 2:
        raise ValueError("--field must be a prime")
    homology = eta.eta_star_homology(H, cfg.prime, force=cfg.force)
    sums = [eta.eta_star_flagsum(H.with_weights(ws), force=cfg.force) for ws in weight_sets]
    passed = all(s == homology for s in sums)
    _json_out(
        {
            "points": len(H),
            "ambient": H.ambient,
            "homology": homology,
            "flag_sums": [_frac(s) for s in sums],
            "weight_sets": [[_frac(w) for w in ws] for ws in weight_sets],
            "result": "PASS" if passed else "FAIL",
        },
        cfg,
    )
    return EXIT_OK if passed else EXIT_FAIL


def cmd_bounds(cfg: RunConfig) -> int:
    ns = parse_n_range(cfg.n_range)
    table = bounds_table(ns, p=cfg.p, m=cfg.m, epsilon=_fraction(cfg.epsilon), c=_fraction(cfg.c))
    text = table.to_csv()
    _emit("# " + json.dumps(cfg.record(), sort_keys=True) + "\n" + text, cfg)
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    try:
        results = run_battery(cfg.only or None, samples=cfg.samples, seed=cfg.seed if cfg.seed is not None else 0, workers=cfg.workers)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    for r in results:
        print(r.line(), flush=True)
    ok = all(r.passed for r in results)
    print(f"{'PASS' if ok else 'FAIL'}: {sum(r.passed for r in results)}/{len(results)} checks")
    return EXIT_OK if ok else EXIT_FAIL


COMMANDS = {
    "estimate": cmd_estimate,
    "exact": cmd_exact,
    "eta": cmd_eta,
    "bounds": cmd_bounds,
    "verify": cmd_verify,
}


def read_record(path: str) -> RunConfig:
    """RunConfig from a CSV ('# {...}' first line) or JSON output."""
    with open(path) as fh:
        text = fh.read()
    first = text.lstrip().splitlines()[0] if text.strip() else ""
    rec = json.loads(first[1:]) if first.startswith("#") else json.loads(text)
    return RunConfig.from_record(rec)


def run(cfg: RunConfig) -> int:
    return COMMANDS[cfg.subcommand](cfg)


def main(argv=None) -> int:
    try:
        ns = build_parser().parse_args(argv)
        if ns.subcommand == "rerun":
            cfg = read_record(ns.record)
            cfg.output = None
        else:
            cfg = config_from_args(ns)
        return run(cfg)
    except UsageError as exc:
        print(f"signspan: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError, KeyError) as exc:
        print(f"signspan: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
