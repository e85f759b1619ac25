"""Command-line front end: ``zpzp {det,sweep,orbits,growth,selftest}``.

Exit codes: 0 success, 1 a check failed or routes disagree, 2 invalid
parameters, 3 unreadable or malformed input file, 4 precision instability.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .coinvariants import GrowthSpec, fixture_text
from .errors import ParameterError, TruncationError, ZpzpError
from .orbit import VERIFY_HEADER, OrbitMatrixParams, orbit_partition, verify
from .selftest import omega_injectivity, reversed_product, run_selftest
from .skew import mul

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_UNSTABLE = 4

DEFAULT_SEED = 20240101
DEFAULT_BUDGET = 343
WORKERS_ENV = "ZPZP_WORKERS"


@dataclass
class RunConfig:
    """Everything that determines a run's output."""

    command: str
    params: dict = field(default_factory=dict)
    out: Path | None = None
    fmt: str = "csv"
    seed: int = DEFAULT_SEED
    precision: int | None = None

    def __post_init__(self):
        for key, value in self.params.items():
            if isinstance(value, (list, tuple)) and not value:
                raise ParameterError(f"parameter range {key!r} is empty")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _int_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _u_tokens(text: str) -> list[str]:
    """Comma list of integers or ``p+k`` offsets, resolved per prime later."""
    toks = [tok.strip() for tok in text.split(",") if tok.strip()]
    for tok in toks:
        if not (tok.lstrip("-").isdigit() or (tok.startswith("p+") and tok[2:].isdigit())):
            raise argparse.ArgumentTypeError(f"bad u value {tok!r}; use integers or p+k")
    return toks


def _resolve_u(tok: str, p: int) -> int:
    return p + int(tok[2:]) if tok.startswith("p+") else int(tok)


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def _workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------
# commands


def cmd_det(cfg: RunConfig) -> int:
    prm = cfg.params
    params = OrbitMatrixParams(prm["p"], prm["n"], prm["d"], prm["u"])
    methods = ("exact", "blocks", "closed") if prm["method"] == "all" else (prm["method"],)
    rec = verify(params, methods, strict=False)
    _emit(VERIFY_HEADER + "\n" + rec.csv_row() + "\n", cfg.out)
    return EXIT_OK if rec.agree else EXIT_FAIL


def _sweep_tuples(p_set, n_max, d_max, u_tokens, budget):
    for p in p_set:
        top = n_max if n_max is not None else max(1, _largest_level(p, budget))
        for n in range(1, top + 1):
            for d in range(1, (d_max if d_max is not None else p + 2) + 1):
                for tok in u_tokens:
                    yield p, n, d, _resolve_u(tok, p)


def _largest_level(p: int, budget: int) -> int:
    n = 0
    while p ** (n + 1) <= budget:
        n += 1
    return n


def _verify_row(args) -> tuple[str, bool | None]:
    (p, n, d, u), budget = args
    if p**n > budget:
        return f"{p},{n},{d},{u},,,,skipped", None
    rec = verify(OrbitMatrixParams(p, n, d, u), strict=False)
    return rec.csv_row(), rec.agree


def cmd_sweep(cfg: RunConfig) -> int:
    prm = cfg.params
    tuples = list(_sweep_tuples(prm["p"], prm["n_max"], prm["d_max"], prm["u"], prm["budget"]))
    for t in tuples:
        OrbitMatrixParams(*t)  # validate everything before starting work
    jobs = [(t, prm["budget"]) for t in tuples]
    workers = prm.get("workers") or _workers()
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_verify_row, jobs, chunksize=4))
    else:
        results = [_verify_row(j) for j in jobs]
    rows = [VERIFY_HEADER] + [row for row, _ in results]
    verdicts = [ok for _, ok in results if ok is not None]
    skipped = sum(ok is None for _, ok in results)
    agree_all = all(verdicts)
    _emit("\n".join(rows) + "\n", cfg.out)
    print(f"rows={len(results)} computed={len(verdicts)} skipped={skipped} agree_all={str(agree_all).lower()}")
    return EXIT_OK if agree_all else EXIT_FAIL


def cmd_orbits(cfg: RunConfig) -> int:
    prm = cfg.params
    classes = orbit_partition(prm["p"], prm["n"], prm["u"])
    if cfg.fmt == "json":
        text = json.dumps([sorted(c.members) for c in classes]) + "\n"
    else:
        text = "".join(
            f"m={c.m} i={c.i} size={c.size}: {' '.join(map(str, sorted(c.members)))}\n" for c in classes
        )
    _emit(text, cfg.out)
    return EXIT_OK


def cmd_growth(cfg: RunConfig) -> int:
    prm = cfg.params
    try:
        if prm.get("fixture"):
            text = fixture_text(prm["fixture"])
        else:
            text = Path(prm["spec_file"]).read_text()
        spec = GrowthSpec.from_json(text)
    except (OSError, ParameterError) as exc:
        print(f"error: cannot read growth spec: {exc}", file=sys.stderr)
        return EXIT_PARSE
    report = spec.report(prm["n_max"], cfg.precision, prm["max_precision"])
    _emit(report.to_json() if cfg.fmt == "json" else report.to_csv(), cfg.out)
    if not report.all_pass:
        return EXIT_FAIL
    if not report.all_stable:
        print("error: some levels stayed unstable up to the precision cap", file=sys.stderr)
        return EXIT_UNSTABLE
    return EXIT_OK


def cmd_selftest(cfg: RunConfig) -> int:
    prm = cfg.params
    multiply = reversed_product if prm.get("mutate") else mul
    report = run_selftest(
        prm["p"], prm["u"], cfg.precision, prm["ds"], prm["dt"], prm["trials"], cfg.seed, multiply
    )
    if prm.get("injectivity"):
        checked, bad = omega_injectivity(prm["p"])
        status = "FAIL" if bad else "PASS"
        report.extra_lines.append(f"{'omega_injectivity':<22} elements={checked} counterexamples={len(bad)} {status}")
        report.extra_ok = not bad
    _emit(report.render(), cfg.out)
    return EXIT_OK if report.passed else EXIT_FAIL


COMMANDS = {
    "det": cmd_det,
    "sweep": cmd_sweep,
    "orbits": cmd_orbits,
    "growth": cmd_growth,
    "selftest": cmd_selftest,
}


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="zpzp", description="Truncated Iwasawa-algebra arithmetic and orbit-matrix determinants.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    det = sub.add_parser("det", help="determinant of one orbit matrix A(p,n,d,u)")
    for name in ("p", "n", "d", "u"):
        det.add_argument(f"--{name}", type=int, required=True)
    det.add_argument("--method", choices=["exact", "blocks", "closed", "all"], default="all")
    det.add_argument("--out", type=Path)

    sweep = sub.add_parser("sweep", help="three-way determinant agreement over a parameter grid")
    sweep.add_argument("--p", type=_int_list, default=[3, 5, 7], help="comma list of odd primes")
    sweep.add_argument("--n-max", type=int, default=None, help="largest n (default: all n with p^n <= budget)")
    sweep.add_argument("--d-max", type=int, default=None, help="largest d (default p+2 for each p)")
    sweep.add_argument("--u", type=_u_tokens, default=["1", "2", "p+1"], help="comma list of u or p+k")
    sweep.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="skip tuples with p^n above this")
    sweep.add_argument("--workers", type=int, default=None, help=f"process count (default ${WORKERS_ENV} or 1)")
    sweep.add_argument("--out", type=Path)

    orbits = sub.add_parser("orbits", help="orbit classes of x -> x(1+pu) on Z/p^n")
    for name in ("p", "n", "u"):
        orbits.add_argument(f"--{name}", type=int, required=True)
    orbits.add_argument("--format", choices=["json", "text"], default="json")
    orbits.add_argument("--out", type=Path)

    growth = sub.add_parser("growth", help="measured e_n against the growth bounds")
    src = growth.add_mutually_exclusive_group(required=True)
    src.add_argument("spec_file", nargs="?", help="module presentation JSON with pseudo-isomorphism data")
    src.add_argument("--fixture", help="name of a shipped fixture")
    growth.add_argument("--n-max", type=int, default=1)
    growth.add_argument("--prec", type=int, default=None, help="starting precision N")
    growth.add_argument("--prec-cap", type=int, default=12, help="largest precision tried")
    growth.add_argument("--format", choices=["csv", "json"], default="csv")
    growth.add_argument("--out", type=Path)

    st = sub.add_parser("selftest", help="randomised property suite of the skew arithmetic")
    st.add_argument("--p", type=int, default=3)
    st.add_argument("--u", type=int, default=1)
    st.add_argument("--prec", type=int, default=2)
    st.add_argument("--ds", type=int, default=10)
    st.add_argument("--dt", type=int, default=4)
    st.add_argument("--trials", type=int, default=100)
    st.add_argument("--seed", type=int, default=DEFAULT_SEED)
    st.add_argument("--injectivity", action="store_true", help="also run the exhaustive omega check")
    st.add_argument("--mutate", action="store_true", help="swap in a wrong product; the suite must fail")
    st.add_argument("--out", type=Path)
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    cmd = ns.command
    out = getattr(ns, "out", None)
    if cmd == "det":
        return RunConfig(cmd, {"p": ns.p, "n": ns.n, "d": ns.d, "u": ns.u, "method": ns.method}, out)
    if cmd == "sweep":
        params = {"p": ns.p, "n_max": ns.n_max, "d_max": ns.d_max, "u": ns.u, "budget": ns.budget, "workers": ns.workers}
        if (ns.n_max is not None and ns.n_max < 1) or (ns.d_max is not None and ns.d_max < 1):
            raise ParameterError("n-max and d-max must be >= 1")
        return RunConfig(cmd, params, out)
    if cmd == "orbits":
        return RunConfig(cmd, {"p": ns.p, "n": ns.n, "u": ns.u}, out, fmt=ns.format)
    if cmd == "growth":
        if ns.n_max < 0:
            raise ParameterError("n-max must be >= 0")
        params = {"spec_file": ns.spec_file, "fixture": ns.fixture, "n_max": ns.n_max, "max_precision": ns.prec_cap}
        return RunConfig(cmd, params, out, fmt=ns.format, precision=ns.prec)
    params = {
        "p": ns.p,
        "u": ns.u,
        "ds": ns.ds,
        "dt": ns.dt,
        "trials": ns.trials,
        "mutate": ns.mutate,
        "injectivity": ns.injectivity,
    }
    if ns.trials < 1:
        raise ParameterError("trials must be >= 1")
    return RunConfig(cmd, params, out, seed=ns.seed, precision=ns.prec)


def main(argv: list[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(ns)
        return COMMANDS[cfg.command](cfg)
    except (ParameterError, TruncationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ZpzpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
