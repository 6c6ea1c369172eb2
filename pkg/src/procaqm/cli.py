"""``procaqm`` command line: verify, localized, evolve, inner.

Exit codes: 0 success, 1 a check failed, 2 usage, parse or I/O error.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ParseError, ProcaError
from .fields import read_field_file
from .inner_products import CANONICAL, GENERAL, SIGMA3, inner
from .localized import probability_density, profile_table, total_probability
from .mode_algebra import LABELS, MetricParams, PhysicsConfig
from .verification import SUITES, field_report, run_suite

__all__ = ["RunConfig", "parse_config", "main"]

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


_EPS_TAG = {1: "p", -1: "m"}
_HEL_TAG = {1: "p1", -1: "m1", 0: "0"}
ALPHA_KEYS = tuple(f"alpha_{_EPS_TAG[e]}_{_HEL_TAG[h]}" for e, h in LABELS)


@dataclass(frozen=True)
class RunConfig:
    cfg: PhysicsConfig
    params: MetricParams
    lattice_n: int = 32
    seed: int = 0
    field: Path | None = None


def parse_config(text: str, source: str = "<config>", base: Path | None = None) -> RunConfig:
    """Parse flat ``key=value`` text.

    Keys: ``M``, ``gamma``, ``kappa``, ``alpha_p_p1`` ... ``alpha_m_0``
    (each ``re,im``), ``lattice_N``, ``seed`` and ``field`` (a path,
    relative to ``base``). Blank lines and ``#`` comments are ignored.
    """
    vals = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"{source}: line {n}: expected key=value")
        key, val = (s.strip() for s in line.split("=", 1))
        if key in vals:
            raise ParseError(f"{source}: line {n}: duplicate key {key!r}")
        vals[key] = (n, val)
    known = {"M", "gamma", "kappa", "lattice_N", "seed", "field", *ALPHA_KEYS}
    for key, (n, _) in vals.items():
        if key not in known:
            raise ParseError(f"{source}: line {n}: unknown key {key!r}")

    def num(key, default, cast=float):
        if key not in vals:
            return default
        n, v = vals[key]
        try:
            return cast(v)
        except ValueError as exc:
            raise ParseError(f"{source}: line {n}: bad value for {key}: {v!r}") from exc

    alpha = []
    for key in ALPHA_KEYS:
        if key not in vals:
            alpha.append(1.0 + 0j)
            continue
        n, v = vals[key]
        parts = v.split(",")
        try:
            alpha.append(complex(float(parts[0]), float(parts[1]) if len(parts) > 1 else 0.0))
            if len(parts) > 2:
                raise ValueError("too many parts")
        except ValueError as exc:
            raise ParseError(f"{source}: line {n}: {key} must be 're,im'") from exc
    try:
        cfg = PhysicsConfig(num("M", 1.0), num("gamma", 1.0), num("kappa", 1.0))
        params = MetricParams.from_values(alpha)
    except ProcaError as exc:
        raise ParseError(f"{source}: {exc}") from exc
    lattice_n = num("lattice_N", 32, int)
    if lattice_n < 8 or lattice_n % 2:
        raise ParseError(f"{source}: lattice_N must be an even integer >= 8")
    field = None
    if "field" in vals:
        field = Path(vals["field"][1])
        if base is not None and not field.is_absolute():
            field = base / field
    return RunConfig(cfg, params, lattice_n, num("seed", 0, int), field)


def _load_config(path):
    if path is None:
        return RunConfig(PhysicsConfig(1.0, 1.0, 1.0), MetricParams.ones())
    p = Path(path)
    return parse_config(p.read_text(), str(p), p.parent)


def _write_csv(path, header, rows):
    path = Path(path)
    if path.parent and not path.parent.exists():
        raise OSError(f"{path}: directory does not exist")
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([format(float(v), ".17g") for v in r])


# --------------------------------------------------------------------------

def cmd_verify(args) -> int:
    rc = _load_config(args.config)
    names = args.suite or list(SUITES)
    for n in names:
        if n not in SUITES:
            raise ParseError(f"unknown suite {n!r}; choose from {', '.join(SUITES)}")
    reports = [run_suite(n, rc.cfg, rc.seed, rc.lattice_n) for n in names]
    if rc.field is not None:
        reports.append(field_report(read_field_file(rc.field), rc.params, seed=rc.seed))
    for r in reports:
        print("\n".join(r.lines()))
        # timings go to stderr so that stdout is reproducible
        print(f"{r.suite}: {r.wall_time:.2f} s", file=sys.stderr)
    ok = all(r.passed for r in reports)
    print("OVERALL:", "PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_localized(args) -> int:
    if not args.mz_min > 0:
        raise _Usage("--mz-min must be positive")
    if args.mz_max < args.mz_min:
        raise _Usage("--mz-max must not be below --mz-min")
    if args.points < 1:
        raise _Usage("--points must be at least 1")
    rc = _load_config(args.config)
    mz = np.linspace(args.mz_min, args.mz_max, args.points) if args.points > 1 else np.array([args.mz_min])
    # the radial profiles are the same for every spin label; --spin is validated and recorded in the log only
    rows = profile_table(rc.cfg, mz, args.epsilon)
    _write_csv(args.out, ["Mz", "I1_closed", "I2_closed", "I3_closed", "I1_quad", "I2_quad", "I3_quad"], rows)
    print(f"wrote {len(rows)} rows to {args.out} (epsilon={args.epsilon}, spin={args.spin})")
    return EXIT_OK


def cmd_evolve(args) -> int:
    if args.steps < 0:
        raise _Usage("--steps must be non-negative")
    if args.density_grid < 1:
        raise _Usage("--density-grid must be at least 1")
    rc = _load_config(args.config)
    field = read_field_file(args.field)
    g = args.density_grid
    ax = np.linspace(-args.extent, args.extent, g) if g > 1 else np.zeros(1)
    X = np.stack(np.meshgrid(ax, ax, ax, indexing="ij"), axis=-1).reshape(-1, 3)
    for step in range(args.steps + 1):
        t = step * args.dt
        p = total_probability(field, t, rc.params)
        print(f"step {step} x0 {format(t, '.17g')} total_probability {format(p, '.17g')}")
        rho = probability_density(field, t, X, rc.params)
        rows = np.column_stack([X, rho])
        _write_csv(f"{args.out_prefix}_{step:04d}.csv", ["x", "y", "z", "rho"], rows)
    return EXIT_OK


def cmd_inner(args) -> int:
    rc = _load_config(args.config)
    a, b = read_field_file(args.field_a), read_field_file(args.field_b)
    kind = {"general": GENERAL(rc.params), "canonical": CANONICAL, "sigma3": SIGMA3}[args.kind]
    v = inner(kind, a, b, args.x0)
    print(f"{format(v.real, '.17g')},{format(v.imag, '.17g')}")
    return EXIT_OK


class _Usage(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _Usage(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="procaqm", description="Pseudo-Hermitian Proca field toolkit")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="run invariant suites")
    v.add_argument("--config", help="key=value configuration file")
    v.add_argument("--suite", action="append", choices=list(SUITES), help="suite to run (repeatable)")
    v.set_defaults(func=cmd_verify)

    loc = sub.add_parser("localized", help="tabulate the localized-state radial profiles")
    loc.add_argument("--epsilon", type=int, choices=(1, -1), default=1)
    loc.add_argument("--spin", type=int, choices=(1, -1, 0), default=1)
    loc.add_argument("--mz-min", type=float, required=True)
    loc.add_argument("--mz-max", type=float, required=True)
    loc.add_argument("--points", type=int, default=50)
    loc.add_argument("--out", required=True)
    loc.add_argument("--config")
    loc.set_defaults(func=cmd_localized)

    ev = sub.add_parser("evolve", help="evolve a stored field and write density snapshots")
    ev.add_argument("field")
    ev.add_argument("--steps", type=int, default=10)
    ev.add_argument("--dt", type=float, default=0.1)
    ev.add_argument("--density-grid", type=int, default=16)
    ev.add_argument("--out-prefix", required=True)
    ev.add_argument("--extent", type=float, default=5.0, help="half-width of the density cube")
    ev.add_argument("--config")
    ev.set_defaults(func=cmd_evolve)

    ip = sub.add_parser("inner", help="inner product of two stored fields")
    ip.add_argument("field_a")
    ip.add_argument("field_b")
    ip.add_argument("--kind", choices=("general", "canonical", "sigma3"), default="general")
    ip.add_argument("--x0", type=float, default=0.0)
    ip.add_argument("--config")
    ip.set_defaults(func=cmd_inner)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except _Usage as exc:
        print(f"procaqm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"procaqm: parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"procaqm: I/O error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ProcaError as exc:
        print(f"procaqm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
