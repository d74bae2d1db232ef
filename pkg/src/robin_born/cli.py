"""Command-line entry point: evaluate fields, compare them, scan Born convergence.

Every subcommand reads a scenario file (``--config``), applies flag overrides
and writes CSV to ``--out`` or stdout. Exit status: 0 success, 1 invalid
input, 2 Born series not converged within ``nMax`` (``converge`` only).
"""

from __future__ import annotations

import argparse
import csv
import sys
from contextlib import contextmanager

import numpy as np
import yaml

from robin_born import born, exact, kernels
from robin_born.config import ScenarioConfig, load_config
from robin_born.exact import FieldCurve, format_number
from robin_born.model import Geometry, ModelValidationError, SpaceTimePoint, TimeGrid, ensure_valid
from robin_born.specfun import DomainError

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NOT_CONVERGED = 2

FIELDS = ("neumann", "born", "exact", "ebc")


class HalfspaceOnlyError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    # usage errors are invalid input too; status 2 is reserved for non-convergence
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def field_values(cfg: ScenarioConfig, which: str) -> np.ndarray:
    """The requested field at the configured position over the configured grid."""
    times = cfg.grid.times()
    m, beta, src, geom = cfg.medium, cfg.beta, cfg.source, cfg.geometry
    x1, x2, x3 = cfg.point
    if which == "born" and geom.is_slab:
        return born.slab_born_partial_sums(cfg.n_max, cfg.point, times, src, m, beta, geom)[-1]
    if which == "born":
        return born.born_curve(cfg.n_max, cfg.point, times, src, m, beta)
    if which == "neumann":
        func = lambda p: kernels.neumann_kernel(p, src, m, geom)  # noqa: E731
    elif geom.is_slab:
        raise HalfspaceOnlyError(f"'{which}' is only available for the half space")
    elif which == "exact":
        func = lambda p: exact.exact_solution(p, src, m, beta)  # noqa: E731
    elif which == "ebc":
        exact.extrapolation_distance(m, beta)
        func = lambda p: exact.ebc_solution(p, src, m, beta)  # noqa: E731
    else:
        raise ValueError(f"unknown field {which!r}")
    return np.array([func(SpaceTimePoint(x1, x2, x3, float(t))) for t in times])


@contextmanager
def _output(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def cmd_evaluate(cfg: ScenarioConfig, which: str, out) -> int:
    FieldCurve(cfg.grid, field_values(cfg, which), which).to_csv(out)
    return EXIT_OK


def cmd_compare(cfg: ScenarioConfig, a: str, b: str, out, floor_frac: float) -> int:
    ua = FieldCurve(cfg.grid, field_values(cfg, a), a)
    ub = FieldCurve(cfg.grid, field_values(cfg, b), b)
    rel = exact.relative_error_curve(ua, ub, floor_frac)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["t", "uA", "uB", "relErr"])
    for row in zip(cfg.grid.times(), ua.values, ub.values, rel.values):
        w.writerow([format_number(v) for v in row])
    return EXIT_OK


def cmd_converge(cfg: ScenarioConfig, out) -> int:
    if cfg.geometry.is_slab:
        raise HalfspaceOnlyError("convergence scan is only available for the half space")
    report = born.convergence_report(cfg.medium, cfg.beta, cfg.source.s, cfg.grid.t_end,
                                     cfg.point[2], cfg.tol, n_max=cfg.n_max,
                                     times=cfg.grid.times())
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["n", "maxRatio", "maxIncrement", "convergedFlag"])
    for n in range(cfg.n_max + 1):
        flag = int(report.n_converged is not None and n >= report.n_converged)
        w.writerow([n, format_number(report.max_ratio[n]), format_number(report.max_increment[n]), flag])
    return EXIT_OK if report.converged else EXIT_NOT_CONVERGED


def cmd_kernel(cfg: ScenarioConfig, out) -> int:
    m, src = cfg.medium, cfg.source
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["t", "freeSpace", "neumann"])
    for t in cfg.grid.times():
        p = SpaceTimePoint(*cfg.point, float(t))
        w.writerow([format_number(float(t)),
                    format_number(kernels.free_space_kernel(p, (src.y1, src.y2, 0.0), src.s, m)),
                    format_number(kernels.neumann_kernel(p, src, m, cfg.geometry))])
    return EXIT_OK


def cmd_slab(cfg: ScenarioConfig, out) -> int:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["t", "slab", "halfspace", "imagePairs", "tailBound"])
    for t in cfg.grid.times():
        p = SpaceTimePoint(*cfg.point, float(t))
        d = kernels.slab_neumann_kernel_detail(p, cfg.source, cfg.medium, cfg.geometry)
        w.writerow([format_number(float(t)), format_number(d.value),
                    format_number(kernels.halfspace_neumann_kernel(p, cfg.source, cfg.medium)),
                    d.image_pairs, format_number(d.tail_bound)])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="scenario file (YAML or JSON)")
    common.add_argument("--out", default=None, help="output CSV path (default: stdout)")
    common.add_argument("--beta", type=float, help="impedance beta, mm/ps")
    common.add_argument("--nmax", type=int, help="highest Born order")
    common.add_argument("--tol", type=float, help="relative convergence tolerance")
    common.add_argument("--x3", type=float, help="depth of the evaluation point, mm")
    common.add_argument("--grid", type=TimeGrid.parse, metavar="START:END:COUNT",
                        help="time grid in ps")

    parser = _Parser(
        prog="robin-born",
        description="Time-domain photon diffusion with a Robin boundary via the Born series.")
    sub = parser.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("evaluate", parents=[common], help="one field over the time grid")
    ev.add_argument("--which", choices=FIELDS, default="born")

    cmp_ = sub.add_parser("compare", parents=[common], help="two fields and their relative error")
    cmp_.add_argument("--a", choices=FIELDS, default="born")
    cmp_.add_argument("--b", choices=FIELDS, default="exact")
    cmp_.add_argument("--floor-frac", type=float, default=exact.DEFAULT_FLOOR_FRAC,
                      help="mask points below this fraction of max|uB|")

    sub.add_parser("converge", parents=[common], help="Born convergence diagnostics per order")
    sub.add_parser("kernel", parents=[common], help="free-space and Neumann kernel dump")

    slab = sub.add_parser("slab", parents=[common], help="slab Neumann kernel dump")
    slab.add_argument("--L", type=float, help="slab width, mm")
    slab.add_argument("--M", type=int, help="image pairs (default: adaptive)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config).with_overrides(
            beta=args.beta, n_max=args.nmax, tol=args.tol, x3=args.x3, grid=args.grid)
        if args.command == "slab":
            L = args.L if args.L is not None else cfg.geometry.L
            M = args.M if args.M is not None else cfg.geometry.image_truncation
            cfg = ScenarioConfig(cfg.medium, cfg.beta, Geometry.slab(L, M), cfg.source, cfg.grid,
                                 cfg.point, cfg.n_max, cfg.tol)
        ensure_valid(cfg)
        with _output(args.out) as out:
            if args.command == "evaluate":
                return cmd_evaluate(cfg, args.which, out)
            if args.command == "compare":
                return cmd_compare(cfg, args.a, args.b, out, args.floor_frac)
            if args.command == "converge":
                return cmd_converge(cfg, out)
            if args.command == "kernel":
                return cmd_kernel(cfg, out)
            return cmd_slab(cfg, out)
    except (ModelValidationError, DomainError, HalfspaceOnlyError, OSError, ValueError,
            yaml.YAMLError) as exc:
        print(f"robin-born: error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    raise SystemExit(main())
