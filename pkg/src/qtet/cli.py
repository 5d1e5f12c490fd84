"""Command-line front end.

Exit codes: 0 success, 1 numeric failure, 2 usage error.  Every command
writes a JSON document with a top-level "schema" field; ``verify-cdft`` can
also write CSV.
"""

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .asymptotics import SCHEMA, run_sweep
from .dft import DEFAULT_BUDGET, BudgetError, ColoringSpec, Triangulation, tv_r_scaled, yhat_scaled
from .geometry import DomainError, GeometryError, Partition, solve_geometry
from .qdilog import ContourError, PoleError, phi_r
from .qkernel import AdmissibilityError, QContext, is_admissible_six, sixj_scaled
from .report import dumps_json

NUMERIC = (GeometryError, DomainError, BudgetError, ContourError, PoleError,
           ArithmeticError, np.linalg.LinAlgError)


class UsageError(Exception):
    pass


def _ints(text: str, name: str):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"{name} must be a comma-separated list of integers") from None


def _floats(text: str, name: str):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"{name} must be a comma-separated list of numbers") from None


def _partition(text: str) -> Partition:
    try:
        return Partition.parse(text or "")
    except ValueError as exc:
        raise UsageError(f"bad partition: {exc}") from None


def parse_rs(text: str):
    """'start:stop:step' (stop included) or a single level; odd levels only."""
    parts = text.split(":")
    try:
        nums = [int(p) for p in parts]
    except ValueError:
        raise UsageError(f"bad level range {text!r}") from None
    if len(nums) == 1:
        rs = nums
    elif len(nums) == 3:
        start, stop, step = nums
        if step <= 0 or step % 2:
            raise UsageError("the step of a level range must be a positive even number")
        rs = list(range(start, stop + 1, step))
    else:
        raise UsageError("level range must read start:stop:step")
    if not rs or any(r % 2 == 0 or r < 3 for r in rs):
        raise UsageError("levels must be odd and at least 3")
    return rs


def _context(r: int) -> QContext:
    if r % 2 == 0:
        raise UsageError(f"r must be odd, got {r}")
    if r < 3:
        raise UsageError(f"r must be at least 3, got {r}")
    return QContext(r)


def _angles(args, partition):
    """Six target angles from --theta, or from --theta-i and --theta-j."""
    nI = len(partition.I)
    if args.theta:
        theta = _floats(args.theta, "--theta")
        if len(theta) != 6:
            raise UsageError("--theta needs six angles")
        return theta
    ti = _floats(args.theta_i, "--theta-i") if args.theta_i else []
    tj = _floats(args.theta_j, "--theta-j") if args.theta_j else []
    if len(ti) != nI:
        raise UsageError(f"--theta-i needs {nI} angles, one per deep edge")
    if len(tj) != 6 - nI:
        raise UsageError(f"--theta-j needs {6 - nI} angles, one per regular edge")
    theta = [0.0] * 6
    for k, t in zip(partition.deep, ti):
        theta[k] = t
    for k, t in zip(partition.regular, tj):
        theta[k] = t
    return theta


def _emit(args, text: str):
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _scaled_fields(s):
    return {"value": s.to_complex(), "log_abs": s.log_mag, "phase": s.phase}


def _check_json(args):
    if getattr(args, "format", "json") != "json":
        raise UsageError(f"{args.command} only writes json")


# ----------------------------------------------------------------------------
# Commands

def cmd_sixj(args) -> int:
    _check_json(args)
    ctx = _context(args.r)
    colors = _ints(args.colors, "--colors")
    if len(colors) != 6:
        raise UsageError("--colors needs six integers")
    if not is_admissible_six(colors, ctx):
        raise UsageError(f"colours {colors} are not {ctx.r}-admissible")
    s = sixj_scaled(colors, ctx)
    _emit(args, dumps_json({"schema": SCHEMA, "command": "sixj", "r": ctx.r, "colors": colors,
                            **_scaled_fields(s)}))
    return 0


def cmd_dft(args) -> int:
    _check_json(args)
    ctx = _context(args.r)
    colors = _ints(args.colors, "--colors")
    if len(colors) != 6:
        raise UsageError("--colors needs six integers")
    partition = _partition(args.partition)
    s = yhat_scaled(ColoringSpec(tuple(colors)), partition, ctx, budget=args.budget)
    _emit(args, dumps_json({"schema": SCHEMA, "command": "dft", "r": ctx.r, "colors": colors,
                            "I": list(partition.I), **_scaled_fields(s)}))
    return 0


def cmd_tv(args) -> int:
    _check_json(args)
    ctx = _context(args.r)
    try:
        tri = Triangulation.from_file(args.tri)
    except OSError as exc:
        raise UsageError(f"cannot read {args.tri}: {exc.strerror}") from None
    b = _ints(args.b, "--b")
    if len(b) == 1:
        b = b * tri.num_edges
    s = tv_r_scaled(tri, b, ctx, budget=args.budget)
    _emit(args, dumps_json({"schema": SCHEMA, "command": "tv", "r": ctx.r, "tri": str(args.tri),
                            "b": b, **_scaled_fields(s)}))
    return 0


def cmd_geom(args) -> int:
    _check_json(args)
    partition = _partition(args.partition)
    theta = np.array(_angles(args, partition))
    mu = _ints(args.mu, "--mu") if args.mu else [1] * 6
    geom = solve_geometry(theta[partition.deep], theta[partition.regular], partition,
                          tol=args.tol, signs=mu)
    doc = {"schema": SCHEMA, "command": "geom", "I": list(partition.I),
           "theta": geom.theta, "l": geom.l, "vol": geom.vol, "cov": geom.cov,
           "gram_det": geom.gram_det, "jac": geom.jac, "xi": geom.xi,
           "iterations": geom.iterations}
    _emit(args, dumps_json(doc))
    return 0


def cmd_phi(args) -> int:
    _check_json(args)
    ctx = _context(args.r)
    try:
        z = complex(args.z.replace(" ", ""))
    except ValueError:
        raise UsageError(f"cannot read {args.z!r} as a complex number") from None
    v = phi_r(z, ctx)
    _emit(args, dumps_json({"schema": SCHEMA, "command": "phi", "r": ctx.r, "z": z, "value": v}))
    return 0


def cmd_verify_cdft(args) -> int:
    partition = _partition(args.partition)
    theta = _angles(args, partition)
    mu = _ints(args.mu, "--mu") if args.mu else [1] * 6
    if len(mu) != 6 or any(m not in (1, -1) for m in mu):
        raise UsageError("--mu needs six entries of +1 or -1")
    parity = _ints(args.parity_j, "--parity-j") if args.parity_j else None
    rs = parse_rs(args.rs)
    if max(theta) > args.max_angle:
        raise UsageError(f"target angles exceed --max-angle {args.max_angle}")
    report = run_sweep(theta, mu, partition, rs, parity_J=parity, max_angle=args.max_angle,
                       budget=args.budget)
    _emit(args, report.to_csv() if args.format == "csv" else report.to_json())
    if report.skipped_count:
        print(f"warning: {report.skipped_count} level(s) skipped", file=sys.stderr)
        return 0
    return 0 if report.fit.get("ok") else 1


COMMANDS = {"sixj": cmd_sixj, "dft": cmd_dft, "tv": cmd_tv, "geom": cmd_geom,
            "verify-cdft": cmd_verify_cdft, "phi": cmd_phi}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qtet", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, level=True):
        if level:
            p.add_argument("--r", type=int, required=True, help="odd level r >= 3")
        p.add_argument("--out", help="write here instead of stdout")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        return p

    p = common(sub.add_parser("sixj", help="quantum 6j-symbol"))
    p.add_argument("--colors", required=True, help="a1,...,a6")

    p = common(sub.add_parser("dft", help="Fourier transform of the squared 6j-symbol"))
    p.add_argument("--colors", required=True, help="b on deep edges, a on regular ones")
    p.add_argument("--partition", default="", help="deep edges, e.g. 1,3")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)

    p = common(sub.add_parser("tv", help="relative Turaev-Viro state sum"))
    p.add_argument("--tri", required=True, help="triangulation file")
    p.add_argument("--b", default="0", help="one colour per edge, or one for all")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)

    for name, helptext in (("geom", "solve a deeply truncated tetrahedron"),
                           ("verify-cdft", "sweep levels against the predicted asymptotics")):
        p = common(sub.add_parser(name, help=helptext), level=False)
        p.add_argument("--partition", default="", help="deep edges, e.g. 1,3")
        p.add_argument("--theta", help="six dihedral angles")
        p.add_argument("--theta-i", help="angles at the deep edges")
        p.add_argument("--theta-j", help="angles at the regular edges")
        p.add_argument("--mu", help="six signs (default all +1)")
        if name == "geom":
            p.add_argument("--tol", type=float, default=1e-12)
        else:
            p.add_argument("--rs", default="51:501:50", help="start:stop:step, odd levels")
            p.add_argument("--parity-j", help="parities of the regular colours (default even)")
            p.add_argument("--max-angle", type=float, default=0.5)
            p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)

    p = common(sub.add_parser("phi", help="quantum dilogarithm"))
    p.add_argument("--z", required=True, help="complex point, e.g. 1.2+0.1j")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NUMERIC as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 1
    except (AdmissibilityError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
