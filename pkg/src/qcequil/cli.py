"""Command-line front end.

Exit codes: 0 success, 2 input or format error, 3 resource guard exceeded,
4 numeric domain error.
"""

from __future__ import annotations

import argparse
import itertools
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import boltzmann, chargemap, codes, equilibrium, gauge, gf2, partition, tanner
from .circulant import ExponentMatrix, format_exponent_text, parse_exponent_text
from .exceptions import DomainError, FormatError, ResourceError

EXIT_OK, EXIT_INPUT, EXIT_GUARD, EXIT_DOMAIN = 0, 2, 3, 4
BUDGET_ENV = "QCEQUIL_BUDGET"


class InputError(Exception):
    """Bad input file or option value (exit code 2)."""


def _warn(msg: str) -> None:
    print(f"warning: {msg}", file=sys.stderr)


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _emit(args, text: str) -> None:
    if args.output and args.output != "-":
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def _fmt(v: float) -> str:
    """Twelve significant digits, trailing zeros kept."""
    return np.format_float_positional(v, precision=12, unique=False, fractional=False, trim="k")


def _header_ints(text: str) -> list[int] | None:
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            try:
                return [int(t) for t in line.split()]
            except ValueError:
                return None
    return None


def _load_matrix(text: str, kind: str = "auto", met: bool | None = None):
    """Return ``(H, exponent_or_None)`` from an exponent file or an alist file."""
    if kind == "auto":
        head = _header_ints(text)
        kind = "exponent" if head is not None and len(head) == 3 else "alist"
    try:
        if kind == "alist":
            return gf2.from_alist(text), None
        E = parse_exponent_text(text, met=met)
    except DomainError as exc:
        raise InputError(str(exc)) from None
    return codes.lift(E), E


def _default_budget() -> int:
    raw = os.environ.get(BUDGET_ENV)
    if raw is None:
        return tanner.DEFAULT_TS_BUDGET
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"{BUDGET_ENV} must be an integer, got {raw!r}") from None


def _guard(value, default, name):
    if value is None:
        return default
    if value > default:
        _warn(f"{name} raised from {default} to {value}")
    return value


def _int_list(text: str, name: str) -> list[int]:
    try:
        return [int(t) for t in text.replace(";", ",").split(",") if t.strip()]
    except ValueError:
        raise InputError(f"--{name} must be comma-separated integers, got {text!r}") from None


def _bits(text: str, name: str) -> np.ndarray:
    s = text.replace(",", "").replace(" ", "")
    if not s or any(ch not in "01" for ch in s):
        raise InputError(f"--{name} must be a bit string, got {text!r}")
    return np.array([int(ch) for ch in s], dtype=np.uint8)


# -- commands ----------------------------------------------------------------


def cmd_lift(args) -> int:
    _, E = _load_matrix(_read(args.input), kind="exponent", met=True if args.met else None)
    _emit(args, gf2.to_alist(codes.lift(E)))
    return EXIT_OK


def _girth_text(g) -> str:
    if g is None:
        return "above-cap"
    return "acyclic" if g == math.inf else str(int(g))


def cmd_analyze(args) -> int:
    H, E = _load_matrix(_read(args.input), kind=args.format)
    budget = _guard(args.budget, _default_budget(), "trapping-set budget")
    max_dim = _guard(args.max_dim, 24, "max-dim")
    cap = args.girth_cap
    g = tanner.girth_bfs(H, cap=cap)
    if isinstance(E, ExponentMatrix):
        g_alg = tanner.cycle_condition_girth(E, cap=cap)
        g_alg = tanner.ACYCLIC if g_alg is None else g_alg
        if g_alg != g:
            print(f"error: girth methods disagree ({_girth_text(g)} vs {_girth_text(g_alg)})", file=sys.stderr)
            return EXIT_DOMAIN
    sets = tanner.find_trapping_sets(H, args.a_max, args.b_max, budget=budget, n_jobs=args.threads)
    k = H.shape[1] - gf2.rank(H)
    d = tanner.min_distance_exhaustive(H, max_dim=max_dim) if k <= max_dim else None
    lines = ["metric,value", f"variables,{H.shape[1]}", f"checks,{H.shape[0]}", f"dimension,{k}"]
    lines.append(f"girth,{_girth_text(g)}")
    lines.append(f"d_min,{'skipped' if d is None else ('inf' if d == math.inf else d)}")
    lines.append(f"trapping_sets,{len(sets)}")
    _emit(args, "\n".join(lines) + "\n\n" + tanner.trapping_sets_csv(sets))
    summary = f"n={H.shape[1]} m={H.shape[0]} k={k} girth={_girth_text(g)}"
    summary += f" d_min={'skipped (max-dim guard)' if d is None else d} trapping sets={len(sets)}"
    print(summary, file=sys.stderr)
    return EXIT_OK


def _charges(args, require=("id", "q", "x")):
    if not args.input:
        raise InputError(f"mode {args.mode} needs a charges CSV or explicit flags")
    try:
        return chargemap.read_charges_csv(_read(args.input), require=require)
    except FormatError as exc:
        raise InputError(str(exc)) from None


def _square_int(v: float, what: str) -> int:
    s = v * v
    if abs(s - round(s)) > 1e-9 or round(s) < 1:
        raise InputError(f"squared distance {what} = {s} is not a positive integer")
    return int(round(s))


def cmd_map(args) -> int:
    comments = [f"mode {args.mode}"]
    if args.mode == "1d3":
        if args.e is not None:
            if args.e < 2:
                raise InputError("--e must be at least 2")
            R1, R3 = 1, args.e - 1
        elif args.R1 is not None and args.R3 is not None:
            R1, R3 = args.R1, args.R3
        else:
            recs = sorted(_charges(args), key=lambda r: r.x)
            if len(recs) != 3:
                raise InputError("mode 1d3 needs exactly three charges")
            R1 = _square_int(recs[1].x - recs[0].x, "r12")
            R3 = _square_int(recs[2].x - recs[1].x, "r23")
        if R1 < 1 or R3 < 1:
            raise InputError("R1 and R3 must be positive")
        pairs = chargemap.map_1d_three(R1, R3)
        comments.append(f"e {pairs.e}")
        E = pairs.to_exponent()
    elif args.mode == "1d4":
        if args.a is not None and args.b is not None:
            a, b = args.a, args.b
        else:
            recs = sorted(_charges(args), key=lambda r: r.x)
            if len(recs) != 4:
                raise InputError("mode 1d4 needs exactly four charges")
            a = _square_int(recs[1].x - recs[0].x, "r12")
            b = _square_int(recs[2].x - recs[1].x, "r23")
            c = _square_int(recs[3].x - recs[2].x, "r34")
            if c != a + b:
                _warn(f"r34^2 = {c} differs from r12^2 + r23^2 = {a + b}; using a and b only")
        if a < 1 or b < 1:
            raise InputError("--a and --b must be positive")
        E = chargemap.map_1d_four(a, b)
        comments.append(f"a {a} b {b}")
    elif args.mode in ("2dcell", "coupled"):
        recs = _charges(args, require=("id", "q", "x", "y") + (("cell",) if args.mode == "coupled" else ()))
        if any(r.y is None for r in recs):
            raise InputError("every charge needs a y coordinate")
        origin = tuple(args.origin) if args.origin else (0, 0)
        try:
            if args.mode == "2dcell":
                if len(recs) != 4:
                    raise InputError("mode 2dcell needs exactly four charges")
                cm = chargemap.map_2d_cell([(r.x, r.y) for r in recs], [r.id for r in recs], origin)
                E = cm.to_exponent()
            else:
                cells: dict = {}
                for r in recs:
                    cells.setdefault(r.cell, []).append(r.id)
                if any(len(v) != 4 for v in cells.values()):
                    raise InputError("each cell needs exactly four charges")
                maps = chargemap.map_coupled_cells(
                    list(cells.values()), [(r.id, r.x, r.y) for r in recs], [origin] * len(cells)
                )
                E = chargemap.coupled_exponent(maps)
        except DomainError as exc:
            raise InputError(str(exc)) from None
        comments.append("columns " + " ".join(E.labels))
    else:  # hex
        if args.R is None or args.q is None or args.alpha is None:
            raise InputError("mode hex needs --R, --q and --alpha")
        if args.q < 1 or math.floor(args.R / args.q) == 0:
            raise InputError(f"quantization step floor(R/q) is zero for R={args.R}, q={args.q}")
        if args.input:
            recs = _charges(args, require=("id", "q", "x", "y"))
            if len(recs) != 7:
                raise InputError("mode hex needs seven nodes, centre first")
            nodes = [(r.x - recs[0].x, r.y - recs[0].y) for r in recs]
        else:
            ang = np.arange(6) * np.pi / 3
            nodes = [(0.0, 0.0)] + list(zip(args.R * np.cos(ang), args.R * np.sin(ang)))
        E = chargemap.hexagonal_rotation_map(args.R, math.radians(args.alpha), args.q, nodes)
        comments.append(f"R {args.R} alpha_deg {args.alpha} q {args.q}")
    _emit(args, format_exponent_text(E, comments))
    return EXIT_OK


def cmd_energy(args) -> int:
    text = _read(args.input)
    head = _header_ints(text)
    max_units = _guard(args.max_units, boltzmann.MAX_UNITS, "max-units")
    out = []
    if head is not None and len(head) == 2:
        H = _load_matrix(text, kind="alist")[0]
        n = H.shape[1]
        out.append("config,energy")
        if args.config:
            x = _bits(args.config, "config")
            if x.shape[0] != n:
                raise InputError(f"--config has {x.shape[0]} bits, code length is {n}")
            out.append(f"{''.join(map(str, x))},{boltzmann.syndrome_energy(H, x)}")
        else:
            w = args.max_weight
            count = sum(math.comb(n, i) for i in range(w + 1))
            budget = _guard(args.budget, _default_budget(), "enumeration budget")
            if count > budget:
                raise ResourceError(f"{count} configurations of weight <= {w} exceed budget {budget}", guard="budget")
            for weight in range(w + 1):
                for support in itertools.combinations(range(n), weight):
                    x = np.zeros(n, dtype=np.uint8)
                    x[list(support)] = 1
                    out.append(f"{''.join(map(str, x))},{boltzmann.syndrome_energy(H, x)}")
        _emit(args, "\n".join(out) + "\n")
        return EXIT_OK
    try:
        theta = boltzmann.load_theta(text)
    except DomainError as exc:
        raise InputError(str(exc)) from None
    logZ = boltzmann.bm_log_partition(theta, max_units)
    out += [f"# Z = {_fmt(math.exp(logZ))}", f"# logZ = {_fmt(logZ)}", "config,energy,probability"]
    if args.config:
        X = _bits(args.config, "config")[None, :]
        if X.shape[1] != theta.N:
            raise InputError(f"--config has {X.shape[1]} bits, N is {theta.N}")
    else:
        X = boltzmann.all_configurations(theta.N)
    E = np.atleast_1d(boltzmann.bm_energy(theta, X))
    for x, e in zip(X, E):
        out.append(f"{''.join(map(str, x))},{float(e) + 0.0!r},{math.exp(-e - logZ)!r}")
    _emit(args, "\n".join(out) + "\n")
    return EXIT_OK


def cmd_partition(args) -> int:
    try:
        A = partition.read_matrix_csv(_read(args.input))
    except FormatError as exc:
        raise InputError(str(exc)) from None
    if A.shape[0] != A.shape[1]:
        raise InputError(f"matrix must be square, got {A.shape}")
    report = None
    if args.method == "det":
        value = partition.det_normalization(A)
    else:
        if np.any(A < 0):
            raise InputError("permanent methods need non-negative entries")
        if args.method == "brute":
            value = partition.permanent_bruteforce(A, _guard(args.max_n, partition.BRUTE_MAX_N, "max-n"))
        elif args.method == "ryser":
            value = partition.permanent_ryser(A, _guard(args.max_n, partition.RYSER_MAX_N, "max-n"))
        else:
            if not 0 < args.damping <= 1:
                raise InputError("--damping must lie in (0, 1]")
            value, report = partition.bethe_permanent(A, args.damping, args.tol, args.max_iter)
    _emit(args, _fmt(value) + "\n")
    if report is not None:
        print(f"converged={str(report.converged).lower()} iterations={report.iterations} residual={report.residual:.3e}",
              file=sys.stderr)
        if args.report:
            Path(args.report).write_text(report.to_csv())
    return EXIT_OK


def _rows_arg(text: str, name: str) -> list[list[int]]:
    rows = [_int_list(r, name) for r in text.split(";") if r.strip()]
    if not rows:
        raise InputError(f"--{name} is empty")
    return rows


def cmd_sc_construct(args) -> int:
    B = _rows_arg(args.B, "B")
    D = _int_list(args.D, "D") if args.D else None
    try:
        p = codes.ScParams(args.W, args.C, args.N, args.L, tuple(map(tuple, B)), D)
    except DomainError as exc:
        raise InputError(str(exc)) from None
    ME = codes.sc_construct(p)
    _emit(args, format_exponent_text(ME, [f"tail-biting W {p.W} C {p.C} N {p.N} L {p.L_mult} D {' '.join(map(str, p.D))}"]))
    return EXIT_OK


def cmd_ra_encode(args) -> int:
    _, E = _load_matrix(_read(args.input), kind="exponent", met=False)
    code = codes.RaCode(E)
    k = code.message_length
    if args.message:
        msgs = [_bits(args.message, "message")]
        if msgs[0].shape[0] != k:
            raise InputError(f"--message has {msgs[0].shape[0]} bits, expected {k}")
    else:
        rng = np.random.default_rng(args.seed)
        msgs = list(rng.integers(0, 2, size=(args.count, k), dtype=np.uint8))
    H = codes.ra_build(code)
    out = []
    for u in msgs:
        x = codes.ra_encode(code, u)
        if gf2.syndrome(H, x).any():
            raise DomainError("encoder produced a non-zero syndrome")
        out.append("".join(map(str, x)))
    _emit(args, "\n".join(out) + "\n")
    return EXIT_OK


def cmd_gauge(args) -> int:
    text = _read(args.input)
    try:
        if text.lstrip().startswith("# spherical"):
            sm = gauge.parse_spherical(text)
            E = sm.to_exponent()
        else:
            sm = None
            E = parse_exponent_text(text, met=False)
    except DomainError as exc:
        raise InputError(str(exc)) from None
    out = ["axis,index,sum,passes"]
    A = E.to_array()
    for axis in ("rows", "columns") if args.axis == "both" else (args.axis,):
        lines = A if axis == "rows" else A.T
        for i, (ok, line) in enumerate(zip(gauge.shbf_gauge_check(E, axis), lines)):
            out.append(f"{axis[:-1]},{i},{int(line[line >= 0].sum())},{str(ok).lower()}")
    if args.shift is not None:
        row, m = args.shift
        if not 0 <= row < E.shape[0]:
            raise InputError(f"row {row} out of range")
        shifted = gauge.shift_row(E, row, m)
        out.append(f"shifted_row,{row},{m},{str(gauge.row_shift_invariance(E, row, m)).lower()}")
        out.append("# " + " ".join(map(str, shifted.to_array()[row])))
    if args.collapse:
        if sm is None:
            if E.shape[0] != 3:
                raise InputError("--collapse needs a three-row spherical matrix")
            sm = gauge.build_spherical(*A.tolist(), E.circulant_size)
        c = gauge.collapse_radial(sm)
        out.append(f"# collapsed S {c.S} radius {' '.join(map(str, c.radius))}")
        out.append(f"# collapsed phi weight-{c.N} size {c.k}: {','.join(map(str, c.phi))}")
        out.append(f"# collapsed theta weight-{c.N} size {c.k}: {','.join(map(str, c.theta))}")
    _emit(args, "\n".join(out) + "\n")
    return EXIT_OK


def cmd_relax(args) -> int:
    rng = np.random.default_rng(args.seed)
    if args.torus:
        nx, ny = args.torus
        if nx < 3 or ny < 3:
            raise InputError("--torus needs at least 3x3")
        sys0 = equilibrium.torus_grid(nx, ny, shear=args.shear)
        if args.perturb:
            sys0 = sys0.with_positions(sys0.positions + rng.normal(0, args.perturb, sys0.positions.shape))
    elif args.input:
        try:
            recs = chargemap.read_charges_csv(_read(args.input))
        except FormatError as exc:
            raise InputError(str(exc)) from None
        sys0 = equilibrium.ChargeSystem(
            equilibrium.Circle(args.circumference), [r.q for r in recs], [r.x for r in recs]
        )
    else:
        if args.n is None or args.n < 2:
            raise InputError("give a charges CSV, --n (>= 2) or --torus")
        sys0 = equilibrium.uniform_circle(args.n, args.circumference)
        if args.perturb:
            gap = args.circumference / args.n
            noise = rng.uniform(-args.perturb, args.perturb, args.n) * gap
            sys0 = sys0.with_positions(sys0.positions + noise)
    res = equilibrium.relax(sys0, step=args.step, max_iters=args.max_iters, tol=args.tol)
    _emit(args, equilibrium.trajectory_csv(res) if args.trajectory else equilibrium.force_report_csv(res.forces))
    print(f"converged={str(res.converged).lower()} iterations={res.iterations} max_force={res.forces.max_norm:.3e}",
          file=sys.stderr)
    return EXIT_OK


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for randomized inputs")
    common.add_argument("--threads", type=int, default=1, help="worker threads (output is order-independent)")
    common.add_argument("--output", "-o", default=None, help="output path (default: stdout)")

    p = argparse.ArgumentParser(prog="qcequil", description="QC-LDPC constructions and charge-equilibrium tools.",
                                parents=[common])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("lift", parents=[common], help="lift an exponent matrix to an alist file")
    s.add_argument("input")
    s.add_argument("--met", action="store_true", help="read cells as multi-edge lists")
    s.set_defaults(func=cmd_lift)

    s = sub.add_parser("analyze", parents=[common], help="girth, trapping sets and minimum distance")
    s.add_argument("input")
    s.add_argument("--format", choices=("auto", "alist", "exponent"), default="auto")
    s.add_argument("--girth-cap", type=int, default=tanner.DEFAULT_GIRTH_CAP)
    s.add_argument("--a-max", type=int, default=4)
    s.add_argument("--b-max", type=int, default=2)
    s.add_argument("--budget", type=int, default=None, help=f"trapping-set subset budget (default ${BUDGET_ENV} or {tanner.DEFAULT_TS_BUDGET})")
    s.add_argument("--max-dim", type=int, default=None, help="largest code dimension for the d_min enumeration (24)")
    s.set_defaults(func=cmd_analyze)

    s = sub.add_parser("map", parents=[common], help="map a charge system to an exponent matrix")
    s.add_argument("input", nargs="?", help="charges CSV with columns id,q,x[,y][,cell]")
    s.add_argument("--mode", required=True, choices=("1d3", "1d4", "2dcell", "coupled", "hex"))
    s.add_argument("--e", type=int, help="1d3: circulant size R1 + R3")
    s.add_argument("--R1", type=int)
    s.add_argument("--R3", type=int)
    s.add_argument("--a", type=int, help="1d4: squared distance r12^2")
    s.add_argument("--b", type=int, help="1d4: squared distance r23^2")
    s.add_argument("--origin", type=int, nargs=2, metavar=("X", "Y"), help="cell reference corner")
    s.add_argument("--R", type=float, help="hex: grid step")
    s.add_argument("--q", type=int, help="hex: quantization count (circulant size)")
    s.add_argument("--alpha", type=float, help="hex: rotation angle in degrees")
    s.set_defaults(func=cmd_map)

    s = sub.add_parser("energy", parents=[common], help="Boltzmann energies and Z, or syndrome energies")
    s.add_argument("input", help="theta file or alist file")
    s.add_argument("--config", help="single configuration as a bit string")
    s.add_argument("--enumerate", action="store_true", help="enumerate configurations (the default)")
    s.add_argument("--max-weight", type=int, default=2, help="alist input: largest enumerated weight")
    s.add_argument("--max-units", type=int, default=None)
    s.add_argument("--budget", type=int, default=None)
    s.set_defaults(func=cmd_energy)

    s = sub.add_parser("partition", parents=[common], help="permanent or determinant normalizer of a CSV matrix")
    s.add_argument("input")
    s.add_argument("--method", choices=("brute", "ryser", "bethe", "det"), default="ryser")
    s.add_argument("--max-n", type=int, default=None)
    s.add_argument("--damping", type=float, default=0.5)
    s.add_argument("--tol", type=float, default=1e-8)
    s.add_argument("--max-iter", type=int, default=1000)
    s.add_argument("--report", help="bethe: write the (iter, residual) CSV here")
    s.set_defaults(func=cmd_partition)

    s = sub.add_parser("sc-construct", parents=[common], help="tail-biting spatially-coupled exponent matrix")
    s.add_argument("--W", type=int, required=True)
    s.add_argument("--C", type=int, required=True)
    s.add_argument("--N", type=int, required=True, help="circulant size")
    s.add_argument("--L", type=int, required=True, help="number of coupled copies")
    s.add_argument("--B", required=True, help="shift rows, e.g. '1,2,3;4,5,6'")
    s.add_argument("--D", help="row offsets, e.g. '0,1'")
    s.set_defaults(func=cmd_sc_construct)

    s = sub.add_parser("ra-encode", parents=[common], help="encode messages with a repeat-accumulate code")
    s.add_argument("input", help="exponent file of the information part")
    s.add_argument("--message", help="message bits; random messages when omitted")
    s.add_argument("--count", type=int, default=1)
    s.set_defaults(func=cmd_ra_encode)

    s = sub.add_parser("gauge", parents=[common], help="shift-sum gauge report")
    s.add_argument("input")
    s.add_argument("--axis", choices=("rows", "columns", "both"), default="rows")
    s.add_argument("--shift", type=int, nargs=2, metavar=("ROW", "M"), help="add M*S to ROW and recheck")
    s.add_argument("--collapse", action="store_true", help="print the radial collapse")
    s.set_defaults(func=cmd_gauge)

    s = sub.add_parser("relax", parents=[common], help="relax charges toward equilibrium")
    s.add_argument("input", nargs="?", help="charges CSV (arc coordinate in x)")
    s.add_argument("--n", type=int, help="uniform circle with n charges")
    s.add_argument("--circumference", type=float, default=1.0)
    s.add_argument("--torus", type=int, nargs=2, metavar=("NX", "NY"))
    s.add_argument("--shear", type=float, default=0.0)
    s.add_argument("--perturb", type=float, default=0.0, help="random perturbation (fraction of the gap)")
    s.add_argument("--step", type=float, default=0.1)
    s.add_argument("--max-iters", type=int, default=10_000)
    s.add_argument("--tol", type=float, default=equilibrium.DEFAULT_TOL)
    s.add_argument("--trajectory", action="store_true", help="write the full trajectory instead of final forces")
    s.set_defaults(func=cmd_relax)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.threads < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except (InputError, FormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ResourceError as exc:
        print(f"error: guard '{exc.guard}' exceeded: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
