"""Command-line front end.

Subcommands: component (analytic evaluation), validate (Monte-Carlo check),
converge (error-vs-N study), ga (kernel moment table), basis (adapted frame
dump), filter (image filtering).  Single results are JSON, sweeps are CSV
with 17-significant-digit floats; everything is deterministic given the
flags and --seed.

Exit codes: 0 success, 1 usage error, 2 domain error, 3 size cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .errors import SizeCapError
from .frame import build_basis
from .image2d import (
    ImageBuffer,
    Kernel2dSpec,
    filter_image,
    read_pgm,
    write_pgm_with_sidecar,
)
from .montecarlo import SamplerKind, convergence_study, estimate
from .multiplier import (
    KernelSpec,
    check_zero_mean,
    evaluate_component_direct,
    evaluate_component_recursive,
)
from .special_functions import g_a_log, g_a_sgn


class _Parser(argparse.ArgumentParser):
    # usage problems exit 1 (argparse defaults to 2, which we reserve for
    # domain errors)
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _parse_floats(text: str) -> np.ndarray:
    try:
        return np.array([float(v) for v in text.split(",")])
    except ValueError:
        raise ValueError(f"expected a comma-separated list of numbers, got {text!r}")


def _parse_ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in text.split(","))
    except ValueError:
        raise ValueError(f"expected a comma-separated list of integers, got {text!r}")


def _emit(text: str, out_path: str | None):
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _component_spec(args) -> KernelSpec:
    idx = _parse_ints(args.idx)
    if args.t is not None and args.t != len(idx):
        raise ValueError(f"--t {args.t} does not match --idx of length {len(idx)}")
    kernel = args.kernel
    if kernel is None:
        kernel = "sgn" if len(idx) % 2 else "neglog"
    return KernelSpec(n=args.n, component=idx, kernel=kernel)


def _cmd_component(args) -> int:
    spec = _component_spec(args)
    if not check_zero_mean(spec):
        raise ValueError(
            f"component {spec.component} is inadmissible: every coordinate has even "
            "multiplicity, so the kernel has nonzero spherical mean and no multiplier")
    xi = _parse_floats(args.xi)
    evaluate = evaluate_component_recursive if args.method == "recursive" \
        else evaluate_component_direct
    value = evaluate(spec, xi, normalized=not args.raw)
    record = {
        "n": spec.n, "t": spec.t, "component": list(spec.component),
        "kernel": spec.kernel, "xi": [float(v) for v in xi],
        "value": value.value, "normalized": value.normalized, "method": args.method,
    }
    _emit(json.dumps(record, indent=2, sort_keys=True) + "\n", args.out)
    return 0


def _cmd_validate(args) -> int:
    spec = _component_spec(args)
    xi = _parse_floats(args.xi)
    kind = SamplerKind.parse(args.method)
    exact = evaluate_component_direct(spec, xi).value
    est = estimate(spec, xi, kind, args.N, seed=args.seed)
    lines = ["N,kind,mean,std_error,abs_error",
             ",".join([str(est.n_samples), kind.value, _fmt(est.mean),
                       _fmt(est.std_error), _fmt(abs(est.mean - exact))])]
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_converge(args) -> int:
    spec = _component_spec(args)
    xi = _parse_floats(args.xi)
    kind = SamplerKind.parse(args.method)
    n_list = sorted(_parse_ints(args.N_list))
    study = convergence_study(spec, xi, kind, n_list, repeats=args.repeats, seed=args.seed)
    lines = [f"# loglog_slope = {_fmt(study.loglog_slope)}",
             "N,kind,mean_abs_error"]
    lines += [",".join([str(r.n_samples), kind.value, _fmt(r.mean_abs_error)])
              for r in study.rows]
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_ga(args) -> int:
    kernels = ("sgn", "neglog") if args.kernel == "both" else (args.kernel,)
    lines = ["a,t,n,kernel,value"]
    for kernel in kernels:
        fn = g_a_sgn if kernel == "sgn" else g_a_log
        for a in range(args.t + 1):
            lines.append(f"{a},{args.t},{args.n},{kernel},{_fmt(fn(a, args.t, args.n))}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_basis(args) -> int:
    xi = _parse_floats(args.xi)
    norm = float(np.linalg.norm(xi))
    if norm == 0.0:
        raise ValueError("--xi must be nonzero")
    basis = build_basis(xi / norm)
    lines = [",".join(_fmt(v) for v in row) for row in basis.matrix]
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_filter(args) -> int:
    spec = Kernel2dSpec(t1=args.t1, t2=args.t2, theta0=args.theta0)
    image = read_pgm(args.infile)
    filtered = filter_image(image, spec)
    meta = write_pgm_with_sidecar(
        args.out, filtered, bit_depth=args.bit_depth,
        extra={"t1": spec.t1, "t2": spec.t2, "theta0": spec.theta0, "input": args.infile})
    if args.report:
        with open(args.report, "w") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="riesz-mult",
                     description="Analytic Fourier multipliers of monomial singular "
                                 "kernels, Monte-Carlo validation, image filtering.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_component_flags(p, with_kernel=True):
        p.add_argument("--n", type=int, required=True, help="ambient dimension (>= 2)")
        p.add_argument("--t", type=int, default=None,
                       help="tensor order; must match the length of --idx (default: inferred)")
        p.add_argument("--idx", required=True,
                       help="component multi-index, comma separated, 1-based (e.g. 1,3,3,3,3)")
        p.add_argument("--xi", required=True,
                       help="direction, comma separated (any nonzero vector; normalized internally)")
        if with_kernel:
            p.add_argument("--kernel", choices=["sgn", "neglog"], default=None,
                           help="kernel (default: sgn for odd t, neglog for even t)")

    p = sub.add_parser("component", help="evaluate one component analytically")
    add_component_flags(p)
    p.add_argument("--method", choices=["direct", "recursive"], default="direct",
                   help="evaluation strategy (default: direct)")
    p.add_argument("--raw", action="store_true",
                   help="report the unnormalized value (not divided by the sphere surface)")
    p.add_argument("--out", default=None, help="output path (default: stdout)")
    p.set_defaults(func=_cmd_component)

    p = sub.add_parser("validate", help="Monte-Carlo check of one component")
    add_component_flags(p)
    p.add_argument("--method", choices=["mc1", "mc2", "mc3"], required=True,
                   help="sampler: mc1 Muller, mc2 uniform angles, mc3 Halton angles")
    p.add_argument("--N", type=int, required=True, help="number of sample points (>= 100)")
    p.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    p.add_argument("--out", default=None, help="output path (default: stdout)")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("converge", help="error-versus-N convergence study")
    add_component_flags(p)
    p.add_argument("--method", choices=["mc1", "mc2", "mc3"], required=True)
    p.add_argument("--N-list", dest="N_list", required=True,
                   help="comma-separated sample counts, e.g. 1000,10000,100000")
    p.add_argument("--repeats", type=int, default=20,
                   help="independent repeats per N (default 20)")
    p.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    p.add_argument("--out", default=None, help="output path (default: stdout)")
    p.set_defaults(func=_cmd_converge)

    p = sub.add_parser("ga", help="kernel moment table G_a as CSV")
    p.add_argument("--t", type=int, required=True, help="tensor order")
    p.add_argument("--n", type=int, required=True, help="ambient dimension")
    p.add_argument("--kernel", choices=["sgn", "neglog", "both"], default="both")
    p.add_argument("--out", default=None, help="output path (default: stdout)")
    p.set_defaults(func=_cmd_ga)

    p = sub.add_parser("basis", help="direction-adapted orthonormal frame as CSV")
    p.add_argument("--xi", required=True, help="direction, comma separated")
    p.add_argument("--out", default=None, help="output path (default: stdout)")
    p.set_defaults(func=_cmd_basis)

    p = sub.add_parser("filter", help="filter a PGM image with a planar kernel")
    p.add_argument("--t1", type=int, required=True, help="power of the first coordinate")
    p.add_argument("--t2", type=int, required=True, help="power of the second coordinate")
    p.add_argument("--theta0", type=float, default=0.0,
                   help="kernel steering angle in radians (default 0)")
    p.add_argument("--in", dest="infile", required=True, help="input PGM (binary P5)")
    p.add_argument("--out", required=True, help="output PGM path (JSON sidecar written next to it)")
    p.add_argument("--report", default=None, help="optional JSON report path")
    p.add_argument("--bit-depth", type=int, choices=[8, 16], default=16,
                   help="output sample depth (default 16)")
    p.set_defaults(func=_cmd_filter)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SizeCapError as exc:
        print(f"riesz-mult: size cap: {exc}", file=sys.stderr)
        return 3
    except (ValueError, IndexError, OSError) as exc:
        print(f"riesz-mult: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
