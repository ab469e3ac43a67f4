"""Command-line interface: benchmark sweeps, calculators, self-verification.

Exit codes: 0 on success, 1 on usage errors, 2 on numerical-contract
violations (including failed self-verification).
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .bench import ALGORITHMS, ExperimentConfig, emit, render_plot, run_experiment
from .exact import best_exponent, exponent_calculator, threshold_calculator
from .groups import ContractError


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="convmm",
                     description="matrix products via abelian-group convolutions")
    sub = parser.add_subparsers(dest="command", required=True)

    bench = sub.add_parser("bench", help="run benchmark experiments")
    bsub = bench.add_subparsers(dest="bench_command", required=True)

    run = bsub.add_parser("run", help="run an experiment from a JSON config")
    run.add_argument("--config", required=True, help="path to JSON config file")
    run.add_argument("--plot", action="store_true",
                     help="also render a mean-error-vs-r figure next to the output")

    sweep = bsub.add_parser("sweep", help="run a sweep from command-line options")
    sweep.add_argument("--alg", required=True, choices=ALGORITHMS)
    sweep.add_argument("--n", required=True, type=int)
    sweep.add_argument("--r", default="auto",
                       help="comma-separated r values, or 'auto' for 10 linear steps")
    sweep.add_argument("--trials", type=int, default=10)
    sweep.add_argument("--dist", default="rademacher")
    sweep.add_argument("--seed", type=int, default=0)
    sweep.add_argument("--out", default=None)
    sweep.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv")
    sweep.add_argument("--a", dest="input_a", default=None, help="CSV file with matrix A")
    sweep.add_argument("--b", dest="input_b", default=None, help="CSV file with matrix B")
    sweep.add_argument("--plot", action="store_true")

    calc = sub.add_parser("calc", help="cost-model calculators")
    csub = calc.add_subparsers(dest="calc_command", required=True)
    ce = csub.add_parser("exponent", help="asymptotic runtime exponent at base m")
    ce.add_argument("--m", type=int, default=None,
                    help="base; omit to minimise over m in [3, 100]")
    ct = csub.add_parser("threshold", help="crossover level N against naive FLOPs")
    ct.add_argument("--m", type=int, required=True)
    ct.add_argument("--c", type=float, required=True, help="FFT constant factor")

    verify = sub.add_parser("verify", help="self-verification")
    vsub = verify.add_subparsers(dest="verify_command", required=True)
    vsub.add_parser("all", help="run the built-in property suite")

    return parser


def _cmd_bench(args) -> int:
    if args.bench_command == "run":
        config = ExperimentConfig.from_json(args.config)
    else:
        r_schedule = None
        if args.r != "auto":
            r_schedule = [int(x) for x in args.r.split(",") if x.strip()]
        config = ExperimentConfig(algorithm=args.alg, n=args.n, r_schedule=r_schedule,
                                  trials=args.trials, distribution=args.dist,
                                  seed=args.seed, out=args.out, fmt=args.fmt,
                                  input_a=args.input_a, input_b=args.input_b)
    records, summary = run_experiment(config)
    text = emit(records, config.fmt, config.out)
    if config.out is None:
        sys.stdout.write(text)
    else:
        print(f"wrote {len(records)} records to {config.out}")
    for row in summary:
        print("r={r:4d} budget={budget:10d} mean={mean:.6e} std={std:.3e} "
              "1/r={reference_1_over_r:.3e}".format(**row))
    if args.plot:
        stem = config.out.rsplit(".", 1)[0] if config.out else config.algorithm
        fig_path = stem + ".png"
        render_plot(summary, config, fig_path)
        print(f"wrote figure to {fig_path}")
    return 0


def _cmd_calc(args) -> int:
    if args.calc_command == "exponent":
        rep = exponent_calculator(args.m) if args.m is not None else best_exponent()
        print(f"m={rep.m} tau={rep.tau:.6f} eta={rep.eta:.6f} exponent={rep.exponent:.6f}")
    else:
        rep = threshold_calculator(args.m, args.c)
        print(f"m={rep.m} C={rep.C} minimal N={rep.N} total matrix side "
              f"(2(m-1))^N = {rep.n:.6e}")
    return 0


def _cmd_verify() -> int:
    checks = _verification_suite()
    failed = 0
    for name, fn in checks:
        try:
            fn()
            print(f"PASS  {name}")
        except Exception as exc:  # report and continue
            failed += 1
            print(f"FAIL  {name}: {exc}")
    print(f"{len(checks) - failed}/{len(checks)} properties hold")
    return 0 if failed == 0 else 2


def _verification_suite():
    from . import analysis, approx, constructions, exact, transforms
    from .groups import AbelianGroup, Signal

    rng = np.random.default_rng(12345)

    def check_parseval():
        g = AbelianGroup((4, 5))
        s = Signal(g, rng.standard_normal(20) + 1j * rng.standard_normal(20))
        f = transforms.fft(s)
        assert abs(s.norm() - f.norm()) < 1e-10
        assert np.allclose(transforms.ifft(f).values, s.values)

    def check_convolution_theorem():
        g = AbelianGroup((3, 4))
        a = Signal(g, rng.standard_normal(12))
        b = Signal(g, rng.standard_normal(12))
        direct = np.zeros(12, dtype=np.complex128)
        for i, x in enumerate(g.elements()):
            for j, y in enumerate(g.elements()):
                direct[g.index(g.add(x, y))] += a.values[i] * b.values[j]
        assert np.abs(transforms.convolve(a, b).values - direct).max() < 1e-10

    def check_tpp():
        assert constructions.verify_tpp(constructions.vanilla_tpp(2, 3, 4))
        assert constructions.verify_tpp(constructions.ap_triplet(4, 4))
        assert not constructions.verify_tpp(constructions.ap_triplet(4, 2))

    def check_stpp():
        assert constructions.verify_stpp(constructions.cksu_stpp(3, 1))
        assert constructions.verify_stpp(constructions.cksu_stpp(4, 1))

    def check_exact_multiply():
        for m, N in [(3, 1), (4, 1), (3, 2)]:
            n0 = (m - 1) ** N * 2**N
            A = rng.standard_normal((n0, n0))
            B = rng.standard_normal((n0, n0))
            C = exact.blocked_multiply(A, B, m, N)
            assert np.abs(C - A @ B).max() < 1e-8

    def check_polyform_exact():
        A = rng.standard_normal((8, 8))
        B = rng.standard_normal((8, 8))
        assert np.abs(approx.polyform(A, B, 8, seed=1) - A @ B).max() < 1e-8

    def check_truncation_exact():
        A = rng.standard_normal((12, 12))
        B = rng.standard_normal((12, 12))
        assert np.abs(approx.stpp_truncated_square(A, B, 7) - A @ B).max() < 1e-8
        assert np.abs(approx.tpp_truncated(A, B, 12) - A @ B).max() < 1e-8

    def check_slab_oracle():
        m, r = 5, 2
        q = m - 1
        blocks = [rng.standard_normal((q, q)) for _ in range(4)]
        a, b = approx.embed_stpp_pair(*blocks)
        plan = approx.TruncationPlan(m, r)
        sa = approx.slab_partial_fft(a, plan, side="a")
        ref = transforms.fft(a).values.copy()
        ref[~plan.K.mask()] = 0
        assert np.abs(sa.dense().values - ref).max() < 1e-10

    def check_atpq():
        rep = analysis.atpq_count(constructions.ap_triplet(4, 2))
        assert rep.rho == 128 and rep.buckets.sum() == 128
        assert analysis.atpq_count(constructions.vanilla_tpp(3, 3, 3)).rho == 27
        assert analysis.lower_bound_check(constructions.ap_triplet(4, 2)) == 0

    def check_spectral_forms():
        m = 5
        for i in (1, 2, 3):
            for xi in [(0, 0, 0), (1, 0, 2), (3, 4, 1)]:
                val = analysis.indicator_spectrum(m, i, xi)
                assert abs(val) <= (m - 1) ** 2 / m**1.5 + 1e-12
        assert abs(analysis.t_delta(5, (0, 0, 0)) - 32) < 1e-12
        assert analysis.s_delta(6, 2, (0, 0, 0)) == 64

    def check_sketch():
        A = rng.standard_normal((16, 16))
        B = rng.standard_normal((16, 16))
        S = approx.SketchSpec(16, 4, 7).matrix()
        C1 = approx.jl_sketch_mm(A, B, 4, sketch=S)
        C2 = approx.sketch_and_solve(A, B, 4, m=3, N=1, sketch=S)
        assert np.abs(C1 - C2).max() < 1e-8

    return [
        ("fft Parseval / inversion", check_parseval),
        ("convolution theorem", check_convolution_theorem),
        ("triple product property checks", check_tpp),
        ("simultaneous TPP checks", check_stpp),
        ("blocked exact multiply", check_exact_multiply),
        ("polyform exact at full budget", check_polyform_exact),
        ("truncations exact at full budget", check_truncation_exact),
        ("slab transform vs dense oracle", check_slab_oracle),
        ("ATPQ identities", check_atpq),
        ("spectral closed forms", check_spectral_forms),
        ("sketch composition equivalence", check_sketch),
    ]


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "bench":
            return _cmd_bench(args)
        if args.command == "calc":
            return _cmd_calc(args)
        if args.command == "verify":
            return _cmd_verify()
        raise _UsageError(f"unknown command {args.command!r}")
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except ContractError as exc:
        print(f"numerical contract violation: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
