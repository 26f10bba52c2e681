"""Command-line surface: measure, pump, plan, sweep, verify.

Exit codes: 0 ok, 1 verification failure, 2 flag error, 3 domain error,
4 I/O error.  All numeric output uses repr floats (shortest round-trip,
no locale), so identical flags give byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .markov import build_chain, expected_pairs, failure_probability, plan
from .measurement import optimal_m
from .model import (
    BudgetCapError,
    ErrorParams,
    NoiseKind,
    PumpSchedule,
    RestartMode,
    UnpurifiableError,
    ValidationError,
)
from .oracle import monte_carlo_pumping, simulate_pump_step
from .pumping import StepKind, pump_step, raw_pair, run_standard, run_two_level
from .timing import build_timings, memory_check

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_FLAGS = 2
EXIT_DOMAIN = 3
EXIT_IO = 4

#: Headline hardware scenario: (t_local, tau, eta, purcell_c) and the
#: imperfection tuple (1-F, p_init, p_meas, p_local) = (5%, 5%, 5%, 1e-6).
PRESETS = {
    "ion-depolarizing": {"noise": NoiseKind.DEPOLARIZING, "t_mem": 10.0},
    "nv-dephasing": {"noise": NoiseKind.DEPHASING, "t_mem": 1.0},
}
_PRESET_COMMON = {
    "f": 0.95,
    "p_i": 0.05,
    "p_m": 0.05,
    "p_l": 1e-6,
    "tau": 10e-9,
    "eta": 0.2,
    "cavity_c": 10.0,
    "t_local": 0.1e-6,
}


def _prob(flag: str):
    def parse(text: str) -> float:
        try:
            v = float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{flag} expects a number, got {text!r}")
        if not (0.0 <= v <= 1.0) or v != v:
            raise argparse.ArgumentTypeError(f"{flag} must lie in [0, 1], got {text}")
        return v

    return parse


def _positive(flag: str):
    def parse(text: str) -> float:
        try:
            v = float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{flag} expects a number, got {text!r}")
        if not (v > 0.0) or v != v or v == float("inf"):
            raise argparse.ArgumentTypeError(f"{flag} must be positive and finite, got {text}")
        return v

    return parse


def _nonneg_int(flag: str):
    def parse(text: str) -> int:
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{flag} expects an integer, got {text!r}")
        if v < 0:
            raise argparse.ArgumentTypeError(f"{flag} must be >= 0, got {text}")
        return v

    return parse


def _add_error_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--p-i", type=_prob("--p-i"), default=0.05, help="initialization error")
    p.add_argument("--p-m", type=_prob("--p-m"), default=0.05, help="raw readout error")
    p.add_argument("--p-l", type=_prob("--p-l"), default=1e-6, help="local gate error")


def _add_timing_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tau", type=_positive("--tau"), default=10e-9, help="radiative lifetime [s]")
    p.add_argument("--eta", type=_prob("--eta"), default=0.2, help="collection/detection efficiency")
    p.add_argument("--cavity-c", type=_positive("--cavity-c"), default=10.0, help="Purcell factor")
    p.add_argument("--t-local", type=_positive("--t-local"), default=0.1e-6, help="local gate time [s]")
    p.add_argument("--t-mem", type=_positive("--t-mem"), default=None, help="storage memory time [s]")


def _noise_kind(text: str) -> NoiseKind:
    try:
        return NoiseKind(text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"--noise must be 'depolarizing' or 'dephasing', got {text!r}"
        )


def _restart_mode(text: str) -> RestartMode:
    aliases = {"full": RestartMode.FULL, "level": RestartMode.LEVEL}
    try:
        return aliases.get(text) or RestartMode(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--restart-mode must be 'full' or 'level', got {text!r}")


def _threads() -> int:
    env = os.environ.get("RNP_THREADS", "").strip()
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return min(4, os.cpu_count() or 1)


def _cmd_measure(args) -> int:
    params = ErrorParams(p_local=args.p_l, p_init=args.p_i, p_meas=args.p_m, fidelity=0.95)
    timings = build_timings(args.p_m, args.eta, args.tau, args.cavity_c, args.t_local) if args.p_m > 0 and args.p_m < 1 else None
    meas = optimal_m(params, m_max=args.m_max, timings=timings)
    payload = {
        "m": meas.m,
        "eps_m": meas.error_prob,
        "t_robust_meas_s": meas.duration_s,
    }
    if args.json:
        print(json.dumps(payload))
    else:
        print(f"m* = {meas.m}")
        print(f"eps_M = {meas.error_prob!r}")
        print(f"t_robust_meas = {meas.duration_s!r} s")
    return EXIT_OK


def _cmd_pump(args) -> int:
    params = ErrorParams(
        p_local=args.p_l, p_init=args.p_i, p_meas=args.p_m, fidelity=args.f, noise=args.noise
    )
    if args.standard_steps is not None:
        trace = run_standard(args.standard_steps, params, args.eps_m)
    else:
        trace = run_two_level(PumpSchedule(n_b=args.n_b, n_p=args.n_p), params, args.eps_m)
    if args.json:
        for i, step in enumerate(trace.steps):
            print(
                json.dumps(
                    {
                        "step": i + 1,
                        "kind": step.kind.value,
                        "success_prob": step.success_prob,
                        "state_after": list(step.state_after_success.as_tuple()),
                    }
                )
            )
        print(
            json.dumps(
                {
                    "final_state": list(trace.final_state.as_tuple()),
                    "infidelity": trace.infidelity,
                }
            )
        )
    else:
        print(f"{'step':>4}  {'kind':<5}  {'success':>10}  {'fidelity':>10}")
        for i, step in enumerate(trace.steps):
            print(
                f"{i + 1:>4}  {step.kind.value:<5}  {step.success_prob:>10.6f}"
                f"  {step.state_after_success.fidelity:>10.8f}"
            )
        print(f"final infidelity = {trace.infidelity!r}")
    return EXIT_OK


def _plan_for(args) -> tuple:
    params = ErrorParams(
        p_local=args.p_l, p_init=args.p_i, p_meas=args.p_m, fidelity=args.f, noise=args.noise
    )
    timings = build_timings(args.p_m, args.eta, args.tau, args.cavity_c, args.t_local, args.t_mem)
    meas = optimal_m(params, timings=timings)
    result = plan(
        params, timings, meas, bound=args.bound, restart_mode=args.restart_mode
    )
    return result, timings


def _cmd_plan(args) -> int:
    if args.preset:
        preset = PRESETS[args.preset]
        for key, value in _PRESET_COMMON.items():
            setattr(args, key, value)
        args.noise = preset["noise"]
        if args.t_mem is None:
            args.t_mem = preset["t_mem"]
    result, timings = _plan_for(args)
    # stdout carries exactly the PlanResult JSON; advisory output goes to stderr
    if timings.t_mem is not None:
        check = memory_check(result.t_C, timings.t_mem)
        if check.warning:
            print(
                f"warning: t_C/t_mem = {check.ratio:.3g} exceeds 0.01; "
                "the clock cycle is not far below the storage memory time",
                file=sys.stderr,
            )
    print(json.dumps(result.to_dict()))
    return EXIT_OK


def _cmd_sweep(args) -> int:
    p_l_grid = np.geomspace(args.p_l_min, args.p_l_max, args.p_l_points)
    f_grid = np.linspace(args.f_min, args.f_max, args.f_points)
    timings = build_timings(args.p_m, args.eta, args.tau, args.cavity_c, args.t_local, args.t_mem)

    def row(point):
        p_l, f = point
        params = ErrorParams(
            p_local=float(p_l), p_init=args.p_i, p_meas=args.p_m, fidelity=float(f), noise=args.noise
        )
        meas = optimal_m(params, timings=timings)
        r = plan(params, timings, meas, bound=args.bound, restart_mode=args.restart_mode)
        return (
            f"{float(p_l)!r},{float(f)!r},{args.noise.value},{r.schedule.n_b},{r.schedule.n_p},"
            f"{r.delta_min!r},{r.eps_fail!r},{r.eps_E!r},{r.n_tot_budget},"
            f"{r.expected_pairs!r},{r.t_C!r},{r.gamma!r}"
        )

    points = [(p_l, f) for p_l in p_l_grid for f in f_grid]
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        rows = list(pool.map(row, points))

    header = "p_L,F,noise,n_b,n_p,delta_min,eps_fail,eps_E,n_tot_budget,expected_pairs,t_C_s,gamma"
    text = "\n".join([header, *rows]) + "\n"
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        try:
            with open(args.out, "w") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"cannot write {args.out}: {exc}", file=sys.stderr)
            return EXIT_IO
    return EXIT_OK


def _verify_oracle_grid(report, gate_noise=None) -> bool:
    from .noise import GATE_NOISE

    gate_noise = gate_noise or GATE_NOISE
    ok = True
    for f in (0.8, 0.9, 0.95):
        for p_l in (0.0, 1e-3):
            for eps_m in (0.0, 1e-2):
                for kind in (StepKind.BIT, StepKind.PHASE):
                    params = ErrorParams(p_local=p_l, p_init=0.05, p_meas=0.05, fidelity=f)
                    state = raw_pair(params)
                    rec = pump_step(state, state, kind, p_l, eps_m, gate_noise)
                    succ, out = simulate_pump_step(state, state, kind, p_l, eps_m, gate_noise)
                    dev = abs(succ - rec.success_prob)
                    dev = max(
                        dev,
                        max(
                            abs(a - b)
                            for a, b in zip(out.as_tuple(), rec.state_after_success.as_tuple())
                        ),
                    )
                    passed = dev <= 1e-10
                    ok &= passed
                    report(
                        f"oracle-equivalence F={f} p_L={p_l} eps_M={eps_m} kind={kind.value}",
                        passed,
                        f"max deviation {dev:.3e}",
                    )
    return ok


def _verify_markov_grid(report, trials: int, seed: int) -> bool:
    ok = True
    params = ErrorParams(p_local=1e-6, p_init=0.05, p_meas=0.05, fidelity=0.95)
    for n_b, n_p in ((2, 2), (4, 5), (0, 4)):
        trace = run_two_level(PumpSchedule(n_b=n_b, n_p=n_p), params, 1.2e-5)
        for mode in (RestartMode.FULL, RestartMode.LEVEL):
            chain = build_chain(trace, mode)
            expect = expected_pairs(chain)
            budget = max(chain.min_pairs, int(round(expect)))
            predicted = failure_probability(chain, budget)
            mc = monte_carlo_pumping(trace, mode, budget, trials, seed)
            tol_fail = 3.0 * max(mc.fail_std_err, 1e-12)
            tol_pairs = 3.0 * max(mc.pairs_std_err, 1e-12)
            ok_fail = abs(predicted - mc.fail_fraction) <= tol_fail
            ok_pairs = abs(expect - mc.mean_pairs) <= tol_pairs
            ok &= ok_fail and ok_pairs
            report(
                f"markov-vs-mc ({n_b},{n_p}) {mode.value} budget={budget}",
                ok_fail and ok_pairs,
                f"eps_fail {predicted:.5f} vs {mc.fail_fraction:.5f} (3se {tol_fail:.5f}); "
                f"pairs {expect:.2f} vs {mc.mean_pairs:.2f} (3se {tol_pairs:.2f})",
            )
    return ok


def _cmd_verify(args) -> int:
    lines = []

    def report(name: str, passed: bool, detail: str) -> None:
        lines.append((name, passed, detail))
        print(f"[{'pass' if passed else 'FAIL'}] {name}: {detail}")

    ok = _verify_oracle_grid(report)
    ok &= _verify_markov_grid(report, args.trials, args.seed)
    n_fail = sum(1 for _, passed, _ in lines if not passed)
    print(f"{len(lines) - n_fail}/{len(lines)} checks passed (seed={args.seed}, trials={args.trials})")
    if n_fail:
        first = next(name for name, passed, _ in lines if not passed)
        print(f"verification failed: {first}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rnp",
        description="Planner for robust entanglement generation between few-qubit registers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_measure = sub.add_parser("measure", help="optimal majority-vote readout")
    _add_error_flags(p_measure)
    p_measure.add_argument("--m-max", type=_nonneg_int("--m-max"), default=25)
    _add_timing_flags(p_measure)
    p_measure.add_argument("--json", action="store_true")
    p_measure.set_defaults(func=_cmd_measure)

    p_pump = sub.add_parser("pump", help="deterministic pumping trace")
    _add_error_flags(p_pump)
    p_pump.add_argument("--f", type=_prob("--f"), default=0.95, help="raw pair fidelity")
    p_pump.add_argument("--noise", type=_noise_kind, default=NoiseKind.DEPOLARIZING)
    p_pump.add_argument("--n-b", type=_nonneg_int("--n-b"), default=2)
    p_pump.add_argument("--n-p", type=_nonneg_int("--n-p"), default=2)
    p_pump.add_argument("--eps-m", type=_prob("--eps-m"), default=0.0, help="voted readout error")
    p_pump.add_argument(
        "--standard-steps",
        type=_nonneg_int("--standard-steps"),
        default=None,
        help="run the alternating raw-fed scheme for this many steps instead",
    )
    p_pump.add_argument("--json", action="store_true", help="emit JSON lines")
    p_pump.set_defaults(func=_cmd_pump)

    p_plan = sub.add_parser("plan", help="full plan for one parameter point (JSON)")
    p_plan.add_argument("--preset", choices=sorted(PRESETS), default=None)
    _add_error_flags(p_plan)
    p_plan.add_argument("--f", type=_prob("--f"), default=0.95)
    p_plan.add_argument("--noise", type=_noise_kind, default=NoiseKind.DEPOLARIZING)
    _add_timing_flags(p_plan)
    p_plan.add_argument("--bound", type=_nonneg_int("--bound"), default=15)
    p_plan.add_argument("--restart-mode", type=_restart_mode, default=RestartMode.FULL)
    p_plan.set_defaults(func=_cmd_plan)

    p_sweep = sub.add_parser("sweep", help="parameter sweep to CSV")
    _add_error_flags(p_sweep)
    p_sweep.add_argument("--noise", type=_noise_kind, default=NoiseKind.DEPOLARIZING)
    _add_timing_flags(p_sweep)
    p_sweep.add_argument("--p-l-min", type=_positive("--p-l-min"), default=1e-6)
    p_sweep.add_argument("--p-l-max", type=_positive("--p-l-max"), default=1e-3)
    p_sweep.add_argument("--p-l-points", type=_nonneg_int("--p-l-points"), default=13)
    p_sweep.add_argument("--f-min", type=_prob("--f-min"), default=0.90)
    p_sweep.add_argument("--f-max", type=_prob("--f-max"), default=0.99)
    p_sweep.add_argument("--f-points", type=_nonneg_int("--f-points"), default=10)
    p_sweep.add_argument("--bound", type=_nonneg_int("--bound"), default=15)
    p_sweep.add_argument("--restart-mode", type=_restart_mode, default=RestartMode.FULL)
    p_sweep.add_argument("--out", default="-", help="output CSV path ('-' for stdout)")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_verify = sub.add_parser("verify", help="run the oracle cross-check grids")
    p_verify.add_argument("--trials", type=_nonneg_int("--trials"), default=100000)
    p_verify.add_argument("--seed", type=_nonneg_int("--seed"), default=7)
    p_verify.set_defaults(func=_cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UnpurifiableError as exc:
        print(f"unpurifiable fidelity: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except BudgetCapError as exc:
        print(f"budget search failed: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ValidationError as exc:
        print(f"invalid parameter: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
