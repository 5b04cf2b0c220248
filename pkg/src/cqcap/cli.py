"""Command-line front end: capacity solving, the binary-channel closed-form
approximation, the approximation-error sweep, and the random-channel
benchmark.

Exit codes are stable for scripting: 0 success, 1 usage or input error,
2 non-convergence (or failed benchmark trials).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from .bench import (BenchSpec, check_iteration_budget, format_bench_table,
                    run_bench, write_bench_csv)
from .bloch import (BinaryBlochChannel, SweepGrid, approx_p1, error_sweep,
                    exact_p1, holevo_bloch, max_error_by_range,
                    write_range_csv, write_sweep_csv)
from .qinfo import CqChannel
from .solver import SolverConfig, solve

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NOT_CONVERGED = 2


class CliInputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on usage errors; this tool reserves 2
    # for non-convergence, so remap usage errors to 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def load_channel_file(path) -> CqChannel:
    """Parse a channel JSON document {"dim": m, "states": [...]}.

    Each state is an m x m array of [re, im] pairs. Violations of the
    density-matrix invariants are rejected with the offending state index
    and the measured defect.
    """
    try:
        with open(path) as f:
            doc = json.load(f)
    except OSError as err:
        raise CliInputError(f"cannot read channel file: {err}") from err
    except json.JSONDecodeError as err:
        raise CliInputError(f"malformed JSON in {path}: {err}") from err
    if not isinstance(doc, dict) or "dim" not in doc or "states" not in doc:
        raise CliInputError('channel file must be {"dim": m, "states": [...]}')
    dim = doc["dim"]
    raw_states = doc["states"]
    if not isinstance(dim, int) or dim < 2:
        raise CliInputError(f'"dim" must be an integer >= 2, got {dim!r}')
    if not isinstance(raw_states, list) or len(raw_states) < 2:
        raise CliInputError('"states" must list at least 2 states')
    states = []
    for idx, entry in enumerate(raw_states):
        arr = np.asarray(entry, dtype=np.float64)
        if arr.shape != (dim, dim, 2):
            raise CliInputError(
                f"states[{idx}] must be a {dim}x{dim} array of [re, im] pairs, "
                f"got shape {arr.shape}")
        states.append(arr[..., 0] + 1j * arr[..., 1])
    try:
        return CqChannel(np.stack(states))
    except ValueError as err:
        raise CliInputError(f"invalid channel: {err}") from err


def _fmt_vec(values) -> str:
    return " ".join(f"{v:.6f}" for v in values)


def _json_float(x: float):
    return x if math.isfinite(x) else None


def _cmd_capacity(args) -> int:
    ch = load_channel_file(args.channel_file)
    cfg = SolverConfig(gap_tol=args.eps, max_iters=args.max_iter,
                       record_history=args.history)
    report = solve(ch, cfg)
    if args.format == "json":
        payload = {
            "capacity_bits": _json_float(report.capacity_bits),
            "capacity_nats": _json_float(report.capacity_nats),
            "lower_nats": _json_float(report.lower),
            "upper_nats": _json_float(report.upper),
            "gap_nats": _json_float(report.upper - report.lower),
            "iterations": report.iterations,
            "converged": report.converged,
            "p_star": list(report.p_star),
        }
        if report.history is not None:
            payload["history"] = [
                {"t": rec.t, "lower_nats": _json_float(rec.lower),
                 "upper_nats": _json_float(rec.upper), "p": list(rec.p)}
                for rec in report.history]
        print(json.dumps(payload, indent=2))
    else:
        print(f"capacity    : {report.capacity_bits:.6f} bits = "
              f"{report.capacity_nats:.6f} nats")
        print(f"lower bound : {report.lower:.6f} nats")
        print(f"upper bound : {report.upper:.6f} nats")
        print(f"gap         : {report.upper - report.lower:.6f} nats")
        print(f"iterations  : {report.iterations}")
        print(f"converged   : {'yes' if report.converged else 'no'}")
        print(f"p_star      : {_fmt_vec(report.p_star)}")
        if report.history is not None:
            print("history (t, lower nats, upper nats):")
            for rec in report.history:
                print(f"  {rec.t:6d}  {rec.lower:.6f}  {rec.upper:.6f}")
    return EXIT_OK if report.converged else EXIT_NOT_CONVERGED


def _cmd_approx(args) -> int:
    try:
        ch = BinaryBlochChannel(args.lambda1, args.lambda2, args.theta)
    except ValueError as err:
        raise CliInputError(str(err)) from err
    p_hat = approx_p1(args.lambda1, args.lambda2)
    chi_hat = holevo_bloch(ch, p_hat)
    p_best = exact_p1(ch)
    chi_best = holevo_bloch(ch, p_best)
    print(f"p_hat       : {_fmt_vec([p_hat, 1.0 - p_hat])}")
    print(f"chi_hat     : {chi_hat:.6f} bits")
    print(f"chi_exact   : {chi_best:.6f} bits")
    print(f"gap         : {chi_best - chi_hat:.6f} bits")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    try:
        grid = SweepGrid(lambda_step=args.lambda_step, theta_step=args.theta_step,
                         lambda_max=args.lambda_max,
                         reference_gap_tol=args.ref_eps)
    except ValueError as err:
        raise CliInputError(str(err)) from err
    cells = error_sweep(grid, jobs=args.jobs)
    out = Path(args.out)
    range_out = Path(args.range_out) if args.range_out else \
        out.with_name(out.stem + "_ranges" + (out.suffix or ".csv"))
    r_values = [lam for lam in grid.lambda_values() if lam > 0.5]
    ranges = max_error_by_range(cells, r_values)
    try:
        write_sweep_csv(cells, out)
        write_range_csv(ranges, range_out)
    except OSError as err:
        raise CliInputError(f"cannot write output: {err}") from err
    flagged = sum(1 for c in cells if not c.ba_converged)
    capped = [c.error_bits for c in cells
              if c.lambda1 <= 0.95 + 1e-9 and c.lambda2 <= 0.95 + 1e-9]
    print(f"cells       : {len(cells)} "
          f"({len(grid.lambda_values())}^2 lambda grid, "
          f"{len(grid.theta_values())} theta values)")
    print(f"flagged     : {flagged}")
    if capped:
        print(f"max error (lambda <= 0.95): {max(capped):.6f} bits")
    print(f"max error (full grid)     : {max(c.error_bits for c in cells):.6f} bits")
    print(f"wrote {out}")
    print(f"wrote {range_out}")
    return EXIT_OK


def _parse_int_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok]
    except ValueError as err:
        raise CliInputError(f"expected a comma-separated integer list, got {text!r}") \
            from err


def _parse_float_list(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok]
    except ValueError as err:
        raise CliInputError(f"expected a comma-separated number list, got {text!r}") \
            from err


def _cmd_bench(args) -> int:
    try:
        spec = BenchSpec(input_sizes=tuple(_parse_int_list(args.n)),
                         output_dims=tuple(_parse_int_list(args.m)),
                         accuracies=tuple(_parse_float_list(args.acc)),
                         trials=args.trials, seed=args.seed)
    except ValueError as err:
        raise CliInputError(str(err)) from err
    results, logs = run_bench(spec, jobs=args.jobs, return_logs=True)
    print(format_bench_table(results))
    budget_ok = check_iteration_budget(results, logs)
    print(f"iteration budget ln(n)/accuracy respected: {'yes' if budget_ok else 'NO'}")
    if args.out:
        try:
            write_bench_csv(results, args.out)
        except OSError as err:
            raise CliInputError(f"cannot write output: {err}") from err
        print(f"wrote {args.out}")
    failed = sum(r.trials_failed for r in results)
    if failed:
        print(f"{failed} trial(s) did not converge", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    default_jobs = int(os.environ.get("CQCAP_JOBS", "1"))
    parser = _Parser(prog="cqcap",
                     description="Classical-quantum channel capacity toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    cap = sub.add_parser("capacity", help="solve a channel given as a JSON file")
    cap.add_argument("channel_file")
    cap.add_argument("--eps", type=float, default=1e-6,
                     help="certificate gap threshold in nats (default 1e-6)")
    cap.add_argument("--max-iter", type=int, default=100_000)
    cap.add_argument("--history", action="store_true",
                     help="record per-iterate certificates")
    cap.add_argument("--format", choices=("json", "text"), default="text")
    cap.set_defaults(func=_cmd_capacity)

    app = sub.add_parser("approx",
                         help="closed-form approximate input for a binary "
                              "qubit channel")
    app.add_argument("--lambda1", type=float, required=True)
    app.add_argument("--lambda2", type=float, required=True)
    app.add_argument("--theta", type=float, required=True)
    app.set_defaults(func=_cmd_approx)

    sw = sub.add_parser("sweep", help="approximation-error sweep over the "
                                      "(lambda1, lambda2) grid")
    sw.add_argument("--lambda-step", type=float, default=0.01)
    sw.add_argument("--theta-step", type=float, default=math.pi / 50)
    sw.add_argument("--lambda-max", type=float, default=1.0)
    sw.add_argument("--ref-eps", type=float, default=1e-6)
    sw.add_argument("--out", default="sweep.csv")
    sw.add_argument("--range-out", default=None,
                    help="range-maxima CSV (default: derived from --out)")
    sw.add_argument("--jobs", type=int, default=default_jobs)
    sw.set_defaults(func=_cmd_sweep)

    be = sub.add_parser("bench", help="random-channel iteration benchmark")
    be.add_argument("--n", required=True, help="comma list of input sizes")
    be.add_argument("--m", required=True, help="comma list of output dimensions")
    be.add_argument("--acc", required=True, help="comma list of gap thresholds")
    be.add_argument("--trials", type=int, default=200)
    be.add_argument("--seed", type=int, default=0)
    be.add_argument("--out", default=None)
    be.add_argument("--jobs", type=int, default=default_jobs)
    be.set_defaults(func=_cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliInputError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
