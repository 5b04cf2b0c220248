"""Random-channel benchmark: iteration counts of the capacity solver over
seeded ensembles of classical-quantum channels.

States are drawn from the Ginibre construction G G^H / Tr(G G^H), which is
full-rank with probability one. Every trial owns a counter-based RNG
stream derived from (seed, n, m, accuracy index, trial index), so cells
and trials are reproducible individually and independent of the worker
count used to run them.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import product

import numpy as np

from .qinfo import CqChannel
from .solver import SolverConfig, solve


@dataclass(frozen=True)
class BenchSpec:
    input_sizes: tuple[int, ...]
    output_dims: tuple[int, ...]
    accuracies: tuple[float, ...]   # certificate gap thresholds, nats
    trials: int = 200
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "input_sizes", tuple(int(n) for n in self.input_sizes))
        object.__setattr__(self, "output_dims", tuple(int(m) for m in self.output_dims))
        object.__setattr__(self, "accuracies", tuple(float(a) for a in self.accuracies))
        if any(n < 2 for n in self.input_sizes):
            raise ValueError("input sizes must be >= 2")
        if any(m < 2 for m in self.output_dims):
            raise ValueError("output dimensions must be >= 2")
        if any(a <= 0.0 for a in self.accuracies):
            raise ValueError("accuracies must be positive")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")


@dataclass(frozen=True)
class BenchResult:
    n: int
    m: int
    accuracy: float
    avg_iterations: float
    max_iterations: int
    trials_failed: int


def trial_rng(seed: int, n: int, m: int, acc_index: int,
              trial_index: int) -> np.random.Generator:
    """Deterministic per-trial stream (counter-based Philox generator)."""
    ss = np.random.SeedSequence(seed, spawn_key=(n, m, acc_index, trial_index))
    return np.random.Generator(np.random.Philox(ss))


def random_density_matrix(m: int, rng: np.random.Generator) -> np.ndarray:
    """Ginibre density matrix: G G^H normalized to unit trace."""
    if m < 1:
        raise ValueError(f"dimension must be >= 1, got {m}")
    g = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    a = g @ g.conj().T
    return a / a.trace().real


def random_channel(n: int, m: int, rng: np.random.Generator) -> CqChannel:
    """Channel of n independent Ginibre states of dimension m."""
    return CqChannel(np.stack([random_density_matrix(m, rng) for _ in range(n)]))


def iteration_budget(n: int, accuracy: float) -> float:
    """Worst-case iteration count to certify `accuracy`: ln(n) / accuracy."""
    return math.log(n) / accuracy


def _bench_trial(task) -> tuple[int, bool]:
    seed, n, m, acc_index, trial_index, accuracy = task
    rng = trial_rng(seed, n, m, acc_index, trial_index)
    ch = random_channel(n, m, rng)
    cfg = SolverConfig(gap_tol=accuracy,
                       max_iters=int(math.ceil(iteration_budget(n, accuracy))) + 1)
    report = solve(ch, cfg)
    return report.iterations, report.converged


def run_bench(spec: BenchSpec, jobs: int = 1, return_logs: bool = False):
    """Aggregate iteration counts per (n, m, accuracy) cell.

    Returns a list of BenchResult in cell order; with return_logs=True also
    returns {(n, m, accuracy): [per-trial iteration counts]} for budget
    auditing. Averages are exact (integer sums) and independent of the
    worker count.
    """
    cells = list(product(spec.input_sizes, spec.output_dims,
                         enumerate(spec.accuracies)))
    tasks = [(spec.seed, n, m, ai, trial, acc)
             for n, m, (ai, acc) in cells for trial in range(spec.trials)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_bench_trial, tasks, chunksize=4))
    else:
        outcomes = [_bench_trial(t) for t in tasks]

    results = []
    logs: dict[tuple[int, int, float], list[int]] = {}
    for idx, (n, m, (ai, acc)) in enumerate(cells):
        chunk = outcomes[idx * spec.trials:(idx + 1) * spec.trials]
        counts = [it for it, _ in chunk]
        failed = sum(1 for _, ok in chunk if not ok)
        results.append(BenchResult(n=n, m=m, accuracy=acc,
                                   avg_iterations=sum(counts) / spec.trials,
                                   max_iterations=max(counts),
                                   trials_failed=failed))
        logs[(n, m, acc)] = counts
    if return_logs:
        return results, logs
    return results


def check_iteration_budget(results: list[BenchResult],
                           iteration_logs: dict) -> bool:
    """True iff no trial exceeded ln(n)/accuracy iterations."""
    for res in results:
        budget = iteration_budget(res.n, res.accuracy)
        counts = iteration_logs[(res.n, res.m, res.accuracy)]
        if any(c > budget for c in counts):
            return False
    return True


def write_bench_csv(results: list[BenchResult], path) -> None:
    with open(path, "w", newline="") as f:
        f.write("n,m,accuracy,avg_iterations,max_iterations,trials_failed\n")
        for r in results:
            f.write(f"{r.n},{r.m},{r.accuracy:.10g},{r.avg_iterations:.10g},"
                    f"{r.max_iterations},{r.trials_failed}\n")


def format_bench_table(results: list[BenchResult]) -> str:
    """Aligned text table of the per-cell statistics."""
    headers = ("input n", "output m", "accuracy", "avg iter", "max iter", "failed")
    rows = [(str(r.n), str(r.m), f"{r.accuracy:.0e}", f"{r.avg_iterations:.1f}",
             str(r.max_iterations), str(r.trials_failed)) for r in results]
    widths = [max(len(h), *(len(row[i]) for row in rows)) if rows else len(h)
              for i, h in enumerate(headers)]
    lines = ["  ".join(h.rjust(w) for h, w in zip(headers, widths))]
    for row in rows:
        lines.append("  ".join(c.rjust(w) for c, w in zip(row, widths)))
    return "\n".join(lines)
