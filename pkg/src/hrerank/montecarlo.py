"""Seeded experiment harness comparing the two estimation heuristics.

On consistent data the averaging and least-squares routes recover the same
weights; as triad-level inconsistency grows their answers drift apart.
The harness generates consistent matrices, injects multiplicative noise of
configurable size, solves with both heuristics and records the Koczkodaj
index next to the distance between the two normalized solutions.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .diagnostics import koczkodaj_index
from .errors import HreError
from .hre_solver import ADMISSIBLE_TOL, build_system, solve_linear, synthesize
from .matrix_core import PcMatrix, Problem, preprocess
from .min_error_solver import solve_min_error

_SEED_STRIDE = 1_000_003  # spreads per-trial seeds away from the base seed


@dataclass(frozen=True)
class TrialRecord:
    seed: int
    n: int
    noise_level: float
    koczkodaj: float
    distance: float  # max-norm between the normalized solutions; nan if unsolved
    both_solved: bool


@dataclass(frozen=True)
class ExperimentConfig:
    n: int
    trials: int
    noise_levels: tuple[float, ...]
    reference_count: int
    seed: int
    weight_range: tuple[float, float] = (0.1, 10.0)

    def __post_init__(self):
        if self.n < 3:
            raise ValueError("experiment needs n >= 3")
        if self.trials < 1:
            raise ValueError("experiment needs at least one trial")
        if not (1 <= self.reference_count < self.n):
            raise ValueError("reference_count must be in 1..n-1")
        if any(level < 0 for level in self.noise_levels):
            raise ValueError("noise levels must be non-negative")
        lo, hi = self.weight_range
        if not (0 < lo < hi):
            raise ValueError("weight_range must satisfy 0 < low < high")


def generate_consistent(
    n: int, seed: int, weight_range: tuple[float, float] = (0.1, 10.0)
) -> tuple[PcMatrix, tuple[float, ...]]:
    """Consistent matrix from weights drawn log-uniformly over weight_range.

    The lower triangle is stored as the exact float inverse of the upper
    triangle, so the output is reciprocal bit for bit.
    """
    lo, hi = weight_range
    if not (0 < lo < hi):
        raise ValueError("weight_range must satisfy 0 < low < high")
    rng = random.Random(seed)
    weights = tuple(math.exp(rng.uniform(math.log(lo), math.log(hi))) for _ in range(n))
    grid = [[1.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            grid[i][j] = weights[i] / weights[j]
            grid[j][i] = 1.0 / grid[i][j]
    return PcMatrix(tuple(tuple(row) for row in grid)), weights


def perturb(matrix: PcMatrix, noise_level: float, seed: int) -> PcMatrix:
    """Multiply each upper-triangle entry by exp(eps), eps ~ U(-level, +level).

    The lower triangle is rebuilt as the exact inverse, so reciprocity is
    preserved; zero noise returns the matrix unchanged (given a reciprocal
    input whose lower triangle already inverts the upper one exactly).
    Missing pairs stay missing.
    """
    if noise_level < 0:
        raise ValueError("noise level must be non-negative")
    rng = random.Random(seed)
    n = matrix.n
    grid = [list(row) for row in matrix.entries]
    for i in range(n):
        for j in range(i + 1, n):
            if grid[i][j] is None:
                continue
            grid[i][j] *= math.exp(rng.uniform(-noise_level, noise_level))
            grid[j][i] = 1.0 / grid[i][j]
    return PcMatrix(tuple(tuple(row) for row in grid))


def _solve_averaging_direct(problem: Problem) -> tuple[float, ...] | None:
    """Direct solve of the averaging system; None when singular or non-positive."""
    try:
        prepared, _ = preprocess(problem)
        solution = solve_linear(build_system(prepared))
        if min(solution) <= ADMISSIBLE_TOL:
            return None
        _, unit = synthesize(solution, prepared)
        return unit.values
    except HreError:
        return None


def _solve_least_squares(problem: Problem) -> tuple[float, ...] | None:
    try:
        return solve_min_error(problem).weights_normalized.values
    except HreError:
        return None


def run_experiment(config: ExperimentConfig) -> list[TrialRecord]:
    """One record per (noise level, trial), in deterministic order.

    Trials are paired across noise levels: trial t reuses the same base
    matrix and the same noise directions at every level, so the recorded
    distances are directly comparable between levels (common random
    numbers).  Trials where either heuristic fails keep both_solved=False
    and a nan distance.
    """
    records: list[TrialRecord] = []
    for noise in config.noise_levels:
        for trial in range(config.trials):
            gen_seed = config.seed * _SEED_STRIDE + 2 * trial
            matrix, weights = generate_consistent(config.n, gen_seed, config.weight_range)
            noisy = perturb(matrix, noise, gen_seed + 1)
            references = {i + 1: weights[i] for i in range(config.reference_count)}
            problem = Problem(noisy, references)

            averaging = _solve_averaging_direct(problem)
            least_squares = _solve_least_squares(problem)
            solved = averaging is not None and least_squares is not None
            if solved:
                distance = max(abs(a - b) for a, b in zip(averaging, least_squares))
            else:
                distance = math.nan
            records.append(
                TrialRecord(
                    seed=gen_seed,
                    n=config.n,
                    noise_level=noise,
                    koczkodaj=koczkodaj_index(noisy),
                    distance=distance,
                    both_solved=solved,
                )
            )
    return records


def write_csv(records: list[TrialRecord], path: str) -> None:
    """CSV with header seed,n,noise,koczkodaj,distance,both_solved; LF endings."""
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("seed,n,noise,koczkodaj,distance,both_solved\n")
        for r in records:
            handle.write(
                f"{r.seed},{r.n},{r.noise_level!r},{r.koczkodaj!r},"
                f"{r.distance!r},{'true' if r.both_solved else 'false'}\n"
            )


@dataclass(frozen=True)
class NoiseLevelSummary:
    noise_level: float
    trials: int
    solved: int
    mean_koczkodaj: float
    mean_distance: float  # over solved trials; nan when none solved


def summarize(records: list[TrialRecord]) -> list[NoiseLevelSummary]:
    """Per-noise-level means, in first-seen level order."""
    levels: list[float] = []
    for r in records:
        if r.noise_level not in levels:
            levels.append(r.noise_level)
    summaries = []
    for level in levels:
        bucket = [r for r in records if r.noise_level == level]
        solved = [r for r in bucket if r.both_solved]
        mean_distance = (
            sum(r.distance for r in solved) / len(solved) if solved else math.nan
        )
        summaries.append(
            NoiseLevelSummary(
                noise_level=level,
                trials=len(bucket),
                solved=len(solved),
                mean_koczkodaj=sum(r.koczkodaj for r in bucket) / len(bucket),
                mean_distance=mean_distance,
            )
        )
    return summaries
