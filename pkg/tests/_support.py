"""Shared test helpers: printed-value tolerances, generators, independent oracles."""

from __future__ import annotations

import math
import random
from pathlib import Path

from hrerank import PcMatrix, Problem

DATA_DIR = Path(__file__).parent / "data"
GOLDEN_DIR = Path(__file__).parent / "golden"


def assert_printed(value: float, literal: str) -> None:
    """Compare against a value as printed in the reference tables.

    The tables print three decimals, so 1e-3 is the usual tolerance; a few
    entries are printed shorter (e.g. "2.88", "0.13"), where the faithful
    tolerance is half a unit of the last printed digit.
    """
    expected = float(literal)
    decimals = len(literal.split(".")[1]) if "." in literal else 0
    tol = max(1e-3, 0.5 * 10.0 ** (-decimals))
    assert abs(value - expected) <= tol, f"{value!r} not within {tol} of printed {literal}"


def assert_vector_printed(values, literals) -> None:
    assert len(values) == len(literals)
    for value, literal in zip(values, literals):
        assert_printed(value, literal)


def assert_close(a: float, b: float, tol: float) -> None:
    assert abs(a - b) <= tol, f"|{a!r} - {b!r}| > {tol}"


def max_abs_diff(xs, ys) -> float:
    return max(abs(x - y) for x, y in zip(xs, ys))


def max_rel_diff(xs, ys) -> float:
    return max(abs(x - y) / abs(y) for x, y in zip(xs, ys))


def consistent_matrix(weights) -> PcMatrix:
    """Exact-ratio matrix from weights; lower triangle is the bit-exact inverse."""
    n = len(weights)
    grid = [[1.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            grid[i][j] = weights[i] / weights[j]
            grid[j][i] = 1.0 / grid[i][j]
    return PcMatrix(tuple(tuple(row) for row in grid))


def random_weights(n: int, rng: random.Random, lo: float = 0.1, hi: float = 10.0):
    return tuple(math.exp(rng.uniform(math.log(lo), math.log(hi))) for _ in range(n))


def random_reciprocal(n: int, rng: random.Random, spread: float = math.log(9.0)) -> PcMatrix:
    """Reciprocal matrix with log-uniform entries; no consistency structure."""
    grid = [[1.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            grid[i][j] = math.exp(rng.uniform(-spread, spread))
            grid[j][i] = 1.0 / grid[i][j]
    return PcMatrix(tuple(tuple(row) for row in grid))


def noisy_consistent(
    n: int,
    rng: random.Random,
    noise: float,
    lo: float = 0.1,
    hi: float = 10.0,
) -> tuple[PcMatrix, tuple[float, ...]]:
    """Consistent matrix with each upper entry jittered by exp(U(-noise, noise))."""
    weights = random_weights(n, rng, lo, hi)
    grid = [[1.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            grid[i][j] = weights[i] / weights[j] * math.exp(rng.uniform(-noise, noise))
            grid[j][i] = 1.0 / grid[i][j]
    return PcMatrix(tuple(tuple(row) for row in grid)), weights


def permute_problem(problem: Problem, perm: list[int]) -> Problem:
    """Relabel concepts: new index perm[i-1] plays old concept i's role."""
    n = problem.n
    grid = [[None] * n for _ in range(n)]
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            grid[perm[i - 1] - 1][perm[j - 1] - 1] = problem.matrix.entry(i, j)
    refs = {perm[i - 1]: w for i, w in problem.references.items()}
    return Problem(PcMatrix(tuple(tuple(row) for row in grid)), refs)


def unpermute(values, perm: list[int]):
    """Recover original ordering from a permuted solution vector."""
    return tuple(values[perm[i] - 1] for i in range(len(values)))


def estimation_error_oracle(problem: Problem, mu) -> tuple[dict[int, float], float]:
    """Literal re-implementation of the mean absolute estimation error.

    Kept deliberately separate from the library code path: per unknown j,
    the mean of |mu_j - mu_i * m(j, i)| over every other concept i with
    m(j, i) specified, then the mean over unknowns.
    """
    per = {}
    for j in problem.unknown_indices:
        terms = []
        for i in range(1, problem.n + 1):
            if i == j or problem.matrix.entry(j, i) is None:
                continue
            terms.append(abs(mu[j - 1] - mu[i - 1] * problem.matrix.entry(j, i)))
        per[j] = sum(terms) / len(terms)
    return per, sum(per.values()) / len(per)


def spearman(xs, ys) -> float:
    def ranks(values):
        order = sorted(range(len(values)), key=lambda i: values[i])
        out = [0.0] * len(values)
        for position, i in enumerate(order):
            out[i] = float(position)
        return out

    rx, ry = ranks(xs), ranks(ys)
    mean_x = sum(rx) / len(rx)
    mean_y = sum(ry) / len(ry)
    num = sum((a - mean_x) * (b - mean_y) for a, b in zip(rx, ry))
    den = math.sqrt(
        sum((a - mean_x) ** 2 for a in rx) * sum((b - mean_y) ** 2 for b in ry)
    )
    return num / den


# Complete matrix whose averaging system is exactly singular: the unknown
# block is the circulant [[1, t, 1/t], [1/t, 1, t], [t, 1/t, 1]] with
# t + 1/t = 3, whose Perron root is then 1 + t + 1/t = n = 4.
SINGULAR_T = (3.0 + math.sqrt(5.0)) / 2.0


def singular_direct_problem() -> Problem:
    t = SINGULAR_T
    rows = (
        (1.0, t, 1.0 / t, 1.0),
        (1.0 / t, 1.0, t, 1.0),
        (t, 1.0 / t, 1.0, 1.0),
        (1.0, 1.0, 1.0, 1.0),
    )
    return Problem(PcMatrix(rows), {4: 1.0})


def inadmissible_direct_problem() -> Problem:
    """Direct solve succeeds but yields a negative weight; least squares does not."""
    return Problem(random_reciprocal(4, random.Random(9)), {1: 1.0})


def diverging_incomplete_problem() -> Problem:
    """Unknowns 2,3,4 form an inconsistent triangle (cycle gain 8^3/12 >> 1).

    Only concept 2 touches the reference, so the iteration blows up and the
    solver must fall back to its best early iterate.
    """
    rows = (
        (1.0, 1.0, None, None),
        (1.0, 1.0, 8.0, 1.0 / 8.0),
        (None, 1.0 / 8.0, 1.0, 8.0),
        (None, 8.0, 1.0 / 8.0, 1.0),
    )
    return Problem(PcMatrix(rows), {1: 1.0})
