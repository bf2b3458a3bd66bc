"""Rating estimation with fixed reference weights.

The averaging heuristic estimates each unknown weight as the arithmetic
mean of neighbour-weight-times-ratio samples.  For a complete matrix its
fixed point solves a small linear system, so the pipeline first tries a
direct solve, falling back to the least-squares heuristic and finally to
picking the best Jacobi iterate; incomplete matrices go straight to the
iterative route, which simply skips samples whose ratio is unspecified.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .baselines import WeightVector
from .diagnostics import estimation_error
from .errors import (
    IncompleteMatrixError,
    InadmissibleSolutionError,
    SingularSystemError,
    SolveFailedError,
)
from .matrix_core import Problem, preprocess

PIVOT_TOL = 1e-12          # pivot magnitude below this means "determinant is 0"
RESIDUAL_TOL = 1e-9        # accepted solves satisfy |Ax-b|_inf <= tol * (1+|b|_inf)
ADMISSIBLE_TOL = 1e-9      # solved weights must exceed this to count as positive
JACOBI_STOP_TOL = 1e-10    # relative max-norm change that counts as converged
JACOBI_MAX_ITER = 1000     # iteration budget on the convergent path
DIVERGENCE_LIMIT = 1e12    # any component beyond this aborts the iteration


@dataclass(frozen=True)
class LinearSystem:
    """Dense k x k system over the unknown concepts.

    ``unknown_index_map[r]`` is the 1-based concept index behind solver
    row/column r, in ascending concept order.
    """

    coefficients: tuple[tuple[float, ...], ...]
    constants: tuple[float, ...]
    unknown_index_map: tuple[int, ...]

    @property
    def k(self) -> int:
        return len(self.constants)


@dataclass(frozen=True)
class JacobiRun:
    """All iterates of one averaging run; entries are None until estimated."""

    iterates: tuple[tuple[float | None, ...], ...]
    converged: bool
    diverged: bool


@dataclass(frozen=True)
class RankOutcome:
    """Solution plus provenance: which strategy fired and how it behaved.

    ``weights`` is the vector the caller asked for (normalized or not);
    ``weights_raw`` keeps the reference concepts at exactly their input
    values, ``weights_normalized`` rescales to unit sum.  ``admissible``
    reports whether the first-choice strategy for the problem class (direct
    solve, or a convergent iteration) produced a strictly positive solution;
    it is False whenever a fallback had to fire.  ``convergence_ok`` is the
    diagonal-dominance test of the built system (None when no system was
    built); ``determinant_ok`` is None until a direct solve was attempted.
    """

    weights: WeightVector
    weights_raw: WeightVector
    weights_normalized: WeightVector
    path: str  # direct | jacobi | min-error | best-iterate
    convergence_ok: bool | None
    determinant_ok: bool | None
    admissible: bool
    error: float
    iterations_used: int
    warnings: tuple[str, ...]


def build_system(problem: Problem) -> LinearSystem:
    """Linear system whose solution is the averaging heuristic's fixed point.

    Row r (for unknown concept u): unit diagonal, off-diagonal
    -m(u, v)/(n-1) for the other unknowns v, constant
    sum over references c of m(u, c) * weight(c) / (n-1).

    Expects a preprocessed problem: complete matrix, at least one reference.
    """
    m = problem.matrix
    n = problem.n
    unknowns = problem.unknown_indices
    if not problem.references:
        raise ValueError("at least one reference concept is required")
    if not unknowns:
        raise ValueError("no unknown concepts: nothing to solve")
    if not m.is_complete():
        raise IncompleteMatrixError(
            "incomplete matrix: the averaging system is undefined, use the iterative route"
        )
    scale = 1.0 / (n - 1)
    refs = sorted(problem.references.items())
    coefficients = tuple(
        tuple(1.0 if v == u else -m.entry(u, v) * scale for v in unknowns) for u in unknowns
    )
    constants = tuple(sum(m.entry(u, c) * w for c, w in refs) * scale for u in unknowns)
    return LinearSystem(coefficients, constants, unknowns)


def solve_linear(system: LinearSystem) -> tuple[float, ...]:
    """Gaussian elimination with partial pivoting.

    Raises SingularSystemError when some pivot drops below 1e-12 in
    magnitude (the practical "determinant differs from 0" test) or when the
    computed solution fails the residual bound
    |Ax - b|_inf <= 1e-9 * (1 + |b|_inf).
    """
    k = system.k
    a = np.array(system.coefficients, dtype=float)
    b = np.array(system.constants, dtype=float)
    x = b.copy()
    u = a.copy()
    for col in range(k):
        pivot = col + int(np.argmax(np.abs(u[col:, col])))
        if abs(u[pivot, col]) < PIVOT_TOL:
            raise SingularSystemError(f"pivot {u[pivot, col]:.3e} in column {col + 1} below tolerance")
        if pivot != col:
            u[[col, pivot]] = u[[pivot, col]]
            x[[col, pivot]] = x[[pivot, col]]
        factors = u[col + 1 :, col] / u[col, col]
        u[col + 1 :] -= factors[:, None] * u[col]
        x[col + 1 :] -= factors * x[col]
    for col in range(k - 1, -1, -1):
        x[col] = (x[col] - u[col, col + 1 :] @ x[col + 1 :]) / u[col, col]

    residual = float(np.max(np.abs(a @ x - b)))
    if residual > RESIDUAL_TOL * (1.0 + float(np.max(np.abs(b)))):
        raise SingularSystemError(f"solution residual {residual:.3e} exceeds tolerance")
    return tuple(float(v) for v in x)


def check_convergence(system: LinearSystem) -> tuple[bool, bool]:
    """Strict diagonal dominance by rows and by columns (unit diagonal).

    Either kind guarantees the Jacobi iteration converges; neither holding
    proves nothing (the iteration may still converge).
    """
    k = system.k
    a = system.coefficients
    row_dominant = all(sum(abs(a[i][j]) for j in range(k) if j != i) < 1.0 for i in range(k))
    column_dominant = all(sum(abs(a[i][j]) for i in range(k) if i != j) < 1.0 for j in range(k))
    return row_dominant, column_dominant


def jacobi_iterate(problem: Problem, max_r: int) -> JacobiRun:
    """Run the averaging update, starting from the reference weights only.

    At step r each unknown concept j averages the samples
    m(j, i) * previous_estimate(i) over every other concept i whose ratio
    m(j, i) is specified and whose estimate already exists; the divisor is
    the number of samples actually used.  Reference weights never change.
    In the first step only reference concepts have estimates, so step one
    averages over (at most) the reference set; on a complete matrix every
    later step averages over all n-1 other concepts.

    Concepts that cannot be sampled yet simply stay unestimated for the
    round (None in the returned iterate); on a reachable problem every
    concept acquires an estimate after enough steps.  Iteration stops early
    once two consecutive fully-defined iterates agree to a relative 1e-10
    in the max-norm, or as soon as any component leaves (0, 1e12).

    Expects a preprocessed (reciprocal) problem with references.
    """
    if not problem.references:
        raise ValueError("at least one reference concept is required")
    m = problem.matrix
    n = problem.n
    refs = problem.references
    unknowns = problem.unknown_indices

    estimates: dict[int, float] = {}
    iterates: list[tuple[float | None, ...]] = []
    previous: tuple[float | None, ...] | None = None
    converged = False
    diverged = False

    for _ in range(max_r):
        new_estimates: dict[int, float] = {}
        for j in unknowns:
            total = 0.0
            count = 0
            for i in range(1, n + 1):
                if i == j:
                    continue
                ratio = m.entry(j, i)
                if ratio is None:
                    continue
                if i in refs:
                    value = refs[i]
                elif i in estimates:
                    value = estimates[i]
                else:
                    continue
                total += ratio * value
                count += 1
            if count:
                new_estimates[j] = total / count
        current = tuple(
            refs[i] if i in refs else new_estimates.get(i) for i in range(1, n + 1)
        )
        iterates.append(current)
        if any(
            v is not None and (not math.isfinite(v) or abs(v) > DIVERGENCE_LIMIT)
            for v in current
        ):
            diverged = True
            break
        if (
            previous is not None
            and all(v is not None for v in current)
            and all(v is not None for v in previous)
        ):
            change = max(abs(c - p) for c, p in zip(current, previous))
            scale = max(abs(v) for v in current)
            if change <= JACOBI_STOP_TOL * scale:
                converged = True
                break
        estimates = new_estimates
        previous = current

    return JacobiRun(tuple(iterates), converged, diverged)


def select_best_iterate(
    iterates: tuple[tuple[float | None, ...], ...], problem: Problem
) -> WeightVector:
    """Among fully-defined positive iterates, the one with the least mean error.

    Ties go to the earliest iterate.  Raises SolveFailedError when no
    iterate is admissible.
    """
    best: WeightVector | None = None
    best_error = math.inf
    for vec in iterates:
        if any(v is None or not math.isfinite(v) or v <= ADMISSIBLE_TOL for v in vec):
            continue
        candidate = WeightVector(vec)
        _, mean_error = estimation_error(problem, candidate)
        if mean_error < best_error:
            best, best_error = candidate, mean_error
    if best is None:
        raise SolveFailedError("no admissible iterate to select from")
    return best


def synthesize(solved: tuple[float, ...], problem: Problem) -> tuple[WeightVector, WeightVector]:
    """Weave solved unknowns and fixed reference weights into full vectors.

    Returns (reference-scale vector, unit-sum vector).  Reference concepts
    keep their input weights bit for bit in the first form.
    """
    unknowns = problem.unknown_indices
    if len(solved) != len(unknowns):
        raise ValueError(f"expected {len(unknowns)} solved values, got {len(solved)}")
    nonpositive = [u for u, v in zip(unknowns, solved) if not (math.isfinite(v) and v > 0)]
    if nonpositive:
        raise InadmissibleSolutionError(
            f"non-positive solved weight for concept(s) {nonpositive}"
        )
    by_index = dict(zip(unknowns, solved))
    full = tuple(
        problem.references[i] if i in problem.references else by_index[i]
        for i in range(1, problem.n + 1)
    )
    raw = WeightVector(full)
    return raw, raw.normalize()


def hre_rank(problem: Problem, *, max_iterations: int = 10, normalize: bool = False) -> RankOutcome:
    """Full solution pipeline: validate, repair, solve, attach provenance.

    Complete matrices are solved directly; a singular or non-positive
    direct solution falls back to the least-squares heuristic and then to
    the best Jacobi iterate (``max_iterations`` bounds that last resort).
    Incomplete matrices use the iterative route: its limit when it
    converges, otherwise again the best early iterate.

    Raises ValidationError for fatally invalid input (including unreachable
    concepts), ValueError when no reference concept is given, and
    SolveFailedError when every strategy fails.
    """
    from . import min_error_solver  # deferred: that module builds on this one

    if not problem.references:
        raise ValueError("rating estimation needs at least one reference concept")
    prepared, issues = preprocess(problem)
    warnings = [str(issue) for issue in issues]

    convergence_ok: bool | None = None
    determinant_ok: bool | None = None
    iterations_used = 0

    if not prepared.unknown_indices:
        raw, unit = synthesize((), prepared)
        path, admissible = "direct", True
    elif prepared.matrix.is_complete():
        system = build_system(prepared)
        row_dom, col_dom = check_convergence(system)
        convergence_ok = row_dom or col_dom
        solution: tuple[float, ...] | None = None
        try:
            solution = solve_linear(system)
            determinant_ok = True
        except SingularSystemError as exc:
            determinant_ok = False
            warnings.append(f"direct solve failed: {exc}")
        if solution is not None and min(solution) > ADMISSIBLE_TOL:
            raw, unit = synthesize(solution, prepared)
            path, admissible = "direct", True
        else:
            if solution is not None:
                warnings.append("direct solution has non-positive weights")
            admissible = False
            try:
                result = min_error_solver.solve_min_error(prepared)
                raw, unit = result.weights_raw, result.weights_normalized
                path = "min-error"
                if not result.verified_minimum:
                    warnings.append(
                        "least-squares stationary point not verified as a minimum"
                    )
            except (SingularSystemError, InadmissibleSolutionError) as exc:
                warnings.append(f"least-squares heuristic failed: {exc}")
                run = jacobi_iterate(prepared, max_iterations)
                iterations_used = len(run.iterates)
                raw = select_best_iterate(run.iterates, prepared)
                unit = raw.normalize()
                path = "best-iterate"
    else:
        run = jacobi_iterate(prepared, JACOBI_MAX_ITER)
        iterations_used = len(run.iterates)
        if run.converged:
            raw = WeightVector(run.iterates[-1])
            unit = raw.normalize()
            path, admissible = "jacobi", True
        else:
            warnings.append(
                "iteration did not converge; selecting the best early iterate"
            )
            admissible = False
            raw = select_best_iterate(run.iterates[:max_iterations], prepared)
            unit = raw.normalize()
            path = "best-iterate"

    selected = unit if normalize else raw
    _, mean_error = estimation_error(prepared, selected)
    return RankOutcome(
        weights=selected,
        weights_raw=raw,
        weights_normalized=unit,
        path=path,
        convergence_ok=convergence_ok,
        determinant_ok=determinant_ok,
        admissible=admissible,
        error=mean_error,
        iterations_used=iterations_used,
        warnings=tuple(warnings),
    )
