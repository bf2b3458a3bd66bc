"""Inconsistency indices, estimation error, and the order-preservation check."""

from __future__ import annotations

from dataclasses import dataclass

from .baselines import WeightVector, principal_eigen
from .errors import IncompleteMatrixError
from .matrix_core import PcMatrix, Problem, restore_reciprocity

TRIAD_CONSISTENT_TOL = 1e-12


@dataclass(frozen=True)
class InconsistencyReport:
    """Saaty CI (complete matrices only) and Koczkodaj index side by side."""

    saaty_ci: float | None
    koczkodaj: float | None
    triads_evaluated: int


@dataclass(frozen=True)
class PopViolation:
    """Order-of-preference failure: a >1 ratio whose weights are not ordered."""

    quadruple: tuple[int, int, int, int]
    failed_pairs: tuple[tuple[int, int], ...]  # subset of {(i,j), (k,l)}


@dataclass(frozen=True)
class PoipViolation:
    """Intensity failure: m_ij > m_kl but mu_i/mu_j <= mu_k/mu_l."""

    quadruple: tuple[int, int, int, int]
    lhs: float  # mu_i / mu_j
    rhs: float  # mu_k / mu_l


@dataclass(frozen=True)
class CopReport:
    pop_violations: tuple[PopViolation, ...]
    poip_violations: tuple[PoipViolation, ...]
    quadruples_checked: int

    @property
    def satisfies_cop(self) -> bool:
        return not self.pop_violations and not self.poip_violations


def koczkodaj_index(matrix: PcMatrix) -> float | None:
    """Worst triad-level inconsistency of a reciprocal matrix.

    Each fully specified triad {i, j, k} contributes
    min(|1 - m_ij/(m_ik m_kj)|, |1 - (m_ik m_kj)/m_ij|); the index is the
    maximum contribution.  Returns None when no complete triad exists (only
    possible for incomplete matrices).  Run `restore_reciprocity` first:
    on a reciprocal matrix the contribution does not depend on the triad's
    orientation, which is what makes the unordered-triad scan valid.
    """
    n = matrix.n
    if n <= 2:
        raise ValueError("the triad-based index needs at least 3 concepts")
    worst: float | None = None
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            for k in range(j + 1, n + 1):
                m_ij = matrix.entry(i, j)
                m_ik = matrix.entry(i, k)
                m_kj = matrix.entry(k, j)
                if m_ij is None or m_ik is None or m_kj is None:
                    continue
                q = m_ik * m_kj / m_ij
                contribution = min(abs(1.0 - q), abs(1.0 - 1.0 / q))
                if worst is None or contribution > worst:
                    worst = contribution
    return worst


def count_complete_triads(matrix: PcMatrix) -> int:
    n = matrix.n
    count = 0
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            for k in range(j + 1, n + 1):
                if (
                    matrix.entry(i, j) is not None
                    and matrix.entry(i, k) is not None
                    and matrix.entry(k, j) is not None
                ):
                    count += 1
    return count


def saaty_ci(matrix: PcMatrix) -> float:
    """Eigenvalue-based consistency index (lambda_max - n) / (n - 1).

    Requires a complete matrix; raises IncompleteMatrixError otherwise.
    """
    eig = principal_eigen(matrix)
    return (eig.lambda_max - matrix.n) / (matrix.n - 1)


def inconsistency_report(matrix: PcMatrix) -> InconsistencyReport:
    """CI of the raw matrix (when computable) plus Koczkodaj of its restored form."""
    try:
        ci = saaty_ci(matrix)
    except IncompleteMatrixError:
        ci = None
    if matrix.n > 2:
        restored = restore_reciprocity(matrix)
        k = koczkodaj_index(restored)
        triads = count_complete_triads(restored)
    else:
        k, triads = None, 0
    return InconsistencyReport(ci, k, triads)


def estimation_error(problem: Problem, mu: WeightVector) -> tuple[dict[int, float], float]:
    """Average absolute one-step estimation error of mu on the unknown concepts.

    For each unknown c_j the row entries act as predictors: every specified
    m_ji turns mu(c_i) into the sample m_ji * mu(c_i) of mu(c_j).  The
    per-concept error is the mean absolute deviation of those samples from
    mu(c_j); the headline figure is the mean over the unknown set.  Note the
    value scales with mu, so compare errors only at a common scale.

    Raises ValueError if mu has the wrong length or some unknown concept has
    no specified ratio at all (an unreachable concept).
    """
    m = problem.matrix
    n = problem.n
    if len(mu) != n:
        raise ValueError(f"weight vector has {len(mu)} entries, expected {n}")
    per_concept: dict[int, float] = {}
    for j in problem.unknown_indices:
        deviations = []
        for i in range(1, n + 1):
            if i == j:
                continue
            ratio = m.entry(j, i)
            if ratio is None:
                continue
            deviations.append(abs(mu.values[j - 1] - mu.values[i - 1] * ratio))
        if not deviations:
            raise ValueError(f"concept {j} has no specified ratio to estimate it from")
        per_concept[j] = sum(deviations) / len(deviations)
    mean_error = sum(per_concept.values()) / len(per_concept) if per_concept else 0.0
    return per_concept, mean_error


def cop_check(matrix: PcMatrix, mu: WeightVector) -> CopReport:
    """Condition-of-order-preservation check of mu against the judgments.

    Scans ordered pairs of ordered pairs ((i,j), (k,l)) with both entries
    specified, m_ij > 1, m_kl >= 1 and m_ij > m_kl.  The comparison pair is
    allowed to sit at exactly 1 so that a strict judgment is also tested
    against every indifference judgment; otherwise a matrix with a single
    entry above 1 could never fail the check.  For each such quadruple:

    * order of preference: mu must rank i above j, and k above l when the
      (k,l) judgment is itself strict;
    * order of intensity: mu_i/mu_j must strictly exceed mu_k/mu_l (equal
      ratios count as violations).

    The verdict depends on mu only through its ratios, so it is invariant
    under uniform rescaling.  Enumeration is O(n^4); fine at survey scale.
    """
    n = matrix.n
    if len(mu) != n:
        raise ValueError(f"weight vector has {len(mu)} entries, expected {n}")
    pairs = [
        (i, j, matrix.entry(i, j))
        for i in range(1, n + 1)
        for j in range(1, n + 1)
        if i != j and matrix.present(i, j)
    ]
    strict = [(i, j, v) for i, j, v in pairs if v > 1.0]
    comparable = [(i, j, v) for i, j, v in pairs if v >= 1.0]

    pop: list[PopViolation] = []
    poip: list[PoipViolation] = []
    checked = 0
    w = mu.values
    for i, j, m_ij in strict:
        for k, l, m_kl in comparable:
            if (i, j) == (k, l) or m_ij <= m_kl:
                continue
            checked += 1
            failed = []
            if w[i - 1] <= w[j - 1]:
                failed.append((i, j))
            if m_kl > 1.0 and w[k - 1] <= w[l - 1]:
                failed.append((k, l))
            if failed:
                pop.append(PopViolation((i, j, k, l), tuple(failed)))
            lhs = w[i - 1] / w[j - 1]
            rhs = w[k - 1] / w[l - 1]
            if lhs <= rhs:
                poip.append(PoipViolation((i, j, k, l), lhs, rhs))
    return CopReport(tuple(pop), tuple(poip), checked)
