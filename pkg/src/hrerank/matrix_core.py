"""Pairwise-comparison data model: parsing, validation, reciprocity repair.

A comparison matrix stores, for every ordered pair of concepts (i, j), how
many times concept i outweighs concept j.  Entries may be missing ("?" in
the file format); all indices in the public API are 1-based, matching the
file format and the usual decision-analysis convention.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

from .errors import ParseError, ValidationError

# Tolerances used by validation and the repair operations.
DIAGONAL_TOL = 1e-12          # diagonal entries must equal 1 within this
RECIPROCAL_WARN_TOL = 1e-9    # |m_ij * m_ji - 1| beyond this is flagged
KNOWN_RATIO_WARN_TOL = 1e-6   # relative deviation of a provided known-known ratio

FATAL_CATEGORIES = frozenset(
    {"nonpositive-entry", "bad-diagonal", "non-square", "unreachable-concept"}
)


@dataclass(frozen=True)
class PcMatrix:
    """Square grid of optional positive ratios; ``None`` marks a missing entry.

    Structural soundness (squareness, n >= 2) is enforced on construction.
    Numeric soundness (positivity, unit diagonal) is checked by `validate`,
    so that diagnostic tooling can describe broken input instead of refusing
    to represent it.
    """

    entries: tuple[tuple[float | None, ...], ...]

    def __post_init__(self):
        rows = tuple(
            tuple(None if v is None else float(v) for v in row) for row in self.entries
        )
        if len(rows) < 2:
            raise ValueError("a comparison matrix needs at least 2 concepts")
        if any(len(row) != len(rows) for row in rows):
            raise ValueError("comparison matrix must be square")
        object.__setattr__(self, "entries", rows)

    @property
    def n(self) -> int:
        return len(self.entries)

    def entry(self, i: int, j: int) -> float | None:
        """Ratio of concept i to concept j (1-based), or None if unspecified."""
        return self.entries[i - 1][j - 1]

    def present(self, i: int, j: int) -> bool:
        return self.entries[i - 1][j - 1] is not None

    def is_complete(self) -> bool:
        return all(v is not None for row in self.entries for v in row)

    def is_reciprocal(self, tol: float = RECIPROCAL_WARN_TOL) -> bool:
        """True if every fully specified pair satisfies m_ij * m_ji = 1 +/- tol."""
        for i in range(self.n):
            for j in range(i + 1, self.n):
                a, b = self.entries[i][j], self.entries[j][i]
                if a is not None and b is not None and abs(a * b - 1.0) > tol:
                    return False
                if (a is None) != (b is None):
                    return False
        return True


@dataclass(frozen=True)
class Problem:
    """A comparison matrix plus fixed weights for the reference concepts.

    ``references`` maps 1-based concept indices to their known weights; the
    remaining concepts are the unknowns the solvers estimate.  The mapping
    may be empty for operations that do not need reference concepts.
    """

    matrix: PcMatrix
    references: dict[int, float] = field(default_factory=dict)

    def __post_init__(self):
        refs = dict(self.references)
        for idx, w in refs.items():
            if not (1 <= idx <= self.matrix.n):
                raise ValueError(f"reference index {idx} outside 1..{self.matrix.n}")
            if not (math.isfinite(w) and w > 0):
                raise ValueError(f"reference weight for concept {idx} must be positive")
        object.__setattr__(self, "references", refs)

    @property
    def n(self) -> int:
        return self.matrix.n

    @property
    def known_indices(self) -> tuple[int, ...]:
        return tuple(sorted(self.references))

    @property
    def unknown_indices(self) -> tuple[int, ...]:
        return tuple(i for i in range(1, self.n + 1) if i not in self.references)


@dataclass(frozen=True)
class Issue:
    location: str
    category: str
    message: str

    @property
    def fatal(self) -> bool:
        return self.category in FATAL_CATEGORIES

    def __str__(self) -> str:
        return f"{self.category} at {self.location}: {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    issues: tuple[Issue, ...]

    @property
    def ok(self) -> bool:
        return not any(i.fatal for i in self.issues)

    @property
    def warnings(self) -> tuple[Issue, ...]:
        return tuple(i for i in self.issues if not i.fatal)

    @property
    def fatal_issues(self) -> tuple[Issue, ...]:
        return tuple(i for i in self.issues if i.fatal)


_FRACTION_RE = re.compile(r"^(\d+(?:\.\d+)?)/(\d+(?:\.\d+)?)$")
_TOKEN_RE = re.compile(r"[^\s,]+")


def _tokens(line: str) -> list[tuple[str, int]]:
    """Tokens of one line with 1-based columns; '#' starts a comment."""
    cut = line.find("#")
    if cut >= 0:
        line = line[:cut]
    return [(m.group(0), m.start() + 1) for m in _TOKEN_RE.finditer(line)]


def _parse_value(token: str, line_no: int, col: int) -> float | None:
    if token == "?":
        return None
    m = _FRACTION_RE.match(token)
    if m:
        den = float(m.group(2))
        if den == 0:
            raise ParseError(f"zero denominator in '{token}'", line_no, col)
        return float(m.group(1)) / den
    try:
        return float(token)
    except ValueError:
        raise ParseError(f"invalid value '{token}'", line_no, col) from None


def parse_matrix(text: str) -> Problem:
    """Parse the matrix file format into a Problem.

    Format (UTF-8, '#' comments, tokens split on spaces/tabs/commas)::

        <n>                  size, first line
        <n rows of n tokens> token := decimal | integer | a/b | ?
        ref <i> <w>          zero or more reference lines, i 1-based

    Raises ParseError with line/column on any syntax problem.  Numeric
    soundness (positivity, unit diagonal) is left to `validate`.
    """
    n: int | None = None
    rows: list[list[float | None]] = []
    references: dict[int, float] = {}
    last_line = 0

    for line_no, raw in enumerate(text.splitlines(), start=1):
        last_line = line_no
        toks = _tokens(raw)
        if not toks:
            continue
        if n is None:
            if len(toks) != 1:
                raise ParseError("expected a single matrix size", line_no, toks[1][1])
            tok, col = toks[0]
            try:
                n = int(tok)
            except ValueError:
                raise ParseError(f"matrix size must be an integer, got '{tok}'", line_no, col) from None
            if n < 2:
                raise ParseError("matrix size must be at least 2", line_no, col)
        elif len(rows) < n:
            if len(toks) != n:
                raise ParseError(
                    f"row {len(rows) + 1} has {len(toks)} values, expected {n}",
                    line_no,
                    toks[0][1],
                )
            rows.append([_parse_value(tok, line_no, col) for tok, col in toks])
        else:
            tok, col = toks[0]
            if tok != "ref":
                raise ParseError(f"expected 'ref' line, got '{tok}'", line_no, col)
            if len(toks) != 3:
                raise ParseError("ref line needs exactly: ref <index> <weight>", line_no, col)
            try:
                idx = int(toks[1][0])
            except ValueError:
                raise ParseError(f"reference index must be an integer, got '{toks[1][0]}'", line_no, toks[1][1]) from None
            if not (1 <= idx <= n):
                raise ParseError(f"reference index {idx} outside 1..{n}", line_no, toks[1][1])
            if idx in references:
                raise ParseError(f"duplicate reference line for concept {idx}", line_no, toks[1][1])
            try:
                weight = float(toks[2][0])
            except ValueError:
                raise ParseError(f"invalid reference weight '{toks[2][0]}'", line_no, toks[2][1]) from None
            if not (math.isfinite(weight) and weight > 0):
                raise ParseError("reference weight must be a positive number", line_no, toks[2][1])
            references[idx] = weight

    if n is None:
        raise ParseError("empty input, expected matrix size", max(last_line, 1))
    if len(rows) < n:
        raise ParseError(f"expected {n} matrix rows, got {len(rows)}", last_line)
    return Problem(PcMatrix(tuple(tuple(r) for r in rows)), references)


def validate(problem: Problem) -> ValidationReport:
    """Check every matrix/problem invariant, collecting issues rather than raising.

    Fatal categories: nonpositive-entry, bad-diagonal, non-square and
    unreachable-concept (only checked when reference concepts exist, since
    reachability is a solver precondition).  Non-reciprocal pairs are
    warnings; reciprocity restoration handles them.
    """
    m = problem.matrix
    n = m.n
    issues: list[Issue] = []

    for i in range(1, n + 1):
        for j in range(1, n + 1):
            v = m.entry(i, j)
            if v is not None and not (math.isfinite(v) and v > 0):
                issues.append(
                    Issue(f"({i},{j})", "nonpositive-entry", f"entry {v!r} is not a positive finite ratio")
                )
    for i in range(1, n + 1):
        v = m.entry(i, i)
        if v is None:
            issues.append(Issue(f"({i},{i})", "bad-diagonal", "diagonal entry is missing"))
        elif math.isfinite(v) and v > 0 and abs(v - 1.0) > DIAGONAL_TOL:
            issues.append(Issue(f"({i},{i})", "bad-diagonal", f"diagonal entry {v!r} is not 1"))

    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            a, b = m.entry(i, j), m.entry(j, i)
            if a is None or b is None:
                continue
            if not all(math.isfinite(v) and v > 0 for v in (a, b)):
                continue
            if abs(a * b - 1.0) > RECIPROCAL_WARN_TOL:
                issues.append(
                    Issue(
                        f"({i},{j})",
                        "non-reciprocal-pair",
                        f"m({i},{j})={a:g} and m({j},{i})={b:g} are not mutual inverses",
                    )
                )

    if problem.references:
        ok, unreachable = is_reachable(problem)
        if not ok:
            for idx in unreachable:
                issues.append(
                    Issue(
                        f"c{idx}",
                        "unreachable-concept",
                        "no chain of specified ratios links it to a reference concept",
                    )
                )

    return ValidationReport(tuple(issues))


def restore_reciprocity(matrix: PcMatrix) -> PcMatrix:
    """Force m_ij * m_ji = 1 on every pair while staying close to the input.

    For a fully specified pair both entries move to the geometric mean of
    the entry and the inverse of its counterpart; a half-specified pair is
    completed with the exact inverse; fully missing pairs stay missing.
    Already-reciprocal matrices pass through unchanged (this is a fixpoint),
    so the solve pipeline applies it unconditionally.

    Expects entries to be positive (run `validate` first on foreign input).
    """
    grid = [list(row) for row in matrix.entries]
    n = matrix.n
    for i in range(n):
        for j in range(i + 1, n):
            a, b = grid[i][j], grid[j][i]
            if a is not None and b is not None:
                grid[i][j] = math.sqrt(a / b)
                grid[j][i] = math.sqrt(b / a)
            elif a is not None:
                grid[j][i] = 1.0 / a
            elif b is not None:
                grid[i][j] = 1.0 / b
    return PcMatrix(tuple(tuple(r) for r in grid))


def fill_known_ratios(problem: Problem) -> tuple[Problem, tuple[Issue, ...]]:
    """Overwrite every known-known ratio with the one its reference weights define.

    For reference concepts the ratio is definitional: m_ji = w_j / w_i.
    Provided values that deviate by more than a relative 1e-6 are kept in
    the returned issue list as known-known-mismatch warnings (survey noise
    is worth reporting, not worth failing on).  Entries touching at least
    one unknown concept are never modified.
    """
    refs = problem.references
    grid = [list(row) for row in problem.matrix.entries]
    issues: list[Issue] = []
    known = sorted(refs)
    for a_pos, a in enumerate(known):
        for b in known[a_pos + 1 :]:
            target = refs[a] / refs[b]
            for i, j, t in ((a, b, target), (b, a, 1.0 / target)):
                old = grid[i - 1][j - 1]
                if old is not None and abs(old - t) > KNOWN_RATIO_WARN_TOL * abs(t):
                    issues.append(
                        Issue(
                            f"({i},{j})",
                            "known-known-mismatch",
                            f"provided ratio {old:g} replaced by reference-defined {t:g}",
                        )
                    )
                grid[i - 1][j - 1] = t
    return Problem(PcMatrix(tuple(tuple(r) for r in grid)), refs), tuple(issues)


def is_reachable(problem: Problem) -> tuple[bool, tuple[int, ...]]:
    """Can every unknown concept be linked to a reference one?

    Uses the undirected graph whose edges are the pairs with at least one
    specified ratio (which is exactly the presence pattern after reciprocity
    restoration).  Returns (all reachable, sorted unreachable indices).
    """
    n = problem.n
    m = problem.matrix
    known = set(problem.references)
    seen = set(known)
    stack = list(known)
    while stack:
        i = stack.pop()
        for j in range(1, n + 1):
            if j in seen or j == i:
                continue
            if m.present(i, j) or m.present(j, i):
                seen.add(j)
                stack.append(j)
    unreachable = tuple(i for i in problem.unknown_indices if i not in seen)
    return (not unreachable, unreachable)


def preprocess(problem: Problem) -> tuple[Problem, tuple[Issue, ...]]:
    """Validation + reciprocity restoration + known-ratio fill, in that order.

    The standard entry gate for every solver.  Raises ValidationError when
    the report contains fatal issues; returns the repaired problem together
    with the accumulated warnings.
    """
    report = validate(problem)
    if not report.ok:
        raise ValidationError(report)
    restored = Problem(restore_reciprocity(problem.matrix), problem.references)
    if problem.references:
        filled, fill_issues = fill_known_ratios(restored)
    else:
        filled, fill_issues = restored, ()
    return filled, report.warnings + fill_issues
