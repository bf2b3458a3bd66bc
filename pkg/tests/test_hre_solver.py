import math
import random

import pytest

from hrerank import (
    IncompleteMatrixError,
    InadmissibleSolutionError,
    LinearSystem,
    PcMatrix,
    Problem,
    SingularSystemError,
    SolveFailedError,
    ValidationError,
    build_system,
    check_convergence,
    hre_rank,
    jacobi_iterate,
    preprocess,
    select_best_iterate,
    solve_linear,
    synthesize,
)

from _support import (
    assert_printed,
    assert_vector_printed,
    consistent_matrix,
    diverging_incomplete_problem,
    estimation_error_oracle,
    inadmissible_direct_problem,
    max_abs_diff,
    noisy_consistent,
    permute_problem,
    random_weights,
    singular_direct_problem,
    unpermute,
)


def _prepared(problem):
    prepared, _ = preprocess(problem)
    return prepared


class TestBuildSystem:
    def test_example1(self, example1):
        system = build_system(_prepared(example1))
        assert system.unknown_index_map == (2, 3, 4, 5)
        printed = [
            ["1", "-0.5", "-1", "-2.25"],
            ["-0.125", "1", "-0.5", "-2"],
            ["-0.062", "-0.125", "1", "-1.75"],
            ["-0.028", "-0.031", "-0.036", "1"],
        ]
        for row, expected in zip(system.coefficients, printed):
            assert_vector_printed(row, expected)
        assert_vector_printed(system.constants, ["0.125", "0.083", "0.05", "0.028"])
        # a few exact values, straight from the entries
        assert system.coefficients[0] == (1.0, -0.5, -1.0, -2.25)
        assert system.constants[0] == 0.125
        assert system.constants[1] == pytest.approx((1.0 / 3.0) / 4.0, abs=1e-15)

    def test_example2(self, example2):
        system = build_system(_prepared(example2))
        assert system.unknown_index_map == (1, 4, 5)
        printed = [
            ["1", "-0.156", "-0.125"],
            ["-0.4", "1", "-0.333"],
            ["-0.5", "-0.187", "1"],
        ]
        for row, expected in zip(system.coefficients, printed):
            assert_vector_printed(row, expected)
        assert system.constants == (1.75, 1.0, 0.8125)

    def test_example3_after_restoration(self, example3):
        system = build_system(_prepared(example3))
        third = 1.0 / 3.0
        for i in range(3):
            for j in range(3):
                expected = 1.0 if i == j else -third
                assert system.coefficients[i][j] == pytest.approx(expected, abs=1e-12)
        assert_vector_printed(system.constants, ["0.333", "0.333", "0.471"])
        assert system.constants[2] == pytest.approx(math.sqrt(2.0) / 3.0, abs=1e-12)

    def test_incomplete_matrix_refused(self, example4):
        with pytest.raises(IncompleteMatrixError):
            build_system(_prepared(example4))

    def test_known_known_gap_closed_by_fill(self):
        # the only missing pair joins two reference concepts, so the fill
        # completes the matrix and the direct route applies
        rows = (
            (1.0, 2.0, 4.0),
            (0.5, 1.0, None),
            (0.25, None, 1.0),
        )
        problem = Problem(PcMatrix(rows), {2: 1.0, 3: 0.5})
        prepared = _prepared(problem)
        assert prepared.matrix.is_complete()
        outcome = hre_rank(problem)
        assert outcome.path == "direct"


class TestSolveLinear:
    def test_example2_solution(self, example2):
        solution = solve_linear(build_system(_prepared(example2)))
        assert_vector_printed(solution, ["2.527", "2.88", "2.616"])
        # cross-checked against an independent dense solver (numpy.linalg.solve)
        expected = (2.52764745308311, 2.883378016085791, 2.6169571045576405)
        assert max_abs_diff(solution, expected) <= 1e-9

    def test_identity_system(self):
        system = LinearSystem(((1.0, 0.0), (0.0, 1.0)), (3.0, 4.0), (1, 2))
        assert solve_linear(system) == (3.0, 4.0)

    def test_dependent_rows_are_singular(self):
        system = LinearSystem(((1.0, 1.0), (1.0, 1.0)), (1.0, 2.0), (1, 2))
        with pytest.raises(SingularSystemError):
            solve_linear(system)

    def test_pivoting_handles_zero_diagonal(self):
        system = LinearSystem(((0.0, 1.0), (1.0, 0.0)), (5.0, 6.0), (1, 2))
        assert solve_linear(system) == (6.0, 5.0)

    def test_residual_bound_on_random_systems(self):
        rng = random.Random(53)
        for _ in range(100):
            k = rng.randint(1, 6)
            coeff = tuple(
                tuple(rng.uniform(-1, 1) + (3.0 if i == j else 0.0) for j in range(k))
                for i in range(k)
            )
            const = tuple(rng.uniform(-2, 2) for _ in range(k))
            x = solve_linear(LinearSystem(coeff, const, tuple(range(1, k + 1))))
            residual = max(
                abs(sum(coeff[i][j] * x[j] for j in range(k)) - const[i])
                for i in range(k)
            )
            assert residual <= 1e-9 * (1.0 + max(abs(c) for c in const))


class TestCheckConvergence:
    def test_example1_not_dominant(self, example1):
        # first row off-diagonal magnitudes: 0.5 + 1 + 2.25 = 3.75 > 1
        system = build_system(_prepared(example1))
        assert check_convergence(system) == (False, False)

    def test_example3_dominant(self, example3):
        # every row and column sums to 2/3 off the diagonal
        system = build_system(_prepared(example3))
        assert check_convergence(system) == (True, True)

    def test_example2_dominant(self, example2):
        # rows: 0.281, 0.733, 0.688; columns: 0.9, 0.344, 0.458 - all below 1
        system = build_system(_prepared(example2))
        assert check_convergence(system) == (True, True)

    def test_one_unknown_trivially_dominant(self):
        system = LinearSystem(((1.0,),), (0.5,), (2,))
        assert check_convergence(system) == (True, True)

    def test_row_and_column_can_differ(self):
        system = LinearSystem(((1.0, -0.5), (-1.5, 1.0)), (1.0, 1.0), (1, 2))
        assert check_convergence(system) == (False, False)
        system = LinearSystem(((1.0, -0.5), (-0.4, 1.0)), (1.0, 1.0), (1, 2))
        assert check_convergence(system) == (True, True)
        system = LinearSystem(((1.0, -1.2), (-0.4, 1.0)), (1.0, 1.0), (1, 2))
        row, col = check_convergence(system)
        assert not row  # first row sums to 1.2
        assert not col  # second column sums to 1.2


class TestJacobiIterate:
    def test_example1_first_step_uses_references_only(self, example1):
        run = jacobi_iterate(_prepared(example1), 1)
        assert run.iterates[0] == (1.0, 0.5, 1.0 / 3.0, 0.2, 1.0 / 9.0)

    def test_example1_converges_to_direct_solution(self, example1):
        prepared = _prepared(example1)
        run = jacobi_iterate(prepared, 1000)
        assert run.converged and not run.diverged
        direct = solve_linear(build_system(prepared))
        final = run.iterates[-1]
        assert max_abs_diff([final[i - 1] for i in prepared.unknown_indices], direct) <= 1e-8
        total = sum(final)
        assert_vector_printed(
            [v / total for v in final], ["0.368", "0.311", "0.182", "0.11", "0.028"]
        )

    def test_example4_reaches_exact_fixed_point(self, example4):
        prepared = _prepared(example4)
        run = jacobi_iterate(prepared, 1000)
        assert run.converged
        final = run.iterates[-1]
        exact = (1.0, 11.0 / 12.0, 5.0 / 12.0, 3.0 / 8.0)
        assert max_abs_diff(final, exact) <= 1e-12
        # concepts 3 and 4 only acquire estimates once a neighbour has one
        assert run.iterates[0][2] is None
        total = sum(final)
        assert_vector_printed(
            [v / total for v in final], ["0.369", "0.338", "0.154", "0.138"]
        )

    def test_consistent_problem_is_a_fixed_point(self):
        rng = random.Random(61)
        for _ in range(20):
            n = rng.randint(3, 6)
            weights = random_weights(n, rng)
            problem = Problem(consistent_matrix(weights), {1: weights[0], 2: weights[1]})
            run = jacobi_iterate(problem, 50)
            assert run.converged
            assert max_abs_diff(run.iterates[0], weights) <= 1e-12 * max(weights)

    def test_iterates_stay_positive(self):
        rng = random.Random(67)
        for _ in range(30):
            n = rng.randint(3, 6)
            matrix, weights = noisy_consistent(n, rng, noise=0.6)
            problem = Problem(matrix, {1: weights[0]})
            run = jacobi_iterate(problem, 25)
            for iterate in run.iterates:
                assert all(v is None or v > 0 for v in iterate)

    def test_divergence_is_cut_off(self):
        prepared = _prepared(diverging_incomplete_problem())
        run = jacobi_iterate(prepared, 1000)
        assert run.diverged and not run.converged
        assert len(run.iterates) < 1000

    def test_requires_references(self, example1):
        with pytest.raises(ValueError):
            jacobi_iterate(Problem(example1.matrix), 5)


class TestSelectBestIterate:
    def test_picks_minimal_error(self):
        # two concepts, m(2,1) = 2, reference weight 1: error is |mu2 - 2|
        problem = Problem(PcMatrix(((1.0, 0.5), (2.0, 1.0))), {1: 1.0})
        iterates = ((1.0, 2.4), (1.0, 2.2), (1.0, 2.3))
        assert select_best_iterate(iterates, problem).values == (1.0, 2.2)

    def test_singleton(self):
        problem = Problem(PcMatrix(((1.0, 0.5), (2.0, 1.0))), {1: 1.0})
        assert select_best_iterate(((1.0, 5.0),), problem).values == (1.0, 5.0)

    def test_tie_broken_by_earliest(self):
        problem = Problem(PcMatrix(((1.0, 0.5), (2.0, 1.0))), {1: 1.0})
        # same error above and below the fixed point
        chosen = select_best_iterate(((1.0, 2.5), (1.0, 1.5)), problem)
        assert chosen.values == (1.0, 2.5)

    def test_skips_partial_and_nonpositive(self):
        problem = Problem(PcMatrix(((1.0, 0.5), (2.0, 1.0))), {1: 1.0})
        iterates = ((1.0, None), (1.0, -1.0), (1.0, 9.0))
        assert select_best_iterate(iterates, problem).values == (1.0, 9.0)

    def test_no_admissible_iterate_fails(self):
        problem = Problem(PcMatrix(((1.0, 0.5), (2.0, 1.0))), {1: 1.0})
        with pytest.raises(SolveFailedError):
            select_best_iterate(((1.0, None),), problem)

    def test_example1_argmin_matches_oracle(self, example1):
        prepared = _prepared(example1)
        run = jacobi_iterate(prepared, 40)
        errors = [
            estimation_error_oracle(prepared, iterate)[1] for iterate in run.iterates
        ]
        best_index = errors.index(min(errors))
        chosen = select_best_iterate(run.iterates, prepared)
        assert chosen.values == run.iterates[best_index]


class TestSynthesize:
    def test_example2_interleaving(self, example2):
        raw, unit = synthesize((2.5, 2.9, 2.6), example2)
        assert raw.values == (2.5, 5.0, 7.0, 2.9, 2.6)
        assert unit.normalized
        assert sum(unit.values) == pytest.approx(1.0, abs=1e-12)

    def test_all_concepts_known(self):
        problem = Problem(consistent_matrix((2.0, 4.0)), {1: 2.0, 2: 4.0})
        raw, unit = synthesize((), problem)
        assert raw.values == (2.0, 4.0)
        assert unit.values == (1.0 / 3.0, 2.0 / 3.0)

    def test_nonpositive_value_rejected(self, example2):
        with pytest.raises(InadmissibleSolutionError):
            synthesize((2.5, -0.1, 2.6), example2)

    def test_wrong_arity_rejected(self, example2):
        with pytest.raises(ValueError):
            synthesize((1.0,), example2)


class TestHreRank:
    def test_example1_direct(self, example1):
        outcome = hre_rank(example1, normalize=True)
        assert outcome.path == "direct"
        assert outcome.determinant_ok is True
        assert outcome.convergence_ok is False  # not diagonally dominant, yet solvable
        assert outcome.admissible
        assert outcome.iterations_used == 0
        assert_vector_printed(
            outcome.weights.values, ["0.368", "0.311", "0.182", "0.11", "0.028"]
        )

    def test_example2_direct(self, example2):
        outcome = hre_rank(example2)
        assert outcome.path == "direct"
        assert outcome.convergence_ok is True
        assert_vector_printed(
            outcome.weights_raw.values, ["2.527", "5.0", "7.0", "2.88", "2.616"]
        )
        assert_vector_printed(
            outcome.weights_normalized.values,
            ["0.126", "0.249", "0.349", "0.144", "0.13"],
        )

    def test_example3_restores_then_solves(self, example3):
        outcome = hre_rank(example3, normalize=True)
        assert outcome.path == "direct"
        assert_vector_printed(outcome.weights.values, ["0.227", "0.25", "0.25", "0.273"])
        assert any("non-reciprocal-pair" in w for w in outcome.warnings)

    def test_example4_iterative(self, example4):
        outcome = hre_rank(example4, normalize=True)
        assert outcome.path == "jacobi"
        assert outcome.iterations_used == 4  # hits the exact fixed point quickly
        assert_vector_printed(outcome.weights.values, ["0.369", "0.338", "0.154", "0.138"])
        raw = outcome.weights_raw.values
        assert_printed(raw[0] / raw[2], "2.4")
        assert_printed(raw[3] / raw[0], "0.375")

    def test_all_concepts_known(self):
        matrix = consistent_matrix((2.0, 4.0, 8.0))
        outcome = hre_rank(Problem(matrix, {1: 2.0, 2: 4.0, 3: 8.0}))
        assert outcome.path == "direct"
        assert outcome.weights_raw.values == (2.0, 4.0, 8.0)
        assert outcome.error == 0.0
        assert outcome.iterations_used == 0

    def test_consistent_exact_recovery(self):
        rng = random.Random(71)
        for _ in range(30):
            n = rng.randint(3, 6)
            weights = random_weights(n, rng)
            refs = {1: weights[0]}
            outcome = hre_rank(Problem(consistent_matrix(weights), refs))
            assert outcome.path == "direct"
            assert max_abs_diff(outcome.weights_raw.values, weights) <= 1e-9 * max(weights)
            _, mean_error = estimation_error_oracle(
                Problem(consistent_matrix(weights), refs), outcome.weights_raw.values
            )
            assert mean_error <= 1e-9

    def test_singular_system_falls_back_to_min_error(self):
        outcome = hre_rank(singular_direct_problem())
        assert outcome.path == "min-error"
        assert outcome.determinant_ok is False
        assert not outcome.admissible
        # by symmetry of the circulant block the least-squares answer is 1/4 each
        assert max_abs_diff(outcome.weights_raw.values, (0.25, 0.25, 0.25, 1.0)) <= 1e-9

    def test_inadmissible_direct_falls_back_to_min_error(self):
        outcome = hre_rank(inadmissible_direct_problem())
        assert outcome.path == "min-error"
        assert outcome.determinant_ok is True
        assert not outcome.admissible
        assert any("non-positive" in w for w in outcome.warnings)

    def test_divergent_incomplete_takes_best_iterate(self):
        outcome = hre_rank(diverging_incomplete_problem())
        assert outcome.path == "best-iterate"
        assert not outcome.admissible
        assert all(v > 0 for v in outcome.weights.values)

    def test_requires_references(self, example1):
        with pytest.raises(ValueError):
            hre_rank(Problem(example1.matrix))

    def test_unreachable_problem_rejected(self):
        rows = (
            (1.0, 2.0, None),
            (0.5, 1.0, None),
            (None, None, 1.0),
        )
        with pytest.raises(ValidationError):
            hre_rank(Problem(PcMatrix(rows), {1: 1.0}))

    def test_reference_weights_survive_bit_for_bit(self):
        rng = random.Random(73)
        for _ in range(30):
            n = rng.randint(3, 6)
            matrix, weights = noisy_consistent(n, rng, noise=0.3)
            refs = {i + 1: weights[i] for i in range(rng.randint(1, n - 1))}
            outcome = hre_rank(Problem(matrix, refs))
            for idx, value in refs.items():
                assert outcome.weights_raw.values[idx - 1] == value

    def test_reference_scale_invariance(self):
        rng = random.Random(79)
        for _ in range(30):
            n = rng.randint(3, 6)
            matrix, weights = noisy_consistent(n, rng, noise=0.4)
            refs = {i + 1: weights[i] for i in range(rng.randint(1, n - 1))}
            scale = math.exp(rng.uniform(-3, 3))
            scaled_refs = {i: w * scale for i, w in refs.items()}
            base = hre_rank(Problem(matrix, refs)).weights_normalized.values
            scaled = hre_rank(Problem(matrix, scaled_refs)).weights_normalized.values
            assert max_abs_diff(base, scaled) <= 1e-10

    def test_permutation_equivariance(self):
        rng = random.Random(83)
        for _ in range(25):
            n = rng.randint(3, 6)
            matrix, weights = noisy_consistent(n, rng, noise=0.3)
            refs = {1: weights[0]}
            problem = Problem(matrix, refs)
            perm = list(range(1, n + 1))
            rng.shuffle(perm)
            base = hre_rank(problem).weights_normalized.values
            permuted = hre_rank(permute_problem(problem, perm)).weights_normalized.values
            assert max_abs_diff(base, unpermute(permuted, perm)) <= 1e-10

    def test_error_field_matches_oracle(self, example1):
        outcome = hre_rank(example1)
        prepared = _prepared(example1)
        _, expected = estimation_error_oracle(prepared, outcome.weights_raw.values)
        assert outcome.error == pytest.approx(expected, abs=1e-12)

    def test_jacobi_agrees_with_direct_when_dominant(self):
        # wide reference sets, similar weights and mild noise keep the
        # system diagonally dominant
        rng = random.Random(89)
        checked = 0
        for _ in range(150):
            n = rng.randint(4, 6)
            matrix, weights = noisy_consistent(n, rng, noise=0.1, lo=0.5, hi=2.0)
            refs = {i + 1: weights[i] for i in range(n - 2)}
            problem = Problem(matrix, refs)
            prepared = _prepared(problem)
            system = build_system(prepared)
            row, col = check_convergence(system)
            if not (row or col):
                continue
            checked += 1
            direct = solve_linear(system)
            run = jacobi_iterate(prepared, 1000)
            assert run.converged
            final = [run.iterates[-1][i - 1] for i in prepared.unknown_indices]
            assert max_abs_diff(final, direct) <= 1e-8
        assert checked >= 100
