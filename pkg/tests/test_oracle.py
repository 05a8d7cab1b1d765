import numpy as np
import pytest

from paretodescent import (
    GridSpec,
    MultiObjective,
    brute_force_direction,
    check_gradient_characterization,
    check_sigma_certificate,
    check_weak_pareto_local,
    finite_diff_jacobian,
    get_problem,
    kkt_direction,
    sample_quasiconvex,
    solve_exact,
    sufficient_sigma_condition,
)


def sign_flip_pair():
    """F(t) = (t^2, -t^2): the second criterion breaks quasi-convexity."""
    return MultiObjective(n=1, m=2,
                          f=lambda x: np.array([x[0] ** 2, -x[0] ** 2]),
                          jac=lambda x: np.array([[2 * x[0]], [-2 * x[0]]]))


class TestBruteForceDirection:
    def test_identity_jacobian_matches_the_analytic_solution(self):
        w, v, alpha = brute_force_direction(np.eye(2))
        assert abs(alpha + 0.25) <= 1e-5
        assert np.linalg.norm(v - np.array([-0.5, -0.5])) <= 1e-3
        np.testing.assert_allclose(w, [0.5, 0.5], atol=1e-3)

    def test_single_criterion_is_exact(self):
        w, v, alpha = brute_force_direction(np.array([[3.0, 4.0]]))
        assert np.array_equal(w, [1.0])
        assert np.array_equal(v, [-3.0, -4.0])
        assert alpha == -12.5

    def test_duplicate_rows_pin_the_direction_not_the_weights(self):
        w, v, alpha = brute_force_direction(np.array([[1.0, 0.0], [1.0, 0.0]]))
        np.testing.assert_allclose(v, [-1.0, 0.0], atol=1e-12)
        assert abs(alpha + 0.5) <= 1e-10

    def test_too_many_criteria_rejected(self):
        with pytest.raises(ValueError):
            brute_force_direction(np.ones((5, 2)))

    def test_agrees_with_support_enumeration(self):
        rng = np.random.default_rng(99)
        for _ in range(100):
            m = int(rng.integers(2, 4))
            n = int(rng.integers(1, 6))
            J = rng.uniform(-10, 10, size=(m, n))
            _, _, a_grid = brute_force_direction(J)
            _, _, a_kkt = kkt_direction(J)
            assert abs(a_grid - a_kkt) <= 1e-4 * max(1.0, float(np.sum(J * J)))
            assert a_grid <= a_kkt + 1e-12  # grid value never beats the true optimum


class TestFiniteDifferences:
    def test_scalar_quadratic(self):
        p = get_problem("scalar_quad").problem
        np.testing.assert_allclose(finite_diff_jacobian(p, [3.0], 1e-5), [[3.0]], atol=1e-9)

    def test_cubic_pair(self):
        p = get_problem("paper_cubic").problem
        np.testing.assert_allclose(finite_diff_jacobian(p, [2.0], 1e-5),
                                   [[1.0], [-4.0]], atol=1e-8)

    def test_quad_pair(self):
        p = get_problem("quad_pair").problem
        np.testing.assert_allclose(finite_diff_jacobian(p, [2.0, 2.0], 1e-5),
                                   [[2.0, 2.0], [1.0, 2.0]], atol=1e-8)

    def test_nonpositive_step_rejected(self):
        p = get_problem("scalar_quad").problem
        with pytest.raises(ValueError):
            finite_diff_jacobian(p, [1.0], -1e-5)


class TestQuasiconvexSampler:
    def test_cubic_pair_has_no_violations(self):
        assert sample_quasiconvex(get_problem("paper_cubic").problem, 1000, 42).ok

    def test_sign_flip_pair_is_caught(self):
        report = sample_quasiconvex(sign_flip_pair(), 1000, 42, box=(-1.0, 1.0))
        assert report.violations > 0
        assert report.max_violation > 1e-10

    def test_convex_problem_has_no_violations(self):
        assert sample_quasiconvex(get_problem("quad_pair").problem, 1000, 7).ok

    def test_deterministic_for_a_seed(self):
        a = sample_quasiconvex(sign_flip_pair(), 500, 11, box=(-1.0, 1.0))
        b = sample_quasiconvex(sign_flip_pair(), 500, 11, box=(-1.0, 1.0))
        assert a.violations == b.violations
        assert a.max_violation == b.max_violation


class TestGradientCharacterization:
    def test_cubic_pair_is_clean(self):
        assert check_gradient_characterization(get_problem("paper_cubic").problem, 1000, 1).ok

    def test_quad_pair_triggers_the_premise_and_is_clean(self):
        report = check_gradient_characterization(get_problem("quad_pair").problem, 1000, 2)
        assert report.checked > 0
        assert report.ok

    def test_double_well_violates_the_characterization(self):
        # moving off the shallow well toward the deep one lowers both criteria
        # while the first slope points the other way
        desc = get_problem("nonconvex_demo")
        report = check_gradient_characterization(desc.problem, 2000, 3, desc.box)
        assert report.checked > 0
        assert report.violations > 0


class TestWeakParetoSampler:
    def test_segment_point_is_locally_undominated(self):
        p = get_problem("quad_pair").problem
        assert check_weak_pareto_local(p, [0.5, 0.0], 0.5, 10_000, 123)

    def test_noncritical_point_is_dominated(self):
        p = get_problem("quad_pair").problem
        assert not check_weak_pareto_local(p, [2.0, 2.0], 0.5, 10_000, 123)

    def test_cubic_pair_points_are_undominated(self):
        p = get_problem("paper_cubic").problem
        for i, t in enumerate((-7.3, 0.0, 2.5)):
            assert check_weak_pareto_local(p, [t], 0.5, 2000, 77 + i)


class TestSufficientCondition:
    def test_exact_direction_satisfies_it_for_positive_sigma(self):
        # at sigma = 0 the inequality is tight at the optimum, so the
        # gap-level inexactness of the solve would flip it; any sigma > 0
        # leaves sigma/2 * ||v||^2 of room
        rng = np.random.default_rng(21)
        for sigma in (0.1, 0.4, 0.9):
            for _ in range(50):
                J = rng.uniform(-2, 2, size=(2, 3))
                res = solve_exact(J)
                if res.critical:
                    continue
                assert sufficient_sigma_condition(J, res.v, sigma)

    def test_implies_the_certificate_against_an_exact_oracle(self):
        rng = np.random.default_rng(23)
        tested = 0
        for _ in range(400):
            m = int(rng.integers(2, 4))
            n = int(rng.integers(1, 6))
            J = rng.uniform(-2, 2, size=(m, n))
            w = rng.dirichlet(np.ones(m))
            v = -(J.T @ w)
            sigma = float(rng.uniform(0.0, 0.99))
            if not sufficient_sigma_condition(J, v, sigma):
                continue
            _, _, alpha = kkt_direction(J)
            assert check_sigma_certificate(J, v, min(alpha, 0.0), sigma)
            tested += 1
        assert tested > 30


def test_grid_spec_validation():
    with pytest.raises(ValueError):
        GridSpec(resolution=0.0)
    with pytest.raises(ValueError):
        GridSpec(refinement_rounds=-1)
    assert GridSpec().resolve(2) == 1e-3
    assert GridSpec().resolve(3) == 1e-2
