import numpy as np
import pytest

from alloc_adapt.allocator import (
    CLOSED_LOOP,
    OPEN_LOOP,
    AllocatorConfig,
    AllocatorState,
    allocation_error,
    check_assumption1,
    compute_u,
    epsilon,
    initial_state,
    sigma_sq,
    step_reference,
    step_xi,
    update_theta,
)
from alloc_adapt.errors import ConfigError, DimensionError
from alloc_adapt.matrixcore import right_pinv, sym_eig_max
from alloc_adapt.scenario import ideal_theta

B_SIMPLE = np.array([[1.0, 1.0]])


def simple_cfg(lambda_bar=None, l=0.0, mode=OPEN_LOOP, gamma=None):
    return AllocatorConfig(
        Gamma=np.eye(1) if gamma is None else gamma,
        A_m=np.array([[0.5]]),
        B_alloc=B_SIMPLE,
        l=l,
        lambda_bar=lambda_bar,
        mode=mode,
    )


def random_instance(rng, r=None, m=None):
    """Random allocation geometry with a well-conditioned B."""
    r = int(rng.integers(1, 4)) if r is None else r
    m = int(rng.integers(r + 1, r + 4)) if m is None else m
    b = rng.uniform(-1, 1, (r, m))
    b += 0.5 * np.sign(b) + np.hstack([np.eye(r), np.zeros((r, m - r))])
    gamma = np.diag(rng.uniform(0.1, 2.0, r))
    lam = rng.uniform(0.05, 1.0, m)
    return b, gamma, lam


class TestConfig:
    def test_default_lambda_bar_is_gram_max_eig(self):
        cfg = simple_cfg()
        assert cfg.lambda_bar == pytest.approx(2.0, abs=1e-12)

    def test_rejects_asymmetric_gamma(self):
        with pytest.raises(ConfigError):
            AllocatorConfig(
                Gamma=np.array([[1.0, 0.1], [0.0, 1.0]]),
                A_m=0.5 * np.eye(2),
                B_alloc=np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]),
            )

    def test_rejects_indefinite_gamma(self):
        with pytest.raises(ConfigError):
            simple_cfg(gamma=np.array([[0.0]]))

    def test_rejects_unknown_mode(self):
        with pytest.raises(ConfigError):
            simple_cfg(mode="sideways")


class TestComputeU:
    def test_zero_parameter(self):
        state = AllocatorState(theta_v=np.zeros((1, 2)), xi=np.zeros(1), xi_m=np.zeros(1))
        assert np.array_equal(compute_u(state, np.array([3.0])), np.zeros(2))

    def test_pinv_parameter_inverts_b(self, rng):
        cfg = simple_cfg()
        state = initial_state(cfg, "pinv")
        for _ in range(10):
            v = rng.uniform(-2, 2, 1)
            u = compute_u(state, v)
            assert np.max(np.abs(B_SIMPLE @ u - v)) < 1e-12

    def test_hand_multiply(self):
        state = AllocatorState(theta_v=np.array([[1 / 3, 1 / 3]]), xi=np.zeros(1), xi_m=np.zeros(1))
        assert np.allclose(compute_u(state, np.array([1.0])), [1 / 3, 1 / 3])


class TestSigmaSq:
    def test_floor_at_one(self):
        assert sigma_sq(simple_cfg(), np.zeros(1)) == 1.0

    def test_hand_value(self):
        assert sigma_sq(simple_cfg(lambda_bar=2.0), np.array([1.0])) == pytest.approx(3.0)

    def test_admire_yaw_direction(self, admire):
        cfg = AllocatorConfig(
            Gamma=np.diag([1.0, 1.0, 0.1]), A_m=0.5 * np.eye(3), B_alloc=admire.B,
        )
        lam_max = sym_eig_max(admire.B @ admire.B.T)
        got = sigma_sq(cfg, np.array([0.0, 0.0, 1.0]))
        assert got == pytest.approx(1.0 + 0.1 * lam_max, rel=1e-12)

    def test_always_at_least_one(self, rng):
        for _ in range(50):
            b, gamma, _ = random_instance(rng)
            cfg = AllocatorConfig(Gamma=gamma, A_m=0.5 * np.eye(b.shape[0]), B_alloc=b)
            assert sigma_sq(cfg, rng.uniform(-5, 5, b.shape[0])) >= 1.0


class TestEpsilon:
    def test_perfect_allocation(self):
        cfg = simple_cfg()
        v = np.array([2.0])
        assert np.array_equal(epsilon(cfg, v, v), np.zeros(1))

    def test_hand_value(self):
        cfg = simple_cfg(lambda_bar=2.0)
        assert np.allclose(epsilon(cfg, np.array([1.0]), np.array([0.0])), [1 / 3])

    def test_zero_everything(self):
        cfg = simple_cfg()
        assert np.array_equal(epsilon(cfg, np.zeros(1), np.zeros(1)), np.zeros(1))

    def test_equivalent_to_parameter_error_form(self, rng):
        # (v - B lam u)/sigma^2 must equal -B lam (theta - theta*)^T v / sigma^2
        for _ in range(50):
            b, gamma, lam = random_instance(rng)
            r, m = b.shape
            cfg = AllocatorConfig(Gamma=gamma, A_m=0.5 * np.eye(r), B_alloc=b)
            theta = rng.uniform(-1, 1, (r, m))
            v = rng.uniform(-2, 2, r)
            u = theta.T @ v
            measured = b @ (lam * u)
            meas_form = epsilon(cfg, v, measured)
            tilde = theta - ideal_theta(b, lam)
            err_form = -(b * lam) @ (tilde.T @ v) / sigma_sq(cfg, v)
            assert np.max(np.abs(meas_form - err_form)) < 1e-12


class TestUpdateTheta:
    def test_zero_epsilon_is_fixed_point(self):
        cfg = simple_cfg()
        state = initial_state(cfg, "pinv")
        after = update_theta(cfg, state, np.array([1.0]), np.zeros(1))
        assert np.array_equal(after.theta_v, state.theta_v)
        assert after.k == state.k + 1

    def test_zero_regressor_is_fixed_point(self):
        cfg = simple_cfg()
        state = initial_state(cfg, "zero")
        after = update_theta(cfg, state, np.zeros(1), np.array([0.7]))
        assert np.array_equal(after.theta_v, state.theta_v)

    def test_hand_step(self):
        cfg = simple_cfg(lambda_bar=2.0)
        state = initial_state(cfg, "zero")
        after = update_theta(cfg, state, np.array([1.0]), np.array([1 / 3]))
        assert np.allclose(after.theta_v, [[1 / 3, 1 / 3]])

    def test_dimension_check(self):
        cfg = simple_cfg()
        state = initial_state(cfg, "zero")
        with pytest.raises(DimensionError):
            update_theta(cfg, state, np.array([1.0, 2.0]), np.zeros(1))


class TestStepXi:
    def test_satisfied_allocation_keeps_zero(self):
        cfg = simple_cfg()
        state = initial_state(cfg, "pinv")
        v = np.array([1.5])
        after = step_xi(cfg, state, v, v)
        assert np.array_equal(after.xi, np.zeros(1))

    def test_scalar_hand_value(self):
        cfg = simple_cfg()
        state = AllocatorState(theta_v=np.zeros((1, 2)), xi=np.array([2.0]), xi_m=np.zeros(1))
        after = step_xi(cfg, state, np.array([0.0]), np.array([1.0]))
        assert np.allclose(after.xi, [2.0])

    def test_forced_response(self):
        cfg = AllocatorConfig(
            Gamma=np.eye(3), A_m=np.diag([0.5, 0.5, 0.5]),
            B_alloc=np.hstack([np.eye(3), np.ones((3, 1))]),
        )
        state = AllocatorState(theta_v=np.zeros((3, 4)), xi=np.zeros(3), xi_m=np.zeros(3))
        v = np.array([1.0, 0.0, 0.0])
        after = step_xi(cfg, state, v, np.zeros(3))
        assert np.array_equal(after.xi, -v)


class TestStepReference:
    def test_l_zero_reduces_to_open_loop(self, rng):
        for mode_state in range(10):
            xi = rng.uniform(-1, 1, 1)
            xi_m = rng.uniform(-1, 1, 1)
            st = AllocatorState(theta_v=np.zeros((1, 2)), xi=xi, xi_m=xi_m)
            open_next = step_reference(simple_cfg(mode=OPEN_LOOP), st)
            closed_next = step_reference(simple_cfg(mode=CLOSED_LOOP, l=0.0), st)
            assert np.array_equal(open_next.xi_m, closed_next.xi_m)

    def test_matched_states_reduce_to_open_loop(self):
        st = AllocatorState(theta_v=np.zeros((1, 2)), xi=np.array([0.8]), xi_m=np.array([0.8]))
        open_next = step_reference(simple_cfg(mode=OPEN_LOOP), st)
        closed_next = step_reference(simple_cfg(mode=CLOSED_LOOP, l=0.3), st)
        assert np.allclose(open_next.xi_m, closed_next.xi_m, atol=1e-15)

    def test_correction_pulls_reference_toward_xi(self):
        # A_m=0.5, l=0.1, xi_m=1, xi=2: 0.5*1 + 0.1*(2-1) = 0.6, between the
        # open-loop value 0.5 and xi
        cfg = simple_cfg(mode=CLOSED_LOOP, l=0.1)
        st = AllocatorState(theta_v=np.zeros((1, 2)), xi=np.array([2.0]), xi_m=np.array([1.0]))
        after = step_reference(cfg, st)
        assert np.allclose(after.xi_m, [0.6], atol=1e-15)


class TestAllocationError:
    def test_zero_when_matched(self):
        st = AllocatorState(theta_v=np.zeros((1, 2)), xi=np.array([1.0]), xi_m=np.array([1.0]))
        assert np.array_equal(allocation_error(st), np.zeros(1))

    def test_difference(self):
        st = AllocatorState(
            theta_v=np.zeros((3, 4)), xi=np.array([1.0, 0.0, 0.0]), xi_m=np.zeros(3),
        )
        assert np.array_equal(allocation_error(st), [1.0, 0.0, 0.0])


def drive_allocator(cfg, lam, v_seq, theta_init="zero"):
    """Run the bare adaptation loop against a synthetic measurement and log
    everything needed by the recursion oracle."""
    state = initial_state(cfg, theta_init)
    thetas, errors = [], []
    for v in v_seq:
        u = compute_u(state, v)
        measured = cfg.B_alloc @ (lam * u)
        eps = epsilon(cfg, v, measured)
        thetas.append(state.theta_v.copy())
        errors.append(allocation_error(state))
        state = step_reference(cfg, state)
        state = step_xi(cfg, state, v, measured)
        state = update_theta(cfg, state, v, eps)
    return np.array(thetas), np.array(errors), state


class TestErrorRecursion:
    @pytest.mark.parametrize("mode,l", [(OPEN_LOOP, 0.0), (CLOSED_LOOP, 0.1)])
    def test_simulated_error_matches_closed_form(self, rng, mode, l):
        # e(k+1) = A e(k) + B lam (theta - theta*)^T v(k), with A the
        # reference dynamics (shifted by -l*I in closed loop)
        b = np.array([[1.0, 0.6]])
        lam = np.array([0.7, 0.9])
        cfg = AllocatorConfig(Gamma=np.eye(1), A_m=np.array([[0.5]]), B_alloc=b, l=l, mode=mode)
        v_seq = rng.uniform(-1, 1, (200, 1))
        thetas, errors, _ = drive_allocator(cfg, lam, v_seq)
        a_eff = cfg.A_m - (l if mode == CLOSED_LOOP else 0.0) * np.eye(1)
        theta_star = ideal_theta(b, lam)
        e_rec = np.zeros(1)
        for k in range(200):
            assert np.max(np.abs(errors[k] - e_rec)) < 1e-10
            tilde = thetas[k] - theta_star
            e_rec = a_eff @ e_rec + (b * lam) @ (tilde.T @ v_seq[k])

    @pytest.mark.parametrize("mode,l,rate", [(OPEN_LOOP, 0.0, 0.5), (CLOSED_LOOP, 0.1, 0.4)])
    def test_perfect_measurement_decays_geometrically(self, mode, l, rate):
        # measured == v freezes theta and contracts e at the reference rate
        # (A_m open loop, A_m - l*I closed loop)
        cfg = simple_cfg(mode=mode, l=l)
        state = AllocatorState(theta_v=np.zeros((1, 2)), xi=np.array([1.0]), xi_m=np.zeros(1))
        v = np.array([0.5])
        e = allocation_error(state)
        for _ in range(30):
            eps = epsilon(cfg, v, v)
            state_next = step_reference(cfg, state)
            state_next = step_xi(cfg, state_next, v, v)
            state = update_theta(cfg, state_next, v, eps)
            e_next = allocation_error(state)
            assert np.allclose(e_next, rate * e, atol=1e-14)
            e = e_next


class TestLambdaBarBound:
    def test_healthy_gram_dominates_degraded(self, rng):
        # effectiveness entries <= 1 keep lambda_max(B lam B^T) below the
        # healthy-case default bound
        for _ in range(100):
            b, _, lam = random_instance(rng)
            healthy = sym_eig_max(b @ b.T)
            degraded = sym_eig_max(b @ np.diag(lam) @ b.T)
            assert degraded <= healthy + 1e-10

    def test_monotone_in_each_actuator(self, rng):
        for _ in range(50):
            b, _, lam = random_instance(rng)
            j = int(rng.integers(0, b.shape[1]))
            bumped = lam.copy()
            bumped[j] = min(1.0, bumped[j] + 0.3)
            low = sym_eig_max(b @ np.diag(lam) @ b.T)
            high = sym_eig_max(b @ np.diag(bumped) @ b.T)
            assert high >= low - 1e-10


class TestLyapunovDecrease:
    def test_single_update_satisfies_strict_bound(self, rng):
        # V(k+1) - V(k) < -0.999/sigma^2 * v^T tilde lam B^T B lam tilde^T v
        # whenever tilde^T v != 0
        from alloc_adapt.scenario import lyapunov_value

        checked = 0
        for _ in range(200):
            b, gamma, lam = random_instance(rng)
            r, m = b.shape
            cfg = AllocatorConfig(Gamma=gamma, A_m=0.5 * np.eye(r), B_alloc=b)
            theta = ideal_theta(b, lam) + rng.uniform(-1, 1, (r, m))
            state = AllocatorState(theta_v=theta, xi=np.zeros(r), xi_m=np.zeros(r))
            v = rng.uniform(-2, 2, r)
            u = compute_u(state, v)
            measured = b @ (lam * u)
            eps = epsilon(cfg, v, measured)
            after = update_theta(cfg, state, v, eps)

            tilde = theta - ideal_theta(b, lam)
            w = tilde.T @ v
            if np.linalg.norm(w) < 1e-9:
                continue
            checked += 1
            blam = b * lam
            quad = float((blam @ w) @ (blam @ w))
            v_before = lyapunov_value(theta, gamma, b, lam)
            v_after = lyapunov_value(after.theta_v, gamma, b, lam)
            bound = -0.999 * quad / sigma_sq(cfg, v)
            assert v_after - v_before < bound + 1e-15
            assert v_after - v_before <= 0.0
        assert checked > 150


class TestAssumptionChecker:
    def test_benchmark_parameters_pass(self):
        cfg = AllocatorConfig(
            Gamma=np.diag([1.0, 1.0, 0.1]), A_m=np.diag([0.5, 0.5, 0.5]),
            B_alloc=np.hstack([np.eye(3), np.ones((3, 1))]), l=0.1, mode=CLOSED_LOOP,
        )
        report = check_assumption1(cfg)
        assert report.ok
        radii = {c.name: c.radius for c in report.conditions}
        assert radii["A_m"] == pytest.approx(0.5, abs=1e-12)
        assert radii["A_m + l*I"] == pytest.approx(0.6, abs=1e-12)
        assert radii["A_m - l*I"] == pytest.approx(0.4, abs=1e-12)

    def test_unstable_reference_fails(self):
        cfg = AllocatorConfig(
            Gamma=np.eye(1), A_m=np.array([[1.5]]), B_alloc=B_SIMPLE, mode=OPEN_LOOP,
        )
        report = check_assumption1(cfg)
        assert not report.ok
        assert report.conditions[0].status == "fail"

    def test_shifted_dynamics_fail_with_named_condition(self):
        cfg = AllocatorConfig(
            Gamma=np.eye(1), A_m=np.array([[0.95]]), B_alloc=B_SIMPLE, l=0.1, mode=CLOSED_LOOP,
        )
        report = check_assumption1(cfg)
        assert not report.ok
        by_name = {c.name: c.status for c in report.conditions}
        assert by_name["A_m"] == "pass"
        assert by_name["A_m + l*I"] == "fail"  # rho = 1.05
        assert by_name["A_m - l*I"] == "pass"

    def test_unit_circle_is_flagged_for_review(self):
        cfg = AllocatorConfig(
            Gamma=np.eye(1), A_m=np.array([[1.0]]), B_alloc=B_SIMPLE, mode=OPEN_LOOP,
        )
        report = check_assumption1(cfg)
        assert report.conditions[0].status == "boundary"
        assert not report.ok

    def test_open_loop_checks_only_reference_matrix(self):
        report = check_assumption1(simple_cfg(mode=OPEN_LOOP, l=0.4))
        assert [c.name for c in report.conditions] == ["A_m"]


class TestBoundedness:
    def test_random_drive_stays_finite(self, rng):
        b, gamma, lam = random_instance(rng, r=2, m=4)
        cfg = AllocatorConfig(Gamma=gamma, A_m=0.4 * np.eye(2), B_alloc=b, l=0.1, mode=CLOSED_LOOP)
        v_seq = rng.uniform(-3, 3, (500, 2))
        thetas, errors, state = drive_allocator(cfg, lam, v_seq, theta_init="pinv")
        assert np.all(np.isfinite(thetas))
        assert np.all(np.isfinite(errors))
        assert np.max(np.abs(thetas)) < 1e3
        assert np.max(np.abs(state.xi)) < 1e3
