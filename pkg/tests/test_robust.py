import math

import numpy as np
import pytest

from resonance_control.control.robust import (
    RobustDesign,
    RobustPulse,
    detuning_discrepancy,
    gamma_expansion,
    prescribed_angles,
    shape_fields,
    solve_alpha,
    theta_profile,
    uncorrected_detuning,
)
from resonance_control.errors import DesignInvalidError
from resonance_control.model.core import AmplitudeState, amplitude_field, amplitudes_to_angles, population
from resonance_control.model.integrator import integrate


def test_theta_profile():
    design = RobustDesign(epsilon=0.03)
    theta, theta_dot = theta_profile(design, 0.0)
    assert theta == pytest.approx(0.5 * math.pi * 0.97)
    assert theta_dot == pytest.approx(0.5 * math.pi * 0.97 * 2 / math.sqrt(math.pi))
    assert theta_profile(design, 10.0)[0] == pytest.approx(math.pi * 0.97, abs=1e-15)
    assert theta_profile(design, -10.0)[0] == pytest.approx(0.0, abs=1e-40)
    assert all(theta_profile(design, t)[1] >= 0.0 for t in np.linspace(-30, 30, 61))
    assert design.target_population == pytest.approx(math.cos(0.015 * math.pi) ** 2)
    assert design.target_population == pytest.approx(0.99778, abs=1e-5)


def test_gamma_expansion():
    bare = RobustDesign(coefficients=(0.0,))
    assert gamma_expansion(bare, 1.1) == pytest.approx((1.1, 1.0))
    design = RobustDesign(coefficients=(-0.5,))
    gamma, slope = gamma_expansion(design, math.pi / 2)
    assert gamma == pytest.approx(math.pi / 2 - 0.5)
    assert slope == pytest.approx(1.0, abs=1e-15)
    assert gamma_expansion(RobustDesign(coefficients=(0.3, -1.2, 2.0)), 0.0)[0] == 0.0


def test_gamma_expansion_vectorized():
    design = RobustDesign(coefficients=(0.3, -0.2))
    theta = np.linspace(0.0, 3.0, 7)
    gamma, slope = gamma_expansion(design, theta)
    assert gamma.shape == slope.shape == (7,)
    assert np.allclose(gamma, theta + 0.3 * np.sin(theta) - 0.2 * np.sin(2 * theta))
    assert np.allclose(slope, 1 + 0.3 * np.cos(theta) - 0.4 * np.cos(2 * theta))


def test_bare_expansion_is_valid():
    solution = solve_alpha(RobustDesign(coefficients=(0.0,)))
    assert solution.valid
    assert solution.theta_grid[0] == 0.0
    assert solution.theta_grid[-1] == pytest.approx(math.pi * 0.97)
    assert np.all(np.diff(solution.theta_grid) > 0)
    assert np.all((solution.alpha_of_theta > 0) & (solution.alpha_of_theta < math.pi))


def test_series_start_is_converged():
    design = RobustDesign(coefficients=(-0.5,))
    coarse = solve_alpha(design, theta_min=1e-6)
    fine = solve_alpha(design, theta_min=5e-7)
    assert abs(coarse.alpha_of_theta[-1] - fine.alpha_of_theta[-1]) < 1e-8


def test_series_start_slope():
    design = RobustDesign(coefficients=(0.4, -0.1))
    solution = solve_alpha(design)
    theta = 1e-3
    expected = math.pi / 2 - 1.5 * design.slope_at_origin * theta
    assert solution.alpha(theta) == pytest.approx(expected, abs=1e-5)


def test_large_coefficient_leaves_band():
    design = RobustDesign(coefficients=(5.0,), alpha_margin=0.3)
    solution = solve_alpha(design)
    assert not solution.valid
    assert solution.exit_theta is not None and 0.0 < solution.exit_theta < design.theta_max
    with pytest.raises(DesignInvalidError) as info:
        shape_fields(design, solution, 0.0)
    assert info.value.theta == solution.exit_theta
    assert "theta" in str(info.value)


def test_minus_branch_is_invalid_immediately():
    design = RobustDesign(branch="minus")
    solution = solve_alpha(design)
    assert not solution.valid
    with pytest.raises(DesignInvalidError):
        solution.require_valid()


def test_shaped_omega_is_positive(robust_pulse):
    for t in np.linspace(-4.0, 4.0, 81):
        assert robust_pulse(t).omega > 0.0


def test_fields_switch_off_in_tails(robust_pulse):
    for t in (-6.0, 6.0):
        ctrl = robust_pulse(t)
        assert ctrl.omega < 1e-12
        assert abs(ctrl.delta) < 1e-12


def test_consistent_detuning_carries_theta_rate(robust_pulse):
    design, solution = robust_pulse.design, robust_pulse.solution
    times = np.linspace(-2.0, 2.0, 21)
    gap = detuning_discrepancy(design, solution, times)
    for t, value in zip(times, gap):
        theta, theta_dot = theta_profile(design, t)
        alpha = solution.alpha(theta)
        expected = 1.5 / math.tan(alpha) * math.tan(theta / 2) * (1.0 - theta_dot)
        assert value == pytest.approx(expected, abs=1e-10)
    assert uncorrected_detuning(design, solution, 0.0) != shape_fields(design, solution, 0.0).delta


@pytest.mark.slow
def test_forward_dynamics_reproduce_design(robust_pulse):
    design, solution = robust_pulse.design, robust_pulse.solution
    times = np.linspace(-4.0, 4.0, 161)
    traj = integrate(amplitude_field, AmplitudeState.ground(), robust_pulse, (-4.0, 4.0), sample_times=times)
    thetas = np.array([amplitudes_to_angles(s).theta for s in traj.states])
    prescribed = np.array([prescribed_angles(design, solution, t).theta for t in times])
    assert np.max(np.abs(thetas - prescribed)) < 1e-5
    assert population(traj.final_state) == pytest.approx(design.target_population, abs=1e-3)
    assert population(traj.final_state) <= design.target_population + 1e-6


@pytest.mark.slow
def test_forward_dynamics_reproduce_phases(robust_pulse):
    design, solution = robust_pulse.design, robust_pulse.solution
    # from t = -2T on theta is far enough from the pole for alpha and gamma to be defined
    times = np.linspace(-2.0, 4.0, 121)
    traj = integrate(amplitude_field, AmplitudeState.ground(), robust_pulse, (-4.0, 4.0), sample_times=times)
    actual = np.array([amplitudes_to_angles(s) for s in traj.states])
    prescribed = np.array([prescribed_angles(design, solution, t) for t in times])
    wrapped = np.angle(np.exp(1j * (actual[:, 1:] - prescribed[:, 1:])))
    assert np.max(np.abs(wrapped[:, 0])) < 1e-5
    assert np.max(np.abs(wrapped[:, 1])) < 1e-5


def test_pulse_keeps_solution_across_copies(robust_pulse):
    copy = robust_pulse.model_copy()
    assert copy.solution is robust_pulse.solution
    assert robust_pulse.default_span() == (-4.0, 4.0)
    assert robust_pulse.describe()["kind"] == "robust"


def test_design_validation():
    with pytest.raises(ValueError):
        RobustDesign(epsilon=0.0)
    with pytest.raises(ValueError):
        RobustDesign(coefficients=())
