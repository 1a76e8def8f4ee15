import logging
import math

import numpy as np
import pytest

from resonance_control.analysis.robustness import (
    TAIL_TOL,
    ScanResult,
    Zone,
    final_population,
    perturb,
    quadrant_average,
    scan_1d,
    scan_2d,
    settled_population,
    tail_change,
    zone_average,
)
from resonance_control.control.adiabatic import tracking_controls
from resonance_control.control.pulses import Perturbation, SquarePulse, ZeroPulse
from resonance_control.errors import EmptyZoneError, InvalidPerturbationError
from resonance_control.model.integrator import closed_form_population
from test_system import TRACKING_OFFSET_CEILING, check_stable_manifold


def test_identity_perturbation(tracking_pulse):
    same = perturb(tracking_pulse, Perturbation())
    assert Perturbation().is_identity
    for t in (-3.0, 0.0, 1.2):
        assert same(t) == tracking_pulse(t)


def test_static_offset_on_tracking_pulse(tracking_pulse):
    shifted = perturb(tracking_pulse, Perturbation(delta0=0.6))
    bare, _ = tracking_controls(tracking_pulse.design, 1.2)
    assert shifted(1.2).delta == pytest.approx(bare.delta + 0.6)
    assert shifted(1.2).omega == pytest.approx(bare.omega)


def test_amplitude_error_scales_omega(rabi_pulse):
    scaled = perturb(rabi_pulse, Perturbation(beta=-0.2))
    assert scaled(0.5).omega == pytest.approx(0.8 * 2 * math.pi)


def test_perturbations_compose(rabi_pulse):
    twice = perturb(perturb(rabi_pulse, Perturbation(delta0=0.1, beta=0.1)), Perturbation(delta0=0.2, beta=0.1))
    assert twice.perturbation.delta0 == pytest.approx(0.3)
    assert twice.perturbation.beta == pytest.approx(0.21)


@pytest.mark.parametrize("beta", [-1.0, -1.5])
def test_sign_flip_rejected(rabi_pulse, beta):
    with pytest.raises(InvalidPerturbationError):
        perturb(rabi_pulse, Perturbation(beta=beta))
    with pytest.raises(ValueError):
        SquarePulse(perturbation=Perturbation(beta=beta))


def test_perturb_keeps_robust_solution(robust_pulse):
    shifted = perturb(robust_pulse, Perturbation(delta0=0.3))
    assert shifted.solution is robust_pulse.solution
    assert shifted(0.5).delta == pytest.approx(robust_pulse(0.5).delta + 0.3)


def test_zero_pulse_transfers_nothing():
    assert final_population(ZeroPulse()) == 0.0


def test_rabi_final_population():
    area = 3.0
    p = final_population(SquarePulse.with_area(area))
    assert p == pytest.approx(float(closed_form_population(area / 2)), abs=1e-6)


def test_rabi_is_detuning_sensitive():
    pulse = SquarePulse.with_area(10 * math.pi)
    on_resonance = final_population(pulse)
    detuned = final_population(perturb(pulse, Perturbation(delta0=0.5)))
    assert on_resonance > detuned
    assert 0.0 <= detuned <= 1.0


def test_single_point_scan_matches_final_population(rabi_pulse):
    result = scan_1d(rabi_pulse, [0.0])
    assert result.fidelity.shape == (1, 1)
    assert result.profile[0] == final_population(rabi_pulse)


def test_scan_layout_is_row_major(rabi_pulse):
    deltas, betas = [-0.5, 0.0, 0.5], [-0.1, 0.1]
    result = scan_2d(rabi_pulse, deltas, betas)
    assert result.fidelity.shape == (2, 3)
    frame = result.to_frame()
    assert list(frame.columns) == ["delta0", "beta", "fidelity"]
    assert list(frame["delta0"]) == deltas * 2
    assert list(frame["beta"]) == [-0.1] * 3 + [0.1] * 3
    expected = final_population(perturb(rabi_pulse, Perturbation(delta0=0.5, beta=-0.1)))
    assert result.fidelity[0, 2] == expected
    assert np.all((result.fidelity >= 0.0) & (result.fidelity <= 1.0))
    assert result.meta["pulse"]["kind"] == "square"


@pytest.mark.slow
def test_scan_is_independent_of_worker_count(rabi_pulse):
    serial = scan_2d(rabi_pulse, [-0.4, 0.4], [0.0, 0.1], jobs=1)
    parallel = scan_2d(rabi_pulse, [-0.4, 0.4], [0.0, 0.1], jobs=2)
    assert np.array_equal(serial.fidelity, parallel.fidelity)


def test_scan_1d_requires_increasing_grid(rabi_pulse):
    with pytest.raises(ValueError):
        scan_1d(rabi_pulse, [0.2, 0.1])
    with pytest.raises(ValueError):
        scan_1d(rabi_pulse, [])


def _synthetic_result():
    deltas = np.array([-1.0, -0.5, 0.0, 0.5, 1.0])
    betas = np.array([-0.2, 0.0, 0.2])
    fidelity = np.add.outer(10 * betas, deltas) / 10 + 0.5
    return ScanResult(delta0_axis=deltas, beta_axis=betas, fidelity=fidelity)


def test_zone_average():
    result = _synthetic_result()
    assert zone_average(result, Zone(delta0=(-0.5, 0.5), beta=(0.0, 0.0))) == pytest.approx(0.5)
    assert zone_average(result, Zone(delta0=(-1.0, 1.0), beta=(-0.2, 0.2))) == pytest.approx(result.mean)
    with pytest.raises(EmptyZoneError):
        zone_average(result, Zone(delta0=(0.1, 0.2), beta=(0.0, 0.0)))


def test_quadrant_average_is_strict():
    result = _synthetic_result()
    upper_left = quadrant_average(result, delta0_negative=True, beta_positive=True)
    assert upper_left == pytest.approx(np.mean(result.fidelity[2, :2]))
    lower_right = quadrant_average(result, delta0_negative=False, beta_positive=False)
    assert lower_right == pytest.approx(np.mean(result.fidelity[0, 3:]))


def test_square_pulse_tail_is_saturated(rabi_pulse):
    assert tail_change(rabi_pulse) < 1e-6


def test_settled_population_continues_the_run(rabi_pulse):
    p, change = settled_population(rabi_pulse)
    assert p == final_population(rabi_pulse)
    assert change < TAIL_TOL


def test_scan_records_tail_change(rabi_pulse):
    result = scan_1d(rabi_pulse, [-0.2, 0.0, 0.2])
    assert 0.0 <= result.meta["max_tail_change"] < TAIL_TOL
    assert scan_1d(rabi_pulse, [0.0], tail_check=False).meta["max_tail_change"] is None


@pytest.mark.slow
def test_unsaturated_tracking_scan_warns(tracking_pulse, caplog):
    with caplog.at_level(logging.WARNING):
        result = scan_1d(tracking_pulse, [-0.6])
    assert result.meta["max_tail_change"] > TAIL_TOL
    assert "not saturated" in caplog.text


@pytest.mark.slow
def test_tracking_transfer_under_negative_offset(tracking_pulse):
    p = final_population(perturb(tracking_pulse, Perturbation(delta0=-0.6)))
    assert p == pytest.approx(0.7243, abs=1e-3)
    assert p <= TRACKING_OFFSET_CEILING


@pytest.mark.slow
def test_separatrix_guidance_check_passes():
    assert check_stable_manifold(1)
