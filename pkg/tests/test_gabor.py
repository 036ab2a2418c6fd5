"""Windowed-Fourier analysis on the line: transform, reconstruction,
displacement covariance, and dispersion diagnostics."""

import warnings

import numpy as np
import pytest

from weylgabor.gabor import (
    Probe,
    SampledSignal,
    SlowDecayWarning,
    SupportCoverageWarning,
    covariance_residual,
    default_tf_grid,
    default_time_grid,
    displace,
    gabor_reconstruct,
    gabor_transform,
    gaussian_probe,
    make_test_signal,
    uncertainty_product,
)
from weylgabor.numerics import Grid1D, PhaseSpaceGrid


# ---------------------------------------------------------------------------
# signals and probes
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("name", ["gaussian", "two_bump", "modulated", "chirp_tones"])
def test_named_signals_have_unit_energy(name):
    s = make_test_signal(name)
    assert abs(s.energy - 1.0) < 1e-12


def test_unknown_signal_name():
    with pytest.raises(ValueError):
        make_test_signal("sawtooth")


@pytest.mark.parametrize("width", [0.2, 1.0, 5.0])
def test_gaussian_probe_unit_norm(width):
    assert abs(gaussian_probe(width=width).signal.norm - 1.0) < 1e-12


def test_probe_rejects_unnormalized_window():
    grid = default_time_grid()
    bad = SampledSignal(grid, 2.0 * make_test_signal("gaussian", grid).values)
    with pytest.raises(ValueError):
        Probe(bad)
    with pytest.raises(ValueError):
        gaussian_probe(width=-1.0)


def test_signal_shape_validation():
    with pytest.raises(ValueError):
        SampledSignal(default_time_grid(), np.zeros(7))
    with pytest.raises(ValueError):
        SampledSignal(default_time_grid(), np.zeros(1024)).normalized()


# ---------------------------------------------------------------------------
# displacement operator
# ---------------------------------------------------------------------------

def test_displace_at_origin_is_identity():
    s = make_test_signal("gaussian")
    np.testing.assert_array_equal(displace(0.0, 0.0, s).values, s.values)


def test_displaced_gaussian_matches_closed_form():
    s = make_test_signal("gaussian")
    t = s.grid.points
    out = displace(2.0, 1.0, s)
    target = np.exp(2j * (t - 0.5)) * np.pi ** -0.25 * np.exp(-(t - 1.0) ** 2 / 2.0)
    assert np.abs(out.values - target).max() < 1e-10


def test_displace_is_unitary():
    s = make_test_signal("two_bump")
    rng = np.random.default_rng(21)
    for _ in range(20):
        omega, b = rng.uniform(-4.0, 4.0, size=2)
        assert abs(displace(omega, b, s).norm - s.norm) < 1e-10


def test_displacement_composition_phase():
    s = make_test_signal("gaussian")
    omega1, b1 = 1.3, -0.8
    omega2, b2 = -2.1, 0.6
    lhs = displace(omega1, b1, displace(omega2, b2, s)).values
    phase = np.exp(0.5j * (omega1 * b2 - omega2 * b1))
    rhs = phase * displace(omega1 + omega2, b1 + b2, s).values
    assert np.abs(lhs - rhs).max() < 1e-9


# ---------------------------------------------------------------------------
# transform and reconstruction
# ---------------------------------------------------------------------------

def test_transform_of_zero_signal_is_zero():
    grid = default_time_grid()
    zero = SampledSignal(grid, np.zeros(grid.count))
    coeffs = gabor_transform(gaussian_probe(grid), zero)
    assert np.abs(coeffs.values).max() == 0.0


def test_transform_requires_shared_time_grid():
    probe = gaussian_probe(Grid1D.regular(-20.0, 20.0, 512))
    s = make_test_signal("gaussian", Grid1D.regular(-20.0, 20.0, 1024))
    with pytest.raises(ValueError):
        gabor_transform(probe, s)


def test_gaussian_self_transform_closed_form():
    s = make_test_signal("gaussian")
    coeffs = gabor_transform(gaussian_probe(), s)
    omega, b = coeffs.grid.meshes()
    target = np.exp(-0.5j * omega * b) * np.exp(-(b ** 2 + omega ** 2) / 4.0)
    assert np.abs(coeffs.values - target).max() < 1e-9


@pytest.mark.parametrize("name", ["gaussian", "two_bump", "modulated"])
def test_parseval_on_default_grids(name):
    s = make_test_signal(name)
    coeffs = gabor_transform(gaussian_probe(), s)
    assert abs(coeffs.energy - s.energy) < 1e-6 * s.energy


@pytest.mark.parametrize("name,bound", [
    ("gaussian", 1e-5),
    ("two_bump", 1e-4),
    ("modulated", 1e-5),
])
def test_round_trip_reconstruction(name, bound):
    s = make_test_signal(name)
    probe = gaussian_probe()
    recon = gabor_reconstruct(probe, gabor_transform(probe, s))
    err = np.sqrt(s.grid.step * np.sum(np.abs(recon.values - s.values) ** 2))
    assert err / s.norm < bound


def test_reconstruct_zero_coefficients():
    probe = gaussian_probe()
    coeffs = gabor_transform(probe, SampledSignal(probe.signal.grid,
                                                  np.zeros(probe.signal.grid.count)))
    assert gabor_reconstruct(probe, coeffs).norm == 0.0


def test_round_trip_error_shrinks_as_ranges_double():
    # fixed time sampling, phase-space window doubled twice
    tg = default_time_grid()
    s = make_test_signal("two_bump", tg)
    probe = gaussian_probe(tg)
    errors = []
    for half, n in ((4.0, 64), (8.0, 128), (16.0, 256)):
        grid = PhaseSpaceGrid.square(-half, half, n)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", SupportCoverageWarning)
            recon = gabor_reconstruct(probe, gabor_transform(probe, s, grid))
        errors.append(np.sqrt(tg.step * np.sum(np.abs(recon.values - s.values) ** 2)))
    assert errors[0] > errors[1] > errors[2]
    assert errors[2] < 1e-5


def test_coverage_warning_on_narrow_grid():
    s = make_test_signal("two_bump")
    probe = gaussian_probe()
    small = PhaseSpaceGrid.square(-2.0, 2.0, 32)
    with pytest.warns(SupportCoverageWarning):
        gabor_reconstruct(probe, gabor_transform(probe, s, small))


# ---------------------------------------------------------------------------
# covariance
# ---------------------------------------------------------------------------

def test_covariance_residual_vanishes_at_origin():
    s = make_test_signal("gaussian")
    assert covariance_residual(gaussian_probe(), s, 0.0, 0.0) < 1e-12


@pytest.mark.parametrize("omega0,b0", [(1.0, 1.0), (2.0, -0.5)])
def test_covariance_residual_small_for_resolved_shifts(omega0, b0):
    s = make_test_signal("gaussian")
    probe = gaussian_probe()
    coeffs = gabor_transform(probe, s)
    bound = 1e-6 * np.abs(coeffs.values).max()
    assert covariance_residual(probe, s, omega0, b0) < bound


def test_covariance_phase_sign_is_negative():
    # the transform of the displaced signal picks up exp(-1j*(omega-omega0/2)*b0),
    # checked at a lattice node where the shifted reference is an exact roll
    s = make_test_signal("gaussian")
    probe = gaussian_probe()
    grid = default_tf_grid()
    omega0, b0 = 2.0, 1.0
    base = gabor_transform(probe, s, grid).values
    moved = gabor_transform(probe, displace(omega0, b0, s), grid).values
    i = int(round((3.0 - grid.omega_axis.start) / grid.omega_axis.step))
    j = int(round((1.5 - grid.b_axis.start) / grid.b_axis.step))
    di = int(round(omega0 / grid.omega_axis.step))
    dj = int(round(b0 / grid.b_axis.step))
    ratio = moved[i, j] / base[i - di, j - dj]
    omega = grid.omega_axis.points[i]
    predicted = np.exp(-1j * (omega - 0.5 * omega0) * b0)
    flipped = np.exp(1j * (omega - 0.5 * omega0) * b0)
    assert abs(ratio - predicted) < 1e-9
    assert abs(ratio - flipped) > 1.0


# ---------------------------------------------------------------------------
# dispersion product
# ---------------------------------------------------------------------------

def test_gaussian_saturates_uncertainty_bound():
    assert abs(uncertainty_product(make_test_signal("gaussian")) - 0.5) < 1e-6


@pytest.mark.parametrize("width", [0.2, 5.0])
def test_gaussian_any_width_saturates_bound(width):
    assert abs(uncertainty_product(gaussian_probe(width=width).signal) - 0.5) < 1e-6


def test_first_hermite_mode_dispersion():
    grid = default_time_grid()
    t = grid.points
    s = SampledSignal(grid, t * np.exp(-t ** 2 / 2.0)).normalized()
    assert abs(uncertainty_product(s) - 1.5) < 1e-5


@pytest.mark.parametrize("name", ["gaussian", "two_bump", "modulated", "chirp_tones"])
def test_uncertainty_lower_bound(name):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SlowDecayWarning)
        value = uncertainty_product(make_test_signal(name))
    assert value >= 0.5 - 1e-6


def test_slow_decay_warning():
    grid = Grid1D.regular(-20.0, 20.0, 256)
    flat = SampledSignal(grid, np.ones(256)).normalized()
    with pytest.warns(SlowDecayWarning):
        uncertainty_product(flat)
