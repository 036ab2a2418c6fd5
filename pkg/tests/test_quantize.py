"""Quantization of phase-space densities: overlap kernels, smoothed
portraits, projector smearing, and the operator-valued weight sum."""

import warnings

import numpy as np
import pytest

from weylgabor.gabor import SampledSignal, displace
from weylgabor.numerics import EdgeEnergyWarning, Grid1D, PhaseSpaceGrid
from weylgabor.quantize import (
    BandCoverageWarning,
    Distribution,
    OperatorKernel,
    density_diagnostics,
    gaussian_distribution,
    gaussian_probe_signal,
    overlap_kernel,
    overlap_kernel_quadrature,
    point_mass_distribution,
    portrait,
    quantize_to_kernel,
    weyl_operator_from_weight,
)

TF_GRID = PhaseSpaceGrid.square(-8.0, 8.0, 128)
TIME_GRID = Grid1D.regular(-10.0, 10.0, 256)


def _overlap_formula(a, r, omega, b):
    return (2.0 * np.sqrt(r * a) / (r + a)
            * np.exp(-(r * a / (r + a)) * omega ** 2 - b ** 2 / (r + a)))


# ---------------------------------------------------------------------------
# containers
# ---------------------------------------------------------------------------

def test_distribution_rejects_negative_values():
    values = np.ones(TF_GRID.shape)
    values[3, 4] = -1.0
    with pytest.raises(ValueError):
        Distribution(TF_GRID, values)


def test_distribution_normalization():
    d = Distribution(TF_GRID, np.ones(TF_GRID.shape)).normalized()
    assert abs(d.mass - 1.0) < 1e-12
    with pytest.raises(ValueError):
        Distribution(TF_GRID, np.zeros(TF_GRID.shape)).normalized()


def test_distribution_shape_check():
    with pytest.raises(ValueError):
        Distribution(TF_GRID, np.ones(17))


def test_point_mass_has_unit_mass_on_one_cell():
    d = point_mass_distribution(TF_GRID, 1.5, -0.5)
    assert abs(d.mass - 1.0) < 1e-12
    assert np.count_nonzero(d.values) == 1


def test_point_mass_outside_grid():
    with pytest.raises(ValueError):
        point_mass_distribution(TF_GRID, 9.0, 0.0)


def test_gaussian_distribution_mass_and_validation():
    d = gaussian_distribution(TF_GRID, 1.0, 1.5)
    assert abs(d.mass - 1.0) < 1e-6
    with pytest.raises(ValueError):
        gaussian_distribution(TF_GRID, 0.0, 1.0)


# ---------------------------------------------------------------------------
# two-probe overlap density
# ---------------------------------------------------------------------------

def test_overlap_equal_widths_is_standard_gaussian():
    k = overlap_kernel(1.0, 1.0, TF_GRID)
    omega, b = TF_GRID.meshes()
    np.testing.assert_allclose(k.values, np.exp(-(omega ** 2 + b ** 2) / 2.0),
                               rtol=1e-14)


@pytest.mark.parametrize("a,r", [(1.0, 1.0), (5.0, 0.2), (2.0, 2.0), (5.0, 10.0)])
def test_overlap_unit_mass(a, r):
    grid = PhaseSpaceGrid.square(-16.0, 16.0, 256)
    assert abs(overlap_kernel(a, r, grid).mass - 1.0) < 1e-8


def test_overlap_point_symmetry():
    v = overlap_kernel(5.0, 0.2, TF_GRID).values
    core = v[1:, 1:]
    np.testing.assert_array_equal(core, core[::-1, ::-1])


@pytest.mark.parametrize("a,r", [(1.0, 1.0), (5.0, 0.2), (2.0, 2.0), (5.0, 10.0)])
def test_overlap_matches_quadrature(a, r):
    grid = Grid1D.regular(-40.0, 40.0, 2048)
    psi_a = gaussian_probe_signal(a, grid)
    psi_r = gaussian_probe_signal(r, grid)
    for omega, b in [(0.0, 0.0), (0.5, 0.3), (1.0, -1.0), (2.0, 0.7)]:
        quad = overlap_kernel_quadrature(psi_a, psi_r, omega, b)
        assert abs(quad - _overlap_formula(a, r, omega, b)) < 1e-8


def test_overlap_quadrature_at_origin_equal_probes():
    grid = Grid1D.regular(-40.0, 40.0, 2048)
    p = gaussian_probe_signal(3.0, grid)
    assert abs(overlap_kernel_quadrature(p, p, 0.0, 0.0) - 1.0) < 1e-12


def test_overlap_decays_at_far_corners():
    v = overlap_kernel(1.0, 1.0, TF_GRID).values
    assert v[1, 1] < 1e-12
    assert v[-1, -1] < 1e-12


def test_overlap_rejects_bad_widths():
    with pytest.raises(ValueError):
        overlap_kernel(0.0, 1.0, TF_GRID)
    with pytest.raises(ValueError):
        overlap_kernel(1.0, -2.0, TF_GRID)


# ---------------------------------------------------------------------------
# smoothed portrait
# ---------------------------------------------------------------------------

def test_portrait_of_point_mass_recenters_overlap():
    w = point_mass_distribution(TF_GRID, 1.5, -0.5)
    p = portrait(w, 1.0, 1.0)
    omega, b = TF_GRID.meshes()
    target = np.exp(-0.5 * (omega - 1.5) ** 2 - 0.5 * (b + 0.5) ** 2)
    assert np.abs(p.values - target).max() < 1e-12 * target.max()


def test_portrait_adds_gaussian_variances():
    grid = PhaseSpaceGrid.square(-12.0, 12.0, 192)
    p = portrait(gaussian_distribution(grid, 1.0, 1.5), 1.0, 1.0)
    omega, b = grid.meshes()
    var_omega, var_b = 2.0, 1.5 ** 2 + 1.0
    target = (np.exp(-omega ** 2 / (2.0 * var_omega) - b ** 2 / (2.0 * var_b))
              / np.sqrt(var_omega * var_b))
    assert np.abs(p.values - target).max() < 1e-12 * target.max()
    assert abs(p.mass - 1.0) < 1e-9


def test_portrait_requires_unit_mass():
    w = Distribution(TF_GRID, 2.0 * gaussian_distribution(TF_GRID).values)
    with pytest.raises(ValueError):
        portrait(w, 1.0, 1.0)


# ---------------------------------------------------------------------------
# projector smearing
# ---------------------------------------------------------------------------

def test_quantized_density_diagnostics():
    w = overlap_kernel(1.0, 1.0, TF_GRID).normalized()
    kernel = quantize_to_kernel(w, gaussian_probe_signal(1.0, TIME_GRID))
    diag = density_diagnostics(kernel)
    assert abs(diag["trace"] - 1.0) < 1e-9
    assert diag["hermiticity_defect"] < 1e-8
    assert diag["min_eigenvalue"] >= -1e-8
    assert 0.0 < diag["purity"] <= 1.0 + 1e-12


def test_point_mass_quantizes_to_displaced_projector():
    w = point_mass_distribution(TF_GRID, 2.0, 1.0)
    kernel = quantize_to_kernel(w, gaussian_probe_signal(1.0, TIME_GRID))
    psi = displace(2.0, 1.0, gaussian_probe_signal(1.0, TIME_GRID)).values
    target = np.outer(psi, np.conj(psi))
    rel = np.linalg.norm(kernel.entries - target) / np.linalg.norm(target)
    assert rel < 1e-10


def test_quantize_input_validation():
    w = Distribution(TF_GRID, 2.0 * gaussian_distribution(TF_GRID).values)
    probe = gaussian_probe_signal(1.0, TIME_GRID)
    with pytest.raises(ValueError):
        quantize_to_kernel(w, probe)
    bad_probe = SampledSignal(TIME_GRID, 2.0 * probe.values)
    with pytest.raises(ValueError):
        quantize_to_kernel(gaussian_distribution(TF_GRID), bad_probe)


def test_quantize_translation_covariance():
    # quantizing the translated density equals conjugating the kernel by the
    # displacement operator; the sandwich is applied column- then row-wise
    probe = gaussian_probe_signal(1.0, TIME_GRID)
    base = quantize_to_kernel(gaussian_distribution(TF_GRID), probe).entries
    moved = quantize_to_kernel(
        gaussian_distribution(TF_GRID, center=(1.0, 1.0)), probe).entries
    n = TIME_GRID.count
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", EdgeEnergyWarning)
        half = np.column_stack(
            [displace(1.0, 1.0, SampledSignal(TIME_GRID, base[:, j])).values
             for j in range(n)])
        full = np.column_stack(
            [displace(1.0, 1.0, SampledSignal(TIME_GRID, half[i, :].conj())).values
             for i in range(n)]).conj().T
    rel = np.linalg.norm(moved - full) / np.linalg.norm(moved)
    assert rel < 1e-8


def test_quantize_warns_on_band_edge_weight():
    values = gaussian_distribution(TF_GRID, center=(7.5, 0.0)).values
    w = Distribution(TF_GRID, values).normalized()
    with pytest.warns(BandCoverageWarning):
        quantize_to_kernel(w, gaussian_probe_signal(1.0, TIME_GRID))


# ---------------------------------------------------------------------------
# operator-valued weight sum
# ---------------------------------------------------------------------------

def test_weyl_point_mass_at_origin_is_identity():
    w = point_mass_distribution(TF_GRID, 0.0, 0.0).values
    op = weyl_operator_from_weight(w, TF_GRID, TIME_GRID)
    scaled = op.entries * TIME_GRID.step
    assert np.abs(scaled - np.eye(TIME_GRID.count)).max() < 1e-12


def test_weyl_even_real_weight_is_hermitian():
    w = overlap_kernel(2.0, 0.5, TF_GRID).values.copy()
    w[0, :] = 0.0
    w[:, 0] = 0.0
    op = weyl_operator_from_weight(w, TF_GRID, TIME_GRID)
    assert np.abs(op.entries - op.entries.conj().T).max() < 1e-10


def test_weyl_matches_direct_cell_sum():
    grid = PhaseSpaceGrid.square(-4.0, 4.0, 16)
    tgrid = Grid1D.regular(-5.0, 5.0, 32)
    rng = np.random.default_rng(9)
    w = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    w[[0, -1], :] = 0.0
    w[:, [0, -1]] = 0.0
    fast = weyl_operator_from_weight(w, grid, tgrid).entries
    t = tgrid.points
    n = tgrid.count
    nu = 2.0 * np.pi * np.fft.fftfreq(n, d=tgrid.step)
    circ = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
    slow = np.zeros((n, n), dtype=complex)
    for i, omega in enumerate(grid.omega_axis.points):
        pair = np.exp(0.5j * omega * (t[:, None] + t[None, :]))
        for j, b in enumerate(grid.b_axis.points):
            if w[i, j] == 0:
                continue
            row = np.fft.ifft(np.exp(-1j * b * nu))
            slow += grid.cell_measure * w[i, j] * pair * row[circ]
    slow /= tgrid.step
    assert np.abs(fast - slow).max() < 1e-12 * np.abs(slow).max()


def test_weyl_is_linear_in_the_weight():
    grid = PhaseSpaceGrid.square(-4.0, 4.0, 16)
    tgrid = Grid1D.regular(-5.0, 5.0, 32)
    rng = np.random.default_rng(2)
    w1 = rng.standard_normal(grid.shape)
    w2 = rng.standard_normal(grid.shape)
    w1[[0, -1], :] = 0.0
    w1[:, [0, -1]] = 0.0
    w2[[0, -1], :] = 0.0
    w2[:, [0, -1]] = 0.0
    combined = weyl_operator_from_weight(w1 + 2j * w2, grid, tgrid).entries
    separate = (weyl_operator_from_weight(w1, grid, tgrid).entries
                + 2j * weyl_operator_from_weight(w2, grid, tgrid).entries)
    assert np.abs(combined - separate).max() < 1e-12


def test_weyl_weight_validation():
    with pytest.raises(ValueError):
        weyl_operator_from_weight(np.ones((3, 3)), TF_GRID, TIME_GRID)
    bad = np.zeros(TF_GRID.shape)
    bad[5, 5] = np.inf
    with pytest.raises(ValueError):
        weyl_operator_from_weight(bad, TF_GRID, TIME_GRID)


def test_weyl_warns_on_hot_band_edge():
    grid = PhaseSpaceGrid.square(-4.0, 4.0, 16)
    tgrid = Grid1D.regular(-5.0, 5.0, 32)
    with pytest.warns(BandCoverageWarning):
        weyl_operator_from_weight(np.ones(grid.shape), grid, tgrid)


# ---------------------------------------------------------------------------
# diagnostics
# ---------------------------------------------------------------------------

def test_diagnostics_of_rank_one_projector():
    psi = gaussian_probe_signal(1.0, TIME_GRID).values
    kernel = OperatorKernel(TIME_GRID, np.outer(psi, np.conj(psi)))
    diag = density_diagnostics(kernel)
    assert abs(diag["trace"] - 1.0) < 1e-12
    assert abs(diag["purity"] - 1.0) < 1e-12
    assert diag["min_eigenvalue"] >= -1e-10


def test_diagnostics_of_equal_mixture():
    t = TIME_GRID.points
    psi0 = gaussian_probe_signal(1.0, TIME_GRID).values
    psi1 = SampledSignal(TIME_GRID, t * np.exp(-t ** 2 / 2.0)).normalized().values
    entries = 0.5 * (np.outer(psi0, np.conj(psi0)) + np.outer(psi1, np.conj(psi1)))
    diag = density_diagnostics(OperatorKernel(TIME_GRID, entries))
    assert abs(diag["trace"] - 1.0) < 1e-10
    assert abs(diag["purity"] - 0.5) < 1e-8
