import math

import numpy as np
import pytest
from scipy import integrate

from plqp.errors import InputError
from plqp.measures import (
    DiscreteMeasure,
    GridDensity,
    MollifierConfig,
    coarse_measure,
    dilate_curve,
    grid_to_atoms,
    make_multiball,
    make_ramp_ball,
    mollify,
    multiball_component_masses,
    ramp_ball_normalizer,
    ramp_profile,
    translate_curve,
)

from helpers import indicator_interval, line_grid, square_grid


# ---------------------------------------------------------------------------
# grid density invariants
# ---------------------------------------------------------------------------


def test_grid_density_rejects_negative_values():
    spec = line_grid(8, 1.0)
    vals = np.zeros(8)
    vals[3] = 1 / spec.h
    vals[4] = -1e-3
    with pytest.raises(InputError):
        GridDensity(spec, vals)


def test_grid_density_rejects_wrong_mass():
    spec = line_grid(8, 1.0)
    vals = np.zeros(8)
    vals[3] = 2.0 / spec.h
    with pytest.raises(InputError):
        GridDensity(spec, vals)


def test_grid_density_rejects_boundary_support():
    spec = line_grid(8, 1.0)
    vals = np.zeros(8)
    vals[0] = 1.0 / spec.h
    with pytest.raises(InputError):
        GridDensity(spec, vals)


def test_grid_density_values_immutable():
    spec = line_grid(8, 1.0)
    vals = np.zeros(8)
    vals[3] = 1 / spec.h
    g = GridDensity(spec, vals)
    with pytest.raises(ValueError):
        g.values[3] = 0.0


def test_discrete_measure_merges_duplicates():
    m = DiscreteMeasure([[0.0, 0.0], [1.0, 0.0], [0.0, 0.0]], [0.25, 0.5, 0.25])
    assert len(m) == 2
    i = int(np.argmin(m.points[:, 0]))
    assert m.weights[i] == pytest.approx(0.5, abs=1e-15)


def test_discrete_measure_rejects_nonpositive_weights():
    with pytest.raises(InputError):
        DiscreteMeasure([[0.0], [1.0]], [1.0, 0.0])


# ---------------------------------------------------------------------------
# grid_to_atoms
# ---------------------------------------------------------------------------


def test_grid_to_atoms_single_cell_identity():
    spec = square_grid(5, 1.0)
    vals = np.zeros((5, 5))
    vals[2, 2] = 1.0 / spec.cell_volume
    atoms = grid_to_atoms(GridDensity(spec, vals))
    assert len(atoms) == 1
    assert atoms.weights[0] == pytest.approx(1.0, abs=1e-15)
    np.testing.assert_allclose(atoms.points[0], [0.0, 0.0], atol=1e-15)


def test_grid_to_atoms_two_cell_symmetry():
    spec = line_grid(6, 1.0)
    vals = np.zeros(6)
    vals[2] = vals[3] = 0.5 / spec.h
    atoms = grid_to_atoms(GridDensity(spec, vals))
    np.testing.assert_allclose(atoms.weights, [0.5, 0.5], atol=1e-15)


def test_grid_to_atoms_three_cell_weights():
    # values (1,2,1)/(4h) integrate cellwise to weights (1/4, 1/2, 1/4)
    spec = line_grid(5, 1.0)
    vals = np.zeros(5)
    vals[1:4] = np.array([1.0, 2.0, 1.0]) / (4 * spec.h)
    atoms = grid_to_atoms(GridDensity(spec, vals))
    np.testing.assert_allclose(sorted(atoms.weights), [0.25, 0.25, 0.5], atol=1e-15)


def test_grid_to_atoms_total_weight_is_one():
    spec = square_grid(48, 2.0)
    g = make_ramp_ball(spec, (0.0, 0.0), 0.7, 0.2)
    atoms = grid_to_atoms(g)
    assert atoms.weights.sum() == pytest.approx(1.0, abs=1e-12)


def test_grid_to_atoms_zero_mass_errors():
    spec = line_grid(8, 1.0)
    vals = np.zeros(8)
    vals[3] = 1 / spec.h
    g = GridDensity(spec, vals)
    object.__setattr__(g, "values", np.zeros(8))
    with pytest.raises(InputError, match="zero mass"):
        grid_to_atoms(g)


# ---------------------------------------------------------------------------
# ramp balls
# ---------------------------------------------------------------------------


def test_ramp_ball_normalizer_matches_quadrature():
    for R, w in [(1.0, 0.1), (0.7, 0.3), (1.3, 0.05)]:
        val, _ = integrate.quad(
            lambda r: ramp_profile(np.array([r]), R, w)[0] * 2 * math.pi * r,
            0,
            R,
            points=[R - w],
        )
        assert 1.0 / val == pytest.approx(ramp_ball_normalizer(R, w), rel=1e-10)


def test_ramp_ball_normalizer_indicator_limit():
    # w -> 0 recovers the uniform ball value 1/(pi R^2)
    R = 1.0
    assert ramp_ball_normalizer(R, 1e-9) == pytest.approx(1.0 / (math.pi * R * R), rel=1e-6)


def test_ramp_ball_mass_and_support():
    spec = square_grid(128, 2.6)
    g = make_ramp_ball(spec, (0.0, 0.0), 1.0, 0.1)
    assert g.mass == pytest.approx(1.0, abs=1e-12)
    pts = spec.centers()
    r = np.linalg.norm(pts, axis=-1)
    assert np.all(g.values[r > 1.0] == 0)


def test_ramp_ball_translation_equivariance():
    spec = square_grid(64, 3.2)
    a = make_ramp_ball(spec, (0.0, 0.0), 0.8, 0.2)
    shift = 4 * spec.h  # integer number of cells
    b = make_ramp_ball(spec, (shift, 0.0), 0.8, 0.2)
    np.testing.assert_allclose(b.values[4:, :], a.values[:-4, :], atol=1e-12)


def test_ramp_ball_boundary_guard():
    spec = square_grid(32, 2.0)
    with pytest.raises(InputError, match="boundary"):
        make_ramp_ball(spec, (0.5, 0.0), 0.8, 0.1)


def test_ramp_ball_requires_2d():
    spec = line_grid(32, 2.0)
    with pytest.raises(InputError):
        make_ramp_ball(spec, (0.0,), 0.5, 0.1)


# ---------------------------------------------------------------------------
# multiballs
# ---------------------------------------------------------------------------


def test_multiball_single_reduces_to_ramp_ball():
    spec = square_grid(96, 3.0)
    a = make_multiball(spec, [(0.0, 0.0)], [0.9], [1.0], 0.2)
    b = make_ramp_ball(spec, (0.0, 0.0), 0.9, 0.2)
    np.testing.assert_allclose(a.values, b.values, atol=1e-12)


@pytest.mark.parametrize("weights", [[0.5, 0.5], [0.75, 0.25]])
def test_multiball_component_masses(weights):
    spec = square_grid(128, 6.0)
    centers = [(-1.4, 0.0), (1.4, 0.0)]
    radii = [0.9, 0.9]
    g = make_multiball(spec, centers, radii, weights, 0.15)
    masses = multiball_component_masses(g, centers, radii, 0.15)
    np.testing.assert_allclose(masses, weights, atol=1e-9)


def test_multiball_overlap_errors():
    spec = square_grid(64, 6.0)
    with pytest.raises(InputError, match="isolated"):
        make_multiball(spec, [(-0.5, 0.0), (0.5, 0.0)], [0.6, 0.6], [0.5, 0.5], 0.1)


# ---------------------------------------------------------------------------
# translation curves
# ---------------------------------------------------------------------------


def test_translate_zero_velocity_constant():
    spec = square_grid(32, 2.0)
    g = make_ramp_ball(spec, (0.0, 0.0), 0.6, 0.2)
    traj = translate_curve(g, (0.0, 0.0), [0.0, 0.5, 1.0])
    for d in traj.densities:
        np.testing.assert_array_equal(d.values, g.values)


def test_translate_integer_shift_is_permutation():
    spec = square_grid(48, 3.0)
    g = make_ramp_ball(spec, (0.0, 0.0), 0.7, 0.2)
    traj = translate_curve(g, (2 * spec.h, 0.0), [0.0, 1.0])
    shifted = traj.densities[-1].values
    np.testing.assert_array_equal(shifted[2:, :], g.values[:-2, :])
    assert sorted(shifted[shifted > 0]) == sorted(g.values[g.values > 0])


def test_translate_round_trip_integer_shifts():
    spec = square_grid(48, 3.0)
    g = make_ramp_ball(spec, (0.0, 0.0), 0.7, 0.2)
    fwd = translate_curve(g, (3 * spec.h, 0.0), [0.0, 1.0]).densities[-1]
    back = translate_curve(fwd, (-3 * spec.h, 0.0), [0.0, 1.0]).densities[-1]
    np.testing.assert_array_equal(back.values, g.values)


def test_translate_mass_conserved_fractional():
    spec = square_grid(48, 3.0)
    g = make_ramp_ball(spec, (0.0, 0.0), 0.7, 0.2)
    traj = translate_curve(g, (0.23, 0.11), [0.0, 0.37, 0.81])
    for d in traj.densities:
        assert d.mass == pytest.approx(1.0, abs=1e-9)


def test_translate_support_exit_errors():
    spec = square_grid(32, 2.0)
    g = make_ramp_ball(spec, (0.0, 0.0), 0.6, 0.2)
    with pytest.raises(InputError, match="exit"):
        translate_curve(g, (1.0, 0.0), [0.0, 1.0])


# ---------------------------------------------------------------------------
# dilation curves
# ---------------------------------------------------------------------------


def test_dilate_identity_factor():
    spec = square_grid(64, 3.0)
    g = make_ramp_ball(spec, (0.0, 0.0), 0.8, 0.2)
    traj = dilate_curve(g, 1.0, [0.0, 0.5, 1.0])
    for d in traj.densities:
        np.testing.assert_allclose(d.values, g.values, atol=1e-12)
    for v in traj.field.vectors:
        np.testing.assert_allclose(v, 0.0, atol=1e-15)


def test_dilate_endpoint_density():
    spec = square_grid(192, 5.0)
    g = make_ramp_ball(spec, (0.0, 0.0), 1.0, 0.2)
    M = 1.5
    traj = dilate_curve(g, M, [0.0, 1.0])
    # at t = 1 the density is f(x/M)/M^2; compare against a directly built ball
    end = make_ramp_ball(spec, (0.0, 0.0), M * 1.0, M * 0.2)
    l1 = np.abs(traj.densities[-1].values - end.values).sum() * spec.cell_volume
    assert l1 < 0.02


def test_dilate_field_sup_norm_bound():
    # |v_t| <= R |M - 1| on the support once (1+M) spt(mu) fits in B_R
    spec = square_grid(96, 5.0)
    g = make_ramp_ball(spec, (0.0, 0.0), 1.0, 0.2)
    M = 1.8
    R = (1 + M) * 1.0
    traj = dilate_curve(g, M, [0.0, 0.5, 1.0], guard=0.02)
    for k, t in enumerate(traj.times):
        speeds = np.linalg.norm(traj.field.at(k), axis=-1)
        on = traj.densities[k].values > 0
        assert speeds[on].max() <= R * abs(M - 1) + 1e-12


# ---------------------------------------------------------------------------
# mollifier
# ---------------------------------------------------------------------------


def test_mollify_preserves_radial_symmetry():
    spec = square_grid(64, 3.2)
    g = make_ramp_ball(spec, (0.0, 0.0), 0.8, 0.2)
    sm = mollify(g, MollifierConfig(2.5 * spec.h, "gaussian"))
    v = sm.values
    np.testing.assert_allclose(v, v[::-1, :], atol=1e-12)
    np.testing.assert_allclose(v, v[:, ::-1], atol=1e-12)
    np.testing.assert_allclose(v, v.T, atol=1e-12)


@pytest.mark.parametrize("kernel", ["gaussian", "triangular"])
def test_mollify_mass_and_max(kernel):
    spec = square_grid(64, 3.6)
    g = make_ramp_ball(spec, (0.0, 0.0), 0.8, 0.15)
    sm = mollify(g, MollifierConfig(3 * spec.h, kernel))
    assert sm.mass == pytest.approx(1.0, abs=1e-12)
    assert sm.values.max() <= g.values.max() + 1e-12


def test_mollify_width_guard():
    spec = square_grid(32, 2.0)
    g = make_ramp_ball(spec, (0.0, 0.0), 0.6, 0.2)
    with pytest.raises(InputError):
        mollify(g, MollifierConfig(0.1 * spec.h, "gaussian"))


def test_mollify_boundary_guard():
    spec = square_grid(32, 2.0)
    g = make_ramp_ball(spec, (0.0, 0.0), 0.8, 0.15)
    with pytest.raises(InputError):
        mollify(g, MollifierConfig(6 * spec.h, "gaussian"))


# ---------------------------------------------------------------------------
# misc
# ---------------------------------------------------------------------------


def test_indicator_interval_heights():
    spec = line_grid(40, 4.0, left=-2.0)
    g = indicator_interval(spec, 0.0, 1.0)
    assert g.values.max() == pytest.approx(1.0, abs=1e-12)


def test_coarse_measure_conserves_mass():
    spec = square_grid(32, 2.0)
    g = make_ramp_ball(spec, (0.0, 0.0), 0.6, 0.2)
    atoms = grid_to_atoms(g)
    coarse = coarse_measure(atoms.points, atoms.weights, spec, 8)
    assert coarse.weights.sum() == pytest.approx(1.0, abs=1e-12)
    assert len(coarse) <= 64
