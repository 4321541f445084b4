"""Reference instances with known closed-form answers.

The rectangle-split instance: mu is uniform on [-1/2, 3/2] x [-1, 1]; nu is
uniform on the union of [-1/2, 1/2] x [-1, 1] and [9/2, 11/2] x [-1, 1],
with half the mass on each part.  The right half of mu must travel at least
4 to cover the far rectangle, and the horizontal translation by 4 achieves
it, so the bottleneck distance is exactly 4.

Two path ensembles attain the minimal sup-action 4 between these measures:
straight translations of the right half plus rest for the left half, and a
mixed family where the left half performs a half-turn about the origin
(per-path action pi * sqrt(x^2 + y^2) <= pi * sqrt(5)/2 < 4, and the
rotated left rectangle is symmetric, so endpoints still match) while the
right half translates.  The mixed family is a minimizer that is not
supported on constant-speed straight lines.
"""

from __future__ import annotations

import math

import numpy as np

from .dynamics import PathEnsemble
from .errors import InputError
from .measures import GridDensity, GridSpec

MU_RECT = ((-0.5, 1.5), (-1.0, 1.0))
NU_RECT_LEFT = ((-0.5, 0.5), (-1.0, 1.0))
NU_RECT_RIGHT = ((4.5, 5.5), (-1.0, 1.0))
SPLIT_X = 0.5  # mass to the right of this line translates by +4
BOTTLENECK_VALUE = 4.0


def _indicator(spec: GridSpec, rects) -> np.ndarray:
    pts = spec.centers()
    vals = np.zeros(spec.shape)
    for (x0, x1), (y0, y1) in rects:
        inside = (
            (pts[..., 0] > x0) & (pts[..., 0] < x1) & (pts[..., 1] > y0) & (pts[..., 1] < y1)
        )
        vals += inside.astype(float)
    if np.any(vals > 1.0):
        raise InputError("rectangles overlap")
    return vals


def rectangle_split_instance(cells_per_unit: int = 16) -> tuple[GridDensity, GridDensity]:
    """Grid densities of the two rectangle-union measures on a shared grid.

    `cells_per_unit` cells per unit length; 16 gives the 64 x 32 resolution
    of the mu rectangle.  Rectangle edges are aligned with cell boundaries,
    so the indicators are exact on the grid.
    """
    h = 1.0 / cells_per_unit
    # cover [-1, 6] x [-1.5, 1.5] with a margin ring
    nx, ny = 7 * cells_per_unit, 3 * cells_per_unit
    origin = (-1.0 + h / 2, -1.5 + h / 2)
    spec = GridSpec(2, (nx, ny), h, origin)
    vol = spec.cell_volume
    raw_mu = _indicator(spec, [MU_RECT])
    raw_nu = _indicator(spec, [NU_RECT_LEFT, NU_RECT_RIGHT])
    mu = GridDensity(spec, raw_mu / (raw_mu.sum() * vol))
    nu = GridDensity(spec, raw_nu / (raw_nu.sum() * vol))
    return mu, nu


def _atom_grid(rect, nx: int, ny: int) -> np.ndarray:
    (x0, x1), (y0, y1) = rect
    xs = x0 + (np.arange(nx) + 0.5) * (x1 - x0) / nx
    ys = y0 + (np.arange(ny) + 0.5) * (y1 - y0) / ny
    g = np.stack(np.meshgrid(xs, ys, indexing="ij"), axis=-1)
    return g.reshape(-1, 2)


def _translation_paths(starts: np.ndarray, breakpoints: int) -> np.ndarray:
    ts = np.linspace(0.0, 1.0, breakpoints)
    shift = np.array([4.0, 0.0])
    return starts[:, None, :] + ts[None, :, None] * shift[None, None, :]


def _rest_paths(starts: np.ndarray, breakpoints: int) -> np.ndarray:
    return np.repeat(starts[:, None, :], breakpoints, axis=1)


def _rotation_paths(starts: np.ndarray, breakpoints: int) -> np.ndarray:
    ts = np.linspace(0.0, 1.0, breakpoints)
    ang = math.pi * ts
    cos, sin = np.cos(ang), np.sin(ang)
    x, y = starts[:, 0], starts[:, 1]
    px = x[:, None] * cos[None, :] - y[:, None] * sin[None, :]
    py = x[:, None] * sin[None, :] + y[:, None] * cos[None, :]
    return np.stack([px, py], axis=-1)


def translation_ensemble(nx: int = 8, ny: int = 8, breakpoints: int = 33) -> PathEnsemble:
    """Rest on the left half, straight translation by (4, 0) on the right."""
    left = _atom_grid((( -0.5, SPLIT_X), (-1.0, 1.0)), nx, ny)
    right = _atom_grid(((SPLIT_X, 1.5), (-1.0, 1.0)), nx, ny)
    paths = np.concatenate([_rest_paths(left, breakpoints), _translation_paths(right, breakpoints)])
    weights = np.full(len(paths), 1.0 / len(paths))
    return PathEnsemble(paths, weights)


def rotation_mix_ensemble(nx: int = 8, ny: int = 8, breakpoints: int = 33) -> PathEnsemble:
    """Half-turn rotations on the left half, straight translations on the
    right; a sup-action minimizer not concentrated on straight lines."""
    left = _atom_grid(((-0.5, SPLIT_X), (-1.0, 1.0)), nx, ny)
    right = _atom_grid(((SPLIT_X, 1.5), (-1.0, 1.0)), nx, ny)
    paths = np.concatenate([_rotation_paths(left, breakpoints), _translation_paths(right, breakpoints)])
    weights = np.full(len(paths), 1.0 / len(paths))
    return PathEnsemble(paths, weights)
