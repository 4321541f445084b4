"""Minimizing-movement scheme for the isoperimetric ratio.

One implicit step minimizes
    Phi(x; tau, anchor) = phi(x) + d(x, anchor)^2 / (2 tau)
with d the composite (transport + L^inf) distance.  Minimizing over all
densities is out of reach, so the resolvent searches a declared family and
reports family-relative minimality only:

* Radial family: each component is a piecewise-constant ring profile about a
  fixed center with fixed component mass; candidate moves set one ring height
  to a quantized ladder level and rescale the component.  The functional and
  the distance are evaluated in profile space with continuum closed forms
  (ring-jump total variation, exact L^2/L^inf, monotone radial bottleneck),
  with periodic cross-checks against the grid bottleneck.
* Grid local search: greedy first-improvement descent over quantum mass
  transfers between adjacent cells; the transport part of the distance is
  evaluated on coarse-binned atoms (sub-sampling factor recorded).

The anchor is always candidate 0, so Phi(out) <= phi(anchor) holds by
construction, and so do the telescoped dissipation inequalities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bottleneck import RadialMeasure, winf_grid, winf_radial
from .errors import InputError
from .functionals import isop, sobolev_ratio
from .measures import GridDensity, GridSpec, coarse_measure, grid_to_atoms, normalized_density
from .plmetric import PLMetricParams, lp_norm_diff

SUBRINGS = 32  # sub-ring resolution used for the radial bottleneck


@dataclass(frozen=True)
class StepPartition:
    """Finite list of positive steps (the infinite tail is truncated)."""

    steps: tuple[float, ...]

    def __post_init__(self):
        if len(self.steps) == 0 or any(t <= 0 for t in self.steps):
            raise InputError("steps must be positive")

    @property
    def horizon(self) -> float:
        return float(sum(self.steps))

    @property
    def sup_step(self) -> float:
        return float(max(self.steps))

    def times(self) -> np.ndarray:
        return np.concatenate([[0.0], np.cumsum(self.steps)])

    @staticmethod
    def uniform(tau: float, n: int) -> "StepPartition":
        return StepPartition((float(tau),) * n)


@dataclass(frozen=True)
class RadialFamily:
    """Per-component ring-height profiles with fixed centers and masses."""

    centers: tuple[tuple[float, ...], ...]
    masses: tuple[float, ...]
    outer_radii: tuple[float, ...]
    rings: int = 8
    levels: int = 32
    max_sweeps: int = 60

    def __post_init__(self):
        if self.rings < 1 or self.rings > 8:
            raise InputError("rings must be in 1..8")
        if abs(sum(self.masses) - 1.0) > 1e-9:
            raise InputError("component masses must sum to 1")

    @staticmethod
    def from_anchor(
        anchor: GridDensity,
        centers,
        outer_radii,
        rings: int = 8,
        levels: int = 32,
        max_sweeps: int = 60,
    ) -> "RadialFamily":
        pts = anchor.spec.centers()
        masses = []
        for c, R in zip(centers, outer_radii):
            r = np.linalg.norm(pts - np.asarray(c, dtype=float), axis=-1)
            masses.append(float(anchor.values[r <= R].sum() * anchor.spec.cell_volume))
        total = sum(masses)
        if abs(total - 1.0) > 1e-6:
            raise InputError("outer radii do not capture the anchor mass")
        masses = tuple(m / total for m in masses)
        return RadialFamily(
            tuple(tuple(float(x) for x in c) for c in centers),
            masses,
            tuple(float(R) for R in outer_radii),
            rings,
            levels,
            max_sweeps,
        )


@dataclass(frozen=True)
class GridSearchFamily:
    """Greedy adjacent-cell mass transfers with a fixed move quantum."""

    quantum: float = 1e-3
    budget: int = 200
    coarse_bins: int = 12


@dataclass(frozen=True)
class ResolventProblem:
    phi: str  # "isop" or "sobolev"
    tau: float
    anchor: GridDensity
    family: RadialFamily | GridSearchFamily
    metric: PLMetricParams = field(default_factory=PLMetricParams)
    sobolev_r: float = 1.5

    def __post_init__(self):
        if self.tau <= 0:
            raise InputError("tau must be positive")
        if self.phi not in ("isop", "sobolev"):
            raise InputError(f"unknown functional tag {self.phi!r}")


@dataclass(frozen=True)
class DiscreteSolution:
    partition: StepPartition
    states: tuple[GridDensity, ...]  # states[0] is the initial datum
    phi_values: tuple[float, ...]
    moreau_values: tuple[float, ...]  # Phi at each accepted state, len = steps
    movement: tuple[float, ...]  # d(x_k, x_{k-1}) per step
    diagnostics: tuple[dict, ...]


# ---------------------------------------------------------------------------
# radial profiles
# ---------------------------------------------------------------------------


class _RadialState:
    """Heights per component on that component's ring partition."""

    __slots__ = ("family", "heights")

    def __init__(self, family: RadialFamily, heights: list[np.ndarray]):
        self.family = family
        self.heights = [np.asarray(h, dtype=float) for h in heights]

    def copy(self) -> "_RadialState":
        return _RadialState(self.family, [h.copy() for h in self.heights])

    def key(self) -> tuple:
        return tuple(tuple(np.round(h, 14)) for h in self.heights)


def _ring_areas(R: float, rings: int) -> np.ndarray:
    edges = np.linspace(0.0, R, rings + 1)
    return math.pi * np.diff(edges**2)


def _rescale_component(family: RadialFamily, j: int, h: np.ndarray) -> np.ndarray:
    areas = _ring_areas(family.outer_radii[j], family.rings)
    mass = float((h * areas).sum())
    if mass <= 0:
        raise InputError("component lost all mass")
    return h * (family.masses[j] / mass)


def _fit_anchor_profile(anchor: GridDensity, family: RadialFamily) -> _RadialState:
    pts = anchor.spec.centers()
    vol = anchor.spec.cell_volume
    heights = []
    for j, (c, R) in enumerate(zip(family.centers, family.outer_radii)):
        r = np.linalg.norm(pts - np.asarray(c), axis=-1)
        edges = np.linspace(0.0, R, family.rings + 1)
        areas = _ring_areas(R, family.rings)
        h = np.zeros(family.rings)
        for k in range(family.rings):
            mask = (r >= edges[k]) & (r < edges[k + 1])
            h[k] = anchor.values[mask].sum() * vol / areas[k]
        heights.append(_rescale_component(family, j, h))
    return _RadialState(family, heights)


def _profile_isop(state: _RadialState) -> float:
    """Continuum isoperimetric ratio of the piecewise-constant profile."""
    fam = state.family
    tv = 0.0
    l2sq = 0.0
    for j, h in enumerate(state.heights):
        R = fam.outer_radii[j]
        edges = np.linspace(0.0, R, fam.rings + 1)
        areas = _ring_areas(R, fam.rings)
        hext = np.concatenate([h, [0.0]])
        tv += float((np.abs(np.diff(hext)) * 2 * math.pi * edges[1:]).sum())
        l2sq += float((h * h * areas).sum())
    if l2sq <= 0:
        raise InputError("zero profile")
    return tv / math.sqrt(l2sq)


def _profile_radius_atoms(fam: RadialFamily, j: int, h: np.ndarray) -> RadialMeasure:
    """Sub-ring radius marginal of one component (for the radial bottleneck)."""
    R = fam.outer_radii[j]
    fine_edges = np.linspace(0.0, R, fam.rings * SUBRINGS + 1)
    ring_of = np.repeat(np.arange(fam.rings), SUBRINGS)
    areas = math.pi * np.diff(fine_edges**2)
    w = h[ring_of] * areas
    mids = 0.5 * (fine_edges[:-1] + fine_edges[1:])
    total = w.sum()
    if total <= 0:
        raise InputError("zero profile")
    keep = w > 0
    return RadialMeasure(np.asarray(fam.centers[j]), mids[keep], w[keep] / total)


def _profile_atoms(state: _RadialState) -> list[RadialMeasure]:
    return [
        _profile_radius_atoms(state.family, j, h) for j, h in enumerate(state.heights)
    ]


def _profile_distance(
    a: _RadialState, b: _RadialState, b_atoms: list[RadialMeasure] | None = None
) -> float:
    """Composite distance in profile space: per-component radial bottleneck
    (components keep their mass, so couplings stay component-wise) plus the
    exact L^inf height difference."""
    fam = a.family
    if b_atoms is None:
        b_atoms = _profile_atoms(b)
    wpart = 0.0
    lpart = 0.0
    for j in range(len(fam.centers)):
        wpart = max(
            wpart,
            winf_radial(_profile_radius_atoms(fam, j, a.heights[j]), b_atoms[j]),
        )
        lpart = max(lpart, float(np.abs(a.heights[j] - b.heights[j]).max()))
    return wpart + lpart


def _materialize(state: _RadialState, spec: GridSpec) -> GridDensity:
    fam = state.family
    pts = spec.centers()
    raw = np.zeros(spec.shape)
    for j, h in enumerate(state.heights):
        R = fam.outer_radii[j]
        r = np.linalg.norm(pts - np.asarray(fam.centers[j]), axis=-1)
        k = np.minimum((r / (R / fam.rings)).astype(int), fam.rings - 1)
        raw += np.where(r < R, h[k], 0.0)
    # ring profiles are coarse objects; allow a looser sampling mismatch
    return normalized_density(spec, raw, guard=0.1)


def _radial_phi(prob: ResolventProblem, state: _RadialState) -> float:
    if prob.phi == "isop":
        return _profile_isop(state)
    return sobolev_ratio(_materialize(state, prob.anchor.spec), prob.sobolev_r).value


def _radial_resolvent(prob: ResolventProblem, anchor_state: _RadialState | None = None):
    fam: RadialFamily = prob.family
    if anchor_state is None:
        anchor_state = _fit_anchor_profile(prob.anchor, fam)
    phi_anchor = _radial_phi(prob, anchor_state)
    current = anchor_state
    phi_cur = phi_anchor
    best_phi_val = phi_cur  # Phi(anchor) = phi(anchor): distance term is 0
    evaluated = 1
    sweeps = 0
    anchor_atoms = _profile_atoms(anchor_state)
    ladders = [np.linspace(0.0, 1.5 * max(h.max(), 1e-12), fam.levels) for h in anchor_state.heights]
    while sweeps < fam.max_sweeps:
        sweeps += 1
        best_move = None
        best_val = best_phi_val
        for j in range(len(fam.centers)):
            for k in range(fam.rings):
                for lev in ladders[j]:
                    if lev == current.heights[j][k]:
                        continue
                    cand = current.copy()
                    cand.heights[j][k] = lev
                    try:
                        cand.heights[j] = _rescale_component(fam, j, cand.heights[j])
                        val = (
                            _radial_phi(prob, cand)
                            + _profile_distance(cand, anchor_state, anchor_atoms) ** 2
                            / (2 * prob.tau)
                        )
                    except InputError:
                        continue
                    evaluated += 1
                    if val < best_val - 1e-12:
                        best_val = val
                        best_move = cand
        if best_move is None:
            break
        current = best_move
        best_phi_val = best_val
        phi_cur = _radial_phi(prob, current)
    out = _materialize(current, prob.anchor.spec)
    diag = {
        "family": "radial",
        "rings": fam.rings,
        "levels": fam.levels,
        "sweeps": sweeps,
        "candidates_evaluated": evaluated,
        "phi_anchor": phi_anchor,
        "phi_out": phi_cur,
        "movement_profile": _profile_distance(current, anchor_state),
    }
    return out, current, float(best_phi_val), diag


# ---------------------------------------------------------------------------
# grid local search
# ---------------------------------------------------------------------------


def _coarse_winf(a: GridDensity, b: GridDensity, bins: int) -> float:
    """Bottleneck between coarse-binned atomizations (sub-sampled metric)."""
    from .bottleneck import winf

    atoms_a = grid_to_atoms(a)
    atoms_b = grid_to_atoms(b)
    ca = coarse_measure(atoms_a.points, atoms_a.weights, a.spec, bins)
    cb = coarse_measure(atoms_b.points, atoms_b.weights, b.spec, bins)
    return winf(ca, cb).value


def _grid_phi(prob: ResolventProblem, g: GridDensity) -> float:
    if prob.phi == "isop":
        return isop(g).value
    return sobolev_ratio(g, prob.sobolev_r).value


def _grid_resolvent(prob: ResolventProblem):
    fam: GridSearchFamily = prob.family
    spec = prob.anchor.spec
    if int(np.prod(spec.shape)) > 4096:
        raise InputError("grid local search is limited to 4096 cells")
    vol = spec.cell_volume
    anchor = prob.anchor

    def phi_of(vals) -> float:
        return _grid_phi(prob, GridDensity(spec, vals))

    def dist_to_anchor(vals) -> float:
        g = GridDensity(spec, vals)
        w = _coarse_winf(g, anchor, fam.coarse_bins)
        return w + lp_norm_diff(g, anchor, math.inf)

    cur = anchor.values.copy()
    phi_anchor = phi_of(cur)
    cur_val = phi_anchor
    moves = 0
    evaluated = 0
    neighbors = []
    for ax in range(spec.dim):
        for sgn in (1, -1):
            neighbors.append((ax, sgn))
    improved = True
    while moves < fam.budget and improved:
        improved = False
        order = np.argsort(-cur.ravel(), kind="stable")
        for flat in order:
            if cur.ravel()[flat] * vol < fam.quantum:
                continue
            src = np.unravel_index(flat, spec.shape)
            for ax, sgn in neighbors:
                dst = list(src)
                dst[ax] += sgn
                if not (1 <= dst[ax] < spec.shape[ax] - 1):
                    continue
                cand = cur.copy()
                cand[src] -= fam.quantum / vol
                cand[tuple(dst)] += fam.quantum / vol
                if cand[src] < 0:
                    continue
                try:
                    val = phi_of(cand) + dist_to_anchor(cand) ** 2 / (2 * prob.tau)
                except InputError:
                    continue
                evaluated += 1
                if val < cur_val - 1e-12:
                    cur = cand
                    cur_val = val
                    moves += 1
                    improved = True
                    break
            if improved:
                break
    out = GridDensity(spec, cur)
    diag = {
        "family": "grid-local-search",
        "quantum": fam.quantum,
        "moves_accepted": moves,
        "candidates_evaluated": evaluated,
        "coarse_bins": fam.coarse_bins,
        "phi_anchor": phi_anchor,
        "phi_out": phi_of(cur),
    }
    return out, None, float(cur_val), diag


# ---------------------------------------------------------------------------
# public surface
# ---------------------------------------------------------------------------


def resolvent(prob: ResolventProblem):
    """Approximate minimizer of Phi(. ; tau, anchor) within the declared
    family.  Returns (state, Phi value, diagnostics)."""
    if not (math.isinf(prob.metric.q) and math.isinf(prob.metric.p)):
        raise InputError("the scheme is implemented for the (inf, inf) metric")
    if isinstance(prob.family, RadialFamily):
        out, _, val, diag = _radial_resolvent(prob)
        return out, val, diag
    if isinstance(prob.family, GridSearchFamily):
        out, _, val, diag = _grid_resolvent(prob)
        return out, val, diag
    raise InputError(f"unknown family {type(prob.family).__name__}")


def run_scheme(
    anchor: GridDensity,
    partition: StepPartition,
    prob_template: ResolventProblem,
    cross_check_every: int = 0,
) -> DiscreteSolution:
    """Iterate the resolvent along the partition, recording the ledger.

    With `cross_check_every = k > 0`, every k-th step also records the grid
    bottleneck between consecutive states next to the family metric.
    """
    states = [anchor]
    diags = []
    movements = []
    moreaus = []
    if isinstance(prob_template.family, RadialFamily):
        fam = prob_template.family
        prob0 = ResolventProblem(
            prob_template.phi, partition.steps[0], anchor, fam,
            prob_template.metric, prob_template.sobolev_r,
        )
        cur_state = _fit_anchor_profile(anchor, fam)
        phis = [_radial_phi(prob0, cur_state)]
        cur_grid = anchor
        for step_i, tau in enumerate(partition.steps):
            prob = ResolventProblem(
                prob_template.phi, tau, cur_grid, fam,
                prob_template.metric, prob_template.sobolev_r,
            )
            # carry the profile state: the anchor of each step is exactly the
            # previous minimizer, keeping the dissipation ledger exact
            out_grid, out_state, val, diag = _radial_resolvent(prob, cur_state)
            move = _profile_distance(out_state, cur_state)
            if cross_check_every and (step_i + 1) % cross_check_every == 0:
                check = winf_grid(out_grid, cur_grid)
                diag["winf_grid_cross_check"] = check.value
                diag["winf_grid_quantization"] = check.quantization_bound
            movements.append(move)
            moreaus.append(val)
            phis.append(diag["phi_out"])
            diags.append(diag)
            states.append(out_grid)
            cur_state = out_state
            cur_grid = out_grid
    else:
        phis = [_grid_phi(prob_template, anchor)]
        cur = anchor
        for tau in partition.steps:
            prob = ResolventProblem(
                prob_template.phi, tau, cur, prob_template.family,
                prob_template.metric, prob_template.sobolev_r,
            )
            out, val, diag = _grid_resolvent(prob)
            w = _coarse_winf(out, cur, prob_template.family.coarse_bins)
            move = w + lp_norm_diff(out, cur, math.inf)
            movements.append(move)
            moreaus.append(val)
            phis.append(diag["phi_out"])
            diags.append(diag)
            states.append(out)
            cur = out
    return DiscreteSolution(
        partition,
        tuple(states),
        tuple(phis),
        tuple(moreaus),
        tuple(movements),
        tuple(diags),
    )


def equal_ratio_probe(
    anchor: GridDensity,
    centers,
    outer_radii,
    tau: float = 0.1,
    rings: int = 8,
    levels: int = 32,
) -> dict:
    """Resolvent probe around a multiball anchor whose mass/radius ratios are
    equal (the candidate stationary configurations).

    Whether these anchors are stationary for the scheme is an open question;
    the probe reports what the family search found without asserting an
    expected outcome.
    """
    fam = RadialFamily.from_anchor(anchor, centers, outer_radii, rings=rings, levels=levels)
    prob = ResolventProblem("isop", tau, anchor, fam)
    out, val, diag = resolvent(prob)
    return {
        "tau": tau,
        "phi_anchor": diag["phi_anchor"],
        "phi_out": diag["phi_out"],
        "moreau_out": val,
        "movement_profile": diag["movement_profile"],
        "moved": diag["movement_profile"] > 1e-12,
        "candidates_evaluated": diag["candidates_evaluated"],
        "note": "family-relative search only; no stationarity claim",
    }


def solution_ledger(sol: DiscreteSolution) -> dict:
    """JSON-ready per-step ledger of a scheme run."""
    steps = []
    for k, tau in enumerate(sol.partition.steps):
        steps.append(
            {
                "step": k + 1,
                "tau": tau,
                "phi": sol.phi_values[k + 1],
                "moreau": sol.moreau_values[k],
                "movement": sol.movement[k],
                "diagnostics": sol.diagnostics[k],
            }
        )
    return {
        "phi_initial": sol.phi_values[0],
        "horizon": sol.partition.horizon,
        "sup_step": sol.partition.sup_step,
        "steps": steps,
    }


def refine_and_compare(
    anchor: GridDensity,
    partitions: list[StepPartition],
    prob_template: ResolventProblem,
    coarse_bins: int = 12,
) -> dict:
    """Run the scheme along refining partitions and compare the piecewise
    constant interpolants at shared times.  Diagnostic only: no continuum
    convergence is asserted."""
    if len(partitions) < 2:
        raise InputError("need >= 2 partitions")
    for a, b in zip(partitions, partitions[1:]):
        if b.sup_step > 0.6 * a.sup_step:
            raise InputError("partitions must have (roughly) halving sup_step")
    sols = [run_scheme(anchor, p, prob_template) for p in partitions]
    horizon = min(p.horizon for p in partitions)
    sample_times = np.linspace(0.0, horizon, 9)[1:]
    n = anchor.spec.dim
    p_sigma = n / (n - 1) if n > 1 else 1.0

    def state_at(sol: DiscreteSolution, t: float) -> GridDensity:
        # piecewise constant: x_t = x_j on (t_{j-1}, t_j]
        times = sol.partition.times()
        j = int(np.searchsorted(times, t - 1e-12))
        j = min(max(j, 1), len(sol.states) - 1)
        return sol.states[j]

    comparisons = []
    for a, b in zip(sols, sols[1:]):
        rows = []
        for t in sample_times:
            ga, gb = state_at(a, t), state_at(b, t)
            sigma_dist = lp_norm_diff(ga, gb, p_sigma)
            w = _coarse_winf(ga, gb, coarse_bins)
            rows.append(
                {
                    "t": float(t),
                    "sigma_distance": sigma_dist,
                    "dinf_coarse": w + lp_norm_diff(ga, gb, math.inf),
                }
            )
        comparisons.append(
            {
                "sup_steps": [a.partition.sup_step, b.partition.sup_step],
                "rows": rows,
                "max_sigma_distance": max(r["sigma_distance"] for r in rows),
            }
        )
    return {
        "anchor_phi": sols[0].phi_values[0],
        "coarse_bins": coarse_bins,
        "phi_envelopes": [list(s.phi_values) for s in sols],
        "comparisons": comparisons,
    }
