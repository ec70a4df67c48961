"""
Energy-optimal hover-to-hover traversal in still air.

The traversal accelerates on a cubic spline to cruise airspeed v_c, cruises for l_c
metres and decelerates back to hover. ``optimize`` minimises the total energy over
(v_c, a_plus, a_minus) subject to l_c >= 0, comparing the corners of the constraint box
with interior stationary points found by SLSQP from the best points of a coarse grid.
"""
import logging
from enum import Enum

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.optimize import minimize

from evtol_traversal_planner.core.config import CONFIG, OptimizerSettings
from evtol_traversal_planner.core.errors import NegativeCruise, SurfaceDomainError
from evtol_traversal_planner.frames_wind import WindSpec
from evtol_traversal_planner.spline_profiles import (
    accelerated_distance, build_spline, cruise_length, v_max_achievable
)
from evtol_traversal_planner.trajectory import (
    PhaseSummary, ProfilePart, TrajectoryTimeSeries, assemble_series, summarize
)
from evtol_traversal_planner.vehicle_model import (
    VehicleModel, accel_segment_energy_nowind, best_cruise_speed, energy_per_distance, integrate_power
)

logger = logging.getLogger(__name__)

LENGTH_TOL = 1e-9
STILL_AIR = WindSpec(speed=0.0, heading=0.0)


class CriticalPointKind(str, Enum):
    BOUNDARY = "boundary"
    SOLUTION = "solution"
    FALLBACK = "fallback"


class TraversalQuery(BaseModel):
    model_config = ConfigDict(frozen=True)

    length: float = Field(gt=0)
    a_lim_plus: float = Field(gt=0)
    a_lim_minus: float = Field(lt=0)
    vehicle: VehicleModel

    @model_validator(mode="after")
    def check_bounds(self) -> "TraversalQuery":
        if self.a_lim_plus > self.vehicle.a_lim_plus or self.a_lim_minus < self.vehicle.a_lim_minus:
            raise ValueError(f"acceleration bounds ({self.a_lim_plus}, {self.a_lim_minus}) exceed vehicle limits "
                             f"({self.vehicle.a_lim_plus}, {self.vehicle.a_lim_minus})")
        return self

    @classmethod
    def symmetric(cls, length: float, a_lim: float, vehicle: VehicleModel) -> "TraversalQuery":
        return cls(length=length, a_lim_plus=abs(a_lim), a_lim_minus=-abs(a_lim), vehicle=vehicle)


class OptimalTraversal(BaseModel):
    v_c: float
    a_plus: float
    a_minus: float
    l_cruise: float
    energy_total: float
    energy_breakdown: tuple[float, float, float]
    critical_point_kind: CriticalPointKind


def _spline_energy(v_c: float, a_max: float, m: VehicleModel, dt: float) -> float:
    spline = build_spline(0.0, v_c, a_max) if a_max > 0 else build_spline(v_c, 0.0, a_max)
    t, v, a = spline.sample(dt)
    return integrate_power(t, v, a, m)


def segment_energy(v_c: float, a_max: float, m: VehicleModel, dt: float | None = None) -> float:
    """Accelerated-segment energy from the fitted surface, integrated over the spline outside it."""
    try:
        return float(accel_segment_energy_nowind(v_c, a_max, m))
    except SurfaceDomainError:
        return _spline_energy(v_c, a_max, m, dt or CONFIG.PLANNER.dt)


def traversal_energy(v_c: float, a_plus: float, a_minus: float, l: float, m: VehicleModel
                     ) -> tuple[float, tuple[float, float, float]]:
    """
    Total energy and its (accel, cruise, decel) split for one candidate.

    Raises:
        NegativeCruise: ``v_c`` cannot be reached and left again within ``l``.
    """
    l_c = float(cruise_length(l, v_c, a_plus, a_minus))
    if l_c < -LENGTH_TOL * max(1.0, l):
        raise NegativeCruise(f"v_c={v_c:.4f} m/s needs {l - l_c:.3f} m but the segment is {l:.3f} m")
    l_c = max(l_c, 0.0)
    e_plus = segment_energy(v_c, a_plus, m)
    e_minus = segment_energy(v_c, a_minus, m)
    e_cruise = float(energy_per_distance(v_c, m)) * l_c if l_c > 0 else 0.0
    return e_plus + e_cruise + e_minus, (e_plus, e_cruise, e_minus)


def _energy_grid(v: np.ndarray, a_plus: np.ndarray, a_minus: np.ndarray, l: float, m: VehicleModel) -> np.ndarray:
    l_c = np.maximum(cruise_length(l, v, a_plus, a_minus), 0.0)
    try:
        return (accel_segment_energy_nowind(v, a_plus, m) + accel_segment_energy_nowind(v, a_minus, m)
                + energy_per_distance(v, m) * l_c)
    except SurfaceDomainError:
        return np.array([traversal_energy(*x, l, m)[0] for x in zip(v, a_plus, a_minus)])


def _candidate(v: float, a_plus: float, a_minus: float, l: float, m: VehicleModel,
               kind: CriticalPointKind) -> OptimalTraversal:
    total, breakdown = traversal_energy(v, a_plus, a_minus, l, m)
    return OptimalTraversal(v_c=v, a_plus=a_plus, a_minus=a_minus,
                            l_cruise=max(float(cruise_length(l, v, a_plus, a_minus)), 0.0),
                            energy_total=total, energy_breakdown=breakdown, critical_point_kind=kind)


def _select(candidates: list[OptimalTraversal], tie_tol: float) -> OptimalTraversal:
    best = min(c.energy_total for c in candidates)
    tied = [c for c in candidates if c.energy_total <= best + tie_tol]
    return max(tied, key=lambda c: c.v_c)


def _fallback(q: TraversalQuery) -> OptimalTraversal:
    """Quad hop to the highest reachable speed when v_qh cannot be reached."""
    m = q.vehicle
    v = v_max_achievable(q.length, q.a_lim_plus, q.a_lim_minus)
    dt = CONFIG.PLANNER.dt
    e_plus = _spline_energy(v, q.a_lim_plus, m, dt)
    e_minus = _spline_energy(v, q.a_lim_minus, m, dt)
    logger.info(f"Segment of {q.length:.2f} m never reaches {m.v_qh} m/s, planning a Quad hop at {v:.3f} m/s")
    return OptimalTraversal(v_c=v, a_plus=q.a_lim_plus, a_minus=q.a_lim_minus, l_cruise=0.0,
                            energy_total=e_plus + e_minus, energy_breakdown=(e_plus, 0.0, e_minus),
                            critical_point_kind=CriticalPointKind.FALLBACK)


def _corners(q: TraversalQuery, v_star: float, a_floor: float) -> list[OptimalTraversal]:
    m, l = q.vehicle, q.length
    found = []
    for a_plus in (min(a_floor, q.a_lim_plus), q.a_lim_plus):
        for a_minus in (max(-a_floor, q.a_lim_minus), q.a_lim_minus):
            v_top = min(v_star, v_max_achievable(l, a_plus, a_minus))
            if v_top < m.v_qh - LENGTH_TOL:
                continue
            for v in sorted({m.v_qh, max(v_top, m.v_qh)}):
                found.append(_candidate(v, a_plus, a_minus, l, m, CriticalPointKind.BOUNDARY))
    return found


def _interior(q: TraversalQuery, v_star: float, s: OptimizerSettings) -> list[OptimalTraversal]:
    m, l = q.vehicle, q.length
    a_lo_plus, a_lo_minus = min(s.a_floor, q.a_lim_plus), max(-s.a_floor, q.a_lim_minus)
    nv, na, nb = s.coarse_grid
    grid = np.meshgrid(np.linspace(m.v_qh, v_star, nv),
                       np.linspace(a_lo_plus, q.a_lim_plus, na),
                       np.linspace(q.a_lim_minus, a_lo_minus, nb), indexing="ij")
    v, a_plus, a_minus = (g.ravel() for g in grid)
    feasible = cruise_length(l, v, a_plus, a_minus) >= 0
    if not feasible.any():
        return []
    v, a_plus, a_minus = v[feasible], a_plus[feasible], a_minus[feasible]
    energy = _energy_grid(v, a_plus, a_minus, l, m)
    seeds = np.argsort(energy, kind="stable")[:s.n_seeds]

    def objective(x: np.ndarray) -> float:
        # l_c left unclipped so the objective stays smooth across the constraint
        return (segment_energy(x[0], x[1], m) + segment_energy(x[0], x[2], m)
                + float(energy_per_distance(x[0], m)) * float(cruise_length(l, *x)))

    bounds = [(m.v_qh, v_star - 1e-6), (a_lo_plus, q.a_lim_plus), (q.a_lim_minus, a_lo_minus)]
    constraint = {"type": "ineq", "fun": lambda x: float(cruise_length(l, *x))}
    found = []
    for i in seeds:
        x0 = np.array([v[i], a_plus[i], a_minus[i]])
        res = minimize(objective, x0, method="SLSQP", jac="3-point", bounds=bounds, constraints=[constraint],
                       options={"ftol": 1e-10, "maxiter": 200})
        vc, ap, am = (float(x) for x in res.x)
        l_c = float(cruise_length(l, vc, ap, am))
        if l_c < 0:
            if l_c < -1e-6 * max(1.0, l):
                logger.debug(f"SLSQP from {x0} ended infeasible (l_c={l_c:.3e}), skipped")
                continue
            vc = v_max_achievable(l, ap, am)
        v_edge = min(v_star, v_max_achievable(l, ap, am))
        interior = res.success and m.v_qh + 1e-6 < vc < v_edge - 1e-6 and l_c > 1e-6
        kind = CriticalPointKind.SOLUTION if interior else CriticalPointKind.BOUNDARY
        found.append(_candidate(vc, ap, am, l, m, kind))
    return found


def optimize(q: TraversalQuery, settings: OptimizerSettings | None = None) -> OptimalTraversal:
    """
    Minimum-energy still-air traversal for one segment.

    Falls back to a Quad hop when even the acceleration limits cannot reach v_qh.
    """
    s = settings or CONFIG.OPTIMIZER
    m = q.vehicle
    if v_max_achievable(q.length, q.a_lim_plus, q.a_lim_minus) < m.v_qh - LENGTH_TOL:
        return _fallback(q)
    v_star = best_cruise_speed(m)
    candidates = _corners(q, v_star, s.a_floor) + _interior(q, v_star, s)
    best = _select(candidates, s.tie_tol)
    if best.critical_point_kind is CriticalPointKind.SOLUTION:
        v_edge = v_max_achievable(q.length, best.a_plus, best.a_minus)
        if abs(best.v_c - v_edge) <= 1e-6:
            best = best.model_copy(update={"critical_point_kind": CriticalPointKind.BOUNDARY})
    logger.info(f"l={q.length:.1f} m: v_c={best.v_c:.3f} m/s, a=({best.a_plus:.3f}, {best.a_minus:.3f}), "
                f"l_c={best.l_cruise:.2f} m, E={best.energy_total:.1f} J ({best.critical_point_kind.value})")
    return best


def grid_oracle(q: TraversalQuery, dv: float | None = None, da: float | None = None,
                settings: OptimizerSettings | None = None) -> OptimalTraversal:
    """
    Brute-force lattice argmin of the traversal energy.

    The acceleration lattice steps down from the limits by ``da`` to the floor and is
    capped to the fitted surface domain.
    """
    s = settings or CONFIG.OPTIMIZER
    dv, da = dv or s.grid_dv, da or s.grid_da
    m, l = q.vehicle, q.length
    if v_max_achievable(l, q.a_lim_plus, q.a_lim_minus) < m.v_qh - LENGTH_TOL:
        return _fallback(q)
    a_cap = m.accel_energy_domain.a_max
    if q.a_lim_plus > a_cap or -q.a_lim_minus > a_cap:
        logger.warning(f"Oracle lattice capped to |a| <= {a_cap} m/s^2 (fitted surface domain)")
    a_top_plus, a_top_minus = min(q.a_lim_plus, a_cap), min(-q.a_lim_minus, a_cap)

    def lattice(top: float, bottom: float, step: float) -> np.ndarray:
        n = int(np.floor((top - bottom) / step + 1e-9)) + 1 if top > bottom else 1
        return top - step * np.arange(n)

    v_star = best_cruise_speed(m)
    v_axis = m.v_qh + dv * np.arange(int(np.floor((v_star - m.v_qh) / dv + 1e-9)) + 1)
    grid = np.meshgrid(v_axis, lattice(a_top_plus, s.a_floor, da), -lattice(a_top_minus, s.a_floor, da),
                       indexing="ij")
    v, a_plus, a_minus = (g.ravel() for g in grid)
    feasible = cruise_length(l, v, a_plus, a_minus) >= -LENGTH_TOL * max(1.0, l)
    v, a_plus, a_minus = v[feasible], a_plus[feasible], a_minus[feasible]
    energy = _energy_grid(v, a_plus, a_minus, l, m)
    tied = np.flatnonzero(energy <= energy.min() + s.tie_tol)
    k = tied[np.argmax(v[tied])]
    best = _candidate(float(v[k]), float(a_plus[k]), float(a_minus[k]), l, m, CriticalPointKind.BOUNDARY)
    v_edge = min(v_star, v_max_achievable(l, best.a_plus, best.a_minus))
    if m.v_qh + dv < best.v_c < v_edge - dv and best.l_cruise > 0:
        best = best.model_copy(update={"critical_point_kind": CriticalPointKind.SOLUTION})
    return best


def sample_traversal(opt: OptimalTraversal, m: VehicleModel, course: float = 0.0,
                     dt: float | None = None) -> tuple[TrajectoryTimeSeries, PhaseSummary]:
    """Time series of an optimised still-air traversal flown along ``course``."""
    dt = dt or CONFIG.PLANNER.dt
    parts = []
    for phase, spline in (("accel", build_spline(0.0, opt.v_c, opt.a_plus)),
                          ("decel", build_spline(opt.v_c, 0.0, opt.a_minus))):
        t, v, _ = spline.sample(dt)
        parts.append(ProfilePart.from_ground_track(phase, t, v, course, STILL_AIR))
    parts.insert(1, ProfilePart.cruise(opt.l_cruise / opt.v_c, opt.v_c, course, STILL_AIR, dt))
    series, energies = assemble_series(parts, m)
    distances = (accelerated_distance(opt.v_c, opt.a_plus), opt.l_cruise, accelerated_distance(opt.v_c, opt.a_minus))
    return series, summarize(parts, energies, distances)


def surface_consistency(m: VehicleModel, v_values=None, a_values=None, dt: float | None = None) -> pd.DataFrame:
    """
    Fitted accelerated-segment energy against power integrated along the same spline.

    Defaults to the integer speeds and the quarter-step rates of the fitted domain, with
    both signs of the rate. ``rel_error`` is (surface - integrated) / integrated.
    """
    d = m.accel_energy_domain
    v_values = np.arange(np.ceil(d.v_min), np.floor(d.v_max) + 0.5) if v_values is None else v_values
    a_values = np.arange(d.a_min, d.a_max + 1e-9, 0.25) if a_values is None else a_values
    dt = dt or CONFIG.PLANNER.dt
    rows = []
    for v_c in v_values:
        for a in a_values:
            for a_max in (abs(a), -abs(a)):
                surface = float(accel_segment_energy_nowind(v_c, a_max, m))
                integrated = _spline_energy(float(v_c), float(a_max), m, dt)
                rows.append({"v_c": float(v_c), "a_max": float(a_max), "surface_j": surface,
                             "integrated_j": integrated, "rel_error": (surface - integrated) / integrated})
    df = pd.DataFrame(rows, columns=["v_c", "a_max", "surface_j", "integrated_j", "rel_error"])
    worst = df.loc[df["rel_error"].abs().idxmax()]
    logger.info(f"Segment energy surface vs spline integration: worst {worst['rel_error']:+.1%} "
                f"at v_c={worst['v_c']:.2f} m/s, a={worst['a_max']:+.2f} m/s^2")
    return df
