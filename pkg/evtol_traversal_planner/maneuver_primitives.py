"""
Maneuver primitives for segments the straight line cannot fly.

Each end of the segment gets a pair of cubic splines, one in ground speed and one in
course, so the aircraft leaves and reaches hover pointing into the wind and turns onto
the cruise course while it speeds up. The cruise course itself is found by fixpoint
iteration on the displacement the two primitives cover.
"""
import logging
from enum import Enum
from typing import Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy.integrate import trapezoid

from evtol_traversal_planner.core.config import CONFIG, PlannerSettings
from evtol_traversal_planner.core.errors import (
    FixpointFailure, InfeasibleSegment, PrimitiveInfeasible, PrimitiveNotRequired
)
from evtol_traversal_planner.frames_wind import WindSpec, ground_speed_for_airspeed, normalize_angle
from evtol_traversal_planner.spline_profiles import SpeedSpline, build_spline, sample_times
from evtol_traversal_planner.trajectory import (
    PhaseSummary, ProfilePart, TrajectoryTimeSeries, assemble_series, summarize
)
from evtol_traversal_planner.vehicle_model import FlightMode, VehicleModel
from evtol_traversal_planner.wind_planner import check_level_segment, check_wind_gate

logger = logging.getLogger(__name__)

LIMIT_TOL = 1e-9


class PrimitiveKind(str, Enum):
    ACCEL = "accel"
    DECEL = "decel"


class ManeuverPrimitive(BaseModel):
    """
    Speed and course splines flown together for ``duration`` seconds.

    Both splines start at t=0 except the decel speed spline, which ends at ``duration``
    so the course change leads. A spline that is done holds its end value, and the
    delayed decel speed spline holds the cruise speed until it starts.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True)

    kind: PrimitiveKind
    speed_spline: SpeedSpline
    course_spline: SpeedSpline | None
    duration: float
    displacement: tuple[float, float]
    a_g_max: float
    chi_dot_max: float
    part: ProfilePart

    @property
    def max_heading_rate(self) -> float:
        return float(np.max(np.abs(self.part.sigma_dot)))


class PrimitivePlan(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    accel: ManeuverPrimitive
    decel: ManeuverPrimitive
    cruise_course: float
    cruise_waypoints: tuple[tuple[float, float], tuple[float, float]]
    cruise_length: float
    v_gc: float
    iterations: int
    residual: float
    series: TrajectoryTimeSeries
    summary: PhaseSummary

    @property
    def total_energy(self) -> float:
        return self.series.total_energy


def initial_hover_course(chi_st: float, w: WindSpec) -> float:
    """
    Course (and heading) at a hover waypoint: into the wind, on the side the straight
    course lies. The result is left unwrapped so the turn to the cruise course keeps
    its direction.

    Raises:
        PrimitiveNotRequired: no wind, so the straight line is always flyable.
    """
    if w.speed <= 0:
        raise PrimitiveNotRequired("maneuver primitives are not needed in still air")
    delta = normalize_angle(chi_st - w.heading)
    return w.heading + np.pi if delta > 0 else w.heading - np.pi


def _course_spline(chi_from: float, chi_to: float, chi_dot_max: float) -> SpeedSpline | None:
    if abs(chi_to - chi_from) <= 1e-12:
        return None
    return build_spline(chi_from, chi_to, np.copysign(chi_dot_max, chi_to - chi_from))


def _sample_primitive(kind: PrimitiveKind, speed: SpeedSpline, course: SpeedSpline | None, chi_from: float,
                      dt: float) -> tuple[np.ndarray, np.ndarray, np.ndarray, float]:
    t_k = max(speed.duration, course.duration if course else 0.0)
    t = sample_times(t_k, dt)
    delay = 0.0 if kind is PrimitiveKind.ACCEL else t_k - speed.duration
    v_g = speed.speed(t - delay)
    chi = course.speed(t) if course else np.full(t.shape, chi_from)
    return t, v_g, chi, t_k


def build_primitive(kind: PrimitiveKind, v_gc: float, chi_from: float, chi_to: float, a_g_max: float,
                    chi_dot_max: float, w: WindSpec, m: VehicleModel,
                    settings: PlannerSettings | None = None) -> ManeuverPrimitive:
    """
    Accel (hover to ``v_gc``) or decel (``v_gc`` to hover) primitive turning from
    ``chi_from`` to ``chi_to``.

    The course rate is backed off while the heading rate breaks its limit, the peak
    ground acceleration while airspeed acceleration or airspeed break theirs.

    Raises:
        PrimitiveInfeasible: a backoff reached its floor.
    """
    s = settings or CONFIG.PLANNER
    a = abs(a_g_max)
    chi_dot = abs(chi_dot_max)
    chi_dot_floor = np.deg2rad(s.min_chi_dot_deg)
    while True:
        speed = build_spline(0.0, v_gc, a) if kind is PrimitiveKind.ACCEL else build_spline(v_gc, 0.0, -a)
        course = _course_spline(chi_from, chi_to, chi_dot)
        t, v_g, chi, t_k = _sample_primitive(kind, speed, course, chi_from, s.dt)
        part = ProfilePart.from_ground_track(kind.value, t, v_g, chi, w)
        heading_ok = bool(np.all(np.abs(part.sigma_dot) <= m.sigma_dot_lim + LIMIT_TOL))
        accel_ok = bool(np.all(part.a_a <= m.a_lim_plus + LIMIT_TOL) and np.all(part.a_a >= m.a_lim_minus - LIMIT_TOL)
                        and np.all(part.v_a <= m.v_lim + LIMIT_TOL))
        if heading_ok and accel_ok:
            break
        if not heading_ok:
            chi_dot *= s.backoff
            if chi_dot < chi_dot_floor:
                raise PrimitiveInfeasible(f"{kind.value} primitive: course rate fell below {s.min_chi_dot_deg} deg/s "
                                          f"with heading rate still above {m.sigma_dot_lim_deg} deg/s")
        if not accel_ok:
            a *= s.backoff
            if a < s.min_a_g:
                raise PrimitiveInfeasible(f"{kind.value} primitive: ground acceleration fell below {s.min_a_g} m/s^2 "
                                          f"with airspeed limits still violated")
        logger.debug(f"{kind.value} primitive backoff: a_g={a:.4f} m/s^2, chi_dot={np.rad2deg(chi_dot):.3f} deg/s")

    displacement = (float(trapezoid(v_g * np.cos(chi), t)), float(trapezoid(v_g * np.sin(chi), t)))
    return ManeuverPrimitive(kind=kind, speed_spline=speed, course_spline=course, duration=t_k,
                             displacement=displacement, a_g_max=a if kind is PrimitiveKind.ACCEL else -a,
                             chi_dot_max=chi_dot, part=part)


def _decel_turn(chi_h: float, chi_c: float, direction: float | None) -> tuple[float, float]:
    """Turn from the cruise course back to the hover course, keeping ``direction`` once set."""
    d = normalize_angle(chi_h - chi_c)
    if direction is None:
        direction = np.sign(d) if abs(abs(d) - np.pi) > 1e-12 else np.sign(chi_c - chi_h)
    if direction > 0 > d:
        d += 2 * np.pi
    elif direction < 0 < d:
        d -= 2 * np.pi
    return d, direction


def plan_with_primitives(w_i: Sequence[float], w_j: Sequence[float], w: WindSpec, m: VehicleModel,
                         cruise_airspeed: float | None = None, mode_ceiling: FlightMode = FlightMode.PLANE,
                         settings: PlannerSettings | None = None) -> PrimitivePlan:
    """
    Accel primitive, straight cruise and decel primitive from ``w_i`` to ``w_j``.

    The cruise course starts on the straight course and is replaced by the bearing from
    the end of the accel primitive to the start of the decel primitive until the two
    agree within ``settings.eps``.

    Raises:
        WindTooStrong: wind gate violated.
        PrimitiveInfeasible: a primitive cannot meet the limits.
        FixpointFailure: no convergence within ``settings.max_fixpoint_iterations``.
        InfeasibleSegment: the primitives overrun each other along the segment.
    """
    s = settings or CONFIG.PLANNER
    chi_st, length = check_level_segment(w_i, w_j)
    va_c = s.cruise_airspeed if cruise_airspeed is None else cruise_airspeed
    check_wind_gate(w, va_c, m, s)
    chi_h = initial_hover_course(chi_st, w)
    start, end = np.asarray(w_i[:2], dtype=float), np.asarray(w_j[:2], dtype=float)

    def primitives_for(chi_c: float, direction: float | None):
        v_gc = ground_speed_for_airspeed(va_c, chi_c, w)
        accel = build_primitive(PrimitiveKind.ACCEL, v_gc, chi_h, chi_c, s.initial_a_g_max, m.sigma_dot_lim, w, m, s)
        turn, direction = _decel_turn(chi_h, chi_c, direction)
        decel = build_primitive(PrimitiveKind.DECEL, v_gc, chi_c, chi_c + turn, s.initial_a_g_max,
                                m.sigma_dot_lim, w, m, s)
        m1 = start + np.asarray(accel.displacement)
        m2 = end - np.asarray(decel.displacement)
        return v_gc, accel, decel, direction, m1, m2

    chi_c, direction, residual = chi_st, None, np.inf
    for iteration in range(1, s.max_fixpoint_iterations + 1):
        _, _, _, direction, m1, m2 = primitives_for(chi_c, direction)
        offset = m2 - m1
        chi_m = chi_c + normalize_angle(np.arctan2(offset[1], offset[0]) - chi_c)
        residual = abs(chi_m - chi_c)
        logger.debug(f"fixpoint pass {iteration}: cruise course {np.rad2deg(chi_m):.4f} deg, residual {residual:.2e}")
        chi_c = chi_m
        if residual < s.eps:
            break
    else:
        raise FixpointFailure(f"cruise course did not settle in {s.max_fixpoint_iterations} passes", residual)

    # primitives, cruise speed and waypoints all belong to the settled course
    v_gc, accel, decel, direction, m1, m2 = primitives_for(chi_c, direction)
    offset = m2 - m1
    along = float(offset @ np.array([np.cos(chi_st), np.sin(chi_st)]))
    if along <= 0:
        raise InfeasibleSegment(f"primitives cover more than the {length:.2f} m segment (cruise {along:.2f} m)")
    cruise_length = float(np.hypot(*offset))
    cruise = ProfilePart.cruise(cruise_length / v_gc, v_gc, float(chi_c), w, s.dt)
    parts = [accel.part, cruise, decel.part]
    series, energies = assemble_series(parts, m, mode_ceiling, s.steady_accel_tol)
    summary = summarize(parts, energies)
    logger.info(f"Primitive plan converged in {iteration} passes: cruise course {np.rad2deg(chi_c):.2f} deg, "
                f"{cruise_length:.1f} m at {v_gc:.3f} m/s, E={series.total_energy:.1f} J")
    return PrimitivePlan(accel=accel, decel=decel, cruise_course=float(chi_c),
                         cruise_waypoints=(tuple(m1), tuple(m2)), cruise_length=cruise_length, v_gc=v_gc,
                         iterations=iteration, residual=float(residual), series=series, summary=summary)
