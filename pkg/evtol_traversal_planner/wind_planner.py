"""
Straight-line hover-to-hover traversal in steady wind.

``comp_acc_seg`` builds one accelerated segment as a cubic ground-speed spline along a
fixed course and backs its peak ground acceleration off until the resulting airspeed
acceleration and heading rate respect the vehicle limits. ``straight_traversal_in_wind``
wraps two such segments around a cruise phase, shrinking the cruise ground speed until
they fit the segment, and reports whether the straight line is flyable (STF).
"""
import logging
from typing import Sequence

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator

from evtol_traversal_planner.core.config import CONFIG, PlannerSettings
from evtol_traversal_planner.core.errors import (
    DegenerateSegment, InfeasibleSegment, PlanningError, WindTooStrong
)
from evtol_traversal_planner.frames_wind import (
    WindSpec, air_velocity, crab_angle, ground_speed_for_airspeed, straightline_course
)
from evtol_traversal_planner.spline_profiles import build_spline
from evtol_traversal_planner.trajectory import (
    PhaseSummary, ProfilePart, TrajectoryTimeSeries, assemble_series, summarize
)
from evtol_traversal_planner.vehicle_model import FlightMode, VehicleModel

logger = logging.getLogger(__name__)

LIMIT_TOL = 1e-9


class WindTraversalConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    v_gc_star: float = Field(gt=0)
    dt: float = Field(gt=0)
    min_v_gc: float = Field(gt=0)
    min_a_g: float = Field(gt=0)
    initial_a_g_max: float = Field(gt=0)
    backoff: float = Field(gt=0, lt=1)

    @model_validator(mode="after")
    def check_floors(self) -> "WindTraversalConfig":
        if self.min_v_gc >= self.v_gc_star:
            raise ValueError(f"min_v_gc {self.min_v_gc} must be below v_gc_star {self.v_gc_star}")
        if self.min_a_g > self.initial_a_g_max:
            raise ValueError(f"min_a_g {self.min_a_g} exceeds initial_a_g_max {self.initial_a_g_max}")
        return self

    @classmethod
    def from_settings(cls, v_gc_star: float, settings: PlannerSettings | None = None) -> "WindTraversalConfig":
        s = settings or CONFIG.PLANNER
        return cls(v_gc_star=v_gc_star, dt=s.dt, min_v_gc=s.min_v_gc, min_a_g=s.min_a_g,
                   initial_a_g_max=s.initial_a_g_max, backoff=s.backoff)


class AcceleratedSegment(BaseModel):
    """Hover <-> cruise segment; ``within_limits`` is False when the backoff ran out."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    part: ProfilePart
    v_gc: float
    a_g_max: float
    length: float
    duration: float
    within_limits: bool


class WindTraversal(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    stf: bool
    series: TrajectoryTimeSeries
    summary: PhaseSummary
    course: float
    v_gc: float
    cruise_airspeed: float
    crab_angle: float
    accel: AcceleratedSegment
    decel: AcceleratedSegment

    @property
    def max_heading_rate_deg(self) -> float:
        return float(np.rad2deg(np.max(np.abs(self.series.sigma_dot))))


def segment_within_limits(part: ProfilePart, m: VehicleModel) -> bool:
    """Airspeed acceleration, airspeed and heading-rate limits over every sample."""
    return bool(np.all(part.a_a <= m.a_lim_plus + LIMIT_TOL)
                and np.all(part.a_a >= m.a_lim_minus - LIMIT_TOL)
                and np.all(part.v_a <= m.v_lim + LIMIT_TOL)
                and np.all(np.abs(part.sigma_dot) <= m.sigma_dot_lim + LIMIT_TOL))


def comp_acc_seg(v_gc: float, a_g_max: float, chi: float, w: WindSpec, cfg: WindTraversalConfig,
                 m: VehicleModel) -> AcceleratedSegment:
    """
    Accelerated segment along ``chi``: hover to ``v_gc`` for ``a_g_max`` > 0, ``v_gc`` to
    hover for ``a_g_max`` < 0.

    While the sampled airspeed acceleration or heading rate breaks a limit, ``a_g_max`` is
    scaled by ``cfg.backoff``. Once the next step would fall below ``cfg.min_a_g`` the last
    profile is returned with ``within_limits=False``.
    """
    phase = "accel" if a_g_max > 0 else "decel"
    a = a_g_max
    while True:
        spline = build_spline(0.0, v_gc, a) if a > 0 else build_spline(v_gc, 0.0, a)
        t, v_g, _ = spline.sample(cfg.dt)
        part = ProfilePart.from_ground_track(phase, t, v_g, chi, w)
        ok = segment_within_limits(part, m)
        if ok or abs(a) * cfg.backoff < cfg.min_a_g:
            if not ok:
                logger.debug(f"{phase} at v_gc={v_gc:.3f} exhausted backoff at a_g={a:.4f}")
            return AcceleratedSegment(part=part, v_gc=v_gc, a_g_max=a, length=spline.distance,
                                      duration=spline.duration, within_limits=ok)
        logger.debug(f"{phase} at v_gc={v_gc:.3f}: a_g={a:.4f} breaks a limit, backing off")
        a *= cfg.backoff


def check_level_segment(w_i: Sequence[float], w_j: Sequence[float]) -> tuple[float, float]:
    """Course and length of a level segment; altitude changes are not planned."""
    if len(w_i) > 2 and len(w_j) > 2 and abs(float(w_i[2]) - float(w_j[2])) > 1e-9:
        raise DegenerateSegment(f"waypoints {tuple(w_i)} and {tuple(w_j)} differ in altitude")
    return straightline_course(w_i, w_j)


def check_wind_gate(w: WindSpec, cruise_airspeed: float, m: VehicleModel, settings: PlannerSettings) -> None:
    """
    Raises:
        WindTooStrong: the wind reaches the cruise airspeed, or exceeds v_qh under the strict gate.
    """
    if settings.strict_wind_gate and w.speed > m.v_qh + LIMIT_TOL:
        raise WindTooStrong(f"wind {w.speed:.3f} m/s exceeds v_qh={m.v_qh} m/s (strict gate)")
    if w.speed >= cruise_airspeed:
        raise WindTooStrong(f"wind {w.speed:.3f} m/s is not below cruise airspeed {cruise_airspeed:.3f} m/s")


def straight_traversal_in_wind(w_i: Sequence[float], w_j: Sequence[float], w: WindSpec, m: VehicleModel,
                               cfg: WindTraversalConfig | None = None, cruise_airspeed: float | None = None,
                               mode_ceiling: FlightMode = FlightMode.PLANE,
                               settings: PlannerSettings | None = None) -> WindTraversal:
    """
    Plans accel, cruise and decel along the straight line from ``w_i`` to ``w_j``.

    Args:
        w_i, w_j: waypoints (x, y[, z]) in metres.
        w: steady wind.
        m: vehicle model.
        cfg: loop parameters; built from ``settings`` and the cruise airspeed when omitted.
        cruise_airspeed: target cruise airspeed, defaults to ``settings.cruise_airspeed``.
        mode_ceiling: highest flight mode used when pricing the plan.
        settings: planner defaults, ``CONFIG.PLANNER`` when omitted.

    Returns:
        WindTraversal with the STF verdict. Plans with ``stf=False`` still carry full profiles.

    Raises:
        WindTooStrong: wind gate violated.
        InfeasibleSegment: cruise ground speed fell below ``min_v_gc`` with the segments still
            longer than the waypoint distance.
    """
    s = settings or CONFIG.PLANNER
    chi, length = check_level_segment(w_i, w_j)
    va_c = s.cruise_airspeed if cruise_airspeed is None else cruise_airspeed
    check_wind_gate(w, va_c, m, s)
    cfg = cfg or WindTraversalConfig.from_settings(ground_speed_for_airspeed(va_c, chi, w), s)

    v_gc = cfg.v_gc_star
    while True:
        # a_g_max restarts from its initial value on every pass
        accel = comp_acc_seg(v_gc, cfg.initial_a_g_max, chi, w, cfg, m)
        decel = comp_acc_seg(v_gc, -cfg.initial_a_g_max, chi, w, cfg, m)
        l_c = length - accel.length - decel.length
        if l_c >= 0:
            break
        v_gc *= cfg.backoff
        if v_gc < cfg.min_v_gc:
            raise InfeasibleSegment(f"segment of {length:.2f} m too short even at v_gc={cfg.min_v_gc} m/s")
        logger.debug(f"l_c={l_c:.2f} m < 0, reducing v_gc to {v_gc:.3f} m/s")

    cruise = ProfilePart.cruise(l_c / v_gc, v_gc, chi, w, cfg.dt)
    series, energies = assemble_series([accel.part, cruise, decel.part], m, mode_ceiling, s.steady_accel_tol)
    summary = summarize([accel.part, cruise, decel.part], energies, (accel.length, l_c, decel.length))
    stf = bool(accel.within_limits and decel.within_limits
               and np.all(np.abs(series.sigma_dot) <= m.sigma_dot_lim + LIMIT_TOL))
    v_a, sigma = air_velocity(v_gc, chi, w)
    result = WindTraversal(stf=stf, series=series, summary=summary, course=chi, v_gc=v_gc,
                           cruise_airspeed=float(v_a), crab_angle=crab_angle(float(sigma), chi),
                           accel=accel, decel=decel)
    logger.info(f"Straight traversal {length:.1f} m at course {np.rad2deg(chi):.1f} deg: STF={stf}, "
                f"v_gc={v_gc:.3f} m/s, max heading rate {result.max_heading_rate_deg:.2f} deg/s, "
                f"E={series.total_energy:.1f} J")
    return result


def feasibility_band(wind_speed: float, length: float, delta_sigmas_deg: Sequence[float],
                     min_a_g_values: Sequence[float], m: VehicleModel, course_deg: float = 90.0,
                     settings: PlannerSettings | None = None) -> pd.DataFrame:
    """
    STF over relative wind angles and backoff floors.

    The relative angle is course minus wind heading, so 0 is a pure tailwind and 180 a
    pure headwind. Segments that raise a planning error count as infeasible.

    :return: DataFrame with columns min_a_g, delta_sigma_deg, stf sorted by those keys.
    """
    s = settings or CONFIG.PLANNER
    chi = np.deg2rad(course_deg)
    w_i = (0.0, 0.0, 0.0)
    w_j = (length * np.cos(chi), length * np.sin(chi), 0.0)
    rows = []
    for min_a_g in sorted(min_a_g_values):
        run_settings = s.model_copy(update={"min_a_g": min_a_g})
        for delta in sorted(delta_sigmas_deg):
            w = WindSpec.from_degrees(wind_speed, course_deg - delta)
            try:
                stf = straight_traversal_in_wind(w_i, w_j, w, m, settings=run_settings).stf
            except PlanningError as e:
                logger.info(f"delta_sigma={delta} deg, min_a_g={min_a_g}: {e}")
                stf = False
            rows.append({"min_a_g": min_a_g, "delta_sigma_deg": delta, "stf": stf})
    return pd.DataFrame(rows, columns=["min_a_g", "delta_sigma_deg", "stf"])
