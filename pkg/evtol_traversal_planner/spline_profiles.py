"""
Closed-form cubic speed splines for hover-to-cruise and cruise-to-hover segments.

A spline from v_start to v_end with zero end slopes reaches its peak rate ``a_max`` at
half duration, so duration = 3|dv| / (2|a_max|) and distance = (v_start + v_end) * duration / 2.
"""
import logging

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy.optimize import bisect

from evtol_traversal_planner.core.errors import InvalidSpline
from evtol_traversal_planner.vehicle_model import VehicleModel

logger = logging.getLogger(__name__)


def sample_times(duration: float, dt: float) -> np.ndarray:
    """Uniform grid on [0, duration] with spacing no larger than ``dt`` and at least two samples."""
    n = max(2, int(np.ceil(duration / dt - 1e-9)) + 1)
    return np.linspace(0.0, duration, n)


class SpeedSpline(BaseModel):
    """v(t) = c0 + c1 t + c2 t^2 + c3 t^3 on [0, duration]; held constant outside."""
    model_config = ConfigDict(frozen=True)

    v_start: float
    v_end: float
    a_max: float
    duration: float
    coeffs: tuple[float, float, float, float]

    @property
    def distance(self) -> float:
        return 0.5 * (self.v_start + self.v_end) * self.duration

    def speed(self, t):
        tc = np.clip(np.asarray(t, dtype=float), 0.0, self.duration)
        c0, c1, c2, c3 = self.coeffs
        # monotone between the end speeds; the clip removes roundoff past them
        v = np.clip(c0 + tc * (c1 + tc * (c2 + tc * c3)),
                    min(self.v_start, self.v_end), max(self.v_start, self.v_end))
        v = np.where(tc >= self.duration, self.v_end, v)
        return float(v) if np.ndim(v) == 0 else v

    def acceleration(self, t):
        t = np.asarray(t, dtype=float)
        tc = np.clip(t, 0.0, self.duration)
        _, c1, c2, c3 = self.coeffs
        a = np.where((t < 0) | (t > self.duration), 0.0, c1 + tc * (2 * c2 + 3 * c3 * tc))
        return float(a) if np.ndim(a) == 0 else a

    def sample(self, dt: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(t, v, a) on the uniform grid from sample_times."""
        t = sample_times(self.duration, dt)
        return t, self.speed(t), self.acceleration(t)


class SegmentGeometry(BaseModel):
    l_plus: float
    l_minus: float
    l_cruise: float
    v_max_achievable: float


class ModeSwitchTimes(BaseModel):
    t_qh: float | None = None
    t_hp: float | None = None
    a_qh: float | None = None
    a_hp: float | None = None


def build_spline(v_start: float, v_end: float, a_max: float) -> SpeedSpline:
    """
    Cubic with v(0)=v_start, v(T)=v_end, zero end slopes and peak rate ``a_max`` at T/2.

    Raises:
        InvalidSpline: ``a_max`` is zero or its sign disagrees with ``v_end - v_start``.
    """
    dv = v_end - v_start
    if a_max == 0 or dv == 0 or np.sign(a_max) != np.sign(dv):
        raise InvalidSpline(f"cannot build spline {v_start} -> {v_end} m/s with peak rate {a_max} m/s^2")
    duration = 3.0 * abs(dv) / (2.0 * abs(a_max))
    c2 = 3.0 * dv / duration ** 2
    c3 = -2.0 * dv / duration ** 3
    return SpeedSpline(v_start=v_start, v_end=v_end, a_max=a_max, duration=duration,
                       coeffs=(v_start, 0.0, c2, c3))


def accelerated_distance(v_c: float, a_max: float) -> float:
    """Distance of a hover <-> v_c spline: 3 v_c^2 / (4 |a_max|)."""
    return 3.0 * v_c ** 2 / (4.0 * abs(a_max))


def v_max_achievable(l: float, a_plus: float, a_minus: float) -> float:
    """Highest cruise speed reachable on length ``l`` with no cruise phase."""
    return float(np.sqrt((4.0 * l / 3.0) / (1.0 / a_plus - 1.0 / a_minus)))


def cruise_length(l: float, v_c, a_plus: float, a_minus: float):
    """Cruise length left on ``l``; a negative result means ``v_c`` cannot be reached and left again within ``l``."""
    return l - 0.75 * np.square(v_c) * (1.0 / a_plus - 1.0 / a_minus)


def segment_geometry(l: float, v_c: float, a_plus: float, a_minus: float) -> SegmentGeometry:
    return SegmentGeometry(l_plus=accelerated_distance(v_c, a_plus),
                           l_minus=accelerated_distance(v_c, a_minus),
                           l_cruise=float(cruise_length(l, v_c, a_plus, a_minus)),
                           v_max_achievable=v_max_achievable(l, a_plus, a_minus))


def _crossing_time(s: SpeedSpline, target: float, tol: float) -> float | None:
    lo, hi = sorted((s.v_start, s.v_end))
    if not lo <= target <= hi:
        return None
    if target == s.v_start:
        return 0.0
    if target == s.v_end:
        return s.duration
    return float(bisect(lambda t: s.speed(t) - target, 0.0, s.duration, xtol=tol))


def mode_switch_times(s: SpeedSpline, m: VehicleModel, tol: float = 1e-9) -> ModeSwitchTimes:
    """
    Times and rates at which a monotone spline crosses the Quad/Hybrid and Hybrid/Plane
    switch speeds; entries stay None when the spline never reaches that speed.
    """
    t_qh = _crossing_time(s, m.v_qh, tol)
    t_hp = _crossing_time(s, m.v_hp, tol)
    return ModeSwitchTimes(t_qh=t_qh, t_hp=t_hp,
                           a_qh=None if t_qh is None else s.acceleration(t_qh),
                           a_hp=None if t_hp is None else s.acceleration(t_hp))
