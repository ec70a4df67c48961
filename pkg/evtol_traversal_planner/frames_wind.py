"""
Planar wind-triangle kinematics for level flight.

Angles are radians in (-pi, pi], measured like the course: 0 along +x (North), pi/2
along +y (East). Wind heading is the direction the wind blows toward.
"""
import logging
from typing import Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from evtol_traversal_planner.core.errors import DegenerateSegment, InfeasibleAirspeed, WindTooStrong

logger = logging.getLogger(__name__)

SPEED_EPS = 1e-12


def normalize_angle(x):
    """Wraps angles into (-pi, pi]; works on scalars and arrays."""
    wrapped = np.pi - np.mod(np.pi - np.asarray(x, dtype=float), 2 * np.pi)
    return float(wrapped) if np.ndim(wrapped) == 0 else wrapped


class WindSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    speed: float = Field(ge=0)
    heading: float = 0.0

    @field_validator("heading", mode="after")
    @classmethod
    def wrap_heading(cls, v: float) -> float:
        return normalize_angle(v)

    @classmethod
    def from_degrees(cls, speed: float, heading_deg: float) -> "WindSpec":
        return cls(speed=speed, heading=np.deg2rad(heading_deg))

    @property
    def vector(self) -> tuple[float, float]:
        return self.speed * np.cos(self.heading), self.speed * np.sin(self.heading)


class GroundState(BaseModel):
    model_config = ConfigDict(frozen=True)

    ground_speed: float = Field(ge=0)
    course: float

    @field_validator("course", mode="after")
    @classmethod
    def wrap_course(cls, v: float) -> float:
        return normalize_angle(v)


class AirState(BaseModel):
    model_config = ConfigDict(frozen=True)

    airspeed: float = Field(ge=0)
    heading: float

    @field_validator("heading", mode="after")
    @classmethod
    def wrap_heading(cls, v: float) -> float:
        return normalize_angle(v)


def air_velocity(v_g, chi, w: WindSpec, default_heading=None) -> tuple[np.ndarray, np.ndarray]:
    """
    Airspeed and heading for sampled ground speed and course.

    Where airspeed vanishes (hover in still air) the heading is taken from
    ``default_heading``, or from the course when none is given.
    """
    v_g = np.asarray(v_g, dtype=float)
    chi = np.broadcast_to(np.asarray(chi, dtype=float), v_g.shape)
    wx, wy = w.vector
    ax = v_g * np.cos(chi) - wx
    ay = v_g * np.sin(chi) - wy
    v_a = np.hypot(ax, ay)
    fallback = chi if default_heading is None else np.broadcast_to(np.asarray(default_heading, dtype=float), v_g.shape)
    sigma = np.where(v_a > SPEED_EPS, np.arctan2(ay, ax), fallback)
    return v_a, normalize_angle(sigma)


def air_from_ground(g: GroundState, w: WindSpec, default_heading: float | None = None) -> AirState:
    v_a, sigma = air_velocity(g.ground_speed, g.course, w, default_heading)
    return AirState(airspeed=float(v_a), heading=float(sigma))


def ground_from_air(a: AirState, w: WindSpec, default_course: float | None = None) -> GroundState:
    """Ground velocity from air velocity; a zero ground speed keeps ``default_course`` (the heading when none is given)."""
    wx, wy = w.vector
    vx = a.airspeed * np.cos(a.heading) + wx
    vy = a.airspeed * np.sin(a.heading) + wy
    v_g = float(np.hypot(vx, vy))
    if v_g > SPEED_EPS:
        course = float(np.arctan2(vy, vx))
    else:
        v_g = 0.0
        course = a.heading if default_course is None else default_course
    return GroundState(ground_speed=v_g, course=course)


def required_heading_rate(airspeed: float, airspeed_rate: float, course: float, w: WindSpec) -> float:
    """
    Heading rate that keeps a constant course while the airspeed changes, rad/s.

    Raises:
        InfeasibleAirspeed: airspeed does not exceed the crosswind component.
    """
    s = np.sin(course - w.heading)
    cross = w.speed * abs(s)
    if airspeed <= cross:
        raise InfeasibleAirspeed(f"airspeed {airspeed:.4f} m/s does not exceed crosswind component {cross:.4f} m/s")
    return float(-w.speed * s * airspeed_rate / (airspeed * np.sqrt(airspeed ** 2 - (w.speed * s) ** 2)))


def ground_speed_for_airspeed(airspeed: float, course: float, w: WindSpec) -> float:
    """
    Ground speed that holds ``airspeed`` on ``course`` in steady wind.

    Raises:
        InfeasibleAirspeed: the crosswind component alone exceeds the airspeed.
        WindTooStrong: the headwind component pushes the ground speed to zero or below.
    """
    rel = course - w.heading
    cross = w.speed * np.sin(rel)
    if airspeed <= abs(cross):
        raise InfeasibleAirspeed(f"airspeed {airspeed:.4f} m/s cannot cancel crosswind {abs(cross):.4f} m/s")
    v_g = w.speed * np.cos(rel) + np.sqrt(airspeed ** 2 - cross ** 2)
    if v_g <= SPEED_EPS:
        raise WindTooStrong(f"wind {w.speed:.3f} m/s stops progress at airspeed {airspeed:.3f} m/s")
    return float(v_g)


def crab_angle(heading: float, course: float) -> float:
    return normalize_angle(heading - course)


def straightline_course(w_i: Sequence[float], w_j: Sequence[float]) -> tuple[float, float]:
    """
    Course and horizontal length of the straight segment between two waypoints.

    Raises:
        DegenerateSegment: the waypoints coincide in the horizontal plane.
    """
    dx = float(w_j[0]) - float(w_i[0])
    dy = float(w_j[1]) - float(w_i[1])
    length = float(np.hypot(dx, dy))
    if length <= 1e-9:
        raise DegenerateSegment(f"waypoints {tuple(w_i)} and {tuple(w_j)} coincide horizontally")
    return float(np.arctan2(dy, dx)), length
