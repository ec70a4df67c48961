"""
Sampled trajectories: per-phase kinematics, their concatenation into one time series,
and the power/energy attached to it.
"""
import logging

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict
from scipy.integrate import cumulative_trapezoid, trapezoid

from evtol_traversal_planner.frames_wind import WindSpec, air_velocity
from evtol_traversal_planner.spline_profiles import sample_times
from evtol_traversal_planner.vehicle_model import MODES, FlightMode, VehicleModel, power_profile

logger = logging.getLogger(__name__)

TIMESERIES_COLUMNS = ["t", "v_g", "v_a", "sigma_deg", "chi_deg", "a_a", "sigma_dot_deg", "power_w", "energy_j", "mode"]


def heading_rate(sigma: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Numeric heading rate: central differences inside, one-sided at the ends, on the unwrapped heading."""
    if t.size < 2:
        return np.zeros_like(t)
    return np.gradient(np.unwrap(sigma), t)


def airspeed_rate(v_a: np.ndarray, t: np.ndarray) -> np.ndarray:
    if t.size < 2:
        return np.zeros_like(t)
    return np.gradient(v_a, t)


class ProfilePart(BaseModel):
    """One phase (accel, cruise or decel) sampled from its own t = 0."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    phase: str
    t: np.ndarray
    v_g: np.ndarray
    chi: np.ndarray
    v_a: np.ndarray
    sigma: np.ndarray
    a_a: np.ndarray
    sigma_dot: np.ndarray

    @property
    def duration(self) -> float:
        return float(self.t[-1]) if self.t.size else 0.0

    @property
    def distance(self) -> float:
        return float(trapezoid(self.v_g, self.t)) if self.t.size > 1 else 0.0

    @classmethod
    def from_ground_track(cls, phase: str, t: np.ndarray, v_g: np.ndarray, chi, w: WindSpec,
                          default_heading=None) -> "ProfilePart":
        """Derives airspeed, heading and their rates from a sampled ground track."""
        chi = np.broadcast_to(np.asarray(chi, dtype=float), v_g.shape).copy()
        v_a, sigma = air_velocity(v_g, chi, w, default_heading)
        return cls(phase=phase, t=t, v_g=v_g, chi=chi, v_a=v_a, sigma=sigma,
                   a_a=airspeed_rate(v_a, t), sigma_dot=heading_rate(sigma, t))

    @classmethod
    def cruise(cls, duration: float, v_gc: float, chi: float, w: WindSpec, dt: float) -> "ProfilePart":
        """Constant ground velocity; a zero-length cruise is a single sample."""
        t = sample_times(duration, dt) if duration > 0 else np.zeros(1)
        v_g = np.full(t.shape, v_gc)
        v_a, sigma = air_velocity(v_g, chi, w)
        return cls(phase="cruise", t=t, v_g=v_g, chi=np.full(t.shape, chi), v_a=v_a, sigma=sigma,
                   a_a=np.zeros_like(t), sigma_dot=np.zeros_like(t))


class PhaseSummary(BaseModel):
    durations: tuple[float, float, float]
    distances: tuple[float, float, float]
    energies: tuple[float, float, float]

    @property
    def total_energy(self) -> float:
        return float(sum(self.energies))

    @property
    def total_duration(self) -> float:
        return float(sum(self.durations))


class TrajectoryTimeSeries(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    t: np.ndarray
    v_g: np.ndarray
    v_a: np.ndarray
    sigma: np.ndarray
    chi: np.ndarray
    a_a: np.ndarray
    sigma_dot: np.ndarray
    power: np.ndarray
    energy_cum: np.ndarray
    mode: np.ndarray

    @property
    def total_energy(self) -> float:
        return float(self.energy_cum[-1]) if self.energy_cum.size else 0.0

    @property
    def peak_power(self) -> float:
        return float(np.max(self.power)) if self.power.size else 0.0

    def energy_by_mode(self) -> dict[str, float]:
        """Trapezoidal energy split by the mode flown over each sample interval (left sample)."""
        totals = {fm.value: 0.0 for fm in MODES}
        if self.t.size < 2:
            return totals
        slices = 0.5 * (self.power[1:] + self.power[:-1]) * np.diff(self.t)
        for fm in MODES:
            totals[fm.value] = float(np.sum(slices[self.mode[:-1] == fm.value]))
        return totals

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "t": self.t,
            "v_g": self.v_g,
            "v_a": self.v_a,
            "sigma_deg": np.rad2deg(self.sigma),
            "chi_deg": np.rad2deg(self.chi),
            "a_a": self.a_a,
            "sigma_dot_deg": np.rad2deg(self.sigma_dot),
            "power_w": self.power,
            "energy_j": self.energy_cum,
            "mode": self.mode,
        }, columns=TIMESERIES_COLUMNS)


def assemble_series(parts: list[ProfilePart], m: VehicleModel, mode_ceiling: FlightMode = FlightMode.PLANE,
                    steady_accel_tol: float | None = None) -> tuple[TrajectoryTimeSeries, list[float]]:
    """
    Concatenates phases into one time series and prices it.

    Each phase is priced on its own samples; consecutive phases share their junction
    sample, so the first sample of every later phase is dropped. Heading rate is
    recomputed over the joined, unwrapped heading.

    :return: (time series, energy per part in J)
    """
    energies, chunks = [], []
    offset = 0.0
    for k, part in enumerate(parts):
        power, idx = power_profile(part.v_a, part.a_a, m, mode_ceiling, steady_accel_tol)
        energies.append(float(trapezoid(power, part.t)) if part.t.size > 1 else 0.0)
        start = 0 if k == 0 else 1
        if part.t.size > start:
            chunks.append({
                "t": part.t[start:] + offset,
                "v_g": part.v_g[start:], "v_a": part.v_a[start:],
                "sigma": part.sigma[start:], "chi": part.chi[start:],
                "a_a": part.a_a[start:], "power": power[start:],
                "mode": np.array([MODES[i].value for i in idx[start:]]),
            })
        offset += part.duration

    joined = {key: np.concatenate([c[key] for c in chunks]) for key in chunks[0]}
    sigma_dot = heading_rate(joined["sigma"], joined["t"])
    energy_cum = (cumulative_trapezoid(joined["power"], joined["t"], initial=0.0)
                  if joined["t"].size > 1 else np.zeros(1))
    series = TrajectoryTimeSeries(t=joined["t"], v_g=joined["v_g"], v_a=joined["v_a"], sigma=joined["sigma"],
                                  chi=joined["chi"], a_a=joined["a_a"], sigma_dot=sigma_dot,
                                  power=joined["power"], energy_cum=energy_cum, mode=joined["mode"])
    logger.debug(f"Assembled {len(parts)} phases into {series.t.size} samples, {series.total_energy:.1f} J")
    return series, energies


def summarize(parts: list[ProfilePart], energies: list[float], distances: tuple[float, float, float] | None = None
              ) -> PhaseSummary:
    """Accel/cruise/decel summary; ``distances`` overrides the integrated ones when known in closed form."""
    by_phase = {p.phase: (p, e) for p, e in zip(parts, energies)}
    order = ("accel", "cruise", "decel")
    durations = tuple(by_phase[ph][0].duration if ph in by_phase else 0.0 for ph in order)
    if distances is None:
        distances = tuple(by_phase[ph][0].distance if ph in by_phase else 0.0 for ph in order)
    phase_energies = tuple(by_phase[ph][1] if ph in by_phase else 0.0 for ph in order)
    return PhaseSummary(durations=durations, distances=distances, energies=phase_energies)
