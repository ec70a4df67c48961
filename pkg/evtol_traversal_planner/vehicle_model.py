"""
QuadPlane performance model: flight-mode schedule, cruise and accelerated power fits,
energy-per-distance fits and the accelerated-segment energy surfaces.

All coefficients come from a JSON vehicle file (see ``data/quadplane.json``); every
evaluation accepts scalars or numpy arrays and refuses to extrapolate outside the
fitted domains.
"""
import logging
import re
from enum import Enum
from functools import lru_cache
from pathlib import Path
from typing import Literal

import numpy as np
from numpy.polynomial import polynomial as npoly
from pydantic import BaseModel, ConfigDict, ValidationError, model_validator
from scipy.integrate import trapezoid

from evtol_traversal_planner.core.config import CONFIG
from evtol_traversal_planner.core.config_utils import format_validation_error
from evtol_traversal_planner.core.errors import ConfigError, OutOfEnvelope, SurfaceDomainError

logger = logging.getLogger(__name__)

POWER_SURFACE_TERMS = frozenset({"p00", "p10", "p01", "p20", "p11", "p02", "p30", "p21", "p12", "p03",
                                 "p40", "p31", "p22", "p13", "p50", "p41", "p32", "p23"})
ENERGY_SURFACE_TERMS = frozenset({"p00", "p10", "p01", "p20", "p11", "p02", "p30", "p21", "p12", "p03",
                                  "p31", "p22", "p13", "p04"})
DOMAIN_TOL = 1e-9

_SURFACE_KEY = re.compile(r"^p(\d)(\d)$")
_ROW_KEY = re.compile(r"^p(\d+)$")


class FlightMode(str, Enum):
    QUAD = "Quad"
    HYBRID = "Hybrid"
    PLANE = "Plane"


# schedule order; array code paths carry the index into this tuple
MODES: tuple[FlightMode, ...] = (FlightMode.QUAD, FlightMode.HYBRID, FlightMode.PLANE)


class CruisePowerFit(BaseModel):
    """Power polynomial in airspeed, coefficients p0..pn."""
    coefficients: dict[str, float]
    rmse: float

    @model_validator(mode="after")
    def check_terms(self) -> "CruisePowerFit":
        orders = sorted(int(_ROW_KEY.match(k).group(1)) for k in self.coefficients if _ROW_KEY.match(k))
        if len(orders) != len(self.coefficients) or orders != list(range(len(orders))):
            raise ValueError(f"expected contiguous terms p0..pn, got {sorted(self.coefficients)}")
        return self

    def row(self) -> np.ndarray:
        return np.array([self.coefficients[f"p{i}"] for i in range(len(self.coefficients))])

    def evaluate(self, v: np.ndarray) -> np.ndarray:
        return npoly.polyval(v, self.row())


class SurfaceFit(BaseModel):
    """Polynomial surface in (airspeed, acceleration); key ``pij`` multiplies v**i * a**j."""
    coefficients: dict[str, float]
    rmse: float
    printed: dict[str, float] | None = None

    @model_validator(mode="after")
    def check_keys(self) -> "SurfaceFit":
        bad = [k for k in self.coefficients if not _SURFACE_KEY.match(k)]
        if bad:
            raise ValueError(f"unrecognised surface terms {bad}")
        return self

    def matrix(self) -> np.ndarray:
        powers = {k: tuple(int(d) for d in _SURFACE_KEY.match(k).groups()) for k in self.coefficients}
        deg_v = max(i for i, _ in powers.values())
        deg_a = max(j for _, j in powers.values())
        c = np.zeros((deg_v + 1, deg_a + 1))
        for key, (i, j) in powers.items():
            c[i, j] = self.coefficients[key]
        return c

    def evaluate(self, v: np.ndarray, a: np.ndarray) -> np.ndarray:
        return npoly.polyval2d(v, a, self.matrix())


class EnergyPerDistanceFit(BaseModel):
    """
    Energy per distance in J/m.

    ``power`` form: f0 * v**(-f1) + f2 (Quad, Hybrid); ``quadratic`` form: f0 + f1*v + f2*v**2 (Plane).
    ``printed`` keeps the row as originally tabulated when the active ordering differs.
    """
    form: Literal["power", "quadratic"]
    coefficients: dict[str, float]
    rmse: float
    printed: dict[str, float] | None = None

    @model_validator(mode="after")
    def check_terms(self) -> "EnergyPerDistanceFit":
        if set(self.coefficients) != {"f0", "f1", "f2"}:
            raise ValueError(f"expected terms f0, f1, f2, got {sorted(self.coefficients)}")
        return self

    def evaluate(self, v: np.ndarray, coefficients: dict[str, float] | None = None) -> np.ndarray:
        f = coefficients or self.coefficients
        if self.form == "power":
            return f["f0"] * np.power(v, -f["f1"]) + f["f2"]
        return npoly.polyval(v, [f["f0"], f["f1"], f["f2"]])


class FitDomain(BaseModel):
    v_min: float
    v_max: float
    a_min: float
    a_max: float


class VehicleModel(BaseModel):
    """
    Immutable aircraft description: mode switch speeds, limits and the fit tables.

    Heading-rate limit is stored in deg/s as in the vehicle file; ``sigma_dot_lim``
    gives it in rad/s.
    """
    model_config = ConfigDict(frozen=True)

    name: str = "vehicle"
    v_qh: float
    v_hp: float
    v_lim: float
    v_stall: float
    a_lim_plus: float
    a_lim_minus: float
    sigma_dot_lim_deg: float
    accel_power_limit: float = 2.5
    epd_quad_min_speed: float = 1.0
    plane_power_source: Literal["energy_per_distance", "cruise_fit"] = "energy_per_distance"
    cruise_power_fits: dict[FlightMode, CruisePowerFit]
    accel_power_fits: dict[FlightMode, dict[Literal["plus", "minus"], SurfaceFit]]
    epd_fits: dict[FlightMode, EnergyPerDistanceFit]
    accel_energy_fits: dict[Literal["plus", "minus"], SurfaceFit]
    accel_energy_domain: FitDomain

    @model_validator(mode="after")
    def check_invariants(self) -> "VehicleModel":
        if not 0 < self.v_qh < self.v_hp <= self.v_lim:
            raise ValueError("switch speeds must satisfy 0 < v_qh < v_hp <= v_lim")
        if self.v_stall > self.v_hp:
            raise ValueError("v_stall must not exceed v_hp")
        if not self.a_lim_plus > 0 > self.a_lim_minus:
            raise ValueError("acceleration limits must satisfy a_lim_plus > 0 > a_lim_minus")
        if self.sigma_dot_lim_deg <= 0:
            raise ValueError("sigma_dot_lim_deg must be positive")
        missing = [m.value for m in MODES if m not in self.cruise_power_fits or m not in self.epd_fits]
        if missing:
            raise ValueError(f"cruise power / energy-per-distance fits missing for {missing}")
        for mode in (FlightMode.QUAD, FlightMode.HYBRID):
            fits = self.accel_power_fits.get(mode, {})
            for sign in ("plus", "minus"):
                if sign not in fits:
                    raise ValueError(f"accel power surface missing for {mode.value}/{sign}")
                if set(fits[sign].coefficients) != POWER_SURFACE_TERMS:
                    raise ValueError(f"accel power surface {mode.value}/{sign} is incomplete")
        for sign in ("plus", "minus"):
            if sign not in self.accel_energy_fits:
                raise ValueError(f"accelerated-segment energy surface missing for {sign}")
            if set(self.accel_energy_fits[sign].coefficients) != ENERGY_SURFACE_TERMS:
                raise ValueError(f"accelerated-segment energy surface {sign} is incomplete")
        return self

    @property
    def sigma_dot_lim(self) -> float:
        return float(np.deg2rad(self.sigma_dot_lim_deg))


def load_vehicle(path: str | Path) -> VehicleModel:
    """
    Reads and validates a vehicle model JSON file.

    :param path: path to the JSON document.
    :return: validated VehicleModel.
    """
    path = Path(path)
    try:
        model = VehicleModel.model_validate_json(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        logger.error(f"Vehicle model file not found: {path}")
        raise ConfigError(f"Vehicle model file not found: {path}")
    except ValidationError as e:
        logger.error(f"Invalid vehicle model {path.name}: {e}")
        raise ConfigError(f"Invalid vehicle model {path.name}: {format_validation_error(e)}")
    logger.info(f"Loaded vehicle model '{model.name}' from {path}")
    return model


@lru_cache(maxsize=1)
def default_vehicle() -> VehicleModel:
    """The vehicle configured under VEHICLE.path."""
    return load_vehicle(CONFIG.VEHICLE.path)


def _restore_shape(result: np.ndarray, like) -> float | np.ndarray:
    return float(result[0]) if np.ndim(like) == 0 else result.reshape(np.shape(like))


def _check_envelope(v: np.ndarray, m: VehicleModel) -> None:
    bad = np.flatnonzero(~np.isfinite(v) | (v < 0) | (v > m.v_lim + DOMAIN_TOL))
    if bad.size:
        i = int(bad[0])
        raise OutOfEnvelope(f"airspeed {v[i]:.4f} m/s outside [0, {m.v_lim}] at sample {i}")


def mode_index(v, m: VehicleModel) -> np.ndarray:
    """
    Mode schedule as indices into MODES, half-open intervals:
    Quad below v_qh, Hybrid on [v_qh, v_hp), Plane from v_hp.
    """
    v = np.atleast_1d(np.asarray(v, dtype=float))
    _check_envelope(v, m)
    return np.select([v < m.v_qh, v < m.v_hp], [0, 1], default=2)


def flight_mode(v: float, m: VehicleModel) -> FlightMode:
    return MODES[int(mode_index(v, m)[0])]


def _modes_for(v: np.ndarray, m: VehicleModel, mode: FlightMode | None) -> np.ndarray:
    if mode is None:
        return mode_index(v, m)
    _check_envelope(v, m)
    return np.full(v.shape, MODES.index(FlightMode(mode)))


def _cruise_power_by_index(v: np.ndarray, idx: np.ndarray, m: VehicleModel) -> np.ndarray:
    p = np.empty_like(v)
    for i, fm in enumerate(MODES):
        sel = idx == i
        if not sel.any():
            continue
        if fm is FlightMode.PLANE and m.plane_power_source == "energy_per_distance":
            p[sel] = m.epd_fits[fm].evaluate(v[sel]) * v[sel]
        else:
            p[sel] = m.cruise_power_fits[fm].evaluate(v[sel])
    return p


def _accel_power_by_index(v: np.ndarray, a: np.ndarray, idx: np.ndarray, m: VehicleModel) -> np.ndarray:
    over = np.flatnonzero(np.abs(a) > m.accel_power_limit + DOMAIN_TOL)
    if over.size:
        i = int(over[0])
        raise SurfaceDomainError(f"acceleration {a[i]:.4f} m/s^2 beyond ±{m.accel_power_limit} at sample {i}")
    plane = np.flatnonzero(idx == 2)
    if plane.size:
        raise SurfaceDomainError(f"accelerated power is not modelled in Plane mode (sample {int(plane[0])})")
    p = np.empty_like(v)
    for i, fm in enumerate(MODES[:2]):
        for sign, sel_sign in (("plus", a >= 0), ("minus", a < 0)):
            sel = (idx == i) & sel_sign
            if sel.any():
                p[sel] = m.accel_power_fits[fm][sign].evaluate(v[sel], a[sel])
    return p


def cruise_power(v, m: VehicleModel, mode: FlightMode | None = None):
    """
    Steady level-flight power in W.

    :param v: airspeed, m/s (scalar or array).
    :param m: vehicle model.
    :param mode: force a flight mode instead of the speed schedule.
    :return: power with the shape of ``v``.
    """
    arr = np.atleast_1d(np.asarray(v, dtype=float))
    return _restore_shape(_cruise_power_by_index(arr, _modes_for(arr, m, mode), m), v)


def accel_power(v, a, m: VehicleModel, mode: FlightMode | None = None):
    """
    Instantaneous power under airspeed acceleration ``a`` in Quad or Hybrid mode, in W.

    The sign of ``a`` selects the accelerating or decelerating surface.
    """
    v_arr, a_arr = np.broadcast_arrays(np.atleast_1d(np.asarray(v, dtype=float)),
                                       np.atleast_1d(np.asarray(a, dtype=float)))
    idx = _modes_for(v_arr, m, mode)
    like = v if np.ndim(v) >= np.ndim(a) else a
    return _restore_shape(_accel_power_by_index(v_arr, a_arr, idx, m), like)


def energy_per_distance(v, m: VehicleModel, mode: FlightMode | None = None):
    """
    Cruise energy per metre F(v) = P(v)/v in J/m.

    Quad mode is only fitted from ``epd_quad_min_speed`` upwards.
    """
    arr = np.atleast_1d(np.asarray(v, dtype=float))
    idx = _modes_for(arr, m, mode)
    slow = np.flatnonzero((idx == 0) & (arr < m.epd_quad_min_speed - DOMAIN_TOL))
    if slow.size:
        i = int(slow[0])
        raise OutOfEnvelope(f"Quad cruise below {m.epd_quad_min_speed} m/s is not fitted (v={arr[i]:.4f}, sample {i})")
    f = np.empty_like(arr)
    for i, fm in enumerate(MODES):
        sel = idx == i
        if sel.any():
            f[sel] = m.epd_fits[fm].evaluate(arr[sel])
    return _restore_shape(f, v)


def accel_segment_energy_nowind(v_c, a_max, m: VehicleModel):
    """
    Energy in J of a hover-to-``v_c`` (``a_max`` > 0) or ``v_c``-to-hover (``a_max`` < 0)
    cubic-spline segment in still air, from the fitted surface.
    """
    v_arr, a_arr = np.broadcast_arrays(np.atleast_1d(np.asarray(v_c, dtype=float)),
                                       np.atleast_1d(np.asarray(a_max, dtype=float)))
    d = m.accel_energy_domain
    outside = ((v_arr < d.v_min - DOMAIN_TOL) | (v_arr > d.v_max + DOMAIN_TOL)
               | (np.abs(a_arr) < d.a_min - DOMAIN_TOL) | (np.abs(a_arr) > d.a_max + DOMAIN_TOL))
    if outside.any():
        i = int(np.flatnonzero(outside)[0])
        raise SurfaceDomainError(f"(v_c={v_arr[i]:.4f}, a_max={a_arr[i]:.4f}) outside the fitted domain "
                                 f"[{d.v_min}, {d.v_max}] x ±[{d.a_min}, {d.a_max}]")
    energy = np.where(a_arr >= 0,
                      m.accel_energy_fits["plus"].evaluate(v_arr, a_arr),
                      m.accel_energy_fits["minus"].evaluate(v_arr, a_arr))
    like = v_c if np.ndim(v_c) >= np.ndim(a_max) else a_max
    return _restore_shape(np.asarray(energy, dtype=float), like)


def power_profile(v_a, a_a, m: VehicleModel, mode_ceiling: FlightMode = FlightMode.PLANE,
                  steady_accel_tol: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """
    Power along a sampled airspeed profile.

    Samples scheduled above ``mode_ceiling`` are flown in the ceiling mode. Quad/Hybrid
    samples with |a| above ``steady_accel_tol`` use the accelerated surfaces, the rest
    the cruise fits; Plane acceleration is neglected.

    :return: (power in W, mode index per sample)
    """
    tol = CONFIG.PLANNER.steady_accel_tol if steady_accel_tol is None else steady_accel_tol
    v = np.atleast_1d(np.asarray(v_a, dtype=float))
    a = np.atleast_1d(np.asarray(a_a, dtype=float))
    if v.shape != a.shape:
        raise ValueError(f"airspeed and acceleration samples differ in length: {v.shape} vs {a.shape}")
    idx = np.minimum(mode_index(v, m), MODES.index(FlightMode(mode_ceiling)))
    steady = (np.abs(a) <= tol) | (idx == 2)
    power = np.empty_like(v)
    if steady.any():
        power[steady] = _cruise_power_by_index(v[steady], idx[steady], m)
    moving = ~steady
    over = np.flatnonzero(moving & (np.abs(a) > m.accel_power_limit + DOMAIN_TOL))
    if over.size:
        i = int(over[0])
        raise SurfaceDomainError(f"acceleration {a[i]:.4f} m/s^2 beyond ±{m.accel_power_limit} at sample {i}")
    if moving.any():
        power[moving] = _accel_power_by_index(v[moving], a[moving], idx[moving], m)
    return power, idx


def integrate_power(t, v_a, a_a, m: VehicleModel, mode_ceiling: FlightMode = FlightMode.PLANE,
                    steady_accel_tol: float | None = None) -> float:
    """
    Trapezoidal energy in J of a sampled profile; fewer than two samples cost nothing.
    """
    t = np.asarray(t, dtype=float)
    if t.size < 2:
        return 0.0
    power, _ = power_profile(v_a, a_a, m, mode_ceiling, steady_accel_tol)
    return float(trapezoid(power, t))


def best_cruise_speed(m: VehicleModel, step: float = 0.01) -> float:
    """Airspeed minimising F over the mode schedule on [epd_quad_min_speed, v_hp]."""
    n = int(round((m.v_hp - m.epd_quad_min_speed) / step)) + 1
    v = np.linspace(m.epd_quad_min_speed, m.v_hp, n)
    return float(v[np.argmin(energy_per_distance(v, m))])


def fit_diagnostics(m: VehicleModel) -> dict[str, float]:
    """
    Consistency figures for the fit tables at the Hybrid/Plane switch speed and on the
    shared Quad/Hybrid domain of the cruise and zero-acceleration surfaces.
    """
    plane = m.epd_fits[FlightMode.PLANE]
    diag = {
        "plane_cubic_power_at_v_hp": float(m.cruise_power_fits[FlightMode.PLANE].evaluate(m.v_hp)),
        "plane_reconciled_power_at_v_hp": float(plane.evaluate(m.v_hp) * m.v_hp),
        "plane_epd_at_v_hp": float(plane.evaluate(m.v_hp)),
    }
    if plane.printed:
        diag["plane_printed_epd_at_v_hp"] = float(plane.evaluate(m.v_hp, plane.printed))
    for mode, lo, hi in ((FlightMode.QUAD, 0.0, m.v_qh), (FlightMode.HYBRID, m.v_qh, m.v_hp)):
        v = np.linspace(lo, hi, 21)
        cruise = m.cruise_power_fits[mode].evaluate(v)
        for sign in ("plus", "minus"):
            surface = m.accel_power_fits[mode][sign].evaluate(v, np.zeros_like(v))
            diag[f"{mode.value.lower()}_{sign}_zero_accel_max_residual"] = float(np.max(np.abs(surface - cruise)))
    return diag
