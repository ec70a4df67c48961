"""
Mission files, plan orchestration and the benchmark / sweep datasets behind the CLI.
"""
import logging
from enum import Enum
from pathlib import Path

import numpy as np
import pandas as pd
from prettytable import PrettyTable
from pydantic import BaseModel, Field, ValidationError, model_validator

from evtol_traversal_planner.core.config import CONFIG, PlannerSettings, SweepSettings
from evtol_traversal_planner.core.config_utils import format_validation_error
from evtol_traversal_planner.core.errors import (
    ConfigError, FixpointFailure, InfeasibleSegment, PrimitiveInfeasible, WindTooStrong
)
from evtol_traversal_planner.frames_wind import WindSpec, air_velocity, crab_angle, ground_speed_for_airspeed
from evtol_traversal_planner.maneuver_primitives import plan_with_primitives
from evtol_traversal_planner.no_wind_optimizer import (
    TraversalQuery, optimize, sample_traversal, traversal_energy
)
from evtol_traversal_planner.spline_profiles import cruise_length
from evtol_traversal_planner.trajectory import PhaseSummary, TrajectoryTimeSeries
from evtol_traversal_planner.vehicle_model import (
    FlightMode, VehicleModel, best_cruise_speed, cruise_power, default_vehicle, load_vehicle
)
from evtol_traversal_planner.wind_planner import check_level_segment, feasibility_band, straight_traversal_in_wind

logger = logging.getLogger(__name__)

INFEASIBLE_ERRORS = (InfeasibleSegment, PrimitiveInfeasible, FixpointFailure, WindTooStrong)
SWEEP_KINDS = ("cruise-speed", "acceleration", "segment-length", "wind-angle")
SWEEP_ALIASES = {"fig8": "cruise-speed", "fig9": "acceleration", "fig10": "segment-length", "fig11": "wind-angle"}


class WindConfig(BaseModel):
    speed: float = Field(default=0.0, ge=0)
    heading_deg: float = 0.0


class PlannerOverrides(BaseModel):
    """Per-mission overrides of CONFIG.PLANNER; unset fields keep the defaults."""
    dt: float | None = Field(default=None, gt=0)
    min_v_gc: float | None = Field(default=None, gt=0)
    min_a_g: float | None = Field(default=None, gt=0)
    initial_a_g_max: float | None = Field(default=None, gt=0)
    backoff: float | None = Field(default=None, gt=0, lt=1)
    eps: float | None = Field(default=None, gt=0)
    max_fixpoint_iterations: int | None = Field(default=None, ge=1)
    cruise_airspeed: float | None = Field(default=None, gt=0)
    strict_wind_gate: bool | None = None


class OptimizerOverrides(BaseModel):
    a_lim: float = Field(default=1.5, gt=0)


class MissionConfig(BaseModel):
    name: str = "mission"
    start: tuple[float, float, float]
    end: tuple[float, float, float]
    wind: WindConfig = WindConfig()
    vehicle_path: Path | None = None
    planner: PlannerOverrides = PlannerOverrides()
    optimizer: OptimizerOverrides = OptimizerOverrides()

    @model_validator(mode="after")
    def check_altitude(self) -> "MissionConfig":
        if abs(self.start[2] - self.end[2]) > 1e-9:
            raise ValueError(f"waypoints must share one altitude, got {self.start[2]} and {self.end[2]}")
        return self

    @property
    def wind_spec(self) -> WindSpec:
        return WindSpec.from_degrees(self.wind.speed, self.wind.heading_deg)

    def planner_settings(self) -> PlannerSettings:
        overrides = self.planner.model_dump(exclude_none=True)
        return PlannerSettings(**{**CONFIG.PLANNER.model_dump(), **overrides})

    def vehicle(self) -> VehicleModel:
        return load_vehicle(self.vehicle_path) if self.vehicle_path else default_vehicle()


class Verdict(str, Enum):
    STRAIGHT = "straight"
    PRIMITIVE = "primitive"
    INFEASIBLE = "infeasible"


class PlanReport(BaseModel):
    mission: str
    verdict: Verdict
    summary: PhaseSummary | None = None
    total_energy: float | None = None
    peak_power: float | None = None
    energy_by_mode: dict[str, float] = {}
    cruise_airspeed: float | None = None
    cruise_ground_speed: float | None = None
    crab_angle_deg: float | None = None
    max_heading_rate_deg: float | None = None
    model_energy: float | None = None
    critical_point_kind: str | None = None
    fixpoint_iterations: int | None = None
    message: str | None = None

    @classmethod
    def from_series(cls, mission: str, verdict: Verdict, series: TrajectoryTimeSeries, summary: PhaseSummary,
                    **extra) -> "PlanReport":
        return cls(mission=mission, verdict=verdict, summary=summary, total_energy=series.total_energy,
                   peak_power=series.peak_power, energy_by_mode=series.energy_by_mode(),
                   max_heading_rate_deg=float(np.rad2deg(np.max(np.abs(series.sigma_dot)))), **extra)

    @classmethod
    def infeasible(cls, mission: str, err: Exception) -> "PlanReport":
        return cls(mission=mission, verdict=Verdict.INFEASIBLE, message=f"{type(err).__name__}: {err}")


def load_mission(path: str | Path) -> MissionConfig:
    """
    Reads and validates a mission JSON file.

    :param path: path to the mission file.
    :return: validated MissionConfig.
    """
    path = Path(path)
    try:
        mission = MissionConfig.model_validate_json(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        logger.error(f"Mission file not found: {path}")
        raise ConfigError(f"Mission file not found: {path}")
    except ValidationError as e:
        logger.error(f"Invalid mission {path.name}: {e}")
        raise ConfigError(f"Invalid mission {path.name}: {format_validation_error(e)}")
    logger.info(f"Loaded mission '{mission.name}' from {path}")
    return mission


def plan(mission: MissionConfig) -> tuple[PlanReport, TrajectoryTimeSeries]:
    """
    Still air goes to the traversal optimizer; in wind the straight line is tried
    first and maneuver primitives take over when it is not flyable.
    """
    m = mission.vehicle()
    s = mission.planner_settings()
    w = mission.wind_spec
    if w.speed == 0:
        chi, length = check_level_segment(mission.start, mission.end)
        opt = optimize(TraversalQuery.symmetric(length, mission.optimizer.a_lim, m))
        series, summary = sample_traversal(opt, m, chi, s.dt)
        report = PlanReport.from_series(mission.name, Verdict.STRAIGHT, series, summary, cruise_airspeed=opt.v_c,
                                        cruise_ground_speed=opt.v_c, crab_angle_deg=0.0,
                                        model_energy=opt.energy_total,
                                        critical_point_kind=opt.critical_point_kind.value)
        return report, series

    straight = straight_traversal_in_wind(mission.start, mission.end, w, m, settings=s)
    if straight.stf:
        report = PlanReport.from_series(mission.name, Verdict.STRAIGHT, straight.series, straight.summary,
                                        cruise_airspeed=straight.cruise_airspeed, cruise_ground_speed=straight.v_gc,
                                        crab_angle_deg=float(np.rad2deg(straight.crab_angle)))
        return report, straight.series

    logger.info(f"Mission '{mission.name}': straight line not flyable, planning maneuver primitives")
    prim = plan_with_primitives(mission.start, mission.end, w, m, settings=s)
    v_a, sigma = air_velocity(prim.v_gc, prim.cruise_course, w)
    report = PlanReport.from_series(mission.name, Verdict.PRIMITIVE, prim.series, prim.summary,
                                    cruise_airspeed=float(v_a), cruise_ground_speed=prim.v_gc,
                                    crab_angle_deg=float(np.rad2deg(crab_angle(float(sigma), prim.cruise_course))),
                                    fixpoint_iterations=prim.iterations)
    return report, prim.series


BENCHMARK_COLUMNS = ["scenario", "crab_angle_deg", "peak_power_w", "energy_j", "savings_pct"]


def benchmark_table(mission: MissionConfig) -> pd.DataFrame:
    """
    Quad-only, Plane-only, Quad+Hybrid and Quad+Hybrid+Plane flights of one windy segment.

    Plane-only is a cruise between the waypoints without hover ends. Savings are
    relative to the Quad-only energy.
    """
    m = mission.vehicle()
    s = mission.planner_settings()
    w = mission.wind_spec
    b = CONFIG.BENCHMARK
    chi, length = check_level_segment(mission.start, mission.end)

    rows = []
    for scenario, airspeed, ceiling in (("Quad-only", b.quad_only_airspeed, FlightMode.QUAD),
                                        ("Quad+Hybrid", b.cruise_airspeed, FlightMode.HYBRID),
                                        ("Quad+Hybrid+Plane", b.cruise_airspeed, FlightMode.PLANE)):
        result = straight_traversal_in_wind(mission.start, mission.end, w, m, cruise_airspeed=airspeed,
                                            mode_ceiling=ceiling, settings=s)
        rows.append({"scenario": scenario, "crab_angle_deg": float(np.rad2deg(abs(result.crab_angle))),
                     "peak_power_w": result.series.peak_power, "energy_j": result.series.total_energy})

    v_gc = ground_speed_for_airspeed(b.cruise_airspeed, chi, w)
    _, sigma = air_velocity(v_gc, chi, w)
    p_plane = float(cruise_power(b.cruise_airspeed, m, FlightMode.PLANE))
    rows.insert(1, {"scenario": "Plane-only", "crab_angle_deg": float(np.rad2deg(abs(crab_angle(float(sigma), chi)))),
                    "peak_power_w": p_plane, "energy_j": p_plane * length / v_gc})

    df = pd.DataFrame(rows)
    e_quad = df.loc[df["scenario"] == "Quad-only", "energy_j"].iloc[0]
    df["savings_pct"] = 100.0 * (1.0 - df["energy_j"] / e_quad)
    return df[BENCHMARK_COLUMNS]


def format_table(df: pd.DataFrame) -> str:
    """Renders a benchmark frame as a fixed-width text table."""
    table = PrettyTable()
    table.field_names = ["Scenario", "Crab angle, deg", "Peak power, W", "Energy, kJ", "Savings, %"]
    table.align = "r"
    table.align["Scenario"] = "l"
    for row in df.itertuples(index=False):
        table.add_row([row.scenario, f"{row.crab_angle_deg:.1f}", f"{row.peak_power_w:.1f}",
                       f"{row.energy_j / 1000:.2f}", f"{row.savings_pct:.1f}"])
    return table.get_string()


def _speed_axis(m: VehicleModel, step: float) -> np.ndarray:
    v_star = best_cruise_speed(m)
    return m.v_qh + step * np.arange(int(np.floor((v_star - m.v_qh) / step + 1e-9)) + 1)


def _energy_curve(length: float, a: float, speeds: np.ndarray, m: VehicleModel) -> list[dict]:
    rows = []
    for v in speeds:
        l_c = float(cruise_length(length, v, a, -a))
        if l_c < 0:
            continue
        rows.append({"v_c": float(v), "energy_j": traversal_energy(float(v), a, -a, length, m)[0], "l_cruise": l_c})
    return rows


def sweep(kind: str, m: VehicleModel | None = None, settings: SweepSettings | None = None) -> pd.DataFrame:
    """
    Plot-ready tables:
      cruise-speed    energy over cruise speed for several segment lengths
      acceleration    energy over cruise speed for several acceleration limits
      segment-length  optimal traversal over segment length per acceleration limit
      wind-angle      straight-line feasibility over relative wind angle and backoff floor

    The short names fig8, fig9, fig10 and fig11 are accepted as aliases, in that order.
    """
    m = m or default_vehicle()
    kind = SWEEP_ALIASES.get(kind, kind)
    s = settings or CONFIG.SWEEP
    if kind == "cruise-speed":
        rows = [{"length": float(l), **r} for l in sorted(s.speed_lengths)
                for r in _energy_curve(l, s.speed_accel, _speed_axis(m, s.speed_step), m)]
        return pd.DataFrame(rows, columns=["length", "v_c", "energy_j", "l_cruise"])
    if kind == "acceleration":
        rows = [{"a_max": float(a), "v_c": r["v_c"], "energy_j": r["energy_j"]} for a in sorted(s.accel_values)
                for r in _energy_curve(s.accel_length, a, _speed_axis(m, s.speed_step), m)]
        return pd.DataFrame(rows, columns=["a_max", "v_c", "energy_j"])
    if kind == "segment-length":
        rows = []
        for a in sorted(s.length_accels):
            for l in sorted(s.length_values):
                opt = optimize(TraversalQuery.symmetric(l, a, m))
                rows.append({"a_lim": float(a), "length": float(l), "v_c": opt.v_c, "l_cruise": opt.l_cruise,
                             "kind": opt.critical_point_kind.value, "energy_j": opt.energy_total})
        return pd.DataFrame(rows, columns=["a_lim", "length", "v_c", "l_cruise", "kind", "energy_j"])
    if kind == "wind-angle":
        step = s.wind_delta_step_deg
        deltas = np.arange(-180.0 + step, 180.0 + step / 2, step)
        return feasibility_band(s.wind_speed, s.wind_length, deltas.tolist(), s.wind_min_a_g, m)
    raise ValueError(f"Unknown sweep kind {kind!r}, expected one of {SWEEP_KINDS + tuple(SWEEP_ALIASES)}")
