from pathlib import Path
from typing import Any
from pydantic import BaseModel, Field, field_validator
from pydantic_settings import BaseSettings
from platformdirs import user_config_dir

from evtol_traversal_planner.core.config_utils import (
    load_config, resolve_path, merge_dicts
)


class WorkingPaths(BaseSettings):
    """
    Defines essential working paths for configuration, vehicle data and user output.
    """
    root_dir: Path = Path(__file__).resolve().parent.parent
    module_name: str = root_dir.name
    user_folder: Path = Path(user_config_dir(module_name))

    default_settings: Path = Path.joinpath(root_dir, 'settings')
    user_settings: Path = Path.joinpath(user_folder, 'settings')

    default_missions: Path = Path.joinpath(root_dir, 'missions')
    user_missions: Path = Path.joinpath(user_folder, 'missions')

    config_files: dict[str, str] = {
        "config": "config.yaml",
        "log_config": "log_config.yaml",
    }

    model_config = {
        "env_prefix": "APP_",
        "env_nested_delimiter": "__",
        "extra": "ignore"
    }


PATHS = WorkingPaths()


class PlannerSettings(BaseModel):
    """
    Defaults for the wind planner and the maneuver-primitive builder.
    """
    dt: float = Field(default=0.01, gt=0)
    backoff: float = Field(default=0.9, gt=0, lt=1)
    min_v_gc: float = Field(default=0.01, gt=0)
    min_a_g: float = Field(default=0.25, gt=0)
    initial_a_g_max: float = Field(default=2.5, gt=0)
    cruise_airspeed: float = Field(default=12.0, gt=0)
    eps: float = Field(default=1.0e-4, gt=0)
    max_fixpoint_iterations: int = Field(default=50, ge=1)
    min_chi_dot_deg: float = Field(default=0.5, gt=0)
    steady_accel_tol: float = Field(default=1.0e-3, ge=0)
    strict_wind_gate: bool = False


class OptimizerSettings(BaseModel):
    """
    Search settings for the zero-wind traversal optimizer and its brute-force oracle.
    """
    a_floor: float = Field(default=0.5, gt=0)
    coarse_grid: tuple[int, int, int] = (20, 10, 10)
    n_seeds: int = Field(default=5, ge=1)
    grid_dv: float = Field(default=0.05, gt=0)
    grid_da: float = Field(default=0.025, gt=0)
    tie_tol: float = Field(default=1.0e-6, ge=0)


class VehicleSettings(BaseModel):
    path: Path | str = Field(default=Path("data/quadplane.json"))

    @field_validator("path", mode="before")
    @classmethod
    def validate_paths(cls, v: str | Path) -> Path:
        # relative to the package root, not the user folder
        path = Path(v).expanduser()
        return path if path.is_absolute() else (PATHS.root_dir / path).resolve()


class ExportSettings(BaseModel):
    """
    Configuration settings for exported time series, reports and sweeps.
    """
    path: Path | str = Field(default=Path("output"))
    to_csv: dict[str, Any]
    to_json: dict[str, Any]

    @field_validator("path", mode="before")
    @classmethod
    def validate_paths(cls, v: str | Path) -> Path:
        return resolve_path(v, PATHS.user_folder)


class BenchmarkSettings(BaseModel):
    quad_only_airspeed: float = 6.0
    cruise_airspeed: float = 12.0


class SweepSettings(BaseModel):
    """
    Default grids for the sweep datasets.
    """
    speed_lengths: list[float]
    speed_accel: float = 1.0
    speed_step: float = 0.25
    accel_length: float = 500.0
    accel_values: list[float]
    length_values: list[float]
    length_accels: list[float]
    wind_speed: float = 4.0
    wind_length: float = 500.0
    wind_delta_step_deg: float = 5.0
    wind_min_a_g: list[float]


# Logging settings
class LoggingSettings(BaseModel):
    """
    Logging configuration.
    """
    version: int = 1
    disable_existing_loggers: bool = False
    formatters: dict[str, Any]
    handlers: dict[str, Any]
    loggers: dict[str, Any]
    root: dict[str, Any]

    @field_validator("handlers", mode="before")
    @classmethod
    def validate_paths(cls, handlers: dict[str, Any]) -> dict[str, Any]:
        """
        Ensures log file paths exist before validation.
        """
        for handler in handlers.values():
            if isinstance(handler, dict) and "filename" in handler:
                filename = handler["filename"]
                handler["filename"] = str(resolve_path(filename, PATHS.user_folder / "logs"))
        return handlers


# Main configuration class
class Config(BaseSettings):
    """
    Main configuration class that loads and merges all configurations.
    """
    PLANNER: PlannerSettings
    OPTIMIZER: OptimizerSettings
    VEHICLE: VehicleSettings
    EXPORT: ExportSettings
    BENCHMARK: BenchmarkSettings
    SWEEP: SweepSettings
    LOGGING: LoggingSettings

    model_config = {
        "env_prefix": "APP_",
        "env_nested_delimiter": "__",
        "extra": "ignore"
    }

    @classmethod
    def settings_customise_sources(cls, settings_cls, init_settings, env_settings,
                                   dotenv_settings, file_secret_settings):
        # APP_* environment variables win over the merged YAML files
        return env_settings, init_settings

    @classmethod
    def load(cls) -> "Config":
        """
        Loads and merges configurations from the package settings folder and the user settings folder.
        """
        merged_config = {}
        for folder in (PATHS.root_dir, PATHS.user_folder):
            for file in PATHS.config_files.values():
                path = Path.joinpath(folder, 'settings', file)
                data = load_config(path)  # Load YAML
                merge_dicts(merged_config, data)  # Merge configs
        return cls(**merged_config)


# Load the final configuration
CONFIG = Config.load()
