import click
import logging
from pathlib import Path
from evtol_traversal_planner.core import ExportHandler
from evtol_traversal_planner.core.config import PATHS
from evtol_traversal_planner.core.config_utils import save_config, save_mission
from evtol_traversal_planner.core.utils import list_files_in_directory
from evtol_traversal_planner.cli_io import (
    INFEASIBLE_ERRORS, SWEEP_ALIASES, SWEEP_KINDS, PlanReport, benchmark_table, format_table, load_mission, plan,
    sweep
)
from evtol_traversal_planner.no_wind_optimizer import surface_consistency
from evtol_traversal_planner.vehicle_model import default_vehicle

# Logging setup
logger = logging.getLogger(__name__)


def export_single_config(config_name: str, force_overwrite: bool) -> None:
    """
    Exports a single configuration file.

    Args:
        config_name (str): The name of the configuration file to export.
        force_overwrite (bool): If True, overwrites existing files without confirmation.

    Raises:
        ValueError: If the specified config name is not found.
    """
    if config_name in PATHS.config_files:
        config = PATHS.config_files[config_name]
        save_config(source=PATHS.default_settings / config,
                    destination=PATHS.user_settings / config,
                    force_overwrite=force_overwrite)
    else:
        raise ValueError(f"Config name {config_name} not found.")


def exit_code_for(err: Exception) -> int:
    """2 for an infeasible segment or wind, 1 for anything else."""
    return 2 if isinstance(err, INFEASIBLE_ERRORS) else 1


@click.group()
def cli():
    """Energy-aware traversal planner for QuadPlane eVTOL aircraft."""
    pass


@cli.command("plan")
@click.option('--config', 'config_path', required=True,
              type=click.Path(exists=True, dir_okay=False, path_type=Path),
              help="Mission JSON file.")
@click.option('--out-dir', type=click.Path(file_okay=False, path_type=Path), default=None,
              help="Output folder (defaults to EXPORT.path).")
@click.option('--format', 'fmt', type=click.Choice(['csv', 'json']), default='csv', show_default=True,
              help="Time-series file format.")
@click.pass_context
def plan_command(ctx: click.Context, config_path: Path, out_dir: Path | None, fmt: str) -> None:
    """
    Plans one mission and writes its time series and report.
    """
    handler = ExportHandler(out_dir)
    stem = config_path.stem
    code = 0
    try:
        mission = load_mission(config_path)
        report, series = plan(mission)
        handler.export_frame(series.to_frame(), f"{stem}_timeseries", fmt)
        handler.export_report(report.model_dump(mode="json"), f"{stem}_report.json")
        click.echo(f"{mission.name}: {report.verdict.value}, {report.total_energy / 1000:.2f} kJ, "
                   f"peak {report.peak_power:.1f} W")
    except Exception as e:
        logger.exception(f"Error planning {config_path}: {e}")
        click.echo(f"Error planning {config_path}: {e}", err=True)
        code = exit_code_for(e)
        if code == 2:
            handler.export_report(PlanReport.infeasible(stem, e).model_dump(mode="json"), f"{stem}_report.json")
    ctx.exit(code)


@cli.group()
def bench():
    """Benchmark comparisons."""
    pass


@bench.command()
@click.option('--config', 'config_path', required=True,
              type=click.Path(exists=True, dir_okay=False, path_type=Path),
              help="Windy mission JSON file.")
@click.option('--out-dir', type=click.Path(file_okay=False, path_type=Path), default=None,
              help="Also write <command>.csv to this folder.")
@click.pass_context
def modes(ctx: click.Context, config_path: Path, out_dir: Path | None) -> None:
    """
    Quad-only / Plane-only / Quad+Hybrid / Quad+Hybrid+Plane energy comparison.
    """
    try:
        df = benchmark_table(load_mission(config_path))
        click.echo(format_table(df))
        if out_dir:
            ExportHandler(out_dir).export_to_csv(df, f"{ctx.info_name}.csv")
    except Exception as e:
        logger.exception(f"Error building benchmark table: {e}")
        click.echo(f"Error building benchmark table: {e}", err=True)
        ctx.exit(exit_code_for(e))


bench.add_command(modes, name="table1")


@bench.command()
@click.option('--config', 'config_path', type=click.Path(exists=True, dir_okay=False, path_type=Path),
              default=None, help="Mission JSON whose vehicle is used (default vehicle otherwise).")
@click.option('--tolerance', type=float, default=0.05, show_default=True,
              help="Relative error reported as a mismatch.")
@click.option('--out-dir', type=click.Path(file_okay=False, path_type=Path), default=None,
              help="Also write surface.csv to this folder.")
@click.pass_context
def surface(ctx: click.Context, config_path: Path | None, tolerance: float, out_dir: Path | None) -> None:
    """
    Compares the fitted segment-energy surface with power integrated along the spline.
    """
    try:
        df = surface_consistency(load_mission(config_path).vehicle() if config_path else default_vehicle())
        off = df[df["rel_error"].abs() > tolerance]
        click.echo(f"{len(off)} of {len(df)} grid points differ by more than {tolerance:.0%}")
        for row in off.itertuples(index=False):
            click.echo(f"  v_c={row.v_c:5.2f} m/s  a={row.a_max:+.2f} m/s^2  {row.rel_error:+.1%}")
        if out_dir:
            ExportHandler(out_dir).export_to_csv(df, "surface.csv")
    except Exception as e:
        logger.exception(f"Error checking the energy surface: {e}")
        click.echo(f"Error checking the energy surface: {e}", err=True)
        ctx.exit(exit_code_for(e))


@cli.command("sweep")
@click.option('--kind', type=click.Choice(SWEEP_KINDS + tuple(SWEEP_ALIASES)), required=True,
              help="Dataset to produce.")
@click.option('--config', 'config_path', type=click.Path(exists=True, dir_okay=False, path_type=Path),
              default=None, help="Mission JSON whose vehicle is used (default vehicle otherwise).")
@click.option('--out-dir', type=click.Path(file_okay=False, path_type=Path), default=None,
              help="Output folder (defaults to EXPORT.path).")
@click.pass_context
def sweep_command(ctx: click.Context, kind: str, config_path: Path | None, out_dir: Path | None) -> None:
    """
    Writes <kind>.csv with the sweep dataset.
    """
    try:
        vehicle = load_mission(config_path).vehicle() if config_path else None
        file = ExportHandler(out_dir).export_to_csv(sweep(kind, vehicle), f"{kind}.csv")
        click.echo(f"Sweep {kind} written to {file}")
    except Exception as e:
        logger.exception(f"Error running sweep {kind}: {e}")
        click.echo(f"Error running sweep {kind}: {e}", err=True)
        ctx.exit(exit_code_for(e))


@cli.command()
@click.option('--config-name',
              type=click.Choice(list(PATHS.config_files.keys()) + ['all'], case_sensitive=False),
              default="all",
              show_default=True,
              help="Name of the configuration file to export.")
@click.option('--force', is_flag=True, help="Force overwrite existing configuration files without confirmation.")
def export_config(config_name: str, force: bool) -> None:
    """
    Exports configuration files to the user folder.
    """
    if config_name == "all":
        for name in PATHS.config_files.keys():
            export_single_config(name, force)
    else:
        export_single_config(config_name, force)


@cli.command()
@click.option('--force', is_flag=True, help="Force overwrite existing mission files without confirmation.")
def export_missions(force: bool) -> None:
    """
    Copies the bundled example missions to the user folder.
    """
    for mission_file in list_files_in_directory(PATHS.default_missions, ('json',)):
        save_mission(source=mission_file, destination=PATHS.user_missions / mission_file.name, force_overwrite=force)


if __name__ == "__main__":
    cli()
