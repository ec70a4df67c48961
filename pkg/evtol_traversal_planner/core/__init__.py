import evtol_traversal_planner.core.logger
import evtol_traversal_planner.core.errors
from evtol_traversal_planner.core.config import CONFIG, PATHS
import evtol_traversal_planner.core.utils
from evtol_traversal_planner.core.export_handler import ExportHandler


__all__ = ["utils", "CONFIG", "PATHS", "ExportHandler"]
