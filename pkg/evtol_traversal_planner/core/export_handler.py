import json
import logging
from pathlib import Path
from typing import Any

import pandas as pd

from .config import CONFIG
from .errors import ExportError

logger = logging.getLogger(__name__)


class ExportHandler:
    """
    Writes time series, sweep tables and reports with the pandas settings from CONFIG.EXPORT.
    """

    def __init__(self, export_path: str | Path | None = None) -> None:
        """
        :param export_path: output folder; CONFIG.EXPORT.path when omitted.
        """
        self.logger = logger
        self.export_path = Path(export_path) if export_path else CONFIG.EXPORT.path
        self.csv_settings = CONFIG.EXPORT.to_csv
        self.json_settings = CONFIG.EXPORT.to_json

    def _target(self, file_name: str) -> Path:
        file = self.export_path / file_name
        file.parent.mkdir(parents=True, exist_ok=True)
        return file

    def export_to_csv(self, df: pd.DataFrame, file_name: str) -> Path:
        """
        Exports a DataFrame to a CSV file.

        :param df: DataFrame to export.
        :param file_name: name of the output file inside the export folder.
        :return: path to the written file.
        """
        try:
            file = self._target(file_name)
            df.to_csv(file, **self.csv_settings)
        except (OSError, ValueError) as err:
            self.logger.error(f"Failed to export data to CSV: {err}")
            raise ExportError(f"Failed to write {file_name}: {err}")
        self.logger.info(f"Data exported successfully to {file}")
        return file

    def export_to_json(self, df: pd.DataFrame, file_name: str) -> Path:
        try:
            file = self._target(file_name)
            df.to_json(file, **self.json_settings)
        except (OSError, ValueError) as err:
            self.logger.error(f"Failed to export data to JSON: {err}")
            raise ExportError(f"Failed to write {file_name}: {err}")
        self.logger.info(f"Data exported successfully to {file}")
        return file

    def export_frame(self, df: pd.DataFrame, file_name: str, fmt: str = "csv") -> Path:
        """Dispatches on ``fmt`` ('csv' or 'json'); ``file_name`` gets the matching suffix."""
        name = f"{Path(file_name).stem}.{fmt}"
        if fmt == "csv":
            return self.export_to_csv(df, name)
        if fmt == "json":
            return self.export_to_json(df, name)
        raise ExportError(f"Unsupported export format: {fmt}")

    def export_report(self, report: dict[str, Any], file_name: str) -> Path:
        """
        Writes a plain dict as indented JSON with sorted keys.
        """
        try:
            file = self._target(file_name)
            file.write_text(json.dumps(report, indent=self.json_settings.get("indent", 2), sort_keys=True) + "\n",
                            encoding="utf-8")
        except (OSError, TypeError) as err:
            self.logger.error(f"Failed to export report: {err}")
            raise ExportError(f"Failed to write {file_name}: {err}")
        self.logger.info(f"Report exported successfully to {file}")
        return file
