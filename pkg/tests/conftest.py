import json
import pytest
from pathlib import Path
from evtol_traversal_planner.core import CONFIG
from evtol_traversal_planner.frames_wind import WindSpec
from evtol_traversal_planner.vehicle_model import default_vehicle
from .test_data import TestData


@pytest.fixture(scope="class")
def config():
    return CONFIG


@pytest.fixture(scope="class")
def vehicle():
    return default_vehicle()


@pytest.fixture(scope="class")
def segment():
    return TestData.START, TestData.END


@pytest.fixture(scope="class")
def crosswind() -> WindSpec:
    return WindSpec.from_degrees(TestData.WIND_SPEED, 0.0)


@pytest.fixture(scope="class")
def tailwind() -> WindSpec:
    # 5 degrees off a pure tailwind on the eastbound segment
    return WindSpec.from_degrees(TestData.WIND_SPEED, 95.0)


@pytest.fixture(scope="class")
def headwind() -> WindSpec:
    return WindSpec.from_degrees(TestData.WIND_SPEED, 270.0)


@pytest.fixture(scope="class")
def still_air() -> WindSpec:
    return WindSpec(speed=0.0, heading=0.0)


def write_mission(folder: Path, name: str = "mission", **fields) -> Path:
    """
    Writes a mission JSON on the benchmark segment; ``fields`` replace the defaults.

    :param folder: target folder.
    :param name: mission name and file stem.
    :return: path to the written file.
    """
    data = {
        "name": name,
        "start": list(TestData.START),
        "end": list(TestData.END),
        "wind": {"speed": 0.0, "heading_deg": 0.0},
    }
    data.update(fields)
    path = folder / f"{name}.json"
    path.write_text(json.dumps(data), encoding="utf-8")
    return path
