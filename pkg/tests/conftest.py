from importlib import resources
from pathlib import Path

import numpy as np
import pytest

from cotransport.config import load_robot, load_scenario
from cotransport.scenario import run_scenario

DATA_DIR = Path(str(resources.files("cotransport"))) / "data"
SCENARIO_DIR = DATA_DIR / "scenarios"
ROBOT_FILE = DATA_DIR / "robots" / "diffdrive_6dof.yaml"

# arm posture used by the shipped scenarios: folded, tool level, inside r_outer
HOME_JOINTS = np.array([0.0, 1.3, -2.6, 1.3, 0.0, 0.0])


@pytest.fixture(scope="session")
def robot():
    return load_robot(ROBOT_FILE)


@pytest.fixture(scope="session")
def scenario_dir():
    return SCENARIO_DIR


@pytest.fixture(scope="session")
def shipped_runs(tmp_path_factory):
    """Every shipped scenario run once (traces kept); shared by the module
    tests and the acceptance suite. Values are (config, run, wall_seconds)."""
    import time

    out = tmp_path_factory.mktemp("logs")
    runs = {}
    for name in ["transport_stop_go", "obstacle_approach", "obstacle_approach_moving",
                 "reach_limit", "tank_drain"]:
        cfg = load_scenario(SCENARIO_DIR / f"{name}.yaml")
        t0 = time.perf_counter()
        run = run_scenario(cfg, log_path=out / f"{name}.csv", keep_traces=True)
        runs[name] = (cfg, run, time.perf_counter() - t0)
    return runs
