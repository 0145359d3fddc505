import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from hpasim.core import ManagerVerdict, MicroserviceSpec, ScaleAction

GOLDEN_DIR = Path(__file__).parent / "golden"


def make_verdicts(services):
    """Turn oracle-style service dicts into (verdicts, specs) inputs."""
    verdicts = [
        ManagerVerdict(s["name"], s["dr"], ScaleAction(s["sd"]), s["max_r"]) for s in services
    ]
    specs = {
        s["name"]: MicroserviceSpec(s["name"], s["res_req"], s["res_req"] * 2)
        for s in services
    }
    return verdicts, specs


@pytest.fixture(scope="session")
def golden_dir():
    return GOLDEN_DIR
