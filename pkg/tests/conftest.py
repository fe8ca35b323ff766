import sys
from pathlib import Path

import pytest

from optokick.params import ProtocolParams

sys.path.insert(0, str(Path(__file__).parent))

CONFIG_DIR = Path(__file__).resolve().parents[1] / "src" / "optokick" / "configs"
REFERENCE_CONFIG = CONFIG_DIR / "reference.config"
LORENTZIAN_CONFIG = CONFIG_DIR / "lorentzian_regime.config"

# acceptance lines collected by test_acceptance.py, printed after the run
ACCEPTANCE = {}


@pytest.fixture
def reference():
    return ProtocolParams.reference()


@pytest.fixture
def reference_config():
    return REFERENCE_CONFIG


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[key])
