from __future__ import annotations

import sys
from pathlib import Path

from hypothesis import HealthCheck, settings

REPO_ROOT = Path(__file__).resolve().parent.parent

# the oracle module lives next to the tests, not in the package
sys.path.insert(0, str(REPO_ROOT / "tests"))

# wall-clock deadlines flake under load; the acceptance suite carries its
# own explicit runtime budget instead
settings.register_profile(
    "repo", deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("repo")
