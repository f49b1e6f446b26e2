import sys
from pathlib import Path

from hypothesis import HealthCheck, settings

# make tests/oracles.py importable as `oracles` regardless of invocation dir
sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile(
    "det",
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("det")
