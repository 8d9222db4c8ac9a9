import os

from hypothesis import HealthCheck, settings

# Property suites are derandomized; pass --hypothesis-seed=<n> to explore other draws.
settings.register_profile(
    "ci", max_examples=250, derandomize=True, database=None, deadline=None,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "ci"))
