from hypothesis import HealthCheck, settings

# Reproducible property runs; enumeration-heavy examples can be slow
settings.register_profile(
    "planarmap",
    derandomize=True,
    deadline=None,
    max_examples=25,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("planarmap")
