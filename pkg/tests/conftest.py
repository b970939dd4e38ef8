from hypothesis import settings

# keep the suite deterministic run to run
settings.register_profile("deterministic", deadline=None, derandomize=True)
settings.load_profile("deterministic")
