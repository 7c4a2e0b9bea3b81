from hypothesis import settings

# scipy solvers have uneven first-call latency
settings.register_profile("hyperbench", deadline=None)
settings.load_profile("hyperbench")
