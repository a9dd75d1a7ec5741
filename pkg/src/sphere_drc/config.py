"""Module-wide numeric tolerances and resource caps."""

ALGEBRAIC_TOL = 1e-9
NONZERO_GUARD = 1e-12
RESAMPLE_CAP = 100
PARTITION_MEASURE_RTOL = 1e-6

# statistical tolerances, in standard errors
STAT_SIGMAS = 4.0
ORACLE_SIGMAS = 5.0

EXHAUSTIVE_LIMIT = 10**6
SAMPLED_DRAWS = 10**5

# desk-scale caps on the parameters derived from eps
MAX_K = 64
MAX_T = 16
MAX_N = 10**5

# dense bit-matrix hypercube is built only up to this dimension
MAX_HYPERCUBE_BUILD = 14
MAX_HYPERCUBE_ENUM = 24
