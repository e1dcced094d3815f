import math

INIT_RANGE = (-2.0 * math.pi, 2.0 * math.pi)

DEFAULT_MAX_ITERS = 5000
DEFAULT_PLATEAU_WINDOW = 500
DEFAULT_PLATEAU_REL_CHANGE = 0.0005
DEFAULT_ABS_TOL = 1e-8
INITIAL_SIMPLEX_EDGE = 0.5
RELATIVE_FLOOR = 1e-12

DEFAULT_REPLICAS = 50
DEFAULT_GROUP_CAP = 26
DEFAULT_SHOTS = 1024

NORM_TOLERANCE = 1e-12
FIDELITY_FLOOR = 1e-9
RATIO_ZERO = 1e-9

# (m, t) defaults: small problems, large problems (n > SMALL_PROBLEM_LIMIT)
SMALL_PROBLEM_LIMIT = 20
SMALL_HYPERPARAMETERS = 3
LARGE_HYPERPARAMETERS = 7
LARGE_ARITY = 5
LARGE_TSP_CITIES = 7

TRACE_HEADER = ["iter", "cost", "best_cost", "decoded_cost"]
