DEFAULT_TSP_PENALTY = 100.0
TSP_COORDINATE_RANGE = (0.0, 10.0)
MIN_TSP_CITIES = 3

DEFAULT_BRUTE_FORCE_CAP = 2**34
DEFAULT_TSP_CITY_CAP = 12
DEFAULT_EIGEN_QUBIT_CAP = 12

# Gray-code blocks are re-anchored by a direct evaluation every 2**GRAY_BLOCK_BITS
# steps; block boundaries are shared by all worker layouts.
GRAY_BLOCK_BITS = 12
NARY_CHUNK = 2**14

TIE_TOLERANCE = 1e-9

PAULI_LETTERS = "IXYZ"
