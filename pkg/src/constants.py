"""Constants used throughout the application."""

# Simulated field, in meters (square field of the classic geometric routing study)
FIELD_WIDTH = 1000.0
FIELD_HEIGHT = 1000.0

# Radio range: two nodes are neighbors iff they are at most this far apart
UNIT_RADIUS = 100.0

# Average number of nodes per unit disk swept by the study
DENSITIES = (4, 5, 6, 7, 8, 9, 10, 11, 12)

# Per-transmission loss probabilities standing in for the study's power levels.
# These are a parametric Bernoulli loss model, not a radio model.
LOSS_LEVELS = {
    "ideal": 0.0,
    "15dBm": 0.05,
    "7dBm": 0.15,
    "0dBm": 0.30,
}

# Hop budget chosen by the TTL study
DEFAULT_TTL = 55

# Share of the nodes selected as multicast targets
TARGET_FRACTION = 0.05

# Experiments per data point unless configured (presets/overnight.conf uses 1000)
DESK_RUNS_PER_POINT = 100

# Signed-area magnitude (square meters) below which three points are collinear
COLLINEAR_EPSILON = 1e-9

# Steiner heuristic convergence
FERMAT_TOLERANCE = 1e-9
FERMAT_MAX_ITERATIONS = 10_000
STEINER_MIN_GAIN = 1e-9

# Public algorithm identifiers
ALGORITHMS = (
    "gfg-unicast",
    "lgs",
    "gmp",
    "gmp-source",
    "mcfr-steiner",
    "mcfr-mst",
)

# Result file schema, in column order
CSV_COLUMNS = (
    "point_id",
    "algorithm",
    "density",
    "loss",
    "ttl",
    "run",
    "n_nodes",
    "n_edges",
    "n_targets",
    "reachable_targets",
    "delivery_ratio",
    "latency_norm",
    "msg_cost_norm",
    "tree_len",
    "tree_diam",
    "hull_area",
    "quiescent",
)

# Environment variable consulted for the default seed
SEED_ENV_VAR = "GEOROUTE_SEED"

# Hop budgets tried by the TTL study when none are configured
TTL_SWEEP_VALUES = (5, 10, 20, 30, 40, 55, 70, 100)

# Defaults of a single simulation run
SIMULATE_ALGORITHM = "mcfr-steiner"
SIMULATE_DENSITY = 7
