DEFAULT_NODE_LIMIT = 10**8
MAX_LIFT_K = 4
SWEEP_SCHEMA_VERSION = 1
REPORT_SCHEMA_VERSION = 1
DEFAULT_WORKERS = 4
EXTRA_EDGE_ATTEMPTS = 100
