"""Defaults and numeric tolerances shared across the package.

Tolerances are absolute unless the name says ``REL``.
"""

# frame I/O
PGM_MAXVAL = 255
QUANT_TOL = 1.0 / (2 * PGM_MAXVAL)
FRAME_PATTERN = "frame_{:05d}.pgm"
META_NAME = "meta.txt"

# measurement
DEFAULT_PERCENTS = (1.0, 5.0, 10.0, 20.0, 30.0, 45.0)

# solver
DEFAULT_LAMBDA = 1e-3
DEFAULT_MAX_ITERS = 400
DEFAULT_TOL = 1e-6
CONTINUATION_START = 0.1      # lambda_0 = CONTINUATION_START * ||A^T b||_inf
CONTINUATION_PERIOD = 50      # iterations between halvings
MONOTONE_SLACK = 1e-9
TRANSFORM_TOL_REL = 1e-9

# tracker
DEFAULT_DIFF_THRESHOLD = 0.15
DEFAULT_MIN_BLOB_AREA = 4
DEFAULT_BACKGROUND_MODE = "temporal_median"

# exit codes
EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_NUMERIC = 4
EXIT_TRACKING = 5
