"""Configuration for the MIMO wiretap secrecy toolkit.

This module assumes the following repo layout (relative to this file):

    PROJECT_ROOT/
      data/
        reference_channel.json  (channel pair with published terminal rates)
      output/
        traces/                 (one CSV per solver run)
        summary.csv
"""

from pathlib import Path

# Base paths
PROJECT_ROOT = Path(__file__).resolve().parents[1]
DATA_DIR = PROJECT_ROOT / "data"
OUTPUT_DIR = PROJECT_ROOT / "output"

REFERENCE_CHANNEL_JSON = DATA_DIR / "reference_channel.json"
TRACE_SUBDIR = "traces"
SUMMARY_CSV_NAME = "summary.csv"

# Numerical tolerances
TOL_HERM = 1e-12          # absolute, per entry
TOL_SYMMETRIC = 1e-12     # pseudo-covariance symmetry
TOL_PSD_REL = 1e-10       # scaled by max(1, spectral norm)
NOISE_MARGIN = 1e-8       # min eig of I - AA^H below this is rejected
SADDLE_MARGIN = 1e-6      # saddle iterates keep I - AA^H >= margin * I
ESTIMATE_ASYMMETRY_WARN = 1e-8
INEQUALITY_SLACK = 1e-9   # relative, for the Fischer-like verdict

# Solver defaults
TOL_INCREASE = 1e-5
MAX_ITERS = 2000
STEP_INIT = 1.0
STEP_MAX = 1e8
STATIONARY_TOL = 1e-12    # relative move of a full projected step at a stationary point
ARMIJO_C = 1e-4
ARMIJO_SHRINK = 0.5
MAX_BACKTRACKS = 60
INNER_TOL_FACTOR = 0.1    # saddle / DC inner loops run to tol_increase * factor
SOLVER_METHODS = ("projected-gradient", "dc-iteration")
SIGNALING_MODES = ("proper", "general")

# Numerical-results experiment
REFERENCE_SNRS = (6.0, 12.0)
# (mode, solver method) -> {snr_db: published terminal rate}. Projected gradient is
# compared against the locally convergent reference algorithm, DC iteration against
# the globally optimal one. The log base is not stated alongside these values.
REFERENCE_RATES = {
    ("general", "projected-gradient"): {6.0: 1.93626, 12.0: 2.05447},
    ("proper", "projected-gradient"): {6.0: 1.93624, 12.0: 2.05446},
    ("general", "dc-iteration"): {6.0: 1.93613, 12.0: 2.05440},
    ("proper", "dc-iteration"): {6.0: 1.93606, 12.0: 2.05446},
}
REFERENCE_EIGENVALUES = (-2.6117, 4.7017)
EIGENVALUE_TOL = 1e-3
UNIT_MATCH_TOL = 5e-3
AGREEMENT_TOL = 1e-4
RATE_UNITS = ("nats", "bits")
