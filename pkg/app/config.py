import os
import math
import logging
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

# Logging configuration
LOG_LEVEL = os.environ.get("PAD_SIM_LOG_LEVEL", "INFO").upper()
logging.basicConfig(
    level=LOG_LEVEL,
    format="%(asctime)s %(levelname)s %(name)s: %(message)s",
)
logger = logging.getLogger("pad_sim")

# Application settings
APP_TITLE = "pad-sim"
APP_VERSION = "0.1.0"
OUTPUT_DIR_ENV = "PAD_SIM_OUTPUT_DIR"

# Fock-space truncation: largest total photon number any state may carry
N_MAX = int(os.environ.get("PAD_SIM_N_MAX", 24))

# Amplitudes and probabilities below these are treated as exact zeros
AMPLITUDE_FLUSH = 1e-300
DEGENERATE_PROBABILITY = 1e-300

# Detector parameters of the balanced, lambda = pi/2 regime
DETECTOR_DEFAULTS = {
    'p': 1,
    'w': 2,
    'delta': 0.1,
    'eta': 1.0,
    'omega': math.pi / 4,
    'lambda': math.pi / 2,
    'theta': 0.0,
    'phi': 0.0,
}

# Disk quadrature configuration
QUADRATURE_CONFIG = {
    'radial_order': 64,
    'radial_rtol': 1e-9,
    'max_radial_order': 4096,
    'fallback_order': 64,
    'symmetry_rtol': 1e-8,
    'symmetry_radii': (0.5, 1.0, 2.0, 4.0),
    'symmetry_angles': 32,
    'box_half_width': 12.0,
    'box_order': 200,
}

# Root-finding configuration
ROOT_CONFIG = {
    'delta_max': 15.0,  # disk radius treated as "accept everything"
    'delta_xtol': 1e-9,
    'eta_xtol': 1e-10,
}
