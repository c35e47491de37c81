"""Settings configuration for polyspec"""
import os

from dotenv import load_dotenv

load_dotenv()

DEFAULT_K_MAX = 25
DEFAULT_CHECKS = ("bounds",)
DEFAULT_FORMATS = ("csv", "json")
DEFAULT_OUT = "out"
# Base cells across the largest bounding-box extent, by dimension
DEFAULT_CELLS = {1: 200, 2: 32}

DENSE_LIMIT = 4000
LANCZOS_BLOCK = 4
LANCZOS_SEED = 20240101
LANCZOS_MAX_STEPS = 120
LANCZOS_TOL = 1e-10

TOL_SLOPE = 0.2
EPS_GRAD = 1e-9

FOURIER_DEFAULTS = {
    "k": 3,
    "Z": 60.0,
    "dz": 0.05,
    "samples": 200,
}

LEMMA1_DEFAULTS = {
    "seeds": 1000,
    "b_grid": [1.0, 1.5, 2.0, 3.0, 5.0],
    "l_max": 4,
    "eta": 1.0,
    "psi0": 1.0,
    "support": 2.0,
    "pieces": 6,
}

THREADS = max(1, int(os.getenv("POLYSPEC_THREADS", os.cpu_count() or 1)))
DATABASE_PATH = os.getenv("POLYSPEC_DB", "data/polyspec.db")
LOG_LEVEL = os.getenv("POLYSPEC_LOG_LEVEL", "INFO")
