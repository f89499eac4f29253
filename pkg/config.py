"""
Configuration Module

Reads environment configuration (optionally from a .env file) for the
dynamics toolkit. Values are read once at import time; tests override the
module attributes directly.
"""

import os
from fractions import Fraction

from dotenv import load_dotenv

# Load environment variables
load_dotenv()


def _env_bool(name: str, default: str = 'false') -> bool:
    return os.getenv(name, default).strip().lower() in ('1', 'true', 'yes', 'on')


# Logging
LOG_LEVEL = os.getenv('NDS_LOG_LEVEL', 'INFO')
LOG_FILE = os.getenv('NDS_LOG_FILE') or None

# Rotation angle alpha = u + v*sqrt(D), given as "u,v,D"
ALPHA_SPEC = os.getenv('NDS_ALPHA', '-1/2,1/2,5')
ALPHA_DIGITS = int(os.getenv('NDS_ALPHA_DIGITS', '50'))

# Classifier and detector parameters
DENSITY_THRESHOLD = Fraction(os.getenv('NDS_DENSITY_THRESHOLD', '1/100'))
MULTI_MAX_M = int(os.getenv('NDS_MULTI_MAX_M', '3'))
PERIODIC_ALL_INDICES = _env_bool('NDS_PERIODIC_ALL_INDICES')
EQUI_DEPTH = int(os.getenv('NDS_EQUI_DEPTH', '3'))
SAMPLE_SEED = int(os.getenv('NDS_SAMPLE_SEED', '20240607'))

# Search bounds
SHIFT_PERIOD_BOUND = int(os.getenv('NDS_SHIFT_PERIOD_BOUND', '12'))
FINITE_M1_MAX = int(os.getenv('NDS_FINITE_M1_MAX', '16'))
CLOSURE_STEPS = int(os.getenv('NDS_CLOSURE_STEPS', '8'))
CLOSURE_MAX_COMPONENTS = int(os.getenv('NDS_CLOSURE_MAX_COMPONENTS', '256'))
PERIOD_BOUND = int(os.getenv('NDS_PERIOD_BOUND', '64'))

# Execution
WORKERS = max(1, int(os.getenv('NDS_WORKERS', '1')))
WINDOW_CACHE_SIZE = int(os.getenv('NDS_WINDOW_CACHE_SIZE', '4096'))
WEAK_MAX_WORDS = int(os.getenv('NDS_WEAK_MAX_WORDS', '4096'))
