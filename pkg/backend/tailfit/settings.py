"""
Django settings for the tailfit project.

Only the management-command surface is used: there is no database, no
web front end and no static files. Runtime knobs come from the environment
(or a .env file) through python-decouple.
"""

from pathlib import Path
from decouple import config

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = config('SECRET_KEY', default='tailfit-local-only')

DEBUG = config('DEBUG', default=False, cast=bool)

INSTALLED_APPS = [
    'degrees',
]

# No persistence; SimpleTestCase never asks for a connection.
DATABASES = {}

USE_TZ = True

# Fit configuration defaults (CLI flags override these)
TAILFIT_THREADS = config('TAILFIT_THREADS', default=0, cast=int)
TAILFIT_GRID_DENSITY = config('TAILFIT_GRID_DENSITY', default=64, cast=int)
TAILFIT_REFINE_ITERATIONS = config('TAILFIT_REFINE_ITERATIONS', default=60, cast=int)
TAILFIT_REFINE_SHRINK = config('TAILFIT_REFINE_SHRINK', default=0.5, cast=float)
TAILFIT_SUM_TOL = config('TAILFIT_SUM_TOL', default=1e-10, cast=float)

# Optional CAIDA WHOIS degree histogram for the figure reproduction test
TAILFIT_WHOIS_HISTOGRAM = config('TAILFIT_WHOIS_HISTOGRAM', default='')

# Logging Configuration
TAILFIT_LOG_LEVEL = config('TAILFIT_LOG_LEVEL', default='INFO')
TAILFIT_LOG_FILE = config('TAILFIT_LOG_FILE', default='')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {
            'format': '%(levelname)s %(name)s: %(message)s',
        },
    },
    'handlers': {
        'console': {
            'level': 'DEBUG',
            'class': 'logging.StreamHandler',
            'stream': 'ext://sys.stderr',
            'formatter': 'plain',
        },
    },
    'loggers': {
        'degrees': {
            'handlers': ['console'],
            'level': TAILFIT_LOG_LEVEL,
            'propagate': True,
        },
    },
}

if TAILFIT_LOG_FILE:
    LOGGING['handlers']['file'] = {
        'level': 'INFO',
        'class': 'logging.FileHandler',
        'filename': TAILFIT_LOG_FILE,
        'formatter': 'plain',
    }
    LOGGING['loggers']['degrees']['handlers'].append('file')
