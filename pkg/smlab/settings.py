"""
Django settings for the smlab project.

smlab is a simulation and numerical-verification toolkit for Stein-Malliavin
central limit theorems. Django provides configuration, logging, the run
ledger and the management-command CLI; there is no web surface.

Every deployment-specific value is read through python-decouple, so an
``.env`` file or plain environment variables configure a run.
"""

from pathlib import Path

from decouple import config

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


SECRET_KEY = config('SML_SECRET_KEY', default='smlab-local-only-key')

DEBUG = config('SML_DEBUG', default=False, cast=bool)

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'django.contrib.contenttypes',
    'django.contrib.auth',
    'rest_framework',
    'clt_verification',
]


# Database
# Only the experiment run ledger lives here.

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': config('SML_DATABASE_PATH', default=str(BASE_DIR / 'db.sqlite3')),
    }
}

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

TIME_ZONE = 'UTC'

USE_TZ = True


# Toolkit configuration

# Worker processes for Monte Carlo ensembles; SML_WORKERS overrides.
SML_WORKERS = config('SML_WORKERS', default=1, cast=int)

SML_OUTPUT_DIR = Path(config('SML_OUTPUT_DIR', default=str(BASE_DIR / 'results')))

SMLAB = {
    'GAUSS_HERMITE_NODES': 64,
    'HERMITE_ORDER': 20,
    'HERMITE_TAIL_TOLERANCE': 0.01,
    'FIELD_DT': 0.25,
    'OU_PRODUCT_DT': 0.1,
    'LAYER_FLOOR_DIVISOR': 64,
    'LAYER_FLOOR_MAX_DIVISOR': 1024,
    'FLOAT_FORMAT': '%.17g',
}


# Logging Configuration
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {module} {process:d} {thread:d} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'file': {
            'level': 'INFO',
            'class': 'logging.FileHandler',
            'filename': config('SML_LOG_FILE', default='smlab.log'),
            'formatter': 'verbose',
            'delay': True,
        },
        'console': {
            'level': config('SML_LOG_LEVEL', default='WARNING'),
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'loggers': {
        'clt_verification': {
            'handlers': ['file', 'console'],
            'level': 'INFO',
            'propagate': False,
        },
    },
}
