"""
Django settings for the zerocross project.

zerocross has no HTTP surface and no database: Django supplies the settings,
logging, app registry and management-command machinery for the numerical
services and the CLI.
"""

import os
from pathlib import Path
from environ import Env

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent
PROJECT_ROOT = BASE_DIR.parent

# Django-environ 초기화
env = Env(
    DEBUG=(bool, False),
    ZEROCROSS_JOBS=(int, 0),
)

# .env 파일 읽기
env_file = PROJECT_ROOT / '.env'
if env_file.exists():
    Env.read_env(str(env_file))

SECRET_KEY = env('DJANGO_SECRET_KEY', default='zerocross-local-only-not-a-secret')

DEBUG = env('DJANGO_DEBUG', default=False)

ALLOWED_HOSTS: list[str] = []


# Application definition

INSTALLED_APPS = [
    'rest_framework',
    'apps.specfun',
    'apps.profiles',
    'apps.integrator',
    'apps.analytic',
    'apps.transitions',
    'apps.quantum',
    'apps.cli',
]

# 상태를 저장하지 않으므로 데이터베이스 없음
DATABASES: dict = {}

USE_TZ = True
TIME_ZONE = 'UTC'


# Django REST Framework
# serializers are used for config validation and JSON rendering only

REST_FRAMEWORK = {
    'DEFAULT_RENDERER_CLASSES': [
        'rest_framework.renderers.JSONRenderer',
    ],
    'DEFAULT_PARSER_CLASSES': [
        'rest_framework.parsers.JSONParser',
    ],
    'DEFAULT_AUTHENTICATION_CLASSES': [],
    'DEFAULT_PERMISSION_CLASSES': [],
    'UNAUTHENTICATED_USER': None,
    'STRICT_JSON': True,
    'COERCE_DECIMAL_TO_STRING': False,
    'COMPACT_JSON': False,
}


# Numerical defaults

ZEROCROSS = {
    'VERSION': '0.1.0',
    'REL_TOL': env.float('ZEROCROSS_REL_TOL', default=1e-10),
    'ABS_TOL': env.float('ZEROCROSS_ABS_TOL', default=1e-12),
    'QUAD_REL_TOL': 1e-12,
    'PHASE_SAMPLES': 360,
    'TAIL_BOUND': 1e-10,
    'WRONSKIAN_TOL': 1e-8,
    'WRONSKIAN_HARD_TOL': 1e-6,
    'ADIABATIC_WINDOW': 0.01,
    'ERMAKOV_STEP': 0.01,
    'BESSEL_SERIES_MAX_X': 6.0,
    'BESSEL_ASYMPTOTIC_MIN_X': 30.0,
    'FOCK_MAX_TERMS': 1_000_000,
    # 0이면 --jobs 또는 CPU 개수 사용
    'JOBS': env('ZEROCROSS_JOBS'),
    'SWEEP_BACKEND': env('ZEROCROSS_SWEEP_BACKEND', default='local'),
}


# Celery Configuration
# https://docs.celeryq.dev/en/stable/django/first-steps-with-django.html

CELERY_BROKER_URL = env('CELERY_BROKER_URL', default='redis://127.0.0.1:6379/0')
CELERY_RESULT_BACKEND = env('CELERY_RESULT_BACKEND', default='redis://127.0.0.1:6379/0')
CELERY_ACCEPT_CONTENT = ['json']
CELERY_TASK_SERIALIZER = 'json'
CELERY_RESULT_SERIALIZER = 'json'
CELERY_TIMEZONE = TIME_ZONE
CELERY_TASK_TRACK_STARTED = True
CELERY_TASK_TIME_LIMIT = 30 * 60  # 30 minutes


# Logging Configuration
# https://docs.djangoproject.com/en/6.0/topics/logging/

LOG_DIR = env('ZEROCROSS_LOG_DIR', default='')
LOG_LEVEL = env('ZEROCROSS_LOG_LEVEL', default='INFO')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '[{levelname}] {asctime} {name} {module} {process:d} {message}',
            'style': '{',
        },
        'simple': {
            'format': '[{levelname}] {asctime} {name} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'level': 'DEBUG',
            'class': 'logging.StreamHandler',
            'stream': 'ext://sys.stderr',
            'formatter': 'simple',
        },
    },
    'loggers': {
        'django': {
            'handlers': ['console'],
            'level': env('DJANGO_LOG_LEVEL', default='WARNING'),
            'propagate': False,
        },
        'apps': {
            'handlers': ['console'],
            'level': LOG_LEVEL,
            'propagate': False,
        },
        'celery': {
            'handlers': ['console'],
            'level': 'WARNING',
            'propagate': False,
        },
    },
    'root': {
        'handlers': ['console'],
        'level': 'WARNING',
    },
}

# 로그 디렉토리가 지정된 경우에만 파일 핸들러 추가
if LOG_DIR:
    os.makedirs(LOG_DIR, exist_ok=True)
    LOGGING['handlers']['file'] = {
        'level': 'DEBUG',
        'class': 'logging.handlers.RotatingFileHandler',
        'filename': Path(LOG_DIR) / 'zerocross.log',
        'maxBytes': 1024 * 1024 * 10,  # 10MB
        'backupCount': 5,
        'formatter': 'verbose',
    }
    LOGGING['handlers']['error_file'] = {
        'level': 'ERROR',
        'class': 'logging.handlers.RotatingFileHandler',
        'filename': Path(LOG_DIR) / 'zerocross_error.log',
        'maxBytes': 1024 * 1024 * 10,  # 10MB
        'backupCount': 5,
        'formatter': 'verbose',
    }
    LOGGING['loggers']['apps']['handlers'] = ['console', 'file', 'error_file']
