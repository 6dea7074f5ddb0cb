"""
Django settings for the arm_eval project.

Every value can be overridden from the environment or a `.env` file in the
project root (see `.env.example`).
"""

from pathlib import Path
from decouple import config, Csv
import os

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# SECURITY WARNING: the default key is only good for local runs and tests.
SECRET_KEY = config('DJANGO_SECRET_KEY', default='arm-eval-local-only-key')

DEBUG = config('DJANGO_DEBUG', default=False, cast=bool)

ALLOWED_HOSTS = config('DJANGO_ALLOWED_HOSTS', default='localhost,127.0.0.1', cast=Csv())


# Application definition

INSTALLED_APPS = [
    'jazzmin',
    'django.contrib.admin',
    'django.contrib.auth',
    'django.contrib.contenttypes',
    'django.contrib.sessions',
    'django.contrib.messages',
    'django.contrib.staticfiles',

    # Pipeline apps
    'corpus',
    'textproc',
    'llmgw',
    'arm',
    'baselines',
    'synth',
    'metrics',
    'reports',
]

MIDDLEWARE = [
    'django.middleware.security.SecurityMiddleware',
    'django.contrib.sessions.middleware.SessionMiddleware',
    'django.middleware.common.CommonMiddleware',
    'django.middleware.csrf.CsrfViewMiddleware',
    'django.contrib.auth.middleware.AuthenticationMiddleware',
    'django.contrib.messages.middleware.MessageMiddleware',
    'django.middleware.clickjacking.XFrameOptionsMiddleware',
]

ROOT_URLCONF = 'arm_eval.urls'

TEMPLATES = [
    {
        'BACKEND': 'django.template.backends.django.DjangoTemplates',
        'DIRS': [],
        'APP_DIRS': True,
        'OPTIONS': {
            'context_processors': [
                'django.template.context_processors.request',
                'django.contrib.auth.context_processors.auth',
                'django.contrib.messages.context_processors.messages',
            ],
        },
    },
]


# Database
# Run history lives here; SQLite unless a server is configured.

DATABASES = {
    'default': {
        'ENGINE': config('DATABASE_ENGINE', default='django.db.backends.sqlite3'),
        'NAME': config('DATABASE_NAME', default=str(BASE_DIR / 'db.sqlite3')),
        'USER': config('DATABASE_USER', default=''),
        'PASSWORD': config('DATABASE_PASSWORD', default=''),
        'HOST': config('DATABASE_HOST', default=''),
        'PORT': config('DATABASE_PORT', default=''),
    }
}


# Internationalization

LANGUAGE_CODE = config('LANGUAGE_CODE', default='en-us')
TIME_ZONE = config('TIME_ZONE', default='UTC')

USE_I18N = True

USE_TZ = True


STATIC_URL = 'static/'

STATIC_ROOT = os.path.join(BASE_DIR, 'staticfiles')

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# Logging

ARM_LOG_LEVEL = config('ARM_LOG_LEVEL', default='INFO')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {
            'format': '{asctime} {levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'plain',
        },
    },
    'loggers': {
        app: {'handlers': ['console'], 'level': ARM_LOG_LEVEL, 'propagate': False}
        for app in ('corpus', 'llmgw', 'arm', 'baselines', 'synth', 'metrics', 'reports')
    },
}


# Backend credentials. Claude is reached through Anthropic's
# OpenAI-compatible endpoint.

OPENAI_API_KEY = config('OPENAI_API_KEY', default='')
OPENAI_BASE_URL = config('OPENAI_BASE_URL', default='https://api.openai.com/v1')
ANTHROPIC_API_KEY = config('ANTHROPIC_API_KEY', default='')
ANTHROPIC_BASE_URL = config('ANTHROPIC_BASE_URL', default='https://api.anthropic.com/v1/')


# Pipeline configuration

ARM_EVAL = {
    'PROMPTS_DIR': config('ARM_PROMPTS_DIR', default=str(BASE_DIR / 'prompts')),
    'CACHE_DIR': config('ARM_CACHE_DIR', default=str(BASE_DIR / 'cache')),
    # replay misses raise instead of falling through to a live call
    'REPLAY_STRICT': config('ARM_REPLAY_STRICT', default=True, cast=bool),
    'TEMPERATURE': config('ARM_TEMPERATURE', default=0.0, cast=float),
    'MAX_TOKENS': config('ARM_MAX_TOKENS', default=2048, cast=int),
    'TRANSPORT_RETRIES': config('ARM_TRANSPORT_RETRIES', default=4, cast=int),
    'REQUEST_TIMEOUT': config('ARM_REQUEST_TIMEOUT', default=120, cast=int),
    'PARALLELISM': config('ARM_PARALLELISM', default=4, cast=int),
    # 'response': parse the rewrite reply itself; 'generate': ask for an explanation
    'EXPLANATION_SOURCE': config('ARM_EXPLANATION_SOURCE', default='response'),
    # 'normalized' token comparison or 'raw' string comparison for r = s
    'EQUALITY_MODE': config('ARM_EQUALITY_MODE', default='normalized'),
    # 'single' seeded type per objective claim or 'all' four types
    'SYNTH_TYPE_MODE': config('ARM_SYNTH_TYPE_MODE', default='single'),
    'BOOTSTRAP_TRIALS': config('ARM_BOOTSTRAP_TRIALS', default=10000, cast=int),
    'BOOTSTRAP_WORKERS': config('ARM_BOOTSTRAP_WORKERS', default=1, cast=int),
    'OUTPUT_DIR': config('ARM_OUTPUT_DIR', default=str(BASE_DIR / 'runs')),
}


# Jazzmin Configuration
JAZZMIN_SETTINGS = {
    "site_title": "ARM Evaluation",
    "site_header": "ARM Evaluation Runs",
    "welcome_sign": "Rewrite-metric run history",
    "copyright": "ARM Evaluation",
}
