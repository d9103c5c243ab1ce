"""
Django settings for the cgolab project.

Numerical defaults for the `schrodinger` app live in the CGOLAB dict at the
bottom and are read from the environment (or a .env file next to manage.py).
"""

import os
from pathlib import Path
from dotenv import load_dotenv

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# Load environment variables from .env file
load_dotenv(BASE_DIR / '.env')


def _env_bool(name, default):
    return os.environ.get(name, str(default)) == 'True'


# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.environ.get('SECRET_KEY', 'django-insecure-cgolab-local-development-key-change-me')

# SECURITY WARNING: don't run with debug turned on in production!
DEBUG = _env_bool('DEBUG', True)

ALLOWED_HOSTS = os.environ.get('ALLOWED_HOSTS', '*').split(',')


# Application definition

INSTALLED_APPS = [
    'django.contrib.admin',
    'django.contrib.auth',
    'django.contrib.contenttypes',
    'django.contrib.sessions',
    'django.contrib.messages',
    'django.contrib.staticfiles',
    'schrodinger',
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

ROOT_URLCONF = 'cgolab.urls'

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

WSGI_APPLICATION = 'cgolab.wsgi.application'


# Database
# https://docs.djangoproject.com/en/5.2/ref/settings/#databases

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': BASE_DIR / 'db.sqlite3',
    }
}


# Internationalization

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = True

USE_TZ = True


STATIC_URL = 'static/'

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# Logging: the numerical modules log under the `schrodinger` namespace
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {
            'format': '[{levelname}] {name}: {message}',
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
        'schrodinger': {
            'handlers': ['console'],
            'level': os.environ.get('CGOLAB_LOG_LEVEL', 'INFO'),
            'propagate': False,
        },
    },
}


# Numerical defaults (CLI flags and --config files override these)
CGOLAB = {
    'OUTPUT_DIR': Path(os.environ.get('CGOLAB_OUTPUT_DIR', BASE_DIR / 'runs')),
    'GRID': int(os.environ.get('CGOLAB_GRID', 128)),
    'PAD': int(os.environ.get('CGOLAB_PAD', 2)),
    'SEED': int(os.environ.get('CGOLAB_SEED', 7)),
    'TOL': float(os.environ.get('CGOLAB_TOL', 1e-10)),
    'P': float(os.environ.get('CGOLAB_P', 4)),
    'MAX_ITERATIONS': int(os.environ.get('CGOLAB_MAX_ITERATIONS', 200)),
    'WORKERS': int(os.environ.get('CGOLAB_WORKERS', 4)),
    'BOUNDARY_NODES': int(os.environ.get('CGOLAB_BOUNDARY_NODES', 1024)),
    'PLOTS': _env_bool('CGOLAB_PLOTS', False),
}
