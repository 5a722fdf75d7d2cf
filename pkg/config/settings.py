"""
Django settings for the Lotka-Volterra lab project.

Generated by 'django-admin startproject' using Django 5.2.7.

For more information on this file, see
https://docs.djangoproject.com/en/5.2/topics/settings/

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.2/ref/settings/
"""

from pathlib import Path
from decouple import config, Csv

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# SECURITY WARNING: keep the secret key used in production secret!
# Il laboratorio non ha sessioni ne' utenti: il default serve solo a far partire Django in locale
SECRET_KEY = config('SECRET_KEY', default='lotka-lab-solo-sviluppo')

# SECURITY WARNING: don't run with debug turned on in production!
DEBUG = config('DEBUG', default=False, cast=bool)

ALLOWED_HOSTS = config('ALLOWED_HOSTS', default='localhost,127.0.0.1', cast=Csv())


# Application definition

INSTALLED_APPS = [
    'django.contrib.contenttypes',
    'django.contrib.auth',
    'rest_framework',  # API REST (preset in sola lettura) e serializer dei report
    # App
    'sistemi',
    'laboratorio',
]

MIDDLEWARE = [
    'django.middleware.security.SecurityMiddleware',
    'django.middleware.common.CommonMiddleware',
]

ROOT_URLCONF = 'config.urls'

WSGI_APPLICATION = 'config.wsgi.application'


# Database
# Nessun modello persistente: sqlite in memoria basta al test runner di Django
DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': ':memory:',
    }
}


# Internationalization
# https://docs.djangoproject.com/en/5.2/topics/i18n/

LANGUAGE_CODE = 'it-it'

TIME_ZONE = 'Europe/Rome'

USE_I18N = True

USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# Laboratorio
# Cartella di default per CSV, SVG e report JSON (il flag --out la sovrascrive)
LV_OUT_DIR = config('LV_OUT_DIR', default=str(BASE_DIR / 'output'))

# Soglia dell'errore relativo massimo nel confronto con il riferimento RK4
LV_OVERLAY_TOLERANCE = config('LV_OVERLAY_TOLERANCE', default=0.05, cast=float)

# Versione riportata in ogni report JSON
LV_TOOL_VERSION = config('LV_TOOL_VERSION', default='1.0.0')


# Django REST Framework Configuration
REST_FRAMEWORK = {
    # Nessuna autenticazione: l'API espone solo i preset in lettura
    'DEFAULT_AUTHENTICATION_CLASSES': [],
    'DEFAULT_PERMISSION_CLASSES': [
        'rest_framework.permissions.AllowAny',
    ],
    'UNAUTHENTICATED_USER': None,

    'DEFAULT_RENDERER_CLASSES': [
        'rest_framework.renderers.JSONRenderer',
    ],
}


# Logging
LOG_LEVEL = config('LOG_LEVEL', default='INFO')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'semplice': {
            'format': '{asctime} {levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'semplice',
        },
    },
    'loggers': {
        'sistemi': {
            'handlers': ['console'],
            'level': LOG_LEVEL,
            'propagate': False,
        },
        'laboratorio': {
            'handlers': ['console'],
            'level': LOG_LEVEL,
            'propagate': False,
        },
    },
}
