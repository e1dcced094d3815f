"""
Django settings for the dvqoa project.

The numerical apps (problems, variational, photonics) are driven from
management commands; the admin site only browses the stored run history.

For the full list of Django settings and their values, see
https://docs.djangoproject.com/en/5.2/ref/settings/
"""

from pathlib import Path
import os
from dotenv import load_dotenv

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# Load environment variables from .env file (if present)
load_dotenv(BASE_DIR / ".env")


# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.getenv(
    "SECRET_KEY", "django-insecure-dvqoa-local-only-0f3c9a1e7b5d42c8a6e1"
)

# SECURITY WARNING: don't run with debug turned on in production!
DEBUG = os.getenv("DEBUG", "true").lower() in ["true", "1", "yes"]

ALLOWED_HOSTS = ["127.0.0.1", "localhost", "0.0.0.0"]


# Application definition

INSTALLED_APPS = [
    # Admin UI theme for the run history
    "jazzmin",
    "django.contrib.admin",
    "django.contrib.auth",
    "django.contrib.contenttypes",
    "django.contrib.sessions",
    "django.contrib.messages",
    "django.contrib.staticfiles",
    # Local apps
    "problems",
    "variational",
    "photonics",
]

MIDDLEWARE = [
    "django.middleware.security.SecurityMiddleware",
    "django.contrib.sessions.middleware.SessionMiddleware",
    "django.middleware.common.CommonMiddleware",
    "django.middleware.csrf.CsrfViewMiddleware",
    "django.contrib.auth.middleware.AuthenticationMiddleware",
    "django.contrib.messages.middleware.MessageMiddleware",
    "django.middleware.clickjacking.XFrameOptionsMiddleware",
]

ROOT_URLCONF = "config.urls"

TEMPLATES = [
    {
        "BACKEND": "django.template.backends.django.DjangoTemplates",
        "DIRS": [],
        "APP_DIRS": True,
        "OPTIONS": {
            "context_processors": [
                "django.template.context_processors.debug",
                "django.template.context_processors.request",
                "django.contrib.auth.context_processors.auth",
                "django.contrib.messages.context_processors.messages",
            ],
        },
    },
]

WSGI_APPLICATION = "config.wsgi.application"


# Database
# SQLite by default so the CLI works without a server; set DB_ENGINE to
# django.db.backends.mysql to use MySQL through PyMySQL.

DB_ENGINE = os.getenv("DB_ENGINE", "django.db.backends.sqlite3")

if DB_ENGINE.endswith("sqlite3"):
    DATABASES = {
        "default": {
            "ENGINE": DB_ENGINE,
            "NAME": os.getenv("DB_NAME", str(BASE_DIR / "dvqoa.sqlite3")),
        }
    }
else:
    DATABASES = {
        "default": {
            "ENGINE": DB_ENGINE,
            "NAME": os.getenv("DB_NAME", ""),
            "USER": os.getenv("DB_USER", ""),
            "PASSWORD": os.getenv("DB_PASSWORD", ""),
            "HOST": os.getenv("DB_HOST", "localhost"),
            "PORT": os.getenv("DB_PORT", "3306"),
            "OPTIONS": {
                "charset": os.getenv("DB_CHARSET", "utf8mb4"),
            },
        }
    }


AUTH_PASSWORD_VALIDATORS = [
    {
        "NAME": "django.contrib.auth.password_validation.MinimumLengthValidator",
    },
]


# Internationalization

LANGUAGE_CODE = "en-us"

TIME_ZONE = "UTC"

USE_I18N = True

USE_TZ = True


# Static files (CSS, JavaScript, Images)

STATIC_URL = "static/"

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"

JAZZMIN_SETTINGS = {
    "site_title": "DVQOA Runs",
    "site_header": "DVQOA Run History",
    "site_brand": "DVQOA",
    "welcome_sign": "Stored optimization runs",
    "show_ui_builder": False,
}


# Logging

LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO").upper()

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "verbose": {
            "format": "%(asctime)s %(levelname)s %(name)s %(message)s",
        },
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "verbose",
        },
    },
    "loggers": {
        "problems": {"handlers": ["console"], "level": LOG_LEVEL},
        "variational": {"handlers": ["console"], "level": LOG_LEVEL},
        "photonics": {"handlers": ["console"], "level": LOG_LEVEL},
    },
}


# Optimizer / oracle defaults (flags override)

DVQOA_WORKERS = int(os.getenv("DVQOA_WORKERS", "1"))
DVQOA_REPLICAS = int(os.getenv("DVQOA_REPLICAS", "50"))
DVQOA_GROUP_CAP = int(os.getenv("DVQOA_GROUP_CAP", "26"))
DVQOA_BRUTE_FORCE_CAP = int(os.getenv("DVQOA_BRUTE_FORCE_CAP", str(2**34)))
DVQOA_TSP_CITY_CAP = int(os.getenv("DVQOA_TSP_CITY_CAP", "12"))
DVQOA_EIGEN_QUBIT_CAP = int(os.getenv("DVQOA_EIGEN_QUBIT_CAP", "12"))
DVQOA_OUTPUT_DIR = Path(os.getenv("DVQOA_OUTPUT_DIR", str(BASE_DIR / "runs")))
DVQOA_MATERIALS_DIR = os.getenv("DVQOA_MATERIALS_DIR") or None
DVQOA_SOLAR_SPECTRUM = os.getenv("DVQOA_SOLAR_SPECTRUM") or None
