import os
from pathlib import Path

from dotenv import load_dotenv

load_dotenv()
BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = os.getenv(
    'DJANGO_SECRET_KEY',
    default="change-me-in-env-the-pipeline-serves-no-requests")

DEBUG = os.getenv('DEBUG', default='False') == 'True'

ALLOWED_HOSTS = []

INSTALLED_APPS = [
    'django.contrib.contenttypes',
    'django.contrib.auth',
    'rest_framework',
    'core',
    'weather',
    'imaging',
    'networks',
    'scoring',
    'training.apps.TrainingConfig',
]

DATABASES = {
    'default': {
        'ENGINE': os.getenv('DB_ENGINE', default='django.db.backends.sqlite3'),
        'NAME': os.getenv('DB_NAME', default=BASE_DIR / 'runs.sqlite3'),
        'USER': os.getenv('DB_USER', default=''),
        'PASSWORD': os.getenv('DB_PASSWORD', default=''),
        'HOST': os.getenv('DB_HOST', default=''),
        'PORT': os.getenv('DB_PORT', default='')
    }
}

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True

THERMALS_VERSION = '0.3.0'

###########
# Weather #
###########

WEATHER_MODE = os.getenv('WEATHER_MODE', default='fixture')

WEATHER_FIXTURE_DIR = os.getenv(
    'WEATHER_FIXTURE_DIR', default=BASE_DIR / 'fixtures' / 'weather')

WEATHER_API_URL = os.getenv(
    'WEATHER_API_URL',
    default='https://archive-api.open-meteo.com/v1/archive')

WEATHER_TIMEOUT = float(os.getenv('WEATHER_TIMEOUT', default='30'))

WEATHER_RETRIES = int(os.getenv('WEATHER_RETRIES', default='3'))

WEATHER_UTC_OFFSET_HOURS = float(
    os.getenv('WEATHER_UTC_OFFSET_HOURS', default='0'))

############
# Training #
############

RUNS_DIR = Path(os.getenv('RUNS_DIR', default=BASE_DIR.parent / 'runs'))

TORCH_DEVICE = os.getenv('TORCH_DEVICE', default='cpu')

DATA_LOADER_WORKERS = int(os.getenv('DATA_LOADER_WORKERS', default='0'))

LPIPS_NET = os.getenv('LPIPS_NET', default='alex')

LPIPS_RANDOM_BACKBONE = (
    os.getenv('LPIPS_RANDOM_BACKBONE', default='False') == 'True')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{asctime} {levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': os.getenv('LOG_LEVEL', default='INFO'),
    },
    'loggers': {
        'django.db.backends': {
            'handlers': ['console'],
            'level': 'WARNING',
            'propagate': False,
        },
    },
}
