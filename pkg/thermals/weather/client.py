"""Weather observations for a capture: live Open-Meteo or recorded fixtures.

Fixture files are JSON documents named ``<lat>_<lon>_<hour>.json`` with the
coordinates rounded to two decimals and the UTC hour as ``YYYY-MM-DDTHH``.
"""
import json
import logging
from datetime import datetime, timedelta, timezone
from pathlib import Path

import requests
from django.conf import settings
from requests.adapters import HTTPAdapter
from urllib3.util.retry import Retry

from core.exceptions import (FixtureMissError, PipelineConfigError,
                             WeatherFetchError, WeatherParseError)
from core.types import MetadataRecord

from .serializers import WeatherFieldsSerializer

logger = logging.getLogger(__name__)

LIVE = 'live'
FIXTURE = 'fixture'
WEATHER_MODES = (LIVE, FIXTURE)

HOURLY_VARIABLES = {
    'temperature_2m': 'temperature',
    'relative_humidity_2m': 'relative_humidity',
    'wind_speed_10m': 'wind_speed',
    'wind_direction_10m': 'wind_direction',
    'shortwave_radiation': 'solar_radiation',
    'cloud_cover': 'cloud_cover',
}


def nearest_hour(timestamp):
    moment = timestamp.astimezone(timezone.utc) + timedelta(minutes=30)
    return moment.replace(minute=0, second=0, microsecond=0)


def fixture_key(latitude, longitude, timestamp):
    hour = nearest_hour(timestamp)
    return f'{latitude:.2f}_{longitude:.2f}_{hour:%Y-%m-%dT%H}'


def validate_weather(fields, raw):
    serializer = WeatherFieldsSerializer(data=fields)
    if not serializer.is_valid():
        raise WeatherParseError(
            f'invalid weather fields: {dict(serializer.errors)}', raw=raw)
    return dict(serializer.validated_data)


def build_record(latitude, longitude, timestamp, weather):
    return MetadataRecord(
        latitude=float(latitude),
        longitude=float(longitude),
        timestamp=timestamp.astimezone(timezone.utc),
        **weather,
    )


class FixtureWeatherClient:

    def __init__(self, fixture_dir):
        self.fixture_dir = Path(fixture_dir)

    def path_for(self, latitude, longitude, timestamp):
        key = fixture_key(latitude, longitude, timestamp)
        return self.fixture_dir / f'{key}.json'

    def fetch(self, latitude, longitude, timestamp):
        path = self.path_for(latitude, longitude, timestamp)
        if not path.exists():
            raise FixtureMissError(path.stem)
        raw = path.read_text(encoding='utf-8')
        try:
            document = json.loads(raw)
        except ValueError as exc:
            raise WeatherParseError(
                f'fixture {path.name} is not JSON: {exc}', raw=raw) from exc
        logger.debug('weather fixture hit %s', path.name)
        weather = validate_weather(document, raw)
        return build_record(latitude, longitude, timestamp, weather)

    def store(self, record):
        path = self.path_for(
            record.latitude, record.longitude, record.timestamp)
        path.parent.mkdir(parents=True, exist_ok=True)
        document = {
            name: getattr(record, name)
            for name in HOURLY_VARIABLES.values()
        }
        path.write_text(
            json.dumps(document, indent=2, sort_keys=True) + '\n',
            encoding='utf-8')
        return path


def parse_hourly(payload, timestamp):
    try:
        hourly = payload['hourly']
        times = [
            datetime.fromisoformat(value).replace(tzinfo=timezone.utc)
            for value in hourly['time']
        ]
        if not times:
            raise ValueError('empty hourly series')
        target = timestamp.astimezone(timezone.utc)
        index = min(
            range(len(times)), key=lambda i: abs(times[i] - target))
        fields = {}
        for variable, name in HOURLY_VARIABLES.items():
            value = hourly[variable][index]
            if value is None:
                raise ValueError(f'{variable} missing at {times[index]}')
            fields[name] = float(value)
    except (KeyError, IndexError, TypeError, ValueError) as exc:
        raise WeatherParseError(
            f'malformed hourly response: {exc}', raw=payload) from exc
    fields['wind_direction'] = fields['wind_direction'] % 360
    return validate_weather(fields, payload)


class OpenMeteoClient:

    def __init__(self, url=None, timeout=None, retries=None, session=None):
        self.url = url or settings.WEATHER_API_URL
        self.timeout = timeout or settings.WEATHER_TIMEOUT
        if session is None:
            session = requests.Session()
            retry = Retry(
                total=settings.WEATHER_RETRIES if retries is None else retries,
                backoff_factor=0.5,
                status_forcelist=(429, 500, 502, 503, 504),
                allowed_methods=('GET',),
            )
            session.mount('https://', HTTPAdapter(max_retries=retry))
            session.mount('http://', HTTPAdapter(max_retries=retry))
        self.session = session

    def request_params(self, latitude, longitude, timestamp):
        day = nearest_hour(timestamp).date().isoformat()
        return {
            'latitude': latitude,
            'longitude': longitude,
            'start_date': day,
            'end_date': day,
            'hourly': ','.join(HOURLY_VARIABLES),
            'timezone': 'UTC',
            'wind_speed_unit': 'ms',
        }

    def fetch(self, latitude, longitude, timestamp):
        params = self.request_params(latitude, longitude, timestamp)
        try:
            response = self.session.get(
                self.url, params=params, timeout=self.timeout)
            response.raise_for_status()
        except requests.RequestException as exc:
            logger.warning(
                'weather fetch failed for (%s, %s) at %s: %s',
                latitude, longitude, timestamp, exc)
            raise WeatherFetchError(f'weather request failed: {exc}') from exc
        try:
            payload = response.json()
        except ValueError as exc:
            raise WeatherParseError(
                'weather response is not JSON', raw=response.text) from exc
        weather = parse_hourly(payload, timestamp)
        return build_record(latitude, longitude, timestamp, weather)


def get_weather_client(mode=None, fixture_dir=None):
    mode = mode or settings.WEATHER_MODE
    if mode == LIVE:
        return OpenMeteoClient()
    if mode == FIXTURE:
        return FixtureWeatherClient(
            fixture_dir or settings.WEATHER_FIXTURE_DIR)
    raise PipelineConfigError(
        f'unknown weather mode {mode!r}, expected one of {WEATHER_MODES}')


def fetch_weather(latitude, longitude, timestamp, client=None):
    client = client or get_weather_client()
    return client.fetch(latitude, longitude, timestamp)
