import math
from datetime import timedelta, timezone

from core.exceptions import RangeContractError

SECONDS_PER_DAY = 86400
DAYS_PER_YEAR = 365.25


def to_local(timestamp, utc_offset_hours=0.0):
    return (timestamp.astimezone(timezone.utc)
            + timedelta(hours=utc_offset_hours))


def seconds_since_midnight(timestamp, utc_offset_hours=0.0):
    local = to_local(timestamp, utc_offset_hours)
    return (local.hour * 3600 + local.minute * 60 + local.second
            + local.microsecond / 1e6)


def encode_angle(radians):
    return math.sin(radians), math.cos(radians)


def encode_time_of_day(timestamp, utc_offset_hours=0.0):
    seconds = seconds_since_midnight(timestamp, utc_offset_hours)
    return encode_angle(2 * math.pi * seconds / SECONDS_PER_DAY)


def encode_wind_direction(degrees):
    if not 0 <= degrees < 360:
        raise RangeContractError(
            f'wind direction {degrees} out of [0,360)')
    return encode_angle(math.radians(degrees))


def encode_day_of_year(timestamp, utc_offset_hours=0.0):
    day = to_local(timestamp, utc_offset_hours).timetuple().tm_yday
    return encode_angle(2 * math.pi * (day - 1) / DAYS_PER_YEAR)
