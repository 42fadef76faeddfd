from dataclasses import dataclass

import numpy as np

from core.exceptions import (FittingError, IngestionError,
                             RangeContractError, ShapeError)

from .encoding import (encode_day_of_year, encode_time_of_day,
                       encode_wind_direction)

LAYOUT_VERSION = 'wx15-v1'

FEATURE_NAMES = (
    'latitude', 'longitude', 'temperature', 'relative_humidity',
    'wind_speed', 'wind_dir_sin', 'wind_dir_cos', 'solar_radiation',
    'cloud_cover', 'time_of_day_sin', 'time_of_day_cos', 'day_of_year_sin',
    'day_of_year_cos', 'solar_elevation_proxy', 'is_daylight',
)
FEATURE_COUNT = len(FEATURE_NAMES)
CYCLICAL_PAIRS = ((5, 6), (9, 10), (11, 12))
DAYLIGHT_RADIATION = 10.0
STD_FLOOR = 1e-6


@dataclass(frozen=True, eq=False)
class MetadataVector:
    values: np.ndarray
    layout_version: str = LAYOUT_VERSION
    standardized: bool = False

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64, copy=True)
        if values.shape != (FEATURE_COUNT,):
            raise ShapeError(
                f'metadata vector must have {FEATURE_COUNT} slots, '
                f'got shape {values.shape}')
        if not self.standardized:
            for sin_slot, cos_slot in CYCLICAL_PAIRS:
                norm = values[sin_slot] ** 2 + values[cos_slot] ** 2
                if abs(norm - 1.0) > 1e-6:
                    raise RangeContractError(
                        f'slots {FEATURE_NAMES[sin_slot]}/'
                        f'{FEATURE_NAMES[cos_slot]} are not a unit pair')
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)

    def __eq__(self, other):
        if not isinstance(other, MetadataVector):
            return NotImplemented
        return (self.layout_version == other.layout_version
                and self.standardized == other.standardized
                and bool(np.array_equal(self.values, other.values)))

    __hash__ = None

    def __getitem__(self, name):
        return self.values[FEATURE_NAMES.index(name)]


def build_feature_vector(record, utc_offset_hours=0.0):
    for name in record.NUMERIC_FIELDS:
        if getattr(record, name, None) is None:
            raise IngestionError(f'missing field {name}', field=name)
    if getattr(record, 'timestamp', None) is None:
        raise IngestionError('missing field timestamp', field='timestamp')
    problems = record.violations()
    if problems:
        raise IngestionError('; '.join(problems))

    wind_sin, wind_cos = encode_wind_direction(record.wind_direction)
    time_sin, time_cos = encode_time_of_day(
        record.timestamp, utc_offset_hours)
    day_sin, day_cos = encode_day_of_year(record.timestamp, utc_offset_hours)
    daylight = 1.0 if record.solar_radiation > DAYLIGHT_RADIATION else 0.0
    return MetadataVector(np.array([
        record.latitude,
        record.longitude,
        record.temperature,
        record.relative_humidity,
        record.wind_speed,
        wind_sin,
        wind_cos,
        record.solar_radiation,
        record.cloud_cover,
        time_sin,
        time_cos,
        day_sin,
        day_cos,
        time_cos * day_cos,
        daylight,
    ]))


@dataclass(frozen=True, eq=False)
class Standardizer:
    mean: np.ndarray
    std: np.ndarray
    fitted_on_fold: int

    def as_dict(self):
        return {
            'mean': [float(value) for value in self.mean],
            'std': [float(value) for value in self.std],
            'fitted_on_fold': int(self.fitted_on_fold),
            'layout_version': LAYOUT_VERSION,
        }

    @classmethod
    def from_dict(cls, document):
        if document.get('layout_version', LAYOUT_VERSION) != LAYOUT_VERSION:
            raise FittingError(
                f'standardizer was fitted on layout '
                f'{document["layout_version"]}, expected {LAYOUT_VERSION}')
        return cls(
            mean=np.asarray(document['mean'], dtype=np.float64),
            std=np.asarray(document['std'], dtype=np.float64),
            fitted_on_fold=int(document['fitted_on_fold']),
        )


def fit_standardizer(vectors, fold):
    vectors = list(vectors)
    if len(vectors) < 2:
        raise FittingError(
            f'need at least 2 vectors to fit a standardizer, '
            f'got {len(vectors)}')
    stacked = np.stack([vector.values for vector in vectors])
    mean = stacked.mean(axis=0)
    std = np.maximum(stacked.std(axis=0), STD_FLOOR)
    return Standardizer(mean=mean, std=std, fitted_on_fold=fold)


def apply_standardizer(vector, standardizer):
    return MetadataVector(
        (vector.values - standardizer.mean) / standardizer.std,
        layout_version=vector.layout_version,
        standardized=True,
    )


def invert_standardizer(vector, standardizer):
    return MetadataVector(
        vector.values * standardizer.std + standardizer.mean,
        layout_version=vector.layout_version,
        standardized=False,
    )
