import enum
import math
from dataclasses import dataclass, field
from datetime import datetime

import numpy as np

from .exceptions import RangeContractError, ShapeError

RANGE_TOLERANCE = 1e-5


class RangeTag(enum.Enum):
    RAW_0_255 = 'raw_0_255'
    UNIT_0_1 = 'unit_0_1'
    SIGNED_PM1 = 'signed_pm1'

    @property
    def bounds(self):
        return {
            RangeTag.RAW_0_255: (0.0, 255.0),
            RangeTag.UNIT_0_1: (0.0, 1.0),
            RangeTag.SIGNED_PM1: (-1.0, 1.0),
        }[self]


@dataclass(frozen=True, eq=False)
class ImageTensor:
    data: np.ndarray
    range_tag: RangeTag

    def __post_init__(self):
        data = np.array(self.data, dtype=np.float32, copy=True)
        if data.ndim != 3:
            raise ShapeError(f'expected a [C,H,W] array, got {data.shape}')
        channels, height, width = data.shape
        if channels not in (1, 3):
            raise ShapeError(f'channel count must be 1 or 3, got {channels}')
        if height <= 0 or width <= 0:
            raise ShapeError(f'empty image {data.shape}')
        low, high = self.range_tag.bounds
        if not np.isfinite(data).all():
            raise RangeContractError('image holds non-finite values')
        if (data.min() < low - RANGE_TOLERANCE
                or data.max() > high + RANGE_TOLERANCE):
            raise RangeContractError(
                f'values [{data.min()}, {data.max()}] outside '
                f'{self.range_tag.value} [{low}, {high}]')
        data.setflags(write=False)
        object.__setattr__(self, 'data', data)

    @property
    def channels(self):
        return self.data.shape[0]

    @property
    def size(self):
        return self.data.shape[1:]

    def require(self, tag, channels=None):
        if self.range_tag is not tag:
            raise RangeContractError(
                f'expected a {tag.value} image, got {self.range_tag.value}')
        if channels is not None and self.channels != channels:
            raise ShapeError(
                f'expected {channels} channels, got {self.channels}')
        return self

    def __eq__(self, other):
        if not isinstance(other, ImageTensor):
            return NotImplemented
        return (self.range_tag is other.range_tag
                and self.data.shape == other.data.shape
                and bool(np.array_equal(self.data, other.data)))

    __hash__ = None


@dataclass(frozen=True)
class MetadataRecord:
    latitude: float
    longitude: float
    timestamp: datetime
    temperature: float
    relative_humidity: float
    wind_speed: float
    wind_direction: float
    solar_radiation: float
    cloud_cover: float

    NUMERIC_FIELDS = (
        'latitude', 'longitude', 'temperature', 'relative_humidity',
        'wind_speed', 'wind_direction', 'solar_radiation', 'cloud_cover',
    )

    def violations(self):
        problems = []
        for name in self.NUMERIC_FIELDS:
            value = getattr(self, name)
            if value is None or not math.isfinite(value):
                problems.append(f'{name} is not a finite number')
        if problems:
            return problems
        if self.timestamp.tzinfo is None:
            problems.append('timestamp must be timezone-aware (UTC)')
        if not -90 <= self.latitude <= 90:
            problems.append('latitude out of [-90,90]')
        if not -180 <= self.longitude <= 180:
            problems.append('longitude out of [-180,180]')
        if not 0 <= self.relative_humidity <= 100:
            problems.append('relative_humidity out of [0,100]')
        if not 0 <= self.cloud_cover <= 100:
            problems.append('cloud_cover out of [0,100]')
        if not 0 <= self.wind_direction < 360:
            problems.append('wind_direction out of [0,360)')
        if self.wind_speed < 0:
            problems.append('wind_speed negative')
        if self.solar_radiation < 0:
            problems.append('solar_radiation negative')
        return problems


@dataclass(frozen=True)
class PairedSample:
    sample_id: str
    rgb: ImageTensor
    thermal: ImageTensor
    metadata: MetadataRecord
    group_id: str


def validate_sample(sample, require_same_size=True, expected_size=None):
    """Return every violated invariant of ``sample``; never raises."""
    problems = []
    if not sample.sample_id:
        problems.append('sample_id empty')
    if not sample.group_id:
        problems.append('group_id empty')
    if sample.rgb.channels != 3:
        problems.append('rgb must have 3 channels')
    if sample.rgb.range_tag is RangeTag.UNIT_0_1:
        problems.append('rgb range must be raw_0_255 or signed_pm1')
    if sample.thermal.channels != 1:
        problems.append('thermal must have 1 channel')
    if sample.thermal.range_tag is not RangeTag.UNIT_0_1:
        problems.append('thermal range must be unit_0_1')
    if require_same_size and sample.rgb.size != sample.thermal.size:
        problems.append('thermal size mismatch')
    if expected_size is not None:
        for name in ('rgb', 'thermal'):
            height, width = getattr(sample, name).size
            if (height, width) != (expected_size, expected_size):
                problems.append(
                    f'{name} size {height}x{width} != '
                    f'{expected_size}x{expected_size}')
    problems.extend(sample.metadata.violations())
    return problems


@dataclass(frozen=True)
class SampleScore:
    sample_id: str
    psnr_db: float
    ssim: float
    lpips: float


@dataclass(frozen=True)
class MetricReport:
    fold_id: int
    per_sample: tuple = field(default_factory=tuple)

    COLUMNS = ('sample_id', 'psnr_db', 'ssim', 'lpips')

    @property
    def fold_mean(self):
        if not self.per_sample:
            return (math.nan, math.nan, math.nan)
        count = len(self.per_sample)
        return tuple(
            math.fsum(getattr(score, name) for score in self.per_sample)
            / count
            for name in ('psnr_db', 'ssim', 'lpips')
        )

    @property
    def sample_ids(self):
        return [score.sample_id for score in self.per_sample]

    def violations(self):
        problems = []
        for score in self.per_sample:
            if not -1 <= score.ssim <= 1:
                problems.append(f'{score.sample_id}: ssim out of [-1,1]')
            if score.lpips < 0:
                problems.append(f'{score.sample_id}: lpips negative')
            if not score.psnr_db > 0:
                problems.append(f'{score.sample_id}: psnr not positive')
        return problems
