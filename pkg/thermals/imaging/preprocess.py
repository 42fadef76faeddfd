import json
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import cv2
import numpy as np

from core.exceptions import PipelineConfigError
from core.types import ImageTensor, PairedSample, RangeTag
from core.utils import atomic_write_json, config_hash, get_code_version

MANIFEST_FILE = 'preprocess.json'


@dataclass(frozen=True)
class PreprocessConfig:
    target_size: int = 384
    saturation_factor: float = 1.3
    stretch_lo: float = 1.0
    stretch_hi: float = 99.0
    saturation_enabled: bool = True
    stretch_enabled: bool = True

    def __post_init__(self):
        if self.target_size <= 0:
            raise PipelineConfigError('target_size must be positive')
        if self.saturation_factor <= 0:
            raise PipelineConfigError('saturation_factor must be positive')
        if not 0 <= self.stretch_lo < self.stretch_hi <= 100:
            raise PipelineConfigError(
                'stretch percentiles must satisfy 0 <= lo < hi <= 100')

    def as_dict(self):
        return asdict(self)

    @property
    def hash(self):
        return config_hash(self.as_dict())

    @classmethod
    def from_dict(cls, document):
        return cls(**document)

    def resized(self, target_size):
        return replace(self, target_size=target_size)


@dataclass(frozen=True)
class LetterboxGeometry:
    scale: float
    height: int
    width: int
    top: int
    left: int
    target: int

    @classmethod
    def fit(cls, height, width, target):
        scale = target / max(height, width)
        new_height = min(target, max(1, int(round(height * scale))))
        new_width = min(target, max(1, int(round(width * scale))))
        return cls(
            scale=scale,
            height=new_height,
            width=new_width,
            top=(target - new_height) // 2,
            left=(target - new_width) // 2,
            target=target,
        )

    def content_mask(self):
        mask = np.zeros((self.target, self.target), dtype=bool)
        mask[self.top:self.top + self.height,
             self.left:self.left + self.width] = True
        return mask


def resize_bilinear(data, height, width):
    if data.shape[1:] == (height, width):
        return data.copy()
    pixels = np.ascontiguousarray(data.transpose(1, 2, 0))
    resized = cv2.resize(
        pixels, (width, height), interpolation=cv2.INTER_LINEAR)
    if resized.ndim == 2:
        resized = resized[:, :, None]
    return resized.transpose(2, 0, 1)


def letterbox_with_mask(img, target):
    _, height, width = img.data.shape
    geometry = LetterboxGeometry.fit(height, width, target)
    content = resize_bilinear(img.data, geometry.height, geometry.width)
    low, high = img.range_tag.bounds
    canvas = np.zeros(
        (img.channels, target, target), dtype=np.float32)
    canvas[:, geometry.top:geometry.top + geometry.height,
           geometry.left:geometry.left + geometry.width] = np.clip(
               content, low, high)
    return ImageTensor(canvas, img.range_tag), geometry.content_mask()


def letterbox(img, target):
    return letterbox_with_mask(img, target)[0]


def saturation_boost(img, factor):
    img.require(RangeTag.RAW_0_255, channels=3)
    pixels = np.ascontiguousarray(img.data.transpose(1, 2, 0) / 255.0)
    hsv = cv2.cvtColor(pixels.astype(np.float32), cv2.COLOR_RGB2HSV)
    hsv[:, :, 1] = np.clip(hsv[:, :, 1] * factor, 0.0, 1.0)
    rgb = cv2.cvtColor(hsv, cv2.COLOR_HSV2RGB) * 255.0
    return ImageTensor(
        np.clip(rgb, 0.0, 255.0).transpose(2, 0, 1), RangeTag.RAW_0_255)


def contrast_stretch(img, lo, hi, mask=None):
    """Stretch each channel so its [lo, hi] percentiles span [0, 255].

    Percentiles are taken over ``mask`` when given (letterbox content only).
    Channels whose percentile spread is below one level pass through.
    """
    img.require(RangeTag.RAW_0_255)
    if not lo < hi:
        raise PipelineConfigError('stretch requires lo < hi')
    out = img.data.copy()
    for index, channel in enumerate(img.data):
        values = channel[mask] if mask is not None else channel.ravel()
        if values.size == 0:
            continue
        p_lo, p_hi = np.percentile(values, [lo, hi])
        if p_hi - p_lo < 1.0:
            continue
        out[index] = np.clip(
            (channel - p_lo) * (255.0 / (p_hi - p_lo)), 0.0, 255.0)
    return ImageTensor(out, RangeTag.RAW_0_255)


def normalize_to_pm1(img):
    img.require(RangeTag.RAW_0_255)
    return ImageTensor(img.data / 127.5 - 1.0, RangeTag.SIGNED_PM1)


def condition_rgb(img, cfg):
    img.require(RangeTag.RAW_0_255, channels=3)
    boxed, mask = letterbox_with_mask(img, cfg.target_size)
    if cfg.saturation_enabled:
        boxed = saturation_boost(boxed, cfg.saturation_factor)
    if cfg.stretch_enabled:
        boxed = contrast_stretch(
            boxed, cfg.stretch_lo, cfg.stretch_hi, mask=mask)
    return boxed


def preprocess_pipeline(img, cfg):
    return normalize_to_pm1(condition_rgb(img, cfg))


def preprocess_thermal(img, cfg):
    img.require(RangeTag.UNIT_0_1, channels=1)
    return letterbox(img, cfg.target_size)


def preprocess_sample(sample, cfg, normalize=True):
    rgb = condition_rgb(sample.rgb, cfg)
    if normalize:
        rgb = normalize_to_pm1(rgb)
    return PairedSample(
        sample_id=sample.sample_id,
        rgb=rgb,
        thermal=preprocess_thermal(sample.thermal, cfg),
        metadata=sample.metadata,
        group_id=sample.group_id,
    )


def write_manifest(root, cfg):
    from weather.features import LAYOUT_VERSION

    return atomic_write_json(Path(root) / MANIFEST_FILE, {
        'config': cfg.as_dict(),
        'hash': cfg.hash,
        'layout_version': LAYOUT_VERSION,
        'code_version': get_code_version(),
    })


def read_manifest(root):
    path = Path(root) / MANIFEST_FILE
    if not path.exists():
        return None
    document = json.loads(path.read_text(encoding='utf-8'))
    cfg = PreprocessConfig.from_dict(document['config'])
    if cfg.hash != document.get('hash'):
        raise PipelineConfigError(
            f'{path}: recorded hash does not match the recorded config')
    return cfg
