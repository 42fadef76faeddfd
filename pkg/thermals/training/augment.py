from dataclasses import dataclass
from typing import Optional

import numpy as np

from core.exceptions import ShapeError


@dataclass(frozen=True)
class AugmentDraw:
    hflip: bool = False
    vflip: bool = False
    quarter_turns: int = 0
    brightness: Optional[float] = None
    noise_seed: Optional[int] = None

    @property
    def is_identity(self):
        return (not self.hflip and not self.vflip and not self.quarter_turns
                and self.brightness is None and self.noise_seed is None)


def augmentation_rng(seed, epoch, index):
    return np.random.default_rng([seed, epoch, index])


def sample_augmentation(rng, cfg):
    # every call consumes the same draws, whatever the probabilities
    hits = rng.random(5)
    turns = int(rng.integers(1, 4))
    factor = float(rng.uniform(*cfg.brightness_range))
    noise_seed = int(rng.integers(2 ** 32))
    return AugmentDraw(
        hflip=bool(hits[0] < cfg.hflip_p),
        vflip=bool(hits[1] < cfg.vflip_p),
        quarter_turns=turns if hits[2] < cfg.rot90_p else 0,
        brightness=factor if hits[3] < cfg.brightness_p else None,
        noise_seed=noise_seed if hits[4] < cfg.noise_p else None,
    )


def apply_geometry(image, draw):
    if draw.hflip:
        image = image[:, :, ::-1]
    if draw.vflip:
        image = image[:, ::-1, :]
    if draw.quarter_turns:
        image = np.rot90(image, draw.quarter_turns, axes=(1, 2))
    return np.ascontiguousarray(image)


def apply_augmentation(rgb, thermal, draw, noise_sigma=0.02):
    rgb = apply_geometry(rgb, draw)
    thermal = apply_geometry(thermal, draw)
    if draw.brightness is not None:
        rgb = np.clip(((rgb + 1) / 2 * draw.brightness) * 2 - 1, -1, 1)
    if draw.noise_seed is not None:
        noise = np.random.default_rng(draw.noise_seed).normal(
            0.0, noise_sigma, size=rgb.shape)
        rgb = np.clip(rgb + noise, -1, 1)
    return rgb.astype(np.float32), thermal.astype(np.float32)


def augment_pair(rgb, thermal, metadata, rng, cfg):
    if rgb.shape[1:] != thermal.shape[1:]:
        raise ShapeError('rgb and thermal must share their spatial size')
    draw = sample_augmentation(rng, cfg)
    rgb, thermal = apply_augmentation(rgb, thermal, draw, cfg.noise_sigma)
    return rgb, thermal, metadata
