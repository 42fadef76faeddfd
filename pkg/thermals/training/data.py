import logging
from dataclasses import dataclass, replace

import numpy as np
import torch
from django.conf import settings
from torch.utils.data import DataLoader, Dataset

from core.datasets import read_dataset
from core.exceptions import ConfigHashMismatch, PipelineConfigError
from core.types import RangeTag
from imaging.preprocess import (PreprocessConfig, normalize_to_pm1,
                                preprocess_sample, preprocess_thermal,
                                read_manifest)
from weather.features import apply_standardizer, build_feature_vector

from .augment import apply_augmentation, augmentation_rng, sample_augmentation

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PreparedSample:
    sample_id: str
    group_id: str
    rgb: np.ndarray
    thermal: np.ndarray
    vector: object


def prepare_sample(sample, cfg=None, utc_offset_hours=None):
    if utc_offset_hours is None:
        utc_offset_hours = settings.WEATHER_UTC_OFFSET_HOURS
    if cfg is not None:
        sample = preprocess_sample(sample, cfg)
        rgb = sample.rgb
    else:
        rgb = normalize_to_pm1(sample.rgb)
    rgb.require(RangeTag.SIGNED_PM1, channels=3)
    return PreparedSample(
        sample_id=sample.sample_id,
        group_id=sample.group_id,
        rgb=rgb.data,
        thermal=sample.thermal.data,
        vector=build_feature_vector(sample.metadata, utc_offset_hours),
    )


def load_prepared(root, preprocess=None, strict=False):
    """Load ``root`` ready for a network, with the config it was built with.

    A directory written by the ``preprocess`` command is used as is; its
    recorded config must match ``preprocess`` when ``strict``. A raw
    directory is preprocessed here with ``preprocess`` (or the defaults).
    """
    recorded = read_manifest(root)
    samples = read_dataset(root)
    if not samples:
        raise PipelineConfigError(f'{root} holds no samples')
    if recorded is not None:
        if strict and preprocess is not None and (
                recorded.hash != preprocess.hash):
            raise ConfigHashMismatch(
                f'{root} was preprocessed with config {recorded.hash} '
                f'{recorded.as_dict()}, the checkpoint expects '
                f'{preprocess.hash} {preprocess.as_dict()}; rerun the '
                f'preprocess command with the checkpoint settings')
        cfg = recorded
        prepared = [_prepared_from_disk(sample, cfg) for sample in samples]
    else:
        cfg = preprocess or PreprocessConfig()
        logger.info('preprocessing %d raw samples (config %s)',
                    len(samples), cfg.hash)
        prepared = [prepare_sample(sample, cfg) for sample in samples]
    return prepared, cfg


def _prepared_from_disk(sample, cfg):
    if sample.rgb.size != (cfg.target_size, cfg.target_size):
        raise PipelineConfigError(
            f'{sample.sample_id}: size {sample.rgb.size} does not match '
            f'the recorded target size {cfg.target_size}')
    thermal = sample.thermal
    if thermal.size != sample.rgb.size:
        thermal = preprocess_thermal(thermal, cfg)
    return prepare_sample(replace(sample, thermal=thermal))


class PairedDataset(Dataset):
    def __init__(self, samples, standardizer, augment=None, seed=0):
        self.samples = list(samples)
        self.vectors = [
            apply_standardizer(sample.vector, standardizer).values
            for sample in self.samples
        ]
        self.augment = augment
        self.seed = seed
        self.epoch = 0

    def set_epoch(self, epoch):
        self.epoch = epoch

    def __len__(self):
        return len(self.samples)

    def __getitem__(self, index):
        sample = self.samples[index]
        rgb, thermal = sample.rgb, sample.thermal
        if self.augment is not None:
            rng = augmentation_rng(self.seed, self.epoch, index)
            draw = sample_augmentation(rng, self.augment)
            rgb, thermal = apply_augmentation(
                rgb, thermal, draw, self.augment.noise_sigma)
        return (
            torch.from_numpy(np.array(rgb, dtype=np.float32)),
            torch.from_numpy(np.array(thermal, dtype=np.float32)),
            torch.from_numpy(self.vectors[index].astype(np.float32)),
            index,
        )


def make_loader(dataset, batch_size, shuffle=False, seed=0, workers=None):
    if workers is None:
        workers = settings.DATA_LOADER_WORKERS
    generator = torch.Generator()
    generator.manual_seed(seed)
    return DataLoader(
        dataset,
        batch_size=batch_size,
        shuffle=shuffle,
        num_workers=workers,
        generator=generator,
        drop_last=False,
    )
