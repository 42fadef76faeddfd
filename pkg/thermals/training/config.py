"""Training configuration: dataclasses, document loading and precedence.

Values come from built-in defaults, then a YAML/JSON config file, then
command-line flags; each later source wins.
"""
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Tuple

import yaml

from core.exceptions import PipelineConfigError
from imaging.postprocess import RenderConfig
from imaging.preprocess import PreprocessConfig
from scoring.losses import LossWeights

from .serializers import TrainConfigSerializer

logger = logging.getLogger(__name__)

MANIFEST_KEYS = {'command', 'config', 'preprocess_hash', 'run_dir'}


@dataclass(frozen=True)
class AugmentConfig:
    hflip_p: float = 0.5
    vflip_p: float = 0.3
    rot90_p: float = 0.25
    brightness_p: float = 0.4
    brightness_range: Tuple[float, float] = (0.85, 1.15)
    noise_p: float = 0.15
    noise_sigma: float = 0.02

    def __post_init__(self):
        object.__setattr__(
            self, 'brightness_range', tuple(self.brightness_range))
        for name in ('hflip_p', 'vflip_p', 'rot90_p', 'brightness_p',
                     'noise_p'):
            if not 0 <= getattr(self, name) <= 1:
                raise PipelineConfigError(f'{name} must lie in [0, 1]')
        low, high = self.brightness_range
        if not 0 < low <= high:
            raise PipelineConfigError('brightness_range must be positive')
        if self.noise_sigma < 0:
            raise PipelineConfigError('noise_sigma must be >= 0')

    @classmethod
    def disabled(cls):
        return cls(hflip_p=0, vflip_p=0, rot90_p=0, brightness_p=0, noise_p=0)


NESTED = {
    'loss_weights': LossWeights,
    'augment': AugmentConfig,
    'preprocess': PreprocessConfig,
    'render': RenderConfig,
}


@dataclass(frozen=True)
class TrainConfig:
    model: str = 'unet'
    epochs: int = 60
    batch_size: int = 4
    lr: float = 2e-4
    eta_min: float = 0.0
    finetune_epochs: int = 15
    finetune_lr: float = 5e-5
    weight_decay: float = 1e-2
    seed: int = 0
    folds: int = 5
    lambda_l1: float = 100.0
    charbonnier_eps: float = 1e-3
    conditioned: bool = True
    loss_weights: LossWeights = field(default_factory=LossWeights)
    augment: AugmentConfig = field(default_factory=AugmentConfig)
    preprocess: PreprocessConfig = field(default_factory=PreprocessConfig)
    render: RenderConfig = field(default_factory=RenderConfig)

    def __post_init__(self):
        if self.epochs < 1:
            raise PipelineConfigError('epochs must be >= 1')
        if not (self.lr > 0 and self.finetune_lr > 0):
            raise PipelineConfigError('learning rates must be > 0')
        if self.model not in ('unet', 'pix2pix'):
            raise PipelineConfigError(f'unknown model kind {self.model}')

    @property
    def total_epochs(self):
        return self.epochs + self.finetune_epochs

    def as_dict(self):
        document = asdict(self)
        document['augment']['brightness_range'] = list(
            self.augment.brightness_range)
        return document

    @classmethod
    def from_dict(cls, document):
        values = dict(document)
        for name, nested in NESTED.items():
            if name in values:
                values[name] = nested(**values[name])
        return cls(**values)


def read_config_document(path):
    path = Path(path)
    if not path.is_file():
        raise PipelineConfigError(f'config file {path} does not exist')
    try:
        document = yaml.safe_load(path.read_text(encoding='utf-8'))
    except yaml.YAMLError as exc:
        raise PipelineConfigError(f'{path} is not valid YAML: {exc}') from exc
    if document is None:
        return {}
    if not isinstance(document, dict):
        raise PipelineConfigError(f'{path} must hold a mapping')
    if MANIFEST_KEYS <= set(document) and isinstance(
            document['config'], dict):
        logger.info('%s is a run manifest, reusing its config', path)
        return document['config']
    return document


def validate_document(document, origin='config'):
    serializer = TrainConfigSerializer(data=document)
    if not serializer.is_valid():
        raise PipelineConfigError(
            f'invalid {origin}: {dict(serializer.errors)}')
    return serializer.validated_data


def _merge(base, update, sources, origin, prefix=''):
    for key, value in update.items():
        if isinstance(value, dict):
            nested = dict(base.get(key) or {})
            _merge(nested, value, sources, origin, f'{prefix}{key}.')
            base[key] = nested
        else:
            base[key] = value
            sources[f'{prefix}{key}'] = origin


def load_train_config(path=None, overrides=None):
    """Resolve a TrainConfig and the origin of every non-default key.

    ``overrides`` is a nested mapping of flag values; ``None`` entries are
    ignored so unset flags never shadow the file.
    """
    merged, sources = {}, {}
    if path is not None:
        _merge(merged, dict(validate_document(
            read_config_document(path), str(path))), sources, 'file')
    if overrides:
        flags = _drop_unset(overrides)
        _merge(merged, dict(validate_document(flags, 'flags')),
               sources, 'flag')
    defaults = TrainConfig().as_dict()
    for name in NESTED:
        defaults[name].update(merged.pop(name, {}))
    defaults.update(merged)
    try:
        cfg = TrainConfig.from_dict(defaults)
    except (TypeError, ValueError) as exc:
        raise PipelineConfigError(f'invalid training config: {exc}') from exc
    logger.debug('training config resolved: %s', cfg)
    return cfg, sources


def _drop_unset(values):
    cleaned = {}
    for key, value in values.items():
        if isinstance(value, dict):
            value = _drop_unset(value)
            if not value:
                continue
        if value is not None:
            cleaned[key] = value
    return cleaned
