import json

import pytest

from core.datasets import record_to_row, write_dataset
from core.tests.factories import make_record, make_samples
from imaging.preprocess import PreprocessConfig
from scoring.losses import LossWeights
from training.config import AugmentConfig, TrainConfig
from training.data import prepare_sample
from weather.client import fixture_key


@pytest.fixture(autouse=True)
def offline_settings(settings, tmp_path):
    settings.LPIPS_RANDOM_BACKBONE = True
    settings.WEATHER_MODE = 'fixture'
    settings.WEATHER_FIXTURE_DIR = tmp_path / 'weather'
    settings.WEATHER_UTC_OFFSET_HOURS = 0.0
    settings.RUNS_DIR = tmp_path / 'runs'
    settings.TORCH_DEVICE = 'cpu'
    settings.DATA_LOADER_WORKERS = 0
    return settings


@pytest.fixture
def record():
    return make_record()


@pytest.fixture
def samples():
    return make_samples()


@pytest.fixture
def dataset_dir(tmp_path, samples):
    root = tmp_path / 'dataset'
    write_dataset(root, samples)
    return root


@pytest.fixture
def raw_capture_dir(tmp_path, samples, offline_settings):
    """Raw pairs, a captures.csv and matching weather fixtures."""
    root = tmp_path / 'raw'
    write_dataset(root, samples)
    (root / 'metadata.csv').unlink()
    lines = ['sample_id,group_id,latitude,longitude,timestamp_iso8601']
    fixture_dir = offline_settings.WEATHER_FIXTURE_DIR
    fixture_dir.mkdir(parents=True, exist_ok=True)
    for sample in samples:
        row = record_to_row(sample.sample_id, sample.group_id,
                            sample.metadata)
        lines.append(
            f'{sample.sample_id},{sample.group_id},{row["latitude"]},'
            f'{row["longitude"]},{row["timestamp_iso8601"]}')
        meta = sample.metadata
        key = fixture_key(meta.latitude, meta.longitude, meta.timestamp)
        (fixture_dir / f'{key}.json').write_text(json.dumps({
            'temperature': meta.temperature,
            'relative_humidity': meta.relative_humidity,
            'wind_speed': meta.wind_speed,
            'wind_direction': meta.wind_direction,
            'solar_radiation': meta.solar_radiation,
            'cloud_cover': meta.cloud_cover,
        }))
    (root / 'captures.csv').write_text('\n'.join(lines) + '\n')
    return root


@pytest.fixture
def tiny_config():
    return TrainConfig(
        epochs=2,
        finetune_epochs=1,
        batch_size=4,
        seed=7,
        loss_weights=LossWeights(lpips=0.0),
        augment=AugmentConfig(),
        preprocess=PreprocessConfig(target_size=32),
    )


@pytest.fixture
def prepared(samples, tiny_config):
    return [prepare_sample(sample, tiny_config.preprocess)
            for sample in samples]
