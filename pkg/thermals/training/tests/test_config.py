import json

import pytest

from core.exceptions import PipelineConfigError
from training import ledger
from training.config import (AugmentConfig, TrainConfig, load_train_config,
                             read_config_document)


def write(tmp_path, text, name='train.yaml'):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_defaults():
    cfg, sources = load_train_config()
    assert cfg == TrainConfig()
    assert (cfg.epochs, cfg.finetune_epochs, cfg.total_epochs) == (60, 15, 75)
    assert (cfg.lr, cfg.finetune_lr) == (2e-4, 5e-5)
    assert cfg.loss_weights.msssim == 0.4
    assert cfg.augment.brightness_range == (0.85, 1.15)
    assert sources == {}


def test_flags_win_over_the_file(tmp_path):
    path = write(tmp_path, 'epochs: 10\nlr: 0.001\naugment:\n  hflip_p: 0.1\n')
    cfg, sources = load_train_config(
        path, {'epochs': 5, 'seed': None, 'augment': {'noise_p': None}})

    assert cfg.epochs == 5
    assert cfg.lr == 0.001
    assert cfg.seed == 0
    assert cfg.augment.hflip_p == 0.1
    assert cfg.augment.noise_p == 0.15
    assert sources == {
        'epochs': 'flag', 'lr': 'file', 'augment.hflip_p': 'file'}


def test_json_documents_are_accepted(tmp_path):
    path = write(tmp_path, json.dumps({
        'model': 'pix2pix',
        'preprocess': {'target_size': 256, 'stretch_enabled': False},
        'loss_weights': {'lpips': 0},
    }), name='train.json')
    cfg, _ = load_train_config(path)
    assert cfg.model == 'pix2pix'
    assert cfg.preprocess.target_size == 256
    assert not cfg.preprocess.stretch_enabled
    assert cfg.loss_weights.lpips == 0


@pytest.mark.parametrize('text, message', [
    ('epochz: 3\n', 'epochz'),
    ('augment:\n  flip: 0.5\n', 'flip'),
    ('lr: 0\n', 'lr'),
    ('augment:\n  hflip_p: 1.5\n', 'hflip_p'),
    ('augment:\n  brightness_range: [1.2, 0.8]\n', 'brightness_range'),
    ('model: vae\n', 'model'),
    ('- 1\n- 2\n', 'mapping'),
    ('epochs: [\n', 'YAML'),
])
def test_invalid_documents(tmp_path, text, message):
    with pytest.raises(PipelineConfigError, match=message):
        load_train_config(write(tmp_path, text))


def test_invalid_flags_name_their_origin():
    with pytest.raises(PipelineConfigError, match='flags'):
        load_train_config(overrides={'batch_size': 0})


def test_missing_and_empty_files(tmp_path):
    with pytest.raises(PipelineConfigError, match='does not exist'):
        read_config_document(tmp_path / 'absent.yaml')
    assert read_config_document(write(tmp_path, '')) == {}


def test_document_round_trip():
    cfg = TrainConfig(model='pix2pix', augment=AugmentConfig.disabled())
    assert TrainConfig.from_dict(cfg.as_dict()) == cfg


def test_dataclass_validation():
    with pytest.raises(PipelineConfigError):
        TrainConfig(epochs=0)
    with pytest.raises(PipelineConfigError):
        AugmentConfig(noise_sigma=-0.1)


def test_run_manifest_reproduces_its_config(tmp_path, monkeypatch):
    monkeypatch.setattr(ledger, 'ledger_ready', lambda: False)
    original = TrainConfig(model='pix2pix', epochs=3, seed=9,
                           augment=AugmentConfig.disabled())
    run = ledger.RunLedger.start('repeat', 'train', original, 'h', tmp_path)

    cfg, sources = load_train_config(run.manifest.path, {'epochs': 4})
    assert cfg == TrainConfig(model='pix2pix', epochs=4, seed=9,
                              augment=AugmentConfig.disabled())
    assert sources['seed'] == 'file'
    assert sources['epochs'] == 'flag'
