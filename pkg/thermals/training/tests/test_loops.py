import math
from dataclasses import replace

import pandas as pd
import pytest
import torch

from core.exceptions import TrainingAborted
from networks.checkpoints import load_checkpoint
from training import loops
from training.config import AugmentConfig, TrainConfig
from training.loops import (CHECKPOINT_FILE, GAN_COLUMNS, HISTORY_FILE,
                            LAST_GOOD_FILE, UNET_COLUMNS, learning_rates,
                            train_fold)
from training.steps import ensure_finite


def test_schedule_cosine_then_constant():
    rates = learning_rates(TrainConfig())
    assert len(rates) == 75
    assert rates[0] == pytest.approx(2e-4)
    assert rates[30] == pytest.approx(1e-4, rel=1e-4)
    assert rates[59] == pytest.approx(
        2e-4 * (1 + math.cos(math.pi * 59 / 60)) / 2, rel=1e-4)
    assert rates[59] == pytest.approx(1.37e-7, rel=1e-2)
    assert rates[60:] == [5e-5] * 15


def test_schedule_is_strictly_decreasing_during_the_main_phase():
    rates = learning_rates(TrainConfig(epochs=10, finetune_epochs=2))
    assert all(a > b for a, b in zip(rates[:10], rates[1:10]))


def test_tiny_unet_run_writes_its_artifacts(tmp_path, prepared, tiny_config):
    outcome = train_fold(0, prepared[:8], tiny_config, tmp_path,
                         tiny_config.preprocess)

    assert outcome.checkpoint == tmp_path / CHECKPOINT_FILE
    assert (tmp_path / LAST_GOOD_FILE).exists()
    history = pd.read_csv(tmp_path / HISTORY_FILE)
    assert list(history.columns) == list(UNET_COLUMNS)
    assert list(history['epoch']) == [0, 1, 2]
    assert list(history['lr']) == pytest.approx(
        learning_rates(tiny_config))
    assert history['total_loss'].notna().all()
    assert (history['lpips_term'] == 0).all()

    checkpoint = load_checkpoint(outcome.checkpoint)
    assert checkpoint.extra == {'fold': 0, 'seed': 7}
    assert checkpoint.preprocess == tiny_config.preprocess
    assert checkpoint.standardizer.fitted_on_fold == 0


def test_training_is_deterministic(tmp_path, prepared, tiny_config):
    first = train_fold(0, prepared[:8], tiny_config, tmp_path / 'a',
                       tiny_config.preprocess)
    second = train_fold(0, prepared[:8], tiny_config, tmp_path / 'b',
                        tiny_config.preprocess)
    assert list(second.history['total_loss']) == list(
        first.history['total_loss'])
    assert (tmp_path / 'b' / HISTORY_FILE).read_bytes() == (
        tmp_path / 'a' / HISTORY_FILE).read_bytes()


def test_tiny_gan_run_keeps_the_discriminator(tmp_path, prepared,
                                              tiny_config):
    cfg = replace(tiny_config, model='pix2pix', finetune_epochs=0)
    outcome = train_fold(1, prepared[:8], cfg, tmp_path, cfg.preprocess)

    assert list(outcome.history.columns) == list(GAN_COLUMNS)
    assert len(outcome.history) == 2
    checkpoint = load_checkpoint(outcome.checkpoint)
    assert checkpoint.model_kind == 'pix2pix'
    assert checkpoint.discriminator is not None


def test_unconditioned_ablation(tmp_path, prepared, tiny_config):
    cfg = replace(tiny_config, conditioned=False, finetune_epochs=0,
                  augment=AugmentConfig.disabled())
    outcome = train_fold(0, prepared[:8], cfg, tmp_path, cfg.preprocess)
    assert not load_checkpoint(outcome.checkpoint).model.config.conditioned


def test_non_finite_loss_aborts_with_the_last_good_checkpoint(
        tmp_path, prepared, tiny_config, monkeypatch):
    real_step = loops.unet_step
    calls = []

    def failing_step(*args, **kwargs):
        calls.append(1)
        if len(calls) > 2:
            ensure_finite('training loss', torch.tensor(float('nan')))
        return real_step(*args, **kwargs)

    monkeypatch.setattr(loops, 'unet_step', failing_step)
    with pytest.raises(TrainingAborted, match='epoch 1') as excinfo:
        train_fold(0, prepared[:8], tiny_config, tmp_path,
                   tiny_config.preprocess)

    assert excinfo.value.last_good == tmp_path / LAST_GOOD_FILE
    assert load_checkpoint(excinfo.value.last_good).extra['fold'] == 0
    assert len(pd.read_csv(tmp_path / HISTORY_FILE)) == 1
    assert not (tmp_path / CHECKPOINT_FILE).exists()


@pytest.mark.parametrize('value', [float('nan'), float('inf')])
def test_ensure_finite(value):
    with pytest.raises(TrainingAborted, match='non-finite'):
        ensure_finite('loss', value)
    ensure_finite('loss', 1.0)
