import numpy as np
import pytest

from core.exceptions import ShapeError
from training.augment import (AugmentDraw, apply_augmentation,
                              apply_geometry, augment_pair,
                              augmentation_rng, sample_augmentation)
from training.config import AugmentConfig

ALWAYS = AugmentConfig(hflip_p=1, vflip_p=1, rot90_p=1, brightness_p=1,
                       noise_p=1)


def pair(height=6, width=8, seed=0):
    rng = np.random.default_rng(seed)
    rgb = rng.uniform(-1, 1, size=(3, height, width)).astype(np.float32)
    thermal = ((rgb[:1] + 1) / 2).astype(np.float32)
    return rgb, thermal


def test_disabled_config_draws_the_identity():
    draw = sample_augmentation(augmentation_rng(0, 0, 0),
                               AugmentConfig.disabled())
    assert draw.is_identity
    rgb, thermal = pair()
    out_rgb, out_thermal = apply_augmentation(rgb, thermal, draw)
    assert np.array_equal(out_rgb, rgb)
    assert np.array_equal(out_thermal, thermal)


def test_certain_config_draws_everything():
    draw = sample_augmentation(augmentation_rng(0, 0, 0), ALWAYS)
    assert draw.hflip and draw.vflip
    assert draw.quarter_turns in (1, 2, 3)
    assert 0.85 <= draw.brightness <= 1.15
    assert draw.noise_seed is not None


def test_every_call_consumes_the_same_draws():
    first, second = augmentation_rng(3, 1, 2), augmentation_rng(3, 1, 2)
    sample_augmentation(first, ALWAYS)
    sample_augmentation(second, AugmentConfig.disabled())
    assert first.random() == second.random()


def test_draws_are_keyed_by_seed_epoch_and_index():
    cfg = AugmentConfig()
    draws = [sample_augmentation(augmentation_rng(0, epoch, 5), cfg)
             for epoch in range(20)]
    assert draws[0] == sample_augmentation(augmentation_rng(0, 0, 5), cfg)
    assert len({(d.hflip, d.vflip, d.quarter_turns) for d in draws}) > 1


@pytest.mark.parametrize('attribute, probability', [
    ('hflip', 0.5), ('vflip', 0.3), ('quarter_turns', 0.25),
    ('brightness', 0.4), ('noise_seed', 0.15),
])
def test_draw_frequencies(attribute, probability):
    cfg = AugmentConfig()
    hits = 0
    trials = 4000
    for index in range(trials):
        draw = sample_augmentation(augmentation_rng(1, 0, index), cfg)
        value = getattr(draw, attribute)
        hits += bool(value) if attribute != 'brightness' else (
            value is not None)
    assert hits / trials == pytest.approx(probability, abs=0.03)


@pytest.mark.parametrize('draw', [
    AugmentDraw(hflip=True),
    AugmentDraw(vflip=True),
    AugmentDraw(quarter_turns=1),
    AugmentDraw(hflip=True, vflip=True, quarter_turns=3),
])
def test_geometry_moves_rgb_and_thermal_together(draw):
    rgb, thermal = pair()
    out_rgb, out_thermal = apply_augmentation(rgb, thermal, draw)
    assert np.allclose(out_thermal, (out_rgb[:1] + 1) / 2)


def test_quarter_turn_swaps_height_and_width():
    rgb, _ = pair(height=4, width=6)
    turned = apply_geometry(rgb, AugmentDraw(quarter_turns=1))
    assert turned.shape == (3, 6, 4)
    assert np.array_equal(turned, np.rot90(rgb, 1, axes=(1, 2)))


def test_photometric_changes_touch_only_rgb():
    rgb, thermal = pair()
    draw = AugmentDraw(brightness=1.15, noise_seed=7)
    out_rgb, out_thermal = apply_augmentation(rgb, thermal, draw, 0.05)
    assert np.array_equal(out_thermal, thermal)
    assert not np.array_equal(out_rgb, rgb)
    assert out_rgb.min() >= -1 and out_rgb.max() <= 1


def test_brightness_scales_the_unit_range():
    rgb = np.zeros((3, 2, 2), dtype=np.float32)
    out_rgb, _ = apply_augmentation(
        rgb, np.zeros((1, 2, 2), np.float32), AugmentDraw(brightness=0.9))
    assert np.allclose(out_rgb, 0.9 * 0.5 * 2 - 1)


def test_augment_pair_keeps_the_metadata_object(record):
    rgb, thermal = pair()
    _, _, metadata = augment_pair(rgb, thermal, record,
                                  augmentation_rng(0, 0, 0), ALWAYS)
    assert metadata is record
    with pytest.raises(ShapeError):
        augment_pair(rgb, thermal[:, :3], record,
                     augmentation_rng(0, 0, 0), ALWAYS)
