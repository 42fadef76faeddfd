import matplotlib
import numpy as np
import pytest

from core.exceptions import PipelineConfigError, ShapeError
from core.types import ImageTensor, RangeTag
from imaging.colormaps import get_colormap_table, lookup
from imaging.postprocess import (RenderConfig, compose_triptych,
                                 gaussian_blur, gaussian_kernel,
                                 percentile_normalize, render_colormap,
                                 render_prediction)


def unit(data):
    return ImageTensor(np.asarray(data, dtype=np.float32)[None],
                       RangeTag.UNIT_0_1)


def impulse(size=21):
    data = np.zeros((size, size))
    data[size // 2, size // 2] = 1.0
    return unit(data)


def test_kernel_radius_and_normalization():
    kernel = gaussian_kernel(0.5)
    assert kernel.size == 5
    assert kernel.sum() == pytest.approx(1.0)
    assert kernel[2] == kernel.max()


def test_blur_of_an_impulse_is_the_kernel_outer_product():
    kernel = gaussian_kernel(1.0)
    blurred = gaussian_blur(impulse(), 1.0).data[0]
    radius = kernel.size // 2
    window = blurred[10 - radius:10 + radius + 1, 10 - radius:10 + radius + 1]
    assert np.allclose(window, np.outer(kernel, kernel), atol=1e-6)
    assert blurred.sum() == pytest.approx(1.0, abs=1e-5)


def test_zero_sigma_is_identity():
    image = impulse()
    assert gaussian_blur(image, 0.0) is image


def test_blur_keeps_range_and_mean():
    data = np.random.default_rng(3).uniform(0.2, 0.9, size=(64, 64))
    blurred = gaussian_blur(unit(data), 0.5).data
    assert blurred.min() >= np.float32(data.min())
    assert blurred.max() <= np.float32(data.max())
    assert blurred.mean() == pytest.approx(data.mean(), abs=2e-3)


def test_blur_keeps_constant_maps():
    flat = unit(np.full((16, 16), 0.4))
    assert np.allclose(gaussian_blur(flat, 0.5).data, 0.4, atol=1e-6)


def test_blur_rejects_negative_sigma():
    with pytest.raises(PipelineConfigError):
        gaussian_blur(impulse(), -0.1)


def test_blur_needs_one_channel():
    color = ImageTensor(np.zeros((3, 4, 4)), RangeTag.UNIT_0_1)
    with pytest.raises(ShapeError):
        gaussian_blur(color, 1.0)


def test_percentile_normalize_spans_unit_range():
    ramp = np.tile(np.linspace(0.2, 0.6, 101), (3, 1))
    normalized = percentile_normalize(unit(ramp), 1.0, 99.0).data
    assert normalized.min() == 0.0
    assert normalized.max() == 1.0


def test_constant_map_normalizes_to_half():
    normalized = percentile_normalize(unit(np.full((4, 4), 0.3)))
    assert np.all(normalized.data == 0.5)


def test_lookup_hits_table_ends_and_interpolates():
    table = get_colormap_table('inferno')
    reference = matplotlib.colormaps['inferno'](np.arange(256))[:, :3] * 255
    assert np.allclose(table, reference)
    assert np.allclose(lookup(0.0, 'inferno'), table[0])
    assert np.allclose(lookup(1.0, 'inferno'), table[255])
    halfway = lookup(0.5 / 255, 'inferno')
    assert np.allclose(halfway, (table[0] + table[1]) / 2)


def test_unknown_colormap_lists_the_choices():
    with pytest.raises(PipelineConfigError, match='viridis'):
        get_colormap_table('no-such-map')


def test_render_colormap_returns_raw_rgb():
    rendered = render_colormap(unit(np.linspace(0, 1, 12).reshape(3, 4)))
    assert rendered.range_tag is RangeTag.RAW_0_255
    assert rendered.data.shape == (3, 3, 4)


def test_render_prediction_is_deterministic():
    rng = np.random.default_rng(3)
    pred = unit(rng.uniform(0, 1, size=(16, 16)))
    cfg = RenderConfig(blur_sigma=0.5, colormap='magma')
    assert render_prediction(pred, cfg) == render_prediction(pred, cfg)


def test_render_config_validation():
    with pytest.raises(PipelineConfigError):
        RenderConfig(blur_sigma=-1.0)
    with pytest.raises(PipelineConfigError):
        RenderConfig(norm_lo=99.0, norm_hi=1.0)


def test_triptych_concatenates_widths():
    panel = ImageTensor(np.zeros((3, 8, 5)), RangeTag.RAW_0_255)
    assert compose_triptych(panel, panel, panel).size == (8, 15)
    tall = ImageTensor(np.zeros((3, 9, 5)), RangeTag.RAW_0_255)
    with pytest.raises(ShapeError):
        compose_triptych(panel, tall)
