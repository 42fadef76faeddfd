import math
from dataclasses import asdict, dataclass

import cv2
import numpy as np

from core.exceptions import PipelineConfigError, ShapeError
from core.types import ImageTensor, RangeTag

from .colormaps import get_colormap_table, lookup


@dataclass(frozen=True)
class RenderConfig:
    blur_sigma: float = 0.5
    norm_lo: float = 1.0
    norm_hi: float = 99.0
    colormap: str = 'inferno'

    def __post_init__(self):
        if self.blur_sigma < 0:
            raise PipelineConfigError('blur_sigma must be >= 0')
        if not self.norm_lo < self.norm_hi:
            raise PipelineConfigError('norm_lo must be below norm_hi')

    def as_dict(self):
        return asdict(self)


def gaussian_kernel(sigma):
    """Normalized 1-D Gaussian with radius ``ceil(4 * sigma)``."""
    if sigma == 0:
        return np.ones(1)
    radius = math.ceil(4 * sigma)
    offsets = np.arange(-radius, radius + 1, dtype=np.float64)
    weights = np.exp(-offsets ** 2 / (2 * sigma ** 2))
    return weights / weights.sum()


def gaussian_blur(pred, sigma):
    if sigma < 0:
        raise PipelineConfigError('blur sigma must be >= 0')
    if pred.channels != 1:
        raise ShapeError('blur expects a single-channel map')
    if sigma == 0:
        return pred
    kernel = gaussian_kernel(sigma)
    blurred = cv2.sepFilter2D(
        np.ascontiguousarray(pred.data[0]), cv2.CV_32F, kernel, kernel,
        borderType=cv2.BORDER_REFLECT_101)
    low, high = float(pred.data.min()), float(pred.data.max())
    return ImageTensor(
        np.clip(blurred, low, high)[None], pred.range_tag)


def percentile_normalize(pred, lo=1.0, hi=99.0):
    if not lo < hi:
        raise PipelineConfigError('normalization requires lo < hi')
    data = pred.data.astype(np.float64)
    p_lo, p_hi = np.percentile(data, [lo, hi])
    if p_hi - p_lo <= 0:
        return ImageTensor(np.full(data.shape, 0.5), RangeTag.UNIT_0_1)
    scaled = np.clip((data - p_lo) / (p_hi - p_lo), 0.0, 1.0)
    return ImageTensor(scaled, RangeTag.UNIT_0_1)


def render_colormap(pred, map_id='inferno'):
    pred.require(RangeTag.UNIT_0_1, channels=1)
    get_colormap_table(map_id)
    colors = lookup(pred.data[0], map_id)
    return ImageTensor(colors.transpose(2, 0, 1), RangeTag.RAW_0_255)


def render_prediction(pred, cfg, blur=True):
    if blur:
        pred = gaussian_blur(pred, cfg.blur_sigma)
    normalized = percentile_normalize(pred, cfg.norm_lo, cfg.norm_hi)
    return render_colormap(normalized, cfg.colormap)


def compose_triptych(*panels):
    heights = {panel.size[0] for panel in panels}
    if len(heights) != 1:
        raise ShapeError('triptych panels must share their height')
    for panel in panels:
        panel.require(RangeTag.RAW_0_255, channels=3)
    return ImageTensor(
        np.concatenate([panel.data for panel in panels], axis=2),
        RangeTag.RAW_0_255)
