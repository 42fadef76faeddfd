"""Composite training loss for predicted thermal maps.

total = w1 * charbonnier + w2 * (1 - MS-SSIM) + w3 * LPIPS
        + w4 * sobel gradient L1 + w5 * (|d mean| + |d std|)

Every term takes [N,1,H,W] (or [1,H,W]) tensors in [0,1].
"""
import math
from dataclasses import asdict, dataclass, fields

import torch
import torch.nn.functional as F

from core.exceptions import PipelineConfigError, ShapeError

from .perceptual import lpips_distance

MSSSIM_WEIGHTS = (0.0448, 0.2856, 0.3001, 0.2363, 0.1333)
SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
CS_FLOOR = 1e-6
SOBEL_X = ((-1.0, 0.0, 1.0), (-2.0, 0.0, 2.0), (-1.0, 0.0, 1.0))


@dataclass(frozen=True)
class LossWeights:
    charbonnier: float = 1.0
    msssim: float = 0.4
    lpips: float = 0.3
    grad: float = 0.1
    stats: float = 0.05

    def __post_init__(self):
        for item in fields(self):
            value = getattr(self, item.name)
            if not math.isfinite(value) or value < 0:
                raise PipelineConfigError(
                    f'loss weight {item.name} must be >= 0, got {value}')

    def as_dict(self):
        return asdict(self)


@dataclass
class LossBreakdown:
    charbonnier: torch.Tensor
    msssim_term: torch.Tensor
    lpips_term: torch.Tensor
    grad_term: torch.Tensor
    stats_term: torch.Tensor
    total: torch.Tensor

    def as_floats(self):
        return {item.name: float(getattr(self, item.name))
                for item in fields(self)}


def _batched(pred, target):
    if pred.shape != target.shape:
        raise ShapeError(
            f'shape mismatch {tuple(pred.shape)} vs {tuple(target.shape)}')
    if pred.dim() == 3:
        pred, target = pred[None], target[None]
    if pred.dim() != 4:
        raise ShapeError(f'expected [N,C,H,W] maps, got {tuple(pred.shape)}')
    return pred, target


def charbonnier(pred, target, eps=1e-3):
    pred, target = _batched(pred, target)
    return torch.sqrt((pred - target) ** 2 + eps ** 2).mean()


def _gaussian_window(size, sigma, like):
    offsets = torch.arange(size, dtype=like.dtype, device=like.device)
    offsets = offsets - (size - 1) / 2
    g = torch.exp(-offsets ** 2 / (2 * sigma ** 2))
    g = g / g.sum()
    return torch.outer(g, g)[None, None].repeat(like.shape[1], 1, 1, 1)


def _ssim_maps(x, y, size, data_range):
    window = _gaussian_window(size, SSIM_SIGMA, x)
    channels = x.shape[1]

    def smooth(z):
        return F.conv2d(z, window, groups=channels)

    c1 = (0.01 * data_range) ** 2
    c2 = (0.03 * data_range) ** 2
    mu_x, mu_y = smooth(x), smooth(y)
    var_x = smooth(x * x) - mu_x ** 2
    var_y = smooth(y * y) - mu_y ** 2
    cov = smooth(x * y) - mu_x * mu_y
    cs = (2 * cov + c2) / (var_x + var_y + c2)
    luminance = (2 * mu_x * mu_y + c1) / (mu_x ** 2 + mu_y ** 2 + c1)
    return (luminance * cs).mean(dim=(1, 2, 3)), cs.mean(dim=(1, 2, 3))


def msssim_levels(side, window=SSIM_WINDOW):
    if side < 3:
        raise ShapeError(f'image side {side} too small for MS-SSIM')
    levels = 1
    while levels < len(MSSSIM_WEIGHTS) and side > (window - 1) * 2 ** levels:
        levels += 1
    return levels


def msssim(pred, target, data_range=1.0):
    """Multi-scale SSIM per batch, averaged over images.

    Uses as many scales as the image supports (up to five) with the
    standard weights renormalized; the window shrinks to the largest odd
    size that fits a coarse scale.
    """
    pred, target = _batched(pred, target)
    levels = msssim_levels(min(pred.shape[-2:]))
    weights = torch.tensor(
        MSSSIM_WEIGHTS[:levels], dtype=pred.dtype, device=pred.device)
    weights = weights / weights.sum()
    factors = []
    x, y = pred, target
    for level in range(levels):
        side = min(x.shape[-2:])
        size = min(SSIM_WINDOW, side if side % 2 else side - 1)
        ssim_value, cs = _ssim_maps(x, y, size, data_range)
        if level == levels - 1:
            factors.append(ssim_value.clamp(min=CS_FLOOR))
        else:
            factors.append(cs.clamp(min=CS_FLOOR))
            x = F.avg_pool2d(x, 2)
            y = F.avg_pool2d(y, 2)
    stacked = torch.stack(factors, dim=1)
    return torch.prod(stacked ** weights, dim=1).mean()


def msssim_term(pred, target):
    return 1 - msssim(pred, target)


def lpips_term(pred, target):
    pred, target = _batched(pred, target)
    return lpips_distance(pred, target).mean()


def _sobel(x):
    kx = torch.tensor(SOBEL_X, dtype=x.dtype, device=x.device)
    kernels = torch.stack([kx, kx.t()])[:, None]
    padded = F.pad(x, (1, 1, 1, 1), mode='reflect')
    batch, channels = x.shape[:2]
    responses = F.conv2d(
        padded.reshape(batch * channels, 1, *padded.shape[-2:]), kernels)
    return responses[:, 0], responses[:, 1]


def grad_term(pred, target):
    pred, target = _batched(pred, target)
    if min(pred.shape[-2:]) < 3:
        raise ShapeError('Sobel gradients need images of at least 3 px')
    pgx, pgy = _sobel(pred)
    tgx, tgy = _sobel(target)
    return ((pgx - tgx).abs().mean() + (pgy - tgy).abs().mean()) / 2


def _mean_std(x):
    mean = x.mean(dim=(1, 2, 3))
    var = ((x - mean[:, None, None, None]) ** 2).mean(dim=(1, 2, 3))
    return mean, torch.sqrt(var + 1e-12)


def stats_term(pred, target):
    pred, target = _batched(pred, target)
    p_mean, p_std = _mean_std(pred)
    t_mean, t_std = _mean_std(target)
    return ((p_mean - t_mean).abs() + (p_std - t_std).abs()).mean()


TERMS = (
    ('charbonnier', 'charbonnier', None),
    ('msssim', 'msssim_term', msssim_term),
    ('lpips', 'lpips_term', lpips_term),
    ('grad', 'grad_term', grad_term),
    ('stats', 'stats_term', stats_term),
)


def combined_loss(pred, target, weights=None, eps=1e-3):
    weights = weights or LossWeights()
    pred, target = _batched(pred, target)
    zero = pred.new_zeros(())
    values = {}
    total = zero
    for weight_name, term_name, term in TERMS:
        weight = getattr(weights, weight_name)
        if weight == 0:
            values[term_name] = zero
            continue
        if term is None:
            value = charbonnier(pred, target, eps)
        else:
            value = term(pred, target)
        values[term_name] = value
        total = total + weight * value
    return LossBreakdown(total=total, **values)
