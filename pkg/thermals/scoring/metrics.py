import math

import numpy as np
import torch
from skimage.metrics import peak_signal_noise_ratio, structural_similarity

from core.exceptions import ShapeError
from core.types import ImageTensor

from .perceptual import lpips_distance

SSIM_MIN_SIDE = 11


def _plane(image):
    if isinstance(image, ImageTensor):
        image = image.data
    if isinstance(image, torch.Tensor):
        image = image.detach().cpu().numpy()
    array = np.asarray(image, dtype=np.float64)
    while array.ndim > 2 and array.shape[0] == 1:
        array = array[0]
    if array.ndim != 2:
        raise ShapeError(f'expected a single-channel map, got {array.shape}')
    return array


def _pair(pred, target):
    pred, target = _plane(pred), _plane(target)
    if pred.shape != target.shape:
        raise ShapeError(f'shape mismatch {pred.shape} vs {target.shape}')
    return pred, target


def psnr(pred, target, data_range=1.0):
    pred, target = _pair(pred, target)
    if np.mean((pred - target) ** 2) == 0:
        return math.inf
    return float(peak_signal_noise_ratio(target, pred, data_range=data_range))


def ssim(pred, target, data_range=1.0):
    pred, target = _pair(pred, target)
    if min(pred.shape) < SSIM_MIN_SIDE:
        raise ShapeError(f'SSIM needs images of at least {SSIM_MIN_SIDE} px')
    return float(structural_similarity(
        target, pred, data_range=data_range, gaussian_weights=True,
        sigma=1.5, use_sample_covariance=False, K1=0.01, K2=0.03))


@torch.no_grad()
def lpips_metric(pred, target):
    pred, target = _pair(pred, target)
    distance = lpips_distance(
        torch.from_numpy(pred).float()[None, None],
        torch.from_numpy(target).float()[None, None])
    return float(distance[0])
