import copy
import logging
from functools import lru_cache

import lpips
import torch
from django.conf import settings

from core.exceptions import BackboneUnavailable, ShapeError

logger = logging.getLogger(__name__)

MIN_SIDE = 32
DOWNLOAD_HINT = (
    'LPIPS needs the pretrained {net} backbone. Download it once with '
    '`python -c "import lpips; lpips.LPIPS(net=\'{net}\')"` on a machine '
    'with network access, or set LPIPS_RANDOM_BACKBONE=True for offline '
    'smoke runs (values are then not comparable to published ones).')


@lru_cache(maxsize=None)
def _base_model(net, random_backbone):
    try:
        with torch.random.fork_rng(devices=[]):
            torch.manual_seed(0)
            model = lpips.LPIPS(
                net=net, pretrained=True, pnet_rand=random_backbone,
                verbose=False)
    except (OSError, RuntimeError) as exc:
        raise BackboneUnavailable(DOWNLOAD_HINT.format(net=net)) from exc
    model.eval()
    for parameter in model.parameters():
        parameter.requires_grad_(False)
    if random_backbone:
        logger.warning('LPIPS uses a randomly initialized %s backbone', net)
    return model


@lru_cache(maxsize=None)
def _placed_model(net, random_backbone, device, dtype):
    return copy.deepcopy(_base_model(net, random_backbone)).to(
        device=device, dtype=dtype)


def get_lpips_model(device='cpu', dtype=torch.float32):
    return _placed_model(
        settings.LPIPS_NET, settings.LPIPS_RANDOM_BACKBONE,
        torch.device(device), dtype)


def lpips_distance(pred, target):
    """Per-image distance for [N,1,H,W] maps in [0,1]."""
    if pred.shape != target.shape:
        raise ShapeError(
            f'shape mismatch {tuple(pred.shape)} vs {tuple(target.shape)}')
    if min(pred.shape[-2:]) < MIN_SIDE:
        raise ShapeError(f'LPIPS needs images of at least {MIN_SIDE} px')
    model = get_lpips_model(pred.device, pred.dtype)
    expand = (-1, 3, -1, -1)
    distance = model(
        pred.expand(*expand), target.expand(*expand), normalize=True)
    return distance.flatten()
