from typing import NamedTuple

import torch
import torch.nn.functional as F

from core.exceptions import PipelineConfigError, ShapeError


class GeneratorLoss(NamedTuple):
    adversarial: torch.Tensor
    l1: torch.Tensor
    total: torch.Tensor


def generator_loss(logits_fake, fake, real, lambda_l1=100.0):
    if lambda_l1 < 0:
        raise PipelineConfigError('lambda_l1 must be >= 0')
    if fake.shape != real.shape:
        raise ShapeError(
            f'shape mismatch {tuple(fake.shape)} vs {tuple(real.shape)}')
    adversarial = F.binary_cross_entropy_with_logits(
        logits_fake, torch.ones_like(logits_fake))
    l1 = (fake - real).abs().mean()
    return GeneratorLoss(adversarial, l1, adversarial + lambda_l1 * l1)


def discriminator_loss(logits_real, logits_fake):
    if logits_real.shape != logits_fake.shape:
        raise ShapeError('real and fake logit maps differ in shape')
    real = F.binary_cross_entropy_with_logits(
        logits_real, torch.ones_like(logits_real))
    fake = F.binary_cross_entropy_with_logits(
        logits_fake, torch.zeros_like(logits_fake))
    return (real + fake) / 2


def patch_accuracy(logits_real, logits_fake):
    """Share of patches the discriminator labels correctly."""
    hits = (logits_real > 0).sum() + (logits_fake < 0).sum()
    return float(hits) / (logits_real.numel() + logits_fake.numel())
