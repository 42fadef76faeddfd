import math
from typing import NamedTuple

import torch

from core.exceptions import TrainingAborted
from scoring.adversarial import discriminator_loss, generator_loss
from scoring.losses import combined_loss


class GanStep(NamedTuple):
    discriminator_loss: float
    adversarial_term: float
    l1_term: float
    total_loss: float


def ensure_finite(name, value):
    if not math.isfinite(float(value)):
        raise TrainingAborted(f'{name} became non-finite ({float(value)})')


def to_device(batch, device):
    rgb, thermal, vector = batch[:3]
    return rgb.to(device), thermal.to(device), vector.to(device)


def unet_step(model, optimizer, batch, weights, eps=1e-3):
    rgb, thermal, vector = batch
    optimizer.zero_grad(set_to_none=True)
    breakdown = combined_loss(model(rgb, vector), thermal, weights, eps)
    ensure_finite('training loss', breakdown.total)
    breakdown.total.backward()
    optimizer.step()
    return breakdown


def gan_train_step(batch, generator, discriminator, optimizers,
                   lambda_l1=100.0):
    """One discriminator update on (real, detached fake), then one generator
    update through the refreshed discriminator."""
    rgb, thermal, vector = batch
    g_optimizer, d_optimizer = optimizers
    fake = generator(rgb, vector)

    d_optimizer.zero_grad(set_to_none=True)
    d_loss = discriminator_loss(
        discriminator(rgb, thermal), discriminator(rgb, fake.detach()))
    ensure_finite('discriminator loss', d_loss)
    d_loss.backward()
    d_optimizer.step()

    g_optimizer.zero_grad(set_to_none=True)
    g_loss = generator_loss(
        discriminator(rgb, fake), fake, thermal, lambda_l1)
    ensure_finite('generator loss', g_loss.total)
    g_loss.total.backward()
    g_optimizer.step()
    d_optimizer.zero_grad(set_to_none=True)

    return GanStep(
        discriminator_loss=float(d_loss),
        adversarial_term=float(g_loss.adversarial),
        l1_term=float(g_loss.l1),
        total_loss=float(g_loss.total),
    )


@torch.no_grad()
def predict_batch(model, rgb, vector):
    return model(rgb, vector)
