import math
from typing import NamedTuple

import torch
import torch.nn as nn

from core.exceptions import ShapeError


class ConvBlock(nn.Module):
    def __init__(self, in_channels, out_channels):
        super().__init__()
        self.in_channels = in_channels
        self.out_channels = out_channels
        self.block = nn.Sequential(
            nn.Conv2d(in_channels, out_channels, 3, padding=1, bias=False),
            nn.BatchNorm2d(out_channels),
            nn.SiLU(),
            nn.Conv2d(out_channels, out_channels, 3, padding=1, bias=False),
            nn.BatchNorm2d(out_channels),
            nn.SiLU(),
        )

    def forward(self, x):
        if x.shape[1] != self.in_channels:
            raise ShapeError(
                f'conv block expects {self.in_channels} channels, '
                f'got {x.shape[1]}')
        return self.block(x)


class DecoderBlock(nn.Module):
    def __init__(self, in_channels, skip_channels, out_channels):
        super().__init__()
        self.in_channels = in_channels
        self.reduce = nn.Conv2d(in_channels, in_channels // 2, 1)
        self.block = ConvBlock(in_channels // 2 + skip_channels, out_channels)

    def forward(self, x, skip):
        if x.shape[1] != self.in_channels:
            raise ShapeError(
                f'decoder expects {self.in_channels} channels, '
                f'got {x.shape[1]}')
        return self.block(torch.cat([self.reduce(x), skip], dim=1))


class SelfAttention2d(nn.Module):
    def __init__(self, channels, heads=4, groups=32, zero_init=False):
        super().__init__()
        if channels % heads:
            raise ShapeError(
                f'{channels} channels cannot be split over {heads} heads')
        self.norm = nn.GroupNorm(math.gcd(groups, channels), channels)
        self.attention = nn.MultiheadAttention(
            channels, heads, batch_first=True)
        if zero_init:
            nn.init.zeros_(self.attention.out_proj.weight)
            nn.init.zeros_(self.attention.out_proj.bias)

    def forward(self, x):
        batch, channels, height, width = x.shape
        tokens = self.norm(x).flatten(2).transpose(1, 2)
        attended, _ = self.attention(
            tokens, tokens, tokens, need_weights=False)
        return x + attended.transpose(1, 2).reshape(
            batch, channels, height, width)


class FilmParams(NamedTuple):
    gamma: torch.Tensor
    beta: torch.Tensor


class ConditionEmbedding(nn.Module):
    """MLP from the metadata vector to per-channel FiLM scale and shift.

    The output layer starts at zero weight with bias (1, 0), so gamma = 1
    and beta = 0 for every input until training moves it.
    """

    def __init__(self, cond_dim=15, hidden=128, channels=512):
        super().__init__()
        self.cond_dim = cond_dim
        self.channels = channels
        self.hidden = nn.Sequential(nn.Linear(cond_dim, hidden), nn.SiLU())
        self.head = nn.Linear(hidden, 2 * channels)
        self.reset_head()

    def reset_head(self):
        nn.init.zeros_(self.head.weight)
        with torch.no_grad():
            self.head.bias[:self.channels].fill_(1.0)
            self.head.bias[self.channels:].zero_()

    def forward(self, vector):
        if vector.shape[-1] != self.cond_dim:
            raise ShapeError(
                f'metadata vector must have {self.cond_dim} slots, '
                f'got {vector.shape[-1]}')
        gamma, beta = self.head(self.hidden(vector)).chunk(2, dim=-1)
        return FilmParams(gamma, beta)


def film_modulate(h, params):
    gamma, beta = params
    if gamma.dim() == 1:
        gamma, beta = gamma[None], beta[None]
    if gamma.shape[-1] != h.shape[1] or beta.shape[-1] != h.shape[1]:
        raise ShapeError(
            f'FiLM params of length {gamma.shape[-1]} do not match '
            f'{h.shape[1]} channels')
    return gamma[:, :, None, None] * h + beta[:, :, None, None]


class FiLM(nn.Module):

    def forward(self, h, params):
        return film_modulate(h, params)
