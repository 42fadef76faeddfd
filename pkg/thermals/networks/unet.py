import logging
from dataclasses import asdict, dataclass, fields, replace
from typing import NamedTuple, Optional, Tuple

import torch
import torch.nn as nn
import torch.nn.functional as F

from core.exceptions import PipelineConfigError, ShapeError
from networks.blocks import (
    ConditionEmbedding, ConvBlock, DecoderBlock, FiLM, SelfAttention2d,
)

logger = logging.getLogger(__name__)

DEPTH = 4


@dataclass(frozen=True)
class UNetConfig:
    in_channels: int = 3
    out_channels: int = 1
    encoder_widths: Tuple[int, ...] = (32, 64, 128, 256)
    bottleneck_width: int = 512
    attention_heads: int = 4
    cond_dim: int = 15
    film_hidden: int = 128
    input_size: int = 384
    norm_groups: int = 32
    conditioned: bool = True

    def __post_init__(self):
        widths = tuple(self.encoder_widths)
        object.__setattr__(self, 'encoder_widths', widths)
        if len(widths) != DEPTH:
            raise PipelineConfigError(
                f'encoder_widths must have {DEPTH} entries, got {len(widths)}')
        if any(a >= b for a, b in zip(widths, widths[1:])):
            raise PipelineConfigError(
                f'encoder_widths must be strictly increasing: {widths}')
        if self.bottleneck_width != 2 * widths[-1]:
            raise PipelineConfigError(
                f'bottleneck_width must be {2 * widths[-1]}, '
                f'got {self.bottleneck_width}')
        if self.input_size <= 0 or self.input_size % 2 ** DEPTH:
            raise PipelineConfigError(
                f'input_size must be a positive multiple of {2 ** DEPTH}')

    def reduced(self, size):
        return replace(self, input_size=size)

    def as_dict(self):
        data = asdict(self)
        data['encoder_widths'] = list(self.encoder_widths)
        return data

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in data.items() if k in known})


class LayerShape(NamedTuple):
    layer: str
    input_size: Tuple[int, int]
    in_channels: int
    output_size: Tuple[int, int]
    out_channels: int


def _label(name):
    kind, _, level = name.partition('.')
    labels = {
        'encoders': 'Encoder {}',
        'pools': 'Max Pool {}',
        'upscales': 'Upscale {} (Bilinear)',
        'decoders': 'Decoder {}',
    }
    if kind in ('encoders', 'pools'):
        return labels[kind].format(int(level) + 1)
    if kind in ('upscales', 'decoders'):
        return labels[kind].format(DEPTH - int(level))
    return {
        'bottleneck': 'Bottleneck',
        'attention': 'SelfAttention2d',
        'film': 'FiLM conditioning',
        'final': 'Final Conv',
    }[name]


class Upscale(nn.Module):

    def forward(self, x):
        return F.interpolate(
            x, scale_factor=2, mode='bilinear', align_corners=False)


class ConditionalUNet(nn.Module):
    """Four-level U-Net with an attention bottleneck modulated by FiLM.

    forward(rgb [N,3,H,W] in [-1,1], vector [N,cond_dim]) -> [N,1,H,W] in
    (0,1). H and W must be divisible by 16.
    """

    def __init__(self, config: Optional[UNetConfig] = None):
        super().__init__()
        self.config = config = config or UNetConfig()
        widths = config.encoder_widths
        ins = (config.in_channels,) + widths[:-1]
        self.encoders = nn.ModuleList(
            ConvBlock(i, o) for i, o in zip(ins, widths))
        self.pools = nn.ModuleList(nn.MaxPool2d(2) for _ in widths)
        self.bottleneck = ConvBlock(widths[-1], config.bottleneck_width)
        self.attention = SelfAttention2d(
            config.bottleneck_width, config.attention_heads,
            config.norm_groups)
        if config.conditioned:
            self.embed = ConditionEmbedding(
                config.cond_dim, config.film_hidden, config.bottleneck_width)
            self.film = FiLM()
        ups = (config.bottleneck_width,) + tuple(reversed(widths[1:]))
        self.upscales = nn.ModuleList(Upscale() for _ in widths)
        self.decoders = nn.ModuleList(
            DecoderBlock(u, s, s)
            for u, s in zip(ups, reversed(widths)))
        self.final = nn.Conv2d(widths[0], config.out_channels, 3, padding=1)
        self.reset_parameters()

    def reset_parameters(self):
        for module in self.modules():
            if isinstance(module, nn.Conv2d):
                nn.init.kaiming_uniform_(module.weight, nonlinearity='relu')
                if module.bias is not None:
                    nn.init.zeros_(module.bias)
        if self.config.conditioned:
            self.embed.reset_head()

    def check_input(self, rgb, vector):
        if rgb.dim() != 4:
            raise ShapeError(
                f'Encoder 1: expected a [N,C,H,W] batch, '
                f'got {tuple(rgb.shape)}')
        if rgb.shape[1] != self.config.in_channels:
            raise ShapeError(
                f'Encoder 1: expected {self.config.in_channels} channels, '
                f'got {rgb.shape[1]}')
        height, width = rgb.shape[-2:]
        for level in range(1, DEPTH + 1):
            if height % 2 or width % 2 or not height or not width:
                raise ShapeError(
                    f'Max Pool {level}: cannot halve {height}x{width} exactly')
            height, width = height // 2, width // 2
        if not self.config.conditioned:
            return
        if vector is None:
            raise ShapeError('FiLM conditioning: metadata vector missing')
        if vector.dim() != 2 or vector.shape[0] != rgb.shape[0]:
            raise ShapeError(
                f'FiLM conditioning: expected [{rgb.shape[0]},'
                f'{self.config.cond_dim}] vectors, got {tuple(vector.shape)}')

    def condition(self, vector):
        return self.embed(vector)

    def forward(self, rgb, vector=None):
        self.check_input(rgb, vector)
        skips = []
        x = rgb
        for encoder, pool in zip(self.encoders, self.pools):
            x = encoder(x)
            skips.append(x)
            x = pool(x)
        x = self.attention(self.bottleneck(x))
        if self.config.conditioned:
            x = self.film(x, self.condition(vector))
        for upscale, decoder, skip in zip(
                self.upscales, self.decoders, reversed(skips)):
            x = decoder(upscale(x), skip)
        return torch.sigmoid(self.final(x))

    def staged_modules(self):
        for name, module in self.named_modules():
            if name in ('bottleneck', 'attention', 'film', 'final') or (
                    name.count('.') == 1
                    and name.split('.')[0] in (
                        'encoders', 'pools', 'upscales', 'decoders')):
                yield name, module

    @torch.no_grad()
    def trace_shapes(self, rgb, vector=None):
        rows = []
        handles = []

        def record(name):
            def hook(module, inputs, output):
                x = inputs[0]
                rows.append(LayerShape(
                    _label(name), tuple(x.shape[-2:]), x.shape[1],
                    tuple(output.shape[-2:]), output.shape[1]))
            return hook

        for name, module in self.staged_modules():
            handles.append(module.register_forward_hook(record(name)))
        try:
            self(rgb, vector)
        finally:
            for handle in handles:
                handle.remove()
        return rows
