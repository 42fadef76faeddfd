from dataclasses import asdict, dataclass, fields
from typing import Tuple

import torch
import torch.nn as nn

from core.exceptions import ShapeError


@dataclass(frozen=True)
class PatchGANConfig:
    in_channels: int = 4
    widths: Tuple[int, ...] = (64, 128, 256, 512)
    kernel: int = 4
    padding: int = 1
    slope: float = 0.2

    def __post_init__(self):
        object.__setattr__(self, 'widths', tuple(self.widths))

    def as_dict(self):
        data = asdict(self)
        data['widths'] = list(self.widths)
        return data

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in data.items() if k in known})


class PatchGANDiscriminator(nn.Module):
    """Conditional patch discriminator over channel-concatenated RGB+thermal.

    C64(s2)-C128(s2)-C256(s2)-C512(s1)-C1(s1), kernel 4, padding 1. The
    thermal channel arrives in [0,1] and is mapped to [-1,1] here.
    """

    def __init__(self, config=None):
        super().__init__()
        self.config = config = config or PatchGANConfig()
        strides = (2,) * (len(config.widths) - 1) + (1, 1)
        channels = (config.in_channels,) + config.widths + (1,)
        layers = []
        self.convs = []
        for index, stride in enumerate(strides):
            first, last = index == 0, index == len(strides) - 1
            conv = nn.Conv2d(
                channels[index], channels[index + 1], config.kernel,
                stride=stride, padding=config.padding, bias=first or last)
            self.convs.append(conv)
            layers.append(conv)
            if last:
                break
            if not first:
                layers.append(nn.BatchNorm2d(channels[index + 1]))
            layers.append(nn.LeakyReLU(config.slope))
        self.model = nn.Sequential(*layers)
        self.reset_parameters()

    def reset_parameters(self):
        for module in self.modules():
            if isinstance(module, nn.Conv2d):
                nn.init.normal_(module.weight, 0.0, 0.02)
                if module.bias is not None:
                    nn.init.zeros_(module.bias)
            elif isinstance(module, nn.BatchNorm2d):
                nn.init.normal_(module.weight, 1.0, 0.02)
                nn.init.zeros_(module.bias)

    def forward(self, rgb, thermal):
        if rgb.shape[-2:] != thermal.shape[-2:] or (
                rgb.shape[0] != thermal.shape[0]):
            raise ShapeError(
                f'rgb {tuple(rgb.shape)} and thermal {tuple(thermal.shape)} '
                f'do not pair')
        if rgb.shape[1] + thermal.shape[1] != self.config.in_channels:
            raise ShapeError(
                f'discriminator expects {self.config.in_channels} channels, '
                f'got {rgb.shape[1] + thermal.shape[1]}')
        return self.model(torch.cat([rgb, thermal * 2 - 1], dim=1))

    def output_size(self, size):
        for conv in self.convs:
            size = (size + 2 * conv.padding[0] - conv.kernel_size[0]) \
                // conv.stride[0] + 1
        return size

    def _field(self):
        field, jump, start = 1, 1, 0
        for conv in self.convs:
            kernel, stride = conv.kernel_size[0], conv.stride[0]
            start -= conv.padding[0] * jump
            field += (kernel - 1) * jump
            jump *= stride
        return field, jump, start

    def receptive_field(self):
        return self._field()[0]

    def receptive_window(self, i, j):
        """Input rows and columns (half-open, may extend past the border)
        seen by logit (i, j)."""
        field, jump, start = self._field()
        top, left = start + i * jump, start + j * jump
        return (top, top + field), (left, left + field)
