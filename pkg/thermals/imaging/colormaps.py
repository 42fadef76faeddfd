from functools import lru_cache

import matplotlib
import numpy as np

from core.exceptions import PipelineConfigError

TABLE_SIZE = 256


def available_colormaps():
    return sorted(matplotlib.colormaps)


@lru_cache(maxsize=16)
def get_colormap_table(name):
    try:
        colormap = matplotlib.colormaps[name]
    except KeyError:
        raise PipelineConfigError(
            f'unknown colormap {name!r}; available: '
            f'{", ".join(available_colormaps())}') from None
    if colormap.N != TABLE_SIZE:
        colormap = colormap.resampled(TABLE_SIZE)
    table = colormap(np.arange(TABLE_SIZE))[:, :3] * 255.0
    table.setflags(write=False)
    return table


def lookup(values, name):
    table = get_colormap_table(name)
    position = np.clip(np.asarray(values, dtype=np.float64), 0.0, 1.0)
    position = position * (TABLE_SIZE - 1)
    snapped = np.rint(position)
    position = np.where(
        np.abs(position - snapped) < 1e-6, snapped, position)
    lower = np.floor(position).astype(np.int64)
    upper = np.minimum(lower + 1, TABLE_SIZE - 1)
    fraction = (position - lower)[..., None]
    return table[lower] * (1.0 - fraction) + table[upper] * fraction
