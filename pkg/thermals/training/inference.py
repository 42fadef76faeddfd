import logging
from dataclasses import dataclass

import torch
from django.conf import settings

from core.types import ImageTensor, RangeTag
from imaging.postprocess import RenderConfig, gaussian_blur, render_prediction
from imaging.preprocess import preprocess_pipeline
from weather.features import apply_standardizer, build_feature_vector

from .steps import predict_batch

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class InferenceResult:
    thermal: ImageTensor
    rendered: ImageTensor
    shapes: tuple = ()


@torch.no_grad()
def infer(checkpoint, rgb, record, render=None, utc_offset_hours=None,
          trace=False):
    render = render or RenderConfig()
    if utc_offset_hours is None:
        utc_offset_hours = settings.WEATHER_UTC_OFFSET_HOURS
    model = checkpoint.model
    device = next(model.parameters()).device
    prepared = preprocess_pipeline(rgb, checkpoint.preprocess)
    vector = apply_standardizer(
        build_feature_vector(record, utc_offset_hours),
        checkpoint.standardizer)
    batch = torch.from_numpy(prepared.data[None].copy()).to(device)
    values = torch.from_numpy(
        vector.values[None].astype('float32')).to(device)
    model.eval()
    output = predict_batch(model, batch, values)[0].cpu().numpy()
    shapes = tuple(model.trace_shapes(batch, values)) if trace else ()
    thermal = gaussian_blur(
        ImageTensor(output, RangeTag.UNIT_0_1), render.blur_sigma)
    return InferenceResult(
        thermal=thermal,
        rendered=render_prediction(thermal, render, blur=False),
        shapes=shapes,
    )
