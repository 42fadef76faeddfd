import logging
from pathlib import Path

import numpy as np
import pandas as pd
import torch

from core.exceptions import ShapeError
from core.types import ImageTensor, MetricReport, RangeTag, SampleScore
from core.utils import atomic_write_json, atomic_write_text, get_device
from imaging.postprocess import RenderConfig, gaussian_blur
from networks.checkpoints import load_checkpoint
from scoring.metrics import lpips_metric, psnr, ssim
from weather.features import apply_standardizer

from .data import load_prepared
from .steps import predict_batch

logger = logging.getLogger(__name__)

PREDICTIONS_DIR = 'predictions'


def predict(model, samples, standardizer, device=None, batch_size=4):
    device = device or next(model.parameters()).device
    model.eval()
    predictions = {}
    for start in range(0, len(samples), batch_size):
        chunk = samples[start:start + batch_size]
        rgb = torch.from_numpy(np.stack([s.rgb for s in chunk])).to(device)
        vectors = torch.from_numpy(np.stack([
            apply_standardizer(s.vector, standardizer).values
            for s in chunk
        ]).astype(np.float32)).to(device)
        output = predict_batch(model, rgb, vectors).cpu().numpy()
        for sample, pred in zip(chunk, output):
            predictions[sample.sample_id] = ImageTensor(
                pred, RangeTag.UNIT_0_1)
    return predictions


def score_sample(sample_id, prediction, target, blur_sigma=0.5):
    if prediction.size != target.size:
        raise ShapeError(
            f'{sample_id}: prediction {prediction.size} vs target '
            f'{target.size}')
    blurred = gaussian_blur(prediction, blur_sigma)
    return SampleScore(
        sample_id=sample_id,
        psnr_db=psnr(blurred, target),
        ssim=ssim(blurred, target),
        lpips=lpips_metric(blurred, target),
    )


def score_predictions(predictions, samples, fold_id=0, blur_sigma=0.5):
    scores = []
    for sample in sorted(samples, key=lambda item: item.sample_id):
        target = ImageTensor(sample.thermal, RangeTag.UNIT_0_1)
        scores.append(score_sample(
            sample.sample_id, predictions[sample.sample_id], target,
            blur_sigma))
    report = MetricReport(fold_id=fold_id, per_sample=tuple(scores))
    for problem in report.violations():
        logger.warning('fold %d: %s', fold_id, problem)
    return report


def evaluate(checkpoint, samples, fold_id=0, render=None, device=None):
    render = render or RenderConfig()
    predictions = predict(
        checkpoint.model, samples, checkpoint.standardizer, device)
    report = score_predictions(
        predictions, samples, fold_id, render.blur_sigma)
    return report, predictions


def evaluate_directory(checkpoint_path, data_root, render=None):
    device = get_device()
    checkpoint = load_checkpoint(checkpoint_path, device)
    samples, _ = load_prepared(
        data_root, preprocess=checkpoint.preprocess, strict=True)
    fold_id = int(checkpoint.extra.get('fold', 0))
    report, predictions = evaluate(
        checkpoint, samples, fold_id, render, device)
    return report, predictions, checkpoint


def report_frame(report):
    return pd.DataFrame(
        [[getattr(score, column) for column in MetricReport.COLUMNS]
         for score in report.per_sample],
        columns=list(MetricReport.COLUMNS))


def write_report(report, out_dir, stem='report'):
    out_dir = Path(out_dir)
    frame = report_frame(report)
    csv_path = atomic_write_text(
        out_dir / f'{stem}.csv',
        frame.to_csv(index=False, lineterminator='\n'))
    psnr_mean, ssim_mean, lpips_mean = report.fold_mean
    json_path = atomic_write_json(out_dir / f'{stem}.json', {
        'fold_id': report.fold_id,
        'samples': len(report.per_sample),
        'psnr_db': psnr_mean,
        'ssim': ssim_mean,
        'lpips': lpips_mean,
    })
    return csv_path, json_path


def save_predictions(predictions, out_dir):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for sample_id, prediction in sorted(predictions.items()):
        np.save(out_dir / f'{sample_id}.npy', prediction.data)
    return out_dir
