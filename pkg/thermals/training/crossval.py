import logging
import math
from dataclasses import dataclass, replace
from functools import partial
from pathlib import Path

import numpy as np
import pandas as pd

from core.utils import atomic_write_json, atomic_write_text
from networks.checkpoints import Checkpoint

from .evaluation import evaluate, write_report
from .folds import assign_folds
from .loops import train_fold

logger = logging.getLogger(__name__)

METRICS = ('psnr_db', 'ssim', 'lpips')
HEADERS = {'psnr_db': 'PSNR', 'ssim': 'SSIM', 'lpips': 'LPIPS'}


@dataclass
class CrossValidationResult:
    model: str
    reports: list
    aggregate: dict
    assignment: object
    checkpoints: list


def aggregate_reports(reports):
    """Mean and population std of the fold means, per metric."""
    means = np.array([report.fold_mean for report in reports], dtype=float)
    aggregate = {}
    for index, name in enumerate(METRICS):
        column = means[:, index]
        if np.isinf(column).any():
            aggregate[name] = (float(column.mean()), math.nan)
        else:
            aggregate[name] = (float(column.mean()), float(column.std()))
    return aggregate


def fold_dir(out_dir, fold):
    return Path(out_dir) / f'fold{fold}'


def run_cross_validation(samples, cfg, out_dir, preprocess, k=None,
                         only_folds=None, assignment=None, progress=False,
                         on_fold=None):
    """Train and score one model per fold; every sample validates once.

    ``on_fold(fold, report, checkpoint)`` is called after each fold.
    """
    k = k or cfg.folds
    assignment = assignment or assign_folds(samples, k, cfg.seed)
    reports, checkpoints = [], []
    for fold, train_idx, val_idx in assignment.splits(samples):
        if only_folds is not None and fold not in only_folds:
            continue
        train = [samples[index] for index in train_idx]
        val = [samples[index] for index in val_idx]
        logger.info('fold %d: %d train / %d validation samples',
                    fold, len(train), len(val))
        outcome = train_fold(
            fold, train, cfg, fold_dir(out_dir, fold), preprocess,
            progress=progress)
        checkpoint = Checkpoint(
            model=outcome.model, model_kind=cfg.model,
            standardizer=outcome.standardizer, preprocess=preprocess,
            preprocess_hash=preprocess.hash)
        report, _ = evaluate(checkpoint, val, fold, cfg.render)
        write_report(report, fold_dir(out_dir, fold))
        reports.append(report)
        checkpoints.append(outcome.checkpoint)
        if on_fold is not None:
            on_fold(fold, report, outcome.checkpoint)
    aggregate = aggregate_reports(reports)
    atomic_write_json(Path(out_dir) / 'aggregate.json', {
        'model': cfg.model,
        'folds': [report.fold_id for report in reports],
        **{name: {'mean': mean, 'std': std}
           for name, (mean, std) in aggregate.items()},
    })
    return CrossValidationResult(
        model=cfg.model, reports=reports, aggregate=aggregate,
        assignment=assignment, checkpoints=checkpoints)


def compare_models(samples, cfg, out_dir, preprocess, models, on_fold=None,
                   **kwargs):
    assignment = assign_folds(samples, cfg.folds, cfg.seed)
    results = {}
    for model in models:
        callback = None
        if on_fold is not None:
            callback = partial(on_fold, model)
        results[model] = run_cross_validation(
            samples, replace(cfg, model=model), Path(out_dir) / model,
            preprocess, assignment=assignment, on_fold=callback, **kwargs)
    table = comparison_table(results)
    atomic_write_text(
        Path(out_dir) / 'comparison.csv',
        table.to_csv(lineterminator='\n'))
    return results, table


def format_cell(mean, std):
    if math.isnan(std):
        return f'{mean:.4f}'
    return f'{mean:.4f} ± {std:.4f}'


def comparison_table(results):
    rows = {
        model: {HEADERS[name]: format_cell(*result.aggregate[name])
                for name in METRICS}
        for model, result in results.items()
    }
    frame = pd.DataFrame.from_dict(rows, orient='index')
    frame.index.name = 'model'
    return frame
