import logging
from dataclasses import replace
from pathlib import Path

from django.conf import settings

from training.crossval import run_cross_validation
from training.data import load_prepared
from training.ledger import RunLedger, run_directory
from training.management.base import TrainingCommand
from training.models import Run
from training.serializers import MODEL_KINDS

logger = logging.getLogger(__name__)


class Command(TrainingCommand):
    help = (
        'Cross-validated training of one model kind: one directory per fold '
        '(model.pt, last_good.pt, history.csv, report.csv/json) plus '
        'aggregate.json and manifest.json in the run directory.'
    )

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--model', choices=MODEL_KINDS)

    def handle(self, *args, **options):
        cfg = self.resolve_config(options, options['model'])
        samples, preprocess = load_prepared(options['data'], cfg.preprocess)
        if preprocess != cfg.preprocess:
            logger.info('using the preprocess config recorded in %s',
                        options['data'])
            cfg = replace(cfg, preprocess=preprocess)
        name = options['name'] or f'train-{cfg.model}'
        out = Path(options['out'] or run_directory(settings.RUNS_DIR, name))
        ledger = RunLedger.start(name, 'train', cfg, preprocess.hash, out)
        try:
            result = run_cross_validation(
                samples, cfg, out, preprocess,
                only_folds=options['only_folds'],
                progress=options['progress'],
                on_fold=ledger.record_fold)
        except BaseException:
            ledger.finish(Run.FAILED)
            raise
        ledger.finish(Run.FINISHED, aggregate=out / 'aggregate.json',
                      data=options['data'])
        for metric, (mean, std) in result.aggregate.items():
            self.stdout.write(f'{metric}: {mean:.4f} ± {std:.4f}')
        self.stdout.write(self.style.SUCCESS(
            f'{len(result.reports)} folds trained in {out}'))
