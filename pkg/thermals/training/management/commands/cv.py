from dataclasses import replace
from pathlib import Path

from django.conf import settings

from training.crossval import compare_models
from training.data import load_prepared
from training.ledger import RunLedger, run_directory
from training.management.base import TrainingCommand
from training.models import Run
from training.serializers import MODEL_KINDS


class Command(TrainingCommand):
    help = (
        'Cross-validate several model kinds on one shared fold assignment '
        'and print the PSNR / SSIM / LPIPS comparison (mean ± std); the '
        'table is also written to comparison.csv.'
    )

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--models', nargs='+', choices=MODEL_KINDS,
                            default=list(MODEL_KINDS))

    def handle(self, *args, **options):
        cfg = self.resolve_config(options)
        samples, preprocess = load_prepared(options['data'], cfg.preprocess)
        cfg = replace(cfg, preprocess=preprocess)
        models = options['models']
        name = options['name'] or 'cv-' + '-'.join(models)
        out = Path(options['out'] or run_directory(settings.RUNS_DIR, name))
        ledgers = {
            model: RunLedger.start(
                f'{name}-{model}', 'cv', replace(cfg, model=model),
                preprocess.hash, out / model)
            for model in models
        }

        def record(model, fold, report, checkpoint):
            ledgers[model].record_fold(fold, report, checkpoint)

        try:
            _, table = compare_models(
                samples, cfg, out, preprocess, models, on_fold=record,
                only_folds=options['only_folds'],
                progress=options['progress'])
        except BaseException:
            for ledger in ledgers.values():
                ledger.finish(Run.FAILED)
            raise
        for model, ledger in ledgers.items():
            ledger.finish(Run.FINISHED,
                          aggregate=out / model / 'aggregate.json',
                          data=options['data'])
        self.stdout.write(table.to_string())
        self.stdout.write(self.style.SUCCESS(
            f'comparison written to {out / "comparison.csv"}'))
