from core.management.base import ThermalsCommand
from training.ledger import ledger_ready
from training.models import Run
from training.serializers import MODEL_KINDS


class Command(ThermalsCommand):
    help = 'List recorded training runs with their mean fold metrics.'

    def add_arguments(self, parser):
        parser.add_argument('--model', choices=MODEL_KINDS)
        parser.add_argument('--finished', action='store_true',
                            help='only runs that completed')
        parser.add_argument('--limit', type=int, default=20)

    def handle(self, *args, **options):
        if not ledger_ready():
            self.stdout.write('no run database yet; run `manage.py migrate`')
            return
        runs = Run.objects.with_scores()
        if options['model']:
            runs = runs.for_model(options['model'])
        if options['finished']:
            runs = runs.finished()
        runs = runs[:options['limit']]
        if not runs:
            self.stdout.write('no runs recorded')
            return
        for run in runs:
            scores = 'no folds'
            if run.fold_count:
                scores = (f'PSNR {run.mean_psnr:.4f} SSIM {run.mean_ssim:.4f} '
                          f'LPIPS {run.mean_lpips:.4f}')
            self.stdout.write(
                f'{run.slug:<40} {run.model_kind:<8} {run.status:<9} '
                f'folds {run.fold_count}  {scores}')
