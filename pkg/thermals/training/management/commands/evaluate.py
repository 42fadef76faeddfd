from pathlib import Path

from core.management.base import ThermalsCommand
from imaging.postprocess import RenderConfig
from training.evaluation import (PREDICTIONS_DIR, evaluate_directory,
                                 save_predictions, write_report)


class Command(ThermalsCommand):
    help = (
        'Score a checkpoint on a dataset directory (PSNR, SSIM, LPIPS after '
        'the output blur). Refuses data preprocessed with a config other '
        'than the checkpoint\'s; raw data is preprocessed with it.'
    )

    def add_arguments(self, parser):
        parser.add_argument('--checkpoint', required=True)
        parser.add_argument('--data', required=True)
        parser.add_argument('--out',
                            help='report directory (default: next to the '
                                 'checkpoint)')
        parser.add_argument('--sigma', type=float, default=0.5,
                            help='output blur before scoring (0 disables)')
        parser.add_argument('--save-predictions', action='store_true',
                            help='write raw predictions as .npy for render')

    def handle(self, *args, **options):
        render = RenderConfig(blur_sigma=options['sigma'])
        report, predictions, _ = evaluate_directory(
            options['checkpoint'], options['data'], render)
        out = Path(options['out'] or Path(options['checkpoint']).parent)
        csv_path, json_path = write_report(report, out, stem='evaluation')
        if options['save_predictions']:
            save_predictions(predictions, out / PREDICTIONS_DIR)
        psnr_db, ssim, lpips = report.fold_mean
        self.stdout.write(
            f'{len(report.per_sample)} samples: PSNR {psnr_db:.4f} dB, '
            f'SSIM {ssim:.4f}, LPIPS {lpips:.4f}')
        self.stdout.write(self.style.SUCCESS(
            f'report written to {csv_path} and {json_path}'))
