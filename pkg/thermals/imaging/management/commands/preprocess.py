from pathlib import Path

from core.datasets import read_dataset, write_dataset
from core.exceptions import PipelineConfigError
from core.management.base import ThermalsCommand, parse_pair
from imaging.preprocess import (PreprocessConfig, preprocess_sample,
                                write_manifest)


class Command(ThermalsCommand):
    help = (
        'Letterbox, saturation-boost and contrast-stretch a dataset '
        'directory; writes the processed PNGs plus preprocess.json with '
        'the config and its hash.'
    )

    def add_arguments(self, parser):
        parser.add_argument('--in', dest='source', required=True)
        parser.add_argument('--out', required=True)
        parser.add_argument('--size', type=int, default=384)
        parser.add_argument('--saturation', type=float, default=1.3)
        parser.add_argument('--stretch', default='1,99',
                            help='low,high percentiles')
        parser.add_argument('--no-saturation', action='store_true')
        parser.add_argument('--no-stretch', action='store_true')

    def handle(self, *args, **options):
        lo, hi = parse_pair(options['stretch'])
        cfg = PreprocessConfig(
            target_size=options['size'],
            saturation_factor=options['saturation'],
            stretch_lo=lo,
            stretch_hi=hi,
            saturation_enabled=not options['no_saturation'],
            stretch_enabled=not options['no_stretch'],
        )
        source, out = Path(options['source']), Path(options['out'])
        if source.resolve() == out.resolve():
            raise PipelineConfigError('--out must differ from --in')
        samples = read_dataset(source)
        if not samples:
            raise PipelineConfigError(f'{source} holds no samples')
        write_dataset(
            out, [preprocess_sample(sample, cfg, normalize=False)
                  for sample in samples])
        write_manifest(out, cfg)
        self.stdout.write(self.style.SUCCESS(
            f'{len(samples)} samples preprocessed into {out} '
            f'(config {cfg.hash})'))
