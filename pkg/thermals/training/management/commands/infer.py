import json
from pathlib import Path

from django.core.management.base import CommandError

from core.datasets import read_rgb, write_png
from core.management.base import ThermalsCommand, parse_pair
from core.utils import get_device
from imaging.postprocess import RenderConfig
from networks.checkpoints import load_checkpoint
from training.inference import infer
from weather.serializers import MetadataRecordSerializer


class Command(ThermalsCommand):
    help = (
        'Predict the thermal image of one RGB capture: preprocess, forward '
        'with its metadata record, blur and render. Writes '
        '<stem>_thermal.png and <stem>_render.png.'
    )

    def add_arguments(self, parser):
        parser.add_argument('--checkpoint', required=True)
        parser.add_argument('--rgb', required=True)
        parser.add_argument('--meta', required=True,
                            help='JSON metadata record of the capture')
        parser.add_argument('--out', default='.')
        parser.add_argument('--sigma', type=float, default=0.5)
        parser.add_argument('--norm', default='1,99')
        parser.add_argument('--cmap', default='inferno')
        parser.add_argument('--trace', action='store_true',
                            help='print the shape of every network stage')

    def handle(self, *args, **options):
        lo, hi = parse_pair(options['norm'])
        render = RenderConfig(blur_sigma=options['sigma'], norm_lo=lo,
                              norm_hi=hi, colormap=options['cmap'])
        record = self.read_record(Path(options['meta']))
        checkpoint = load_checkpoint(options['checkpoint'], get_device())
        result = infer(checkpoint, read_rgb(options['rgb']), record, render,
                       trace=options['trace'])
        for row in result.shapes:
            self.stdout.write(
                f'{row.layer:<24} {row.input_size} {row.in_channels:>4} -> '
                f'{row.output_size} {row.out_channels:>4}')
        out, stem = Path(options['out']), Path(options['rgb']).stem
        thermal = write_png(out / f'{stem}_thermal.png', result.thermal)
        rendered = write_png(out / f'{stem}_render.png', result.rendered)
        self.stdout.write(self.style.SUCCESS(
            f'wrote {thermal} and {rendered}'))

    @staticmethod
    def read_record(path):
        if not path.exists():
            raise CommandError(f'metadata file {path} not found')
        try:
            document = json.loads(path.read_text(encoding='utf-8'))
        except ValueError as exc:
            raise CommandError(f'{path} is not JSON: {exc}') from exc
        serializer = MetadataRecordSerializer(data=document)
        if not serializer.is_valid():
            raise CommandError(
                f'invalid metadata record: {dict(serializer.errors)}')
        return serializer.to_record()
