from pathlib import Path

import numpy as np

from core.datasets import write_png
from core.exceptions import PipelineConfigError
from core.management.base import ThermalsCommand, parse_pair
from core.types import ImageTensor, RangeTag
from imaging.postprocess import (RenderConfig, compose_triptych,
                                 render_prediction)
from training.data import load_prepared


class Command(ThermalsCommand):
    help = (
        'Render saved predictions (.npy from `evaluate --save-predictions`) '
        'with a colormap. With --data, writes triptychs: RGB input | '
        'prediction | ground truth.'
    )

    def add_arguments(self, parser):
        parser.add_argument('--in', dest='source', required=True,
                            help='directory of <sample_id>.npy predictions')
        parser.add_argument('--out', required=True)
        parser.add_argument('--data',
                            help='dataset directory for inputs and targets')
        parser.add_argument('--sigma', type=float, default=0.5)
        parser.add_argument('--norm', default='1,99',
                            help='low,high percentiles')
        parser.add_argument('--cmap', default='inferno')

    def handle(self, *args, **options):
        lo, hi = parse_pair(options['norm'])
        cfg = RenderConfig(blur_sigma=options['sigma'], norm_lo=lo,
                           norm_hi=hi, colormap=options['cmap'])
        paths = sorted(Path(options['source']).glob('*.npy'))
        if not paths:
            raise PipelineConfigError(
                f'no predictions found in {options["source"]}')
        references = {}
        if options['data']:
            samples, _ = load_prepared(options['data'])
            references = {sample.sample_id: sample for sample in samples}

        out = Path(options['out'])
        for path in paths:
            prediction = ImageTensor(np.load(path), RangeTag.UNIT_0_1)
            panel = render_prediction(prediction, cfg)
            reference = references.get(path.stem)
            if reference is not None:
                panel = compose_triptych(
                    ImageTensor((reference.rgb + 1) * 127.5,
                                RangeTag.RAW_0_255),
                    panel,
                    render_prediction(
                        ImageTensor(reference.thermal, RangeTag.UNIT_0_1),
                        cfg, blur=False),
                )
            write_png(out / f'{path.stem}.png', panel)
        self.stdout.write(self.style.SUCCESS(
            f'{len(paths)} renders written to {out}'))
