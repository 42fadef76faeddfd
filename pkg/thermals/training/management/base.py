from core.management.base import ThermalsCommand, parse_pair

from ..config import load_train_config

AUGMENT_OFF = {
    'hflip_p': 0, 'vflip_p': 0, 'rot90_p': 0, 'brightness_p': 0, 'noise_p': 0,
}


def flatten(document, prefix=''):
    flat = {}
    for key, value in document.items():
        if isinstance(value, dict):
            flat.update(flatten(value, f'{prefix}{key}.'))
        else:
            flat[f'{prefix}{key}'] = value
    return flat


class TrainingCommand(ThermalsCommand):
    def add_arguments(self, parser):
        parser.add_argument('--data', required=True,
                            help='dataset directory (raw or preprocessed)')
        parser.add_argument('--config', help='YAML or JSON training config')
        parser.add_argument('--out', help='run directory')
        parser.add_argument('--name', help='run name')
        parser.add_argument('--folds', type=int, help='k of k-fold')
        parser.add_argument('--fold', type=int, action='append',
                            dest='only_folds',
                            help='train only this fold (repeatable)')
        parser.add_argument('--seed', type=int)
        parser.add_argument('--epochs', type=int)
        parser.add_argument('--finetune-epochs', type=int)
        parser.add_argument('--batch-size', type=int)
        parser.add_argument('--lr', type=float)
        parser.add_argument('--finetune-lr', type=float)
        parser.add_argument('--lambda-l1', type=float)
        parser.add_argument('--no-film', action='store_true',
                            help='train without metadata conditioning')
        parser.add_argument('--no-augment', action='store_true')
        parser.add_argument('--size', type=int,
                            help='preprocess target size for raw data')
        parser.add_argument('--saturation', type=float)
        parser.add_argument('--stretch', help='low,high percentiles')
        parser.add_argument('--no-saturation', action='store_true')
        parser.add_argument('--no-stretch', action='store_true')
        parser.add_argument('--sigma', type=float,
                            help='evaluation blur sigma')
        parser.add_argument('--progress', action='store_true')

    def flag_overrides(self, options, model=None):
        stretch = parse_pair(options['stretch']) if options['stretch'] \
            else (None, None)
        return {
            'model': model,
            'folds': options['folds'],
            'seed': options['seed'],
            'epochs': options['epochs'],
            'finetune_epochs': options['finetune_epochs'],
            'batch_size': options['batch_size'],
            'lr': options['lr'],
            'finetune_lr': options['finetune_lr'],
            'lambda_l1': options['lambda_l1'],
            'conditioned': False if options['no_film'] else None,
            'augment': AUGMENT_OFF if options['no_augment'] else None,
            'preprocess': {
                'target_size': options['size'],
                'saturation_factor': options['saturation'],
                'stretch_lo': stretch[0],
                'stretch_hi': stretch[1],
                'saturation_enabled':
                    False if options['no_saturation'] else None,
                'stretch_enabled': False if options['no_stretch'] else None,
            },
            'render': {'blur_sigma': options['sigma']},
        }

    def resolve_config(self, options, model=None):
        cfg, sources = load_train_config(
            options['config'], self.flag_overrides(options, model))
        self.log_options(flatten(cfg.as_dict()), sources)
        return cfg

