import logging
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import torch

from core.exceptions import CheckpointError
from core.utils import get_code_version
from imaging.preprocess import PreprocessConfig
from weather.features import LAYOUT_VERSION, Standardizer

from .patchgan import PatchGANConfig, PatchGANDiscriminator
from .unet import ConditionalUNet, UNetConfig

logger = logging.getLogger(__name__)

FORMAT_VERSION = 'thermals-checkpoint-1'
MODEL_KINDS = ('unet', 'pix2pix')


@dataclass
class Checkpoint:
    model: ConditionalUNet
    model_kind: str
    standardizer: Standardizer
    preprocess: PreprocessConfig
    preprocess_hash: str
    discriminator: Optional[PatchGANDiscriminator] = None
    extra: Optional[dict] = None


def save_checkpoint(path, model, model_kind, standardizer, preprocess,
                    discriminator=None, extra=None):
    if model_kind not in MODEL_KINDS:
        raise CheckpointError(f'unknown model kind {model_kind}')
    document = {
        'format_version': FORMAT_VERSION,
        'code_version': get_code_version(),
        'layout_version': LAYOUT_VERSION,
        'model_kind': model_kind,
        'unet_config': model.config.as_dict(),
        'state_dict': model.state_dict(),
        'standardizer': standardizer.as_dict(),
        'preprocess': preprocess.as_dict(),
        'preprocess_hash': preprocess.hash,
        'extra': extra or {},
    }
    if discriminator is not None:
        document['patchgan_config'] = discriminator.config.as_dict()
        document['discriminator_state'] = discriminator.state_dict()
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    handle, tmp_name = tempfile.mkstemp(
        dir=path.parent, prefix=f'.{path.name}.', suffix='.tmp')
    os.close(handle)
    try:
        torch.save(document, tmp_name)
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise
    logger.debug('checkpoint written to %s', path)
    return path


def load_checkpoint(path, device='cpu'):
    path = Path(path)
    if not path.is_file():
        raise CheckpointError(f'checkpoint {path} does not exist')
    try:
        document = torch.load(path, map_location=device, weights_only=True)
    except Exception as exc:
        raise CheckpointError(f'cannot read checkpoint {path}: {exc}') from exc
    if document.get('format_version') != FORMAT_VERSION:
        raise CheckpointError(
            f'{path} has format {document.get("format_version")!r}, '
            f'expected {FORMAT_VERSION!r}')
    if document.get('layout_version') != LAYOUT_VERSION:
        raise CheckpointError(
            f'{path} was trained on metadata layout '
            f'{document.get("layout_version")}, expected {LAYOUT_VERSION}')

    model = ConditionalUNet(UNetConfig.from_dict(document['unet_config']))
    model.load_state_dict(document['state_dict'])
    model.to(device).eval()
    discriminator = None
    if 'discriminator_state' in document:
        discriminator = PatchGANDiscriminator(
            PatchGANConfig.from_dict(document['patchgan_config']))
        discriminator.load_state_dict(document['discriminator_state'])
        discriminator.to(device).eval()

    preprocess = PreprocessConfig.from_dict(document['preprocess'])
    if preprocess.hash != document['preprocess_hash']:
        raise CheckpointError(
            f'{path}: stored preprocess hash does not match its config')
    return Checkpoint(
        model=model,
        model_kind=document['model_kind'],
        standardizer=Standardizer.from_dict(document['standardizer']),
        preprocess=preprocess,
        preprocess_hash=document['preprocess_hash'],
        discriminator=discriminator,
        extra=document.get('extra') or {},
    )
