import hashlib
import json
import os
import random
import tempfile
from pathlib import Path

import numpy as np
import torch
from django.conf import settings


def get_code_version():
    return settings.THERMALS_VERSION


def config_hash(document: dict) -> str:
    payload = json.dumps(document, sort_keys=True, separators=(',', ':'))
    return hashlib.sha256(payload.encode('utf-8')).hexdigest()[:16]


def atomic_write_text(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    handle, tmp_name = tempfile.mkstemp(
        dir=path.parent, prefix=f'.{path.name}.', suffix='.tmp')
    try:
        with os.fdopen(handle, 'w', encoding='utf-8', newline='') as tmp:
            tmp.write(text)
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise
    return path


def atomic_write_json(path, document: dict) -> Path:
    text = json.dumps(document, indent=2, sort_keys=True, default=str)
    return atomic_write_text(path, text + '\n')


def seed_everything(seed: int) -> None:
    random.seed(seed)
    np.random.seed(seed % 2**32)
    torch.manual_seed(seed)
    torch.use_deterministic_algorithms(True, warn_only=True)


def get_device():
    return torch.device(settings.TORCH_DEVICE)
