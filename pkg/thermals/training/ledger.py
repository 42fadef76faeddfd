import logging
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

from django.db import connection
from slugify import slugify

from core.utils import atomic_write_json, get_code_version
from weather.features import LAYOUT_VERSION

from .models import FoldResult, Run, ScoredSample

logger = logging.getLogger(__name__)

MANIFEST_FILE = 'manifest.json'


def _now():
    return datetime.now(timezone.utc)


@dataclass
class RunManifest:
    name: str
    command: str
    config: dict
    seed: int
    preprocess_hash: str
    run_dir: str
    layout_version: str = LAYOUT_VERSION
    code_version: str = field(default_factory=get_code_version)
    started: str = field(default_factory=lambda: _now().isoformat())
    finished: Optional[str] = None
    status: str = Run.RUNNING
    outputs: dict = field(default_factory=dict)

    @property
    def path(self):
        return Path(self.run_dir) / MANIFEST_FILE

    def write(self):
        return atomic_write_json(self.path, asdict(self))


def ledger_ready():
    return Run._meta.db_table in connection.introspection.table_names()


class RunLedger:
    """Tracks one run: manifest file plus optional database rows."""

    def __init__(self, manifest, model_kind):
        self.manifest = manifest
        self.run = None
        if ledger_ready():
            self.run = Run.objects.create(
                name=manifest.name,
                command=manifest.command,
                model_kind=model_kind,
                seed=manifest.seed,
                config=manifest.config,
                layout_version=manifest.layout_version,
                preprocess_hash=manifest.preprocess_hash,
                code_version=manifest.code_version,
                run_dir=manifest.run_dir,
            )
        else:
            logger.warning(
                'run tables missing, run %s is not recorded in the database '
                '(run `manage.py migrate`)', manifest.name)
        manifest.write()

    @classmethod
    def start(cls, name, command, cfg, preprocess_hash, run_dir):
        manifest = RunManifest(
            name=name,
            command=command,
            config=cfg.as_dict(),
            seed=cfg.seed,
            preprocess_hash=preprocess_hash,
            run_dir=str(run_dir),
        )
        return cls(manifest, cfg.model)

    def record_fold(self, fold, report, checkpoint):
        self.manifest.outputs[f'fold{fold}'] = str(checkpoint)
        self.manifest.write()
        if self.run is None:
            return
        psnr_db, ssim, lpips = report.fold_mean
        result = FoldResult.objects.create(
            run=self.run, fold=fold, checkpoint=str(checkpoint),
            psnr_db=psnr_db, ssim=ssim, lpips=lpips)
        ScoredSample.objects.bulk_create([
            ScoredSample(
                fold_result=result, sample_id=score.sample_id,
                psnr_db=score.psnr_db, ssim=score.ssim, lpips=score.lpips)
            for score in report.per_sample
        ])

    def finish(self, status=Run.FINISHED, **outputs):
        self.manifest.status = status
        self.manifest.finished = _now().isoformat()
        self.manifest.outputs.update(
            {key: str(value) for key, value in outputs.items()})
        self.manifest.write()
        if self.run is not None:
            self.run.status = status
            self.run.finished = _now()
            self.run.save(update_fields=['status', 'finished'])


def run_directory(root, name):
    stamp = _now().strftime('%Y%m%d-%H%M%S')
    return Path(root) / f'{slugify(name)}-{stamp}'
