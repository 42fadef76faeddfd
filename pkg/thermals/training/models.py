import secrets

from django.db import models
from slugify import slugify

from . import managers


class Run(models.Model):
    RUNNING = 'running'
    FINISHED = 'finished'
    FAILED = 'failed'
    STATUSES = (
        (RUNNING, 'Running'),
        (FINISHED, 'Finished'),
        (FAILED, 'Failed'),
    )

    name = models.CharField(
        verbose_name='Name',
        max_length=200
    )
    slug = models.SlugField(
        verbose_name='Slug',
        max_length=255,
        unique=True
    )
    command = models.CharField(
        verbose_name='Command',
        max_length=20
    )
    model_kind = models.CharField(
        verbose_name='Model',
        max_length=20
    )
    seed = models.IntegerField(
        verbose_name='Seed'
    )
    config = models.JSONField(
        verbose_name='Config snapshot',
        default=dict
    )
    layout_version = models.CharField(
        verbose_name='Metadata layout',
        max_length=20
    )
    preprocess_hash = models.CharField(
        verbose_name='Preprocess hash',
        max_length=64
    )
    code_version = models.CharField(
        verbose_name='Code version',
        max_length=20
    )
    run_dir = models.CharField(
        verbose_name='Run directory',
        max_length=500
    )
    status = models.CharField(
        verbose_name='Status',
        max_length=10,
        choices=STATUSES,
        default=RUNNING
    )
    started = models.DateTimeField(
        verbose_name='Started',
        auto_now_add=True
    )
    finished = models.DateTimeField(
        verbose_name='Finished',
        null=True,
        blank=True
    )

    objects = managers.RunManager()

    class Meta:
        verbose_name = 'Run'
        verbose_name_plural = 'Runs'
        ordering = ['-started']

    def __str__(self):
        return f'{self.slug} ({self.model_kind}, {self.status})'

    def save(self, *args, **kwargs):
        if self._state.adding and not self.slug:
            code = 10000 + secrets.randbelow(90000)
            self.slug = slugify(self.name) + '-' + str(code)
        super().save(*args, **kwargs)


class FoldResult(models.Model):
    run = models.ForeignKey(
        Run,
        verbose_name='Run',
        related_name='folds',
        on_delete=models.CASCADE
    )
    fold = models.PositiveIntegerField(
        verbose_name='Fold'
    )
    checkpoint = models.CharField(
        verbose_name='Checkpoint',
        max_length=500,
        blank=True
    )
    psnr_db = models.FloatField(
        verbose_name='PSNR mean (dB)'
    )
    ssim = models.FloatField(
        verbose_name='SSIM mean'
    )
    lpips = models.FloatField(
        verbose_name='LPIPS mean'
    )

    class Meta:
        verbose_name = 'Fold result'
        verbose_name_plural = 'Fold results'
        ordering = ['fold']
        constraints = [
            models.UniqueConstraint(
                fields=['run', 'fold'], name='unique_run_fold'),
        ]

    def __str__(self):
        return f'{self.run.slug} fold {self.fold}'


class ScoredSample(models.Model):
    fold_result = models.ForeignKey(
        FoldResult,
        verbose_name='Fold result',
        related_name='samples',
        on_delete=models.CASCADE
    )
    sample_id = models.CharField(
        verbose_name='Sample',
        max_length=200
    )
    psnr_db = models.FloatField(
        verbose_name='PSNR (dB)'
    )
    ssim = models.FloatField(
        verbose_name='SSIM'
    )
    lpips = models.FloatField(
        verbose_name='LPIPS'
    )

    class Meta:
        verbose_name = 'Scored sample'
        verbose_name_plural = 'Scored samples'
        ordering = ['sample_id']

    def __str__(self):
        return self.sample_id
