# Generated by Django 4.2.16 on 2026-09-02 10:41

from django.db import migrations, models
import django.db.models.deletion


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='Run',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('name', models.CharField(max_length=200, verbose_name='Name')),
                ('slug', models.SlugField(max_length=255, unique=True, verbose_name='Slug')),
                ('command', models.CharField(max_length=20, verbose_name='Command')),
                ('model_kind', models.CharField(max_length=20, verbose_name='Model')),
                ('seed', models.IntegerField(verbose_name='Seed')),
                ('config', models.JSONField(default=dict, verbose_name='Config snapshot')),
                ('layout_version', models.CharField(max_length=20, verbose_name='Metadata layout')),
                ('preprocess_hash', models.CharField(max_length=64, verbose_name='Preprocess hash')),
                ('code_version', models.CharField(max_length=20, verbose_name='Code version')),
                ('run_dir', models.CharField(max_length=500, verbose_name='Run directory')),
                ('status', models.CharField(choices=[('running', 'Running'), ('finished', 'Finished'), ('failed', 'Failed')], default='running', max_length=10, verbose_name='Status')),
                ('started', models.DateTimeField(auto_now_add=True, verbose_name='Started')),
                ('finished', models.DateTimeField(blank=True, null=True, verbose_name='Finished')),
            ],
            options={
                'verbose_name': 'Run',
                'verbose_name_plural': 'Runs',
                'ordering': ['-started'],
            },
        ),
        migrations.CreateModel(
            name='FoldResult',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('fold', models.PositiveIntegerField(verbose_name='Fold')),
                ('checkpoint', models.CharField(blank=True, max_length=500, verbose_name='Checkpoint')),
                ('psnr_db', models.FloatField(verbose_name='PSNR mean (dB)')),
                ('ssim', models.FloatField(verbose_name='SSIM mean')),
                ('lpips', models.FloatField(verbose_name='LPIPS mean')),
                ('run', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='folds', to='training.run', verbose_name='Run')),
            ],
            options={
                'verbose_name': 'Fold result',
                'verbose_name_plural': 'Fold results',
                'ordering': ['fold'],
            },
        ),
        migrations.CreateModel(
            name='ScoredSample',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('sample_id', models.CharField(max_length=200, verbose_name='Sample')),
                ('psnr_db', models.FloatField(verbose_name='PSNR (dB)')),
                ('ssim', models.FloatField(verbose_name='SSIM')),
                ('lpips', models.FloatField(verbose_name='LPIPS')),
                ('fold_result', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='samples', to='training.foldresult', verbose_name='Fold result')),
            ],
            options={
                'verbose_name': 'Scored sample',
                'verbose_name_plural': 'Scored samples',
                'ordering': ['sample_id'],
            },
        ),
        migrations.AddConstraint(
            model_name='foldresult',
            constraint=models.UniqueConstraint(fields=('run', 'fold'), name='unique_run_fold'),
        ),
    ]
