import logging
from pathlib import Path

import pandas as pd
from django.conf import settings
from django.core.management.base import CommandError
from tqdm import tqdm

from core.datasets import (RGB_DIR, THERMAL_DIR, read_metadata, read_rgb,
                           read_thermal, record_to_row, write_metadata,
                           write_png)
from core.exceptions import ThermalsError
from core.management.base import ThermalsCommand
from core.types import PairedSample, validate_sample
from weather.client import (WEATHER_MODES, FixtureWeatherClient,
                            get_weather_client)
from weather.serializers import CaptureSerializer

logger = logging.getLogger(__name__)

CAPTURES_FILE = 'captures.csv'


class Command(ThermalsCommand):
    help = (
        'Build a dataset directory from raw RGB/thermal pairs: reads '
        '<in>/captures.csv (sample_id, group_id, latitude, longitude, '
        'timestamp_iso8601), fills the weather fields and writes '
        '<out>/rgb, <out>/thermal and <out>/metadata.csv. Samples already '
        'present in <out> are kept as they are.'
    )

    def add_arguments(self, parser):
        parser.add_argument('--in', dest='source', required=True,
                            help='raw directory with rgb/ and thermal/')
        parser.add_argument('--out', required=True,
                            help='dataset directory to create or extend')
        parser.add_argument('--captures',
                            help='capture table (default <in>/captures.csv)')
        parser.add_argument('--weather-mode', choices=WEATHER_MODES,
                            help='live Open-Meteo requests or fixtures')
        parser.add_argument('--fixture-dir',
                            help='weather fixture directory')
        parser.add_argument('--save-fixtures', action='store_true',
                            help='store fetched weather as fixtures')

    def handle(self, *args, **options):
        source, out = Path(options['source']), Path(options['out'])
        captures_path = Path(options['captures'] or source / CAPTURES_FILE)
        if not captures_path.exists():
            raise CommandError(f'capture table {captures_path} not found')
        captures = pd.read_csv(captures_path, dtype=str,
                               keep_default_na=False)
        client = get_weather_client(
            options['weather_mode'], options['fixture_dir'])
        recorder = None
        if options['save_fixtures']:
            recorder = FixtureWeatherClient(
                options['fixture_dir'] or settings.WEATHER_FIXTURE_DIR)

        existing = {
            row['sample_id']: row
            for row in read_metadata(out).to_dict(orient='records')
        }
        rows = dict(existing)
        failures = {}
        for capture in tqdm(captures.to_dict(orient='records'),
                            disable=options['verbosity'] == 0):
            sample_id = capture.get('sample_id', '')
            if sample_id in existing and self._complete(out, sample_id):
                continue
            try:
                rows[sample_id] = self.ingest_one(
                    capture, source, out, client, recorder)
            except (ThermalsError, OSError) as exc:
                logger.warning('sample %s not ingested: %s', sample_id, exc)
                failures[sample_id or '<missing id>'] = str(exc)

        write_metadata(out, rows.values())
        added = len(rows) - len(existing)
        self.stdout.write(self.style.SUCCESS(
            f'{out}: {len(rows)} samples ({added} new)'))
        if failures:
            for sample_id, message in sorted(failures.items()):
                self.stderr.write(f'{sample_id}: {message}')
            raise CommandError(
                f'{len(failures)} samples failed: '
                f'{", ".join(sorted(failures))}')

    @staticmethod
    def _complete(out, sample_id):
        return ((out / RGB_DIR / f'{sample_id}.png').exists()
                and (out / THERMAL_DIR / f'{sample_id}.png').exists())

    def ingest_one(self, capture, source, out, client, recorder):
        serializer = CaptureSerializer(data={
            'sample_id': capture.get('sample_id'),
            'group_id': capture.get('group_id'),
            'latitude': capture.get('latitude'),
            'longitude': capture.get('longitude'),
            'timestamp': capture.get('timestamp_iso8601'),
        })
        if not serializer.is_valid():
            raise ThermalsError(f'invalid capture: {dict(serializer.errors)}')
        data = serializer.validated_data
        sample_id = data['sample_id']
        rgb_path = source / RGB_DIR / f'{sample_id}.png'
        thermal_path = source / THERMAL_DIR / f'{sample_id}.png'
        for path in (rgb_path, thermal_path):
            if not path.exists():
                raise ThermalsError(f'missing file {path}')
        record = client.fetch(
            data['latitude'], data['longitude'], data['timestamp'])
        if recorder is not None:
            recorder.store(record)
        sample = PairedSample(
            sample_id=sample_id,
            rgb=read_rgb(rgb_path),
            thermal=read_thermal(thermal_path),
            metadata=record,
            group_id=data['group_id'],
        )
        problems = validate_sample(sample)
        if problems:
            raise ThermalsError('; '.join(problems))
        write_png(out / RGB_DIR / f'{sample_id}.png', sample.rgb)
        write_png(out / THERMAL_DIR / f'{sample_id}.png', sample.thermal)
        return record_to_row(sample_id, data['group_id'], record)
