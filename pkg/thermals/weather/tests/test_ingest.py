import pytest
from django.core.management import call_command
from django.core.management.base import CommandError

from core.datasets import read_dataset, read_metadata


def test_ingest_fills_weather_from_fixtures(raw_capture_dir, tmp_path,
                                            samples):
    out = tmp_path / 'dataset'
    call_command('ingest', '--in', str(raw_capture_dir), '--out', str(out),
                 verbosity=0)

    loaded = {sample.sample_id: sample for sample in read_dataset(out)}
    assert sorted(loaded) == [sample.sample_id for sample in samples]
    for sample in samples:
        assert loaded[sample.sample_id].metadata == sample.metadata
        assert loaded[sample.sample_id].group_id == sample.group_id


def test_ingest_is_resumable(raw_capture_dir, tmp_path):
    out = tmp_path / 'dataset'
    call_command('ingest', '--in', str(raw_capture_dir), '--out', str(out),
                 verbosity=0)
    first = read_metadata(out)
    call_command('ingest', '--in', str(raw_capture_dir), '--out', str(out),
                 verbosity=0)
    assert read_metadata(out).equals(first)


def test_ingest_reports_failed_samples(raw_capture_dir, tmp_path):
    (raw_capture_dir / 'thermal' / 's003.png').unlink()
    out = tmp_path / 'dataset'
    with pytest.raises(CommandError, match='s003'):
        call_command('ingest', '--in', str(raw_capture_dir),
                     '--out', str(out), verbosity=0)
    assert 's003' not in set(read_metadata(out)['sample_id'])
    assert len(read_metadata(out)) == 9


def test_ingest_without_fixture_fails(raw_capture_dir, tmp_path, settings):
    settings.WEATHER_FIXTURE_DIR = tmp_path / 'empty'
    with pytest.raises(CommandError, match='10 samples failed'):
        call_command('ingest', '--in', str(raw_capture_dir),
                     '--out', str(tmp_path / 'dataset'), verbosity=0)
