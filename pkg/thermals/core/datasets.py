import logging
import math
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
import pandas as pd
from PIL import Image

from .exceptions import IngestionError
from .types import ImageTensor, MetadataRecord, PairedSample, RangeTag
from .utils import atomic_write_text

logger = logging.getLogger(__name__)

METADATA_FILE = 'metadata.csv'
RGB_DIR = 'rgb'
THERMAL_DIR = 'thermal'

METADATA_COLUMNS = [
    'sample_id', 'group_id', 'latitude', 'longitude', 'timestamp_iso8601',
    'temperature_c', 'relative_humidity_pct', 'wind_speed_ms',
    'wind_direction_deg', 'solar_radiation_wm2', 'cloud_cover_pct',
]

# csv column -> MetadataRecord field
RECORD_COLUMNS = {
    'latitude': 'latitude',
    'longitude': 'longitude',
    'temperature_c': 'temperature',
    'relative_humidity_pct': 'relative_humidity',
    'wind_speed_ms': 'wind_speed',
    'wind_direction_deg': 'wind_direction',
    'solar_radiation_wm2': 'solar_radiation',
    'cloud_cover_pct': 'cloud_cover',
}


def parse_timestamp(value: str) -> datetime:
    text = str(value).strip()
    if text[-1:] in ('Z', 'z'):
        text = text[:-1] + '+00:00'
    try:
        moment = datetime.fromisoformat(text)
    except ValueError as exc:
        raise IngestionError(
            f'timestamp_iso8601 {value!r} is not ISO 8601',
            field='timestamp_iso8601') from exc
    if moment.tzinfo is None:
        return moment.replace(tzinfo=timezone.utc)
    return moment.astimezone(timezone.utc)


def format_timestamp(moment: datetime) -> str:
    return moment.astimezone(timezone.utc).isoformat()


def read_rgb(path) -> ImageTensor:
    with Image.open(path) as image:
        pixels = np.asarray(image.convert('RGB'), dtype=np.float32)
    return ImageTensor(pixels.transpose(2, 0, 1), RangeTag.RAW_0_255)


def read_thermal(path) -> ImageTensor:
    with Image.open(path) as image:
        pixels = np.asarray(image.convert('L'), dtype=np.float32)
    return ImageTensor(pixels[None] / 255.0, RangeTag.UNIT_0_1)


def to_uint8(image: ImageTensor) -> np.ndarray:
    if image.range_tag is RangeTag.RAW_0_255:
        scaled = image.data
    elif image.range_tag is RangeTag.UNIT_0_1:
        scaled = image.data * 255.0
    else:
        scaled = (image.data + 1.0) * 127.5
    pixels = np.clip(np.rint(scaled), 0, 255).astype(np.uint8)
    if image.channels == 1:
        return pixels[0]
    return pixels.transpose(1, 2, 0)


def write_png(path, image: ImageTensor) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(to_uint8(image)).save(path)
    return path


def record_to_row(sample_id, group_id, record: MetadataRecord) -> dict:
    row = {
        'sample_id': sample_id,
        'group_id': group_id,
        'timestamp_iso8601': format_timestamp(record.timestamp),
    }
    for column, name in RECORD_COLUMNS.items():
        row[column] = float(getattr(record, name))
    return row


def row_to_record(row) -> MetadataRecord:
    values = {}
    for column, name in RECORD_COLUMNS.items():
        value = row.get(column)
        if value is None or (isinstance(value, float) and math.isnan(value)):
            raise IngestionError(f'missing field {column}', field=column)
        try:
            values[name] = float(value)
        except (TypeError, ValueError) as exc:
            raise IngestionError(
                f'{column} {value!r} is not a number', field=column) from exc
    stamp = row.get('timestamp_iso8601')
    if stamp is None or (isinstance(stamp, float) and math.isnan(stamp)):
        raise IngestionError(
            'missing field timestamp_iso8601', field='timestamp_iso8601')
    return MetadataRecord(timestamp=parse_timestamp(stamp), **values)


def read_metadata(root) -> pd.DataFrame:
    path = Path(root) / METADATA_FILE
    if not path.exists():
        return pd.DataFrame(columns=METADATA_COLUMNS)
    frame = pd.read_csv(
        path,
        dtype={'sample_id': str, 'group_id': str, 'timestamp_iso8601': str},
        float_precision='round_trip',
        keep_default_na=False,
        na_values={column: [''] for column in RECORD_COLUMNS},
    )
    missing = [name for name in METADATA_COLUMNS if name not in frame]
    if missing:
        raise IngestionError(
            f'{path} lacks columns {missing}', field=missing[0])
    return frame[METADATA_COLUMNS]


def write_metadata(root, rows) -> Path:
    frame = pd.DataFrame(list(rows), columns=METADATA_COLUMNS)
    frame = frame.sort_values('sample_id', kind='stable')
    text = frame.to_csv(index=False, lineterminator='\n')
    return atomic_write_text(Path(root) / METADATA_FILE, text)


def write_dataset(root, samples) -> Path:
    root = Path(root)
    for sample in samples:
        write_png(root / RGB_DIR / f'{sample.sample_id}.png', sample.rgb)
        write_png(
            root / THERMAL_DIR / f'{sample.sample_id}.png', sample.thermal)
    write_metadata(root, (
        record_to_row(sample.sample_id, sample.group_id, sample.metadata)
        for sample in samples
    ))
    return root


def read_sample(root, row) -> PairedSample:
    root = Path(root)
    sample_id = row['sample_id']
    return PairedSample(
        sample_id=sample_id,
        rgb=read_rgb(root / RGB_DIR / f'{sample_id}.png'),
        thermal=read_thermal(root / THERMAL_DIR / f'{sample_id}.png'),
        metadata=row_to_record(row),
        group_id=row['group_id'],
    )


def read_dataset(root, sample_ids=None) -> list:
    frame = read_metadata(root)
    if sample_ids is not None:
        wanted = set(sample_ids)
        frame = frame[frame['sample_id'].isin(wanted)]
    samples = [
        read_sample(root, row) for row in frame.to_dict(orient='records')
    ]
    logger.debug('loaded %d samples from %s', len(samples), root)
    return samples
