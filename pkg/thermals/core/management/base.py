import logging

from django.core.management.base import BaseCommand, CommandError

from core.exceptions import ThermalsError
from core.utils import get_code_version

logger = logging.getLogger(__name__)


def parse_pair(value, cast=float):
    parts = [part.strip() for part in str(value).split(',')]
    if len(parts) != 2:
        raise CommandError(f'expected two comma-separated values: {value}')
    try:
        return cast(parts[0]), cast(parts[1])
    except ValueError as exc:
        raise CommandError(f'bad pair {value}: {exc}') from exc


class ThermalsCommand(BaseCommand):
    def get_version(self):
        from weather.features import LAYOUT_VERSION

        return f'thermals {get_code_version()} layout {LAYOUT_VERSION}'

    def execute(self, *args, **options):
        try:
            return super().execute(*args, **options)
        except ThermalsError as exc:
            logger.debug('command failed', exc_info=True)
            raise CommandError(str(exc)) from exc

    def log_options(self, resolved, sources):
        for key in sorted(resolved):
            logger.info(
                'option %s = %r (%s)', key, resolved[key],
                sources.get(key, 'default'))
