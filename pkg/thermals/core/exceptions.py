class ThermalsError(Exception):
    pass


class RangeContractError(ThermalsError, ValueError):
    pass


class ShapeError(ThermalsError, ValueError):
    pass


class IngestionError(ThermalsError):

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class WeatherFetchError(ThermalsError):
    retryable = True


class FixtureMissError(ThermalsError, KeyError):

    def __init__(self, key):
        super().__init__(f'no weather fixture for key {key}')
        self.key = key

    def __str__(self):
        return self.args[0]


class WeatherParseError(ThermalsError):

    def __init__(self, message, raw=None):
        super().__init__(message)
        self.raw = raw


class FittingError(ThermalsError):
    pass


class PipelineConfigError(ThermalsError, ValueError):
    pass


class TrainingAborted(ThermalsError):

    def __init__(self, message, last_good=None):
        super().__init__(message)
        self.last_good = last_good


class ConfigHashMismatch(ThermalsError):
    pass


class BackboneUnavailable(ThermalsError):
    pass


class CheckpointError(ThermalsError):
    pass
