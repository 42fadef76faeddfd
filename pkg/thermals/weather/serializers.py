from datetime import timezone

from rest_framework import serializers

from core.types import MetadataRecord


class WeatherFieldsSerializer(serializers.Serializer):
    temperature = serializers.FloatField()
    relative_humidity = serializers.FloatField(min_value=0, max_value=100)
    wind_speed = serializers.FloatField(min_value=0)
    wind_direction = serializers.FloatField(min_value=0)
    solar_radiation = serializers.FloatField(min_value=0)
    cloud_cover = serializers.FloatField(min_value=0, max_value=100)

    def validate_wind_direction(self, value):
        if value >= 360:
            raise serializers.ValidationError('must be below 360 degrees')
        return value


class CaptureSerializer(serializers.Serializer):
    sample_id = serializers.RegexField(r'^[\w.-]+$', max_length=200)
    group_id = serializers.CharField(max_length=200)
    latitude = serializers.FloatField(min_value=-90, max_value=90)
    longitude = serializers.FloatField(min_value=-180, max_value=180)
    timestamp = serializers.DateTimeField(default_timezone=timezone.utc)


class MetadataRecordSerializer(WeatherFieldsSerializer):
    latitude = serializers.FloatField(min_value=-90, max_value=90)
    longitude = serializers.FloatField(min_value=-180, max_value=180)
    timestamp = serializers.DateTimeField(default_timezone=timezone.utc)

    def to_record(self):
        data = dict(self.validated_data)
        data['timestamp'] = data['timestamp'].astimezone(timezone.utc)
        return MetadataRecord(**data)
