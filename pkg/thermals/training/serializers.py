from collections.abc import Mapping

from rest_framework import serializers

MODEL_KINDS = ('unet', 'pix2pix')


class StrictSerializer(serializers.Serializer):
    def to_internal_value(self, data):
        if isinstance(data, Mapping):
            unknown = sorted(set(data) - set(self.fields))
            if unknown:
                raise serializers.ValidationError(
                    {key: ['unknown option'] for key in unknown})
        return super().to_internal_value(data)


class LossWeightsSerializer(StrictSerializer):
    charbonnier = serializers.FloatField(min_value=0, required=False)
    msssim = serializers.FloatField(min_value=0, required=False)
    lpips = serializers.FloatField(min_value=0, required=False)
    grad = serializers.FloatField(min_value=0, required=False)
    stats = serializers.FloatField(min_value=0, required=False)


class AugmentConfigSerializer(StrictSerializer):
    hflip_p = serializers.FloatField(min_value=0, max_value=1, required=False)
    vflip_p = serializers.FloatField(min_value=0, max_value=1, required=False)
    rot90_p = serializers.FloatField(min_value=0, max_value=1, required=False)
    brightness_p = serializers.FloatField(
        min_value=0, max_value=1, required=False)
    brightness_range = serializers.ListField(
        child=serializers.FloatField(min_value=0),
        min_length=2, max_length=2, required=False)
    noise_p = serializers.FloatField(min_value=0, max_value=1, required=False)
    noise_sigma = serializers.FloatField(min_value=0, required=False)

    def validate_brightness_range(self, value):
        low, high = value
        if not 0 < low <= high:
            raise serializers.ValidationError(
                'factor range must satisfy 0 < low <= high')
        return value


class PreprocessSerializer(StrictSerializer):
    target_size = serializers.IntegerField(min_value=16, required=False)
    saturation_factor = serializers.FloatField(min_value=0, required=False)
    stretch_lo = serializers.FloatField(
        min_value=0, max_value=100, required=False)
    stretch_hi = serializers.FloatField(
        min_value=0, max_value=100, required=False)
    saturation_enabled = serializers.BooleanField(required=False)
    stretch_enabled = serializers.BooleanField(required=False)


class RenderSerializer(StrictSerializer):
    blur_sigma = serializers.FloatField(min_value=0, required=False)
    norm_lo = serializers.FloatField(
        min_value=0, max_value=100, required=False)
    norm_hi = serializers.FloatField(
        min_value=0, max_value=100, required=False)
    colormap = serializers.CharField(required=False)


class TrainConfigSerializer(StrictSerializer):
    model = serializers.ChoiceField(choices=MODEL_KINDS, required=False)
    epochs = serializers.IntegerField(min_value=1, required=False)
    batch_size = serializers.IntegerField(min_value=1, required=False)
    lr = serializers.FloatField(required=False)
    eta_min = serializers.FloatField(min_value=0, required=False)
    finetune_epochs = serializers.IntegerField(min_value=0, required=False)
    finetune_lr = serializers.FloatField(required=False)
    weight_decay = serializers.FloatField(min_value=0, required=False)
    seed = serializers.IntegerField(min_value=0, required=False)
    folds = serializers.IntegerField(min_value=2, required=False)
    lambda_l1 = serializers.FloatField(min_value=0, required=False)
    charbonnier_eps = serializers.FloatField(min_value=0, required=False)
    conditioned = serializers.BooleanField(required=False)
    loss_weights = LossWeightsSerializer(required=False)
    augment = AugmentConfigSerializer(required=False)
    preprocess = PreprocessSerializer(required=False)
    render = RenderSerializer(required=False)

    def validate_lr(self, value):
        return self._positive(value)

    def validate_finetune_lr(self, value):
        return self._positive(value)

    @staticmethod
    def _positive(value):
        if not value > 0:
            raise serializers.ValidationError('rates must be > 0')
        return value
