import pytest
import torch

from core.exceptions import PipelineConfigError, ShapeError
from networks.blocks import (ConditionEmbedding, FilmParams, SelfAttention2d,
                             film_modulate)
from networks.unet import ConditionalUNet, LayerShape, UNetConfig
from scoring.losses import LossWeights, combined_loss

LAYER_TABLE = [
    ('Encoder 1', 384, 3, 384, 32),
    ('Max Pool 1', 384, 32, 192, 32),
    ('Encoder 2', 192, 32, 192, 64),
    ('Max Pool 2', 192, 64, 96, 64),
    ('Encoder 3', 96, 64, 96, 128),
    ('Max Pool 3', 96, 128, 48, 128),
    ('Encoder 4', 48, 128, 48, 256),
    ('Max Pool 4', 48, 256, 24, 256),
    ('Bottleneck', 24, 256, 24, 512),
    ('SelfAttention2d', 24, 512, 24, 512),
    ('FiLM conditioning', 24, 512, 24, 512),
    ('Upscale 4 (Bilinear)', 24, 512, 48, 512),
    ('Decoder 4', 48, 512, 48, 256),
    ('Upscale 3 (Bilinear)', 48, 256, 96, 256),
    ('Decoder 3', 96, 256, 96, 128),
    ('Upscale 2 (Bilinear)', 96, 128, 192, 128),
    ('Decoder 2', 192, 128, 192, 64),
    ('Upscale 1 (Bilinear)', 192, 64, 384, 64),
    ('Decoder 1', 384, 64, 384, 32),
    ('Final Conv', 384, 32, 384, 1),
]


def scaled_table(size):
    factor = 384 // size
    return [
        LayerShape(name, (h_in // factor,) * 2, c_in,
                   (h_out // factor,) * 2, c_out)
        for name, h_in, c_in, h_out, c_out in LAYER_TABLE
    ]


@pytest.fixture
def model():
    torch.manual_seed(0)
    return ConditionalUNet().eval()


def test_layer_shapes_at_reduced_size(model):
    rows = model.trace_shapes(torch.zeros(1, 3, 64, 64), torch.zeros(1, 15))
    assert rows == scaled_table(64)


@pytest.mark.slow
def test_layer_shapes_at_full_size(model):
    rows = model.trace_shapes(
        torch.zeros(1, 3, 384, 384), torch.zeros(1, 15))
    assert rows == scaled_table(384)


def test_output_is_a_probability_map(model):
    rgb = torch.rand(2, 3, 32, 32) * 2 - 1
    out = model(rgb, torch.randn(2, 15))
    assert out.shape == (2, 1, 32, 32)
    assert out.min() > 0 and out.max() < 1


def test_untrained_film_does_not_depend_on_metadata(model):
    rgb = torch.rand(1, 3, 32, 32) * 2 - 1
    with torch.no_grad():
        first = model(rgb, torch.randn(1, 15))
        second = model(rgb, torch.randn(1, 15))
    assert torch.equal(first, second)


def test_unconditioned_variant_ignores_vectors():
    model = ConditionalUNet(UNetConfig(conditioned=False)).eval()
    assert not hasattr(model, 'embed')
    out = model(torch.zeros(1, 3, 32, 32))
    rows = model.trace_shapes(torch.zeros(1, 3, 32, 32))
    assert out.shape == (1, 1, 32, 32)
    assert 'FiLM conditioning' not in [row.layer for row in rows]


@pytest.mark.parametrize('size, stage', [
    (40, 'Max Pool 4'),
    (36, 'Max Pool 3'),
    (30, 'Max Pool 2'),
    (34, 'Max Pool 2'),
    (33, 'Max Pool 1'),
])
def test_indivisible_sizes_name_the_failing_stage(model, size, stage):
    with pytest.raises(ShapeError, match=stage):
        model(torch.zeros(1, 3, size, size), torch.zeros(1, 15))


def test_wrong_channel_count_fails_at_the_first_encoder(model):
    with pytest.raises(ShapeError, match='Encoder 1'):
        model(torch.zeros(1, 4, 32, 32), torch.zeros(1, 15))


def test_missing_or_misshapen_vector_fails_at_film(model):
    rgb = torch.zeros(2, 3, 32, 32)
    with pytest.raises(ShapeError, match='FiLM conditioning'):
        model(rgb)
    with pytest.raises(ShapeError, match='FiLM conditioning'):
        model(rgb, torch.zeros(1, 15))


@pytest.mark.parametrize('overrides', [
    {'encoder_widths': (32, 64, 128)},
    {'encoder_widths': (32, 32, 128, 256)},
    {'bottleneck_width': 384},
    {'input_size': 100},
])
def test_config_validation(overrides):
    with pytest.raises(PipelineConfigError):
        UNetConfig(**overrides)


def test_config_document_round_trip():
    config = UNetConfig(conditioned=False).reduced(128)
    assert UNetConfig.from_dict(config.as_dict()) == config
    assert config.input_size == 128


def test_film_modulate_by_hand():
    h = torch.tensor([[[[1.0, 2.0]], [[3.0, 4.0]]]])
    params = FilmParams(torch.tensor([2.0, -1.0]), torch.tensor([0.5, 1.0]))
    expected = torch.tensor([[[[2.5, 4.5]], [[-2.0, -3.0]]]])
    assert torch.equal(film_modulate(h, params), expected)


def test_film_modulate_checks_lengths():
    params = FilmParams(torch.ones(3), torch.zeros(3))
    with pytest.raises(ShapeError):
        film_modulate(torch.zeros(1, 2, 2, 2), params)


def test_condition_embedding_starts_at_identity():
    embed = ConditionEmbedding(cond_dim=15, hidden=16, channels=8)
    gamma, beta = embed(torch.randn(3, 15))
    assert torch.equal(gamma, torch.ones(3, 8))
    assert torch.equal(beta, torch.zeros(3, 8))
    with pytest.raises(ShapeError):
        embed(torch.randn(3, 14))


def test_zero_initialised_attention_is_identity():
    attention = SelfAttention2d(64, heads=4, zero_init=True)
    x = torch.randn(2, 64, 5, 5)
    assert torch.equal(attention(x), x)


def test_attention_is_equivariant_to_spatial_permutations():
    torch.manual_seed(1)
    attention = SelfAttention2d(32, heads=4).eval()
    x = torch.randn(1, 32, 4, 4)
    order = torch.randperm(16)

    def permute(tensor):
        return tensor.flatten(2)[:, :, order].reshape(1, 32, 4, 4)

    with torch.no_grad():
        assert torch.allclose(
            attention(permute(x)), permute(attention(x)), atol=1e-5)


def test_attention_rejects_uneven_heads():
    with pytest.raises(ShapeError):
        SelfAttention2d(30, heads=4)


PARAMETER_GROUPS = ('encoders', 'bottleneck', 'attention', 'embed',
                    'decoders', 'final')


def perturbed_model(size, seed=0):
    torch.manual_seed(seed)
    model = ConditionalUNet(UNetConfig(input_size=size)).double()
    with torch.no_grad():
        for parameter in model.parameters():
            parameter.add_(0.05 * torch.randn_like(parameter))
    return model


def gradient_pairs(model, loss, per_group, seed=0, step=1e-6):
    """(group, analytic, central difference) at random coordinates."""
    generator = torch.Generator().manual_seed(seed)

    def pick(count):
        return int(torch.randint(count, (1,), generator=generator))

    model.zero_grad()
    loss().backward()
    pairs = []
    for group in PARAMETER_GROUPS:
        members = [p for name, p in model.named_parameters()
                   if name.split('.')[0] == group]
        for _ in range(per_group):
            parameter = members[pick(len(members))]
            index = pick(parameter.numel())
            analytic = parameter.grad.reshape(-1)[index].item()
            flat = parameter.data.view(-1)
            original = flat[index].item()
            with torch.no_grad():
                flat[index] = original + step
                plus = loss().item()
                flat[index] = original - step
                minus = loss().item()
                flat[index] = original
            pairs.append((group, analytic, (plus - minus) / (2 * step)))
    return pairs


def gradient_batch(size, seed=1):
    generator = torch.Generator().manual_seed(seed)
    rgb = torch.rand(2, 3, size, size, generator=generator,
                     dtype=torch.float64) * 2 - 1
    vector = torch.randn(2, 15, generator=generator, dtype=torch.float64)
    target = torch.rand(2, 1, size, size, generator=generator,
                        dtype=torch.float64)
    return rgb, vector, target


def assert_gradients_agree(pairs):
    for group, analytic, numeric in pairs:
        assert analytic == pytest.approx(numeric, rel=1e-3, abs=1e-7), group
    for group in PARAMETER_GROUPS:
        assert any(abs(a) > 0 for g, a, _ in pairs if g == group), group


def test_parameter_gradients_match_finite_differences():
    model = perturbed_model(32)
    rgb, vector, target = gradient_batch(32)
    weights = LossWeights(lpips=0.0)

    def loss():
        return combined_loss(model(rgb, vector), target, weights).total

    pairs = gradient_pairs(model, loss, per_group=9)
    assert len(pairs) >= 50
    assert_gradients_agree(pairs)


@pytest.mark.slow
def test_parameter_gradients_with_lpips_match_finite_differences():
    model = perturbed_model(64, seed=2)
    rgb, vector, target = gradient_batch(64, seed=3)

    def loss():
        return combined_loss(model(rgb, vector), target,
                             LossWeights()).total

    assert_gradients_agree(gradient_pairs(model, loss, per_group=9, seed=4))
