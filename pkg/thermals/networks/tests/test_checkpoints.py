import pytest
import torch

from core.exceptions import CheckpointError
from core.tests.factories import make_record
from imaging.preprocess import PreprocessConfig
from networks.checkpoints import load_checkpoint, save_checkpoint
from networks.patchgan import PatchGANDiscriminator
from networks.unet import ConditionalUNet, UNetConfig
from weather.features import build_feature_vector, fit_standardizer


@pytest.fixture
def standardizer():
    return fit_standardizer([
        build_feature_vector(make_record(temperature=t)) for t in (5, 25)
    ], fold=3)


def test_round_trip_restores_weights_and_context(tmp_path, standardizer):
    torch.manual_seed(0)
    model = ConditionalUNet(UNetConfig(input_size=32)).eval()
    preprocess = PreprocessConfig(target_size=32)
    path = save_checkpoint(tmp_path / 'model.pt', model, 'unet',
                           standardizer, preprocess, extra={'fold': 3})

    loaded = load_checkpoint(path)
    rgb, vector = torch.rand(1, 3, 32, 32), torch.randn(1, 15)
    with torch.no_grad():
        assert torch.equal(loaded.model(rgb, vector), model(rgb, vector))
    assert loaded.model.config == model.config
    assert loaded.model_kind == 'unet'
    assert loaded.preprocess == preprocess
    assert loaded.preprocess_hash == preprocess.hash
    assert loaded.standardizer.fitted_on_fold == 3
    assert loaded.extra == {'fold': 3}
    assert loaded.discriminator is None


def test_discriminator_travels_with_pix2pix(tmp_path, standardizer):
    generator = ConditionalUNet(UNetConfig(conditioned=False))
    discriminator = PatchGANDiscriminator()
    path = save_checkpoint(tmp_path / 'gan.pt', generator, 'pix2pix',
                           standardizer, PreprocessConfig(),
                           discriminator=discriminator)
    loaded = load_checkpoint(path)
    assert loaded.model_kind == 'pix2pix'
    assert not loaded.model.config.conditioned
    assert torch.equal(loaded.discriminator.convs[0].weight,
                       discriminator.convs[0].weight)


def test_unknown_kind_is_refused(tmp_path, standardizer):
    with pytest.raises(CheckpointError):
        save_checkpoint(tmp_path / 'x.pt', ConditionalUNet(), 'vae',
                        standardizer, PreprocessConfig())


def test_missing_and_foreign_files(tmp_path):
    with pytest.raises(CheckpointError, match='does not exist'):
        load_checkpoint(tmp_path / 'absent.pt')
    torch.save({'format_version': 'other'}, tmp_path / 'foreign.pt')
    with pytest.raises(CheckpointError, match='format'):
        load_checkpoint(tmp_path / 'foreign.pt')
    (tmp_path / 'junk.pt').write_bytes(b'not a checkpoint')
    with pytest.raises(CheckpointError, match='cannot read'):
        load_checkpoint(tmp_path / 'junk.pt')


def test_tampered_preprocess_hash_is_detected(tmp_path, standardizer):
    path = save_checkpoint(tmp_path / 'model.pt', ConditionalUNet(), 'unet',
                           standardizer, PreprocessConfig())
    document = torch.load(path, weights_only=True)
    document['preprocess']['saturation_factor'] = 1.0
    torch.save(document, path)
    with pytest.raises(CheckpointError, match='preprocess hash'):
        load_checkpoint(path)
