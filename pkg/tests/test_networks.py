"""Tests for the mapping network, radiance field, decoder and discriminator"""

import numpy as np
import pytest

from src.engine import NonFiniteError, ShapeError, Tensor, bilinear_upsample, precision
from src.networks import (
    MappingNetwork,
    ProgressiveDecoder,
    ProgressiveDiscriminator,
    RadianceField,
    ResolutionError,
    positional_encoding,
    sample_latents,
)


@pytest.fixture
def decoder(rng):
    """Decoder grown from 4x4 features to 16x16 images"""
    return ProgressiveDecoder(rng, in_channels=6, w_dim=8, channels={4: 8, 8: 6, 16: 4})


@pytest.fixture
def discriminator(rng):
    """Discriminator grown from 8x8 to 16x16 images"""
    return ProgressiveDiscriminator(rng, {8: 6, 16: 4})


def test_mapping_shapes(rng):
    """Test single and batched latents keep their leading shape"""
    mapping = MappingNetwork(rng, z_dim=6, w_dim=5)
    assert mapping(sample_latents(rng, 3, 6)).shape == (3, 5)
    assert mapping(rng.standard_normal(6)).shape == (5,)
    assert len(mapping.layers) == 4


def test_mapping_is_deterministic_per_seed():
    """Test equal seeds give equal weights"""
    a = MappingNetwork(np.random.default_rng(5), z_dim=4, w_dim=4)
    b = MappingNetwork(np.random.default_rng(5), z_dim=4, w_dim=4)
    for (name_a, pa), (name_b, pb) in zip(a.named_parameters(), b.named_parameters()):
        assert name_a == name_b
        np.testing.assert_array_equal(pa.data, pb.data)


def test_positional_encoding_shapes():
    """Test zero octaves is the identity and L octaves give 2L bands per axis"""
    x = np.array([[0.1, -0.2, 0.3]])
    np.testing.assert_allclose(positional_encoding(x, 0).data, x, atol=1e-7)
    encoded = positional_encoding(x, 3)
    assert encoded.shape == (1, 18)
    np.testing.assert_allclose(encoded.data[0, :3], np.sin(np.pi * x[0]), atol=1e-6)


@pytest.mark.parametrize("use_view_dirs, pe", [(True, 0), (False, 0), (True, 2)])
def test_radiance_field_output_ranges(rng, use_view_dirs, pe):
    """Test colors in [0, 1], non-negative density and the feature width"""
    field = RadianceField(rng, w_dim=8, width=16, n_layers=3, feature_dim=7,
                          use_view_dirs=use_view_dirs, pe_position=pe, pe_direction=pe)
    points = rng.uniform(-0.2, 0.2, (40, 3))
    dirs = rng.standard_normal((40, 3))
    dirs /= np.linalg.norm(dirs, axis=-1, keepdims=True)
    color, sigma, feature = field(points, dirs, rng.standard_normal(8))
    assert color.shape == (40, 3)
    assert sigma.shape == (40, 1)
    assert feature.shape == (40, 7)
    assert np.all((color.data >= 0.0) & (color.data <= 1.0))
    assert np.all(sigma.data >= 0.0)


def test_radiance_field_rejects_nonfinite_inputs(rng):
    """Test NaN or infinite positions, directions and styles are refused"""
    field = RadianceField(rng, w_dim=4, width=8, n_layers=2, feature_dim=4)
    points = rng.uniform(-0.1, 0.1, (5, 3))
    dirs = np.tile([0, 0, -1.0], (5, 1))
    w = rng.standard_normal(4)
    bad_points = points.copy()
    bad_points[2, 1] = np.nan
    with pytest.raises(NonFiniteError, match="positions"):
        field(bad_points, dirs, w)
    bad_dirs = dirs.copy()
    bad_dirs[0, 0] = np.inf
    with pytest.raises(NonFiniteError, match="directions"):
        field(points, bad_dirs, w)
    with pytest.raises(NonFiniteError, match="style"):
        field(points, dirs, np.full(4, np.nan))


def test_radiance_field_gradient_reaches_style(rng):
    """Test the loss gradient flows into the style vector and every field parameter"""
    field = RadianceField(rng, w_dim=4, width=8, n_layers=2, feature_dim=4)
    w = Tensor(rng.standard_normal(4), requires_grad=True)
    color, sigma, feature = field(rng.uniform(-0.1, 0.1, (5, 3)), np.tile([0, 0, -1.0], (5, 1)), w)
    (color.sum() + sigma.sum() + feature.sum()).backward()
    assert w.grad is not None and np.any(w.grad != 0)
    assert all(p.grad is not None for p in field.parameters())


def test_decoder_output_range(decoder, rng):
    """Test decoded images lie in [-1, 1] at every grown resolution"""
    features = rng.standard_normal((2, 6, 4, 4))
    w = rng.standard_normal((2, 8))
    for res in (4, 8, 16):
        img = decoder(features, w, res)
        assert img.shape == (2, 3, res, res)
        assert np.all(np.abs(img.data) <= 1.0)


def test_decoder_fade_start_is_upsampled_previous(decoder, rng):
    """Test fade_alpha = 0 returns the upsampled output of the previous resolution"""
    features = rng.standard_normal((1, 6, 4, 4))
    w = rng.standard_normal(8)
    faded = decoder(features, w, 16, fade_alpha=0.0)
    previous = decoder(features, w, 8)
    np.testing.assert_allclose(faded.data, bilinear_upsample(previous).data, atol=1e-5)
    full = decoder(features, w, 16, fade_alpha=1.0)
    half = decoder(features, w, 16, fade_alpha=0.5)
    np.testing.assert_allclose(half.data, 0.5 * (faded.data + full.data), atol=1e-5)


def test_decoder_errors(decoder, rng):
    """Test unknown resolutions, wrong feature sizes and bad fade values"""
    w = rng.standard_normal(8)
    with pytest.raises(ResolutionError, match="no block"):
        decoder(rng.standard_normal((1, 6, 4, 4)), w, 32)
    with pytest.raises(ResolutionError, match="features"):
        decoder(rng.standard_normal((1, 6, 8, 8)), w, 8)
    with pytest.raises(ValueError, match="fade_alpha"):
        decoder(rng.standard_normal((1, 6, 4, 4)), w, 8, fade_alpha=1.5)
    with pytest.raises(ResolutionError, match="double"):
        ProgressiveDecoder(rng, 6, 8, {4: 8, 16: 4})


def test_discriminator_scores_and_depth(discriminator, rng):
    """Test scores are [B, 1] and the layer count grows by two per doubling"""
    assert discriminator(rng.uniform(-1, 1, (2, 3, 8, 8)), 8).shape == (2, 1)
    assert discriminator(rng.uniform(-1, 1, (3, 3, 16, 16)), 16, 0.3).shape == (3, 1)
    assert discriminator.n_layers(8) == 8
    assert discriminator.n_layers(16) == 10


def test_discriminator_fade_blends_skip_path(discriminator, rng):
    """Test fade_alpha = 1 ignores the skip path and other values change the score"""
    img = rng.uniform(-1, 1, (1, 3, 16, 16))
    full = discriminator(img, 16, 1.0).data
    faded = discriminator(img, 16, 0.0).data
    assert not np.allclose(full, faded)


def test_discriminator_errors(discriminator, rng):
    """Test resolution checks"""
    with pytest.raises(ResolutionError, match="expected images"):
        discriminator(rng.uniform(-1, 1, (1, 3, 16, 16)), 8)
    with pytest.raises(ResolutionError, match="no block"):
        discriminator(rng.uniform(-1, 1, (1, 3, 32, 32)), 32)
    with pytest.raises(ResolutionError, match="divisible by 8"):
        ProgressiveDiscriminator(rng, {4: 4, 8: 4})


def test_discriminator_input_gradient(rng):
    """Test the discriminator input gradient against central differences"""
    disc = ProgressiveDiscriminator(np.random.default_rng(1), {8: 3})
    img0 = rng.uniform(-1, 1, (1, 3, 8, 8))
    with precision("float64"):
        disc.astype(np.float64)
        img = Tensor(img0, requires_grad=True)
        disc(img, 8).sum().backward()
        eps = 1e-6
        idx = [(0, 0, 1, 2), (0, 2, 5, 5), (0, 1, 7, 0)]
        for i in idx:
            plus, minus = img0.copy(), img0.copy()
            plus[i] += eps
            minus[i] -= eps
            numeric = (disc(plus, 8).item() - disc(minus, 8).item()) / (2 * eps)
            assert img.grad[i] == pytest.approx(numeric, rel=1e-4, abs=1e-8)


def test_state_dict_round_trip(decoder, rng):
    """Test loading a state dict reproduces the outputs of the source module"""
    other = ProgressiveDecoder(np.random.default_rng(99), 6, 8, {4: 8, 8: 6, 16: 4})
    features = rng.standard_normal((1, 6, 4, 4))
    w = rng.standard_normal(8)
    assert not np.allclose(other(features, w, 16).data, decoder(features, w, 16).data)
    other.load_state_dict(decoder.state_dict())
    np.testing.assert_array_equal(other(features, w, 16).data, decoder(features, w, 16).data)
    assert other.num_parameters() == decoder.num_parameters()


def test_load_state_dict_errors(decoder):
    """Test missing keys and wrong shapes are rejected"""
    state = decoder.state_dict()
    name = next(iter(state))
    with pytest.raises(KeyError, match="missing parameter"):
        decoder.load_state_dict({k: v for k, v in state.items() if k != name})
    state[name] = np.zeros((1, 1, 1))
    with pytest.raises(ShapeError, match="expected shape"):
        decoder.load_state_dict(state)
