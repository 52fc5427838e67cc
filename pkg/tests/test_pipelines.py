"""Tests for data pipelines"""

import numpy as np
import pytest

from src.engine import bilinear_sample
from src.geometry import CameraPose, PoseDistribution, intrinsics_from_fov, relative_transform
from src.pipelines import (
    DataValidationError,
    DataValidator,
    EmptyDatasetError,
    FolderDataset,
    SyntheticDataset,
    SyntheticScene,
    area_downsample,
    colorize,
    fractal_noise,
    linear_to_srgb,
    load_png,
    make_grid,
    render_ground_truth,
    save_png,
    srgb_to_linear,
)
from src.pipelines import data_loader
from src.stereo import compute_correspondence


@pytest.fixture
def dataset():
    """Five synthetic sphere views at 8x8"""
    return SyntheticDataset(SyntheticScene(seed=2), count=5, resolution=8,
                            pose_dist=PoseDistribution(), order_seed=1)


@pytest.fixture
def png_folder(tmp_path, rng):
    """Folder with two valid images and one corrupt file"""
    folder = tmp_path / "images"
    for i in range(2):
        save_png(folder / f"img{i}.png", rng.uniform(0, 1, (3, 8, 8)))
    (folder / "broken.png").write_bytes(b"not a png")
    return folder


def test_sphere_depth_on_axis():
    """Test the frontal sphere surface sits radius in front of the center"""
    K = intrinsics_from_fov(12.0, 16)
    image, depth = render_ground_truth(SyntheticScene(), CameraPose(radius=1.0), K)
    assert image.shape == (3, 16, 16)
    assert depth[7:9, 7:9] == pytest.approx(np.full((2, 2), 0.9), abs=1e-3)
    # corners miss the sphere
    assert depth[0, 0] == 0.0
    np.testing.assert_array_equal(image[:, 0, 0], 0.0)


def test_ground_truth_depth_lands_on_second_view_surface():
    """Test reprojected ground-truth depth agrees with the second view's depth within 1%"""
    K = intrinsics_from_fov(12.0, 32)
    scene = SyntheticScene(kind="textured_sphere", seed=1)
    pri = CameraPose(pitch=0.05, yaw=-0.1, radius=1.0)
    aux = CameraPose(pitch=0.05, yaw=0.1, radius=1.0)
    _, pri_depth = render_ground_truth(scene, pri, K)
    _, aux_depth = render_ground_truth(scene, aux, K)

    corr = compute_correspondence(pri_depth, K, relative_transform(pri, aux))
    landed = bilinear_sample(aux_depth[None], corr.coords.data - 0.5).data[0]

    # stay clear of the silhouette, where depth changes too fast to interpolate
    interior = (aux_depth > 0) & (aux_depth <= 0.95)
    x0 = np.clip(np.floor(corr.coords.data[..., 0] - 0.5).astype(int), 0, K.width - 2)
    y0 = np.clip(np.floor(corr.coords.data[..., 1] - 0.5).astype(int), 0, K.height - 2)
    neighbors = (interior[y0, x0] & interior[y0, x0 + 1]
                 & interior[y0 + 1, x0] & interior[y0 + 1, x0 + 1])
    mask = corr.valid & (pri_depth > 0) & (pri_depth <= 0.95) & neighbors
    assert mask.sum() > 50

    expected = corr.aux_depth.data[mask]
    relative = np.abs(landed[mask] - expected) / expected
    assert relative.max() < 0.01


def test_plane_depth_is_constant():
    """Test a frontal plane through the origin has depth equal to the camera radius"""
    K = intrinsics_from_fov(12.0, 8)
    _, depth = render_ground_truth(SyntheticScene(kind="textured_plane"), CameraPose(radius=1.0), K)
    np.testing.assert_allclose(depth, 1.0, atol=1e-9)


@pytest.mark.parametrize("kind", ["textured_sphere", "textured_plane", "two_tone_blob"])
def test_scene_images_in_range(kind):
    """Test every scene kind renders finite values in [0, 1]"""
    K = intrinsics_from_fov(12.0, 16)
    image, depth = render_ground_truth(SyntheticScene(kind=kind, seed=4), CameraPose(yaw=0.2), K)
    assert np.all(np.isfinite(image))
    assert image.min() >= 0.0 and image.max() <= 1.0
    assert np.all(depth >= 0.0)
    assert (depth > 0).any()


def test_fractal_noise_is_seeded_and_bounded(rng):
    """Test noise depends only on the point and seed and stays in [0, 1)"""
    points = rng.uniform(-1, 1, (200, 3))
    a = fractal_noise(points, seed=3)
    np.testing.assert_array_equal(a, fractal_noise(points, seed=3))
    assert not np.allclose(a, fractal_noise(points, seed=4))
    assert a.min() >= 0.0 and a.max() < 1.0


def test_synthetic_dataset_epoch_order(dataset):
    """Test one epoch visits every image once"""
    first = dataset.next_indices(5)
    assert sorted(first) == list(range(5))
    assert dataset.epoch == 1
    dataset.next_indices(1)
    assert dataset.epoch == 2


def test_synthetic_dataset_batch(dataset):
    """Test batches are channel-first images in [0, 1]"""
    batch = dataset.next_batch(3)
    assert batch.shape == (3, 3, 8, 8)
    DataValidator.validate_image_batch(batch, resolution=8)


def test_synthetic_dataset_is_reproducible(dataset):
    """Test an image depends only on the scene and index"""
    other = SyntheticDataset(SyntheticScene(seed=2), count=5, resolution=8,
                             pose_dist=PoseDistribution(), order_seed=9)
    np.testing.assert_array_equal(dataset.get_image(3), other.get_image(3))


def test_dataset_state_restores_position(dataset):
    """Test a restored handle continues with the same indices"""
    dataset.next_indices(3)
    saved = dataset.state_dict()
    expected = dataset.next_indices(6)
    restored = SyntheticDataset(SyntheticScene(seed=2), count=5, resolution=8,
                                pose_dist=PoseDistribution(), order_seed=1)
    restored.load_state_dict(saved)
    assert restored.next_indices(6) == expected


def test_synthetic_dataset_rejects_empty():
    """Test count must be positive"""
    with pytest.raises(EmptyDatasetError, match="count"):
        SyntheticDataset(SyntheticScene(), count=0, resolution=8, pose_dist=PoseDistribution())


def test_folder_dataset_skips_unreadable(png_folder, capsys):
    """Test corrupt files are skipped with a warning"""
    data = FolderDataset(png_folder, resolution=4)
    assert len(data) == 2
    assert data.get_image(0).shape == (3, 4, 4)
    assert "Warning" in capsys.readouterr().out


def test_folder_dataset_errors(tmp_path):
    """Test missing and empty folders are rejected"""
    with pytest.raises(EmptyDatasetError, match="not found"):
        FolderDataset(tmp_path / "missing", resolution=8)
    (tmp_path / "empty").mkdir()
    with pytest.raises(EmptyDatasetError, match="no readable"):
        FolderDataset(tmp_path / "empty", resolution=8)


def test_folder_dataset_rejects_invalid_images(png_folder, monkeypatch):
    """Test decoded images that are not RGB or leave [0, 1] fail the load"""
    monkeypatch.setattr(data_loader, "load_png", lambda path, resolution: np.zeros((2, 4, 4)))
    with pytest.raises(DataValidationError, match=r"broken\.png: expected \[B, 3, H, W\]"):
        FolderDataset(png_folder, resolution=4)
    monkeypatch.setattr(data_loader, "load_png", lambda path, resolution: np.full((3, 4, 4), 1.5))
    with pytest.raises(DataValidationError, match=r"\[0, 1\]"):
        FolderDataset(png_folder, resolution=4)


def test_png_round_trip(tmp_path, rng):
    """Test saving and loading a linear image loses only quantization"""
    image = rng.uniform(0, 1, (3, 6, 6))
    loaded = load_png(save_png(tmp_path / "x.png", image))
    assert loaded.shape == (3, 6, 6)
    np.testing.assert_allclose(loaded, image, atol=0.01)


def test_srgb_transfer_inverts(rng):
    """Test the sRGB curve and its inverse"""
    x = rng.uniform(0, 1, 100)
    np.testing.assert_allclose(linear_to_srgb(srgb_to_linear(x)), x, atol=1e-9)
    assert linear_to_srgb(np.array([0.0, 1.0])).tolist() == pytest.approx([0.0, 1.0])


def test_area_downsample():
    """Test block averaging and indivisible sizes"""
    images = np.arange(16, dtype=np.float64).reshape(1, 1, 4, 4)
    np.testing.assert_allclose(area_downsample(images, 2)[0, 0], [[2.5, 4.5], [10.5, 12.5]])
    assert area_downsample(images, 4) is images
    with pytest.raises(ValueError, match="area-downsample"):
        area_downsample(np.zeros((3, 6, 6)), 4)


def test_make_grid_and_colorize(rng):
    """Test tiled grid size and colormap output"""
    grid = make_grid([rng.uniform(0, 1, (3, 4, 4)) for _ in range(3)], per_row=2, pad=1)
    assert grid.shape == (3, 11, 11)
    with pytest.raises(ValueError, match="at least one"):
        make_grid([])
    colored = colorize(rng.uniform(0, 2, (5, 6)))
    assert colored.shape == (3, 5, 6)
    assert colored.min() >= 0.0 and colored.max() <= 1.0


def test_validate_image_batch_errors():
    """Test each rejected batch shape and value"""
    with pytest.raises(DataValidationError, match=r"\[B, 3, H, W\]"):
        DataValidator.validate_image_batch(np.zeros((2, 4, 8, 8)))
    with pytest.raises(DataValidationError, match="empty"):
        DataValidator.validate_image_batch(np.zeros((0, 3, 8, 8)))
    with pytest.raises(DataValidationError, match="4x4"):
        DataValidator.validate_image_batch(np.zeros((1, 3, 8, 8)), resolution=4)
    bad = np.zeros((1, 3, 2, 2))
    bad[0, 0, 0, 0] = np.nan
    with pytest.raises(DataValidationError, match="NaN"):
        DataValidator.validate_image_batch(bad)
    with pytest.raises(DataValidationError, match=r"\[0, 1\]"):
        DataValidator.validate_image_batch(np.full((1, 3, 2, 2), 1.5))
