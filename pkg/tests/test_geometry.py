"""Tests for camera geometry and ray generation"""

import numpy as np
import pytest

from src.geometry import (
    CameraPose,
    GeometryError,
    Intrinsics,
    PoseDistribution,
    RigidTransform,
    camera_directions,
    generate_rays,
    intrinsics_from_fov,
    pixel_centers,
    pose_from_preset,
    pose_to_extrinsics,
    project,
    relative_transform,
    sample_pose,
    unproject,
)


@pytest.fixture
def K():
    """Unit-focal 2x2 intrinsics"""
    return Intrinsics(fx=1.0, fy=1.0, cx=1.0, cy=1.0, width=2, height=2)


def test_project_origin_axis_point(K):
    """Test a point on the optical axis lands on the principal point"""
    u, v, depth, valid = project(np.array([0.0, 0.0, -1.0]), K)
    assert u.item() == pytest.approx(1.0)
    assert v.item() == pytest.approx(1.0)
    assert depth.item() == pytest.approx(1.0)
    assert bool(valid)


def test_project_offset_point(K):
    """Test x = 1 at depth 2 moves u by fx / 2 and up moves v down"""
    u, v, _, _ = project(np.array([[1.0, 0.0, -2.0], [0.0, 1.0, -2.0]]), K)
    np.testing.assert_allclose(u.data, [1.5, 1.0])
    np.testing.assert_allclose(v.data, [1.0, 0.5])


def test_project_behind_camera_is_invalid(K):
    """Test points behind the camera are flagged"""
    _, _, _, valid = project(np.array([[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]]), K)
    assert valid.tolist() == [False, True]


def test_unproject_inverts_project(rng):
    """Test project(unproject(u, v, d)) returns (u, v, d)"""
    K = intrinsics_from_fov(30.0, 16)
    u = rng.uniform(0, 16, 20)
    v = rng.uniform(0, 16, 20)
    d = rng.uniform(0.5, 2.0, 20)
    with_points = unproject(u, v, d, K)
    pu, pv, pd, valid = project(with_points, K)
    assert valid.all()
    np.testing.assert_allclose(pu.data, u, atol=1e-4)
    np.testing.assert_allclose(pv.data, v, atol=1e-4)
    np.testing.assert_allclose(pd.data, d, atol=1e-5)


def test_intrinsics_from_fov():
    """Test focal length and principal point of a square image"""
    K = intrinsics_from_fov(90.0, 64)
    assert K.fx == pytest.approx(32.0)
    assert K.fy == pytest.approx(32.0)
    assert (K.cx, K.cy) == (32.0, 32.0)
    assert K.matrix.shape == (3, 3)


def test_intrinsics_scaled_keeps_fov():
    """Test rescaling intrinsics keeps the field of view"""
    K = intrinsics_from_fov(12.0, 32).scaled(64, 64)
    assert K.fx == pytest.approx(intrinsics_from_fov(12.0, 64).fx)


@pytest.mark.parametrize("fov", [0.0, 180.0, -5.0])
def test_intrinsics_from_fov_rejects_range(fov):
    """Test field of view outside (0, 180) raises"""
    with pytest.raises(GeometryError, match="fov_deg"):
        intrinsics_from_fov(fov, 8)


def test_intrinsics_rejects_nonpositive_focal():
    """Test zero focal lengths are rejected"""
    with pytest.raises(GeometryError, match="focal"):
        Intrinsics(fx=0.0, fy=1.0, cx=0.0, cy=0.0, width=2, height=2)


def test_pose_rejects_vertical_pitch():
    """Test |pitch| must stay below pi/2"""
    with pytest.raises(GeometryError, match="pitch"):
        CameraPose(pitch=np.pi / 2)


def test_frontal_pose_extrinsics():
    """Test the frontal camera sits on +z and looks at the origin"""
    pose = CameraPose(pitch=0.0, yaw=0.0, radius=1.0)
    np.testing.assert_allclose(pose.center, [0.0, 0.0, 1.0], atol=1e-12)
    T = pose_to_extrinsics(pose)
    assert T.is_valid()
    np.testing.assert_allclose(T.R, np.eye(3), atol=1e-12)
    # the origin is one unit in front of the camera
    np.testing.assert_allclose(T.apply(np.zeros(3)), [0.0, 0.0, -1.0], atol=1e-12)


@pytest.mark.parametrize("pitch, yaw", [(0.1, 0.3), (-0.3, -0.6), (0.4, 1.2)])
def test_extrinsics_are_rigid_and_look_at_origin(pitch, yaw):
    """Test R is a proper rotation and the origin lies on the optical axis"""
    T = pose_to_extrinsics(CameraPose(pitch=pitch, yaw=yaw, radius=1.3))
    assert T.is_valid()
    origin_cam = T.apply(np.zeros(3))
    np.testing.assert_allclose(origin_cam[:2], 0.0, atol=1e-12)
    assert origin_cam[2] == pytest.approx(-1.3)


def test_relative_transform_of_identical_poses_is_identity():
    """Test the relative transform between equal poses is the identity"""
    pose = CameraPose(pitch=0.1, yaw=0.2)
    T = relative_transform(pose, pose)
    np.testing.assert_allclose(T.R, np.eye(3), atol=1e-12)
    np.testing.assert_allclose(T.t, 0.0, atol=1e-12)


def test_relative_transform_maps_between_cameras(rng):
    """Test relative_transform agrees with going through world coordinates"""
    pri, aux = CameraPose(pitch=0.1, yaw=-0.2), CameraPose(pitch=-0.05, yaw=0.25)
    world = rng.uniform(-0.2, 0.2, (10, 3))
    pri_cam = pose_to_extrinsics(pri).apply(world)
    expected = pose_to_extrinsics(aux).apply(world)
    np.testing.assert_allclose(relative_transform(pri, aux).apply(pri_cam), expected, atol=1e-12)


def test_rigid_transform_inverse_and_compose(rng):
    """Test T o T^-1 is the identity"""
    T = pose_to_extrinsics(CameraPose(pitch=0.2, yaw=0.7, radius=2.0))
    points = rng.standard_normal((5, 3))
    np.testing.assert_allclose(T.inverse().apply(T.apply(points)), points, atol=1e-12)
    I = T.compose(T.inverse())
    np.testing.assert_allclose(I.R, np.eye(3), atol=1e-12)
    assert RigidTransform.identity().is_valid()


def test_pixel_centers_are_offset_by_half():
    """Test pixel centers sit at i + 0.5"""
    u, v = pixel_centers(Intrinsics(fx=1, fy=1, cx=1.5, cy=1, width=3, height=2))
    np.testing.assert_allclose(u[0], [0.5, 1.5, 2.5])
    np.testing.assert_allclose(v[:, 0], [0.5, 1.5])


def test_camera_directions_unit_and_axis_scale():
    """Test directions are unit vectors and z_scale is 1 / cos of the off-axis angle"""
    K = intrinsics_from_fov(40.0, 8)
    dirs, z_scale = camera_directions(K)
    np.testing.assert_allclose(np.linalg.norm(dirs, axis=-1), 1.0, atol=1e-12)
    np.testing.assert_allclose(-dirs[..., 2] * z_scale, 1.0, atol=1e-12)
    assert np.all(z_scale >= 1.0)


def test_generate_rays_midpoint_samples():
    """Test unjittered samples sit at bin centers and the last delta reaches far"""
    K = intrinsics_from_fov(12.0, 4)
    rays = generate_rays(K, CameraPose(), 0.9, 1.1, 4, stratified=False)
    assert rays.resolution == (4, 4)
    assert rays.n_samples == 4
    np.testing.assert_allclose(rays.sample_depths[0, 0], [0.925, 0.975, 1.025, 1.075])
    np.testing.assert_allclose(rays.deltas[0, 0], [0.05, 0.05, 0.05, 0.025], atol=1e-12)
    assert rays.points().shape == (4, 4, 4, 3)


def test_generate_rays_stratified_stays_in_bins(rng):
    """Test stratified depths stay ordered inside [near, far] with positive deltas"""
    K = intrinsics_from_fov(12.0, 4)
    rays = generate_rays(K, CameraPose(yaw=0.2), 0.88, 1.12, 12, rng)
    depths = rays.sample_depths
    assert depths.min() >= 0.88 and depths.max() <= 1.12
    assert np.all(np.diff(depths, axis=-1) > 0)
    assert np.all(rays.deltas > 0)


def test_ray_sample_axis_depth_matches_camera_depth():
    """Test a sample at axis depth d projects to camera depth d"""
    K = intrinsics_from_fov(30.0, 6)
    pose = CameraPose(pitch=0.1, yaw=0.3)
    rays = generate_rays(K, pose, 0.9, 1.1, 3, stratified=False)
    cam = pose_to_extrinsics(pose).apply(rays.points())
    np.testing.assert_allclose(-cam[..., 2], rays.sample_depths, atol=1e-10)


def test_generate_rays_argument_errors(rng):
    """Test invalid bounds, sample counts and missing generators are rejected"""
    K = intrinsics_from_fov(12.0, 4)
    with pytest.raises(GeometryError, match="near"):
        generate_rays(K, CameraPose(), 1.1, 0.9, 4, rng)
    with pytest.raises(GeometryError, match="n_samples"):
        generate_rays(K, CameraPose(), 0.9, 1.1, 0, rng)
    with pytest.raises(GeometryError, match="random generator"):
        generate_rays(K, CameraPose(), 0.9, 1.1, 4)


def test_pose_presets():
    """Test the named pose priors"""
    face = pose_from_preset("FFHQ", radius=1.0)
    assert (face.kind, face.h_spread, face.v_spread) == ("gaussian", 0.3, 0.155)
    cats = pose_from_preset("afhqv2")
    assert (cats.kind, cats.h_spread, cats.v_spread) == ("uniform", 0.4, 0.2)
    with pytest.raises(GeometryError, match="Unknown pose preset"):
        pose_from_preset("lsun")


def test_sample_pose_respects_bounds():
    """Test gaussian draws are clamped to three spreads and uniform draws to the range"""
    rng = np.random.default_rng(3)
    gaussian = PoseDistribution(kind="gaussian", h_spread=0.3, v_spread=0.155)
    uniform = PoseDistribution(kind="uniform", h_spread=0.4, v_spread=0.2)
    for _ in range(500):
        g = sample_pose(gaussian, rng)
        assert abs(g.yaw) <= 0.9 + 1e-12 and abs(g.pitch) <= 0.465 + 1e-12
        u = sample_pose(uniform, rng)
        assert abs(u.yaw) <= 0.4 and abs(u.pitch) <= 0.2


def test_sample_pose_is_seeded():
    """Test equal seeds give equal poses"""
    dist = PoseDistribution()
    a = sample_pose(dist, np.random.default_rng(7))
    b = sample_pose(dist, np.random.default_rng(7))
    assert a == b


def test_pose_distribution_rejects_bad_spreads():
    """Test non-positive spreads are rejected"""
    with pytest.raises(GeometryError, match="positive"):
        PoseDistribution(h_spread=0.0)


def test_pose_lerp_endpoints():
    """Test lerp returns its endpoints at t = 0 and 1"""
    a, b = CameraPose(pitch=0.1, yaw=-0.2), CameraPose(pitch=-0.1, yaw=0.4)
    assert a.lerp(b, 0.0) == a
    assert a.lerp(b, 1.0).yaw == pytest.approx(0.4)
    assert a.lerp(b, 0.5).yaw == pytest.approx(0.1)
