"""Tests for re-projection, MRF and adversarial objectives"""

import math

import numpy as np
import pytest

from src.engine import Tensor, precision
from src.objectives import (
    COMPONENTS,
    LOG_COLUMNS,
    LossReport,
    gan_d_loss,
    gan_g_loss,
    image_reproj_loss,
    mrf_loss,
    r1_penalty,
    ssim,
)


@pytest.fixture
def images(rng):
    """Two random 3x8x8 images in [0, 1]"""
    return rng.uniform(0, 1, (3, 8, 8)), rng.uniform(0, 1, (3, 8, 8))


def test_ssim_of_identical_images_is_one(images):
    """Test ssim(a, a) = 1 everywhere"""
    a, _ = images
    np.testing.assert_allclose(ssim(a, a).data, 1.0, atol=1e-5)


def test_ssim_is_bounded_and_symmetric(images):
    """Test SSIM stays in [-1, 1] and ignores argument order"""
    a, b = images
    s_ab, s_ba = ssim(a, b).data, ssim(b, a).data
    assert np.all((s_ab >= -1.0) & (s_ab <= 1.0))
    np.testing.assert_allclose(s_ab, s_ba, atol=1e-6)
    assert s_ab.mean() < 0.9


def test_reproj_loss_of_identical_images_is_zero(images):
    """Test L_ir(a, a) = 0"""
    a, _ = images
    assert image_reproj_loss(a, a, np.ones((8, 8), dtype=bool)).item() == pytest.approx(
        0.0, abs=1e-6
    )


def test_reproj_loss_l1_only_is_masked_mean():
    """Test mu = 0 gives the mean absolute difference over valid pixels"""
    a = np.zeros((3, 4, 4))
    b = np.zeros((3, 4, 4))
    b[:, 0, 0] = 0.6
    b[:, 3, 3] = 5.0  # outside the mask
    valid = np.ones((4, 4), dtype=bool)
    valid[3, 3] = False
    loss = image_reproj_loss(a, b, valid, mu=0.0)
    assert loss.item() == pytest.approx(0.6 / 15, rel=1e-5)


def test_reproj_loss_empty_mask_warns(images, capsys):
    """Test an empty mask gives zero and prints a warning"""
    a, b = images
    loss = image_reproj_loss(a, b, np.zeros((8, 8), dtype=bool))
    assert loss.item() == 0.0
    assert "Warning" in capsys.readouterr().out


def test_reproj_loss_gradient(gradcheck, rng):
    """Test the re-projection loss against central differences"""
    valid = rng.random((5, 5)) > 0.3
    gradcheck(lambda a, b: image_reproj_loss(a, b, valid), rng.uniform(0.2, 0.8, (3, 5, 5)),
              rng.uniform(0.2, 0.8, (3, 5, 5)))


def test_mrf_scale_and_permutation_invariance(rng):
    """Test the MRF loss ignores feature scale and the order of locations"""
    f_pri = rng.standard_normal((6, 5, 5))
    f_warp = f_pri + 0.3 * rng.standard_normal((6, 5, 5))
    valid = np.ones((5, 5), dtype=bool)
    perm = rng.permutation(25)

    def permuted(f):
        return f.reshape(6, 25)[:, perm].reshape(6, 5, 5)

    with precision("float64"):
        base = mrf_loss(f_pri, f_warp, valid).item()
        scaled = mrf_loss(f_pri * 3.0, f_warp * 0.5, valid).item()
        shuffled = mrf_loss(permuted(f_pri), permuted(f_warp), valid).item()
    assert base >= 0.0
    assert scaled == pytest.approx(base, abs=1e-6)
    assert shuffled == pytest.approx(base, abs=1e-6)


def test_mrf_prefers_matching_features(rng):
    """Test warped features equal to the primary score lower than unrelated ones"""
    f_pri = rng.standard_normal((6, 4, 4))
    valid = np.ones((4, 4), dtype=bool)
    with precision("float64"):
        same = mrf_loss(f_pri, f_pri, valid).item()
        other = mrf_loss(f_pri, rng.standard_normal((6, 4, 4)), valid).item()
    assert same < other


def test_mrf_batch_is_mean_of_samples(rng):
    """Test batched input averages the per-sample losses"""
    f = rng.standard_normal((2, 4, 3, 3))
    g = rng.standard_normal((2, 4, 3, 3))
    valid = np.ones((2, 3, 3), dtype=bool)
    with precision("float64"):
        batched = mrf_loss(f, g, valid).item()
        single = [mrf_loss(f[i], g[i], valid[i]).item() for i in range(2)]
    assert batched == pytest.approx(np.mean(single), rel=1e-9)


def test_mrf_needs_two_valid_locations(rng):
    """Test masks with fewer than two valid locations are rejected"""
    valid = np.zeros((3, 3), dtype=bool)
    valid[1, 1] = True
    with pytest.raises(ValueError, match="at least 2"):
        mrf_loss(rng.standard_normal((4, 3, 3)), rng.standard_normal((4, 3, 3)), valid)


def test_mrf_gradient(gradcheck, rng):
    """Test the MRF loss against central differences"""
    valid = np.ones((3, 3), dtype=bool)
    valid[0, 2] = False
    gradcheck(lambda f, g: mrf_loss(f, g, valid), rng.standard_normal((4, 3, 3)),
              rng.standard_normal((4, 3, 3)), rtol=1e-3)


def test_mrf_pools_large_maps(rng):
    """Test maps larger than the matching window are pooled before matching"""
    f = rng.standard_normal((2, 64, 64))
    loss = mrf_loss(f, f, np.ones((64, 64), dtype=bool))
    assert math.isfinite(loss.item())


def test_gan_losses_at_zero_logits():
    """Test both GAN losses at zero logits equal log 2 per term"""
    zeros = Tensor(np.zeros((4, 1)))
    assert gan_d_loss(zeros, zeros).item() == pytest.approx(2 * np.log(2.0), rel=1e-6)
    assert gan_g_loss(zeros).item() == pytest.approx(np.log(2.0), rel=1e-6)
    assert gan_g_loss(zeros, Tensor(0.5), 2.0).item() == pytest.approx(np.log(2.0) + 1.0,
                                                                       rel=1e-6)


def test_gan_d_loss_adds_weighted_r1():
    """Test the R1 term enters with weight lambda"""
    zeros = Tensor(np.zeros(2))
    loss = gan_d_loss(zeros, zeros, Tensor([1.0, 3.0]), lambda_r1=10.0)
    assert loss.item() == pytest.approx(2 * np.log(2.0) + 20.0, rel=1e-6)


def test_r1_of_constant_discriminator_is_zero(rng):
    """Test a discriminator that ignores its input has no penalty"""
    real = rng.uniform(-1, 1, (3, 3, 4, 4))
    r1 = r1_penalty(lambda x: (x * 0.0).sum(axis=(1, 2, 3)) + 1.0, real)
    np.testing.assert_allclose(r1.data, 0.0)


def test_r1_of_linear_head(rng):
    """Test the penalty of D(x) = <a, x> is |a|^2 with parameter gradient 2a"""
    real = rng.uniform(-1, 1, (2, 3, 2, 2))
    a = Tensor(rng.standard_normal((3, 2, 2)), requires_grad=True)

    def score(x):
        return (x * a).sum(axis=(1, 2, 3))

    r1 = r1_penalty(score, real, [a])
    expected = float((a.data.astype(np.float64) ** 2).sum())
    np.testing.assert_allclose(r1.data, [expected, expected], rtol=1e-5)

    r1.mean().backward()
    np.testing.assert_allclose(a.grad, 2.0 * a.data, rtol=1e-4, atol=1e-6)


def test_r1_is_measured_at_real_samples_only():
    """Test the penalty of a tagged real batch ignores the fake batch entirely"""
    real = np.full((2, 3, 4, 4), 2.0)
    fake = np.zeros((2, 3, 4, 4))

    def score(x):
        return (x * x).sum(axis=(1, 2, 3)) * 0.5

    # gradient of the head is x itself, so the penalty is sum(x^2) per sample
    r1 = r1_penalty(score, real)
    np.testing.assert_allclose(r1.data, [192.0, 192.0], rtol=1e-5)
    np.testing.assert_allclose(r1_penalty(score, fake).data, [0.0, 0.0], atol=1e-12)


def test_r1_parameter_gradient_matches_finite_differences(rng):
    """Test the mixed second derivative of a nonlinear head"""
    real = rng.uniform(-1, 1, (3, 2, 2, 2))
    a0 = rng.uniform(-0.5, 0.5, 8)

    def penalty(values, requires_grad=False):
        a = Tensor(values, requires_grad=requires_grad)

        def score(x):
            return (x.reshape(x.shape[0], -1) @ a.reshape(-1, 1)).tanh()

        return a, r1_penalty(score, real, [a]).mean()

    with precision("float64"):
        a, loss = penalty(a0.copy(), requires_grad=True)
        loss.backward()
        eps = 1e-6
        numeric = np.zeros_like(a0)
        for i in range(a0.size):
            plus, minus = a0.copy(), a0.copy()
            plus[i] += eps
            minus[i] -= eps
            numeric[i] = (penalty(plus)[1].item() - penalty(minus)[1].item()) / (2 * eps)
    np.testing.assert_allclose(a.grad, numeric, rtol=1e-3, atol=1e-6)


def test_loss_report_total_and_row():
    """Test the total combines active components and the row leaves others empty"""
    report = LossReport.build(
        step=4, stage=1,
        components={"g_adv": 1.0, "d_adv": 2.0, "r1": 0.1, "reproj": 0.5},
        eta=0.25, valid_fraction=0.8, lambda_r1=10.0, reproj_weight=2.0,
    )
    assert report.total == pytest.approx(1.0 + 2.0 + 1.0 + 1.0)
    assert report.is_finite()
    row = report.to_row()
    assert list(row) == list(LOG_COLUMNS)
    assert math.isnan(row["mrf"])
    assert row["eta"] == 0.25


def test_loss_report_rejects_unknown_component():
    """Test only the known loss components are accepted"""
    with pytest.raises(ValueError, match="Unknown loss components"):
        LossReport.build(1, 1, {"perceptual": 1.0}, 1.0, 1.0, 10.0)
    assert set(COMPONENTS) == {"g_adv", "d_adv", "r1", "reproj", "mrf"}


def test_loss_report_detects_nonfinite():
    """Test NaN components make the report non-finite"""
    report = LossReport.build(1, 2, {"mrf": float("nan")}, 1.0, 0.5, 10.0)
    assert not report.is_finite()
