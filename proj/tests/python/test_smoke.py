import numpy as np
import pytest

try:
    import scisim as m
except ImportError:
    import _scisim as m


def test_forward_matches_hand_computation():
    cube = np.asfortranarray(np.arange(8, dtype=float).reshape(2, 2, 2, order="F"))
    masks = np.asfortranarray(np.ones((2, 2, 2)))
    y = m.forward(cube, masks)
    assert y.shape == (2, 2)
    np.testing.assert_allclose(y, cube[:, :, 0] + cube[:, :, 1])


def test_adjoint_identity():
    rng = np.random.default_rng(0)
    masks = m.make_masks("gaussian", 6, 5, 3, 0.0, seed=1)
    x = np.asfortranarray(rng.standard_normal((6, 5, 3)))
    y = np.asfortranarray(rng.standard_normal((6, 5)))
    lhs = np.sum(m.forward(x, masks) * y)
    rhs = np.sum(x * m.adjoint(y, masks))
    assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs))


def test_reconstruct_beats_lsq():
    truth = m.make_scene("moving-square", 32, 32, 8, seed=3)
    masks = m.make_masks("bernoulli", 32, 32, 8, 0.5, seed=4)
    # keep every measurement pixel alive
    dead = masks.sum(axis=2) == 0
    masks[:, :, 0][dead] = 1.0
    y = m.forward(truth, masks)
    lsq = m.reconstruct(y, masks, solver="lsq")
    gap = m.reconstruct(y, masks, solver="gap-tv", iters=60)
    assert m.psnr(truth, gap) >= m.psnr(truth, lsq) + 3.0
    assert 0.0 < m.ssim(truth, gap) <= 1.0


def test_masks_deterministic():
    a = m.make_masks("bernoulli", 8, 8, 2, 0.5, seed=7)
    b = m.make_masks("bernoulli", 8, 8, 2, 0.5, seed=7)
    np.testing.assert_array_equal(a, b)
    assert set(np.unique(a)) <= {0.0, 1.0}


def test_cassi_widens_the_detector():
    cube = m.make_scene("smooth-field", 8, 8, 4, seed=1)
    masks = m.make_masks("bernoulli", 8, 8, 4, 0.5, seed=2)
    y = m.forward(cube, masks, mode="cassi", dispersion_step=1)
    assert y.shape == (8, 11)


def test_tv_denoise_shrinks_noise():
    truth = m.make_scene("smooth-field", 32, 32, 2, seed=5)
    noisy = truth + 0.05 * np.random.default_rng(6).standard_normal(truth.shape)
    den = m.tv_denoise(np.asfortranarray(noisy), 0.05, iters=20)
    assert m.psnr(truth, den) > m.psnr(truth, np.asfortranarray(noisy))


def test_theorem_check_dict():
    rep = m.theorem_check(nx=4, ny=4, nt=2, levels=2, trials=20, epsilon=1.0, seed=9)
    assert rep["trials"] == 20
    assert rep["vacuous"] is True
    assert rep["pass"] is True
    assert 0.0 <= rep["success_frequency"] <= 1.0


def test_scit_roundtrip(tmp_path):
    cube = m.make_scene("moving-blob", 6, 7, 3, seed=2)
    path = str(tmp_path / "cube.scit")
    m.write_scit(path, cube)
    np.testing.assert_array_equal(m.read_scit(path), cube)


def test_errors_surface_as_python_exceptions():
    with pytest.raises(ValueError):
        m.make_scene("no-such-scene", 8, 8, 2)
    with pytest.raises(ArithmeticError):
        masks = np.asfortranarray(np.zeros((4, 4, 2)))
        y = np.asfortranarray(np.zeros((4, 4)))
        m.least_squares_init(y, masks)
