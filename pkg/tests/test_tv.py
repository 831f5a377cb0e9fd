import numpy as np
import pytest

from seqrecon.tv import TVOperator


@pytest.mark.parametrize("boundary", ["periodic", "replicate"])
def test_adjoint_identity(boundary):
    tv = TVOperator(boundary)
    rng = np.random.default_rng(0)
    x = rng.normal(size=(7, 7))
    y = rng.normal(size=(2, 7, 7))
    lhs = np.sum(tv.apply(x) * y)
    rhs = np.sum(x * tv.adjoint(y))
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_constant_image_has_zero_differences():
    tv = TVOperator()
    assert np.all(tv.apply(np.full((5, 5), 3.2)) == 0)


def test_apply_known_values():
    tv = TVOperator("periodic")
    x = np.array([[0.0, 1.0], [2.0, 3.0]])
    d = tv.apply(x)
    np.testing.assert_array_equal(d[0], [[1, -1], [1, -1]])   # horizontal
    np.testing.assert_array_equal(d[1], [[2, 2], [-2, -2]])   # vertical


def test_replicate_zeroes_last_slice():
    tv = TVOperator("replicate")
    rng = np.random.default_rng(1)
    d = tv.apply(rng.normal(size=(6, 6)))
    assert np.all(d[0][:, -1] == 0)
    assert np.all(d[1][-1, :] == 0)


def test_batch_semantics_match_per_frame():
    tv = TVOperator()
    rng = np.random.default_rng(2)
    stack = rng.normal(size=(3, 5, 5))
    batched = tv.apply(stack)
    assert batched.shape == (3, 2, 5, 5)
    for j in range(3):
        np.testing.assert_array_equal(batched[j], tv.apply(stack[j]))
    back = tv.adjoint(batched)
    assert back.shape == (3, 5, 5)
    for j in range(3):
        np.testing.assert_array_equal(back[j], tv.adjoint(batched[j]))


def test_normal_eigs_diagonalize_normal_operator():
    tv = TVOperator("periodic")
    n = 8
    lam = tv.normal_eigs(n)
    rng = np.random.default_rng(3)
    x = rng.normal(size=(n, n))
    lhs = np.fft.fft2(tv.adjoint(tv.apply(x)))
    rhs = lam * np.fft.fft2(x)
    np.testing.assert_allclose(lhs, rhs, atol=1e-10)


def test_normal_eigs_values():
    lam = TVOperator().normal_eigs(4)
    assert lam[0, 0] == 0.0
    assert lam[2, 2] == pytest.approx(8.0)  # both axes at Nyquist
    assert lam.max() == pytest.approx(8.0)


def test_normal_eigs_requires_periodic():
    with pytest.raises(ValueError):
        TVOperator("replicate").normal_eigs(4)


def test_rejects_unknown_boundary():
    with pytest.raises(ValueError):
        TVOperator("mirror")


def test_apply_rejects_1d():
    with pytest.raises(ValueError):
        TVOperator().apply(np.zeros(4))


def test_adjoint_rejects_bad_stack():
    with pytest.raises(ValueError):
        TVOperator().adjoint(np.zeros((3, 4, 4)))
