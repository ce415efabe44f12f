import numpy as np
import pytest

from resistnet import InputError, Signature, is_psd, pseudoinverse, signature_of, spectral_norm


def test_signature_of_diagonal():
    sig = signature_of(np.diag([2.0, -1.0, 0.0, 5.0]))
    assert sig.as_tuple() == (2, 1, 1)
    assert sig == Signature(2, 1, 1)


def test_signature_empty_matrix():
    assert signature_of(np.zeros((0, 0))).as_tuple() == (0, 0, 0)


def test_signature_invariant_under_congruence():
    # Sylvester: s(A) == s(C^T A C) for invertible C
    rng = np.random.default_rng(41)
    for _ in range(40):
        n = int(rng.integers(2, 7))
        d = rng.uniform(-2, 2, n)
        d[np.abs(d) < 0.1] = 0.0
        A = np.diag(d)
        while True:
            C = rng.normal(size=(n, n))
            if abs(np.linalg.det(C)) > 1e-3:
                break
        Q = np.linalg.qr(rng.normal(size=(n, n)))[0]
        A = Q @ A @ Q.T
        B = C.T @ A @ C
        assert signature_of(B).as_tuple() == signature_of(A).as_tuple()


def test_signature_zero_threshold_is_relative():
    A = np.diag([1e8, 1e8, 0.0])
    assert signature_of(A).as_tuple() == (2, 0, 1)
    # absolute magnitude does not change the zero count
    assert signature_of(A * 1e-12).as_tuple() == (2, 0, 1)


def test_signature_rejects_bad_matrices():
    with pytest.raises(InputError):
        signature_of(np.ones((2, 3)))
    with pytest.raises(InputError):
        signature_of(np.array([[0.0, 1.0], [2.0, 0.0]]))
    with pytest.raises(InputError):
        signature_of(np.array([[np.nan]]))


def test_pseudoinverse_moore_penrose_axioms():
    rng = np.random.default_rng(43)
    for _ in range(25):
        n = int(rng.integers(2, 7))
        r = int(rng.integers(1, n))
        B = rng.normal(size=(n, r))
        A = B @ B.T  # symmetric PSD, rank <= r
        P = pseudoinverse(A)
        assert np.allclose(A @ P @ A, A, atol=1e-8)
        assert np.allclose(P @ A @ P, P, atol=1e-8)
        assert np.allclose((A @ P).T, A @ P, atol=1e-8)
        assert np.allclose((P @ A).T, P @ A, atol=1e-8)
        assert np.allclose(P, np.linalg.pinv(A), atol=1e-8)


def test_spectral_norm_matches_svd():
    rng = np.random.default_rng(47)
    for _ in range(20):
        A = rng.normal(size=(int(rng.integers(1, 6)), int(rng.integers(1, 6))))
        assert spectral_norm(A) == pytest.approx(np.linalg.svd(A, compute_uv=False)[0])


def test_spectral_norm_complex_and_empty():
    Z = np.array([[1 + 1j]])
    assert spectral_norm(Z) == pytest.approx(np.sqrt(2.0))
    assert spectral_norm(np.zeros((0, 0))) == 0.0


def test_is_psd():
    assert is_psd(np.diag([1.0, 0.0]))
    assert not is_psd(np.diag([1.0, -1e-6]))
    # tiny negative within the relative threshold counts as zero
    assert is_psd(np.diag([1.0, -1e-12]))
