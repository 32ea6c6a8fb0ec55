import numpy as np
import pytest

from conftest import rel_err
from rubiconv import count_ops, dft_matrix, elementwise_mul, gemm, naive_dft


def test_dft_matrix_identity_case():
    assert np.array_equal(dft_matrix(1), np.array([[1.0 + 0j]]))


def test_dft_matrix_size_two():
    assert np.allclose(dft_matrix(2), np.array([[1, 1], [1, -1]]), atol=1e-15)


def test_dft_matrix_size_four_row_one():
    # Positive-exponent convention: powers of w_4 = +i.
    assert np.allclose(dft_matrix(4)[1], np.array([1, 1j, -1, -1j]), atol=1e-15)


def test_dft_matrix_rejects_zero():
    with pytest.raises(ValueError):
        dft_matrix(0)


@pytest.mark.parametrize("n", [1, 2, 3, 5, 8, 16, 31, 32, 100])
def test_dft_matrix_matches_naive_dft(n):
    rng = np.random.default_rng(n)
    x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    assert rel_err(dft_matrix(n) @ x, naive_dft(x)) <= 1e-12


@pytest.mark.parametrize("n", [1, 2, 7, 16, 64, 257])
def test_inverse_via_conjugation(n):
    # (1/n) * conj(F_n conj(x)) must invert F_n x.
    rng = np.random.default_rng(n + 1)
    x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    f = dft_matrix(n)
    back = np.conj(f @ np.conj(f @ x)) / n
    assert rel_err(back, x) <= 1e-10


def test_naive_dft_constant_signal():
    assert np.allclose(naive_dft([1, 1, 1, 1]), [4, 0, 0, 0], atol=1e-14)


def test_naive_dft_delta():
    assert np.allclose(naive_dft([1, 0]), [1, 1], atol=1e-15)


def test_naive_dft_shifted_delta():
    assert np.allclose(naive_dft([0, 1, 0, 0]), [1, 1j, -1, -1j], atol=1e-14)


def test_naive_dft_rejects_empty():
    with pytest.raises(ValueError):
        naive_dft(np.array([]))


@pytest.mark.parametrize("mode", ["standard", "karatsuba"])
def test_gemm_single_complex_product(mode):
    out = gemm(np.array([[1 + 2j]]), np.array([[3 + 4j]]), mode)
    assert np.allclose(out, [[-5 + 10j]], atol=1e-15)


def test_gemm_identity():
    rng = np.random.default_rng(3)
    a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    assert rel_err(gemm(a, np.eye(4)), a) <= 1e-15


def test_gemm_shape_mismatch():
    with pytest.raises(ValueError):
        gemm(np.ones((2, 3)), np.ones((2, 2)))


def test_gemm_unknown_mode():
    with pytest.raises(ValueError):
        gemm(np.ones((2, 2)), np.ones((2, 2)), mode="strassen")


def test_karatsuba_agrees_with_standard_8x8():
    rng = np.random.default_rng(8)
    a = rng.uniform(-1, 1, (8, 8)) + 1j * rng.uniform(-1, 1, (8, 8))
    b = rng.uniform(-1, 1, (8, 8)) + 1j * rng.uniform(-1, 1, (8, 8))
    assert rel_err(gemm(a, b, "karatsuba"), gemm(a, b, "standard")) <= 1e-12


@pytest.mark.parametrize("n", [1, 3, 16, 64, 128, 256])
def test_karatsuba_agrees_with_standard_up_to_256(n):
    rng = np.random.default_rng(1000 + n)
    a = rng.uniform(-1, 1, (n, n)) + 1j * rng.uniform(-1, 1, (n, n))
    b = rng.uniform(-1, 1, (n, n)) + 1j * rng.uniform(-1, 1, (n, n))
    assert rel_err(gemm(a, b, "karatsuba"), gemm(a, b, "standard")) <= 1e-12


def test_gemm_real_multiplication_counts():
    rng = np.random.default_rng(5)
    a = rng.standard_normal((3, 4)) + 1j * rng.standard_normal((3, 4))
    b = rng.standard_normal((4, 5)) + 1j * rng.standard_normal((4, 5))
    products = 3 * 4 * 5
    with count_ops() as standard:
        gemm(a, b, "standard")
    with count_ops() as karatsuba:
        gemm(a, b, "karatsuba")
    assert standard.complex_muls == karatsuba.complex_muls == products
    assert standard.real_muls == 4 * products
    assert karatsuba.real_muls == 3 * products


def test_elementwise_zero_absorber():
    out = elementwise_mul(np.array([[1.0, 2.0]]), np.array([[0.0, 0.0]]))
    assert np.array_equal(out, np.array([[0.0 + 0j, 0.0 + 0j]]))


def test_elementwise_conjugate_product():
    out = elementwise_mul(np.array([[1 + 1j]]), np.array([[1 - 1j]]))
    assert np.allclose(out, [[2.0]], atol=1e-15)


def test_elementwise_ones_identity():
    rng = np.random.default_rng(7)
    a = rng.standard_normal((3, 5)) + 1j * rng.standard_normal((3, 5))
    assert np.array_equal(elementwise_mul(a, np.ones((3, 5))), a)


def test_elementwise_shape_mismatch():
    with pytest.raises(ValueError):
        elementwise_mul(np.ones((2, 2)), np.ones((2, 3)))
