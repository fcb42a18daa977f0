"""Finite-difference weight and derivative-matrix checks.

Oracles: analytic derivatives of polynomials (which the stencils must
reproduce exactly up to their design degree) and of trigonometric fields
(which expose the convergence order).
"""

import numpy as np

from mcf4d.stencils import axis_derivative, derivative_matrix, fd_weights


def test_fd_weights_central_first_derivative():
    x = np.arange(-2.0, 3.0)
    w = fd_weights(0.0, x, 1)[1]
    np.testing.assert_allclose(w, np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0,
                               atol=1e-14)


def test_fd_weights_central_second_derivative():
    x = np.arange(-2.0, 3.0)
    w = fd_weights(0.0, x, 2)[2]
    np.testing.assert_allclose(
        w, np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0, atol=1e-13)


def test_fd_weights_reproduce_polynomial_derivatives():
    # Six arbitrary nodes determine degree-5 interpolation exactly.
    x = np.array([-1.3, -0.4, 0.1, 0.8, 1.7, 2.2])
    z = 0.35
    for m in (1, 2):
        w = fd_weights(z, x, m)[m]
        for k in range(6):
            poly = np.zeros(6)
            poly[k] = 1.0
            deriv = np.polyder(np.poly1d(poly[::-1]), m)(z)
            assert abs(w @ x ** k - deriv) < 1e-10 * max(1.0, abs(deriv))


def test_derivative_matrix_is_cached():
    a = derivative_matrix(32, 0.1, True, 1)
    b = derivative_matrix(32, 0.1, True, 1)
    assert a is b


def test_clamped_matrix_exact_on_quartics():
    n, h = 16, 0.37
    x = np.arange(n) * h
    f = 2.0 - x + 0.5 * x ** 2 + 0.25 * x ** 3 - 0.125 * x ** 4
    d1 = -1.0 + x + 0.75 * x ** 2 - 0.5 * x ** 3
    d2 = 1.0 + 1.5 * x - 1.5 * x ** 2
    got1 = derivative_matrix(n, h, False, 1) @ f
    got2 = derivative_matrix(n, h, False, 2) @ f
    np.testing.assert_allclose(got1, d1, atol=1e-9)
    np.testing.assert_allclose(got2, d2, atol=1e-8)


def test_periodic_matrix_fourth_order_on_sine():
    errs = []
    for n in (32, 64):
        h = 2.0 * np.pi / n
        x = np.arange(n) * h
        err1 = np.abs(derivative_matrix(n, h, True, 1) @ np.sin(x)
                      - np.cos(x)).max()
        err2 = np.abs(derivative_matrix(n, h, True, 2) @ np.sin(x)
                      + np.sin(x)).max()
        errs.append((err1, err2))
    for k in range(2):
        ratio = errs[0][k] / errs[1][k]
        assert 12.0 < ratio < 20.0, f"order-4 ratio off: {ratio}"


def test_axis_derivative_matches_matrix_on_both_axes():
    n1, n2, h1, h2 = 16, 24, 0.2, 0.3
    rng = np.random.default_rng(3)
    field = rng.standard_normal((n1, n2))
    m1 = derivative_matrix(n1, h1, True, 1)
    m2 = derivative_matrix(n2, h2, False, 2)
    got0 = axis_derivative(field, 0, n1, h1, True, 1)
    got1 = axis_derivative(field, 1, n2, h2, False, 2)
    np.testing.assert_allclose(got0, m1 @ field, atol=1e-12)
    np.testing.assert_allclose(got1, (m2 @ field.T).T, atol=1e-12)


def test_axis_derivative_handles_vector_fields():
    n = 16
    h = 2.0 * np.pi / n
    x = np.arange(n) * h
    field = np.stack([np.sin(x), np.cos(x)], axis=-1)[:, None, :]
    field = np.repeat(field, 8, axis=1)
    got = axis_derivative(field, 0, n, h, True, 1)
    expect = np.stack([np.cos(x), -np.sin(x)], axis=-1)[:, None, :]
    assert np.abs(got - expect).max() < 1e-3
