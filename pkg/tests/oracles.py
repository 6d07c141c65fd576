"""Independent reference computations used by the tests.

None of these go through the code path they check.
"""

import cmath
import math

import numpy as np


def szego_values(alpha, z):
    """(phi_n(z), phi_n^*(z)) by running the recursion on values, not coefficients."""
    phi = np.ones_like(z, dtype=complex)
    phis = np.ones_like(z, dtype=complex)
    for a in alpha:
        rho = math.sqrt(1 - abs(a) ** 2)
        phi, phis = (z * phi - np.conj(a) * phis) / rho, (phis - a * z * phi) / rho
    return phi, phis


def gram_schmidt_on_circle(weight, degree, points=8192):
    """Orthonormalise 1, z, ..., z^degree against weight(theta) dtheta/2pi.

    Returns the monomial coefficients of each orthonormal polynomial.
    """
    theta = 2 * np.pi * np.arange(points) / points
    w = weight(theta)
    z = np.exp(1j * theta)

    def ip(p, q):
        return np.mean(p * np.conj(q) * w)

    basis = []
    coeffs = []
    for k in range(degree + 1):
        v = z**k
        c = np.zeros(degree + 1, dtype=complex)
        c[k] = 1
        for b, cb in zip(basis, coeffs):
            proj = ip(v, b)
            v = v - proj * b
            c = c - proj * cb
        nrm = math.sqrt(ip(v, v).real)
        basis.append(v / nrm)
        coeffs.append(c / nrm)
    return coeffs


def dft_coefficients(f, m, points=64):
    """c_k with f(t) = sum_k c_k e^{-ikt}, |k| <= m, via a plain DFT."""
    t = 2 * np.pi * np.arange(points) / points
    vals = f(t)
    return {k: np.mean(vals * np.exp(1j * k * t)) for k in range(-m, m + 1)}


def one_step_density(a, theta):
    """Closed form for the Bernstein-Szego density of the single coefficient a."""
    return (1 - abs(a) ** 2) / abs(1 - np.conj(a) * np.exp(1j * theta)) ** 2


def trapezoid_circle(f, points):
    t = 2 * np.pi * np.arange(points) / points
    return float(np.mean(f(t)))


def direct_pruefer_log_r(alpha, eta):
    """log r_N from the definition phi_N(e^{i eta}) = r_N e^{i(N eta + theta_N)}."""
    phi, _ = szego_values(alpha, np.array([cmath.exp(1j * eta)]))
    return math.log(abs(phi[0]))
