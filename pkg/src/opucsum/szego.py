"""Szego recursion in the monomial basis and Bernstein-Szego densities.

Coefficients grow like ``prod rho_j^-1`` and far faster in the middle of
the array, while ``|phi_n|`` on the circle stays moderate; evaluating from
doubles would lose most digits to cancellation.  Coefficients are therefore
kept in double-double (``phi + phi_lo``) and evaluated the same way.  The
module is meant for degrees up to about ``MAX_DEGREE``; longer sequences go
through :mod:`opucsum.pruefer`, which works with ``log |phi_n|`` directly.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _dd
from .verblunsky import VerblunskySequence

MAX_DEGREE = 2000


@dataclass(frozen=True)
class PolynomialPair:
    """``phi_n`` and ``phi_n^*`` as ascending monomial coefficient arrays.

    ``phi`` holds the coefficients rounded to complex128; ``phi_lo`` the
    remainders, so ``phi + phi_lo`` is the double-double value (zeros when the
    pair was built from plain doubles).
    """

    phi: np.ndarray
    phi_star: np.ndarray
    phi_lo: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.phi_lo is None:
            object.__setattr__(self, "phi_lo", np.zeros_like(self.phi, dtype=complex))

    @property
    def degree(self) -> int:
        return self.phi.size - 1

    @property
    def leading(self) -> complex:
        return complex(self.phi[-1])


def reverse(coeffs: np.ndarray) -> np.ndarray:
    """``z^n conj(p(1/conj z))`` in coefficient form: conjugate and reverse."""
    return np.conj(coeffs[::-1])


def initial_pair() -> PolynomialPair:
    one = np.ones(1, dtype=complex)
    return PolynomialPair(one, one.copy())


def szego_step(pair: PolynomialPair, alpha: complex) -> PolynomialPair:
    """``phi_{n+1} = (z phi_n - conj(alpha) phi_n^*) / rho``; ``phi_{n+1}^*`` by reversal."""
    alpha = complex(alpha)
    if abs(alpha) >= 1.0:
        raise ValueError(f"|alpha| = {abs(alpha)!r} is not < 1")
    rho = math.sqrt(1.0 - abs(alpha) ** 2)
    hi, lo = np.asarray(pair.phi, dtype=complex), np.asarray(pair.phi_lo, dtype=complex)
    out = _dd.szego_step(hi.real.copy(), hi.imag.copy(), lo.real.copy(), lo.imag.copy(),
                         alpha.real, alpha.imag, rho)
    phi = out[0] + 1j * out[1]
    return PolynomialPair(phi, reverse(phi), out[2] + 1j * out[3])


def szego_polynomials(seq: VerblunskySequence, n: int | None = None) -> PolynomialPair:
    """Run the recursion over the first ``n`` coefficients (default: all)."""
    n = len(seq) if n is None else n
    if n > MAX_DEGREE:
        raise ValueError(
            f"degree {n} exceeds MAX_DEGREE={MAX_DEGREE}; use opucsum.pruefer for long sequences"
        )
    pair = initial_pair()
    for k in range(n):
        pair = szego_step(pair, seq[k])
    return pair


def orthonormal_family(seq: VerblunskySequence, n: int) -> list[PolynomialPair]:
    """``[phi_0, ..., phi_n]`` for the first ``n`` coefficients."""
    pairs = [initial_pair()]
    for k in range(n):
        pairs.append(szego_step(pairs[-1], seq[k]))
    return pairs


def _horner(hi: np.ndarray, lo: np.ndarray, z: np.ndarray) -> np.ndarray:
    z = np.atleast_1d(z)
    return _dd.horner(hi.real.copy(), hi.imag.copy(), lo.real.copy(), lo.imag.copy(),
                      np.ascontiguousarray(z.real), np.ascontiguousarray(z.imag))


def evaluate_phi(pair: PolynomialPair, theta):
    """``phi_n(e^{i theta})`` alone; ``theta`` may be an array."""
    z = np.exp(1j * np.asarray(theta, dtype=float)).reshape(-1)
    phi = _horner(pair.phi, pair.phi_lo, z).reshape(np.shape(theta))
    return complex(phi) if np.ndim(theta) == 0 else phi


def evaluate_pair(pair: PolynomialPair, theta):
    """``(phi_n(e^{i theta}), phi_n^*(e^{i theta}))``; ``theta`` may be an array."""
    z = np.exp(1j * np.asarray(theta, dtype=float)).reshape(-1)
    shape = np.shape(theta)
    phi = _horner(pair.phi, pair.phi_lo, z).reshape(shape)
    phi_star = _horner(pair.phi_star, reverse(pair.phi_lo), z).reshape(shape)
    if np.ndim(theta) == 0:
        return complex(phi), complex(phi_star)
    return phi, phi_star


def bernstein_szego_density(seq: VerblunskySequence, theta):
    """``w_N(theta) = 1 / |phi_N(e^{i theta})|^2`` for the zero-extended sequence."""
    phi = evaluate_phi(szego_polynomials(seq), theta)
    w = 1.0 / np.abs(phi) ** 2
    return float(w) if np.ndim(theta) == 0 else w


def circle_grid(points: int) -> np.ndarray:
    return 2.0 * np.pi * np.arange(points) / points


def _gauss_panels(a: np.ndarray, b: np.ndarray, x: np.ndarray, wx: np.ndarray):
    half = 0.5 * (b - a)
    t = (0.5 * (a + b))[:, None] + half[:, None] * x[None, :]
    return t, half[:, None] * wx[None, :]


def gram_matrix(seq: VerblunskySequence, points: int | None = None, tol: float = 1e-13,
                order: int = 20, max_panels: int = 2**18) -> np.ndarray:
    """``G[i, j] = int phi_i conj(phi_j) w_N dtheta/2pi`` for ``i, j <= N``.

    ``w_N = 1/|phi_N|^2`` peaks sharply wherever a zero of ``phi_N`` comes
    close to the circle, which a uniform grid resolves only at a cost of order
    one over the distance.  The circle is cut into ``points / order``
    Gauss-Legendre panels (at least ``2(2N+1)`` nodes) and any panel whose
    halves change the weighted mass ``int w_N sum_i |phi_i|^2`` by more than
    ``tol`` times the total is bisected.
    """
    N = len(seq)
    minimum = 2 * (2 * N + 1)
    if points is None:
        points = max(4096, minimum)
    if points < minimum:
        raise ValueError(f"need at least {minimum} grid points, got {points}")
    fam = orthonormal_family(seq, N)
    x, wx = np.polynomial.legendre.leggauss(order)

    def sample(a, b):
        t, wt = _gauss_panels(a, b, x, wx)
        vals = np.array([evaluate_phi(p, t.ravel()) for p in fam])
        w = wt.ravel() / np.abs(vals[-1]) ** 2 / (2.0 * np.pi)
        mass = (np.sum(np.abs(vals) ** 2, axis=0) * w).reshape(t.shape).sum(axis=1)
        return vals, w, mass

    def accumulate(vals, w):
        return (vals * w) @ vals.conj().T

    n0 = -(-points // order)
    edges = 2.0 * np.pi * np.arange(n0 + 1) / n0
    a, b = edges[:-1], edges[1:]
    _, _, mass = sample(a, b)
    total = float(mass.sum())
    G = np.zeros((N + 1, N + 1), dtype=complex)
    panels = a.size
    while a.size:
        mid = 0.5 * (a + b)
        aa, bb = np.concatenate([a, mid]), np.concatenate([mid, b])
        vals, w, kid = sample(aa, bb)
        ok = np.abs(kid[: a.size] + kid[a.size :] - mass) <= tol * total
        panels += aa.size
        keep = np.concatenate([ok, ok])
        nodes = np.repeat(keep, order)
        G += accumulate(vals[:, nodes], w[nodes])
        if panels > max_panels and not ok.all():
            raise RuntimeError("Gram quadrature did not resolve the density peaks")
        a, b = aa[~keep], bb[~keep]
        mass = kid[~keep]
    return G


def write_density_csv(seq: VerblunskySequence, points: int, path: str | Path) -> None:
    theta = circle_grid(points)
    w = bernstein_szego_density(seq, theta)
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["theta", "w"])
        for t, v in zip(theta, w):
            out.writerow([repr(float(t)), repr(float(v))])
