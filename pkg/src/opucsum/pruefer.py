"""Prufer variables on the unit circle.

For ``z = e^{i eta}`` write ``phi_n(z) = r_n exp(i (n eta + theta_n))``.  The
Szego recursion becomes the scalar update

    log r_{n+1} - log r_n + i (theta_{n+1} - theta_n)
        = log(1 - conj(alpha_n) e^{-i[(n+1) eta + 2 theta_n]}) - log(1 - |alpha_n|^2) / 2

which is run here entirely in the log domain.  The principal logarithm is the
right branch: ``1 - conj(alpha) e^{i x}`` has positive real part whenever
``|alpha| < 1``.  ``theta_n`` is kept unwrapped.
"""

from __future__ import annotations

import cmath
import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numba
import numpy as np

from .verblunsky import VerblunskySequence

# the bundled TBB is too old for numba and only produces a warning when probed
numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

TWO_PI = 2.0 * math.pi
RESONANCE_EPS = 1e-12


class ResonanceError(ValueError):
    """Raised when ``e^{-i(k eta - phi)} = 1`` and the Abel transform has no ``g``."""


@dataclass(frozen=True)
class PrueferState:
    log_r: float
    theta: float
    n: int
    eta: float


def initial_state(eta: float) -> PrueferState:
    # phi_0 = 1 gives r_0 = 1 and theta_0 = 0
    return PrueferState(0.0, 0.0, 0, float(eta))


def pruefer_step(state: PrueferState, alpha: complex) -> PrueferState:
    alpha = complex(alpha)
    if abs(alpha) >= 1.0:
        raise ValueError(f"|alpha| = {abs(alpha)!r} is not < 1")
    psi = (state.n + 1) * state.eta + 2.0 * state.theta
    u = cmath.log(1.0 - alpha.conjugate() * cmath.exp(-1j * psi)) - 0.5 * math.log1p(-abs(alpha) ** 2)
    return PrueferState(state.log_r + u.real, state.theta + u.imag, state.n + 1, state.eta)


@numba.njit(cache=True)
def _track(alpha, eta):
    N = alpha.shape[0]
    log_r = np.zeros(N + 1)
    theta = np.zeros(N + 1)
    for n in range(N):
        a = alpha[n]
        psi = (n + 1) * eta + 2.0 * theta[n]
        w = 1.0 - a.conjugate() * complex(math.cos(psi), -math.sin(psi))
        log_r[n + 1] = log_r[n] + 0.5 * math.log(w.real * w.real + w.imag * w.imag) \
            - 0.5 * math.log1p(-(a.real * a.real + a.imag * a.imag))
        theta[n + 1] = theta[n] + math.atan2(w.imag, w.real)
    return log_r, theta


@numba.njit(cache=True, parallel=True)
def _log_r_grid(alpha, etas, checkpoints, window_start):
    # Phase enters only through e^{-i psi_n}; carry that phasor instead of
    # theta_n so each step costs one log and a few complex products.
    # Angles are independent, so the parallel loop is bit-reproducible.
    N = alpha.shape[0]
    C = checkpoints.shape[0]
    out = np.empty((C, etas.shape[0]))
    fluct = np.zeros(etas.shape[0])
    half = np.empty(N)
    for n in range(N):
        a = alpha[n]
        half[n] = 0.5 * math.log1p(-(a.real * a.real + a.imag * a.imag))
    for j in numba.prange(etas.shape[0]):
        e = etas[j]
        rot = complex(math.cos(e), -math.sin(e))
        P = rot
        lr = 0.0
        lo = 0.0
        hi = 0.0
        c = 0
        while c < C and checkpoints[c] == 0:
            out[c, j] = 0.0
            c += 1
        for n in range(N):
            w = 1.0 - alpha[n].conjugate() * P
            m2 = w.real * w.real + w.imag * w.imag
            lr += 0.5 * math.log(m2) - half[n]
            wc = w.conjugate()
            P = P * rot * (wc * wc) / m2
            if (n & 63) == 63:
                P = P / abs(P)
            if n + 1 == window_start:
                lo = lr
                hi = lr
            elif n + 1 > window_start:
                if lr < lo:
                    lo = lr
                if lr > hi:
                    hi = lr
            while c < C and n + 1 == checkpoints[c]:
                out[c, j] = lr
                c += 1
        fluct[j] = hi - lo
    return out, fluct


def pruefer_track(seq: VerblunskySequence, eta: float, N: int | None = None):
    """``(log r_n, theta_n)`` for n = 0..N at a single ``eta``."""
    N = len(seq) if N is None else N
    return _track(seq.padded(N), float(eta))


def log_r_partial(seq: VerblunskySequence, eta, N: int | None = None):
    """``log r_N(eta)``; ``eta`` may be a scalar or an array."""
    N = len(seq) if N is None else N
    etas = np.atleast_1d(np.asarray(eta, dtype=float))
    out, _ = _log_r_grid(seq.padded(N), etas, np.array([N], dtype=np.int64), N)
    return float(out[0, 0]) if np.ndim(eta) == 0 else out[0]


def log_r_checkpoints(seq: VerblunskySequence, etas, checkpoints):
    """``log r_N(eta)`` for every N in ``checkpoints`` in a single pass.

    Returns an array of shape ``(len(checkpoints), len(etas))``.
    """
    cps = np.asarray(sorted(int(c) for c in checkpoints), dtype=np.int64)
    if cps.size == 0:
        raise ValueError("no checkpoints")
    etas = np.atleast_1d(np.asarray(etas, dtype=float))
    alpha = seq.padded(int(cps[-1]))
    out, _ = _log_r_grid(alpha, etas, cps, int(cps[-1]))
    return out


@dataclass(frozen=True)
class DensityLimit:
    eta: np.ndarray
    log_w: np.ndarray
    fluctuation: np.ndarray
    tol: float

    @property
    def converged(self) -> np.ndarray:
        return self.fluctuation <= self.tol


def log_density_limit(seq: VerblunskySequence, eta, tol: float = 1e-3) -> DensityLimit:
    """``-2 log r_N(eta)`` at the end of the stored support.

    ``fluctuation`` is ``max - min`` of ``log r_n`` over the final 10% of the
    steps; points where it exceeds ``tol`` are reported, not rejected.
    """
    etas = np.atleast_1d(np.asarray(eta, dtype=float))
    wrapped = np.mod(etas, TWO_PI)
    if np.any(np.minimum(wrapped, TWO_PI - wrapped) == 0.0):
        raise ValueError("eta = 0 (mod 2 pi) is the critical point; pick eta away from it")
    N = len(seq)
    window = N - max(1, N // 10) if N else 0
    out, fluct = _log_r_grid(seq.padded(N), etas, np.array([N], dtype=np.int64), window)
    return DensityLimit(etas, -2.0 * out[0], fluct, tol)


def write_log_density_csv(limit: DensityLimit, path: str | Path, header: list[str] | None = None) -> None:
    with open(path, "w", newline="") as fh:
        for line in header or []:
            fh.write(f"# {line}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["eta", "log_w", "fluctuation"])
        for e, lw, fl in zip(limit.eta, limit.log_w, limit.fluctuation):
            w.writerow([repr(float(e)), repr(float(lw)), repr(float(fl))])


def oscillatory_sum(seq: VerblunskySequence, I: int, J: int, eta: float, N: int) -> complex:
    """``sum_{n<N} alpha_n^I conj(alpha_n)^J e^{i(I-J)[(n+1) eta + 2 theta_n]}``."""
    if not (J >= 0 and I - 1 >= J):
        raise ValueError(f"need I - 1 >= J >= 0, got I={I}, J={J}")
    alpha = seq.padded(N)
    _, theta = _track(alpha, float(eta))
    n = np.arange(N)
    phase = (I - J) * ((n + 1) * eta + 2.0 * theta[:N])
    return complex(np.sum(alpha**I * np.conj(alpha) ** J * np.exp(1j * phase)))


@dataclass(frozen=True)
class AbelInput:
    """Data for the summation-by-parts identity.

    ``gamma`` is zero past its stored range.  ``theta`` is the phase track
    ``theta_0 .. theta_L`` (``L = len(gamma)``); ``None`` means ``theta = 0``.
    """

    k: int
    phi: float
    gamma: np.ndarray
    f_value: complex
    eta: float
    theta: np.ndarray | None = None

    def __post_init__(self):
        if self.k == 0 and self.phi == 0:
            raise ValueError("k and phi must not both be 0")
        if not 0.0 <= self.phi < TWO_PI:
            raise ValueError(f"phi must lie in [0, 2 pi), got {self.phi!r}")
        object.__setattr__(self, "gamma", np.asarray(self.gamma, dtype=complex).reshape(-1))
        if self.theta is not None:
            th = np.asarray(self.theta, dtype=float).reshape(-1)
            if th.size < self.gamma.size + 1:
                raise ValueError(f"theta track needs {self.gamma.size + 1} entries, got {th.size}")
            object.__setattr__(self, "theta", th)

    def phases(self) -> np.ndarray:
        """``theta_0 .. theta_L``."""
        L = self.gamma.size
        if self.theta is None:
            return np.zeros(L + 1)
        return self.theta[: L + 1]

    def g_value(self) -> complex:
        denom = cmath.exp(-1j * (self.k * self.eta - self.phi)) - 1.0
        if abs(denom) < RESONANCE_EPS:
            raise ResonanceError(
                f"resonant frequency: k*eta - phi = {self.k * self.eta - self.phi!r} "
                f"is a multiple of 2 pi (|denominator| = {abs(denom):.3g})"
            )
        return self.f_value / denom


def abel_transform(inp: AbelInput) -> tuple[complex, float]:
    """Telescoped value ``S`` and the bound ``2 |g| sum |e^{i phi} Gamma_{n+1} - Gamma_n|``."""
    g = inp.g_value()
    gamma = np.append(inp.gamma, 0.0)  # Gamma_0 .. Gamma_L with Gamma_L = 0
    th = inp.phases()
    L = inp.gamma.size
    if L == 0:
        return 0j, 0.0
    n = np.arange(L + 1)
    F = np.exp(1j * inp.k * (n * inp.eta + 2.0 * th))  # F_n, n = 0..L
    eip = cmath.exp(1j * inp.phi)
    diffs = eip * gamma[1:] - gamma[:-1]  # n = 0..L-1
    S = g * (eip * gamma[0] * F[0] + np.sum(diffs * F[1:]))
    bound = 2.0 * abs(g) * float(np.sum(np.abs(diffs)))
    return complex(S), bound


def abel_direct(inp: AbelInput) -> complex:
    """The defining series summed term by term (oracle for :func:`abel_transform`)."""
    g = inp.g_value()
    L = inp.gamma.size
    if L == 0:
        return 0j
    th = inp.phases()
    n = np.arange(L)
    E = np.exp(1j * inp.k * ((n + 1) * inp.eta + 2.0 * th[:L]))
    jump = np.exp(2j * inp.k * (th[1:] - th[:-1])) - 1.0
    terms = inp.f_value * inp.gamma * E - g * inp.gamma * E * jump
    return complex(np.sum(terms))
