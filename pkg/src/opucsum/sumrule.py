"""The weighted log-integral ``Z = int (1 - cos t)^m log w(t) dt/2pi`` and friends.

Quadrature layout (see :class:`QuadratureGrid`): a periodic midpoint rule on
the circle, with the cells nearest ``t = 0`` replaced by dyadic midpoint
panels that stop at a cutoff ``theta_min``.  The cutoff is refined by factors
of 4 and the results are Richardson-extrapolated; the extrapolants must form
a Cauchy sequence, otherwise the integral is reported as divergent or
inconclusive.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import pruefer
from .verblunsky import VerblunskySequence, lp_norm, power_sequence

log = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi

BOUNDED = "BOUNDED"
DIVERGING = "DIVERGING"
INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class TrigPolyCoeffs:
    """Fourier coefficients of ``(1 - cos t)^m = sum_k b_k e^{-ikt}``."""

    m: int
    b: dict[int, float]

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        return sum(bk * np.exp(-1j * k * theta) for k, bk in self.b.items()).real

    @property
    def b0(self) -> float:
        return self.b[0]


def weight_poly_coeffs(m: int) -> TrigPolyCoeffs:
    if int(m) != m or m < 0:
        raise ValueError(f"m must be a nonnegative integer, got {m!r}")
    m = int(m)
    b = {}
    for k in range(-m, m + 1):
        b[k] = float(Fraction((-1) ** abs(k) * math.comb(2 * m, m + k), 2**m))
    return TrigPolyCoeffs(m, b)


@dataclass(frozen=True)
class QuadratureGrid:
    """Node layout for :func:`z_integral`.

    ``points`` cells of width ``2 pi / points`` cover the circle.  The cells
    inside ``|t| < theta_zone`` (``theta_zone = theta_min * 4**refine_levels``
    rounded to whole cells) are replaced by dyadic panels of ``panel_points``
    midpoint cells each, down to ``theta_min``.  The cutoffs
    ``theta_zone / 4**j``, ``j = 1..refine_levels``, give the refinement
    sequence.

    With ``include_center`` the excluded interval ``|t| < theta_zone /
    4**refine_levels`` is covered by cells as well and the value is the full
    integral; this is right for densities with ``log w`` finite at 0 (every
    Bernstein-Szego measure).  Without it the value is the Richardson limit of
    the cutoff sequence, checked for Cauchy convergence, which is what the
    critical point of a long sequence needs.

    With ``adaptive`` set, any cell whose midpoint value disagrees with the
    three-subcell midpoint value by more than ``adapt_tol`` is split in three,
    recursively.  Bernstein-Szego densities of short random sequences have
    zeros of ``phi_N`` within ~1e-12 of the circle, i.e. near-logarithmic
    spikes in ``log w``, which a fixed grid cannot integrate to 1e-6.  Long
    slowly decaying sequences are smooth on the grid scale and oscillate
    faster than any affordable refinement; use ``adaptive=False`` and
    ``include_center=False`` there (see :func:`scan_grid`).
    """

    points: int = 2**14
    theta_min: float = math.pi * 2.0**-14
    refine_levels: int = 3
    panel_points: int = 16
    cauchy_tol: float = 1e-6
    symmetric: bool = False
    adaptive: bool = True
    include_center: bool = True
    adapt_tol: float = 1e-10
    max_depth: int = 30
    max_nodes: int = 2**21

    def __post_init__(self):
        if self.points < 16:
            raise ValueError(f"points must be >= 16, got {self.points}")
        if not 0 < self.theta_min < math.pi / 4:
            raise ValueError(f"theta_min must lie in (0, pi/4), got {self.theta_min!r}")
        if self.refine_levels < 3:
            raise ValueError(f"refine_levels must be >= 3 for the Cauchy test, got {self.refine_levels}")
        if self.panel_points < 1:
            raise ValueError("panel_points must be >= 1")
        if self.symmetric and self.points % 2:
            raise ValueError("symmetric grids need an even number of points")
        if 2 * self.zone_cells >= self.points:
            raise ValueError("theta_min * 4**refine_levels leaves no bulk cells")

    @property
    def cell(self) -> float:
        return TWO_PI / self.points

    @property
    def zone_cells(self) -> int:
        return max(1, round(self.theta_min * 4**self.refine_levels / self.cell))

    @property
    def theta_zone(self) -> float:
        return self.zone_cells * self.cell

    @property
    def cutoffs(self) -> np.ndarray:
        return self.theta_zone / 4.0 ** np.arange(1, self.refine_levels + 1)

    def describe(self) -> str:
        return (
            f"periodic midpoint, points={self.points}, zone={self.theta_zone:.6g}, "
            f"cutoffs={','.join(f'{c:.6g}' for c in self.cutoffs)}, "
            f"panel_points={self.panel_points}, cauchy_tol={self.cauchy_tol:g}, "
            f"symmetric={self.symmetric}, include_center={self.include_center}, adaptive={self.adaptive}"
            + (f" (tol={self.adapt_tol:g}, depth<={self.max_depth})" if self.adaptive else "")
        )

    def nodes(self):
        """``(theta, width, level)`` of the unrefined cells.

        Level ``-1`` marks bulk cells; level ``j >= 0`` the dyadic panel
        ``[zone / 2^(j+1), zone / 2^j]`` (and its mirror image), kept while the
        cutoff index exceeds ``j // 2``; level ``2 * refine_levels`` is the
        central interval when ``include_center`` is set.  Angles lie in ``(0, 2 pi)``;
        symmetric grids stop at ``pi`` and :attr:`multiplicity` is 2.
        """
        h = self.cell
        K = self.zone_cells
        M = self.points
        idx = np.arange(K, M // 2) if self.symmetric else np.arange(K, M - K)
        bulk = (idx + 0.5) * h
        ts, ws, ls = [bulk], [np.full(bulk.size, h)], [np.full(bulk.size, -1)]
        q = self.panel_points
        zone = self.theta_zone
        for j in range(2 * self.refine_levels):
            a, b = zone / 2.0 ** (j + 1), zone / 2.0**j
            hh = (b - a) / q
            t = a + (np.arange(q) + 0.5) * hh
            sides = [t] if self.symmetric else [t, TWO_PI - t]
            for s in sides:
                ts.append(s)
                ws.append(np.full(q, hh))
                ls.append(np.full(q, j))
        if self.include_center:
            eps = zone / 4.0**self.refine_levels
            hh = eps / q
            t = (np.arange(q) + 0.5) * hh
            sides = [t] if self.symmetric else [t, TWO_PI - t]
            for s in sides:
                ts.append(s)
                ws.append(np.full(q, hh))
                ls.append(np.full(q, 2 * self.refine_levels))
        return np.concatenate(ts), np.concatenate(ws), np.concatenate(ls)

    @property
    def multiplicity(self) -> float:
        return 2.0 if self.symmetric else 1.0


@dataclass(frozen=True)
class ZEstimate:
    value: float  # -inf when flagged divergent
    positive_part: float
    negative_part: float  # inf when flagged divergent
    status: str  # "converged" | "divergent" | "inconclusive"
    m: int
    grid_spec: str
    levels: tuple = field(default=())  # Z at each cutoff, coarsest first
    nodes: int = 0
    unresolved: int = 0  # cells still failing the adaptive test when the budget ran out

    @property
    def divergent(self) -> bool:
        return self.status == "divergent"


def _refine(F, theta, width, level, grid: QuadratureGrid):
    """Triadic adaptive midpoint rule; returns final (theta, width, level, value)."""
    vals = F(theta)
    if not grid.adaptive:
        return theta, width, level, vals, 0, theta.size
    done = []
    used = theta.size
    c, h, lv, fc = theta, width, level, vals
    unresolved = 0
    for _ in range(grid.max_depth):
        if c.size == 0:
            break
        if used + 2 * c.size > grid.max_nodes:
            log.warning("adaptive quadrature budget exhausted with %d cells unresolved", c.size)
            unresolved = c.size
            break
        side = F(np.concatenate([c - h / 3.0, c + h / 3.0]))
        used += side.size
        fl, fr = side[: c.size], side[c.size :]
        err = np.abs(h * fc - (h / 3.0) * (fl + fc + fr))
        ok = err <= grid.adapt_tol
        h3 = h / 3.0
        kids_c = np.concatenate([c - h / 3.0, c, c + h / 3.0])
        kids_h = np.concatenate([h3, h3, h3])
        kids_l = np.concatenate([lv, lv, lv])
        kids_f = np.concatenate([fl, fc, fr])
        ok3 = np.concatenate([ok, ok, ok])
        done.append((kids_c[ok3], kids_h[ok3], kids_l[ok3], kids_f[ok3]))
        c, h, lv, fc = kids_c[~ok3], kids_h[~ok3], kids_l[~ok3], kids_f[~ok3]
    else:
        unresolved = c.size
    done.append((c, h, lv, fc))
    out = [np.concatenate(x) for x in zip(*done)]
    return (*out, unresolved, used)


def z_integral(
    log_w: Callable[[np.ndarray], np.ndarray],
    m: int,
    grid: QuadratureGrid | None = None,
) -> ZEstimate:
    """Quadrature of ``(1 - cos t)^m log w(t) / 2pi`` over the punctured circle.

    ``log_w`` maps an array of angles in ``(0, 2pi)`` to ``log w``.  A
    symmetric grid assumes ``w(2pi - t) = w(t)``.
    """
    if int(m) != m or m < 0:
        raise ValueError(f"m must be a nonnegative integer, got {m!r}")
    grid = grid or QuadratureGrid()

    def F(t):
        v = np.asarray(log_w(t), dtype=float)
        if v.shape != t.shape:
            raise ValueError(f"log_w returned shape {v.shape}, expected {t.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("log_w returned non-finite samples")
        return (1.0 - np.cos(t)) ** m * v / TWO_PI

    theta, width, level = grid.nodes()
    theta, width, level, f, unresolved, used = _refine(F, theta, width, level, grid)
    order = np.lexsort((theta, level))  # fixed summation order
    theta, width, level, f = theta[order], width[order], level[order], f[order]
    wts = width * grid.multiplicity
    pos = np.where(f > 0, f, 0.0) * wts
    neg = np.where(f < 0, -f, 0.0) * wts

    bulk = level < 0
    pos_b, neg_b = _fsum(pos[bulk]), _fsum(neg[bulk])
    P, Q = [], []
    for j in range(1, grid.refine_levels + 1):
        keep = (level >= 0) & (level < 2 * j)
        P.append(pos_b + _fsum(pos[keep]))
        Q.append(neg_b + _fsum(neg[keep]))
    Z = [p - q for p, q in zip(P, Q)]

    # The excluded piece near 0 scales like eps^(2m+1-s) when log w ~ t^-s;
    # s is unknown, so try every odd order up to 2m+1 (cutoffs shrink by 4
    # per level) and keep the one whose extrapolants agree best.
    def rich(seq, gain):
        return [(gain * seq[i + 1] - seq[i]) / (gain - 1.0) for i in range(len(seq) - 1)]

    best = None
    for order in range(1, 2 * m + 2, 2):
        gain = 4.0**order
        R = rich(Z, gain)
        step = abs(R[-1] - R[-2])
        if best is None or step < best[0]:
            best = (step, R, rich(P, gain), rich(Q, gain))
    step, R, RP, RQ = best
    common = dict(m=m, grid_spec=grid.describe(), levels=tuple(Z), nodes=used, unresolved=unresolved)
    if grid.include_center:
        pos_part, neg_part = _fsum(pos), _fsum(neg)
        status = "converged" if unresolved == 0 else "inconclusive"
        return ZEstimate(pos_part - neg_part, pos_part, neg_part, status, **common)
    scale = max(1.0, abs(R[-1]))
    pos_part = max(RP[-1], 0.0)
    neg_part = max(RQ[-1], 0.0)
    if step <= grid.cauchy_tol * scale:
        return ZEstimate(pos_part - neg_part, pos_part, neg_part, "converged", **common)

    # divergence shows in the raw cutoff values: they keep dropping by
    # comparable amounts instead of settling geometrically
    diffs = np.diff(Z)
    shrinking = np.all(np.abs(diffs[1:]) < 0.5 * np.abs(diffs[:-1]))
    if np.all(diffs < 0) and not shrinking:
        log.info("Z refinement decreasing without Cauchy convergence: %s", Z)
        return ZEstimate(-math.inf, pos_part, math.inf, "divergent", **common)
    log.warning("Z refinement inconclusive: %s", Z)
    return ZEstimate(pos_part - neg_part, pos_part, neg_part, "inconclusive", **common)


def _fsum(a: np.ndarray) -> float:
    return math.fsum(a.tolist())


def bernstein_szego_log_w(seq: VerblunskySequence, N: int | None = None) -> Callable:
    """Sampler of ``log w_N`` through the Prufer recursion."""
    seq = seq if N is None else seq.truncate(N)

    def sample(theta):
        return -2.0 * pruefer.log_r_partial(seq, np.asarray(theta, dtype=float), len(seq))

    return sample


def z_bernstein_szego(seq: VerblunskySequence, m: int, grid: QuadratureGrid | None = None) -> ZEstimate:
    grid = grid or QuadratureGrid(symmetric=seq.is_real)
    if grid.symmetric and not seq.is_real:
        raise ValueError("symmetric grid requires a real Verblunsky sequence")
    return z_integral(bernstein_szego_log_w(seq), m, grid)


def szego_identity_m0(seq: VerblunskySequence) -> float:
    """``sum_n log(1 - |alpha_n|^2)``, equal to ``int log w dt/2pi`` for Bernstein-Szego measures."""
    return math.fsum(np.log1p(-np.abs(seq.coeffs) ** 2).tolist())


def z_taylor(seq: VerblunskySequence, m: int, checkpoints: Sequence[int] | None = None):
    """``Z_m`` of Bernstein-Szego truncations from Taylor coefficients of ``log phi_N^*``.

    ``phi_N^*`` has no zeros in the closed disk, so with ``log phi_N^*(z) =
    sum L_k z^k`` one gets ``log w_N = -2 Re log phi_N^*(e^{it})`` and
    ``Z_m = -2 sum_{k=0}^m b_k Re L_k``.  Only the lowest ``m + 1``
    coefficients are needed; the recursion for them closes on itself.  This is
    a quadrature-free cross-check for :func:`z_integral`.

    Returns a dict ``N -> Z_m(N)`` (default: the full length only).
    """
    N_all = len(seq)
    cps = sorted(set(checkpoints)) if checkpoints is not None else [N_all]
    if cps and cps[-1] > N_all:
        raise ValueError(f"checkpoint {cps[-1]} beyond the stored length {N_all}")
    b = weight_poly_coeffs(m).b
    K = m + 1
    phi = np.zeros(K, dtype=complex)  # phi_n mod z^K
    phis = np.zeros(K, dtype=complex)  # phi_n^* mod z^K, normalised so phis[0] = 1
    phi[0] = phis[0] = 1.0
    log_scale = 0.0
    out = {}
    if 0 in cps:
        out[0] = 0.0
    want = set(cps)
    coeffs = seq.coeffs
    for n in range(max(cps, default=0)):
        a = complex(coeffs[n])
        rho = math.sqrt(1.0 - abs(a) ** 2)
        zphi = np.concatenate(([0j], phi[:-1]))
        new_phi = (zphi - a.conjugate() * phis) / rho
        new_phis = (phis - a * zphi) / rho
        s = new_phis[0].real
        phi, phis = new_phi / s, new_phis / s
        log_scale += math.log(s)
        if n + 1 in want:
            L = _series_log(phis)
            L[0] = log_scale
            out[n + 1] = -2.0 * math.fsum(b[k] * L[k].real for k in range(K))
    return out


def _series_log(a: np.ndarray) -> np.ndarray:
    """Taylor coefficients of ``log a(z)`` for ``a[0] = 1``, same length."""
    L = np.zeros(a.size, dtype=complex)
    for k in range(1, a.size):
        L[k] = a[k] - sum(j * L[j] * a[k - j] for j in range(1, k)) / k
    return L


@dataclass(frozen=True)
class SumRuleApproximant:
    """``f(alpha) = b0 log rho + sum_k d_k |alpha|^{2k}``; ``d`` defaults to zeros."""

    m: int
    d: tuple = ()
    b0: float | None = None

    def __post_init__(self):
        d = tuple(float(x) for x in self.d)
        if len(d) > self.m:
            raise ValueError(f"at most m={self.m} correction coefficients, got {len(d)}")
        object.__setattr__(self, "d", d + (0.0,) * (self.m - len(d)))
        if self.b0 is None:
            object.__setattr__(self, "b0", weight_poly_coeffs(self.m).b0)

    def series_coefficients(self, upto: int | None = None) -> list[float]:
        """``c_1 .. c_upto`` of ``f = sum c_k |alpha|^{2k}`` (default ``upto = m + 1``)."""
        upto = self.m + 1 if upto is None else upto
        return [(self.d[k - 1] if k <= self.m else 0.0) - self.b0 / (2 * k) for k in range(1, upto + 1)]

    def leading(self) -> tuple[int, float]:
        """``(l, c_l)`` for the first nonzero series coefficient."""
        for l, c in enumerate(self.series_coefficients(), start=1):
            if c != 0.0:
                return l, c
        raise AssertionError("c_{m+1} = -b0/(2(m+1)) is never zero")


def f_series_eval(approx: SumRuleApproximant, alpha: complex) -> float:
    r2 = abs(complex(alpha)) ** 2
    if r2 >= 1.0:
        raise ValueError(f"|alpha| = {math.sqrt(r2)!r} is not < 1")
    out = approx.b0 * 0.5 * math.log1p(-r2)
    for k, dk in enumerate(approx.d, start=1):
        out += dk * r2**k
    return out


@dataclass(frozen=True)
class ExponentFit:
    slope: float
    intercept: float
    residual: float
    theta: np.ndarray
    log_w: np.ndarray
    excluded: int


def exponent_fit(seq: VerblunskySequence, theta_grid) -> ExponentFit:
    """Least-squares fit of ``log |log w_N(t)|`` against ``log(1/t)``."""
    theta = np.asarray(theta_grid, dtype=float)
    if theta.size < 3:
        raise ValueError("need at least 3 angles")
    if np.any(theta <= 0) or np.any(theta > math.pi / 4):
        raise ValueError("angles must lie in (0, pi/4]")
    if theta.max() / theta.min() < 10.0 * (1 - 1e-12):
        raise ValueError("angles must span at least one decade")
    lw = -2.0 * pruefer.log_r_partial(seq, theta, len(seq))
    keep = np.abs(lw) >= 1e-12
    if np.count_nonzero(~keep):
        log.warning("excluding %d angles where log w vanishes", np.count_nonzero(~keep))
    if np.count_nonzero(keep) < 3:
        raise ValueError("log w vanishes on the grid; nothing to fit")
    x = np.log(1.0 / theta[keep])
    y = np.log(np.abs(lw[keep]))
    A = np.vstack([x, np.ones_like(x)]).T
    (slope, intercept), res, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = float(math.sqrt(res[0] / x.size)) if res.size else 0.0
    return ExponentFit(float(slope), float(intercept), resid, theta, lw, int(np.count_nonzero(~keep)))


@dataclass(frozen=True)
class ScanRow:
    m: int
    beta: float
    N: int
    Z: float
    lp_partial_norm: float
    classification: str


def classify(Z: Sequence[float]) -> str:
    """Trend rule over ``Z_m(N)`` for increasing ``N``.

    DIVERGING: monotone decrease and a total drop of at least 1.
    BOUNDED: total variation over the upper half of the list at most 0.1.
    """
    Z = list(Z)
    if len(Z) < 2:
        return INCONCLUSIVE
    if any(math.isinf(z) and z < 0 for z in Z):
        return DIVERGING
    d = np.diff(Z)
    if np.all(d < 0) and Z[-1] <= Z[0] - 1.0:
        return DIVERGING
    upper = Z[len(Z) // 2 :]
    if float(np.sum(np.abs(np.diff(upper)))) <= 0.1:
        return BOUNDED
    return INCONCLUSIVE


def equivalence_experiment(
    m: int,
    beta_list: Sequence[float],
    N_list: Sequence[int],
    c: float = 0.7,
    grid: QuadratureGrid | None = None,
) -> list[ScanRow]:
    """``Z_m(N)`` on truncations of ``c (n+2)^-beta`` and the trend per beta.

    The prediction is BOUNDED for ``beta > 1/(2m+2)`` and DIVERGING below.
    """
    if int(m) != m or m < 0:
        raise ValueError(f"m must be a nonnegative integer, got {m!r}")
    if not beta_list:
        raise ValueError("beta_list is empty")
    if not N_list:
        raise ValueError("N_list is empty")
    Ns = sorted(int(n) for n in N_list)
    if Ns[0] < 1:
        raise ValueError("N values must be positive")
    p = 2 * m + 2
    rows = []
    for beta in beta_list:
        seq = power_sequence(beta, c, Ns[-1])
        Z = _z_checkpoints(seq, m, Ns, grid)
        label = classify(Z)
        for N, z in zip(Ns, Z):
            rows.append(ScanRow(m, float(beta), N, z, lp_norm(seq.coeffs[:N], p), label))
    return rows


def scan_grid(seq: VerblunskySequence, grid: QuadratureGrid | None = None) -> QuadratureGrid:
    """Grid used for long sequences: cutoff extrapolation, never adaptive, symmetric when ``seq`` is real."""
    grid = grid or QuadratureGrid()
    return replace(grid, adaptive=False, include_center=False, symmetric=grid.symmetric or seq.is_real)


def _z_checkpoints(seq, m, Ns, grid):
    # one Prufer pass serves every N; the fixed grid makes the sampler a lookup
    grid = scan_grid(seq, grid)
    theta, _, _ = grid.nodes()
    lr = pruefer.log_r_checkpoints(seq, theta, Ns)
    out = []
    for row in lr:
        est = z_integral(lambda t, row=row: -2.0 * row, m, grid)
        out.append(est.value)
    return out


def write_report_csv(rows: Sequence[ScanRow], path: str | Path, header: Sequence[str] = ()) -> None:
    with open(path, "w", newline="") as fh:
        for line in header:
            fh.write(f"# {line}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["m", "beta", "N", "Z", "lp_partial_norm", "classification"])
        for r in rows:
            w.writerow([r.m, repr(r.beta), r.N, repr(float(r.Z)), repr(float(r.lp_partial_norm)), r.classification])
