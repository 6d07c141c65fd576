"""Randomized checks of the product and power-mean inequalities.

Every check returns ``(lhs, rhs, ok)``.  These are proved statements, so a
single ``ok == False`` is a bug somewhere (here, or in the constant being
checked); the suites serialize the offending input for replay.

Slack: ``LOCAL_SLACK`` for pointwise inequalities, ``SUM_SLACK`` for sums.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .verblunsky import VerblunskySequence, forward_difference, power_sequence, test_sequence

LOCAL_SLACK = 1e-12
SUM_SLACK = 1e-10
NEAR_BOUNDARY = 1.0 - 1e-6


class Check(NamedTuple):
    lhs: float
    rhs: float
    ok: bool


def random_disk(rng: np.random.Generator, size, adversarial: float = 0.1) -> np.ndarray:
    """Uniform points in the open unit disk; a fraction sits at ``|z| = 1 - 1e-6``."""
    r = np.sqrt(rng.random(size))
    edge = rng.random(size) < adversarial
    r = np.where(edge, NEAR_BOUNDARY, r)
    return r * np.exp(2j * np.pi * rng.random(size))


# --- products of disk values -------------------------------------------------


def telescope_product_batch(z: np.ndarray, zp: np.ndarray):
    """Row-wise ``|prod z - prod z'|`` and ``k max |z_j - z'_j|`` for ``(draws, k)`` arrays."""
    k = z.shape[-1]
    lhs = np.abs(np.prod(z, axis=-1) - np.prod(zp, axis=-1))
    rhs = k * np.max(np.abs(z - zp), axis=-1)
    return lhs, rhs


def check_telescope_product(z, z_prime) -> Check:
    z = np.asarray(z, dtype=complex).reshape(1, -1)
    zp = np.asarray(z_prime, dtype=complex).reshape(1, -1)
    if z.shape != zp.shape:
        raise ValueError("z and z_prime must have the same length")
    _require_disk(z, zp)
    lhs, rhs = telescope_product_batch(z, zp)
    return Check(float(lhs[0]), float(rhs[0]), bool(lhs[0] <= rhs[0] + LOCAL_SLACK))


def power_mean_batch(z: np.ndarray):
    """Row-wise ``|mean(z^k) - prod z|`` and ``(k-1)^2 max |z_i - z_j|^2``."""
    k = z.shape[-1]
    lhs = np.abs(np.mean(z**k, axis=-1) - np.prod(z, axis=-1))
    spread = np.max(np.abs(z[..., :, None] - z[..., None, :]), axis=(-2, -1))
    rhs = (k - 1) ** 2 * spread**2
    return lhs, rhs


def check_power_mean(z) -> Check:
    z = np.asarray(z, dtype=complex).reshape(1, -1)
    _require_disk(z)
    lhs, rhs = power_mean_batch(z)
    return Check(float(lhs[0]), float(rhs[0]), bool(lhs[0] <= rhs[0] + LOCAL_SLACK))


def _require_disk(*arrays):
    for a in arrays:
        if a.size and np.max(np.abs(a)) >= 1.0:
            raise ValueError("inputs must lie in the open unit disk")


# --- shifted products along a sequence -----------------------------------------


@dataclass(frozen=True)
class TupleSpec:
    """``2k`` shifts ``t_i`` in ``{0..l}``; odd positions feed ``beta``, even ``beta'``."""

    l: int
    k: int
    t: tuple

    def __post_init__(self):
        t = tuple(int(x) for x in self.t)
        object.__setattr__(self, "t", t)
        if not 1 <= self.k <= self.l:
            raise ValueError(f"need 1 <= k <= l, got k={self.k}, l={self.l}")
        if len(t) != 2 * self.k:
            raise ValueError(f"t must have 2k={2 * self.k} entries, got {len(t)}")
        if any(not 0 <= x <= self.l for x in t):
            raise ValueError(f"every t_i must lie in 0..{self.l}, got {t}")

    @classmethod
    def random(cls, rng: np.random.Generator, l_max: int = 4) -> "TupleSpec":
        l = int(rng.integers(1, l_max + 1))
        k = int(rng.integers(1, l + 1))
        return cls(l, k, tuple(int(x) for x in rng.integers(0, l + 1, 2 * k)))


@dataclass(frozen=True)
class ProductComparison:
    """Outcome of :func:`check_product_comparison`.

    ``lhs``/``rhs``/``ok`` refer to the aggregate comparison bound.  The
    termwise assertions report the worst ``lhs - rhs`` over ``n``.
    """

    lhs: float
    rhs: float
    ok: bool
    increments: Check  # |a_{n+t_i} - a_{n+t_j}|^2 <= l sum_q |da_{n+q}|^2
    products: Check  # |beta - beta'|^2 and ||beta|^2 - power mean| bounds
    telescope: Check  # sum (|a_{n+t}|^{2k} - |a_n|^{2k}) = -sum_{n<t} |a_n|^{2k}
    rhs_proved: float
    delta_norm2: float
    notes: tuple = field(default=())

    @property
    def all_ok(self) -> bool:
        return self.ok and self.increments.ok and self.products.ok and self.telescope.ok


def check_product_comparison(seq: VerblunskySequence, spec: TupleSpec, N: int | None = None) -> ProductComparison:
    """Compare ``Re prod a_{n+t_{2j-1}} conj(a_{n+t_{2j}})`` with power means along ``seq``.

    ``seq`` is truncated to ``N`` terms and zero-extended.  The aggregate
    bound is ``4.5 (k-1)^2 l^2 ||delta a||_2^2``.  For ``k = 1`` that bound
    is 0 while the left side is ``1/2 sum |a_{n+t_1} - a_{n+t_2}|^2``; the
    check then asserts that identity and its increment bound instead.

    The pairwise bound ``|beta - beta'| <= k max |...|`` carries the factor
    ``k``, so ``|beta - beta'|^2`` is checked against ``k^2 l D_n``, and the
    full aggregate is additionally checked against the constant
    ``4 (k-1)^2 + k^2 / 2`` that this pairwise bound yields.
    """
    N = len(seq) if N is None else int(N)
    l, k, t = spec.l, spec.k, np.array(spec.t)
    a = seq.truncate(N).padded(N + l + 1)
    da2 = np.abs(forward_difference(a)) ** 2
    delta_norm2 = math.fsum(da2.tolist())
    n = np.arange(N)
    # D_n = sum_{q<l} |da_{n+q}|^2
    csum = np.concatenate(([0.0], np.cumsum(da2)))
    D = csum[n + l] - csum[n]

    shifted = a[n[:, None] + t[None, :]]  # (N, 2k)
    odd, even = shifted[:, 0::2], shifted[:, 1::2]

    spread2 = np.max(np.abs(shifted[:, :, None] - shifted[:, None, :]), axis=(1, 2)) ** 2
    inc_gap = spread2 - l * D
    increments = Check(float(spread2.max(initial=0.0)), float((l * D).max(initial=0.0)),
                       bool(np.all(inc_gap <= LOCAL_SLACK)))

    beta, beta_p = np.prod(odd, axis=1), np.prod(even, axis=1)
    pair = np.abs(beta - beta_p) ** 2
    pair_rhs = k**2 * l * D
    mean_odd = np.mean(np.abs(odd) ** (2 * k), axis=1)
    mean_even = np.mean(np.abs(even) ** (2 * k), axis=1)
    mod_rhs = 4 * (k - 1) ** 2 * l * D
    dev_odd = np.abs(np.abs(beta) ** 2 - mean_odd)
    dev_even = np.abs(np.abs(beta_p) ** 2 - mean_even)
    gaps = np.stack([pair - pair_rhs, dev_odd - mod_rhs, dev_even - mod_rhs])
    worst = int(np.argmax(gaps.max(axis=1)))
    products = Check(float([pair, dev_odd, dev_even][worst].max(initial=0.0)),
                     float([pair_rhs, mod_rhs, mod_rhs][worst].max(initial=0.0)),
                     bool(np.all(gaps <= LOCAL_SLACK)))

    terms = np.abs((beta * np.conj(beta_p)).real - np.mean(np.abs(shifted) ** (2 * k), axis=1))
    lhs = math.fsum(terms.tolist())
    rhs = 4.5 * (k - 1) ** 2 * l**2 * delta_norm2
    rhs_proved = (4 * (k - 1) ** 2 + k**2 / 2) * l**2 * delta_norm2
    notes = []
    if k == 1:
        half_sq = 0.5 * math.fsum((np.abs(shifted[:, 0] - shifted[:, 1]) ** 2).tolist())
        chain = 0.5 * l * math.fsum(D.tolist())
        ok = abs(lhs - half_sq) <= SUM_SLACK * max(1.0, half_sq) and half_sq <= chain + SUM_SLACK
        notes.append("k=1: checked lhs = 1/2 sum |a_{n+t1} - a_{n+t2}|^2 <= (l/2) sum D_n")
        rhs = chain
    else:
        ok = lhs <= rhs + SUM_SLACK
    ok = ok and lhs <= rhs_proved + SUM_SLACK

    p2k = np.abs(a) ** (2 * k)
    base = math.fsum(p2k[:N].tolist())
    tele_err = 0.0
    tele_scale = 0.0
    for ti in set(spec.t):
        lhs_t = math.fsum(p2k[ti: ti + N].tolist()) - base
        rhs_t = -math.fsum(p2k[:ti].tolist())
        tele_err = max(tele_err, abs(lhs_t - rhs_t))
        tele_scale = max(tele_scale, abs(rhs_t))
    telescope = Check(tele_err, SUM_SLACK * max(1.0, tele_scale), tele_err <= SUM_SLACK * max(1.0, tele_scale))

    return ProductComparison(lhs, rhs, bool(ok), increments, products, telescope, rhs_proved,
                             delta_norm2, tuple(notes))


# --- randomized suites -------------------------------------------------------------


@dataclass
class SuiteResult:
    name: str
    trials: int
    violations: int
    replay: list = field(default_factory=list)  # rows for write_replay_csv

    @property
    def passed(self) -> bool:
        return self.violations == 0


def telescope_suite(rng: np.random.Generator, trials: int, k_max: int = 6) -> SuiteResult:
    res = SuiteResult("telescope_product", trials, 0)
    for k, count in _split_by_k(rng, trials, k_max):
        z, zp = random_disk(rng, (count, k)), random_disk(rng, (count, k))
        # half of the pairs are small perturbations, where the bound is tightest
        near = rng.random(count) < 0.5
        zp[near] = _nudge(rng, z[near])
        lhs, rhs = telescope_product_batch(z, zp)
        for i in np.flatnonzero(lhs > rhs + LOCAL_SLACK):
            res.violations += 1
            res.replay += _rows(res.name, k, {"z": z[i], "z_prime": zp[i]})
    return res


def power_mean_suite(rng: np.random.Generator, trials: int, k_max: int = 6) -> SuiteResult:
    res = SuiteResult("power_mean", trials, 0)
    for k, count in _split_by_k(rng, trials, k_max):
        z = random_disk(rng, (count, k))
        clustered = rng.random(count) < 0.5
        z[clustered] = _nudge(rng, np.repeat(z[clustered, :1], k, axis=1))
        lhs, rhs = power_mean_batch(z)
        for i in np.flatnonzero(lhs > rhs + LOCAL_SLACK):
            res.violations += 1
            res.replay += _rows(res.name, k, {"z": z[i]})
    return res


def random_bv_sequence(rng: np.random.Generator, N: int) -> VerblunskySequence:
    """A decaying sequence with square-summable variation, possibly complex."""
    kind = rng.integers(0, 3)
    if kind == 0:
        seq = test_sequence(int(rng.integers(1, 4)), N)
        coeffs = seq.coeffs
    elif kind == 1:
        coeffs = power_sequence(float(rng.uniform(0.1, 1.5)), float(rng.uniform(0.05, 0.95)), N).coeffs
    else:
        # slowly rotating phase on a power envelope
        env = power_sequence(float(rng.uniform(0.5, 1.5)), float(rng.uniform(0.05, 0.95)), N).coeffs
        coeffs = env * np.exp(1j * float(rng.uniform(0, 0.05)) * np.arange(N))
    return VerblunskySequence(coeffs * np.exp(2j * np.pi * rng.random()))


def product_suite(rng: np.random.Generator, trials: int, N: int = 10**4, l_max: int = 4) -> SuiteResult:
    res = SuiteResult("product_comparison", trials, 0)
    for trial in range(trials):
        seq = random_bv_sequence(rng, N)
        spec = TupleSpec.random(rng, l_max)
        out = check_product_comparison(seq, spec, N)
        if not out.all_ok:
            res.violations += 1
            res.replay += _rows(res.name, spec.k, {"t": np.array(spec.t, dtype=complex), "alpha": seq.coeffs},
                                extra=f"l={spec.l};trial={trial}")
    return res


def _split_by_k(rng, trials, k_max):
    ks = rng.integers(1, k_max + 1, trials)
    return [(k, int(np.count_nonzero(ks == k))) for k in range(1, k_max + 1) if np.any(ks == k)]


def _nudge(rng, z):
    step = 10.0 ** rng.uniform(-8, -1, z.shape) * np.exp(2j * np.pi * rng.random(z.shape))
    out = z + step
    big = np.abs(out) >= 1.0
    out[big] = out[big] / np.abs(out[big]) * NEAR_BOUNDARY
    return out


def _rows(suite, k, arrays: dict, extra: str = ""):
    rows = []
    for name, arr in arrays.items():
        for i, v in enumerate(np.asarray(arr).reshape(-1)):
            rows.append([suite, k, extra, name, i, repr(float(v.real)), repr(float(v.imag))])
    return rows


def write_replay_csv(results, path: str | Path) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["suite", "k", "extra", "field", "index", "re", "im"])
        for r in results:
            w.writerows(r.replay)
    return path
