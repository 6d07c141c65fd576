"""Verblunsky coefficient sequences.

A :class:`VerblunskySequence` stores finitely many coefficients
``alpha_0 .. alpha_{N-1}`` in the open unit disk; every coefficient past the
stored range is zero.  The measure it describes is therefore a
Bernstein-Szego measure, which is what the downstream modules evaluate.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


@dataclass(frozen=True)
class VerblunskySequence:
    """Finite Verblunsky sequence with zero extension.

    ``coeffs`` is copied into a read-only complex array on construction.
    """

    coeffs: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))

    def __post_init__(self):
        arr = np.array(self.coeffs, dtype=complex).reshape(-1)
        if arr.size and not np.all(np.isfinite(arr)):
            raise ValueError("Verblunsky coefficients must be finite")
        if arr.size and np.max(np.abs(arr)) >= 1.0:
            bad = int(np.argmax(np.abs(arr)))
            raise ValueError(
                f"|alpha_{bad}| = {abs(arr[bad]):.17g} is not inside the open unit disk"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    def __len__(self) -> int:
        return self.coeffs.size

    def __getitem__(self, n: int) -> complex:
        # zero extension, including negative indices never being wrapped
        if n < 0:
            raise IndexError("Verblunsky sequences start at n = 0")
        return complex(self.coeffs[n]) if n < self.coeffs.size else 0j

    @property
    def rho(self) -> np.ndarray:
        """``sqrt(1 - |alpha_n|^2)`` for the stored coefficients."""
        return np.sqrt(1.0 - np.abs(self.coeffs) ** 2)

    @property
    def is_real(self) -> bool:
        return bool(np.all(self.coeffs.imag == 0.0))

    def truncate(self, n: int) -> "VerblunskySequence":
        return VerblunskySequence(self.coeffs[:n])

    def padded(self, length: int) -> np.ndarray:
        """Coefficients as a writable array of ``length`` entries, zero-filled."""
        out = np.zeros(max(length, 0), dtype=complex)
        k = min(length, self.coeffs.size)
        out[:k] = self.coeffs[:k]
        return out


def test_sequence(m: int, N: int) -> VerblunskySequence:
    """The critical sequence ``alpha_n = (n + 2)^(-1/(2m))``.

    It has bounded variation and lies in l^(2m+1) but not in l^(2m).
    """
    if int(m) != m or m < 1:
        raise ValueError(f"m must be a positive integer, got {m!r}")
    if int(N) != N or N < 1:
        raise ValueError(f"N must be a positive integer, got {N!r}")
    n = np.arange(int(N), dtype=float)
    return VerblunskySequence((n + 2.0) ** (-1.0 / (2 * int(m))))


# pytest would otherwise try to collect the constructor above as a test
test_sequence.__test__ = False


def power_sequence(beta: float, c: float, N: int) -> VerblunskySequence:
    """``alpha_n = c * (n + 2)^(-beta)``; lies in l^p iff ``p * beta > 1``."""
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta!r}")
    if not 0 < c < 1:
        raise ValueError(f"c must lie in (0, 1), got {c!r}")
    if int(N) != N or N < 1:
        raise ValueError(f"N must be a positive integer, got {N!r}")
    n = np.arange(int(N), dtype=float)
    return VerblunskySequence(c * (n + 2.0) ** (-float(beta)))


def lp_norm(seq: VerblunskySequence | Sequence[complex], p: float) -> float:
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p!r}")
    a = np.abs(_as_array(seq))
    if a.size == 0:
        return 0.0
    if math.isinf(p):
        return float(a.max())
    # scale by the max so that large p does not underflow
    top = a.max()
    if top == 0.0:
        return 0.0
    return float(top * np.sum((a / top) ** p) ** (1.0 / p))


def lp_partial_sums(seq: VerblunskySequence, p: float) -> np.ndarray:
    """Running sums ``sum_{n < N} |alpha_n|^p`` for N = 1..len(seq)."""
    return np.cumsum(np.abs(seq.coeffs) ** p)


def forward_difference(seq: VerblunskySequence | Sequence[complex]) -> np.ndarray:
    """``(delta alpha)_n = alpha_{n+1} - alpha_n``, same length as ``seq``.

    The last entry is ``-alpha_{N-1}`` from the zero extension.
    """
    a = _as_array(seq)
    if a.size == 0:
        return np.zeros(0, dtype=complex)
    return np.append(a[1:], 0.0) - a


def _as_array(seq) -> np.ndarray:
    if isinstance(seq, VerblunskySequence):
        return seq.coeffs
    return np.asarray(seq, dtype=complex).reshape(-1)


def write_csv(seq: VerblunskySequence, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "re", "im"])
        for n, a in enumerate(seq.coeffs):
            w.writerow([n, repr(float(a.real)), repr(float(a.imag))])


def read_csv(path: str | Path) -> VerblunskySequence:
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    if not rows or [h.strip() for h in rows[0]] != ["n", "re", "im"]:
        raise ValueError(f"{path}: expected header row 'n,re,im'")
    body = rows[1:]
    coeffs = np.zeros(len(body), dtype=complex)
    for i, (n, re, im) in enumerate(body):
        if int(n) != i:
            raise ValueError(f"{path}: row {i + 2} has n={n}, expected {i}")
        coeffs[i] = complex(float(re), float(im))
    return VerblunskySequence(coeffs)


def from_values(values: Iterable[complex]) -> VerblunskySequence:
    return VerblunskySequence(np.fromiter(values, dtype=complex))
