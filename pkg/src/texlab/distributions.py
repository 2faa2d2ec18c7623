"""Label distributions and the six distance/similarity measures over them.

A label distribution assigns every one of ``c`` labels a nonnegative
description degree; the degrees sum to one. Four measures are distances
(smaller is better) and two are similarities (larger is better). All
arithmetic is 64-bit.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import (
    AllZeroError,
    DomainError,
    EmptyInputError,
    LengthMismatchError,
    NegativeEntryError,
    UndefinedTermError,
)

ENTRY_TOL = 1e-9
SUM_TOL = 1e-6

# Predicted distributions from neighbor averaging contain exact zeros; the
# divergence smooths the second argument so it stays finite.
KL_EPSILON = 1e-10


class MeasureKind(enum.Enum):
    """The six measures; ``is_distance`` tells the polarity."""

    CHEBYSHEV = "chebyshev"
    CLARK = "clark"
    CANBERRA = "canberra"
    KULLBACK_LEIBLER = "kl"
    COSINE = "cosine"
    INTERSECTION = "intersection"

    @property
    def is_distance(self) -> bool:
        return self in (
            MeasureKind.CHEBYSHEV,
            MeasureKind.CLARK,
            MeasureKind.CANBERRA,
            MeasureKind.KULLBACK_LEIBLER,
        )

    @property
    def is_similarity(self) -> bool:
        return not self.is_distance


MEASURE_ORDER = tuple(MeasureKind)


def distribution(values) -> np.ndarray:
    """Validate a vector as a label distribution and renormalize it.

    Entries may stray from [0, 1] by at most 1e-9 and the sum from 1 by at
    most 1e-6 (softmax outputs carry rounding error); the returned float64
    array is clipped and rescaled so the invariants hold exactly.
    """
    v = np.asarray(values, dtype=np.float64)
    if v.ndim != 1 or v.size < 2:
        raise LengthMismatchError("a distribution needs a 1-d vector with >= 2 entries")
    if not np.all(np.isfinite(v)):
        raise DomainError("distribution entries must be finite")
    if np.any(v < -ENTRY_TOL):
        raise NegativeEntryError(f"entry {v.min()!r} below 0 beyond tolerance {ENTRY_TOL}")
    if np.any(v > 1.0 + ENTRY_TOL):
        raise DomainError(f"entry {v.max()!r} above 1 beyond tolerance {ENTRY_TOL}")
    s = float(v.sum())
    if abs(s - 1.0) > SUM_TOL:
        raise DomainError(f"entries sum to {s!r}, expected 1 within {SUM_TOL}")
    v = np.clip(v, 0.0, 1.0)
    return v / v.sum()


def normalize_to_distribution(values) -> np.ndarray:
    """Scale a nonnegative vector to unit sum.

    Bridges raw semantic attribute vectors into the distribution domain.
    """
    v = np.asarray(values, dtype=np.float64)
    if v.ndim != 1 or v.size < 2:
        raise LengthMismatchError("need a 1-d vector with >= 2 entries")
    if not np.all(np.isfinite(v)):
        raise DomainError("entries must be finite")
    if np.any(v < 0.0):
        raise NegativeEntryError("cannot normalize a vector with negative entries")
    s = float(v.sum())
    if s == 0.0:
        raise AllZeroError("cannot normalize an all-zero vector")
    return v / s


def _pair(d, d_hat):
    d = np.asarray(d, dtype=np.float64)
    h = np.asarray(d_hat, dtype=np.float64)
    if d.ndim != 1 or h.ndim != 1 or d.shape != h.shape:
        raise LengthMismatchError(f"distribution lengths differ: {d.shape} vs {h.shape}")
    return d, h


def chebyshev(d, d_hat) -> float:
    d, h = _pair(d, d_hat)
    return float(np.max(np.abs(d - h)))


def clark(d, d_hat, strict: bool = False) -> float:
    d, h = _pair(d, d_hat)
    den = d + h
    zero = den == 0.0
    if zero.any():
        if strict:
            raise UndefinedTermError("0/0 term in Clark distance")
        # both-zero components contribute nothing
    num = (d - h) ** 2
    terms = np.divide(num, den * den, out=np.zeros_like(num), where=~zero)
    return float(np.sqrt(terms.sum()))


def canberra(d, d_hat, strict: bool = False) -> float:
    d, h = _pair(d, d_hat)
    den = d + h
    zero = den == 0.0
    if zero.any() and strict:
        raise UndefinedTermError("0/0 term in Canberra distance")
    num = np.abs(d - h)
    terms = np.divide(num, den, out=np.zeros_like(num), where=~zero)
    return float(terms.sum())


def kullback_leibler(d, d_hat, strict: bool = False) -> float:
    """KL(d || d_hat). The second argument is smoothed unless ``strict``."""
    d, h = _pair(d, d_hat)
    if strict:
        if np.any(h == 0.0):
            raise UndefinedTermError("log-of-zero or 0/0 term in KL divergence")
        q = h
    else:
        q = np.maximum(h, KL_EPSILON)
        q = q / q.sum()
    mask = d > 0.0
    return float(np.sum(d[mask] * np.log(d[mask] / q[mask])))


def cosine(d, d_hat) -> float:
    d, h = _pair(d, d_hat)
    na = float(np.sqrt(np.dot(d, d)))
    nb = float(np.sqrt(np.dot(h, h)))
    return float(np.dot(d, h) / (na * nb))


def intersection(d, d_hat) -> float:
    d, h = _pair(d, d_hat)
    # FP summation can overshoot 1 by an ulp on identical inputs
    return min(float(np.minimum(d, h).sum()), 1.0)


def measure(kind: MeasureKind, d, d_hat, strict: bool = False) -> float:
    """Evaluate one measure between a reference ``d`` and an estimate ``d_hat``.

    With ``strict`` the 0/0 -> 0 convention and the KL smoothing are both
    disabled and an undefined term raises ``UndefinedTermError``.
    """
    if kind is MeasureKind.CHEBYSHEV:
        return chebyshev(d, d_hat)
    if kind is MeasureKind.CLARK:
        return clark(d, d_hat, strict=strict)
    if kind is MeasureKind.CANBERRA:
        return canberra(d, d_hat, strict=strict)
    if kind is MeasureKind.KULLBACK_LEIBLER:
        return kullback_leibler(d, d_hat, strict=strict)
    if kind is MeasureKind.COSINE:
        return cosine(d, d_hat)
    if kind is MeasureKind.INTERSECTION:
        return intersection(d, d_hat)
    raise DomainError(f"unknown measure kind {kind!r}")


@dataclass(frozen=True)
class MeasureReport:
    """Per-kind means over a test set plus how many pairs were undefined.

    ``means[kind]`` is None when strict mode left no defined pair for that
    kind (rendered as a backslash cell by the CLI).
    """

    count: int
    means: dict
    undefined: dict

    def rows(self):
        for kind in MEASURE_ORDER:
            yield kind, self.means[kind], self.undefined[kind]


def aggregate_report(predictions, truths, strict: bool = False) -> MeasureReport:
    """Mean of every measure over (truth, prediction) pairs.

    In strict mode a pair whose terms are undefined for some measure is
    excluded from that measure's mean and counted instead.
    """
    n = len(predictions)
    if n == 0:
        raise EmptyInputError("no prediction/truth pairs")
    if n != len(truths):
        raise LengthMismatchError(f"{n} predictions vs {len(truths)} truths")
    dim = np.asarray(truths[0]).shape
    sums = {kind: 0.0 for kind in MEASURE_ORDER}
    defined = {kind: 0 for kind in MEASURE_ORDER}
    undefined = {kind: 0 for kind in MEASURE_ORDER}
    for pred, truth in zip(predictions, truths):
        if np.asarray(pred).shape != dim or np.asarray(truth).shape != dim:
            raise LengthMismatchError("pairs must share one dimension")
        for kind in MEASURE_ORDER:
            try:
                value = measure(kind, truth, pred, strict=strict)
            except UndefinedTermError:
                undefined[kind] += 1
                continue
            sums[kind] += value
            defined[kind] += 1
    means = {
        kind: (sums[kind] / defined[kind]) if defined[kind] else None
        for kind in MEASURE_ORDER
    }
    return MeasureReport(count=n, means=means, undefined=undefined)
