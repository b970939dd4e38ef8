"""Distances between processes derived from coherence and Wiener residuals.

The symmetric coherence distance of a pair is
``d = sqrt(mean_k(1 - C(omega_k)))``, a pseudo-metric with range [0, 1]:
0 for pairs linked by a noiseless invertible filter, 1 for uncorrelated
pairs.  Its causal counterpart is the square root of the whitened one-sided
Wiener cost, which is direction dependent and never smaller than the
symmetric distance of the same pair.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .diagnostics import record
from .errors import (
    DegenerateSeriesError,
    InsufficientDataError,
    InvalidParameterError,
)
from .signals import (
    Ensemble,
    SpectralMatrix,
    Spectrum,
    TimeSeries,
    WelchConfig,
    coherence_function,
    spectral_matrix,
)
from .wiener import _causal_core, causal_wiener, spectral_factorize

SYMMETRIC_KINDS = ("noncausal", "correlation", "causal-min")
KINDS = SYMMETRIC_KINDS + ("causal",)

#: Triangle-inequality slack tolerated on estimated spectra before a
#: diagnostic event is recorded.
TRIANGLE_TOL = 0.05


@dataclass
class DistanceMatrix:
    """Square matrix of pairwise distances with zero diagonal.

    ``kind`` states the construction: "noncausal" (coherence), "causal"
    (row = target, column = input), "correlation" (zero-lag), or
    "causal-min" (pairwise minimum of the two causal directions).  All kinds
    except "causal" are symmetric by construction.
    """

    labels: list[str]
    values: np.ndarray
    kind: str

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidParameterError(f"unknown distance kind {self.kind!r}")
        self.values = np.asarray(self.values, dtype=float)
        n = len(self.labels)
        if self.values.shape != (n, n):
            raise InvalidParameterError("distance matrix shape mismatch")
        if np.any(self.values < 0.0):
            raise InvalidParameterError("distances must be non-negative")
        if np.any(np.diag(self.values) != 0.0):
            raise InvalidParameterError("diagonal distances must be zero")
        if self.kind in SYMMETRIC_KINDS and not np.array_equal(
                self.values, self.values.T):
            raise InvalidParameterError(f"{self.kind} matrix must be symmetric")

    @property
    def n(self) -> int:
        return len(self.labels)


@dataclass
class DirectionMatrix:
    """Antisymmetric orientation marks for causal edge weights.

    ``values[j, i] = +1`` means the pair's minimal one-sided cost models
    series ``j`` from input ``i`` (direction i -> j); ``-1`` means the
    opposite; the diagonal is 0.  ``ties[j, i]`` flags pairs whose two
    directions cost the same, broken deterministically.
    """

    labels: list[str]
    values: np.ndarray
    ties: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=int)
        self.ties = np.asarray(self.ties, dtype=bool)
        n = len(self.labels)
        if self.values.shape != (n, n) or self.ties.shape != (n, n):
            raise InvalidParameterError("direction matrix shape mismatch")
        if not np.all(np.isin(self.values, (-1, 0, 1))):
            raise InvalidParameterError("direction entries must be -1, 0, +1")
        if np.any(self.values != -self.values.T):
            raise InvalidParameterError("direction matrix must be antisymmetric")
        if np.any(np.diag(self.values) != 0):
            raise InvalidParameterError("direction diagonal must be zero")


def coherence_distance(S: SpectralMatrix, i: int, j: int) -> float:
    """Coherence pseudo-distance of one pair, ``sqrt(mean(1 - C))``.

    Symmetric in its arguments; exactly zero when ``i == j``.
    """
    if i == j:
        if not 0 <= i < S.n:
            raise InvalidParameterError(f"index {i} out of range")
        return 0.0
    curve = coherence_function(S, i, j)
    return float(np.sqrt(max(np.mean(1.0 - curve.values), 0.0)))


def _log_triangle_breaches(labels, values: np.ndarray, tol: float) -> None:
    n = values.shape[0]
    if n < 3 or n > 256:
        return
    sums = values[:, :, None] + values[None, :, :]   # [i, j, k] = d(i,j)+d(j,k)
    worst = float(np.max(values[:, None, :] - sums))
    if worst > tol:
        record("triangle-breach",
               f"triangle inequality violated by {worst:.4f} "
               f"(tolerance {tol})")


def distance_matrix(S: SpectralMatrix) -> DistanceMatrix:
    """Symmetric matrix of coherence distances for every pair.

    Entries with ``i < j`` are computed once and mirrored, so symmetry is
    exact.  Near-zero off-diagonal distances (duplicated series) and
    triangle-inequality breaches beyond :data:`TRIANGLE_TOL` are recorded as
    diagnostics; on analytic spectra neither occurs.
    """
    n = S.n
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            d = coherence_distance(S, i, j)
            out[i, j] = out[j, i] = d
            if d < 1e-9:
                record("degenerate-pair",
                       f"{S.labels[i]!r} and {S.labels[j]!r} are at distance "
                       f"{d:.3e}; duplicated series?")
    _log_triangle_breaches(S.labels, out, TRIANGLE_TOL)
    return DistanceMatrix(list(S.labels), out, "noncausal")


def causal_distance(S: SpectralMatrix, target: int, input_: int) -> float:
    """One-sided modelling distance: root of the whitened causal Wiener cost.

    Asymmetric: ``causal_distance(S, j, i)`` measures how well the past of
    series ``i`` explains series ``j``.  Lies in [0, 1] up to numerical
    tolerance because the zero filter already costs 1.
    """
    if target == input_:
        if not 0 <= target < S.n:
            raise InvalidParameterError(f"index {target} out of range")
        return 0.0
    return float(np.sqrt(max(causal_wiener(S, target, input_).cost, 0.0)))


def causal_distance_matrix(S: SpectralMatrix) -> DistanceMatrix:
    """All pairwise one-sided distances; rows are targets, columns inputs.

    Spectral factors are computed once per series and shared across the
    ``n*(n-1)`` solves.
    """
    n = S.n
    factors = [
        spectral_factorize(Spectrum(S.grid, S.floored_autospectrum(i))).response
        for i in range(n)
    ]
    out = np.zeros((n, n))
    for j in range(n):
        for i in range(n):
            if i == j:
                continue
            sol = _causal_core(S, j, i, factors[j], factors[i])
            out[j, i] = np.sqrt(max(sol.cost, 0.0))
    return DistanceMatrix(list(S.labels), out, "causal")


def causal_edge_weights(DC: DistanceMatrix) -> tuple[DistanceMatrix, DirectionMatrix]:
    """Fold a causal matrix into symmetric weights plus orientations.

    The weight of a pair is the cheaper of its two modelling directions; the
    direction matrix marks which direction won, ``+1`` at ``[j, i]`` meaning
    i -> j.  Exact ties are broken toward ``+1`` on the upper triangle
    (the edge points from the higher to the lower index) and flagged.
    """
    if DC.kind != "causal":
        raise InvalidParameterError("causal_edge_weights needs a causal matrix")
    n = DC.n
    weights = np.zeros((n, n))
    direction = np.zeros((n, n), dtype=int)
    ties = np.zeros((n, n), dtype=bool)
    for a in range(n):
        for b in range(a + 1, n):
            d_ab, d_ba = DC.values[a, b], DC.values[b, a]
            weights[a, b] = weights[b, a] = min(d_ab, d_ba)
            if d_ab == d_ba:
                direction[a, b], direction[b, a] = 1, -1
                ties[a, b] = ties[b, a] = True
                record("tie", f"causal tie between {DC.labels[a]!r} and "
                              f"{DC.labels[b]!r} at {d_ab:.6f}")
            elif d_ab < d_ba:
                direction[a, b], direction[b, a] = 1, -1
            else:
                direction[a, b], direction[b, a] = -1, 1
    return (DistanceMatrix(list(DC.labels), weights, "causal-min"),
            DirectionMatrix(list(DC.labels), direction, ties))


def correlation_distance_matrix(ens: Ensemble) -> DistanceMatrix:
    """Zero-lag correlation distances ``sqrt(2 * (1 - rho))``.

    ``rho`` is the plain Pearson correlation of the samples, so the range is
    [0, 2] with 2 attained by perfect anti-correlation.  A zero-variance
    series cannot be correlated and raises.
    """
    data = ens.values()
    std = data.std(axis=1)
    for label, s in zip(ens.labels, std):
        if s == 0.0:
            raise DegenerateSeriesError(
                f"series {label!r} has zero variance")
    rho = np.corrcoef(data)
    rho = np.clip(rho, -1.0, 1.0)
    out = np.sqrt(2.0 * (1.0 - rho))
    out = 0.5 * (out + out.T)
    np.fill_diagonal(out, 0.0)
    return DistanceMatrix(list(ens.labels), out, "correlation")


def spearman_index(A: DistanceMatrix, B: DistanceMatrix) -> float | None:
    """Spearman rank correlation of two symmetric matrices' upper triangles.

    Ties receive average ranks.  With fewer than two off-diagonal pairs the
    index is undefined and ``None`` is returned (recorded as a diagnostic).
    """
    if A.kind not in SYMMETRIC_KINDS or B.kind not in SYMMETRIC_KINDS:
        raise InvalidParameterError("spearman_index needs symmetric matrices")
    if A.labels != B.labels:
        raise InvalidParameterError("matrices are over different labels")
    iu = np.triu_indices(A.n, k=1)
    xa, xb = A.values[iu], B.values[iu]
    if xa.size < 2:
        record("spearman-undefined",
               "fewer than two pairs; rank index undefined")
        return None
    result = stats.spearmanr(xa, xb)
    return float(result.statistic)


def windowed_average_distance(ens: Ensemble, window_length: int,
                              cfg: WelchConfig) -> DistanceMatrix:
    """Average coherence distances over consecutive non-overlapping windows.

    The record is cut into ``floor(length / window_length)`` windows; each
    window is re-ingested as its own ensemble (fresh mean removal), measured
    with :func:`distance_matrix`, and the matrices are averaged entrywise.
    A trailing partial window is discarded.
    """
    if window_length < 2:
        raise InvalidParameterError("window_length must be >= 2")
    count = ens.length // window_length
    if count < 1:
        raise InsufficientDataError(
            f"record of {ens.length} samples is shorter than one window "
            f"of {window_length}")
    data = ens.values()
    total = np.zeros((ens.n, ens.n))
    for w in range(count):
        chunk = data[:, w * window_length:(w + 1) * window_length]
        sub = Ensemble([TimeSeries(label, row)
                        for label, row in zip(ens.labels, chunk)])
        total += distance_matrix(spectral_matrix(sub, cfg)).values
    return DistanceMatrix(list(ens.labels), total / count, "noncausal")
