"""Sparse input selection for a single target, in the frequency domain.

The stationary inner product ``<x_a, x_b> = E[x_a(t) x_b(t)]`` is the grid
mean of the cross spectrum, so selecting a few input processes whose filtered
sum best explains a target is least squares in a Hilbert space of processes:
every candidate subset is scored by one joint unconstrained Wiener solve, and
the score is the integrated residual spectrum.

Three solvers:

* :func:`sparse_exhaustive` scans every subset up to the budget (exact,
  guarded by a combination count limit),
* :func:`matching_pursuit` is greedy on residual cross spectra without
  revisiting earlier filters (cheap, reported both raw and jointly refit),
* :func:`orthogonal_least_squares` is greedy with a full joint refit when
  scoring every candidate extension (the usual accuracy/cost middle ground).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .diagnostics import record
from .errors import (
    CombinatorialLimitError,
    InvalidParameterError,
    InvalidSpectrumError,
)
from .signals import SpectralMatrix
from .wiener import TransferFunction, _input_blocks, noncausal_wiener

#: Hard cap on the number of subsets the exhaustive solver will score.
EXHAUSTIVE_LIMIT = 100_000

#: Fraction of the running cost a greedy step must remove to continue.
DEFAULT_MIN_GAIN = 0.01

#: Gains below this fraction of the *initial* cost are numerical noise.
NEGLIGIBLE_RTOL = 1e-12


@dataclass
class SparseModel:
    """Result of one sparse selection run for a single target."""

    target: int
    support: tuple[int, ...]
    filters: dict[int, TransferFunction]
    cost: float
    solver: str
    stop_reason: str
    raw_filters: dict[int, TransferFunction] | None = None
    raw_cost: float | None = None

    def __post_init__(self):
        self.support = tuple(sorted(self.support))
        if self.target in self.support:
            raise InvalidParameterError("target cannot be in its own support")
        if set(self.filters) != set(self.support):
            raise InvalidParameterError("filters must cover the support exactly")
        if self.cost < 0:
            raise InvalidParameterError("cost must be non-negative")


def inner_product(S: SpectralMatrix, a: int, b: int) -> float:
    """Stationary inner product ``E[x_a(t) x_b(t)]`` as a grid mean.

    Real processes give conjugate-symmetric cross spectra, so the mean must
    be real; a material imaginary part means the matrix is corrupt.
    """
    values = S.values[a, b]
    mean = complex(np.mean(values))
    scale = max(float(np.max(np.abs(values))), np.finfo(float).tiny)
    if abs(mean.imag) > 1e-8 * scale:
        raise InvalidSpectrumError(
            f"integrated cross spectrum ({a}, {b}) has imaginary part "
            f"{mean.imag:.3e}; spectra of real series must be "
            f"conjugate-symmetric in frequency")
    return mean.real


def _verify_projection(S: SpectralMatrix, target: int, inputs,
                       filters: dict[int, TransferFunction]) -> None:
    """Check the normal equations hold: residual orthogonal to every input."""
    A, c = _input_blocks(S, target, list(inputs))
    W = np.stack([filters[b].response for b in inputs], axis=1)
    lhs = np.einsum("kab,kb->ka", A, W)
    scale = max(
        float(np.max(np.abs(c))),
        float(np.max(np.abs(A))) * max(float(np.max(np.abs(W))), 1.0),
        np.finfo(float).tiny,
    )
    worst = float(np.max(np.abs(c - lhs)))
    if worst > 1e-8 * scale:
        raise InvalidSpectrumError(
            f"projection for target {target} violates orthogonality by "
            f"{worst:.3e} (scale {scale:.3e})")


def project(S: SpectralMatrix, target: int, support
            ) -> tuple[dict[int, TransferFunction], float]:
    """Joint least-squares fit of ``target`` on a fixed input set.

    Empty support returns no filters and the target's own power.  The
    returned cost is ``E[(x_t - sum W_b x_b)^2]``.
    """
    support = tuple(sorted(support))
    if not support:
        return {}, max(inner_product(S, target, target), 0.0)
    sol = noncausal_wiener(S, target, support)
    _verify_projection(S, target, support, sol.filters)
    return sol.filters, sol.cost


def _candidates(S: SpectralMatrix, target: int) -> list[int]:
    if not 0 <= target < S.n:
        raise InvalidParameterError(f"target {target} out of range for n={S.n}")
    return [b for b in range(S.n) if b != target]


def sparse_exhaustive(S: SpectralMatrix, target: int, max_inputs: int
                      ) -> SparseModel:
    """Exact best subset of at most ``max_inputs`` inputs.

    Scans sizes in increasing order and, inside a size, subsets in
    lexicographic order; only strict cost improvements replace the
    incumbent, so ties resolve to the smallest then lexicographically
    first support.
    """
    if max_inputs < 0:
        raise InvalidParameterError("max_inputs must be >= 0")
    pool = _candidates(S, target)
    top = min(max_inputs, len(pool))
    total = sum(math.comb(len(pool), s) for s in range(top + 1))
    if total > EXHAUSTIVE_LIMIT:
        raise CombinatorialLimitError(
            f"exhaustive search over {total} subsets exceeds the "
            f"{EXHAUSTIVE_LIMIT} limit; use a greedy solver")
    best_support: tuple[int, ...] = ()
    best_filters, best_cost = project(S, target, ())
    for size in range(1, top + 1):
        for combo in itertools.combinations(pool, size):
            filters, cost = project(S, target, combo)
            if cost < best_cost:
                best_support, best_filters, best_cost = combo, filters, cost
    return SparseModel(target, best_support, best_filters, best_cost,
                       solver="exhaustive", stop_reason="complete")


def matching_pursuit(S: SpectralMatrix, target: int, max_inputs: int,
                     min_gain: float = DEFAULT_MIN_GAIN) -> SparseModel:
    """Greedy selection on residual cross spectra, one new filter per step.

    After picking input ``b`` with per-frequency filter
    ``V = Phi_{b,r} / phi_b``, the residual bookkeeping is closed form:
    the residual power drops by ``|Phi_{b,r}|^2 / phi_b`` and every other
    candidate's cross spectrum to the residual drops by ``V Phi_{a,b}``.
    Earlier filters are never revisited, so the raw model is reported
    alongside a joint refit on the selected support.  ``min_gain`` gates
    every atom after the first; gains that are numerical noise relative to
    the initial power stop the pursuit regardless.
    """
    if max_inputs < 0:
        raise InvalidParameterError("max_inputs must be >= 0")
    if not 0 <= min_gain < 1:
        raise InvalidParameterError("min_gain must be in [0, 1)")
    pool = _candidates(S, target)
    floored = {b: S.floored_autospectrum(b) for b in pool}
    cross = {b: S.values[b, target].copy() for b in pool}
    phi_r = np.maximum(np.real(S.values[target, target]).copy(), 0.0)
    initial = max(float(np.mean(phi_r)), np.finfo(float).tiny)
    cost = float(np.mean(phi_r))
    raw_filters: dict[int, np.ndarray] = {}
    stop_reason = "budget"
    while True:
        if len(raw_filters) >= max_inputs:
            stop_reason = "budget"
            break
        unused = [b for b in pool if b not in raw_filters]
        if not unused:
            stop_reason = "exhausted"
            break
        gains = {b: float(np.mean(np.abs(cross[b]) ** 2 / floored[b]))
                 for b in unused}
        best = min(unused, key=lambda b: (-gains[b], b))
        gain = gains[best]
        if gain <= NEGLIGIBLE_RTOL * initial:
            stop_reason = "negligible-gain"
            break
        if raw_filters and gain < min_gain * max(cost, np.finfo(float).tiny):
            stop_reason = "min-gain"
            break
        V = cross[best] / floored[best]
        phi_r = np.maximum(phi_r - np.abs(cross[best]) ** 2 / floored[best], 0.0)
        for b in unused:
            if b != best:
                cross[b] = cross[b] - V * S.values[b, best]
        raw_filters[best] = V
        cost = float(np.mean(phi_r))
    support = tuple(sorted(raw_filters))
    refit_filters, refit_cost = project(S, target, support)
    if refit_cost > cost + 1e-8 * max(1.0, cost):
        record("sparse-refit",
               f"joint refit cost {refit_cost:.6e} above greedy bookkeeping "
               f"{cost:.6e} for target {target}")
    raw = {b: TransferFunction(S.grid, resp) for b, resp in raw_filters.items()}
    return SparseModel(target, support, refit_filters, refit_cost,
                       solver="mp", stop_reason=stop_reason,
                       raw_filters=raw, raw_cost=cost)


def orthogonal_least_squares(S: SpectralMatrix, target: int, max_inputs: int,
                             min_gain: float = DEFAULT_MIN_GAIN) -> SparseModel:
    """Greedy selection where each candidate is scored by a joint refit.

    Equivalent to matching pursuit for the first atom; afterwards each step
    re-solves the full filter bank for every candidate extension and keeps
    the best, so filters are always jointly optimal for the reported
    support.  Stopping rules match :func:`matching_pursuit`.
    """
    if max_inputs < 0:
        raise InvalidParameterError("max_inputs must be >= 0")
    if not 0 <= min_gain < 1:
        raise InvalidParameterError("min_gain must be in [0, 1)")
    pool = _candidates(S, target)
    support: list[int] = []
    filters, cost = project(S, target, ())
    initial = max(cost, np.finfo(float).tiny)
    stop_reason = "budget"
    while True:
        if len(support) >= min(max_inputs, len(pool)):
            stop_reason = "budget" if len(support) == max_inputs else "exhausted"
            break
        trials = {}
        for b in pool:
            if b in support:
                continue
            trials[b] = project(S, target, support + [b])
        best = min(trials, key=lambda b: (trials[b][1], b))
        best_filters, best_cost = trials[best]
        gain = cost - best_cost
        if gain <= NEGLIGIBLE_RTOL * initial:
            stop_reason = "negligible-gain"
            break
        if support and gain < min_gain * max(cost, np.finfo(float).tiny):
            stop_reason = "min-gain"
            break
        support.append(best)
        filters, cost = best_filters, best_cost
    return SparseModel(target, tuple(support), filters, cost,
                       solver="ols", stop_reason=stop_reason)
