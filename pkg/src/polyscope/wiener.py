"""Wiener filtering on the frequency grid.

The non-causal filter is the per-frequency least-squares solution
``W(omega) = Phi_x(omega)^{-1} c(omega)`` with ``c_a = Phi_{x_a -> y}``; it
is weighting-independent.  The causal filter solves the one-sided problem
through the classical Wiener--Hopf split: factor the input spectrum as
``Phi = G * conj(G)`` with ``G`` minimum phase, keep the causal part of the
whitened cross spectrum, and undo the whitening,

    W_c = Fj_inv_factor * { Fj * Phi_xy / conj(G) }_causal / G,

where ``Fj`` whitens the target so that the reported cost is the
dimensionless error variance of the whitened residual (1 for the zero
filter).  Spectral factorization uses the real-cepstrum construction, which
is exact in magnitude on the grid by design.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .diagnostics import record
from .errors import (
    IllConditionedSpectrumError,
    InsufficientDataError,
    InvalidParameterError,
    InvalidSpectrumError,
)
from .signals import FrequencyGrid, PSD_FLOOR_RATIO, SpectralMatrix, Spectrum, TimeSeries

#: Fraction of total impulse energy that may be discarded by support
#: truncation before a diagnostic event is recorded.
TRUNCATION_ENERGY_TOL = 1e-6

#: Relative eigenvalue ratio below which an input spectral matrix is
#: declared singular beyond the floor.
CONDITION_RTOL = 1e-10


@dataclass
class TransferFunction:
    """A linear filter known by its grid response, optionally by its taps.

    ``impulse[u]`` (when present) is the real coefficient at time
    ``support_offset + u``; a causal filter has ``support_offset >= 0``.
    Filters built from taps satisfy ``DFT(impulse) == response`` exactly;
    filters materialised from a response keep the analytic response and may
    record a truncation-energy diagnostic when the discarded tail is not
    negligible.
    """

    grid: FrequencyGrid
    response: np.ndarray
    impulse: np.ndarray | None = None
    support_offset: int = 0

    def __post_init__(self):
        self.response = np.asarray(self.response, dtype=complex)
        if self.response.shape != (self.grid.size,):
            raise InvalidParameterError("response length must match the grid")
        if self.impulse is not None:
            self.impulse = np.asarray(self.impulse, dtype=float)
            if self.impulse.ndim != 1 or self.impulse.size == 0:
                raise InvalidParameterError("impulse must be a non-empty 1-d array")

    @classmethod
    def from_taps(cls, grid: FrequencyGrid, taps, offset: int = 0) -> "TransferFunction":
        taps = np.asarray(taps, dtype=float)
        return cls(grid, grid.response_from_taps(taps, offset), taps, offset)

    @property
    def is_causal(self) -> bool:
        return self.impulse is not None and self.support_offset >= 0

    def rms(self) -> float:
        """Root mean square response magnitude over the grid."""
        return float(np.sqrt(np.mean(np.abs(self.response) ** 2)))

    def with_impulse(self, support: str = "centered") -> "TransferFunction":
        """Materialise an impulse response of length K/2 from the response.

        ``support="centered"`` keeps taps on ``[-K/4, K/4)`` (non-causal
        filters), ``support="causal"`` keeps ``[0, K/2)``.  The discarded
        energy fraction is checked against :data:`TRUNCATION_ENERGY_TOL`.
        """
        if self.impulse is not None:
            return self
        k = self.grid.size
        taps, offset = self.grid.taps_from_response(self.response)
        if support == "centered":
            lo = k // 4            # tap index of time -K/4
            kept = taps[lo:lo + k // 2]
            new_offset = -(k // 4)
        elif support == "causal":
            lo = k // 2            # tap index of time 0
            kept = taps[lo:]
            new_offset = 0
        else:
            raise InvalidParameterError(f"unknown support {support!r}")
        total = float(np.sum(taps ** 2))
        lost = total - float(np.sum(kept ** 2))
        if total > 0 and lost > TRUNCATION_ENERGY_TOL * total:
            record("truncation-energy",
                   f"impulse truncation discards {lost / total:.2e} "
                   f"of the energy ({support} support)")
        return TransferFunction(self.grid, self.response, kept, new_offset)

    def impulse_matches_response(self, rtol: float = 1e-8) -> bool:
        """Check the DFT of the stored impulse against the stored response."""
        if self.impulse is None:
            return True
        rebuilt = self.grid.response_from_taps(self.impulse, self.support_offset)
        scale = np.max(np.abs(self.response))
        if scale == 0.0:
            return bool(np.max(np.abs(rebuilt)) == 0.0)
        return bool(np.max(np.abs(rebuilt - self.response)) <= rtol * scale)


@dataclass
class WienerSolution:
    """Optimal filters for one target, with the residual error spectrum.

    ``cost`` equals the grid mean of ``residual_spectrum`` (the
    ``(1/2pi) d omega`` integral); whether that spectrum is raw or whitened
    by the target factor depends on the operation that produced it.
    """

    target: int
    inputs: tuple[int, ...]
    filters: dict[int, TransferFunction]
    cost: float
    residual_spectrum: Spectrum

    def __post_init__(self):
        if self.cost < 0:
            raise InvalidParameterError("cost must be non-negative")
        mean = float(np.real(np.mean(self.residual_spectrum.values)))
        if abs(mean - self.cost) > 1e-8 * max(1.0, abs(self.cost)):
            raise InvalidParameterError(
                "cost is not the grid mean of the residual spectrum")


def _input_blocks(S: SpectralMatrix, target: int, inputs) -> tuple[np.ndarray, np.ndarray]:
    """Per-frequency normal equation blocks ``A (K,k,k)`` and ``c (K,k)``."""
    inputs = list(inputs)
    if not inputs:
        raise InvalidParameterError("at least one input is required")
    if len(set(inputs)) != len(inputs):
        raise InvalidParameterError("duplicate inputs")
    if target in inputs:
        raise InvalidParameterError("target cannot be one of its inputs")
    for idx in inputs + [target]:
        if not 0 <= idx < S.n:
            raise InvalidParameterError(f"index {idx} out of range for n={S.n}")
    A = S.values[np.ix_(inputs, inputs)].transpose(2, 0, 1).copy()
    floor = S.psd_floor() or np.finfo(float).tiny
    d = np.arange(len(inputs))
    A[:, d, d] = np.maximum(A[:, d, d].real, floor)
    c = S.values[inputs, target].T.copy()
    return A, c


def _check_conditioning(S: SpectralMatrix, A: np.ndarray) -> None:
    eigs = np.linalg.eigvalsh(A)
    worst = np.argmin(eigs[:, 0] / eigs[:, -1])
    if eigs[worst, 0] < CONDITION_RTOL * eigs[worst, -1]:
        omega = S.grid.omegas[worst]
        raise IllConditionedSpectrumError(
            f"input spectral matrix singular beyond the floor at "
            f"omega={omega:.6f} (eigenvalue ratio "
            f"{eigs[worst, 0] / eigs[worst, -1]:.3e})")


def noncausal_wiener(S: SpectralMatrix, target: int, inputs,
                     normalize: bool = False) -> WienerSolution:
    """Unconstrained (two-sided) multi-input Wiener filter.

    Solves ``A(omega) W(omega) = c(omega)`` independently at each grid point,
    where ``A`` is the input sub-matrix of ``S`` and ``c`` the cross spectra
    from the inputs to the target.  The solution does not depend on any
    spectral weighting of the error.

    Parameters
    ----------
    S : SpectralMatrix
    target : int
        Index of the modelled series.
    inputs : sequence of int
        Non-empty, duplicate-free, not containing ``target``.
    normalize : bool
        When True the residual spectrum and cost are divided by the target
        auto-spectrum (whitened-error units, zero filter costs 1).  The
        filters themselves are identical either way.

    Returns
    -------
    WienerSolution
        ``cost`` is the residual variance ``E[(y - W x)^2]`` (or its
        whitened counterpart), always within ``[0, var(y)]``.
    """
    inputs = tuple(inputs)
    A, c = _input_blocks(S, target, inputs)
    _check_conditioning(S, A)
    W = np.linalg.solve(A, c[..., None])[..., 0]    # (K, k)
    phi_t = np.real(S.values[target, target])
    explained = np.real(np.sum(np.conj(c) * W, axis=-1))
    residual = np.maximum(phi_t - explained, 0.0)
    if normalize:
        residual = residual / S.floored_autospectrum(target)
    filters = {a: TransferFunction(S.grid, W[:, pos].copy())
               for pos, a in enumerate(inputs)}
    return WienerSolution(target, inputs, filters,
                          float(np.mean(residual)),
                          Spectrum(S.grid, residual))


def spectral_factorize(phi: Spectrum) -> TransferFunction:
    """Minimum-phase spectral factor of a real positive auto-spectrum.

    Uses the real-cepstrum construction: halve the log spectrum, fold its
    inverse DFT onto causal support, exponentiate the DFT back.  The
    returned filter ``F`` is causal with a positive leading tap and satisfies
    ``|F(omega)|^2 == phi(omega)`` exactly on the grid (in its analytic
    response; the stored impulse keeps the first K/2 taps).
    """
    values = phi.values
    scale = float(np.max(np.abs(values)))
    if scale == 0.0:
        raise InvalidSpectrumError("cannot factorize an identically zero spectrum")
    if np.max(np.abs(values.imag)) > 1e-10 * scale:
        raise InvalidSpectrumError("auto-spectrum has a non-real part")
    real = values.real
    if np.min(real) < -1e-10 * scale:
        raise InvalidSpectrumError("auto-spectrum is negative")
    floor = PSD_FLOOR_RATIO * scale
    if np.any(real < floor):
        record("spectral-floor",
               f"factorization input floored at {floor:.3e}")
        real = np.maximum(real, floor)

    k = phi.grid.size
    log_std = np.log(np.fft.ifftshift(real))
    cepstrum = np.fft.ifft(log_std).real
    folded = np.zeros(k)
    folded[0] = 0.5 * cepstrum[0]
    folded[1:k // 2] = cepstrum[1:k // 2]
    folded[k // 2] = 0.5 * cepstrum[k // 2]
    response_std = np.exp(np.fft.fft(folded))
    response = np.fft.fftshift(response_std)

    taps_full = np.fft.ifft(response_std).real
    taps = taps_full[:k // 2]
    tail = float(np.sum(taps_full[k // 2:] ** 2))
    total = float(np.sum(taps_full ** 2))
    if total > 0 and tail > TRUNCATION_ENERGY_TOL * total:
        record("truncation-energy",
               f"spectral factor tail holds {tail / total:.2e} of the energy")
    return TransferFunction(phi.grid, response, taps, 0)


def causal_truncate(h: TransferFunction) -> TransferFunction:
    """Zero every strictly anti-causal tap of a filter.

    The tap at time zero is kept.  Already-causal filters are returned
    unchanged; a filter known only by its response is first expanded onto
    the full centred support.  The response of the result is recomputed from
    the surviving taps, so truncation is idempotent.
    """
    if h.impulse is None:
        taps, offset = h.grid.taps_from_response(h.response)
    else:
        taps, offset = h.impulse, h.support_offset
    if offset >= 0:
        return h if h.impulse is not None else TransferFunction.from_taps(
            h.grid, taps, offset)
    first = -offset
    kept = taps[first:]
    if kept.size == 0:
        kept = np.zeros(1)
    return TransferFunction.from_taps(h.grid, kept, 0)


def _causal_part(grid: FrequencyGrid, response: np.ndarray) -> np.ndarray:
    """Response of the causal part: zero taps at negative times, keep t=0."""
    seq = np.fft.ifft(np.fft.ifftshift(response))
    seq[grid.size // 2:] = 0.0
    return np.fft.fftshift(np.fft.fft(seq))


def _causal_core(S: SpectralMatrix, target: int, input_: int,
                 target_factor: np.ndarray, input_factor: np.ndarray) -> WienerSolution:
    """Wiener--Hopf solution given precomputed spectral factors."""
    grid = S.grid
    phi_i = S.floored_autospectrum(input_)
    phi_j = S.floored_autospectrum(target)
    cross = S.values[input_, target]
    whiten = 1.0 / target_factor                    # F_j
    bracket = whiten * cross / np.conj(input_factor)
    causal = _causal_part(grid, bracket)
    response = causal / input_factor * target_factor
    tf = TransferFunction(grid, response).with_impulse("causal")

    err = phi_j + np.abs(response) ** 2 * phi_i \
        - 2.0 * np.real(np.conj(response) * cross)
    weighted = np.maximum(err, 0.0) / phi_j
    return WienerSolution(target, (input_,), {input_: tf},
                          float(np.mean(weighted)),
                          Spectrum(grid, weighted))


def causal_wiener(S: SpectralMatrix, target: int, input_: int) -> WienerSolution:
    """One-sided (causal) Wiener filter of ``target`` on a single input.

    The target is whitened by its inverse spectral factor before the causal
    truncation, so the reported cost is dimensionless: the zero filter costs
    exactly 1 and the optimum can only be smaller.  The filter itself is
    causal; its cost is never below the non-causal whitened cost of the same
    pair.

    Parameters
    ----------
    S : SpectralMatrix
    target, input_ : int
        Distinct series indices.

    Returns
    -------
    WienerSolution
        ``residual_spectrum`` is the whitened error spectrum; ``cost`` is
        its grid mean.
    """
    if target == input_:
        raise InvalidParameterError("target and input must differ")
    for idx in (target, input_):
        if not 0 <= idx < S.n:
            raise InvalidParameterError(f"index {idx} out of range for n={S.n}")
    f_target = spectral_factorize(Spectrum(S.grid, S.floored_autospectrum(target)))
    f_input = spectral_factorize(Spectrum(S.grid, S.floored_autospectrum(input_)))
    return _causal_core(S, target, input_, f_target.response, f_input.response)


def apply_filter(h: TransferFunction, x: TimeSeries) -> TimeSeries:
    """Convolve a series with a filter's impulse response.

    The output has the same length as the input; samples that would need
    data beyond either end are computed against zero padding and their count
    is recorded as a ``transient`` diagnostic.  A filter without a stored
    impulse is materialised on the centred support first.
    """
    if h.impulse is None:
        h = h.with_impulse("centered")
    if x.length < 1:
        raise InsufficientDataError("empty input series")
    taps = h.impulse
    full = np.convolve(x.samples, taps)
    n = x.length
    out = np.zeros(n)
    # y[t] = full[t - offset] where that index exists
    t_lo = max(0, h.support_offset)
    t_hi = min(n, full.size + h.support_offset)
    if t_lo < t_hi:
        out[t_lo:t_hi] = full[t_lo - h.support_offset:t_hi - h.support_offset]
    leading = min(n, max(0, h.support_offset + taps.size - 1))
    trailing = min(n, max(0, -h.support_offset))
    transient = leading + trailing
    record("transient", f"{transient} edge samples of {x.label!r} are "
                        f"transient after filtering")
    return TimeSeries(x.label, out)
