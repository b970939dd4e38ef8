"""Time-series containers and spectral estimation on a shared frequency grid.

All spectral quantities live on a uniform grid of K angular frequencies
``omega_k = -pi + 2*pi*k/K``; frequency-domain integrals are evaluated as
``(1/2pi) * sum(f(omega_k)) * (2pi/K)``, i.e. the plain grid mean.  Cross
power spectra follow the convention ``Phi_xy(omega) = sum_tau E[x(t)
y(t+tau)] exp(-1j*omega*tau)``, which the Welch estimator realises as
``conj(X) * Y`` per windowed segment.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.signal import get_window

from .diagnostics import record
from .errors import (
    InsufficientDataError,
    InvalidParameterError,
)

#: Relative floor applied to auto-spectra before divisions: the floor value is
#: this ratio times the largest diagonal spectral value of the matrix.
PSD_FLOOR_RATIO = 1e-12


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform grid of ``size`` angular frequencies on [-pi, pi)."""

    size: int

    def __post_init__(self):
        if self.size < 8 or self.size % 2 != 0:
            raise InvalidParameterError(
                f"grid size must be even and >= 8, got {self.size}")

    @property
    def omegas(self) -> np.ndarray:
        return -np.pi + 2.0 * np.pi * np.arange(self.size) / self.size

    def integrate(self, values: np.ndarray):
        """``(1/2pi) * sum(values) * (2pi/K)`` — the mean over grid points."""
        return np.mean(values, axis=-1)

    def response_from_taps(self, taps: np.ndarray, offset: int = 0) -> np.ndarray:
        """Evaluate ``sum_t a(t) exp(-1j*omega*t)`` on the grid.

        ``taps[u]`` is the coefficient at time ``offset + u``.  Exact for any
        integer support because the grid points are K-th roots of unity.
        """
        taps = np.asarray(taps, dtype=float)
        if taps.ndim != 1:
            raise InvalidParameterError("taps must be one-dimensional")
        if taps.size > self.size:
            raise InvalidParameterError(
                f"{taps.size} taps exceed the grid size {self.size}")
        buf = np.zeros(self.size)
        idx = (offset + np.arange(taps.size)) % self.size
        np.add.at(buf, idx, taps)
        return np.fft.fftshift(np.fft.fft(buf))

    def taps_from_response(self, response: np.ndarray) -> tuple[np.ndarray, int]:
        """Invert :meth:`response_from_taps` onto the centred support.

        Returns ``(taps, offset)`` with ``offset = -K/2``, one real tap per
        grid sample, time running over ``[-K/2, K/2)``.  A warning event is
        recorded when the response is materially non-Hermitian (complex
        impulse response).
        """
        response = np.asarray(response, dtype=complex)
        if response.shape != (self.size,):
            raise InvalidParameterError("response length must match the grid")
        seq = np.fft.ifft(np.fft.ifftshift(response))
        scale = np.max(np.abs(seq))
        if scale > 0 and np.max(np.abs(seq.imag)) > 1e-8 * scale:
            record("non-real-impulse",
                   "impulse response has a non-negligible imaginary part")
        return np.fft.fftshift(seq.real), -(self.size // 2)


@dataclass
class TimeSeries:
    """A labelled, uniformly sampled, real scalar series."""

    label: str
    samples: np.ndarray

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=float)
        if self.samples.ndim != 1 or self.samples.size == 0:
            raise InvalidParameterError(
                f"series {self.label!r} must be a non-empty 1-d array")
        if not np.all(np.isfinite(self.samples)):
            raise InvalidParameterError(
                f"series {self.label!r} contains non-finite samples")

    @property
    def length(self) -> int:
        return self.samples.size


class Ensemble:
    """An aligned collection of series observed over the same time span.

    Each series is mean-subtracted on ingestion (``demean=True``, the
    default) because every estimator downstream assumes zero-mean processes.
    Simulated data that is zero mean by construction may opt out to preserve
    sample-exact identities.
    """

    def __init__(self, series: list[TimeSeries], demean: bool = True):
        if len(series) < 2:
            raise InvalidParameterError("an ensemble needs at least 2 series")
        lengths = {s.length for s in series}
        if len(lengths) != 1:
            raise InvalidParameterError(
                f"series lengths differ: {sorted(lengths)}")
        labels = [s.label for s in series]
        if len(set(labels)) != len(labels):
            dup = sorted({l for l in labels if labels.count(l) > 1})
            raise InvalidParameterError(f"duplicate series labels: {dup}")
        if demean:
            series = [TimeSeries(s.label, s.samples - s.samples.mean())
                      for s in series]
        self.series = list(series)

    @property
    def labels(self) -> list[str]:
        return [s.label for s in self.series]

    @property
    def n(self) -> int:
        return len(self.series)

    @property
    def length(self) -> int:
        return self.series[0].length

    def values(self) -> np.ndarray:
        """Stack the samples into an ``(n, length)`` array."""
        return np.stack([s.samples for s in self.series])


@dataclass
class Spectrum:
    """Complex spectral values on a :class:`FrequencyGrid`."""

    grid: FrequencyGrid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (self.grid.size,):
            raise InvalidParameterError(
                "spectrum length does not match its grid")


@dataclass
class SpectralMatrix:
    """Hermitian matrix of cross spectra, ``values[i, j, k] = Phi_{x_i x_j}(omega_k)``."""

    labels: list[str]
    grid: FrequencyGrid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        n = len(self.labels)
        if self.values.shape != (n, n, self.grid.size):
            raise InvalidParameterError(
                f"spectral matrix shape {self.values.shape} does not match "
                f"{n} labels on a grid of {self.grid.size}")
        scale = np.max(np.abs(self.values)) or 1.0
        if not np.allclose(self.values,
                           np.conj(self.values.transpose(1, 0, 2)),
                           atol=1e-9 * scale, rtol=0):
            raise InvalidParameterError("spectral matrix is not Hermitian")

    @property
    def n(self) -> int:
        return len(self.labels)

    def entry(self, i: int, j: int) -> Spectrum:
        return Spectrum(self.grid, self.values[i, j].copy())

    def psd_floor(self) -> float:
        """Floor value: ``PSD_FLOOR_RATIO`` times the largest diagonal value."""
        diag = np.real(np.einsum("iik->ik", self.values))
        top = float(np.max(diag)) if diag.size else 0.0
        return PSD_FLOOR_RATIO * max(top, 0.0)

    def floored_autospectrum(self, i: int) -> np.ndarray:
        """Real auto-spectrum of series ``i``, clipped from below at the floor."""
        phi = np.real(self.values[i, i])
        floor = self.psd_floor()
        if floor == 0.0:
            floor = np.finfo(float).tiny
        if np.any(phi < floor):
            record("spectral-floor",
                   f"auto-spectrum of {self.labels[i]!r} floored at {floor:.3e}")
        return np.maximum(phi, floor)


@dataclass
class CoherenceCurve:
    """Magnitude-squared coherence of one pair, clamped into [0, 1]."""

    grid: FrequencyGrid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.size,):
            raise InvalidParameterError(
                "coherence length does not match its grid")
        if np.any(self.values < 0.0) or np.any(self.values > 1.0):
            raise InvalidParameterError("coherence values outside [0, 1]")


@dataclass(frozen=True)
class WelchConfig:
    """Welch averaging parameters.

    ``segment_length`` defaults to the grid size so every segment DFT lands
    directly on the analysis grid.  ``segment_count`` is the planned number
    of averages: the estimator always uses every full segment the data
    offers and records a diagnostic when fewer than planned fit.
    """

    grid_size: int = 1024
    segment_length: int | None = None
    segment_count: int = 8
    overlap: float = 0.5
    window: str = "hann"

    def __post_init__(self):
        if self.grid_size < 8 or self.grid_size % 2 != 0:
            raise InvalidParameterError("grid_size must be even and >= 8")
        if self.segment_count < 1:
            raise InvalidParameterError("segment_count must be >= 1")
        if not 0.0 <= self.overlap < 1.0:
            raise InvalidParameterError("overlap must lie in [0, 1)")
        if self.effective_segment_length > self.grid_size:
            raise InvalidParameterError(
                "segment_length cannot exceed grid_size")
        if self.effective_segment_length < 8:
            raise InvalidParameterError("segment_length must be >= 8")

    @property
    def effective_segment_length(self) -> int:
        return self.grid_size if self.segment_length is None else self.segment_length

    @property
    def hop(self) -> int:
        step = int(round(self.effective_segment_length * (1.0 - self.overlap)))
        return max(step, 1)

    def segments_available(self, n_samples: int) -> int:
        if n_samples < self.effective_segment_length:
            return 0
        return (n_samples - self.effective_segment_length) // self.hop + 1


def detrend_seasonal(ts: TimeSeries, window: int = 24) -> TimeSeries:
    """Remove a sliding seasonal mean from a series.

    The seasonal component at sample ``n`` is the mean of
    ``ts.samples[n - window//2 : n + window - window//2]`` with samples
    outside the record treated as zero; the detrended series is the input
    minus that component.  With the default window of 24 this strips a daily
    cycle from hourly data.

    Parameters
    ----------
    ts : TimeSeries
        Input series; must be at least ``window`` samples long.
    window : int
        Averaging length, at least 2.

    Returns
    -------
    TimeSeries
        Same label, same length, seasonal mean removed.
    """
    if window < 2:
        raise InvalidParameterError("window must be >= 2")
    if ts.length < window:
        raise InsufficientDataError(
            f"series {ts.label!r} shorter than the {window}-sample window")
    kernel = np.full(window, 1.0 / window)
    full = np.convolve(ts.samples, kernel, mode="full")
    lead = window // 2
    # full[j] averages samples [j-window+1, j]; the window centred at n
    # spans [n-lead, n+window-1-lead], i.e. j = n + window - 1 - lead.
    start = window - 1 - lead
    seasonal = full[start:start + ts.length]
    return TimeSeries(ts.label, ts.samples - seasonal)


def _hann_segment_ffts(values: np.ndarray, cfg: WelchConfig) -> tuple[np.ndarray, float]:
    """Windowed segment DFTs for each row of ``values``.

    Returns ``(X, norm)`` where ``X[s, m]`` is the DFT of windowed segment
    ``m`` of series ``s`` evaluated on the standard FFT ordering, and
    ``norm`` is the window energy ``sum(w**2)`` used for density scaling.
    """
    n_samples = values.shape[-1]
    seg = cfg.effective_segment_length
    available = cfg.segments_available(n_samples)
    if available < 1:
        raise InsufficientDataError(
            f"{n_samples} samples cannot fit one segment of {seg}")
    if available < cfg.segment_count:
        record("welch-segments",
               f"only {available} segments fit, {cfg.segment_count} planned")
    win = get_window(cfg.window, seg, fftbins=True)
    starts = np.arange(available) * cfg.hop
    idx = starts[:, None] + np.arange(seg)[None, :]
    segments = values[..., idx] * win          # (..., n_seg, seg)
    ffts = np.fft.fft(segments, n=cfg.grid_size, axis=-1)
    return ffts, float(np.sum(win ** 2))


def welch_cross_spectrum(x: TimeSeries, y: TimeSeries, cfg: WelchConfig) -> Spectrum:
    """Welch estimate of the cross power spectrum ``Phi_xy``.

    Segments are Hann-windowed, overlapped by ``cfg.overlap``, and averaged
    as ``conj(X_seg) * Y_seg / sum(w**2)``, giving a two-sided density whose
    grid mean approximates the zero-lag cross covariance ``E[x(t) y(t)]``.

    Parameters
    ----------
    x, y : TimeSeries
        Equal-length series; ``x`` is the conjugated side.
    cfg : WelchConfig
        Segmentation and grid parameters.

    Returns
    -------
    Spectrum
        On ``FrequencyGrid(cfg.grid_size)``, ordered from -pi to pi.
    """
    if x.length != y.length:
        raise InvalidParameterError(
            f"length mismatch: {x.label!r} has {x.length}, "
            f"{y.label!r} has {y.length}")
    stacked = np.stack([x.samples, y.samples])
    ffts, norm = _hann_segment_ffts(stacked, cfg)
    pxy = np.mean(np.conj(ffts[0]) * ffts[1], axis=0) / norm
    return Spectrum(FrequencyGrid(cfg.grid_size), np.fft.fftshift(pxy))


def spectral_matrix(ens: Ensemble, cfg: WelchConfig) -> SpectralMatrix:
    """Estimate the full matrix of cross spectra for an ensemble.

    Segment DFTs are computed once per series and combined pairwise, so the
    result is Hermitian by construction: entries with ``i <= j`` are
    computed and the rest conjugate-filled.
    """
    ffts, norm = _hann_segment_ffts(ens.values(), cfg)
    n = ens.n
    k = cfg.grid_size
    out = np.empty((n, n, k), dtype=complex)
    for i in range(n):
        for j in range(i, n):
            pij = np.mean(np.conj(ffts[i]) * ffts[j], axis=0) / norm
            out[i, j] = np.fft.fftshift(pij)
            if i != j:
                out[j, i] = np.conj(out[i, j])
    return SpectralMatrix(list(ens.labels), FrequencyGrid(k), out)


def coherence_function(S: SpectralMatrix, i: int, j: int) -> CoherenceCurve:
    """Magnitude-squared coherence of the pair ``(i, j)``.

    ``C(omega) = |Phi_ij|^2 / (Phi_ii * Phi_jj)`` with floored auto-spectra,
    clamped into [0, 1].  Estimator overshoot beyond ``1 + 1e-6`` is recorded
    as a diagnostic rather than raised; identical series give exactly 1.
    """
    n = S.n
    if not (0 <= i < n and 0 <= j < n):
        raise InvalidParameterError(f"pair ({i}, {j}) out of range for n={n}")
    num = np.abs(S.values[i, j]) ** 2
    den = S.floored_autospectrum(i) * S.floored_autospectrum(j)
    raw = num / den
    if np.max(raw) > 1.0 + 1e-6:
        record("coherence-overshoot",
               f"coherence of ({S.labels[i]!r}, {S.labels[j]!r}) "
               f"peaks at {np.max(raw):.6f} before clamping")
    return CoherenceCurve(S.grid, np.clip(raw, 0.0, 1.0))
