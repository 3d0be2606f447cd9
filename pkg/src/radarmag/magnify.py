"""Motion magnification: per-level temporal phase filtering and amplification
over a radargram, plus the global FFT phase magnifier for pure translations.

The per-level pipeline decomposes every frame's range profile with a Gabor
bank, unwraps each (level, bin) coefficient phase along slow time, bandpasses
it around the motion frequency, scales the result by alpha, rotates the
coefficients by the scaled phase, and reconstructs.  Output displacement
corresponds to (1 + alpha) times the input displacement; alpha in [-1, 0)
attenuates and alpha = -1 removes in-band motion entirely.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import fft as sfft
from scipy.ndimage import gaussian_filter1d

from .gabor import GaborBank, Pyramid, decompose, reconstruct
from .radargram import Radargram, WindowSpec


@dataclass(frozen=True)
class BandSpec:
    """Temporal passband [f_lo, f_hi] in Hz (slow time)."""

    f_lo: float
    f_hi: float

    def __post_init__(self):
        if not 0 <= self.f_lo < self.f_hi:
            raise ValueError(f"need 0 <= f_lo < f_hi, got [{self.f_lo}, {self.f_hi}]")

    def validate(self, fps: float) -> None:
        if self.f_hi > fps / 2 + 1e-12:
            raise ValueError(f"band [{self.f_lo}, {self.f_hi}] Hz exceeds Nyquist {fps / 2} Hz")


@dataclass(frozen=True)
class MagnifyConfig:
    """Amplification settings.

    alpha scales the bandpassed phase (alpha >= -1).  amplitude_mask_ratio
    zeroes the filtered phase at coefficients below that fraction of the
    level's peak amplitude.  phase_gate_ratio additionally gates the raw
    unwrapped phase with a temporally smoothed amplitude threshold before
    filtering, so bins that are empty for part of the record cannot leak
    broadband phase noise into the passband; gate_smooth_s is the temporal
    smoothing sigma of that gate.  denoise_sigma_bins enables optional
    amplitude-weighted spatial smoothing of the phase (0 = off).
    """

    alpha: float
    band: BandSpec
    amplitude_mask_ratio: float = 1e-8
    phase_gate_ratio: float = 1e-3
    gate_smooth_s: float = 0.05
    denoise_sigma_bins: float = 0.0

    def __post_init__(self):
        if self.alpha < -1:
            raise ValueError(f"alpha must be >= -1, got {self.alpha}")
        if self.amplitude_mask_ratio < 0 or self.phase_gate_ratio < 0:
            raise ValueError("mask and gate ratios must be non-negative")


@dataclass(frozen=True)
class SpectralDecomposition:
    """Whole-profile DFT coefficients indexed by non-negative spatial frequency.

    Stores the half spectrum of a real profile; the negative-frequency
    coefficients are the conjugates by construction, which is how the real
    inverse transform consumes them.  A global translation by delta bins
    multiplies coefficient k by exp(2i*pi*k*delta/n).
    """

    coefficients: np.ndarray
    n_bins: int

    @classmethod
    def from_profile(cls, profile: np.ndarray) -> "SpectralDecomposition":
        p = np.asarray(profile, dtype=np.float64)
        if p.ndim != 1:
            raise ValueError(f"expected a 1-D profile, got shape {p.shape}")
        return cls(coefficients=np.fft.rfft(p), n_bins=len(p))

    def to_profile(self) -> np.ndarray:
        return np.fft.irfft(self.coefficients, self.n_bins)

    def shifted(self, delta_bins: float) -> "SpectralDecomposition":
        k = np.arange(len(self.coefficients))
        ramp = np.exp(2j * np.pi * k * delta_bins / self.n_bins)
        return SpectralDecomposition(self.coefficients * ramp, self.n_bins)


def unwrap_phase(series: np.ndarray, axis: int = -1) -> np.ndarray:
    """Unwrap radians along an axis.

    Successive differences are mapped into (-pi, pi] by adding multiples of
    2*pi; the first sample is unchanged.
    """
    p = np.asarray(series, dtype=np.float64)
    if not np.isfinite(p).all():
        raise ValueError("phase series contains non-finite samples")
    if p.shape[axis] < 2:
        return p.copy()
    d = np.diff(p, axis=axis)
    d -= 2.0 * np.pi * np.ceil((d - np.pi) / (2.0 * np.pi))
    out = np.cumsum(d, axis=axis)
    pad = [(0, 0)] * p.ndim
    pad[axis % p.ndim] = (1, 0)
    return np.pad(out, pad) + np.take(p, [0], axis=axis)


def temporal_bandpass(series: np.ndarray, fps: float, band: BandSpec, axis: int = -1) -> np.ndarray:
    """Ideal frequency-domain bandpass: DFT bins with |f| in [f_lo, f_hi] kept, others zeroed."""
    x = np.asarray(series, dtype=np.float64)
    if not np.isfinite(x).all():
        raise ValueError("series contains non-finite samples")
    band.validate(fps)
    n = x.shape[axis]
    freqs = np.fft.rfftfreq(n, 1.0 / fps)
    keep = (freqs >= band.f_lo) & (freqs <= band.f_hi)
    shape = [1] * x.ndim
    shape[axis % x.ndim] = -1
    spectrum = sfft.rfft(x, axis=axis, workers=-1) * keep.reshape(shape)
    return sfft.irfft(spectrum, n, axis=axis, workers=-1)


def _mirrored_bandpass(x: np.ndarray, fps: float, band: BandSpec, axis: int) -> np.ndarray:
    """Ideal bandpass on the even (mirrored) extension of the series.

    The mirror removes the periodic wrap discontinuity of the plain DFT
    filter, which otherwise turns phase ramps (e.g. a target crossing bins)
    into broadband in-band leakage.
    """
    n = x.shape[axis]
    ext = np.concatenate([x, np.flip(x, axis=axis)], axis=axis)
    freqs = np.fft.rfftfreq(2 * n, 1.0 / fps)
    keep = (freqs >= band.f_lo) & (freqs <= band.f_hi)
    shape = [1] * x.ndim
    shape[axis % x.ndim] = -1
    spectrum = sfft.rfft(ext, axis=axis, workers=-1) * keep.reshape(shape)
    out = sfft.irfft(spectrum, 2 * n, axis=axis, workers=-1)
    index = [slice(None)] * x.ndim
    index[axis % x.ndim] = slice(0, n)
    return out[tuple(index)]


def _filtered_phase(level: np.ndarray, amplitude: np.ndarray,
                    fps: float, cfg: MagnifyConfig) -> np.ndarray:
    """Bandpassed, gated phase of one pyramid level (bins x frames)."""
    phase = unwrap_phase(np.angle(level), axis=1)
    peak = amplitude.max()
    if cfg.phase_gate_ratio > 0 and peak > 0:
        gate = (amplitude >= cfg.phase_gate_ratio * peak).astype(np.float64)
        gate = gaussian_filter1d(gate, cfg.gate_smooth_s * fps, axis=1, mode="nearest")
        phase *= gate
    if cfg.denoise_sigma_bins > 0:
        weights = amplitude * amplitude
        num = gaussian_filter1d(weights * phase, cfg.denoise_sigma_bins, axis=0, mode="constant")
        den = gaussian_filter1d(weights, cfg.denoise_sigma_bins, axis=0, mode="constant")
        phase = num / (den + 1e-8 * max(den.max(), 1e-300))
    filtered = _mirrored_bandpass(phase, fps, cfg.band, axis=1)
    if cfg.amplitude_mask_ratio > 0 and peak > 0:
        filtered[amplitude < cfg.amplitude_mask_ratio * peak] = 0.0
    return filtered


def magnify(r: Radargram, bank: GaborBank, cfg: MagnifyConfig) -> Radargram:
    """Magnify in-band motion of a radargram by (1 + alpha).

    With alpha = 0 the output equals reconstruct(decompose(data)) exactly:
    the coefficients are multiplied by exp(0) = 1 and follow the identical
    code path.
    """
    if r.n_frames < 4:
        raise ValueError(f"need at least 4 frames, got {r.n_frames}")
    cfg.band.validate(r.fps)
    pyr = decompose(r.data, bank, mode="linear")
    out_levels = []
    for k, (params, level) in enumerate(zip(bank.levels, pyr.levels)):
        amplitude = np.abs(level)
        filtered = _filtered_phase(level, amplitude, r.fps, cfg)
        modified = level * np.exp(1j * cfg.alpha * filtered)
        if not np.isfinite(modified).all():
            bad = np.argwhere(~np.isfinite(modified))[0]
            raise FloatingPointError(
                f"non-finite coefficient at level {k} (wavelength {params.wavelength}), "
                f"bin {bad[0]}, frame {bad[1]}")
        out_levels.append(modified)
    trimmed = Pyramid(source_len=pyr.source_len, levels=tuple(out_levels),
                      bank=bank, mode=pyr.mode)
    return r.with_data(reconstruct(trimmed, bank))


def magnify_windowed(r: Radargram, bank: GaborBank, cfg: MagnifyConfig,
                     wspec: WindowSpec) -> Radargram:
    """Window-at-a-time magnification for long records.

    Each window is magnified independently and the output keeps the central
    shift_s seconds of every window (overlap-discard stitching), which keeps
    filter edge transients out of the result.  Leading/trailing segments not
    covered by any window center come from the first/last window.
    """
    length, shift = wspec.frames(r.fps)
    if r.n_frames < length:
        return magnify(r, bank, cfg)
    out = np.empty_like(r.data)
    margin = (length - shift) // 2
    start = 0
    while True:
        last = start + length >= r.n_frames - shift + 1
        window = r.with_data(r.data[:, start : start + length])
        magnified = magnify(window, bank, cfg).data
        lo = 0 if start == 0 else start + margin
        hi = r.n_frames if last else start + margin + shift
        out[:, lo:hi] = magnified[:, lo - start : hi - start]
        if last:
            break
        start += shift
    return r.with_data(out)


def global_magnify(frames: np.ndarray, fps: float, cfg: MagnifyConfig) -> np.ndarray:
    """Magnify a global translation via the whole-profile DFT phase.

    frames: real profiles stacked along axis 0 (n_frames x n_bins), assumed
    to be a periodic signal under a common translation.  Per frequency, the
    phase relative to frame 0 is bandpassed over time and scaled by alpha;
    conjugate symmetry is enforced by the real FFT, so the output is real.
    Exact (to roundoff) for band-limited periodic profiles under sub-period
    global shifts.
    """
    stack = np.asarray(frames, dtype=np.float64)
    if stack.ndim != 2:
        raise ValueError(f"expected frames stacked as 2-D (n_frames x n_bins), got {stack.shape}")
    if not np.isfinite(stack).all():
        raise ValueError("frames contain non-finite samples")
    cfg.band.validate(fps)
    spectra = sfft.rfft(stack, axis=1, workers=-1)
    reference = spectra[0]
    relative = spectra * np.conj(reference)[None, :]
    delta_phase = np.angle(relative)
    weak = np.abs(spectra) < 1e-12 * np.abs(spectra).max()
    delta_phase[weak] = 0.0
    delta_phase[:, np.abs(reference) < 1e-12 * np.abs(reference).max()] = 0.0
    filtered = _mirrored_bandpass(delta_phase, fps, cfg.band, axis=0)
    shifted = spectra * np.exp(1j * cfg.alpha * filtered)
    return sfft.irfft(shifted, stack.shape[1], axis=1, workers=-1)
