"""Radargram container, file formats, and slow-time windowing.

A radargram is a real 2-D matrix with fast-time range bins along axis 0 and
slow-time frames along axis 1, plus sampling metadata (frame rate, bin
spacing, range offset of the first bin).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

MAGIC = b"RGRM"
FORMAT_VERSION = 1

_HEADER = struct.Struct("<4sIII ddd".replace(" ", ""))


class FormatError(ValueError):
    """Raised when a radargram file or sidecar cannot be parsed."""


@dataclass(frozen=True, eq=False)
class Radargram:
    """Range bins x slow-time frames of real radar returns.

    data is stored as float64, C-contiguous and read-only; instances are
    immutable and safe to share across threads.
    """

    data: np.ndarray
    fps: float
    bin_spacing: float
    t0_offset: float = 0.0

    def __post_init__(self):
        arr = np.ascontiguousarray(self.data, dtype=np.float64)
        if arr.ndim != 2:
            raise ValueError(f"radargram data must be 2-D, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"radargram must have at least 1 bin and 1 frame, got {arr.shape}")
        if not np.isfinite(arr).all():
            raise ValueError("radargram contains non-finite samples")
        if not self.fps > 0:
            raise ValueError(f"fps must be positive, got {self.fps}")
        if not self.bin_spacing > 0:
            raise ValueError(f"bin_spacing must be positive, got {self.bin_spacing}")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def n_bins(self) -> int:
        return self.data.shape[0]

    @property
    def n_frames(self) -> int:
        return self.data.shape[1]

    @property
    def duration_s(self) -> float:
        return self.n_frames / self.fps

    def bin_ranges(self) -> np.ndarray:
        """Range (meters) of each bin center."""
        return self.t0_offset + np.arange(self.n_bins) * self.bin_spacing

    def range_to_bin(self, range_m: float) -> float:
        """Fractional bin coordinate of a range in meters."""
        return (range_m - self.t0_offset) / self.bin_spacing

    def with_data(self, data: np.ndarray) -> "Radargram":
        """New radargram with the same metadata and different samples."""
        return Radargram(data, fps=self.fps, bin_spacing=self.bin_spacing, t0_offset=self.t0_offset)


@dataclass(frozen=True)
class WindowSpec:
    """Sliding slow-time window: length and shift in seconds."""

    length_s: float
    shift_s: float

    def __post_init__(self):
        if not 0 < self.shift_s <= self.length_s:
            raise ValueError(f"need 0 < shift_s <= length_s, got shift={self.shift_s} length={self.length_s}")

    def frames(self, fps: float) -> tuple[int, int]:
        """(window length, shift) in frames, seconds*fps rounded half-up."""
        length = int(np.floor(self.length_s * fps + 0.5))
        shift = int(np.floor(self.shift_s * fps + 0.5))
        if length < 2:
            raise ValueError(f"window of {self.length_s}s at {fps} fps is shorter than 2 frames")
        if shift < 1:
            raise ValueError(f"shift of {self.shift_s}s at {fps} fps is shorter than 1 frame")
        return length, shift


@dataclass(frozen=True)
class RangeROI:
    """Inclusive range-bin interval [first_bin, last_bin]."""

    first_bin: int
    last_bin: int

    def __post_init__(self):
        if self.first_bin < 0 or self.last_bin < self.first_bin:
            raise ValueError(f"need 0 <= first_bin <= last_bin, got [{self.first_bin}, {self.last_bin}]")

    def validate(self, n_bins: int) -> None:
        if self.last_bin >= n_bins:
            raise ValueError(f"ROI [{self.first_bin}, {self.last_bin}] exceeds {n_bins} bins")

    @property
    def slice(self) -> slice:
        return slice(self.first_bin, self.last_bin + 1)

    @property
    def n_bins(self) -> int:
        return self.last_bin - self.first_bin + 1


def windows(r: Radargram, w: WindowSpec) -> list[tuple[int, Radargram]]:
    """Slide a window over slow time.

    Returns (start_frame, slice) pairs; starts are multiples of the shift and
    a trailing partial window is dropped.  A record shorter than one window
    yields an empty list.
    """
    length, shift = w.frames(r.fps)
    out = []
    start = 0
    while start + length <= r.n_frames:
        out.append((start, r.with_data(r.data[:, start : start + length])))
        start += shift
    return out


def save_radargram(r: Radargram, path: str, format: str = "binary") -> None:
    """Write a radargram to disk.

    binary: magic RGRM, little-endian header, float64 samples row-major
    (bit-exact round trip).  csv: one row per range bin, one column per
    frame; metadata goes to a key=value sidecar at ``<path>.meta``.
    """
    if format == "binary":
        header = _HEADER.pack(MAGIC, FORMAT_VERSION, r.n_bins, r.n_frames,
                              r.fps, r.bin_spacing, r.t0_offset)
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(r.data.astype("<f8", copy=False).tobytes())
    elif format == "csv":
        np.savetxt(path, r.data, fmt="%.17g", delimiter=",")
        with open(path + ".meta", "w") as fh:
            fh.write(f"fps={r.fps!r}\n")
            fh.write(f"bin_spacing={r.bin_spacing!r}\n")
            fh.write(f"t0_offset={r.t0_offset!r}\n")
            fh.write(f"n_bins={r.n_bins}\n")
            fh.write(f"n_frames={r.n_frames}\n")
    else:
        raise ValueError(f"unknown format {format!r}, expected 'binary' or 'csv'")


def load_radargram(path: str, format: str = "binary") -> Radargram:
    """Read a radargram written by save_radargram."""
    if format == "binary":
        return _load_binary(path)
    if format == "csv":
        return _load_csv(path)
    raise ValueError(f"unknown format {format!r}, expected 'binary' or 'csv'")


def _load_binary(path: str) -> Radargram:
    with open(path, "rb") as fh:
        header = fh.read(_HEADER.size)
        if len(header) < _HEADER.size:
            raise FormatError(f"{path}: truncated header")
        magic, version, n_bins, n_frames, fps, bin_spacing, t0 = _HEADER.unpack(header)
        if magic != MAGIC:
            raise FormatError(f"{path}: bad magic {magic!r}")
        if version != FORMAT_VERSION:
            raise FormatError(f"{path}: unsupported format version {version}")
        payload = fh.read(8 * n_bins * n_frames)
    if len(payload) != 8 * n_bins * n_frames:
        raise FormatError(f"{path}: expected {n_bins}x{n_frames} float64 samples, file too short")
    data = np.frombuffer(payload, dtype="<f8").reshape(n_bins, n_frames)
    if not np.isfinite(data).all():
        raise FormatError(f"{path}: non-finite samples")
    return Radargram(data, fps=fps, bin_spacing=bin_spacing, t0_offset=t0)


def read_sidecar(path: str) -> dict:
    """Parse a key=value sidecar file; values are floats."""
    meta = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise FormatError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, _, value = line.partition("=")
            try:
                meta[key.strip()] = float(value.strip())
            except ValueError:
                raise FormatError(f"{path}:{lineno}: non-numeric value {value.strip()!r}") from None
    return meta


def _load_csv(path: str) -> Radargram:
    meta = read_sidecar(path + ".meta")
    for key in ("fps", "bin_spacing"):
        if key not in meta:
            raise FormatError(f"{path}.meta: missing required key {key!r}")
    try:
        data = np.loadtxt(path, delimiter=",", ndmin=2)
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from None
    if "n_bins" in meta and data.shape[0] != int(meta["n_bins"]):
        raise FormatError(f"{path}: {data.shape[0]} rows but sidecar declares n_bins={int(meta['n_bins'])}")
    if "n_frames" in meta and data.shape[1] != int(meta["n_frames"]):
        raise FormatError(f"{path}: {data.shape[1]} columns but sidecar declares n_frames={int(meta['n_frames'])}")
    if not np.isfinite(data).all():
        raise FormatError(f"{path}: non-finite samples")
    return Radargram(data, fps=meta["fps"], bin_spacing=meta["bin_spacing"],
                     t0_offset=meta.get("t0_offset", 0.0))
