"""
Magnitude spectra, spectrograms and their visibility-degree counterparts.

The degree matrix ``K`` has one column per spectrogram frame; column ``t``
is the degree vector of the visibility graph built over frame ``t``'s
magnitudes, with frequency bins as positions.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.io.wavfile
import scipy.signal

from .errors import IngestionError, UsageError, ValidationError
from .vgraph import ALGORITHMS, degree_distribution, sequence_degrees

# defaults used by the whole-note and frame-level pipelines
NOTE_FFT_SIZE = 16384
NOTE_KEEP_BINS = 2000
STFT_WINDOW = 2046
STFT_OVERLAP = 0.5
STFT_KEEP_BINS = 500


@dataclass(frozen=True, eq=False)
class AudioBuffer:
    """Mono audio: float64 samples (nominally in [-1, 1]) and a sample rate."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        x = np.ascontiguousarray(self.samples, dtype=np.float64)
        if x.ndim != 1:
            raise ValidationError(f"audio must be mono, got shape {x.shape}")
        if x.size == 0:
            raise ValidationError("audio buffer is empty")
        if not np.all(np.isfinite(x)):
            raise ValidationError("audio contains non-finite samples")
        if int(self.sample_rate) != self.sample_rate or self.sample_rate <= 0:
            raise ValidationError(f"sample rate must be a positive integer, got {self.sample_rate}")
        object.__setattr__(self, "samples", x)
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    def __len__(self):
        return self.samples.size

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate


@dataclass(frozen=True, eq=False)
class MagnitudeSpectrogram:
    """F x T non-negative magnitudes with bin spacing and hop size."""

    mags: np.ndarray
    bin_hz: float
    hop: int

    @property
    def n_bins(self) -> int:
        return self.mags.shape[0]

    @property
    def n_frames(self) -> int:
        return self.mags.shape[1]


def load_wav(path) -> AudioBuffer:
    """Read a 16-bit PCM or 32-bit float WAV file as a mono buffer.

    Channels are averaged; 16-bit samples are divided by 32768.
    """
    path = Path(path)
    if not path.is_file():
        raise IngestionError(f"{path}: no such file")
    try:
        with open(path, "rb") as fh:
            magic = fh.read(12)
        if len(magic) < 12 or magic[:4] != b"RIFF" or magic[8:12] != b"WAVE":
            raise IngestionError(f"{path}: malformed header, not a RIFF/WAVE container")
        with np.errstate(all="ignore"):
            rate, data = scipy.io.wavfile.read(path)
    except IngestionError:
        raise
    except (ValueError, EOFError, OSError, struct.error) as exc:
        raise IngestionError(f"{path}: malformed or unsupported WAV data ({exc})") from exc
    if data.dtype == np.int16:
        x = data.astype(np.float64) / 32768.0
    elif data.dtype == np.float32:
        x = data.astype(np.float64)
    else:
        raise IngestionError(
            f"{path}: unsupported codec, sample format {data.dtype} "
            "(need 16-bit PCM or 32-bit IEEE float)"
        )
    if x.ndim == 2:
        x = x.mean(axis=1)
    if x.size == 0:
        raise IngestionError(f"{path}: no audio frames")
    if not np.all(np.isfinite(x)):
        raise IngestionError(f"{path}: non-finite samples")
    return AudioBuffer(x, rate)


def write_wav(path, buf: AudioBuffer, *, pcm16: bool = True) -> None:
    """Write ``buf`` as 16-bit PCM (clipped) or 32-bit float."""
    if pcm16:
        data = np.clip(np.round(buf.samples * 32768.0), -32768, 32767).astype(np.int16)
    else:
        data = buf.samples.astype(np.float32)
    scipy.io.wavfile.write(path, buf.sample_rate, data)


def _is_pow2(n):
    return n > 0 and n & (n - 1) == 0


def _samples(buf):
    return buf.samples if isinstance(buf, AudioBuffer) else np.asarray(buf, dtype=np.float64)


def magnitude_spectrum(buf, fft_size: int = NOTE_FFT_SIZE, keep_bins: int = NOTE_KEEP_BINS,
                       window: str | None = None) -> np.ndarray:
    """Magnitude of the DFT of the whole buffer.

    The signal is truncated to ``fft_size`` (or zero-padded to it); only
    bins ``0..keep_bins-1`` are returned. ``window`` names a scipy window
    applied over the retained samples; ``None`` means rectangular.
    """
    if not _is_pow2(fft_size):
        raise UsageError(f"fft_size must be a power of two, got {fft_size}")
    if not 1 <= keep_bins <= fft_size // 2 + 1:
        raise UsageError(f"keep_bins must be in [1, {fft_size // 2 + 1}], got {keep_bins}")
    x = _samples(buf)[:fft_size]
    if window is not None:
        try:
            x = x * scipy.signal.get_window(window, x.size)
        except ValueError as exc:
            raise UsageError(f"unknown window {window!r}") from exc
    return np.abs(np.fft.rfft(x, n=fft_size))[:keep_bins]


def frame_count(n_samples: int, window_size: int, hop: int) -> int:
    """Frames needed to cover ``n_samples``; a trailing partial frame counts."""
    if n_samples < window_size:
        return 0
    return 1 + -(-(n_samples - window_size) // hop)


def stft_magnitude(
    buf: AudioBuffer,
    window_size: int = STFT_WINDOW,
    overlap: float = STFT_OVERLAP,
    keep_bins: int = STFT_KEEP_BINS,
) -> MagnitudeSpectrogram:
    """Hann-windowed short-time magnitude spectrogram.

    Frames advance by ``round(window_size * (1 - overlap))`` samples and are
    zero-padded to the next power of two before the transform.
    """
    if window_size < 2:
        raise UsageError(f"window_size must be at least 2, got {window_size}")
    if not 0 <= overlap < 1:
        raise UsageError(f"overlap must be in [0, 1), got {overlap}")
    if not 1 <= keep_bins <= window_size // 2 + 1:
        raise UsageError(f"keep_bins must be in [1, {window_size // 2 + 1}], got {keep_bins}")
    hop = max(1, int(round(window_size * (1 - overlap))))
    x = _samples(buf)
    n_frames = frame_count(x.size, window_size, hop)
    if n_frames == 0:
        raise ValidationError(
            f"empty spectrogram: {x.size} samples is shorter than one window of {window_size}"
        )
    nfft = 1 << (window_size - 1).bit_length()
    padded = np.zeros((n_frames - 1) * hop + window_size)
    padded[: x.size] = x
    frames = np.lib.stride_tricks.sliding_window_view(padded, window_size)[::hop]
    window = scipy.signal.get_window("hann", window_size)
    spec = np.abs(np.fft.rfft(frames * window, n=nfft, axis=1))[:, :keep_bins]
    rate = buf.sample_rate if isinstance(buf, AudioBuffer) else 1
    return MagnitudeSpectrogram(mags=np.ascontiguousarray(spec.T), bin_hz=rate / nfft, hop=hop)


def _mag_matrix(spec):
    m = spec.mags if isinstance(spec, MagnitudeSpectrogram) else np.asarray(spec, dtype=np.float64)
    if m.ndim == 1:
        m = m[:, None]
    if m.ndim != 2 or m.shape[0] < 1:
        raise UsageError(f"expected an F x T matrix, got shape {m.shape}")
    return m


def degree_matrix(spec, algorithm: str = "dc") -> np.ndarray:
    """Visibility degree of every bin, computed frame by frame."""
    if algorithm not in ALGORITHMS:
        raise UsageError(f"unknown algorithm {algorithm!r}; choose from {ALGORITHMS}")
    m = _mag_matrix(spec)
    k = np.empty(m.shape, dtype=np.int64)
    for t in range(m.shape[1]):
        try:
            k[:, t] = sequence_degrees(m[:, t], algorithm)
        except ValidationError as exc:
            raise ValidationError(f"frame {t}: {exc}") from exc
    return k


def degree_distribution_matrix(k) -> np.ndarray:
    """Column-wise degree distributions of a degree matrix."""
    k = np.asarray(k)
    if k.ndim == 1:
        k = k[:, None]
    out = np.empty(k.shape, dtype=np.float64)
    for t in range(k.shape[1]):
        out[:, t] = degree_distribution(k[:, t])
    return out


# -- matrix files ------------------------------------------------------------

def write_matrix_csv(fh, matrix) -> None:
    """``rows,cols`` header followed by row-major comma-separated values."""
    m = np.asarray(matrix)
    if m.ndim == 1:
        m = m[:, None]
    fh.write(f"{m.shape[0]},{m.shape[1]}\n")
    as_int = np.issubdtype(m.dtype, np.integer)
    for row in m.tolist():
        fh.write(",".join(str(v) if as_int else repr(float(v)) for v in row) + "\n")


def read_matrix_csv(path) -> np.ndarray:
    lines = Path(path).read_text().splitlines()
    try:
        rows, cols = (int(v) for v in lines[0].split(","))
        data = [[float(v) for v in line.split(",")] for line in lines[1 : rows + 1]]
        m = np.array(data, dtype=np.float64).reshape(rows, cols)
    except (IndexError, ValueError) as exc:
        raise IngestionError(f"{path}: malformed matrix file ({exc})") from exc
    return m


def to_pgm(matrix, gamma: float = 0.6) -> str:
    """Render ``matrix`` as an ASCII (P2) grey map.

    Values are divided by the matrix maximum, raised to ``gamma`` and
    quantized to 0..255. Row 0 (lowest frequency) is drawn at the bottom.
    """
    if gamma <= 0:
        raise UsageError(f"gamma must be positive, got {gamma}")
    m = np.clip(np.asarray(matrix, dtype=np.float64), 0, None)
    if m.ndim == 1:
        m = m[:, None]
    peak = m.max() if m.size else 0.0
    scaled = (m / peak) ** gamma if peak > 0 else np.zeros_like(m)
    pixels = np.rint(scaled * 255).astype(int)[::-1]
    height, width = pixels.shape
    lines = ["P2", f"{width} {height}", "255"]
    lines += [" ".join(map(str, row)) for row in pixels.tolist()]
    return "\n".join(lines) + "\n"
