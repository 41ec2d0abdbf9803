"""Additive synthesis of harmonic notes and calibrated noise injection."""

from __future__ import annotations

import zlib
from dataclasses import dataclass

import numpy as np

from ..errors import ValidationError
from ..spectral import AudioBuffer

PEAK_LEVEL = 0.9


@dataclass(frozen=True)
class InstrumentSpec:
    """Relative partial amplitudes (partial n at n * f0) and an exponential decay in 1/s.

    ``noise_floor_db`` adds a recording noise floor that many dB below the
    harmonic part; ``None`` gives a noiseless note.
    """

    harmonic_amplitudes: tuple[float, ...]
    decay: float = 0.0
    name: str = ""
    noise_floor_db: float | None = None

    def __post_init__(self):
        amps = tuple(float(a) for a in self.harmonic_amplitudes)
        object.__setattr__(self, "harmonic_amplitudes", amps)
        if not amps:
            raise ValidationError("an instrument needs at least one partial")
        if any(not np.isfinite(a) or a < 0 for a in amps):
            raise ValidationError("partial amplitudes must be finite and non-negative")
        if amps[0] <= 0:
            raise ValidationError("the first partial must have positive amplitude")
        if not np.isfinite(self.decay) or self.decay < 0:
            raise ValidationError(f"decay must be non-negative, got {self.decay}")
        if self.noise_floor_db is not None and not np.isfinite(self.noise_floor_db):
            raise ValidationError("noise_floor_db must be finite or None")


def midi_to_hz(midi: float) -> float:
    return 440.0 * 2.0 ** ((midi - 69) / 12)


@dataclass(frozen=True)
class NoteEvent:
    midi_number: int
    duration: float = 1.0
    sample_rate: int = 44100

    @property
    def f0(self) -> float:
        return midi_to_hz(self.midi_number)


# recorded-level floor of the built-in instruments, dB below the partials
RECORDING_FLOOR_DB = 60.0

BUILTIN_INSTRUMENTS = {
    "flat": InstrumentSpec((1.0,) * 8, 0.0, "flat", RECORDING_FLOOR_DB),
    "rolloff": InstrumentSpec(tuple(1.0 / n for n in range(1, 11)), 0.0, "rolloff", RECORDING_FLOOR_DB),
    "odd": InstrumentSpec(tuple(1.0 / n if n % 2 else 0.0 for n in range(1, 14)), 0.0, "odd",
                          RECORDING_FLOOR_DB),
    "fundamental": InstrumentSpec((1.0, 0.3, 0.15, 0.08), 2.0, "fundamental", RECORDING_FLOOR_DB),
}

# A2, C3, E3, G3, A3, C4, E4, G4
DEFAULT_NOTES = (45, 48, 52, 55, 57, 60, 64, 67)


def synthesize_note(spec: InstrumentSpec, note: NoteEvent, rng_seed=None) -> AudioBuffer:
    """Sum of decaying partials, peak-normalized to 0.9.

    Partials at or above Nyquist are dropped. When the instrument has a
    noise floor, ``rng_seed`` seeds it; by default the seed is derived from
    the instrument name and MIDI number so a note always renders the same.
    """
    if note.duration <= 0:
        raise ValidationError(f"note duration must be positive, got {note.duration}")
    sr = note.sample_rate
    nyquist = sr / 2
    f0 = note.f0
    if f0 >= nyquist:
        raise ValidationError(f"fundamental {f0:.1f} Hz is not below Nyquist {nyquist} Hz")
    n = int(round(note.duration * sr))
    if n < 1:
        raise ValidationError(f"note duration {note.duration} s yields no samples")
    t = np.arange(n) / sr
    x = np.zeros(n)
    for p, amp in enumerate(spec.harmonic_amplitudes, start=1):
        if p * f0 >= nyquist:
            break
        if amp:
            x += amp * np.sin(2 * np.pi * p * f0 * t)
    x *= np.exp(-spec.decay * t)
    if spec.noise_floor_db is not None:
        if rng_seed is None:
            rng_seed = [zlib.crc32(spec.name.encode()), note.midi_number]
        rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
        x = x + scaled_noise(x, spec.noise_floor_db, rng)
    return AudioBuffer(normalize_peak(x), sr)


def normalize_peak(x, level: float = PEAK_LEVEL) -> np.ndarray:
    peak = np.max(np.abs(x))
    if peak == 0:
        return np.asarray(x, dtype=np.float64).copy()
    return x * (level / peak)


def power(x) -> float:
    x = np.asarray(x, dtype=np.float64)
    return float(np.mean(x * x))


def snr_db(signal, noise) -> float:
    return 10 * np.log10(power(signal) / power(noise))


def scaled_noise(signal, snr: float, rng: np.random.Generator) -> np.ndarray:
    """Gaussian noise scaled so its realized power sits ``snr`` dB below ``signal``."""
    ps = power(signal)
    if ps == 0:
        raise ValidationError("cannot set an SNR against a zero-power signal")
    w = rng.standard_normal(len(signal))
    gain = np.sqrt(ps / (power(w) * 10 ** (snr / 10)))
    return gain * w


def add_noise_at_snr(buf: AudioBuffer, snr: float, rng_seed) -> AudioBuffer:
    """Return ``buf`` plus white Gaussian noise at ``snr`` dB.

    ``rng_seed`` may be an int, a SeedSequence or a Generator.
    """
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
    noise = scaled_noise(buf.samples, snr, rng)
    return AudioBuffer(buf.samples + noise, buf.sample_rate)
