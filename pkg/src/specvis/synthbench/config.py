"""
Experiment configuration and its flat ``key = value`` file format.

Example file::

    # whole-note experiment
    instruments = flat, rolloff, bright
    instrument.bright = 1, 0.8, 0.6, 0.4
    decay.bright = 1.5
    notes = 45, 57, 69
    snr_db_list = -20, 0, 20
    rng_seed = 7

Lists are comma separated. ``instrument.<name>``, ``decay.<name>`` and
``floor.<name>`` (recording floor in dB, or ``none``) define custom
instruments on top of the built-in ones.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

import scipy.signal

from ..errors import ConfigError, ValidationError
from ..similarity import METRICS
from ..spectral import (
    NOTE_FFT_SIZE,
    NOTE_KEEP_BINS,
    STFT_KEEP_BINS,
    STFT_OVERLAP,
    STFT_WINDOW,
)
from ..vgraph import ALGORITHMS
from .synth import BUILTIN_INSTRUMENTS, DEFAULT_NOTES, RECORDING_FLOOR_DB, InstrumentSpec

REPRESENTATIONS = ("magnitude", "degree", "distribution")
ACCOMPANIMENTS = ("noise", "silence")

DEFAULT_MELODY = (57, 60, 64, 62, 65, 64, 60, 62, 59, 55, 57, 60)


@dataclass
class ExperimentConfig:
    instruments: list[InstrumentSpec] = field(
        default_factory=lambda: [BUILTIN_INSTRUMENTS[k] for k in ("flat", "rolloff", "odd", "fundamental")]
    )
    notes: list[int] = field(default_factory=lambda: list(DEFAULT_NOTES))
    duration: float = 1.0
    sample_rate: int = 44100
    snr_db_list: list[float] = field(default_factory=lambda: [-20.0, -10.0, 0.0, 10.0, 20.0])
    fft_size: int = NOTE_FFT_SIZE
    keep_bins: int = NOTE_KEEP_BINS
    note_window: str | None = "hann"
    metrics: list[str] = field(default_factory=lambda: list(METRICS))
    representations: list[str] = field(default_factory=lambda: list(REPRESENTATIONS))
    rng_seed: int = 1
    algorithm: str = "dc"
    # frame-level experiment
    window_size: int = STFT_WINDOW
    overlap: float = STFT_OVERLAP
    stft_bins: int = STFT_KEEP_BINS
    activity_threshold: float = 0.01
    accompaniment: str = "noise"
    accompaniment_snr_db: float = 0.0
    melody: list[int] = field(default_factory=lambda: list(DEFAULT_MELODY))
    melody_note_duration: float = 0.5
    lead_wav: str | None = None
    accompaniment_wav: str | None = None

    def __post_init__(self):
        self.validate()

    def validate(self):
        if not self.instruments:
            raise ConfigError("instruments", "at least one instrument is required")
        if not self.notes:
            raise ConfigError("notes", "at least one note is required")
        if not self.snr_db_list:
            raise ConfigError("snr_db_list", "at least one SNR is required")
        for key, allowed in (("metrics", METRICS), ("representations", REPRESENTATIONS)):
            values = getattr(self, key)
            if not values:
                raise ConfigError(key, "must not be empty")
            for v in values:
                if v not in allowed:
                    raise ConfigError(key, f"unknown value {v!r}; choose from {allowed}")
        if self.algorithm not in ALGORITHMS:
            raise ConfigError("algorithm", f"choose from {ALGORITHMS}")
        if self.accompaniment not in ACCOMPANIMENTS:
            raise ConfigError("accompaniment", f"choose from {ACCOMPANIMENTS}")
        if self.duration <= 0:
            raise ConfigError("duration", "must be positive")
        if self.sample_rate <= 0:
            raise ConfigError("sample_rate", "must be positive")
        if self.fft_size <= 0 or self.fft_size & (self.fft_size - 1):
            raise ConfigError("fft_size", "must be a power of two")
        if not 1 <= self.keep_bins <= self.fft_size // 2 + 1:
            raise ConfigError("keep_bins", f"must be in [1, {self.fft_size // 2 + 1}]")
        if self.note_window is not None:
            try:
                scipy.signal.get_window(self.note_window, 8)
            except ValueError:
                raise ConfigError("note_window", f"unknown window {self.note_window!r}") from None
        if not 0 <= self.overlap < 1:
            raise ConfigError("overlap", "must be in [0, 1)")
        if self.window_size < 2:
            raise ConfigError("window_size", "must be at least 2")
        if not 1 <= self.stft_bins <= self.window_size // 2 + 1:
            raise ConfigError("stft_bins", f"must be in [1, {self.window_size // 2 + 1}]")
        if not 0 <= self.activity_threshold < 1:
            raise ConfigError("activity_threshold", "must be in [0, 1)")
        if self.rng_seed < 0:
            raise ConfigError("rng_seed", "must be non-negative")
        if not self.melody:
            raise ConfigError("melody", "at least one note is required")
        if self.melody_note_duration <= 0:
            raise ConfigError("melody_note_duration", "must be positive")

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)


def _floats(s):
    return [float(v) for v in s.split(",") if v.strip()]


def _ints(s):
    return [int(v) for v in s.split(",") if v.strip()]


def _words(s):
    return [v.strip() for v in s.split(",") if v.strip()]


def _window(s):
    return None if s.lower() in ("", "none", "rect", "rectangular", "boxcar") else s


def _optional_path(s):
    return s or None


_PARSERS = {
    "notes": _ints,
    "duration": float,
    "sample_rate": int,
    "snr_db_list": _floats,
    "fft_size": int,
    "keep_bins": int,
    "note_window": _window,
    "metrics": _words,
    "representations": _words,
    "rng_seed": int,
    "algorithm": str,
    "window_size": int,
    "overlap": float,
    "stft_bins": int,
    "activity_threshold": float,
    "accompaniment": str,
    "accompaniment_snr_db": float,
    "melody": _ints,
    "melody_note_duration": float,
    "lead_wav": _optional_path,
    "accompaniment_wav": _optional_path,
}


def parse_config(text: str, base_dir=None) -> ExperimentConfig:
    """Parse the flat key-value format into an :class:`ExperimentConfig`.

    Relative WAV paths are resolved against ``base_dir``.
    """
    values = {}
    custom_amps = {}
    custom_decay = {}
    custom_floor = {}
    instrument_names = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(line, f"line {lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        try:
            if key.startswith("instrument."):
                custom_amps[key[len("instrument."):]] = _floats(value)
            elif key.startswith("decay."):
                custom_decay[key[len("decay."):]] = float(value)
            elif key.startswith("floor."):
                custom_floor[key[len("floor."):]] = None if value.lower() == "none" else float(value)
            elif key == "instruments":
                instrument_names = _words(value)
            elif key in _PARSERS:
                values[key] = _PARSERS[key](value)
            else:
                raise ConfigError(key, f"line {lineno}: unknown key")
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(key, f"line {lineno}: cannot parse {value!r}") from None

    for prefix, table in (("decay", custom_decay), ("floor", custom_floor)):
        for name in table:
            if name not in custom_amps:
                raise ConfigError(f"{prefix}.{name}", "no matching instrument.<name> entry")
    known = dict(BUILTIN_INSTRUMENTS)
    for name, amps in custom_amps.items():
        try:
            known[name] = InstrumentSpec(tuple(amps), custom_decay.get(name, 0.0), name,
                                         custom_floor.get(name, RECORDING_FLOOR_DB))
        except ValidationError as exc:
            raise ConfigError(f"instrument.{name}", str(exc)) from None
    if instrument_names is not None:
        missing = [n for n in instrument_names if n not in known]
        if missing:
            raise ConfigError("instruments", f"unknown instrument {missing[0]!r}")
        values["instruments"] = [known[n] for n in instrument_names]
    elif custom_amps:
        values["instruments"] = [known[n] for n in custom_amps]

    if base_dir is not None:
        for key in ("lead_wav", "accompaniment_wav"):
            if values.get(key) and not Path(values[key]).is_absolute():
                values[key] = str(Path(base_dir) / values[key])
    return ExperimentConfig(**values)


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError("--config", f"cannot read {path}: {exc.strerror or exc}") from None
    return parse_config(text, base_dir=path.parent)
