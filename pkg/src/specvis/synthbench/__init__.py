"""Synthetic harmonic notes and the retrieval experiments built on them."""

from .config import REPRESENTATIONS, ExperimentConfig, load_config, parse_config
from .experiments import (
    ExperimentResult,
    active_frames,
    represent,
    run_experiment1,
    run_experiment2_synthetic,
    synthesize_accompaniment,
    synthesize_melody,
    write_result,
)
from .synth import (
    BUILTIN_INSTRUMENTS,
    DEFAULT_NOTES,
    InstrumentSpec,
    NoteEvent,
    add_noise_at_snr,
    midi_to_hz,
    snr_db,
    synthesize_note,
)
