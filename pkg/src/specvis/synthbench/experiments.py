"""
Nearest-neighbour retrieval experiments on clean/noisy harmonic material.

``run_experiment1``
    Whole-note spectra. Each clean note queries a pool made of every other
    clean note plus every noisy note at one SNR; the expected nearest
    neighbour is its own noisy version.
``run_experiment2_synthetic``
    Frame-level spectra. Active frames of a harmonic lead query every frame
    of the lead + accompaniment mixture; the expected nearest neighbour is
    the mixture frame at the same time index.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .._io import atomic_open
from ..errors import ValidationError
from ..similarity import (
    FeatureSet,
    mean_reciprocal_rank,
    rank_queries,
    write_rankings_csv,
    write_summary_csv,
)
from ..spectral import (
    AudioBuffer,
    degree_distribution_matrix,
    degree_matrix,
    load_wav,
    magnitude_spectrum,
    stft_magnitude,
)
from .config import ExperimentConfig
from .synth import (
    RECORDING_FLOOR_DB,
    NoteEvent,
    add_noise_at_snr,
    midi_to_hz,
    normalize_peak,
    power,
    scaled_noise,
    snr_db,
    synthesize_note,
)


# seed-sequence stream ids; SNR streams use the SNR's index
FLOOR_STREAM = 10_000
ACCOMPANIMENT_STREAM = 10_001
MELODY_STREAM = 10_002


@dataclass
class ExperimentResult:
    summary: list[dict] = field(default_factory=list)
    rankings: list[dict] = field(default_factory=list)
    # (label, requested snr, realized snr) per generated noisy signal
    snr_log: list[tuple[str, float, float]] = field(default_factory=list)

    def mrr(self, representation, metric, snr=None) -> float:
        for row in self.summary:
            if row["representation"] == representation and row["metric"] == metric and (
                snr is None or row["snr_db"] == snr
            ):
                return row["mrr"]
        raise KeyError((representation, metric, snr))

    def table(self) -> str:
        lines = [f"{'representation':<14} {'metric':<10} {'snr_db':>8} {'mrr':>8}"]
        for r in self.summary:
            lines.append(f"{r['representation']:<14} {r['metric']:<10} {r['snr_db']:>8} {r['mrr']:>8.4f}")
        return "\n".join(lines)


def represent(mags: np.ndarray, representation: str, algorithm: str = "dc") -> np.ndarray:
    """Map an F x T magnitude matrix to the requested representation (float64)."""
    if representation == "magnitude":
        return np.asarray(mags, dtype=np.float64)
    k = degree_matrix(mags, algorithm)
    if representation == "degree":
        return k.astype(np.float64)
    return degree_distribution_matrix(k)


def _note_label(kind, inst, midi, snr=None):
    base = f"{kind}:{inst}:{midi:03d}"
    return base if snr is None else f"{base}:{snr:+g}"


def _instrument_names(cfg):
    names = []
    for i, spec in enumerate(cfg.instruments):
        name = spec.name or f"inst{i}"
        while name in names:
            name += "'"
        names.append(name)
    return names


def run_experiment1(cfg: ExperimentConfig) -> ExperimentResult:
    cfg.validate()
    names = _instrument_names(cfg)
    clean_labels, clean_specs = [], []
    noisy = {s: ([], []) for s in range(len(cfg.snr_db_list))}
    result = ExperimentResult()
    for i, spec in enumerate(cfg.instruments):
        for midi in cfg.notes:
            note = NoteEvent(midi, cfg.duration, cfg.sample_rate)
            buf = synthesize_note(spec, note, np.random.SeedSequence([cfg.rng_seed, i, midi, FLOOR_STREAM]))
            clean_labels.append(_note_label("clean", names[i], midi))
            clean_specs.append(magnitude_spectrum(buf, cfg.fft_size, cfg.keep_bins, cfg.note_window))
            for s, snr in enumerate(cfg.snr_db_list):
                seed = np.random.SeedSequence([cfg.rng_seed, i, midi, s])
                noisy_buf = add_noise_at_snr(buf, snr, np.random.default_rng(seed))
                label = _note_label("noisy", names[i], midi, snr)
                result.snr_log.append((label, float(snr), snr_db(buf.samples, noisy_buf.samples - buf.samples)))
                noisy[s][0].append(label)
                noisy[s][1].append(magnitude_spectrum(noisy_buf, cfg.fft_size, cfg.keep_bins, cfg.note_window))

    clean_mags = np.array(clean_specs).T
    feats = {rep: {"clean": represent(clean_mags, rep, cfg.algorithm).T} for rep in cfg.representations}
    for s in noisy:
        mags = np.array(noisy[s][1]).T
        for rep in cfg.representations:
            feats[rep][s] = represent(mags, rep, cfg.algorithm).T

    for rep in cfg.representations:
        for metric in cfg.metrics:
            for s, snr in enumerate(cfg.snr_db_list):
                pool = FeatureSet(np.vstack([feats[rep]["clean"], feats[rep][s]]), clean_labels + noisy[s][0])
                queries = FeatureSet(feats[rep]["clean"], clean_labels)
                ranked = rank_queries(queries, pool, targets=noisy[s][0], metric=metric, exclude=clean_labels)
                result.summary.append(
                    {"representation": rep, "metric": metric, "snr_db": float(snr),
                     "mrr": mean_reciprocal_rank(ranked)}
                )
                result.rankings.extend(_ranking_rows(ranked, metric, rep))
    return result


def _ranking_rows(ranked, metric, rep):
    return [
        {"query": r.query_label, "target": r.target_label, "metric": metric, "representation": rep,
         "rank": r.rank, "reciprocal_rank": r.reciprocal_rank}
        for r in ranked
    ]


# -- frame-level experiment ---------------------------------------------------

def synthesize_melody(cfg: ExperimentConfig, n_partials: int = 5, rng_seed=None) -> AudioBuffer:
    """Vibrato melody of ``n_partials`` harmonics, one note per ``melody`` entry.

    Notes are separated by short rests so that some frames carry no lead,
    and the result carries the same recording floor as the built-in
    instruments.
    """
    sr = cfg.sample_rate
    note_len = int(round(cfg.melody_note_duration * sr))
    rest = int(round(0.08 * sr))
    attack, release = min(note_len, int(0.02 * sr)), min(note_len, int(0.05 * sr))
    pieces = []
    for midi in cfg.melody:
        t = np.arange(note_len) / sr
        # 5.5 Hz vibrato of +-0.5 semitone keeps successive frames distinct
        f0 = midi_to_hz(midi) * 2 ** (0.5 * np.sin(2 * np.pi * 5.5 * t) / 12)
        phase = 2 * np.pi * np.cumsum(f0) / sr
        env = np.ones(note_len)
        env[:attack] = np.linspace(0, 1, attack, endpoint=False)
        env[note_len - release:] = np.linspace(1, 0, release)
        tone = np.zeros(note_len)
        for p in range(1, n_partials + 1):
            if p * f0.max() >= sr / 2:
                break
            tone += np.sin(p * phase) / p
        pieces.append(tone * env)
        pieces.append(np.zeros(rest))
    x = np.concatenate(pieces)
    if rng_seed is None:
        rng_seed = np.random.SeedSequence([cfg.rng_seed, MELODY_STREAM])
    x = x + scaled_noise(x, RECORDING_FLOOR_DB, np.random.default_rng(rng_seed))
    return AudioBuffer(normalize_peak(x), sr)


def pink_noise(n: int, rng: np.random.Generator) -> np.ndarray:
    """Gaussian noise with a 1/f power spectrum and no DC component."""
    spectrum = np.fft.rfft(rng.standard_normal(n))
    f = np.arange(spectrum.size, dtype=np.float64)
    spectrum[0] = 0.0
    spectrum[1:] /= np.sqrt(f[1:])
    return np.fft.irfft(spectrum, n)


def synthesize_accompaniment(lead: AudioBuffer, snr: float, seed) -> AudioBuffer:
    """Broadband accompaniment: pink-noise hits every 0.25 s over a pink-noise bed.

    Scaled so the lead sits ``snr`` dB above it over the whole excerpt.
    """
    rng = np.random.default_rng(seed)
    n = len(lead)
    t = np.arange(n) / lead.sample_rate
    env = 0.3 + np.exp(-np.mod(t, 0.25) * 18.0)
    x = pink_noise(n, rng) * env
    ps = power(lead.samples)
    if ps == 0:
        return AudioBuffer(np.zeros(n), lead.sample_rate)
    gain = np.sqrt(ps / (power(x) * 10 ** (snr / 10)))
    return AudioBuffer(gain * x, lead.sample_rate)


def _match_length(x, n):
    out = np.zeros(n)
    out[: min(n, x.size)] = x[:n]
    return out


def active_frames(mags: np.ndarray, threshold: float) -> np.ndarray:
    """Indices of frames whose energy exceeds ``threshold`` times the loudest frame."""
    energy = np.sum(np.asarray(mags) ** 2, axis=0)
    peak = energy.max()
    if peak <= 0:
        return np.array([], dtype=np.int64)
    return np.flatnonzero(energy > threshold * peak)


def run_experiment2_synthetic(cfg: ExperimentConfig) -> ExperimentResult:
    cfg.validate()
    if cfg.lead_wav:
        lead = load_wav(cfg.lead_wav)
    else:
        lead = synthesize_melody(cfg)
    if cfg.accompaniment_wav:
        acc = load_wav(cfg.accompaniment_wav)
        if acc.sample_rate != lead.sample_rate:
            raise ValidationError(
                f"sample rates differ: lead {lead.sample_rate} Hz, accompaniment {acc.sample_rate} Hz"
            )
        acc_samples = _match_length(acc.samples, len(lead))
        snr_label = float("nan")
    elif cfg.accompaniment == "silence" or power(lead.samples) == 0:
        acc_samples = np.zeros(len(lead))
        snr_label = float("inf")
    else:
        acc_samples = synthesize_accompaniment(lead, cfg.accompaniment_snr_db,
                                               np.random.SeedSequence([cfg.rng_seed, ACCOMPANIMENT_STREAM])).samples
        snr_label = float(cfg.accompaniment_snr_db)
    mix = AudioBuffer(normalize_peak(lead.samples + acc_samples), lead.sample_rate)

    lead_spec = stft_magnitude(lead, cfg.window_size, cfg.overlap, cfg.stft_bins)
    mix_spec = stft_magnitude(mix, cfg.window_size, cfg.overlap, cfg.stft_bins)
    queries_idx = active_frames(lead_spec.mags, cfg.activity_threshold)
    if queries_idx.size == 0:
        raise ValidationError("no active lead frames: nothing to query")

    result = ExperimentResult()
    if np.isfinite(snr_label):
        result.snr_log.append(("accompaniment", snr_label, snr_db(lead.samples, acc_samples)))
    frame_labels = list(range(mix_spec.n_frames))
    for rep in cfg.representations:
        q = represent(lead_spec.mags[:, queries_idx], rep, cfg.algorithm).T
        c = represent(mix_spec.mags, rep, cfg.algorithm).T
        queries = FeatureSet(q, [int(i) for i in queries_idx])
        pool = FeatureSet(c, frame_labels)
        for metric in cfg.metrics:
            ranked = rank_queries(queries, pool, targets=[int(i) for i in queries_idx], metric=metric)
            result.summary.append(
                {"representation": rep, "metric": metric, "snr_db": snr_label,
                 "mrr": mean_reciprocal_rank(ranked)}
            )
            result.rankings.extend(_ranking_rows(ranked, metric, rep))
    return result


# -- output ------------------------------------------------------------------

def write_result(result: ExperimentResult, out_dir, prefix: str) -> list[Path]:
    """Write ``<prefix>_summary.csv`` and ``<prefix>_rankings.csv`` into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    summary = out / f"{prefix}_summary.csv"
    rankings = out / f"{prefix}_rankings.csv"
    with atomic_open(summary) as fh:
        write_summary_csv(fh, result.summary)
    with atomic_open(rankings) as fh:
        write_rankings_csv(fh, result.rankings)
    return [summary, rankings]
