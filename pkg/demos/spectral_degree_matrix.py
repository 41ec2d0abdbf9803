"""
From a spectrogram to a degree matrix
=====================================

Each STFT column is turned into a visibility graph over frequency bins and
replaced by its degree vector. Harmonic peaks stand out because they see far
across the spectrum, while the noise floor only sees its neighbours.
"""

from pathlib import Path

import numpy as np

from specvis.spectral import AudioBuffer, degree_matrix, stft_magnitude, to_pgm, write_wav
from specvis.synthbench import ExperimentConfig
from specvis.synthbench.experiments import synthesize_accompaniment, synthesize_melody

out = Path("demo_output")
out.mkdir(exist_ok=True)

cfg = ExperimentConfig(melody=[57, 60, 64, 67, 64, 60])
lead = synthesize_melody(cfg)
noise = synthesize_accompaniment(lead, 10.0, seed=3)
mix = AudioBuffer(lead.samples + noise.samples, lead.sample_rate)
write_wav(out / "mix.wav", mix)

spec = stft_magnitude(mix)  # 2046-sample Hann frames, half overlap, 500 bins
print("spectrogram:", spec.mags.shape, f"{spec.bin_hz:.2f} Hz per bin")

k = degree_matrix(spec)
print("degree range:", k.min(), "to", k.max())

# in a frame of the first note (A3, 220 Hz) the highest-degree bins sit
# near multiples of the fundamental
t = 10
top = np.sort(np.argsort(k[:, t])[-5:])
print("frame", t, "top-degree bins:", top, "->", np.round(top * spec.bin_hz), "Hz")

# grey-level pictures, low frequencies at the bottom
(out / "magnitude.pgm").write_text(to_pgm(spec.mags))
(out / "degree.pgm").write_text(to_pgm(k.astype(float)))
print("wrote", sorted(p.name for p in out.iterdir()))
