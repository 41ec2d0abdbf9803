"""
Locating lead frames inside a mixture
=====================================

Active frames of a clean lead line are matched against every frame of the
lead mixed with a broadband accompaniment. The target for each query is the
mixture frame at the same time index.
"""

from specvis.synthbench import ExperimentConfig, run_experiment2_synthetic

for acc in ("silence", "noise"):
    cfg = ExperimentConfig(accompaniment=acc, accompaniment_snr_db=0.0)
    result = run_experiment2_synthetic(cfg)
    print(f"accompaniment = {acc}")
    print(result.table(), end="\n\n")

###############################################################################
# The same harness can be pointed at a real pair of stems:
#
#     cfg = ExperimentConfig(lead_wav="vocals.wav", accompaniment_wav="backing.wav")
#
# or, from a shell, with a config file holding those two keys:
#
#     specvis experiment synth2 --config stems.cfg --out-dir results
