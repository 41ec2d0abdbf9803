"""
Acceptance suite. Each test prints one ``[PASS]``/``[FAIL]`` line (or
``[FLAG]`` for timing-sensitive checks) and the lines are repeated in the
terminal summary.
"""

import time

import numpy as np
import pytest

from specvis import build_dc, build_naive, degree_vector
from specvis.spectral import AudioBuffer, stft_magnitude
from specvis.synthbench import ExperimentConfig, run_experiment1, run_experiment2_synthetic
from specvis.synthbench.experiments import synthesize_accompaniment, synthesize_melody, write_result

from conftest import adversarial_sequences

SEEDS = (1, 2, 3)


def random_sequences(count, rng, quantized=True):
    """Mix of continuous, quantized (tie-heavy) and random-walk sequences."""
    kinds = (0, 1, 2, 3) if quantized else (0, 1, 3)
    out = []
    for i in range(count):
        n = int(rng.integers(2, 513))
        kind = kinds[i % len(kinds)]
        if kind == 0:
            out.append(rng.random(n))
        elif kind == 1:
            out.append(rng.standard_normal(n) * 10 ** rng.uniform(-3, 3))
        elif kind == 2:
            out.append(rng.integers(0, 5, n).astype(float))
        else:
            out.append(np.cumsum(rng.standard_normal(n)))
    return out


def spectrogram_columns(count, rng):
    cfg = ExperimentConfig(melody=[57, 64, 60])
    lead = synthesize_melody(cfg)
    acc = synthesize_accompaniment(lead, 0.0, 77).samples
    mags = stft_magnitude(AudioBuffer(lead.samples + acc, lead.sample_rate)).mags
    return [mags[:, t] for t in rng.choice(mags.shape[1], count, replace=False)]


def test_criterion_1_oracle_equivalence(acceptance_report):
    rng = np.random.default_rng(1)
    seqs = random_sequences(240, rng) + list(adversarial_sequences().values())
    start = time.perf_counter()
    bad = [i for i, s in enumerate(seqs) if build_dc(s).edge_set() != build_naive(s).edge_set()]
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < 30
    acceptance_report(1, ok, f"{len(seqs)} sequences, {len(bad)} mismatches, {elapsed:.2f} s (limit 30 s)")
    assert ok


def test_criterion_2_invariance(acceptance_report):
    rng = np.random.default_rng(2)
    start = time.perf_counter()
    cases = random_sequences(50, rng, quantized=False) + spectrogram_columns(20, rng)
    failures = sum(_changed_by_transforms(h) for h in cases)
    elapsed = time.perf_counter() - start
    # Integer-valued sequences are full of exact collinear triples. Multiplying
    # by 0.01 rounds each value on its own and breaks some of them, so the
    # scaled input really has a different graph. Reported, not gated.
    tied = random_sequences(20, rng)[2::4]
    tied_changed = sum(_changed_by_transforms(h) for h in tied)
    ok = failures == 0 and elapsed < 10
    acceptance_report(2, ok, f"{len(cases)} inputs x 6 transforms, {failures} changed edge sets, {elapsed:.2f} s; "
                             f"integer-valued extras: {tied_changed}/{6 * len(tied)} changed")
    assert ok


def _changed_by_transforms(h):
    ref = build_dc(h)
    return (sum(build_dc(h + c) != ref for c in (-5.0, 0.1, 1000.0))
            + sum(build_dc(h * a) != ref for a in (0.01, 3.0, 1e6)))


def test_criterion_3_analytic_shapes(acceptance_report):
    checks = {}
    for n in (2, 3, 10, 100, 500):
        i = np.arange(n, dtype=float)
        for name, builder in (("dc", build_dc), ("naive", build_naive)):
            path = degree_vector(builder(3 * i - 7))
            checks[f"line-{n}-{name}"] = path.tolist() == ([1, 1] if n == 2 else [1] + [2] * (n - 2) + [1])
            checks[f"convex-{n}-{name}"] = len(builder((i - n / 3) ** 2)) == n * (n - 1) // 2
    examples = {
        "collinear": ([0, 1, 2, 3, 4], [1, 2, 2, 2, 1]),
        "convex": ([4, 1, 0, 1, 4], [4, 4, 4, 4, 4]),
        "constant": ([5, 5, 5, 5], [1, 2, 2, 1]),
        "tied-maxima": ([1, 3, 2, 3, 1], [1, 3, 2, 3, 1]),
    }
    for name, (seq, want) in examples.items():
        checks[f"example-{name}"] = degree_vector(build_dc(seq)).tolist() == want
    failed = sorted(k for k, v in checks.items() if not v)
    acceptance_report(3, not failed, f"{len(checks)} shape checks, failed: {failed or 'none'}")
    assert not failed


def _median_time(builder, seq, trials=5):
    times = []
    for _ in range(trials):
        start = time.perf_counter()
        builder(seq)
        times.append(time.perf_counter() - start)
    return float(np.median(times))


def test_criterion_4_complexity(acceptance_report):
    rng = np.random.default_rng(4)
    build_dc(rng.random(64))
    build_naive(rng.random(64))
    sizes = (2**10, 2**12, 2**14)
    seqs = {n: rng.random(n) for n in sizes}
    ratios = {}
    for name, builder in (("dc", build_dc), ("naive", build_naive)):
        t = [_median_time(builder, seqs[n]) for n in sizes]
        ratios[name] = [t[1] / t[0], t[2] / t[1]]
    dc_ratio, naive_ratio = np.mean(ratios["dc"]), np.mean(ratios["naive"])
    ok = dc_ratio < 8 and naive_ratio > 10
    detail = (f"time(4n)/time(n) dc {ratios['dc'][0]:.1f}, {ratios['dc'][1]:.1f} (mean {dc_ratio:.1f}, want < 8); "
              f"naive {ratios['naive'][0]:.1f}, {ratios['naive'][1]:.1f} (mean {naive_ratio:.1f}, want > 10)")
    # timing depends on the host: report a flag rather than failing
    acceptance_report(4, True if ok else None, detail)
    if not ok:
        pytest.skip("timing ratios outside the expected band on this host: " + detail)


@pytest.fixture(scope="module")
def experiment1_runs():
    return {seed: run_experiment1(ExperimentConfig(rng_seed=seed)) for seed in SEEDS}


@pytest.fixture(scope="module")
def experiment2_runs():
    return {seed: run_experiment2_synthetic(ExperimentConfig(rng_seed=seed)) for seed in SEEDS}


def test_criterion_5_snr_calibration(acceptance_report, experiment1_runs):
    log = [entry for r in experiment1_runs.values() for entry in r.snr_log]
    worst = max(abs(got - want) for _, want, got in log)
    ok = worst <= 0.01
    acceptance_report(5, ok, f"{len(log)} noisy notes, worst deviation {worst:.2e} dB (limit 0.01 dB)")
    assert ok


def test_criterion_6_experiment1_ordering(acceptance_report, experiment1_runs):
    violations = []
    lines = []
    for seed, r in experiment1_runs.items():
        for snr in ExperimentConfig().snr_db_list:
            deg = r.mrr("degree", "cosine", snr)
            mag_c = r.mrr("magnitude", "cosine", snr)
            mag_e = r.mrr("magnitude", "euclidean", snr)
            dist = r.mrr("distribution", "cosine", snr)
            if snr <= 0 and not (deg > mag_c and deg > mag_e):
                violations.append(f"seed {seed} snr {snr:+g}: degree {deg:.3f} vs magnitude {mag_c:.3f}/{mag_e:.3f}")
            if not deg >= dist:
                violations.append(f"seed {seed} snr {snr:+g}: degree {deg:.3f} < distribution {dist:.3f}")
            if snr in (-20.0, 0.0):
                lines.append(f"s{seed}@{snr:+g}: deg/cos {deg:.3f} mag/cos {mag_c:.3f} mag/euc {mag_e:.3f} "
                             f"dist/cos {dist:.3f}")
    acceptance_report(6, not violations, "; ".join(violations or lines))
    assert not violations


def test_criterion_7_experiment2_ordering(acceptance_report, experiment2_runs):
    violations = []
    lines = []
    for seed, r in experiment2_runs.items():
        for m in ("euclidean", "cosine"):
            deg, mag, dist = (r.mrr(rep, m) for rep in ("degree", "magnitude", "distribution"))
            if not (deg > mag and deg > dist):
                violations.append(f"seed {seed} {m}: degree {deg:.3f} magnitude {mag:.3f} distribution {dist:.3f}")
            lines.append(f"s{seed} {m}: deg {deg:.3f} mag {mag:.3f} dist {dist:.3f}")
    control = run_experiment2_synthetic(ExperimentConfig(accompaniment="silence"))
    off = [(row["representation"], row["metric"], row["mrr"]) for row in control.summary if row["mrr"] != 1.0]
    if off:
        violations.append(f"silent control below 1.0: {off}")
    acceptance_report(7, not violations, "; ".join(violations or lines + ["silent control 1.0 for all"]))
    assert not violations


def test_criterion_8_determinism(acceptance_report, experiment1_runs, experiment2_runs, tmp_path):
    differing = []
    for prefix, run, first in (("synth1", run_experiment1, experiment1_runs[1]),
                               ("synth2", run_experiment2_synthetic, experiment2_runs[1])):
        a = write_result(first, tmp_path / "first", prefix)
        b = write_result(run(ExperimentConfig(rng_seed=1)), tmp_path / "second", prefix)
        differing += [p.name for p, q in zip(a, b) if p.read_bytes() != q.read_bytes()]
    acceptance_report(8, not differing, f"4 CSVs compared, differing: {differing or 'none'}")
    assert not differing


def test_high_snr_not_worse_than_low_snr(experiment1_runs):
    for r in experiment1_runs.values():
        for rep in ("magnitude", "degree", "distribution"):
            for m in ("euclidean", "cosine"):
                assert r.mrr(rep, m, 20.0) >= r.mrr(rep, m, -20.0)
