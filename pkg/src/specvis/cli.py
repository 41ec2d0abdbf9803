"""
Command-line interface.

    specvis graph  heights.csv --out edges.csv [--degrees degrees.csv]
    specvis svg    audio.wav --out K.csv [--representation degree] [--pgm K.pgm]
    specvis experiment synth1 [--config cfg.txt] [--out-dir results/]

Exit status: 0 on success, 1 on usage or configuration errors, 2 on
data or validation errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import spectral, vgraph
from ._io import atomic_open
from .errors import UsageError, ValidationError
from .synthbench import ExperimentConfig, load_config, run_experiment1, run_experiment2_synthetic, write_result
from .synthbench.experiments import represent

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_float(text):
    v = float(text)
    if v <= 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="specvis", description="Visibility graphs of sequences and magnitude spectra.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("graph", help="visibility graph of a single-column CSV sequence")
    g.add_argument("input", type=Path)
    g.add_argument("--algorithm", choices=vgraph.ALGORITHMS, default="dc")
    g.add_argument("--out", type=Path, required=True, help="edge list CSV (header i,j)")
    g.add_argument("--degrees", type=Path, help="optional degree vector CSV")
    g.add_argument("--adjacency", type=Path, help="optional dense 0/1 adjacency matrix")
    g.set_defaults(func=cmd_graph)

    s = sub.add_parser("svg", help="spectrogram, degree or degree-distribution matrix of a WAV file")
    s.add_argument("input", type=Path)
    s.add_argument("--window", type=int, default=spectral.STFT_WINDOW)
    s.add_argument("--overlap", type=float, default=spectral.STFT_OVERLAP)
    s.add_argument("--bins", type=int, default=spectral.STFT_KEEP_BINS)
    s.add_argument("--representation", choices=("magnitude", "degree", "distribution"), default="degree")
    s.add_argument("--algorithm", choices=vgraph.ALGORITHMS, default="dc")
    s.add_argument("--out", type=Path, required=True, help="matrix CSV (rows,cols header)")
    s.add_argument("--pgm", type=Path, help="optional P2 grey-map rendering")
    s.add_argument("--gamma", type=_positive_float, default=0.6)
    s.set_defaults(func=cmd_svg)

    e = sub.add_parser("experiment", help="run a synthetic retrieval experiment")
    e.add_argument("which", choices=("synth1", "synth2"))
    e.add_argument("--config", type=Path, help="key = value configuration file")
    e.add_argument("--out-dir", type=Path, default=Path("."))
    e.add_argument("--seed", type=int, help="override rng_seed from the configuration")
    e.set_defaults(func=cmd_experiment)
    return p


def cmd_graph(args) -> int:
    seq = vgraph.read_sequence_csv(args.input)
    g = vgraph.build(seq, args.algorithm)
    with atomic_open(args.out) as fh:
        vgraph.write_edges_csv(fh, g)
    if args.degrees:
        with atomic_open(args.degrees) as fh:
            vgraph.write_degrees_csv(fh, vgraph.degree_vector(g))
    if args.adjacency:
        with atomic_open(args.adjacency) as fh:
            vgraph.write_adjacency_csv(fh, g)
    return EXIT_OK


def cmd_svg(args) -> int:
    buf = spectral.load_wav(args.input)
    spec = spectral.stft_magnitude(buf, args.window, args.overlap, args.bins)
    matrix = represent(spec.mags, args.representation, args.algorithm)
    if args.representation == "degree":
        matrix = matrix.astype(int)
    with atomic_open(args.out) as fh:
        spectral.write_matrix_csv(fh, matrix)
    if args.pgm:
        with atomic_open(args.pgm) as fh:
            fh.write(spectral.to_pgm(matrix, args.gamma))
    return EXIT_OK


def cmd_experiment(args) -> int:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    if args.seed is not None:
        cfg = cfg.replace(rng_seed=args.seed)
    run = run_experiment1 if args.which == "synth1" else run_experiment2_synthetic
    result = run(cfg)
    write_result(result, args.out_dir, args.which)
    print(result.table())
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"specvis: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValidationError as exc:
        print(f"specvis: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"specvis: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
