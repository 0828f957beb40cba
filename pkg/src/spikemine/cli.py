"""Command-line front end: simulate, mine, significance.

Every run writes a flat key=value manifest next to its output with the
full parameter snapshot, seeds, and sha256 checksums, so the output file
can be regenerated byte-identically from the manifest alone.

Exit codes: 0 success, 1 usage error, 2 I/O error, 3 config error.
"""

from __future__ import annotations

import argparse
import hashlib
import sys
import time
from dataclasses import replace
from fractions import Fraction
from pathlib import Path

from .episodes import Interval, MiningConfig
from .events import SpikeFileError, as_tick_seconds, parse_spike_file, write_spike_file
from .parallel import mine_parallel
from .serial import mine_serial
from .significance import run_significance
from .simulator import (
    ConfigError,
    NetworkConfig,
    embed_pattern,
    parse_network_config,
    simulate,
)
from .synfire import mine_synfire

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_CONFIG = 3


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits 2; usage errors are 1 here
        self.print_usage(sys.stderr)
        raise SystemExit(_fail(EXIT_USAGE, message))


def _fail(code: int, message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _write_manifest(path: Path, entries: list[tuple[str, object]]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("# run manifest\n")
        for key, value in entries:
            fh.write(f"{key} = {value}\n")


def _parse_intervals_ms(spec: str, tick_seconds: Fraction) -> tuple[Interval, ...]:
    """'a-b,c-d' in milliseconds -> tick intervals (a,b],(c,d]."""
    intervals = []
    for part in spec.split(","):
        lo_txt, sep, hi_txt = part.strip().partition("-")
        if not sep:
            raise UsageError(f"bad interval {part!r}, expected LOW-HIGH in ms")
        try:
            intervals.append(
                Interval(_ms_to_ticks(lo_txt, tick_seconds), _ms_to_ticks(hi_txt, tick_seconds))
            )
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    return tuple(intervals)


def _ms_to_ticks(text: str, tick_seconds: Fraction) -> int:
    try:
        ms = Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"bad millisecond value {text!r}") from None
    ticks = ms / 1000 / tick_seconds
    if ticks.denominator != 1:
        raise UsageError(f"{text} ms is not a whole number of ticks at {tick_seconds}s/tick")
    return int(ticks)


def _config_entries(config: NetworkConfig) -> list[tuple[str, object]]:
    entries = []
    for key in (
        "num_neurons", "weight_bound", "lambda_max", "rate_offset", "delta_t",
        "synaptic_delay_steps", "refractory_steps", "duration", "seed",
        "weight_seed", "strong_weight", "relay_weight", "group_weight", "rate_mode",
    ):
        entries.append((f"config.{key}", getattr(config, key)))
    labels = config.labels
    for i, edge in enumerate(config.strong_edges):
        entries.append(
            (f"config.edge.{i}",
             f"{labels[edge.src]},{labels[edge.dst]},{edge.weight},{edge.delay_steps}")
        )
    return entries


def _write_levels(path: Path, kind: str, levels, tick_seconds: Fraction) -> None:
    # timings go to the manifest, not here: same seed and flags must
    # reproduce this file byte for byte
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# frequent episodes ({kind})\n")
        fh.write(f"# tick_seconds = {tick_seconds}\n")
        for level in levels:
            fh.write(
                f"# level size={level.size} candidates={level.n_candidates} "
                f"frequent={len(level.counts)}\n"
            )
            for count in level.counts:
                fh.write(f"{count.episode} : {count.freq}\n")


def cmd_simulate(args) -> int:
    config = parse_network_config(args.config) if args.config else NetworkConfig()
    if args.seed is not None:
        config = replace(config, seed=args.seed)
    if args.duration is not None:
        config = replace(config, duration=args.duration)
    if args.pattern:
        config = embed_pattern(config, args.pattern)
    t0 = time.perf_counter()
    run = simulate(config)
    sim_seconds = time.perf_counter() - t0
    out = Path(args.out)
    write_spike_file(run.sequence, out)
    entries = [
        ("command", "simulate"),
        ("pattern", args.pattern or "none"),
        ("output", out),
        ("output_sha256", _sha256(out)),
        ("total_spikes", run.total_spikes),
        ("phase.simulate_sec", f"{sim_seconds:.3f}"),
    ]
    entries.extend(_config_entries(config))
    _write_manifest(out.with_suffix(out.suffix + ".manifest"), entries)
    print(f"{run.total_spikes} spikes over {config.duration} s -> {out}")
    return EXIT_OK


def cmd_mine(args) -> int:
    tick = as_tick_seconds(args.tick)
    if args.kind in ("serial", "synfire") and not args.intervals:
        raise UsageError(f"{args.kind} mining requires --intervals")
    if args.kind in ("parallel", "synfire") and args.expiry is None:
        raise UsageError(f"{args.kind} mining requires --expiry")
    intervals = _parse_intervals_ms(args.intervals, tick) if args.intervals else ()
    expiry = _ms_to_ticks(args.expiry, tick) if args.expiry is not None else 0
    if args.kind in ("parallel", "synfire") and expiry <= 0:
        raise UsageError("--expiry must be at least one tick")
    try:
        cfg = MiningConfig(
            freq_threshold=args.threshold,
            max_size=args.max_size,
            candidate_intervals=tuple(sorted(intervals)),
            expiry=expiry,
            track_occurrences=args.track,
            min_count=args.min_count,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None

    t0 = time.perf_counter()
    seq = parse_spike_file(args.input, tick)
    parse_seconds = time.perf_counter() - t0

    t0 = time.perf_counter()
    if args.kind == "serial":
        levels = mine_serial(seq, cfg, jobs=args.jobs)
    elif args.kind == "parallel":
        levels = mine_parallel(seq, cfg, jobs=args.jobs)
    else:
        levels = mine_synfire(seq, cfg, jobs=args.jobs).serial_levels
    mine_seconds = time.perf_counter() - t0

    out = Path(args.out) if args.out else Path(args.input).with_suffix(".episodes")
    _write_levels(out, args.kind, levels, tick)
    entries = [
        ("command", "mine"),
        ("kind", args.kind),
        ("input", args.input),
        ("input_sha256", _sha256(Path(args.input))),
        ("output", out),
        ("output_sha256", _sha256(out)),
        ("tick_seconds", tick),
        ("threshold", args.threshold),
        ("min_count", args.min_count if args.min_count is not None else "-"),
        ("intervals_ms", args.intervals or "-"),
        ("expiry_ms", args.expiry if args.expiry is not None else "-"),
        ("max_size", args.max_size),
        ("track", args.track),
        ("jobs", args.jobs),
        ("events", len(seq)),
        ("phase.parse_sec", f"{parse_seconds:.3f}"),
        ("phase.mine_sec", f"{mine_seconds:.3f}"),
    ]
    for level in levels:
        entries.append((f"phase.level{level.size}_sec", f"{level.seconds:.3f}"))
    _write_manifest(out.with_suffix(out.suffix + ".manifest"), entries)
    total = sum(len(level.counts) for level in levels)
    top = max((level.size for level in levels if level.counts), default=0)
    print(f"{total} frequent episodes (largest size {top}) -> {out}")
    return EXIT_OK


def cmd_significance(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    if args.scale == "paper":
        # full-scale run: hours of compute; kept out of any automated suite
        params = dict(weight_seeds=10, noise_runs_per_seed=10, random_rate_runs=50,
                      patterned_runs=20, max_size=10)
    else:
        params = dict(weight_seeds=10, noise_runs_per_seed=2, random_rate_runs=5,
                      patterned_runs=5, max_size=args.max_size)
    t0 = time.perf_counter()
    report = run_significance(jobs=args.jobs, seed0=args.seed, **params)
    elapsed = time.perf_counter() - t0
    text_path = out_dir / "significance.txt"
    csv_path = out_dir / "significance.csv"
    text_path.write_text(report.to_text(), encoding="utf-8")
    csv_path.write_text(report.to_csv(), encoding="utf-8")
    entries = [
        ("command", "significance"),
        ("scale", args.scale),
        ("seed", args.seed),
        ("jobs", args.jobs),
        ("report_txt", text_path),
        ("report_txt_sha256", _sha256(text_path)),
        ("report_csv", csv_path),
        ("report_csv_sha256", _sha256(csv_path)),
        ("random_samples", report.random_samples),
        ("patterned_samples", report.patterned_samples),
        ("phase.total_sec", f"{elapsed:.3f}"),
    ]
    _write_manifest(out_dir / "significance.manifest", entries)
    print(report.to_text(), end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="spikemine", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="generate a synthetic spike stream")
    sim.add_argument("out", help="output spike CSV path")
    sim.add_argument("--config", help="network config file (key = value lines)")
    sim.add_argument("--pattern", default="none",
                     help="embedded topology: example1|example2|example3|chain-<k>|none")
    sim.add_argument("--seed", type=int, default=None)
    sim.add_argument("--duration", type=float, default=None, help="seconds")
    sim.set_defaults(func=cmd_simulate)

    mine = sub.add_parser("mine", help="mine frequent episodes from a spike CSV")
    mine.add_argument("kind", choices=("serial", "parallel", "synfire"))
    mine.add_argument("input", help="spike CSV path")
    mine.add_argument("--out", help="results path (default: input with .episodes)")
    mine.add_argument("--threshold", type=float, default=0.01,
                      help="frequency threshold as a fraction of stream length")
    mine.add_argument("--min-count", type=int, default=None,
                      help="absolute occurrence floor (overrides --threshold)")
    mine.add_argument("--intervals", help="gap windows in ms, e.g. 4-6 or 0-2,2-4")
    mine.add_argument("--expiry", help="span limit in ms for parallel/synfire")
    mine.add_argument("--max-size", type=int, default=8)
    mine.add_argument("--track", action="store_true", help="record counted occurrences")
    mine.add_argument("--tick", default="0.001", help="seconds per tick of the input")
    mine.add_argument("--jobs", type=int, default=1)
    mine.set_defaults(func=cmd_mine)

    sig = sub.add_parser("significance", help="random vs patterned frequency profiles")
    sig.add_argument("out", help="output directory")
    sig.add_argument("--scale", choices=("desk", "paper"), default="desk")
    sig.add_argument("--max-size", type=int, default=6)
    sig.add_argument("--seed", type=int, default=1)
    sig.add_argument("--jobs", type=int, default=1)
    sig.set_defaults(func=cmd_significance)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        return _fail(EXIT_USAGE, str(exc))
    except (ConfigError,) as exc:
        return _fail(EXIT_CONFIG, str(exc))
    except SpikeFileError as exc:
        return _fail(EXIT_IO, str(exc))
    except OSError as exc:
        return _fail(EXIT_IO, str(exc))


if __name__ == "__main__":
    sys.exit(main())
