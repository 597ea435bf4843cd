"""Command-line front end: ingest -> analyze -> plot-ready reports.

Subcommands: analyze (per-bin stats + consistent-CV report), histogram
(raw/normalized families + convergence), verify (property suite), synth
(WAV from a scaling-model file), report (Table-style merge of analyze
outputs), rerun (bit-exact re-execution from a manifest). Every run writes
a manifest describing exactly how to reproduce its outputs.
"""

from __future__ import annotations

import argparse
import dataclasses
import glob
import json
import re
import sys
from pathlib import Path

from specamp import backend
from specamp.histograms import bin_histograms, convergence_metric, save_family_csv
from specamp.manifest import OutputSet, compare_outputs, load_manifest, write_manifest
from specamp.signal_io import NoiseSpec, generate_noise, read_wav, write_wav
from specamp.spectral import StftConfig, stft_magnitudes
from specamp.stats import estimate_bin_statistics, fit_consistent_cv, save_stats_csv
from specamp.synthesis import ScalingModel, synthesize
from specamp.verify import DEFAULT_SEED, run_all

_BIN_RANGE = re.compile(r"^(\d+)\.\.(\d+)$")


def _parse_bins(text: str) -> tuple[int, int]:
    m = _BIN_RANGE.match(text)
    if not m:
        raise argparse.ArgumentTypeError(f"expected LO..HI (inclusive), got {text!r}")
    lo, hi = int(m.group(1)), int(m.group(2))
    if hi < lo:
        raise argparse.ArgumentTypeError(f"empty bin range {text!r}")
    return (lo, hi + 1)  # half-open internally


def _stft_dict(args, sample_rate_hz: int) -> dict:
    return StftConfig(
        frame_len=args.frame_len,
        hop=args.hop,
        window=args.window,
        sample_rate_hz=sample_rate_hz,
    ).to_dict()


def _load_signal(run: dict):
    """Resolve the run's input into (Signal, StftConfig)."""
    stft = StftConfig.from_dict(run["stft"])
    inp = run["input"]
    if "wav" in inp:
        signal = read_wav(inp["wav"])
        if signal.sample_rate_hz != stft.sample_rate_hz:
            stft = dataclasses.replace(stft, sample_rate_hz=signal.sample_rate_hz)
    else:
        spec = NoiseSpec.from_json(json.dumps(inp["noise"]))
        signal = generate_noise(spec, stft.sample_rate_hz)
    return signal, stft


def _span(run: dict) -> tuple[int, int] | None:
    bins = run.get("included_bins")
    return (bins[0], bins[1]) if bins is not None else None


def _cmd_analyze(run: dict, outs: OutputSet) -> int:
    signal, stft = _load_signal(run)
    series = stft_magnitudes(signal, stft)
    stats = estimate_bin_statistics(series)
    report = fit_consistent_cv(stats, _span(run))
    save_stats_csv(stats, series.bin_freqs_hz, outs.stage("stats.csv"))
    payload = {"label": run["label"], **report.to_dict()}
    outs.stage("cv_report.json").write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    print(
        f"{run['label']}: rho={report.rho:.4f} c_s={report.c_s:.4f} "
        f"frames={report.n_frames} bins=[{report.included_bins[0]},{report.included_bins[1]})"
    )
    return 0


def _cmd_histogram(run: dict, outs: OutputSet) -> int:
    signal, stft = _load_signal(run)
    series = stft_magnitudes(signal, stft)
    span = _span(run)
    families = {}
    for name, normalized in (("normalized", True), ("raw", False)):
        fam = bin_histograms(series, n_buckets=run["n_buckets"], normalized=normalized, bin_span=span)
        save_family_csv(fam, outs.stage(f"histograms_{name}.csv"))
        families[name] = fam
    metrics = {
        "label": run["label"],
        "n_buckets": run["n_buckets"],
        "n_frames": series.n_frames,
        "normalized_dispersion": convergence_metric(families["normalized"]),
        "raw_dispersion": convergence_metric(families["raw"]),
        "excluded_zero_mean_bins": list(families["normalized"].excluded_bins),
        "overflow_total": sum(m.overflow for m in families["normalized"].members),
    }
    outs.stage("convergence.json").write_text(json.dumps(metrics, indent=2) + "\n", encoding="utf-8")
    print(
        f"{run['label']}: dispersion normalized={metrics['normalized_dispersion']:.4f} "
        f"raw={metrics['raw_dispersion']:.4f}"
    )
    return 0


def _cmd_verify(run: dict, outs: OutputSet) -> int:
    result = run_all(run["seed"])
    outs.stage("verify.json").write_text(json.dumps(result, indent=2) + "\n", encoding="utf-8")
    for check in result["checks"]:
        print(f"{'PASS' if check['passed'] else 'FAIL'} {check['name']}")
    print("all checks passed" if result["passed"] else "some checks FAILED")
    return 0 if result["passed"] else 1


def _cmd_synth(run: dict, outs: OutputSet) -> int:
    model = ScalingModel.load_json(run["input"]["model"])
    signal = synthesize(model, run["n_frames"], run["seed"])
    clipped = write_wav(outs.stage("synth.wav"), signal)
    info = {
        "label": run["label"],
        "n_frames": run["n_frames"],
        "n_samples": len(signal.samples),
        "duration_s": signal.duration_s,
        "peak_amplitude": signal.peak_amplitude,
        "clipped_samples": clipped,
    }
    outs.stage("synth.json").write_text(json.dumps(info, indent=2) + "\n", encoding="utf-8")
    print(
        f"{run['label']}: {info['n_samples']} samples "
        f"peak={info['peak_amplitude']:.3f} clipped={clipped}"
    )
    return 0


def _cmd_report(run: dict, outs: OutputSet) -> int:
    rows = []
    for path in run["input"]["reports"]:
        with open(path, encoding="utf-8") as f:
            d = json.load(f)
        rows.append((str(d.get("label", Path(path).stem)), d["rho"], d["c_s"], d["n_frames"]))
    with open(outs.stage("report.csv"), "w", encoding="utf-8") as f:
        f.write("label,rho,c_s,n_frames\n")
        for label, rho, c_s, frames in rows:
            f.write(f"{label},{rho!r},{c_s!r},{frames}\n")
    width = max(5, max(len(r[0]) for r in rows))
    print(f"{'label':<{width}}  {'rho':>8}  {'c_s':>8}  {'frames':>8}")
    for label, rho, c_s, frames in rows:
        print(f"{label:<{width}}  {rho:>8.4f}  {c_s:>8.4f}  {frames:>8}")
    return 0


_COMMANDS = {
    "analyze": _cmd_analyze,
    "histogram": _cmd_histogram,
    "verify": _cmd_verify,
    "synth": _cmd_synth,
    "report": _cmd_report,
}


def run_command(run: dict, out_dir) -> int:
    """Execute one recorded run into out_dir; all outputs land atomically."""
    outs = OutputSet(out_dir)
    try:
        status = _COMMANDS[run["command"]](run, outs)
        finals = outs.commit()
    except BaseException:
        outs.abort()
        raise
    write_manifest(out_dir, run, finals)
    return status


def rerun_manifest(manifest_path, out_dir) -> int:
    """Re-execute a recorded run and confirm outputs are bit-identical."""
    manifest = load_manifest(manifest_path)
    backend.select(manifest["backend"])
    status = run_command(manifest["run"], out_dir)
    stale = compare_outputs(manifest, out_dir)
    if stale:
        print(f"rerun MISMATCH: {', '.join(sorted(stale))}", file=sys.stderr)
        return 1
    print(f"rerun reproduced {len(manifest['outputs'])} outputs bit-exactly")
    return status


def _expand_inputs(patterns: list[str]) -> list[str]:
    paths = []
    for p in patterns:
        if any(ch in p for ch in "*?["):
            hits = sorted(glob.glob(p))
            if not hits:
                raise ValueError(f"no files match {p!r}")
            paths.extend(hits)
        else:
            paths.append(p)
    return paths


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", default="specamp_out", metavar="DIR", help="output directory")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="run seed (default %(default)s)")
    p.add_argument("--label", default=None, help="row label for reports")
    p.add_argument(
        "--backend",
        default=None,
        choices=("auto", "python", "cython"),
        help="compute backend (default: auto)",
    )


def _add_analysis_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("wav", nargs="*", help="16-bit PCM mono WAV path(s); globs allowed")
    p.add_argument("--noise", metavar="JSON", help="generate input from a noise-spec JSON instead")
    p.add_argument("--frame-len", type=int, default=512, help="frame length (default %(default)s)")
    p.add_argument("--hop", type=int, default=256, help="hop size (default %(default)s)")
    p.add_argument(
        "--window", default="hamming", choices=("hamming", "rectangular"), help="analysis window"
    )
    p.add_argument(
        "--bins",
        type=_parse_bins,
        default=None,
        metavar="LO..HI",
        help="inclusive bin range to include (default: all but DC and Nyquist)",
    )
    p.add_argument(
        "--rate", type=int, default=16000, help="sample rate for generated noise (default %(default)s)"
    )
    p.add_argument("--buckets", type=int, default=64, help="histogram buckets (default %(default)s)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="specamp",
        description="Per-bin amplitude statistics, consistent-CV reports, and model synthesis.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (
        ("analyze", "per-bin stats CSV + consistent-CV report JSON"),
        ("histogram", "raw/normalized histogram families + convergence metrics"),
    ):
        p = sub.add_parser(name, help=help_text)
        _add_analysis_flags(p)
        _add_common(p)

    p = sub.add_parser("verify", help="run the property suite, exit 0 only if all pass")
    _add_common(p)

    p = sub.add_parser("synth", help="synthesize a WAV from a scaling-model JSON file")
    p.add_argument("model", help="ScalingModel JSON path")
    p.add_argument("--frames", type=int, default=None, help="number of frames to generate")
    p.add_argument(
        "--duration-s",
        type=float,
        default=2.0,
        help="target duration when --frames is not given (default %(default)s)",
    )
    _add_common(p)

    p = sub.add_parser("report", help="merge analyze outputs into one summary table")
    p.add_argument("reports", nargs="+", help="cv_report.json paths (globs allowed)")
    _add_common(p)

    p = sub.add_parser("rerun", help="re-execute a recorded run and check outputs bit-exactly")
    p.add_argument("manifest", help="manifest.json path from a previous run")
    p.add_argument("--out", default="specamp_rerun", metavar="DIR", help="output directory")
    return parser


def _analysis_runs(args) -> list[tuple[dict, Path]]:
    """Build (run, out_dir) pairs for analyze/histogram; one per input."""
    out_dir = Path(args.out)
    if bool(args.wav) == bool(args.noise):
        raise ValueError("provide exactly one input: WAV path(s) or --noise JSON")
    base = {
        "command": args.command,
        "seed": args.seed,
        "included_bins": list(args.bins) if args.bins is not None else None,
        "n_buckets": args.buckets,
    }
    if args.noise:
        spec = NoiseSpec.from_json(args.noise)
        if spec.seed == 0 and args.seed != 0:
            spec = dataclasses.replace(spec, seed=args.seed)
        run = dict(base)
        run["label"] = args.label or spec.kind
        run["stft"] = _stft_dict(args, args.rate)
        run["input"] = {"noise": json.loads(spec.to_json())}
        return [(run, out_dir)]
    paths = _expand_inputs(args.wav)
    runs = []
    for p in paths:
        run = dict(base)
        run["label"] = (args.label or Path(p).stem) if len(paths) == 1 else Path(p).stem
        run["stft"] = _stft_dict(args, args.rate)
        run["input"] = {"wav": str(Path(p).resolve())}
        runs.append((run, out_dir if len(paths) == 1 else out_dir / Path(p).stem))
    return runs


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "backend", None):
        backend.select(args.backend)
    try:
        if args.command == "rerun":
            return rerun_manifest(args.manifest, args.out)
        if args.command in ("analyze", "histogram"):
            status = 0
            for run, out_dir in _analysis_runs(args):
                status = max(status, run_command(run, out_dir))
            return status
        if args.command == "verify":
            run = {"command": "verify", "seed": args.seed, "label": args.label or "verify"}
            return run_command(run, args.out)
        if args.command == "synth":
            model = ScalingModel.load_json(args.model)
            n_frames = args.frames
            if n_frames is None:
                n = round(args.duration_s * model.config.sample_rate_hz)
                n_frames = max(1, -((n - model.config.frame_len) // -model.config.hop) + 1)
            run = {
                "command": "synth",
                "seed": args.seed,
                "label": args.label or Path(args.model).stem,
                "n_frames": n_frames,
                "input": {"model": str(Path(args.model).resolve())},
            }
            return run_command(run, args.out)
        if args.command == "report":
            run = {
                "command": "report",
                "seed": args.seed,
                "label": args.label or "report",
                "input": {"reports": [str(Path(p).resolve()) for p in _expand_inputs(args.reports)]},
            }
            return run_command(run, args.out)
        raise ValueError(f"unknown command {args.command!r}")
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
