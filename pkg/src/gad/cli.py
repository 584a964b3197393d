"""Command-line front door.

Subcommands:
  run    replay one trace through a full session (generate -> verify ->
         detect on the remainder) and write one JSON event record per line.
  synth  write a synthetic gait trace.
  eval   run the verification + impersonation experiments over a cohort
         directory and write the report files.

Exit codes: 0 success / verification passed, 1 configuration, I/O, or usage
error, 2 verification failed (cmd run only). Every flag can also be supplied
via an environment variable (GAD_MODE, GAD_UNIFORM_L, GAD_F, GAD_SEED,
GAD_INPUT, GAD_OUT, GAD_COHORT_DIR, GAD_EARLY_WINDOW).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .config import GadConfig
from .controller import (
    EVENT_VERIFICATION_FAILED,
    EVENT_VERIFICATION_PASSED,
    Controller,
)
from .dataio import SynthSpec, read_trace, synth_trace, write_trace
from .errors import GadError
from .harness import (
    latency_histogram,
    run_impersonation,
    run_verification,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VERIFICATION_FAILED = 2

TRACE_SUFFIXES = (".csv", ".tsv", ".txt")


def _env(name: str, cast=str, default=None):
    raw = os.environ.get(name)
    if raw is None:
        return default
    return cast(raw)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gad", description="Real-time gait anomaly detection"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument(
            "--mode",
            choices=["personalized", "uniform"],
            default=_env("GAD_MODE", default="personalized"),
        )
        p.add_argument(
            "--uniform-L", type=int, default=_env("GAD_UNIFORM_L", int, 46)
        )
        p.add_argument("--F", type=int, default=_env("GAD_F", int, 2))
        p.add_argument("--seed", type=int, default=_env("GAD_SEED", int, 140))

    p_run = sub.add_parser("run", help="replay one trace through a session")
    add_common(p_run)
    p_run.add_argument("--input", default=_env("GAD_INPUT"), required=_env("GAD_INPUT") is None)
    p_run.add_argument("--out", default=_env("GAD_OUT"), required=_env("GAD_OUT") is None)
    p_run.add_argument("--header", action="store_true")

    p_synth = sub.add_parser("synth", help="write a synthetic gait trace")
    p_synth.add_argument("--period", type=int, required=True)
    p_synth.add_argument("--n", type=int, required=True)
    p_synth.add_argument("--seed", type=int, default=_env("GAD_SEED", int, 140))
    p_synth.add_argument("--amplitude", type=float, default=2.0)
    p_synth.add_argument("--baseline", type=float, default=9.8)
    p_synth.add_argument("--noise", type=float, default=0.0)
    p_synth.add_argument(
        "--waveform",
        choices=["sine", "sawtooth", "two_harmonic"],
        default="sine",
    )
    p_synth.add_argument("--out", default=_env("GAD_OUT"), required=_env("GAD_OUT") is None)

    p_eval = sub.add_parser("eval", help="cohort verification + impersonation")
    add_common(p_eval)
    p_eval.add_argument(
        "--cohort-dir",
        default=_env("GAD_COHORT_DIR"),
        required=_env("GAD_COHORT_DIR") is None,
    )
    p_eval.add_argument("--out", default=_env("GAD_OUT"), required=_env("GAD_OUT") is None)
    p_eval.add_argument(
        "--early-window", type=int, default=_env("GAD_EARLY_WINDOW", int, 154)
    )
    p_eval.add_argument("--max-impostor-samples", type=int, default=None)
    return parser


def _config_from_args(args) -> GadConfig:
    return GadConfig(
        mode=args.mode,
        uniform_L=args.uniform_L,
        verify_steps=args.F,
        seed=args.seed,
    )


def _event_line(event) -> str:
    record = {
        "kind": event.kind,
        "stream_index": event.stream_index,
        "detail": event.detail,
    }
    return json.dumps(record, sort_keys=True)


def cmd_run(args) -> int:
    config = _config_from_args(args)
    trace = read_trace(args.input, header=args.header)
    ctrl = Controller(config)
    ctrl.request_generate()
    lines: list[str] = []
    verified = False
    failed = False
    detect_requested = False
    for sample in trace.samples:
        if verified and not detect_requested:
            ctrl.request_detect()
            detect_requested = True
        if failed:
            break
        for ev in ctrl.on_sample(sample):
            lines.append(_event_line(ev))
            if ev.kind == EVENT_VERIFICATION_PASSED:
                verified = True
            elif ev.kind == EVENT_VERIFICATION_FAILED:
                failed = True
    Path(args.out).write_text("\n".join(lines) + ("\n" if lines else ""))
    if failed or not verified:
        return EXIT_VERIFICATION_FAILED
    return EXIT_OK


def cmd_synth(args) -> int:
    spec = SynthSpec(
        period=args.period,
        n=args.n,
        seed=args.seed,
        amplitude=args.amplitude,
        baseline=args.baseline,
        noise_sigma=args.noise,
        waveform=args.waveform,
    )
    write_trace(synth_trace(spec), args.out)
    return EXIT_OK


def _write_verification_report(summary, path: Path) -> None:
    lines = [
        f"# mode\t{summary.mode}",
        f"# passed\t{summary.passed}",
        f"# failed\t{summary.failed}",
        f"# total\t{summary.total}",
        "subject_id\tpassed\treason\tL\tT_start",
    ]
    for subject_id, r in sorted(summary.per_subject.items()):
        lines.append(
            f"{subject_id}\t{int(r.passed)}\t{r.reason or ''}"
            f"\t{r.step_len if r.step_len is not None else ''}"
            f"\t{r.t_start if r.t_start is not None else ''}"
        )
    path.write_text("\n".join(lines) + "\n")


def _write_pair_report(report, path: Path) -> None:
    lines = [
        f"# detected_ratio\t{report.ratio!r}",
        f"# pairs\t{len(report.results)}",
        f"# controls\t{len(report.controls)}",
        f"# false_positive_rate\t{report.false_positive_rate!r}",
        "genuine_id\timpostor_id\tdetected\tlatency",
    ]
    for r in report.results + report.controls:
        lines.append(
            f"{r.genuine_id}\t{r.impostor_id}\t{int(r.detected)}"
            f"\t{r.latency if r.latency is not None else ''}"
        )
    path.write_text("\n".join(lines) + "\n")


def _write_latency_report(hist, path: Path) -> None:
    lines = [
        f"# early_window\t{hist.early_window}",
        f"# early_fraction\t{hist.early_fraction!r}",
        f"# detected\t{hist.detected}",
        "bin_lo\tbin_hi\tcount",
    ]
    for lo, hi, count in hist.bins:
        lines.append(f"{lo}\t{hi}\t{count}")
    path.write_text("\n".join(lines) + "\n")


def cmd_eval(args) -> int:
    config = _config_from_args(args)
    cohort_dir = Path(args.cohort_dir)
    paths = sorted(
        p for p in cohort_dir.iterdir() if p.suffix.lower() in TRACE_SUFFIXES
    )
    if len(paths) < 2:
        raise GadError(f"cohort dir {cohort_dir} holds fewer than 2 trace files")
    traces = [read_trace(p) for p in paths]
    traces_by_id = {t.subject_id: t for t in traces}
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    summary = run_verification(traces, config)
    _write_verification_report(summary, out_dir / "verification.tsv")
    report = run_impersonation(
        summary, traces_by_id, config, max_samples=args.max_impostor_samples
    )
    _write_pair_report(report, out_dir / "pairs.tsv")
    hist = latency_histogram(report.results, early_window=args.early_window)
    _write_latency_report(hist, out_dir / "latency.tsv")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {"run": cmd_run, "synth": cmd_synth, "eval": cmd_eval}
    try:
        return handlers[args.command](args)
    except (GadError, OSError) as exc:
        print(f"gad: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
