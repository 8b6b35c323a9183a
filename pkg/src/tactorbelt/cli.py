"""Command-line interface.

Subcommands: ``schedule`` (waveform CSV), ``falloff`` (static amplitude
table CSV), ``simulate`` (synthetic session), ``metrics`` (recompute
from a session file), ``serve`` (HTTP service), ``device-test`` (stream
a test pattern and report frame stats).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from tactorbelt.amplitude import FalloffParams, amplitudes_at
from tactorbelt.dynamics import Mode, render_waveform
from tactorbelt.experiment import (
    BetweenMode,
    Phase,
    SessionConfig,
    compute_metrics,
    load_session,
    metrics_csv,
    persist_session,
)
from tactorbelt.geometry import (
    build_layout,
    build_target_set,
    load_layout_config,
)
from tactorbelt.perceiver import Decoder, PerceiverModel
from tactorbelt.synthetic import run_synthetic_session


def _default_geometry(args):
    if getattr(args, "layout_config", None):
        return load_layout_config(args.layout_config)
    layout = build_layout()
    per_gap = getattr(args, "per_gap", None)
    return layout, build_target_set(layout, per_gap=3 if per_gap is None else per_gap)


def _write_text(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def cmd_schedule(args) -> int:
    layout, target_set = _default_geometry(args)
    params = FalloffParams.for_layout(layout)
    target = target_set.by_angle(args.target)
    waveform = render_waveform(
        target,
        Mode(args.mode),
        layout,
        params,
        frame_rate_hz=args.rate,
        duration_ms=args.duration_ms,
    )
    header = "time_ms," + ",".join(
        f"amp_tactor_{i}" for i in range(layout.tactor_count)
    )
    lines = [header]
    for k, frame in enumerate(waveform.frames):
        t = k * waveform.frame_interval_ms
        lines.append(f"{t:g}," + ",".join(f"{v:.6f}" for v in frame))
    _write_text(args.out, "\n".join(lines) + "\n")
    return 0


def cmd_falloff(args) -> int:
    layout, _ = _default_geometry(args)
    params = FalloffParams.for_layout(layout)
    header = "angle_deg," + ",".join(
        f"amp_tactor_{i}" for i in range(layout.tactor_count)
    )
    lines = [header]
    steps = int(round(360.0 / args.step))
    for k in range(steps):
        angle = k * args.step
        frame = amplitudes_at(angle, layout, params)
        lines.append(f"{angle:g}," + ",".join(f"{v:.6f}" for v in frame))
    _write_text(args.out, "\n".join(lines) + "\n")
    return 0


def cmd_simulate(args) -> int:
    layout, target_set = _default_geometry(args)
    config = SessionConfig.for_targets(
        target_set,
        repetitions=args.reps if args.reps else 5 * args.trials_mult,
        between_mode=BetweenMode(args.mode),
        phase=Phase.TESTING,
        randomization_seed=args.seed,
    )
    model = PerceiverModel(
        decoder=Decoder.AUTO,
        angular_noise_sigma_deg=args.sigma,
        reaction_latency_ms=args.latency_ms,
        rng_seed=args.seed,
    )
    records, metrics = run_synthetic_session(config, model, layout)
    overall = metrics.overall
    accuracy = overall.accuracy if overall.accuracy is not None else 0.0
    rt = f"{overall.mean_rt_ms:.1f}" if overall.mean_rt_ms is not None else "n/a"
    print(f"trials {overall.attempted}  accuracy {accuracy:.3f}  mean_rt_ms {rt}")
    for key, agg in sorted(metrics.by_mode.items()):
        if agg.attempted:
            print(
                f"  mode {key}: accuracy {agg.accuracy:.3f} over {agg.attempted} trials"
            )
    if args.out:
        persist_session(records, metrics, args.out, config)
        print(f"session written to {args.out}")
    return 0


def cmd_metrics(args) -> int:
    session = load_session(args.file)
    metrics = compute_metrics(session.records)
    csv = metrics_csv(metrics)
    if args.csv:
        _write_text(args.csv, csv)
    else:
        sys.stdout.write(csv)
    overall = metrics.overall
    if overall.attempted:
        print(f"overall accuracy {overall.accuracy:.3f}", file=sys.stderr)
    return 0


def cmd_serve(args) -> int:
    from tactorbelt.service import ServiceConfig, run_server

    layout, _ = _default_geometry(args)
    service = ServiceConfig(
        device_uri=args.device,
        data_dir=Path(args.data_dir),
        layout=layout,
        per_gap=args.per_gap,
    )
    run_server(service, host=args.host, port=args.port)
    return 0


def cmd_device_test(args) -> int:
    from tactorbelt.protocol import MockDevice, open_device, stream_waveform

    layout, target_set = _default_geometry(args)
    params = FalloffParams.for_layout(layout)
    target = target_set.by_angle(args.target)
    waveform = render_waveform(target, Mode(args.mode), layout, params)
    repeats = max(1, int(round(args.seconds * 1000.0 / waveform.duration_ms)))
    device = open_device(args.device)
    handle = stream_waveform(waveform, device, repeat=repeats, background=False)
    if handle.error is not None:
        print(f"device error: {handle.error}", file=sys.stderr)
        return 1
    print(f"frames sent: {handle.frames_sent}")
    print(f"max tick lateness: {handle.max_lateness_ms:.3f} ms")
    if isinstance(device, MockDevice):
        intervals = device.intervals_ms()
        if intervals:
            mean = sum(intervals) / len(intervals)
            print(f"mock frames logged: {len(device.frames)}")
            print(f"mean frame interval: {mean:.3f} ms")
            print(f"seq gaps: {len(device.gaps)}")
    device.close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tactorbelt",
        description="Vibrotactile belt rendering engine and experiment harness",
    )
    parser.add_argument(
        "--layout-config", help="JSON layout config (default: 6-tactor belt)"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("schedule", help="dump a waveform as CSV")
    p.add_argument("--target", type=float, required=True, help="target angle, deg")
    p.add_argument("--mode", choices=["static", "dynamic"], default="dynamic")
    p.add_argument("--rate", type=float, default=100.0, help="frame rate, Hz")
    p.add_argument("--duration-ms", type=float, default=None)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_schedule)

    p = sub.add_parser("falloff", help="dump the static amplitude table as CSV")
    p.add_argument("--step", type=float, default=1.0, help="angle step, deg")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_falloff)

    p = sub.add_parser("simulate", help="run a synthetic session")
    p.add_argument("--sigma", type=float, default=0.0, help="angular noise, deg")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=[m.value for m in BetweenMode], default="dynamic")
    p.add_argument("--trials-mult", type=int, default=1,
                   help="multiplies the 5 repetitions per target")
    p.add_argument("--reps", type=int, default=0,
                   help="repetitions per target (overrides --trials-mult)")
    p.add_argument("--per-gap", type=int, default=3,
                   help="between-tactor targets per gap")
    p.add_argument("--latency-ms", type=float, default=300.0)
    p.add_argument("--out", help="write the session file here")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("metrics", help="recompute metrics from a session file")
    p.add_argument("--file", required=True)
    p.add_argument("--csv", help="write per-direction CSV here instead of stdout")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("serve", help="start the session service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--device", default="mock:")
    p.add_argument("--data-dir", default="sessions")
    p.add_argument("--per-gap", type=int, default=3,
                   help="between-tactor targets per gap")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("device-test", help="stream a test pattern to the device")
    p.add_argument("--device", default="mock:")
    p.add_argument("--target", type=float, default=45.0)
    p.add_argument("--mode", choices=["static", "dynamic"], default="dynamic")
    p.add_argument("--seconds", type=float, default=2.0)
    p.set_defaults(func=cmd_device_test)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
