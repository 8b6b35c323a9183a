"""Perceiver-driven synthetic sessions: the headless stand-in for a wearer.

Each trial renders the stimulus, asks the perceiver for an angle and a
response time, then drives a cursor trace that rests at the center
until the response time and holds on the perceived angle long enough
to trigger acquisition.
"""

from __future__ import annotations

import math

from tactorbelt.amplitude import FalloffParams
from tactorbelt.dynamics import render_waveform
from tactorbelt.experiment import (
    CursorSample,
    Phase,
    PlannedTrial,
    SessionConfig,
    SessionMetrics,
    StimulusPlayer,
    TrialRecord,
    compute_metrics,
    plan_session,
    run_trial,
)
from tactorbelt.geometry import TactorLayout
from tactorbelt.perceiver import PerceiverModel, perceive

__all__ = ["synthesize_cursor_trace", "run_synthetic_trial", "run_synthetic_session"]

CURSOR_RADIUS = 0.95  # comfortably past the acquisition radius


def synthesize_cursor_trace(
    angle_deg: float,
    response_ms: float,
    config: SessionConfig,
) -> list[CursorSample]:
    """Center until ``response_ms``, then hold at the angle until acquisition.

    Sampled at the session record rate; the hold extends two extra
    samples past the hold window so the detector always sees its
    closing sample.
    """
    dt = 1000.0 / config.record_rate_hz
    end_ms = response_ms + config.acquisition.hold_ms + 2.0 * dt
    x = CURSOR_RADIUS * math.cos(math.radians(angle_deg))
    y = CURSOR_RADIUS * math.sin(math.radians(angle_deg))
    samples = []
    k = 0
    while True:
        t = k * dt
        if t > end_ms:
            break
        if t < response_ms:
            samples.append(CursorSample(t_ms=t, x=0.0, y=0.0))
        else:
            samples.append(CursorSample(t_ms=t, x=x, y=y))
        k += 1
    return samples


def run_synthetic_trial(
    trial: PlannedTrial,
    config: SessionConfig,
    model: PerceiverModel,
    layout: TactorLayout,
    params: FalloffParams,
    rng,
    player: StimulusPlayer | None = None,
    phase: Phase = Phase.TESTING,
) -> TrialRecord:
    waveform = render_waveform(
        trial.target,
        trial.mode,
        layout,
        params,
        frame_rate_hz=config.record_rate_hz,
    )
    angle, response_ms = perceive(waveform, model, layout, params, rng=rng)
    trace = synthesize_cursor_trace(angle, response_ms, config)
    return run_trial(
        trial,
        waveform,
        trace,
        config,
        player=player,
        onset_ts=trial.trial_id * (config.trial_timeout_ms + config.inter_trial_gap_ms),
        phase=phase,
    )


def run_synthetic_session(
    config: SessionConfig,
    model: PerceiverModel,
    layout: TactorLayout,
    params: FalloffParams | None = None,
    player: StimulusPlayer | None = None,
) -> tuple[list[TrialRecord], SessionMetrics]:
    """Plan and run a whole session against the perceiver.

    One RNG drives the whole run, so a (seed, sigma) pair reproduces
    exactly.
    """
    params = params or FalloffParams.for_layout(layout)
    rng = model.make_rng()
    records = [
        run_synthetic_trial(
            trial, config, model, layout, params, rng, player=player, phase=config.phase
        )
        for trial in plan_session(config)
    ]
    return records, compute_metrics(records)
