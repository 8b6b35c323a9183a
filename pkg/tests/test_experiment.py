import math
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tactorbelt.dynamics import Mode
from tactorbelt.experiment import (
    AcquisitionParams,
    BetweenMode,
    CursorSample,
    Phase,
    SessionConfig,
    SessionFileError,
    TargetKind,
    compute_metrics,
    detect_acquisition,
    load_session,
    metrics_csv,
    persist_session,
    plan_session,
    run_trial,
    training_trial,
)
from tactorbelt.geometry import build_layout, build_target_set
from tactorbelt.perceiver import PerceiverModel
from tactorbelt.synthetic import run_synthetic_session, synthesize_cursor_trace

_LAYOUT = build_layout()
_TARGETS = build_target_set(_LAYOUT)


def make_config(**kwargs) -> SessionConfig:
    defaults = dict(target_set=_TARGETS, repetitions=5, randomization_seed=0)
    defaults.update(kwargs)
    return SessionConfig(**defaults)


def at_angle(angle_deg: float, r: float = 0.95):
    x = r * math.cos(math.radians(angle_deg))
    y = r * math.sin(math.radians(angle_deg))
    return x, y


class TestPlanSession:
    def test_default_counts(self):
        trials = plan_session(make_config())
        assert len(trials) == 120
        counts = Counter(t.target.angle_deg for t in trials)
        assert all(c == 5 for c in counts.values())
        assert len(counts) == 24

    def test_deterministic_per_seed(self):
        c = make_config(randomization_seed=99)
        a = plan_session(c)
        b = plan_session(c)
        assert a == b

    def test_different_seeds_differ_but_same_multiset(self):
        a = plan_session(make_config(randomization_seed=1))
        b = plan_session(make_config(randomization_seed=2))
        assert [t.target.angle_deg for t in a] != [t.target.angle_deg for t in b]
        assert Counter(t.target.angle_deg for t in a) == Counter(
            t.target.angle_deg for t in b
        )

    def test_on_tactor_always_static(self):
        for trial in plan_session(make_config(between_mode=BetweenMode.DYNAMIC)):
            if trial.target.kind is TargetKind.ON_TACTOR:
                assert trial.mode is Mode.STATIC

    def test_between_mode_applies(self):
        for trial in plan_session(make_config(between_mode=BetweenMode.STATIC)):
            assert trial.mode is Mode.STATIC
        for trial in plan_session(make_config(between_mode=BetweenMode.DYNAMIC)):
            if trial.target.kind is TargetKind.BETWEEN:
                assert trial.mode is Mode.DYNAMIC

    def test_interleaved_mixes_modes_deterministically(self):
        c = make_config(between_mode=BetweenMode.INTERLEAVED, randomization_seed=5)
        trials = plan_session(c)
        modes = {t.mode for t in trials if t.target.kind is TargetKind.BETWEEN}
        assert modes == {Mode.STATIC, Mode.DYNAMIC}
        assert plan_session(c) == trials

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=25, deadline=None)
    def test_multiset_preserved_any_seed(self, seed):
        trials = plan_session(make_config(repetitions=2, randomization_seed=seed))
        counts = Counter(t.target.angle_deg for t in trials)
        assert all(c == 2 for c in counts.values())


class TestDetectAcquisition:
    PARAMS = AcquisitionParams()

    def trace(self, spec):
        # spec: list of (t_ms, angle or None for center)
        samples = []
        for t, angle in spec:
            if angle is None:
                samples.append(CursorSample(t, 0.0, 0.0))
            else:
                x, y = at_angle(angle)
                samples.append(CursorSample(t, x, y))
        return samples

    def test_jump_and_hold_fires_at_first_sample(self):
        spec = [(t, None) for t in range(0, 800, 10)]
        spec += [(t, 45.0) for t in range(800, 1010, 10)]
        hit = detect_acquisition(self.trace(spec), _TARGETS, self.PARAMS)
        assert hit is not None
        target, t0 = hit
        assert target.angle_deg == 45.0
        assert t0 == 800.0

    def test_low_radius_never_selects(self):
        samples = [
            CursorSample(t, 0.5 * math.cos(t / 50.0), 0.5 * math.sin(t / 50.0))
            for t in range(0, 5000, 10)
        ]
        assert detect_acquisition(samples, _TARGETS, self.PARAMS) is None

    def test_short_hold_does_not_select(self):
        spec = [(t, 45.0) for t in range(0, 200, 10)]  # last sample at 190 ms
        spec += [(200, None)]
        assert detect_acquisition(self.trace(spec), _TARGETS, self.PARAMS) is None

    def test_sector_change_restarts_hold(self):
        spec = [(t, 45.0) for t in range(0, 150, 10)]
        spec += [(t, 60.0) for t in range(150, 360, 10)]
        hit = detect_acquisition(self.trace(spec), _TARGETS, self.PARAMS)
        assert hit is not None
        target, t0 = hit
        assert target.angle_deg == 60.0
        assert t0 == 150.0

    def test_causal_ignores_later_samples(self):
        base = [(t, None) for t in range(0, 500, 10)]
        base += [(t, 30.0) for t in range(500, 710, 10)]
        tail = [(t, 210.0) for t in range(710, 2000, 10)]
        first = detect_acquisition(self.trace(base), _TARGETS, self.PARAMS)
        with_tail = detect_acquisition(self.trace(base + tail), _TARGETS, self.PARAMS)
        assert first == with_tail

    def test_non_monotone_trace_rejected(self):
        samples = [CursorSample(100.0, 0.0, 0.0), CursorSample(50.0, 0.0, 0.0)]
        with pytest.raises(ValueError):
            detect_acquisition(samples, _TARGETS, self.PARAMS)


class TestRunTrial:
    def test_acquired_trial_record(self):
        config = make_config()
        plan = plan_session(config)
        trial = plan[0]
        from tactorbelt.amplitude import FalloffParams
        from tactorbelt.dynamics import render_waveform

        params = FalloffParams.for_layout(_LAYOUT)
        waveform = render_waveform(trial.target, trial.mode, _LAYOUT, params)
        trace = synthesize_cursor_trace(trial.target.angle_deg, 700.0, config)
        record = run_trial(trial, waveform, trace, config)
        assert record.correct
        assert record.selected.angle_deg == trial.target.angle_deg
        assert record.acquisition_ms == 700.0
        assert record.phase is Phase.TESTING

    def test_timeout_trial(self):
        config = make_config(trial_timeout_ms=1000.0)
        plan = plan_session(config)
        trial = plan[0]
        from tactorbelt.amplitude import FalloffParams
        from tactorbelt.dynamics import render_waveform

        params = FalloffParams.for_layout(_LAYOUT)
        waveform = render_waveform(trial.target, trial.mode, _LAYOUT, params)
        trace = [CursorSample(t, 0.0, 0.0) for t in range(0, 3000, 10)]
        record = run_trial(trial, waveform, trace, config)
        assert not record.correct
        assert record.selected is None
        assert record.acquisition_ms is None
        assert max(s.t_ms for s in record.cursor_trace) <= 1000.0

    def test_player_started_and_stopped(self):
        config = make_config()
        trial = plan_session(config)[0]
        from tactorbelt.amplitude import FalloffParams
        from tactorbelt.dynamics import render_waveform

        params = FalloffParams.for_layout(_LAYOUT)
        waveform = render_waveform(trial.target, trial.mode, _LAYOUT, params)

        calls = []

        class SpyPlayer:
            def start(self, w):
                calls.append("start")

            def stop(self):
                calls.append("stop")

        trace = synthesize_cursor_trace(trial.target.angle_deg, 500.0, config)
        run_trial(trial, waveform, trace, config, player=SpyPlayer())
        assert calls == ["start", "stop"]

    def test_training_trial_reveals_and_flags(self):
        config = make_config(phase=Phase.TRAINING)
        trial = plan_session(config)[0]
        from tactorbelt.amplitude import FalloffParams
        from tactorbelt.dynamics import render_waveform

        params = FalloffParams.for_layout(_LAYOUT)
        waveform = render_waveform(trial.target, trial.mode, _LAYOUT, params)
        revealed = []
        trace = synthesize_cursor_trace(trial.target.angle_deg, 500.0, config)
        record = training_trial(
            trial, waveform, trace, config, on_reveal=revealed.append
        )
        assert revealed == [trial.target]
        assert record.phase is Phase.TRAINING


class TestMetrics:
    def test_accuracy_four_of_five(self):
        config = make_config(repetitions=1, randomization_seed=3)
        model = PerceiverModel(angular_noise_sigma_deg=0.0)
        records, _ = run_synthetic_session(config, model, _LAYOUT)
        # fabricate: keep five trials at 45 deg, flip one to wrong
        base = [r for r in records if r.target.angle_deg == 45.0][0]
        import dataclasses

        wrong = dataclasses.replace(
            base,
            selected=_TARGETS.by_angle(60.0),
            correct=False,
        )
        five = [base, base, base, base, wrong]
        metrics = compute_metrics(five)
        row = [r for r in metrics.per_direction if r.direction_deg == 45.0][0]
        assert row.accuracy == pytest.approx(0.8)

    def test_mean_rt(self):
        config = make_config(repetitions=1)
        model = PerceiverModel()
        records, _ = run_synthetic_session(config, model, _LAYOUT)
        import dataclasses

        base = [r for r in records if r.target.angle_deg == 45.0][0]
        r1 = dataclasses.replace(base, acquisition_ms=900.0)
        r2 = dataclasses.replace(base, acquisition_ms=1100.0)
        metrics = compute_metrics([r1, r2])
        row = metrics.per_direction[0]
        assert row.mean_rt_ms == pytest.approx(1000.0)

    def test_empty_input_gives_empty_metrics(self):
        metrics = compute_metrics([])
        assert metrics.per_direction == ()
        assert metrics.overall.attempted == 0
        assert metrics.overall.accuracy is None

    def test_training_records_excluded(self):
        config = make_config(repetitions=1, phase=Phase.TRAINING)
        model = PerceiverModel()
        records, metrics = run_synthetic_session(config, model, _LAYOUT)
        assert len(records) == 24
        assert metrics.overall.attempted == 0

    def test_csv_shape(self):
        config = make_config(repetitions=1)
        model = PerceiverModel()
        _, metrics = run_synthetic_session(config, model, _LAYOUT)
        csv = metrics_csv(metrics)
        lines = csv.strip().splitlines()
        assert lines[0] == "direction_deg,kind,mode,accuracy,mean_rt_ms"
        assert len(lines) == 25


class TestEndToEnd:
    def test_noiseless_session_is_perfect(self):
        config = make_config()  # 120 trials
        model = PerceiverModel(angular_noise_sigma_deg=0.0)
        records, metrics = run_synthetic_session(config, model, _LAYOUT)
        assert len(records) == 120
        assert metrics.overall.accuracy == 1.0

    def test_dynamic_rt_exceeds_static_by_one_period(self):
        model = PerceiverModel(angular_noise_sigma_deg=0.0)
        _, dynamic = run_synthetic_session(
            make_config(between_mode=BetweenMode.DYNAMIC), model, _LAYOUT
        )
        _, static = run_synthetic_session(
            make_config(between_mode=BetweenMode.STATIC), model, _LAYOUT
        )
        dyn_rt = dynamic.by_mode["dynamic"].mean_rt_ms
        sta_rt = static.by_mode["static"].mean_rt_ms
        assert dyn_rt - sta_rt == pytest.approx(1000.0)


class TestPersistence:
    def test_round_trip_exact(self, tmp_path):
        config = make_config(repetitions=1, randomization_seed=8)
        model = PerceiverModel(angular_noise_sigma_deg=3.0, rng_seed=8)
        records, metrics = run_synthetic_session(config, model, _LAYOUT)
        path = tmp_path / "session.jsonl"
        persist_session(records, metrics, path, config)
        loaded = load_session(path)
        assert loaded.config == config
        assert loaded.records == tuple(records)
        assert loaded.metrics == metrics

    def test_version_mismatch_rejected(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text('{"type": "header", "schema_version": 99, "config": {}}\n')
        with pytest.raises(SessionFileError, match="schema version"):
            load_session(path)

    def test_malformed_line_reports_number(self, tmp_path):
        config = make_config(repetitions=1)
        model = PerceiverModel()
        records, metrics = run_synthetic_session(config, model, _LAYOUT)
        path = tmp_path / "session.jsonl"
        persist_session(records, metrics, path, config)
        text = path.read_text().splitlines()
        text[3] = "{not json"
        path.write_text("\n".join(text) + "\n")
        with pytest.raises(SessionFileError, match="line 4"):
            load_session(path)

    def test_missing_header_rejected(self, tmp_path):
        path = tmp_path / "empty.jsonl"
        path.write_text("")
        with pytest.raises(SessionFileError, match="header"):
            load_session(path)


class TestSessionConfig:
    def test_sector_halfwidth_must_match_pitch(self):
        with pytest.raises(ValueError):
            make_config(acquisition=AcquisitionParams(sector_halfwidth_deg=10.0))

    def test_zero_repetitions_rejected(self):
        with pytest.raises(ValueError):
            make_config(repetitions=0)
