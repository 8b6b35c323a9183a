import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tactorbelt.amplitude import AmplitudeVector
from tactorbelt.clock import VirtualClock
from tactorbelt.dynamics import Mode, render_waveform
from tactorbelt.protocol import (
    FRAME_SIZE,
    BadChecksumError,
    FrameParser,
    MockDevice,
    TruncatedFrameError,
    decode_frame,
    encode_frame,
    quantize,
    stream_waveform,
)


def random_vector(rng: random.Random) -> AmplitudeVector:
    """Random vector satisfying the support invariants (<=2 adjacent active)."""
    kind = rng.random()
    values = [0.0] * 6
    if kind < 0.1:
        pass  # all zero
    elif kind < 0.4:
        values[rng.randrange(6)] = rng.random()
    else:
        i = rng.randrange(6)
        values[i] = rng.random()
        values[(i + 1) % 6] = rng.random()
    return AmplitudeVector(tuple(values))


class TestFrameCodec:
    def test_zero_frame_bytes(self):
        frame = encode_frame(AmplitudeVector((0.0,) * 6), seq=0)
        assert frame == bytes([0xAA, 0, 0, 0, 0, 0, 0, 0, 0])

    def test_midpoint_duty_bytes(self):
        y = 1.0 - math.exp(-2.0)  # 0.8646647...
        v = AmplitudeVector((y, y, 0.0, 0.0, 0.0, 0.0))
        frame = encode_frame(v, seq=1)
        # round-half-up(255 * 0.8646647) = round(220.489...) = 220
        assert frame[2] == 220
        assert frame[3] == 220

    def test_peak_duty_byte(self):
        y = 1.0 - math.exp(-4.0)  # 0.9816844...
        frame = encode_frame(AmplitudeVector((y, 0.0, 0.0, 0.0, 0.0, 0.0)), seq=0)
        assert frame[2] == 250  # round(250.33)

    def test_frame_is_nine_bytes_with_checksum(self):
        rng = random.Random(7)
        for _ in range(100):
            v = random_vector(rng)
            seq = rng.randrange(256)
            frame = encode_frame(v, seq)
            assert len(frame) == FRAME_SIZE
            assert frame[0] == 0xAA
            xor = 0
            for b in frame[1:-1]:
                xor ^= b
            assert frame[-1] == xor

    def test_round_trip_ten_thousand_random_vectors(self):
        rng = random.Random(12345)
        for _ in range(10_000):
            v = random_vector(rng)
            seq = rng.randrange(256)
            decoded, got_seq = decode_frame(encode_frame(v, seq))
            assert got_seq == seq
            assert decoded == quantize(v)

    @given(
        st.lists(st.floats(0, 1, allow_nan=False), min_size=6, max_size=6),
        st.integers(0, 255),
    )
    def test_round_trip_property(self, values, seq):
        v = AmplitudeVector(tuple(values))
        decoded, got_seq = decode_frame(encode_frame(v, seq))
        assert got_seq == seq
        assert decoded == quantize(v)

    def test_quantization_monotone_and_bounded(self):
        prev_duty = -1
        for k in range(0, 1001):
            y = k / 1000.0
            frame = encode_frame(AmplitudeVector((y, 0, 0, 0, 0, 0)), 0)
            duty = frame[2]
            assert duty >= prev_duty
            assert abs(duty / 255.0 - y) <= 1.0 / 510.0 + 1e-12
            prev_duty = duty

    def test_flipped_bit_rejected(self):
        frame = bytearray(encode_frame(AmplitudeVector((0.5,) * 6), seq=9))
        frame[3] ^= 0x08
        with pytest.raises(BadChecksumError):
            decode_frame(bytes(frame))

    def test_truncated_frame(self):
        frame = encode_frame(AmplitudeVector((0.5,) * 6), seq=9)
        with pytest.raises(TruncatedFrameError):
            decode_frame(frame[:5])


class TestFrameParser:
    def test_stream_of_frames(self):
        rng = random.Random(3)
        vectors = [random_vector(rng) for _ in range(50)]
        blob = b"".join(encode_frame(v, i) for i, v in enumerate(vectors))
        parser = FrameParser()
        # feed in ragged chunks to exercise buffering
        out = []
        pos = 0
        while pos < len(blob):
            n = rng.randrange(1, 17)
            out += parser.feed(blob[pos : pos + n])
            pos += n
        assert [seq for _, seq in out] == list(range(50))
        assert [v for v, _ in out] == [quantize(v) for v in vectors]

    def test_resync_after_garbage_prefix(self):
        frame = encode_frame(AmplitudeVector((0.25,) * 6), seq=5)
        parser = FrameParser()
        out = parser.feed(frame[3:] + frame)  # first frame beheaded
        assert len(out) == 1
        assert out[0][1] == 5
        assert parser.skipped_bytes > 0

    def test_corrupt_frame_skipped_then_recovers(self):
        good1 = encode_frame(AmplitudeVector((0.1,) * 6), seq=1)
        bad = bytearray(encode_frame(AmplitudeVector((0.2,) * 6), seq=2))
        bad[4] ^= 0xFF
        good2 = encode_frame(AmplitudeVector((0.3,) * 6), seq=3)
        parser = FrameParser()
        out = parser.feed(good1 + bytes(bad) + good2)
        assert [seq for _, seq in out] == [1, 3]
        assert parser.bad_checksums >= 1

    def test_pure_noise_never_crashes(self):
        rng = random.Random(11)
        parser = FrameParser()
        for _ in range(100):
            parser.feed(bytes(rng.randrange(256) for _ in range(rng.randrange(64))))


class TestPlayback:
    def test_ten_second_playback_virtual_clock(self, target_set, layout, params):
        w = render_waveform(target_set.by_angle(45.0), Mode.DYNAMIC, layout, params)
        clock = VirtualClock()
        device = MockDevice(clock=clock)
        handle = stream_waveform(w, device, clock=clock, repeat=10, background=False)
        assert handle.frames_sent == 1000
        assert len(device.frames) == 1000
        assert device.gaps == []
        intervals = device.intervals_ms()
        assert all(i == pytest.approx(10.0) for i in intervals)
        # timestamps monotone
        times = [f.t_ms for f in device.frames]
        assert times == sorted(times)

    def test_seq_wraps_without_gap_report(self, target_set, layout, params):
        w = render_waveform(target_set.by_angle(45.0), Mode.DYNAMIC, layout, params,
                            duration_ms=3000.0)
        clock = VirtualClock()
        device = MockDevice(clock=clock)
        stream_waveform(w, device, clock=clock, repeat=1, background=False)
        assert len(device.frames) == 300
        assert device.gaps == []
        assert device.frames[256].seq == 0  # wrapped

    def test_stop_ends_playback(self, target_set, layout, params):
        w = render_waveform(target_set.by_angle(45.0), Mode.STATIC, layout, params)
        device = MockDevice()
        handle = stream_waveform(w, device, repeat=0)  # loop until stopped
        import time

        time.sleep(0.15)
        handle.stop()
        handle.join(2.0)
        assert not handle.running
        assert 0 < handle.frames_sent

    def test_device_failure_reports_partial_count(self, target_set, layout, params):
        w = render_waveform(target_set.by_angle(45.0), Mode.STATIC, layout, params)

        class FlakySink:
            def __init__(self):
                self.writes = 0

            def write(self, data):
                self.writes += 1
                if self.writes > 7:
                    raise OSError("unplugged")

            def close(self):
                pass

        clock = VirtualClock()
        handle = stream_waveform(w, FlakySink(), clock=clock, repeat=1, background=False)
        assert handle.frames_sent == 7
        assert handle.error is not None

    def test_mock_log_jsonl(self, tmp_path, target_set, layout, params):
        import json

        w = render_waveform(target_set.by_angle(60.0), Mode.STATIC, layout, params,
                            duration_ms=100.0)
        clock = VirtualClock()
        path = tmp_path / "device.jsonl"
        device = MockDevice(clock=clock, log_path=path)
        stream_waveform(w, device, clock=clock, repeat=1, background=False)
        device.close()
        lines = path.read_text().splitlines()
        assert len(lines) == 10
        first = json.loads(lines[0])
        assert set(first) == {"t_ms", "seq", "duty"}
        assert len(first["duty"]) == 6
