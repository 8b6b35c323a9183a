import random
import subprocess
import sys

import pytest

from tactorbelt import _kernels
from tactorbelt._kernels import _pure

try:
    from tactorbelt._kernels import _native
except ImportError:
    _native = None

ANGLES = (30.0, 90.0, 150.0, 210.0, 270.0, 330.0)


def test_backend_reported():
    assert _kernels.BACKEND in ("native", "pure")


@pytest.mark.skipif(_native is None, reason="native kernel not built")
class TestBackendEquivalence:
    def test_falloff_value_matches(self):
        rng = random.Random(0)
        for _ in range(5000):
            x = rng.uniform(-720.0, 720.0)
            d = rng.uniform(0.0, 360.0)
            assert _pure.falloff_value(x, d, 60.0, 15.0) == _native.falloff_value(
                x, d, 60.0, 15.0
            )

    def test_amplitude_frame_matches(self):
        rng = random.Random(1)
        for _ in range(1000):
            s = rng.uniform(0.0, 360.0)
            assert _pure.amplitude_frame(s, ANGLES, 60.0, 15.0) == _native.amplitude_frame(
                s, ANGLES, 60.0, 15.0
            )

    def test_render_frames_matches(self):
        rng = random.Random(2)
        sources = [rng.uniform(0.0, 360.0) for _ in range(500)]
        assert _pure.render_frames(sources, ANGLES, 60.0, 15.0) == _native.render_frames(
            sources, ANGLES, 60.0, 15.0
        )


def test_force_pure_env_var_selects_fallback():
    code = (
        "import tactorbelt._kernels as k; print(k.BACKEND)"
    )
    out = subprocess.run(
        [sys.executable, "-c", code],
        capture_output=True,
        text=True,
        env={"TACTORBELT_FORCE_PURE": "1", "PATH": "/usr/bin:/bin"},
    )
    assert out.stdout.strip() == "pure"
