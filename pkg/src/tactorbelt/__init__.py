"""tactorbelt: vibrotactile belt rendering engine and experiment harness.

Six tactors on a torso belt display 24 directional targets.  On-tactor
directions vibrate one motor; between-tactor directions split amplitude
across the two bracketing motors, either statically or with a
trapezoidal dwell-time perturbation that sweeps a virtual source
between them.  The package covers the rendering math, a byte-exact
device protocol with a mock belt, an analytic perceiver used as a test
oracle, a trial/metrics engine, and an HTTP+WebSocket session service.
"""

from tactorbelt._kernels import BACKEND as KERNEL_BACKEND
from tactorbelt.amplitude import (
    AmplitudeVector,
    FalloffParams,
    decode_static,
    encode_static,
    falloff,
)
from tactorbelt.dynamics import (
    DwellSchedule,
    Mode,
    StimulusWaveform,
    dwell_times,
    render_waveform,
    virtual_source_angle,
)
from tactorbelt.geometry import (
    TactorLayout,
    TargetDirection,
    TargetKind,
    TargetSet,
    build_layout,
    build_target_set,
    signed_offset,
)
from tactorbelt.perceiver import Decoder, PerceiverModel, perceive, snap_to_target

__version__ = "0.1.0"

__all__ = [
    "KERNEL_BACKEND",
    "AmplitudeVector",
    "FalloffParams",
    "decode_static",
    "encode_static",
    "falloff",
    "DwellSchedule",
    "Mode",
    "StimulusWaveform",
    "dwell_times",
    "render_waveform",
    "virtual_source_angle",
    "TactorLayout",
    "TargetDirection",
    "TargetKind",
    "TargetSet",
    "build_layout",
    "build_target_set",
    "signed_offset",
    "Decoder",
    "PerceiverModel",
    "perceive",
    "snap_to_target",
    "__version__",
]
