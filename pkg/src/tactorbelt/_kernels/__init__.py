"""Amplitude kernel backend selection.

Imports the compiled extension when it is available, otherwise the
pure-Python fallback.  Set ``TACTORBELT_FORCE_PURE=1`` to skip the
extension (used by the benchmark to compare both paths).
"""

from __future__ import annotations

import os

if os.environ.get("TACTORBELT_FORCE_PURE"):
    from tactorbelt._kernels._pure import (  # noqa: F401
        BACKEND,
        amplitude_frame,
        falloff_value,
        render_frames,
    )
else:
    try:
        from tactorbelt._kernels._native import (  # type: ignore[no-redef] # noqa: F401
            BACKEND,
            amplitude_frame,
            falloff_value,
            render_frames,
        )
    except ImportError:
        from tactorbelt._kernels._pure import (  # type: ignore[no-redef] # noqa: F401
            BACKEND,
            amplitude_frame,
            falloff_value,
            render_frames,
        )

__all__ = ["BACKEND", "falloff_value", "amplitude_frame", "render_frames"]
