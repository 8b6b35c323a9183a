# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled amplitude kernels. Mirrors ``_pure`` exactly."""

from libc.math cimport exp, fmod

BACKEND = "native"


cdef inline double _abs_offset_c(double x_deg, double d_deg) nogil:
    cdef double delta = fmod(x_deg - d_deg, 360.0)
    if delta < 0.0:
        delta = -delta
    if delta > 180.0:
        delta = 360.0 - delta
    return delta


cdef inline double _falloff_c(double x_deg, double d_deg,
                              double span_deg, double decay_deg) nogil:
    cdef double delta = _abs_offset_c(x_deg, d_deg)
    cdef double y
    if delta >= span_deg:
        return 0.0
    y = 1.0 - exp(-(span_deg - delta) / decay_deg)
    return y if y > 0.0 else 0.0


def falloff_value(double x_deg, double d_deg, double span_deg, double decay_deg):
    """Exponential amplitude falloff of a tactor at ``d`` for a source at ``x``."""
    return _falloff_c(x_deg, d_deg, span_deg, decay_deg)


def amplitude_frame(double source_deg, tactor_angles,
                    double span_deg, double decay_deg):
    """Per-tactor amplitudes for one virtual source angle."""
    cdef Py_ssize_t n = len(tactor_angles)
    cdef Py_ssize_t i
    cdef double[64] angles
    if n > 64:
        raise ValueError("too many tactors for the native kernel")
    for i in range(n):
        angles[i] = tactor_angles[i]
    return tuple(
        _falloff_c(source_deg, angles[i], span_deg, decay_deg) for i in range(n)
    )


def render_frames(source_degs, tactor_angles, double span_deg, double decay_deg):
    """Amplitude frames for a whole series of source angles (the hot loop)."""
    cdef Py_ssize_t n = len(tactor_angles)
    cdef Py_ssize_t m = len(source_degs)
    cdef Py_ssize_t i, k
    cdef double[64] angles
    cdef double src
    if n > 64:
        raise ValueError("too many tactors for the native kernel")
    for i in range(n):
        angles[i] = tactor_angles[i]
    frames = []
    for k in range(m):
        src = source_degs[k]
        frames.append(tuple(
            _falloff_c(src, angles[i], span_deg, decay_deg) for i in range(n)
        ))
    return frames
