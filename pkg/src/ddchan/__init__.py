"""Doubly-dispersive channel simulation and FFT-based CSI interpolation.

Layout mirrors the processing chain: :mod:`~ddchan.transforms` (symplectic
FFTs, window kernels, rotations), :mod:`~ddchan.channel` (ground-truth
delay-Doppler channels), :mod:`~ddchan.modem` (frames, transmission,
detection), :mod:`~ddchan.estimator` (LS + interpolation / pipelining /
extrapolation and the exact error decomposition), :mod:`~ddchan.metrics`
(figures of merit) and :mod:`~ddchan.scenarios` (experiment presets behind
the ``ddchan`` CLI).
"""

__version__ = "0.1.0"

from .grid import DDMatrix, TFGrid, TFMatrix  # noqa: E402,F401
