"""Bandwidth-extension analysis toolkit: degradation simulation, spectral
transforms, nonlinear-dynamics feature extractors, objective speech metrics,
and network shape verification."""

from . import cli, featmaps, metrics, netshape, nld, signal, spectral
from .errors import InvalidArgumentError, UnreadableFileError, UnsupportedEncodingError
from .signal import Waveform

__version__ = "0.1.0"

__all__ = [
    "cli",
    "featmaps",
    "metrics",
    "netshape",
    "nld",
    "signal",
    "spectral",
    "Waveform",
    "InvalidArgumentError",
    "UnreadableFileError",
    "UnsupportedEncodingError",
]
