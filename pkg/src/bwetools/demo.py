"""Deterministic speech-like test signal.

Real recordings are deliberately not shipped; this generator produces a
48 kHz clip with the gross structure the metrics care about: a harmonic
voiced source with slow pitch drift and syllabic amplitude modulation, plus
broadband fricative-like noise bursts so every octave up to Nyquist carries
energy.
"""

from __future__ import annotations

import numpy as np

from .signal import Waveform

__all__ = ["synthetic_speech"]


def synthetic_speech(duration: float = 3.0, rate: int = 48000, seed: int = 0) -> Waveform:
    rng = np.random.default_rng(seed)
    n = int(round(duration * rate))
    t = np.arange(n) / rate

    f0 = 115.0 + 25.0 * np.sin(2.0 * np.pi * 0.6 * t + 1.0)
    phase = 2.0 * np.pi * np.cumsum(f0) / rate
    voiced = np.zeros(n)
    max_harmonic = int(rate / 2 / (f0.max() + 1))
    for h in range(1, max_harmonic + 1):
        voiced += np.sin(h * phase + rng.uniform(0, 2 * np.pi)) / h

    syllables = 0.55 + 0.45 * np.sin(2.0 * np.pi * 3.5 * t + rng.uniform(0, 2 * np.pi))
    voiced *= syllables

    # fricative-ish bursts: broadband noise gated by a slower envelope
    noise = rng.standard_normal(n)
    gate = (np.sin(2.0 * np.pi * 1.3 * t + 2.0) > 0.3).astype(float)
    out = voiced + 0.15 * noise * gate + 0.01 * noise

    return Waveform(out / np.abs(out).max(), rate)
