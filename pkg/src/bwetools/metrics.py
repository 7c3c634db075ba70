"""Objective evaluation metrics for (reference, estimate) waveform pairs:
log-spectral distance, scale-invariant SDR/SNR, and short-time objective
intelligibility."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError
from .signal import ResampleConfig, Waveform, resample
from .spectral import StftConfig, stft

__all__ = ["MetricReport", "lsd", "si_sdr", "si_snr", "stoi", "evaluate"]

SI_CAP_DB = 200.0  # reported value for a (numerically) exact match

LSD_CONFIG = {"n_fft": 2048, "hop": 512, "window": "hann", "eps": 1e-10, "log_base": 10}

STOI_CONFIG = {
    "rate": 10_000,
    "n_fft": 512,
    "hop": 256,
    "n_bands": 15,
    "first_center_hz": 150.0,
    "segment_frames": 30,
    "dyn_range_db": 40.0,
    "sdr_bound_db": -15.0,
}


@dataclass(frozen=True)
class MetricReport:
    lsd: float
    si_sdr: float
    si_snr: float
    stoi: float
    config: dict

    def as_dict(self) -> dict:
        return {
            "lsd": self.lsd,
            "si_sdr": self.si_sdr,
            "si_snr": self.si_snr,
            "stoi": self.stoi,
            "config": self.config,
        }


def _aligned(ref: Waveform, est: Waveform) -> tuple[np.ndarray, np.ndarray]:
    if ref.rate != est.rate:
        raise InvalidArgumentError(f"rate mismatch: {ref.rate} vs {est.rate}")
    n = min(len(ref), len(est))
    return ref.samples[:n], est.samples[:n]


def lsd(ref: Waveform, est: Waveform) -> float:
    """Log-spectral distance in dB: per-frame RMS over bins of the 10*log10
    power ratio, averaged over frames (2048-point STFT, hop 512, hann)."""
    r, e = _aligned(ref, est)
    cfg = StftConfig(n_fft=LSD_CONFIG["n_fft"], win_length=LSD_CONFIG["n_fft"], hop=LSD_CONFIG["hop"])
    eps = LSD_CONFIG["eps"]
    p_ref = np.abs(stft(Waveform(r, ref.rate), cfg).data) ** 2 + eps
    p_est = np.abs(stft(Waveform(e, ref.rate), cfg).data) ** 2 + eps
    diff = 10.0 * np.log10(p_ref / p_est)
    return float(np.mean(np.sqrt(np.mean(diff**2, axis=0))))


def _si_ratio(ref: np.ndarray, est: np.ndarray) -> float:
    denom = float(ref @ ref)
    if denom == 0.0:
        raise InvalidArgumentError("reference signal is all zero")
    target = (float(est @ ref) / denom) * ref
    err = est - target
    err_energy = float(err @ err)
    target_energy = float(target @ target)
    if err_energy == 0.0:
        return SI_CAP_DB
    if target_energy == 0.0:
        return -SI_CAP_DB
    value = 10.0 * np.log10(target_energy / err_energy)
    return float(np.clip(value, -SI_CAP_DB, SI_CAP_DB))


def si_sdr(ref: Waveform, est: Waveform) -> float:
    """Scale-invariant SDR: projection of the estimate onto the raw
    (un-centered) reference."""
    r, e = _aligned(ref, est)
    return _si_ratio(r, e)


def si_snr(ref: Waveform, est: Waveform) -> float:
    """Scale-invariant SNR: same projection after mean-centering both."""
    r, e = _aligned(ref, est)
    return _si_ratio(r - r.mean(), e - e.mean())


def _third_octave_bands(rate: int, n_fft: int, n_bands: int, first_center: float):
    """Boolean (n_bands, n_bins) membership matrix for one-third-octave bands."""
    freqs = np.fft.rfftfreq(n_fft, d=1.0 / rate)
    centers = first_center * 2.0 ** (np.arange(n_bands) / 3.0)
    lo = centers / 2.0 ** (1.0 / 6.0)
    hi = centers * 2.0 ** (1.0 / 6.0)
    return (freqs[None, :] >= lo[:, None]) & (freqs[None, :] < hi[:, None])


def stoi(ref: Waveform, est: Waveform) -> float:
    """Short-time objective intelligibility in [0, 1].

    Both signals are resampled to 10 kHz; frames more than 40 dB below the
    loudest reference frame are dropped from both; one-third-octave band
    envelopes over 30-frame segments are compared by normalized correlation
    after scaling and clipping the estimate at the -15 dB SDR bound.
    """
    c = STOI_CONFIG
    if ref.rate != est.rate:
        raise InvalidArgumentError(f"rate mismatch: {ref.rate} vs {est.rate}")
    if ref.rate < c["rate"]:
        raise InvalidArgumentError(f"stoi needs rate >= {c['rate']} Hz")
    if min(ref.duration, est.duration) < 0.4:
        raise InvalidArgumentError("stoi needs at least 0.4 s of audio")
    rs_cfg = ResampleConfig()
    x = resample(ref, c["rate"], rs_cfg).samples
    y = resample(est, c["rate"], rs_cfg).samples
    n = min(x.size, y.size)
    x, y = x[:n], y[:n]

    cfg = StftConfig(n_fft=c["n_fft"], win_length=c["n_fft"], hop=c["hop"], center=False)
    spec_x = stft(Waveform(x, c["rate"]), cfg).data
    spec_y = stft(Waveform(y, c["rate"]), cfg).data

    # energy-based silent-frame removal, synchronized on the reference
    frame_energy = np.sum(np.abs(spec_x) ** 2, axis=0)
    peak = frame_energy.max()
    if peak <= 0:
        raise InvalidArgumentError("reference contains no energy")
    keep = frame_energy > peak * 10.0 ** (-c["dyn_range_db"] / 10.0)
    spec_x = spec_x[:, keep]
    spec_y = spec_y[:, keep]
    seg = c["segment_frames"]
    if spec_x.shape[1] < seg:
        raise InvalidArgumentError("too few active frames for a 30-frame segment")

    bands = _third_octave_bands(c["rate"], c["n_fft"], c["n_bands"], c["first_center_hz"])
    env_x = np.sqrt(bands.astype(float) @ (np.abs(spec_x) ** 2))
    env_y = np.sqrt(bands.astype(float) @ (np.abs(spec_y) ** 2))

    clip_gain = 10.0 ** (-c["sdr_bound_db"] / 20.0)
    scores = []
    for m in range(seg, env_x.shape[1] + 1):
        xs = env_x[:, m - seg : m]
        ys = env_y[:, m - seg : m]
        norm_x = np.linalg.norm(xs, axis=1, keepdims=True)
        norm_y = np.linalg.norm(ys, axis=1, keepdims=True)
        alpha = norm_x / np.maximum(norm_y, 1e-12)
        ys = np.minimum(ys * alpha, xs * (1.0 + clip_gain))
        xs = xs - xs.mean(axis=1, keepdims=True)
        ys = ys - ys.mean(axis=1, keepdims=True)
        denom = np.linalg.norm(xs, axis=1) * np.linalg.norm(ys, axis=1)
        ok = denom > 1e-12
        corr = np.sum(xs * ys, axis=1)[ok] / denom[ok]
        scores.extend(corr.tolist())
    return float(np.clip(np.mean(scores), 0.0, 1.0))


def evaluate(ref: Waveform, est: Waveform) -> MetricReport:
    """All four metrics plus the configuration they were computed with."""
    return MetricReport(
        lsd=lsd(ref, est),
        si_sdr=si_sdr(ref, est),
        si_snr=si_snr(ref, est),
        stoi=stoi(ref, est),
        config={"lsd": LSD_CONFIG, "stoi": STOI_CONFIG, "si_cap_db": SI_CAP_DB},
    )
