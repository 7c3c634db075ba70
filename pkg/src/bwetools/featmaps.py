"""Discriminator front-end feature tensors: multi-window Lyapunov maps,
tiled DFA fluctuation maps, and multi-resolution magnitude/phase stacks."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError
from .nld import EmbeddingParams, dfa_fluctuation, local_lyapunov
from .signal import Waveform, frame
from .spectral import MagPhase, StftConfig, stft, to_mag_phase

__all__ = [
    "FeatureMapStack",
    "MultiResSpecConfig",
    "DEFAULT_LYAPUNOV_WINDOWS",
    "DEFAULT_DFA_SCALES",
    "mrld_features",
    "msdfa_features",
    "mrad_mrpd_features",
    "resolution_params",
]

DEFAULT_LYAPUNOV_WINDOWS = (64, 128, 256, 512, 1024)
DEFAULT_DFA_SCALES = (100, 200, 300, 500, 600)


@dataclass(frozen=True)
class FeatureMapStack:
    """C x H x W real tensor plus per-channel provenance metadata."""

    data: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float64)
        object.__setattr__(self, "data", data)
        if data.ndim != 3:
            raise InvalidArgumentError("stack must be C x H x W")
        if data.size and not np.all(np.isfinite(data)):
            raise InvalidArgumentError("stack entries must be finite")

    @property
    def channels(self) -> int:
        return self.data.shape[0]

    @property
    def height(self) -> int:
        return self.data.shape[1]

    @property
    def width(self) -> int:
        return self.data.shape[2]


@dataclass(frozen=True)
class MultiResSpecConfig:
    freq_bins: tuple = (512, 128, 512)
    hops: tuple = (1024, 256, 1024)
    win_lengths: tuple = (2048, 512, 2048)
    eps_mag: float = 1e-5

    def __post_init__(self):
        if not (len(self.freq_bins) == len(self.hops) == len(self.win_lengths)):
            raise InvalidArgumentError("resolution lists must have equal length")
        if any(v <= 0 for v in (*self.freq_bins, *self.hops, *self.win_lengths)):
            raise InvalidArgumentError("resolution parameters must be positive")


def mrld_features(
    wf: Waveform,
    windows=DEFAULT_LYAPUNOV_WINDOWS,
    p: EmbeddingParams | None = None,
) -> FeatureMapStack:
    """Local Lyapunov exponent map, one channel per window size.

    Channel w holds the per-segment exponents for non-overlapping windows of
    w samples, z-scored per channel and right-padded with zeros to the width
    of the finest channel (padding is applied after normalization so it does
    not perturb channel statistics). Channels whose window does not fit the
    signal, or whose exponents have zero variance, are left all-zero and
    flagged degenerate.
    """
    p = p or EmbeddingParams()
    windows = sorted(int(w) for w in windows)
    if not windows:
        raise InvalidArgumentError("need at least one window size")
    n = len(wf)
    width = n // min(windows)
    data = np.zeros((len(windows), 1, width))
    channel_meta = []
    for c, w in enumerate(windows):
        segments = frame(wf, w, w)
        raw = []
        degenerate = segments.shape[0] == 0
        for seg in segments:
            try:
                est = local_lyapunov(seg, p)
            except InvalidArgumentError:
                degenerate = True
                break
            raw.append(est.value)
        values = np.asarray(raw)
        if not degenerate:
            std = values.std()
            if std > 0:
                data[c, 0, : values.size] = (values - values.mean()) / std
            else:
                degenerate = True
        channel_meta.append(
            {"window": w, "count": int(values.size), "degenerate": bool(degenerate)}
        )
    meta = {
        "extractor": "mrld",
        "windows": windows,
        "normalization": "per-channel z-score",
        "channels": channel_meta,
    }
    return FeatureMapStack(data, meta)


def mrld_raw_exponents(wf: Waveform, window: int, p: EmbeddingParams | None = None) -> np.ndarray:
    """Unnormalized per-segment exponents for one window size."""
    p = p or EmbeddingParams()
    return np.asarray([local_lyapunov(seg, p).value for seg in frame(wf, window, window)])


def msdfa_features(
    wf: Waveform, scales=DEFAULT_DFA_SCALES, side: int = 64
) -> FeatureMapStack:
    """DFA fluctuations tiled into constant side x side maps, one per scale."""
    scales = sorted(int(n) for n in scales)
    if side < 1:
        raise InvalidArgumentError("tile side must be >= 1")
    data = np.zeros((len(scales), side, side))
    channel_meta = []
    for c, n in enumerate(scales):
        degenerate = len(wf) < 2 * n
        if not degenerate:
            data[c] = dfa_fluctuation(wf.samples, n)
        channel_meta.append({"scale": n, "degenerate": bool(degenerate)})
    meta = {"extractor": "msdfa", "scales": scales, "side": side, "channels": channel_meta}
    return FeatureMapStack(data, meta)


def resolution_params(cfg: MultiResSpecConfig) -> list[dict]:
    """Effective STFT settings per resolution.

    n_fft is twice the requested bin count; window lengths larger than n_fft
    cannot be analyzed at that FFT size and are clamped (recorded here). Hops
    that would leave no overlap after the clamp are reduced to half the
    window so the COLA invariant of StftConfig still holds.
    """
    params = []
    for bins, hop, win in zip(cfg.freq_bins, cfg.hops, cfg.win_lengths):
        n_fft = 2 * bins
        clamped = win > n_fft
        eff_win = min(win, n_fft)
        eff_hop = min(hop, eff_win // 2)
        params.append(
            {
                "freq_bins": bins,
                "n_fft": n_fft,
                "hop": eff_hop,
                "win_length": eff_win,
                "win_clamped": clamped,
                "hop_clamped": hop != eff_hop,
            }
        )
    return params


def mrad_mrpd_features(wf: Waveform, cfg: MultiResSpecConfig | None = None) -> list[MagPhase]:
    """Log-magnitude and phase grids at each configured resolution.

    The magnitude grids feed the amplitude discriminator, the phase grids the
    phase discriminator. Grids are truncated to the requested bin count.
    """
    cfg = cfg or MultiResSpecConfig()
    out = []
    for res in resolution_params(cfg):
        stft_cfg = StftConfig(
            n_fft=res["n_fft"],
            win_length=res["win_length"],
            hop=res["hop"],
            eps_mag=cfg.eps_mag,
        )
        mp = to_mag_phase(stft(wf, stft_cfg))
        out.append(
            MagPhase(
                mp.mag[: res["freq_bins"]],
                mp.phase[: res["freq_bins"]],
                stft_cfg,
                mp.n_samples,
            )
        )
    return out
