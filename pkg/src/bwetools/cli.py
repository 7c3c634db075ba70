"""Command-line front end.

Subcommands: degrade, features, compare, netinfo. JSON results go to
standard output (floats fixed to 6 significant digits for reproducible
byte-identical reruns), diagnostics to standard error. Exit codes: 0 ok,
2 I/O failure, 3 invalid arguments.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import featmaps, metrics, netshape, signal, spectral
from .errors import InvalidArgumentError, UnreadableFileError, UnsupportedEncodingError

EXIT_OK = 0
EXIT_IO = 2
EXIT_USAGE = 3


def _round_floats(obj):
    if isinstance(obj, float):
        if obj == 0 or not math.isfinite(obj):
            return obj
        return float(f"{obj:.6g}")
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    return obj


def _emit(doc: dict) -> None:
    json.dump(_round_floats(doc), sys.stdout, indent=1, sort_keys=True)
    sys.stdout.write("\n")


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise UnreadableFileError(f"cannot read config {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidArgumentError(f"config {path!r} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise InvalidArgumentError("config must be a flat JSON object")
    return cfg


def cmd_degrade(args, cfg: dict) -> int:
    wf = signal.load_wav(args.input)
    low_rate = int(cfg.get("low_rate", args.low_rate))
    out = signal.degrade(wf, low_rate)
    signal.save_wav(args.output, out)
    print(
        f"degraded {args.input} ({wf.rate} Hz) through {low_rate} Hz -> {args.output} "
        f"({len(out)} samples)",
        file=sys.stderr,
    )
    return EXIT_OK


def _write_stack(stack: featmaps.FeatureMapStack, out_dir: Path, name: str) -> dict:
    files = []
    for c in range(stack.channels):
        base = out_dir / f"{name}_ch{c}"
        spectral.write_csv(base.with_suffix(".csv"), stack.data[c])
        spectral.write_f32(base.with_suffix(".f32"), stack.data[c])
        files.append(base.with_suffix(".csv").name)
    return {
        "extractor": name,
        "shape": list(stack.data.shape),
        "meta": stack.meta,
        "files": files,
    }


def cmd_features(args, cfg: dict) -> int:
    wf = signal.load_wav(args.input)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    name = args.extractor
    if name == "mrld":
        windows = cfg.get("windows", featmaps.DEFAULT_LYAPUNOV_WINDOWS)
        doc = _write_stack(featmaps.mrld_features(wf, windows), out_dir, name)
    elif name == "msdfa":
        scales = cfg.get("scales", featmaps.DEFAULT_DFA_SCALES)
        side = int(cfg.get("side", 64))
        doc = _write_stack(featmaps.msdfa_features(wf, scales, side), out_dir, name)
    elif name == "mrad_mrpd":
        mr_cfg = featmaps.MultiResSpecConfig()
        grids = featmaps.mrad_mrpd_features(wf, mr_cfg)
        files = []
        for r, mp in enumerate(grids):
            for tag, grid in (("mag", mp.mag), ("phase", mp.phase)):
                base = out_dir / f"{name}_res{r}_{tag}"
                spectral.write_csv(base.with_suffix(".csv"), grid)
                spectral.write_f32(base.with_suffix(".f32"), grid)
                files.append(base.with_suffix(".csv").name)
        doc = {
            "extractor": name,
            "resolutions": featmaps.resolution_params(mr_cfg),
            "files": files,
        }
    elif name == "rp":
        from .nld import recurrence_plot

        plot = recurrence_plot(wf.samples, int(cfg.get("max_size", 512)))
        base = out_dir / "recurrence"
        spectral.write_csv(base.with_suffix(".csv"), plot.matrix)
        doc = {
            "extractor": name,
            "shape": list(plot.matrix.shape),
            "threshold": plot.threshold,
            "files": [base.with_suffix(".csv").name],
        }
    elif name == "poincare":
        from .nld import poincare_sd

        desc = poincare_sd(wf.samples)
        doc = {
            "extractor": name,
            "sd1": desc.sd1,
            "sd2": desc.sd2,
            "clamped": desc.clamped,
        }
    else:
        raise InvalidArgumentError(f"unknown extractor {args.extractor!r}")
    with open(out_dir / f"{name}_meta.json", "w") as fh:
        json.dump(_round_floats(doc), fh, indent=1, sort_keys=True)
    _emit(doc)
    return EXIT_OK


def cmd_compare(args, cfg: dict) -> int:
    ref = signal.load_wav(args.reference)
    est = signal.load_wav(args.estimate)
    report = metrics.evaluate(ref, est)
    _emit(report.as_dict())
    return EXIT_OK


def cmd_netinfo(args, cfg: dict) -> int:
    if args.which == "mrld":
        doc = netshape.describe_net(netshape.build_mrld_cnn())
    elif args.which == "msdfa":
        doc = netshape.describe_net(netshape.build_msdfa_cnn())
    elif args.which == "generator":
        doc = netshape.describe_generator(netshape.GeneratorGraph())
    else:
        raise InvalidArgumentError(f"unknown network {args.which!r}")
    _emit(doc)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bwetools",
        description="Bandwidth-extension analysis toolkit: degradation "
        "simulation, nonlinear-dynamics feature maps, objective metrics, "
        "and network shape inspection.",
    )
    parser.add_argument("--seed", type=int, default=0, help="seed for any randomized step")
    parser.add_argument("--config", help="flat JSON config file; flags override its values")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("degrade", help="bandlimit a WAV through a lower sample rate")
    p.add_argument("input")
    p.add_argument("low_rate", type=int)
    p.add_argument("output")
    p.set_defaults(func=cmd_degrade)

    p = sub.add_parser("features", help="extract feature maps to CSV/f32 dumps")
    p.add_argument("input")
    p.add_argument("extractor", choices=["mrld", "msdfa", "mrad_mrpd", "rp", "poincare"])
    p.add_argument("out_dir")
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("compare", help="objective metrics for a reference/estimate pair")
    p.add_argument("reference")
    p.add_argument("estimate")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("netinfo", help="network shape and parameter accounting")
    p.add_argument("which", choices=["mrld", "msdfa", "generator"])
    p.set_defaults(func=cmd_netinfo)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        cfg = _load_config(args.config)
        return args.func(args, cfg)
    except (UnreadableFileError, UnsupportedEncodingError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except InvalidArgumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
