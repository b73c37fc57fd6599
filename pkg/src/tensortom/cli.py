"""Command-line front end: ``tensortom {phantom,forward,invert,roundtrip,selftest}``.

Exit codes: 0 success, 2 input error, 3 configuration mismatch,
4 numerical-check failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

EXIT_OK, EXIT_INPUT, EXIT_MISMATCH, EXIT_NUMERIC = 0, 2, 3, 4


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_INPUT):
        super().__init__(message)
        self.code = code


def _set_threads(requested) -> int:
    import numba

    if requested is None:
        env = os.environ.get("TENSORTOM_THREADS")
        try:
            requested = int(env) if env else None
        except ValueError:
            raise CliError(f"TENSORTOM_THREADS must be an integer, got {env!r}")
    limit = numba.config.NUMBA_NUM_THREADS
    if requested is None:
        requested = limit
    if requested < 1:
        raise CliError(f"thread count must be positive, got {requested}")
    k = min(int(requested), limit)
    numba.set_num_threads(k)
    return k


def _load_config(path) -> dict:
    if path is None:
        return {}
    try:
        data = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise CliError(f"config file {path} not found")
    except json.JSONDecodeError as exc:
        raise CliError(f"malformed JSON in {path}: {exc}")
    if not isinstance(data, dict):
        raise CliError(f"{path}: config must be a JSON object")
    return data


def _settings(args) -> dict:
    """Merge defaults, the JSON config and command-line flags (flags win)."""
    cfg = _load_config(args.config)
    out = {"mu": 1.0, "N": 32, "grid_n": 257, "n_beta": 512, "n_phi": 256, "delta_B": None,
           "class": "incompressible", "seed": 0}
    for key in out:
        if key in cfg:
            out[key] = cfg[key]
    for flag, key in (("mu", "mu"), ("modes_N", "N"), ("grid_n", "grid_n"), ("n_beta", "n_beta"),
                      ("n_phi", "n_phi"), ("cls", "class"), ("seed", "seed")):
        val = getattr(args, flag, None)
        if val is not None:
            out[key] = val
    out["phantom"] = cfg.get("phantom", cfg if "kind" in cfg else None)
    return out


def _phantom_spec(settings: dict):
    from .fields import PhantomError, PhantomSpec, default_phantom

    ph = settings.get("phantom")
    try:
        if ph is None:
            return default_phantom(settings["class"])
        if isinstance(ph, str):
            return PhantomSpec.from_json(Path(ph).read_text())
        return PhantomSpec.from_json(json.dumps(ph))
    except (PhantomError, OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise CliError(f"invalid phantom: {exc}")


def _recon_config(settings: dict):
    from .grid import GridSpec
    from .pipeline import ConfigError, ReconstructionConfig

    try:
        return ReconstructionConfig(mu=float(settings["mu"]), N=int(settings["N"]),
                                    grid=GridSpec(int(settings["grid_n"])), n_beta=int(settings["n_beta"]),
                                    n_phi=int(settings["n_phi"]), delta_B=settings["delta_B"],
                                    cls=settings["class"])
    except (ConfigError, ValueError, TypeError) as exc:
        raise CliError(f"invalid configuration: {exc}")


def _outdir(args) -> Path:
    p = Path(args.output)
    p.mkdir(parents=True, exist_ok=True)
    return p


def cmd_phantom(args) -> int:
    from .fields import INCOMPRESSIBLE, BumpPhantom
    from .grid import GridSpec
    from .io import save_plot_csv, save_tensor
    from .pipeline import divergence_max

    settings = _settings(args)
    spec = _phantom_spec(settings)
    grid = GridSpec(int(settings["grid_n"]))
    F = BumpPhantom(spec).sample(grid)
    out = _outdir(args)
    save_tensor(out / "phantom.ttg", F)
    save_plot_csv(out / "phantom.csv", F)
    (out / "phantom.json").write_text(spec.to_json())
    print(f"support radius: {spec.r_max if spec.bumps else 0.0:.6g}")
    if spec.kind == INCOMPRESSIBLE:
        print(f"max |div F|: {divergence_max(F, grid.mask == 2):.3e}")
    else:
        print(f"max |trace|: {float(np.abs(F.trace).max()):.3e}")
    return EXIT_OK


def cmd_forward(args) -> int:
    from .io import FormatError, load_tensor, save_sinogram
    from .transform import sample_sinogram

    settings = _settings(args)
    if args.input is None:
        raise CliError("forward needs --input <tensor file>")
    try:
        F = load_tensor(args.input)
    except (OSError, FormatError) as exc:
        raise CliError(f"cannot read tensor file: {exc}")
    mu = float(settings["mu"])
    if mu < 0:
        raise CliError("mu must be nonnegative for the forward transform")
    try:
        s = sample_sinogram(F, mu, int(settings["n_beta"]), int(settings["n_phi"]))
    except ValueError as exc:
        raise CliError(str(exc))
    out = _outdir(args)
    save_sinogram(out / "sinogram.csv", s, settings["class"] if args.cls else None)
    incoming_max = float(np.abs(s.values[~s.outgoing]).max(initial=0.0))
    print(f"sinogram min {s.values.min():.6e} max {s.values.max():.6e}")
    print(f"incoming entries zero: {incoming_max == 0.0}")
    return EXIT_OK if incoming_max == 0.0 else EXIT_NUMERIC


def _write_outputs(out: Path, F, report) -> None:
    from .io import save_plot_csv, save_tensor

    save_tensor(out / "reconstruction.ttg", F)
    save_plot_csv(out / "reconstruction.csv", F)
    (out / "report.json").write_text(report.to_json())
    (out / "timings.json").write_text(json.dumps(report.timings, indent=2, sort_keys=True))


def cmd_invert(args) -> int:
    from .io import FormatError, load_sinogram, load_tensor
    from .pipeline import ConfigError, compare_fields, invert

    settings = _settings(args)
    if args.input is None:
        raise CliError("invert needs --input <sinogram csv>")
    try:
        s, meta = load_sinogram(args.input)
    except (OSError, FormatError) as exc:
        raise CliError(f"cannot read sinogram: {exc}")
    # the sidecar fills unset values; explicit settings must agree with it
    if args.mu is None and "mu" not in _load_config(args.config):
        settings["mu"] = meta["mu"]
    if args.cls is None and "class" in meta and "class" not in _load_config(args.config):
        settings["class"] = meta["class"]
    if "class" in meta and meta["class"] != settings["class"]:
        raise CliError(f"class {settings['class']!r} does not match sinogram class {meta['class']!r}",
                       EXIT_MISMATCH)
    if not math.isclose(float(meta["mu"]), float(settings["mu"]), rel_tol=1e-12):
        raise CliError(f"mu={settings['mu']} does not match sinogram mu={meta['mu']}", EXIT_MISMATCH)
    settings["n_beta"], settings["n_phi"] = s.n_beta, s.n_phi
    cfg = _recon_config(settings)
    try:
        F, report = invert(s, cfg)
    except ConfigError as exc:
        raise CliError(str(exc), EXIT_MISMATCH)
    if args.truth:
        try:
            T = load_tensor(args.truth)
        except (OSError, FormatError) as exc:
            raise CliError(f"cannot read reference tensor: {exc}")
        if T.grid != cfg.grid:
            raise CliError("reference tensor grid differs from --grid-n", EXIT_MISMATCH)
        report.errors = compare_fields(T, F, cfg.certified)
    _write_outputs(_outdir(args), F, report)
    return _finish_report(report)


def _finish_report(report, tol: float | None = None) -> int:
    try:
        report.check()
    except ValueError as exc:
        print(f"numerical check failed: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    err = report.errors.get("tensor", {}).get("rel_l2") if report.errors else None
    if err is not None:
        print(f"relative L2 error on certified region: {err:.4e}")
        if tol is not None and err > tol:
            print(f"error exceeds tolerance {tol}", file=sys.stderr)
            return EXIT_NUMERIC
    return EXIT_OK


def cmd_roundtrip(args) -> int:
    from .fields import BumpPhantom
    from .io import save_sinogram, save_tensor
    from .pipeline import compare_fields, invert
    from .transform import sample_sinogram

    settings = _settings(args)
    spec = _phantom_spec(settings)
    if args.cls is None and "class" not in _load_config(args.config):
        settings["class"] = spec.kind
    if spec.kind != settings["class"]:
        raise CliError(f"phantom kind {spec.kind!r} does not match class {settings['class']!r}", EXIT_MISMATCH)
    cfg = _recon_config(settings)
    ph = BumpPhantom(spec)
    t0 = time.perf_counter()
    s = sample_sinogram(ph, cfg.mu, cfg.n_beta, cfg.n_phi)
    t_fwd = time.perf_counter() - t0
    F, report = invert(s, cfg)
    truth = ph.sample(cfg.grid)
    report.errors = compare_fields(truth, F, cfg.certified)
    report.timings["forward"] = t_fwd
    out = _outdir(args)
    save_tensor(out / "phantom.ttg", truth)
    save_sinogram(out / "sinogram.csv", s, cfg.cls)
    _write_outputs(out, F, report)
    return _finish_report(report, args.tol)


def cmd_selftest(args) -> int:
    from .selftest import run_selftest

    settings = _settings(args)
    mu = float(settings["mu"]) if args.mu is not None else 1.0
    results = run_selftest(mu=mu, seed=int(settings["seed"]), corrupt_alpha=args.corrupt_alpha)
    for r in results:
        print(r.line())
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_NUMERIC


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--output", default=".", help="output directory")
    common.add_argument("--threads", type=int, help="worker threads (default: TENSORTOM_THREADS or all cores)")
    common.add_argument("--grid-n", type=int, help="grid nodes per side (odd)")
    common.add_argument("--modes-N", type=int, help="angular mode truncation N")
    common.add_argument("--mu", type=float, help="attenuation coefficient")
    common.add_argument("--class", dest="cls", choices=["incompressible", "tracefree"], help="tensor class")
    common.add_argument("--n-beta", type=int, help="boundary samples")
    common.add_argument("--n-phi", type=int, help="direction samples (power of two)")
    common.add_argument("--seed", type=int, help="seed for randomized checks")

    p = argparse.ArgumentParser(prog="tensortom",
                                description="Exponential X-ray tomography of tensor fields on the unit disk.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("phantom", parents=[common], help="sample a bump phantom on the grid")
    f = sub.add_parser("forward", parents=[common], help="exponential X-ray sinogram of a tensor file")
    f.add_argument("--input", help="tensor grid file")
    i = sub.add_parser("invert", parents=[common], help="reconstruct a tensor from a sinogram")
    i.add_argument("--input", help="sinogram CSV (sidecar <file>.json next to it)")
    i.add_argument("--truth", help="reference tensor file for error metrics")
    r = sub.add_parser("roundtrip", parents=[common], help="phantom -> sinogram -> reconstruction")
    r.add_argument("--tol", type=float, default=0.10, help="relative L2 tolerance")
    s = sub.add_parser("selftest", parents=[common], help="run the oracle checks")
    s.add_argument("--corrupt-alpha", action="store_true", help=argparse.SUPPRESS)
    return p


_COMMANDS = {"phantom": cmd_phantom, "forward": cmd_forward, "invert": cmd_invert,
             "roundtrip": cmd_roundtrip, "selftest": cmd_selftest}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _set_threads(args.threads)
        return _COMMANDS[args.command](args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
