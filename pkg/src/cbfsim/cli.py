"""Command-line front end.

Three subcommands: ``search`` finds complementary beam sets and writes them
as JSON plus a pattern CSV, ``pattern`` renders patterns for given weights or
a saved beam set, and ``ber`` runs Monte Carlo bit-error campaigns.  Outputs
are byte-stable for a fixed configuration and seed; every file-producing run
also writes a manifest with content digests.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .arrays import (
    AngleGrid,
    ArrayGeometry,
    WeightVector,
    beam_pattern,
    composite_pattern,
)
from .beams import (
    ComplementaryBeamSet,
    PhaseCodebook,
    SearchCapacityError,
    SearchMeta,
    find_complementary_pair,
    find_complementary_triple,
)
from .simulate import DEFAULT_ANGLES_DEG, SchemeConfig, SimConfig, run_ber

SEED_ENV_VAR = "CBF_SIM_SEED"

_DEFAULTS = {
    "search": {
        "subarrays": 2, "accuracy": 4, "method": "exhaustive", "spacing": 0.5,
        "grid_points": 512, "budget": 100_000, "ceiling": 1_000_000,
        "seed": None, "out": None,
    },
    "pattern": {
        "accuracy": 4, "spacing": 0.5, "grid_points": 512,
        "weights": None, "beamset": None, "out": "cbfsim_pattern",
    },
    "ber": {
        "channel": "awgn", "angles": None, "min_bits": 100_000,
        "target_errors": 200, "max_bits": None, "seed": None, "workers": 1,
        "elements": 8, "spacing": 0.5, "beamset": None, "rbf_block": 2,
        "fading": "equal", "out": "cbfsim_ber",
    },
}


def _fmt(value: float) -> str:
    """Numeric fields carry 9 significant digits."""
    return f"{value:.9g}"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cbfsim",
        description="Complementary-beam broadcasting: beam search, patterns, "
                    "and BER simulation.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("search", help="find a complementary beam set",
                        argument_default=argparse.SUPPRESS)
    sp.add_argument("--config", type=Path, help="JSON file with default flag values")
    sp.add_argument("--elements", type=int, help="total array elements")
    sp.add_argument("--subarrays", type=int, choices=(2, 3))
    sp.add_argument("--accuracy", type=int, help="phase quantization levels K")
    sp.add_argument("--method", choices=("exhaustive", "golay", "stochastic"))
    sp.add_argument("--spacing", type=float, help="element pitch in wavelengths")
    sp.add_argument("--grid-points", type=int, dest="grid_points")
    sp.add_argument("--budget", type=int, help="stochastic evaluation budget")
    sp.add_argument("--ceiling", type=int, help="exhaustive candidate ceiling")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--out", help="output base path (writes <out>.beams.json, "
                                  "<out>.pattern.csv, <out>.manifest.json)")

    pp = sub.add_parser("pattern", help="render beam patterns to CSV",
                        argument_default=argparse.SUPPRESS)
    pp.add_argument("--config", type=Path)
    pp.add_argument("--weights", action="append",
                    help="comma-separated phase indices, once per sub-array")
    pp.add_argument("--accuracy", type=int)
    pp.add_argument("--spacing", type=float)
    pp.add_argument("--grid-points", type=int, dest="grid_points")
    pp.add_argument("--beamset", help="beam-set JSON written by search")
    pp.add_argument("--out")

    bp = sub.add_parser("ber", help="run a Monte Carlo BER campaign",
                        argument_default=argparse.SUPPRESS)
    bp.add_argument("--config", type=Path)
    bp.add_argument("--scheme", choices=("cbf", "rbf", "single"))
    bp.add_argument("--channel", choices=("awgn", "rayleigh"))
    bp.add_argument("--snr-db", dest="snr_db",
                    help="start:step:stop or comma-separated Eb/N0 values in dB")
    bp.add_argument("--angles", help="comma-separated angles in degrees")
    bp.add_argument("--min-bits", type=int, dest="min_bits")
    bp.add_argument("--target-errors", type=int, dest="target_errors")
    bp.add_argument("--max-bits", type=int, dest="max_bits")
    bp.add_argument("--elements", type=int, help="array size for cbf/rbf")
    bp.add_argument("--spacing", type=float)
    bp.add_argument("--beamset", help="beam-set JSON for the cbf scheme")
    bp.add_argument("--rbf-block", type=int, dest="rbf_block",
                    help="symbols per random pattern")
    bp.add_argument("--fading", choices=("equal", "independent"),
                    help="tie or untie the two sub-array fading coefficients")
    bp.add_argument("--seed", type=int)
    bp.add_argument("--workers", type=int)
    bp.add_argument("--out")
    return parser


def _load_config_file(ns: argparse.Namespace, parser: argparse.ArgumentParser) -> dict:
    path = getattr(ns, "config", None)
    if path is None:
        return {}
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        parser.error(f"cannot read config file {path}: {exc}")
    if not isinstance(doc, dict):
        parser.error(f"config file {path} must hold a JSON object")
    return doc


def _resolve(ns, file_config, command, key):
    """Flag value if given, else config file, else built-in default."""
    if hasattr(ns, key):
        return getattr(ns, key)
    if key in file_config:
        return file_config[key]
    return _DEFAULTS[command][key]


def _resolve_seed(ns, file_config, command) -> int | None:
    seed = _resolve(ns, file_config, command, "seed")
    if seed is None and SEED_ENV_VAR in os.environ:
        seed = int(os.environ[SEED_ENV_VAR])
    return seed


def _parse_snr_grid(text: str) -> tuple[float, ...]:
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"SNR range must be start:step:stop, got {text!r}")
        start, step, stop = (float(p) for p in parts)
        if step <= 0 or stop < start:
            raise ValueError("SNR range needs step > 0 and stop >= start")
        count = int(round((stop - start) / step)) + 1
        return tuple(start + i * step for i in range(count))
    return tuple(float(p) for p in text.split(","))


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_manifest(base: Path, command: str, config: dict, outputs: list[Path]):
    doc = {
        "tool": {"name": "cbfsim", "version": __version__},
        "command": command,
        "config": config,
        "created_utc": datetime.now(timezone.utc).isoformat(),
        "outputs": [
            {"path": p.name, "sha256": _sha256(p), "bytes": p.stat().st_size}
            for p in outputs
        ],
    }
    path = base.with_name(base.name + ".manifest.json")
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")
    return path


def _write_beamset_json(base: Path, beams: ComplementaryBeamSet) -> Path:
    path = base.with_name(base.name + ".beams.json")
    path.write_text(json.dumps(beams.to_json_dict(), indent=2, sort_keys=True)
                    + "\n", encoding="utf-8")
    return path


def _write_pattern_csv(base: Path, beams: ComplementaryBeamSet) -> Path:
    patterns = beams.member_patterns()
    comp = composite_pattern(patterns)
    header = ("theta_deg,"
              + ",".join(f"g{i + 1}_power" for i in range(len(patterns)))
              + ",composite_power")
    lines = [header]
    degrees = np.degrees(beams.grid.points)
    for row in range(len(beams.grid)):
        cells = [_fmt(degrees[row])]
        cells += [_fmt(p.power[row]) for p in patterns]
        cells.append(_fmt(comp.power[row]))
        lines.append(",".join(cells))
    path = base.with_name(base.name + ".pattern.csv")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def _write_ber_csv(base: Path, curve) -> Path:
    lines = ["scheme,channel,angle_deg,ebn0_db,bits,errors,ber,ci95"]
    for p in curve.points:
        lines.append(",".join([
            curve.scheme,
            curve.channel,
            _fmt(math.degrees(p.angle)),
            _fmt(p.eb_n0_db),
            str(p.bits),
            str(p.errors),
            _fmt(p.ber),
            _fmt(p.ci95),
        ]))
    path = base.with_name(base.name + ".ber.csv")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def _load_beamset(path: str) -> ComplementaryBeamSet:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    return ComplementaryBeamSet.from_json_dict(doc)


def cmd_search(ns, parser) -> int:
    cfg = _load_config_file(ns, parser)
    get = lambda key: _resolve(ns, cfg, "search", key)
    if not hasattr(ns, "elements") and "elements" not in cfg:
        parser.error("search requires --elements")
    elements = int(getattr(ns, "elements", cfg.get("elements")))
    subarrays = int(get("subarrays"))
    method = get("method")
    geometry = ArrayGeometry(elements, subarrays, float(get("spacing")))
    grid = AngleGrid.uniform_theta(int(get("grid_points")))
    codebook = PhaseCodebook(int(get("accuracy")))
    seed = _resolve_seed(ns, cfg, "search")
    find = find_complementary_pair if subarrays == 2 else find_complementary_triple
    beams = find(geometry, codebook, grid, method, seed=seed,
                 budget=int(get("budget")), candidate_ceiling=int(get("ceiling")))
    print(f"sigma_g2={_fmt(beams.variance)}")
    out = get("out")
    if out is not None:
        base = Path(out)
        base.parent.mkdir(parents=True, exist_ok=True)
        written = [_write_beamset_json(base, beams),
                   _write_pattern_csv(base, beams)]
        resolved = {
            "command": "search", "elements": elements, "subarrays": subarrays,
            "accuracy": codebook.accuracy, "method": method,
            "spacing": geometry.spacing, "grid_points": len(grid),
            "seed": beams.meta.seed, "budget": int(get("budget")),
            "ceiling": int(get("ceiling")), "out": str(out),
        }
        _write_manifest(base, "search", resolved, written)
    return 0


def cmd_pattern(ns, parser) -> int:
    cfg = _load_config_file(ns, parser)
    get = lambda key: _resolve(ns, cfg, "pattern", key)
    beamset_path = get("beamset")
    if beamset_path is not None:
        beams = _load_beamset(beamset_path)
        grid_points = len(beams.grid)
    else:
        weight_specs = get("weights")
        if not weight_specs:
            parser.error("pattern requires --weights (repeatable) or --beamset")
        codebook = PhaseCodebook(int(get("accuracy")))
        indices = []
        for spec in weight_specs:
            idx = tuple(int(tok) for tok in spec.split(","))
            if any(i < 0 or i >= codebook.accuracy for i in idx):
                parser.error(f"phase index out of range for K={codebook.accuracy}: {spec}")
            indices.append(idx)
        sizes = {len(ix) for ix in indices}
        if len(sizes) != 1:
            parser.error("all weight vectors must have the same length")
        ns_size = sizes.pop()
        geometry = ArrayGeometry(ns_size * len(indices), len(indices),
                                 float(get("spacing")))
        grid_points = int(get("grid_points"))
        grid = AngleGrid.uniform_theta(grid_points)
        weights = tuple(WeightVector(codebook.coefficients[list(ix)])
                        for ix in indices)
        comp = composite_pattern(
            beam_pattern(w, geometry, m, grid) for m, w in enumerate(weights)
        )
        beams = ComplementaryBeamSet(
            geometry=geometry, weights=weights, variance=comp.variance,
            grid=grid, meta=SearchMeta("explicit", 0, None),
            accuracy=codebook.accuracy, phase_indices=tuple(indices),
        )
    base = Path(get("out"))
    base.parent.mkdir(parents=True, exist_ok=True)
    written = [_write_pattern_csv(base, beams)]
    resolved = {"command": "pattern", "grid_points": grid_points,
                "beamset": beamset_path, "out": str(base)}
    _write_manifest(base, "pattern", resolved, written)
    return 0


def cmd_ber(ns, parser) -> int:
    cfg = _load_config_file(ns, parser)
    get = lambda key: _resolve(ns, cfg, "ber", key)
    if not hasattr(ns, "scheme") and "scheme" not in cfg:
        parser.error("ber requires --scheme")
    if not hasattr(ns, "snr_db") and "snr_db" not in cfg:
        parser.error("ber requires --snr-db")
    scheme_kind = getattr(ns, "scheme", cfg.get("scheme"))
    snr_grid = _parse_snr_grid(str(getattr(ns, "snr_db", cfg.get("snr_db"))))
    angles_text = get("angles")
    if angles_text is None:
        angles_deg = DEFAULT_ANGLES_DEG
    else:
        angles_deg = tuple(float(tok) for tok in str(angles_text).split(","))
    seed = _resolve_seed(ns, cfg, "ber")
    if seed is None:
        seed = 0
    elements = int(get("elements"))
    spacing = float(get("spacing"))

    if scheme_kind == "cbf":
        geometry = ArrayGeometry(elements, 2, spacing)
        beamset_path = get("beamset")
        if beamset_path is not None:
            beams = _load_beamset(beamset_path)
        else:
            beams = find_complementary_pair(
                geometry, PhaseCodebook(2), AngleGrid.uniform_theta(512), "golay"
            )
        scheme = SchemeConfig(kind="cbf", geometry=geometry, beams=beams)
    elif scheme_kind == "rbf":
        geometry = ArrayGeometry(elements, 2 if elements % 2 == 0 else 1, spacing)
        scheme = SchemeConfig(kind="rbf", geometry=geometry,
                              rbf_block_symbols=int(get("rbf_block")))
    else:
        scheme = SchemeConfig(kind="single", geometry=ArrayGeometry(1, 1, spacing))

    config = SimConfig(
        scheme=scheme,
        channel=get("channel"),
        angles=tuple(math.radians(a) for a in angles_deg),
        snr_db=snr_grid,
        min_bits=int(get("min_bits")),
        target_errors=int(get("target_errors")),
        max_bits=None if get("max_bits") is None else int(get("max_bits")),
        seed=int(seed),
        workers=int(get("workers")),
        equal_subarrays=get("fading") == "equal",
    )
    curve = run_ber(config)
    base = Path(get("out"))
    base.parent.mkdir(parents=True, exist_ok=True)
    written = [_write_ber_csv(base, curve)]
    resolved = {
        "command": "ber", "scheme": scheme_kind, "channel": config.channel,
        "snr_db": list(config.snr_db), "angles_deg": list(angles_deg),
        "min_bits": config.min_bits, "target_errors": config.target_errors,
        "max_bits": config.max_bits, "seed": config.seed,
        "workers": config.workers, "elements": elements, "spacing": spacing,
        "rbf_block": scheme.rbf_block_symbols if scheme_kind == "rbf" else None,
        "fading": get("fading"), "beamset": get("beamset"), "out": str(base),
    }
    _write_manifest(base, "ber", resolved, written)
    return 0


_DISPATCH = {"search": cmd_search, "pattern": cmd_pattern, "ber": cmd_ber}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
        return _DISPATCH[ns.command](ns, parser)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    except SearchCapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError, np.linalg.LinAlgError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
