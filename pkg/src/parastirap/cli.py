"""Command-line front end: JSON config in, deterministic CSV/JSON artifacts out.

Subcommands: ``design``, ``propagate``, ``sweep``, ``noise``, ``shape``.
Every run takes either ``--config <json>`` or ``--preset <name>``; the fully
resolved configuration is embedded in every artifact so outputs are
self-describing, and re-running a command overwrites identical bytes.

Exit codes: 0 success, 2 configuration error, 3 infeasible design,
4 numerical-contract violation (norm drift, windowing).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np
import jsonschema

from . import benchmark as bm
from . import noise as noise_mod
from . import shaper
from .design import (
    DesignParams,
    Schedule,
    StirapParams,
    fluence,
    linearized_schedule,
    make_parallel_schedule,
    pulse_area,
    stirap_schedule,
    uniform_grid,
    write_schedule_csv,
)
from .errors import (
    ConfigError,
    ContractViolationError,
    InfeasibleDesignError,
    ParastirapError,
    UnreachableTargetError,
    WindowingViolationError,
)
from .plot_scripts import write_plot_script
from .presets import PRESETS, preset
from .propagator import DEFAULT_DT, propagate, write_populations_csv

__all__ = ["main", "console_main", "CONFIG_SCHEMA"]

NORM_DRIFT_LIMIT = 1e-6

_SCHEDULE_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "kind": {"enum": ["parallel", "linearized", "stirap"]},
        "omega0": {"type": "number", "exclusiveMinimum": 0},
        "alpha": {"type": "number"},
        "beta": {"type": "number", "exclusiveMinimum": 0},
        "omega_max": {"type": "number", "minimum": 0},
        "tau": {"type": "number", "minimum": 0},
        "t_span": {"type": "number", "exclusiveMinimum": 0},
        "n_samples": {"type": "integer", "minimum": 2},
    },
    "required": ["kind"],
}

_STRATEGY_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "kind": {"enum": ["parallel", "linearized", "stirap"]},
        "alpha": {"type": "number"},
        "beta": {"type": "number", "exclusiveMinimum": 0},
        "tau": {"type": "number", "minimum": 0},
        "control_min": {"type": "number", "exclusiveMinimum": 0},
        "control_max": {"type": "number", "exclusiveMinimum": 0},
        "control_count": {"type": "integer", "minimum": 1},
    },
    "required": ["kind", "control_min", "control_max", "control_count"],
}

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "parastirap run configuration (version 1)",
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "version": {"const": 1},
        "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
        "schedule": _SCHEDULE_SCHEMA,
        "propagate": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"dt": {"type": "number", "exclusiveMinimum": 0}},
        },
        "sweep": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "strategies": {"type": "array", "minItems": 1,
                               "items": _STRATEGY_SCHEMA},
                "dt": {"type": "number", "exclusiveMinimum": 0},
                "t_span": {"type": "number", "exclusiveMinimum": 0},
                "n_samples": {"type": "integer", "minimum": 2},
                "crossover": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {
                        "target_p3": {"type": "number",
                                      "exclusiveMinimum": 0, "maximum": 1},
                        "reference": {"type": "string"},
                        "competitor": {"type": "string"},
                    },
                    "required": ["target_p3", "reference", "competitor"],
                },
            },
            "required": ["strategies"],
        },
        "noise": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "gamma": {"type": "number", "minimum": 0},
                "n_realizations": {"type": "integer", "minimum": 1},
                "dt": {"type": "number", "exclusiveMinimum": 0},
            },
            "required": ["gamma"],
        },
        "shape": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "intensity_fwhm_fs": {"type": "number", "exclusiveMinimum": 0},
                "seed_fwhm_fs": {"type": "number", "exclusiveMinimum": 0},
                "pixels": {"type": "integer", "minimum": 2},
                "dipole_debye": {"type": "number", "exclusiveMinimum": 0},
                "omega1": {"type": "number"},
                "omega2": {"type": "number"},
                "omega3": {"type": "number"},
            },
            "required": ["intensity_fwhm_fs"],
        },
    },
    "required": ["version"],
}


def load_config(config_path: str | None, preset_name: str | None,
                seed_override: int | None) -> dict:
    """Load, validate and resolve a run configuration."""
    if (config_path is None) == (preset_name is None):
        raise ConfigError("exactly one of --config or --preset is required")
    if preset_name is not None:
        if preset_name not in PRESETS:
            raise ConfigError(
                f"unknown preset {preset_name!r}; available: {sorted(PRESETS)}")
        cfg = preset(preset_name)
    else:
        try:
            cfg = json.loads(Path(config_path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
    if seed_override is not None:
        cfg["seed"] = seed_override
    try:
        jsonschema.validate(cfg, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"config rejected by schema: {exc.message}") from None
    return cfg


def _provenance(cfg: dict) -> str:
    return "config: " + json.dumps(cfg, sort_keys=True, separators=(",", ":"))


def _require(cfg: dict, section: str) -> dict:
    if section not in cfg:
        raise ConfigError(f"this subcommand needs a {section!r} config section")
    return cfg[section]


def _build_schedule(section: dict) -> Schedule:
    kind = section["kind"]
    t_span = section.get("t_span", 4.0)
    n_samples = section.get("n_samples", 4096)
    if kind in ("parallel", "linearized"):
        if "omega0" not in section:
            raise ConfigError(f"schedule kind {kind!r} needs 'omega0'")
        params = DesignParams(
            omega0=section["omega0"],
            alpha=section.get("alpha", 0.0),
            beta=section.get("beta", 1.25),
            t_span=t_span,
            n_samples=n_samples,
        )
        return (make_parallel_schedule(params) if kind == "parallel"
                else linearized_schedule(params))
    if "omega_max" not in section:
        raise ConfigError("schedule kind 'stirap' needs 'omega_max'")
    return stirap_schedule(
        StirapParams(omega_max=section["omega_max"], tau=section.get("tau", 1.1)),
        uniform_grid(t_span, n_samples),
    )


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")


def cmd_design(cfg: dict, out: Path) -> int:
    schedule = _build_schedule(_require(cfg, "schedule"))
    prov = _provenance(cfg)
    write_schedule_csv(schedule, out / "schedule.csv", provenance=prov)
    omega0 = (getattr(schedule.params, "omega0", 0.0)
              or getattr(schedule.params, "omega_max", 0.0) or 1.0)
    summary = {
        "config": cfg,
        "kind": schedule.kind,
        "area_over_pi": pulse_area(schedule) / np.pi,
        "fluence_T": fluence(schedule),
        "endpoint_omega_p_over_omega0": float(schedule.omega_p[0] / omega0),
        "endpoint_omega_s_over_omega0": float(schedule.omega_s[-1] / omega0),
        "max_gap_asymmetry_over_omega0": float(schedule.gap_asymmetry().max() / omega0),
        "n_samples": len(schedule),
    }
    _write_json(out / "design_summary.json", summary)
    write_plot_script("schedule", out / "plot_schedule.py", provenance=prov)
    return 0


def cmd_propagate(cfg: dict, out: Path) -> int:
    schedule = _build_schedule(_require(cfg, "schedule"))
    dt = cfg.get("propagate", {}).get("dt", DEFAULT_DT)
    result = propagate(schedule, dt=dt)
    prov = _provenance(cfg)
    write_schedule_csv(schedule, out / "schedule.csv", provenance=prov)
    write_populations_csv(result, out / "populations.csv", provenance=prov)
    p1, p2, p3 = result.final_state.populations()
    _write_json(out / "final_state.json", {
        "config": cfg,
        "final_populations": [p1, p2, p3],
        "p3": p3,
        "norm_drift": result.norm_drift,
    })
    write_plot_script("dynamics", out / "plot_dynamics.py", provenance=prov)
    if result.norm_drift > NORM_DRIFT_LIMIT:
        raise ContractViolationError(
            f"norm drift {result.norm_drift:.3e} exceeds {NORM_DRIFT_LIMIT}")
    return 0


def _sweep_strategies(section: dict) -> list[tuple[bm.StrategySpec, np.ndarray]]:
    out = []
    for entry in section["strategies"]:
        spec = bm.StrategySpec(
            kind=entry["kind"],
            alpha=entry.get("alpha", 0.0),
            beta=entry.get("beta", 1.25),
            tau=entry.get("tau", 1.1),
            t_span=section.get("t_span", 4.0),
            n_samples=section.get("n_samples", 4096),
        )
        grid = np.linspace(entry["control_min"], entry["control_max"],
                           entry["control_count"])
        out.append((spec, grid))
    return out


def cmd_sweep(cfg: dict, out: Path) -> int:
    section = _require(cfg, "sweep")
    dt = section.get("dt", DEFAULT_DT)
    results = [bm.sweep_strategy(spec, grid, dt=dt)
               for spec, grid in _sweep_strategies(section)]
    prov = _provenance(cfg)
    bm.write_sweep_csv(results, out / "sweep.csv", provenance=prov)

    crossover_report = None
    if "crossover" in section:
        req = section["crossover"]
        by_tag = {res.strategy: res for res in results}
        missing = [t for t in (req["reference"], req["competitor"]) if t not in by_tag]
        if missing:
            raise ConfigError(f"crossover names unknown strategies: {missing}")
        try:
            crossover_report = bm.crossover(
                by_tag[req["reference"]], by_tag[req["competitor"]],
                req["target_p3"])
        except UnreachableTargetError as exc:
            crossover_report = {"error": str(exc), "target_p3": req["target_p3"]}
    bm.write_sweep_manifest(results, out / "sweep_manifest.json",
                            config=cfg, crossover_report=crossover_report)
    write_plot_script("sweep", out / "plot_sweep.py", provenance=prov)
    return 0


def cmd_noise(cfg: dict, out: Path) -> int:
    schedule = _build_schedule(_require(cfg, "schedule"))
    section = _require(cfg, "noise")
    ncfg = noise_mod.NoiseConfig(
        gamma=section["gamma"],
        n_realizations=section.get("n_realizations", 400),
        seed=cfg.get("seed", 0),
        dt=section.get("dt", noise_mod.DEFAULT_NOISE_DT),
    )
    result = noise_mod.monte_carlo(schedule, ncfg)
    prov = _provenance(cfg)
    noise_mod.write_mean_populations_csv(result, out / "mean_populations.csv",
                                         provenance=prov)
    _write_json(out / "noise.json", {
        "config": cfg,
        "design": cfg["schedule"],
        "noise": {"gamma": ncfg.gamma, "n_realizations": ncfg.n_realizations,
                  "seed": ncfg.seed, "dt": ncfg.dt},
        "mean_p3": result.mean_p3_final,
        "stderr_p3": result.stderr_p3,
        "max_norm_drift": result.max_norm_drift,
        "populations_csv": "mean_populations.csv",
    })
    write_plot_script("noise", out / "plot_noise.py", provenance=prov)
    return 0


def cmd_shape(cfg: dict, out: Path) -> int:
    sched_section = _require(cfg, "schedule")
    section = _require(cfg, "shape")
    if sched_section["kind"] != "parallel":
        raise ConfigError("spectral shaping needs a parallel schedule")
    params = DesignParams(
        omega0=sched_section["omega0"],
        alpha=sched_section.get("alpha", 0.0),
        beta=sched_section.get("beta", 1.25),
        t_span=sched_section.get("t_span", 4.0),
        n_samples=sched_section.get("n_samples", 4096),
    )
    pcfg = shaper.PhysicalConfig(
        omega1=section.get("omega1", 0.0),
        omega2=section.get("omega2", 2.36),
        omega3=section.get("omega3", 0.23),
        intensity_fwhm_fs=section["intensity_fwhm_fs"],
        dipole_debye=section.get("dipole_debye", 1.0),
    )
    result = shaper.shape_roundtrip(
        params, pcfg,
        pixels=section.get("pixels", 320),
        seed_fwhm_fs=section.get("seed_fwhm_fs", 100.0),
    )
    prov = _provenance(cfg)
    lo, hi = result.band
    for tag, cont, px in (("pump", result.pump_spectrum, result.pump_pixelized),
                          ("stokes", result.stokes_spectrum, result.stokes_pixelized)):
        keep = (cont.omega >= lo) & (cont.omega <= hi)
        trimmed = shaper.SpectralField(
            omega=cont.omega[keep], amplitude=cont.amplitude[keep],
            phase=cont.phase[keep], peak=cont.peak,
            time_origin=cont.time_origin, time_step=cont.time_step,
            label=cont.label, carrier=cont.carrier)
        shaper.write_spectrum_csv(trimmed, out / f"{tag}_spectrum.csv", provenance=prov)
        shaper.write_pixel_csv(px, out / f"{tag}_pixels.csv", provenance=prov)
    _write_json(out / "shape_report.json", {
        "config": cfg,
        "t_fs": result.scale.t_fs,
        "omega0_rad_per_fs": result.scale.omega0_rad_per_fs,
        "omega0_thz": result.scale.omega0_thz,
        "peak_rabi_rad_per_fs": result.peak_rabi_rad_per_fs,
        "peak_intensity_gw_cm2": result.peak_intensity_gw_cm2,
        "p3_reference": result.p3_reference,
        "p3_continuous_roundtrip": result.p3_continuous,
        "p3_pixelized_roundtrip": result.p3_pixelized,
        "pixelization_p3_shift": result.pixelization_shift,
        "mask_clipped": {k: m["clipped"] for k, m in result.masks.items()},
        "pixel_band_rad_per_fs": [lo, hi],
    })
    write_plot_script("masks", out / "plot_masks.py", provenance=prov)
    return 0


_COMMANDS = {
    "design": cmd_design,
    "propagate": cmd_propagate,
    "sweep": cmd_sweep,
    "noise": cmd_noise,
    "shape": cmd_shape,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="parastirap",
        description="Design, propagate, benchmark, noise-test and spectrally "
                    "shape parallel adiabatic-passage pulse pairs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("design", "solve a field schedule and its area/fluence summary"),
        ("propagate", "integrate the dynamics and record populations"),
        ("sweep", "transfer efficiency versus pulse area and fluence"),
        ("noise", "Monte-Carlo average under stochastic field noise"),
        ("shape", "spectral masks, pixelization and round-trip check"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="path to a JSON run configuration")
        p.add_argument("--preset", choices=sorted(PRESETS),
                       help="bundled configuration name")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int, default=None,
                       help="override the configuration seed")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.preset, args.seed)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        return _COMMANDS[args.command](cfg, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except InfeasibleDesignError as exc:
        print(f"infeasible design: {exc}", file=sys.stderr)
        return 3
    except (ContractViolationError, WindowingViolationError) as exc:
        print(f"numerical contract violated: {exc}", file=sys.stderr)
        return 4
    except ParastirapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
