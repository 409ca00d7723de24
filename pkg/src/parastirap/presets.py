"""Bundled run configurations for one-command reproduction of the canonical
demonstrations: single-design transfer dynamics (fig1), strategy-comparison
sweeps (fig23), Monte-Carlo noise robustness (fig4) and shaper mask synthesis
(fig5).
"""

from __future__ import annotations

import copy

__all__ = ["PRESETS", "preset"]

_PARALLEL_58 = {
    "kind": "parallel", "omega0": 5.8, "alpha": 0.0, "beta": 1.25,
    "t_span": 4.0, "n_samples": 4096,
}

PRESETS: dict[str, dict] = {
    "fig1": {
        "version": 1,
        "seed": 20407,
        "schedule": dict(_PARALLEL_58),
        "propagate": {"dt": 0.001},
    },
    "fig23": {
        "version": 1,
        "seed": 20407,
        "sweep": {
            "strategies": [
                {"kind": "parallel", "alpha": 0.0, "beta": 1.25,
                 "control_min": 3.0, "control_max": 14.0, "control_count": 45},
                {"kind": "parallel", "alpha": 0.1, "beta": 1.25,
                 "control_min": 3.0, "control_max": 14.0, "control_count": 45},
                {"kind": "linearized",
                 "control_min": 3.0, "control_max": 14.0, "control_count": 45},
                {"kind": "stirap", "tau": 1.0,
                 "control_min": 1.0, "control_max": 14.0, "control_count": 45},
                {"kind": "stirap", "tau": 1.1,
                 "control_min": 1.0, "control_max": 14.0, "control_count": 45},
            ],
            "dt": 0.001,
            "t_span": 4.0,
            "n_samples": 4096,
            "crossover": {
                "target_p3": 0.995,
                "reference": "parallel-a0",
                "competitor": "stirap-tau1.1",
            },
        },
    },
    "fig4": {
        "version": 1,
        "seed": 20407,
        # 2401 samples put the schedule grid exactly on the T/300 noise steps,
        # so the zero-noise Monte Carlo and the plain propagation coincide.
        "schedule": {
            "kind": "parallel", "omega0": 5.4, "alpha": 0.1, "beta": 1.25,
            "t_span": 4.0, "n_samples": 2401,
        },
        "propagate": {"dt": 1.0 / 300.0},
        "noise": {"gamma": 0.5, "n_realizations": 400, "dt": 1.0 / 300.0},
    },
    "fig5": {
        "version": 1,
        "seed": 20407,
        "schedule": dict(_PARALLEL_58),
        "shape": {
            "intensity_fwhm_fs": 500.0,
            "seed_fwhm_fs": 100.0,
            "pixels": 320,
            "dipole_debye": 1.0,
            "omega1": 0.0,
            "omega2": 2.36,
            "omega3": 0.23,
        },
    },
}


def preset(name: str) -> dict:
    """Deep copy of a bundled configuration."""
    if name not in PRESETS:
        raise KeyError(name)
    return copy.deepcopy(PRESETS[name])
