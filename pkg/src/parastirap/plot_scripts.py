"""Standalone matplotlib scripts emitted next to the CSV artifacts.

The tool itself never renders images; each subcommand writes one of these
scripts so the data stays primary and plotting needs no package install.
"""

from __future__ import annotations

from pathlib import Path

__all__ = ["write_plot_script"]

_COMMON = '''#!/usr/bin/env python3
"""Auto-generated plotting script; run it next to the CSV artifacts."""
import csv
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt


def read_csv(name):
    rows = []
    with open(Path(__file__).with_name(name)) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            rows.append(line.split(","))
    header, data = rows[0], rows[1:]
    cols = {h: [] for h in header}
    for row in data:
        for h, v in zip(header, row):
            try:
                cols[h].append(float(v))
            except ValueError:
                cols[h].append(v)
    return cols
'''

_DYNAMICS = _COMMON + '''

sched = read_csv("schedule.csv")
pops = read_csv("populations.csv")

fig, axes = plt.subplots(3, 1, figsize=(7, 9), sharex=True)
axes[0].plot(pops["t"], pops["p1"], label="P1")
axes[0].plot(pops["t"], pops["p2"], label="P2")
axes[0].plot(pops["t"], pops["p3"], label="P3")
axes[0].set_ylabel("population")
axes[0].legend()

axes[1].plot(sched["t"], sched["omega_p"], label="pump")
axes[1].plot(sched["t"], sched["omega_s"], label="Stokes")
axes[1].plot(sched["t"], sched["delta1"], "--", label="one-photon detuning")
axes[1].plot(sched["t"], sched["delta2"], ":", label="two-photon detuning")
axes[1].set_ylabel("fields [1/T]")
axes[1].legend()

axes[2].plot(sched["t"], sched["w_minus"], label="lower")
axes[2].plot(sched["t"], sched["w_0"], label="middle")
axes[2].plot(sched["t"], sched["w_plus"], label="upper")
axes[2].set_ylabel("eigenvalues [1/T]")
axes[2].set_xlabel("t [T]")
axes[2].legend()

fig.tight_layout()
fig.savefig("dynamics.png", dpi=150)
print("wrote dynamics.png")
'''

_SCHEDULE = _COMMON + '''

sched = read_csv("schedule.csv")

fig, axes = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
axes[0].plot(sched["t"], sched["omega_p"], label="pump")
axes[0].plot(sched["t"], sched["omega_s"], label="Stokes")
axes[0].plot(sched["t"], sched["delta1"], "--", label="one-photon detuning")
axes[0].plot(sched["t"], sched["delta2"], ":", label="two-photon detuning")
axes[0].set_ylabel("fields [1/T]")
axes[0].legend()

axes[1].plot(sched["t"], sched["w_minus"], label="lower")
axes[1].plot(sched["t"], sched["w_0"], label="middle")
axes[1].plot(sched["t"], sched["w_plus"], label="upper")
axes[1].set_ylabel("eigenvalues [1/T]")
axes[1].set_xlabel("t [T]")
axes[1].legend()

fig.tight_layout()
fig.savefig("schedule.png", dpi=150)
print("wrote schedule.png")
'''

_SWEEP = _COMMON + '''

data = read_csv("sweep.csv")
strategies = sorted(set(data["strategy"]))

for xcol, xlabel, log_x, stem in (
    ("area_over_pi", "total pulse area / pi", False, "sweep_vs_area"),
    ("fluence_T", "fluence [1/T]", True, "sweep_vs_fluence"),
):
    fig, axes = plt.subplots(2, 1, figsize=(7, 7), sharex=True)
    for tag in strategies:
        xs, p3s, devs = [], [], []
        for s, x, p3, dev in zip(data["strategy"], data[xcol],
                                 data["p3"], data["deviation"]):
            if s == tag:
                xs.append(x)
                p3s.append(p3)
                devs.append(max(dev, 1e-16))
        axes[0].plot(xs, p3s, label=tag)
        axes[1].semilogy(xs, devs, label=tag)
    if log_x:
        axes[0].set_xscale("log")
    axes[0].set_ylabel("final P3")
    axes[0].legend(fontsize=8)
    axes[1].set_ylabel("1 - P3")
    axes[1].set_xlabel(xlabel)
    fig.tight_layout()
    fig.savefig(f"{stem}.png", dpi=150)
    print(f"wrote {stem}.png")
'''

_NOISE = _COMMON + '''

pops = read_csv("mean_populations.csv")

fig, ax = plt.subplots(figsize=(7, 4))
ax.plot(pops["t"], pops["p1"], label="P1")
ax.plot(pops["t"], pops["p2"], label="P2")
ax.plot(pops["t"], pops["p3"], label="P3")
ax.set_xlabel("t [T]")
ax.set_ylabel("ensemble-mean population")
ax.legend()
fig.tight_layout()
fig.savefig("noise_dynamics.png", dpi=150)
print("wrote noise_dynamics.png")
'''

_MASKS = _COMMON + '''

pump = read_csv("pump_spectrum.csv")
stokes = read_csv("stokes_spectrum.csv")

fig, axes = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
axes[0].plot(pump["omega_rel"], pump["amplitude"], label="pump")
axes[0].plot(stokes["omega_rel"], stokes["amplitude"], "--", label="Stokes")
axes[0].set_ylabel("normalized amplitude")
axes[0].legend()
axes[1].plot(pump["omega_rel"], pump["phase"], label="pump")
axes[1].plot(stokes["omega_rel"], stokes["phase"], "--", label="Stokes")
axes[1].set_ylabel("spectral phase [rad]")
axes[1].set_xlabel("frequency relative to carrier [rad/fs]")
axes[1].legend()
fig.tight_layout()
fig.savefig("masks.png", dpi=150)
print("wrote masks.png")
'''

_SCRIPTS = {
    "dynamics": _DYNAMICS,
    "schedule": _SCHEDULE,
    "sweep": _SWEEP,
    "noise": _NOISE,
    "masks": _MASKS,
}


def write_plot_script(kind: str, path, provenance: str | None = None) -> None:
    text = _SCRIPTS[kind]
    if provenance:
        text = text.replace(
            '"""Auto-generated plotting script; run it next to the CSV artifacts."""',
            f'"""Auto-generated plotting script; run it next to the CSV artifacts."""\n# {provenance}',
        )
    Path(path).write_text(text, encoding="utf-8")
