"""Transfer-efficiency benchmarks: strategy sweeps versus pulse area and
fluence, crossover factors between strategies, and delay-sensitivity scans.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

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
)
from .errors import InfeasibleDesignError, InvalidParameterError, UnreachableTargetError
from .lambda_system import QuantumState, eigenvalues_of_fields
from .propagator import DEFAULT_DT, _batch_rk4, _substage_grid

__all__ = [
    "StrategySpec",
    "SweepPoint",
    "SweepResult",
    "DelayScanResult",
    "sweep_strategy",
    "crossover",
    "delay_scan",
    "write_sweep_csv",
    "write_sweep_manifest",
    "SWEEP_CSV_HEADER",
]

SWEEP_CSV_HEADER = "strategy,control,area_over_pi,fluence_T,p3,deviation"

# Default control grids: omega0*T for the designed strategies, peak Rabi
# frequency times T for conventional STIRAP.
PARALLEL_CONTROL_GRID = np.linspace(3.0, 14.0, 45)
STIRAP_CONTROL_GRID = np.linspace(1.0, 14.0, 45)


@dataclass(frozen=True)
class StrategySpec:
    """Fully parameterized sweep strategy.

    ``kind`` is one of ``parallel``, ``linearized``, ``stirap``; the control
    value swept is omega0*T for the first two and omega_max*T for STIRAP.
    """

    kind: str
    alpha: float = 0.0
    beta: float = 1.25
    tau: float = 1.1
    t_span: float = 4.0
    n_samples: int = 4096

    def __post_init__(self):
        if self.kind not in ("parallel", "linearized", "stirap"):
            raise InvalidParameterError(f"unknown strategy kind {self.kind!r}")

    @property
    def tag(self) -> str:
        if self.kind == "parallel":
            return "parallel-a0" if self.alpha == 0.0 else "parallel-ab"
        if self.kind == "linearized":
            return "linearized"
        return f"stirap-tau{self.tau:g}"

    def build(self, control: float) -> Schedule:
        if self.kind == "parallel":
            return make_parallel_schedule(DesignParams(
                omega0=control, alpha=self.alpha, beta=self.beta,
                t_span=self.t_span, n_samples=self.n_samples))
        if self.kind == "linearized":
            return linearized_schedule(DesignParams(
                omega0=control, alpha=0.0, t_span=self.t_span,
                n_samples=self.n_samples))
        return stirap_schedule(
            StirapParams(omega_max=control, tau=self.tau),
            uniform_grid(self.t_span, self.n_samples))


@dataclass(frozen=True, eq=False)
class SweepPoint:
    """One swept design: control value, cost metrics, final transfer."""

    control: float
    area: float
    fluence: float
    p3_final: float
    deviation: float
    schedule: Schedule = field(repr=False, compare=False)


@dataclass(frozen=True, eq=False)
class SweepResult:
    """Ordered sweep points for one strategy plus its parameter record."""

    strategy: str
    points: tuple[SweepPoint, ...]
    parameters: dict

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(pt, name) for pt in self.points])


@dataclass(frozen=True, eq=False)
class DelayScanResult:
    """Transfer probability versus pulse delay at fixed total area."""

    strategy: str
    delays: np.ndarray
    p3: np.ndarray
    fixed_area: float

    @property
    def sensitivity(self) -> float:
        return float(np.max(self.p3) - np.min(self.p3)) if self.p3.size else 0.0


def _batch_final_p3(schedules: Sequence[Schedule], dt: float) -> np.ndarray:
    """Final |3> population for schedules sharing one time grid."""
    t = schedules[0].t
    for s in schedules[1:]:
        if s.t.shape != t.shape or not np.array_equal(s.t, t):
            raise InvalidParameterError("batched schedules must share a time grid")
    starts, mids, ends, h, marks = _substage_grid(t, dt)

    f_start = np.stack([np.stack(s.fields_at(starts)) for s in schedules])  # (B,4,n)
    f_mid = np.stack([np.stack(s.fields_at(mids)) for s in schedules])
    last = np.stack([np.stack(s.fields_at(ends[-1:])) for s in schedules])
    f_end = np.concatenate([f_start[:, :, 1:], last], axis=2)

    stages = (f_start, f_mid, f_end)

    def fields_of(k, stage):
        fs = stages[stage]
        return fs[:, 0, k], fs[:, 1, k], fs[:, 2, k], fs[:, 3, k]

    c0 = np.tile(QuantumState.ground().as_array(), (len(schedules), 1))
    final_mark = np.array([h.size - 1], dtype=int)
    states, _ = _batch_rk4(c0, h, fields_of, final_mark)
    return np.abs(states[:, 1, 2]) ** 2


def sweep_strategy(
    strategy: StrategySpec,
    control_grid: np.ndarray | None = None,
    dt: float = DEFAULT_DT,
) -> SweepResult:
    """Sweep the control value, propagating each design from |1>.

    Control values whose design is infeasible are skipped and listed in the
    result's parameter record; the sweep continues.
    """
    if control_grid is None:
        control_grid = (STIRAP_CONTROL_GRID if strategy.kind == "stirap"
                        else PARALLEL_CONTROL_GRID)
    control_grid = np.asarray(control_grid, dtype=float)
    if control_grid.ndim != 1 or np.any(np.diff(control_grid) <= 0):
        raise InvalidParameterError("control grid must be strictly increasing")

    kept: list[tuple[float, Schedule]] = []
    skipped: list[float] = []
    for control in control_grid:
        try:
            kept.append((float(control), strategy.build(float(control))))
        except InfeasibleDesignError:
            skipped.append(float(control))

    p3 = _batch_final_p3([s for _, s in kept], dt) if kept else np.empty(0)
    points = tuple(
        SweepPoint(
            control=control,
            area=pulse_area(s),
            fluence=fluence(s),
            p3_final=float(p),
            deviation=float(1.0 - p),
            schedule=s,
        )
        for (control, s), p in zip(kept, p3)
    )
    parameters = {
        "strategy": strategy.tag,
        **asdict(strategy),
        "dt": dt,
        "control_grid": control_grid.tolist(),
        "skipped_controls": skipped,
    }
    return SweepResult(strategy=strategy.tag, points=points, parameters=parameters)


def _first_crossing(result: SweepResult, target_p3: float) -> dict:
    control = result.column("control")
    p3 = result.column("p3_final")
    area = result.column("area")
    flu = result.column("fluence")
    if p3.size == 0 or float(np.max(p3)) < target_p3:
        raise UnreachableTargetError(
            f"strategy {result.strategy!r} never reaches P3 = {target_p3}",
            strategy=result.strategy,
        )
    if p3[0] >= target_p3:
        i, frac = 0, 0.0
        lo = 0
    else:
        idx = np.nonzero((p3[1:] >= target_p3) & (p3[:-1] < target_p3))[0]
        lo = int(idx[0])
        i = lo + 1
        frac = (target_p3 - p3[lo]) / (p3[i] - p3[lo])
    interp = lambda col: float(col[lo] + frac * (col[i] - col[lo])) if i else float(col[0])
    return {
        "strategy": result.strategy,
        "control": interp(control),
        "area": interp(area),
        "fluence": interp(flu),
    }


def crossover(reference: SweepResult, competitor: SweepResult, target_p3: float) -> dict:
    """Cost ratios at the first control values reaching ``target_p3``.

    Linear interpolation between the bracketing sweep points; the returned
    ratios are competitor over reference.
    """
    ref = _first_crossing(reference, target_p3)
    comp = _first_crossing(competitor, target_p3)
    return {
        "target_p3": target_p3,
        "reference": ref,
        "competitor": comp,
        "area_ratio": comp["area"] / ref["area"],
        "fluence_ratio": comp["fluence"] / ref["fluence"],
    }


def _rescaled_custom(base: Schedule, shift: float, target_area: float) -> Schedule:
    """Shift pump/Stokes apart by ``shift`` and rescale to the target area.

    The pump envelope moves later by shift/2 and the Stokes earlier; the
    detunings are kept fixed, so the schedule is no longer a level line
    (kind becomes ``custom``).
    """
    base_fn = base.field_fn

    def shifted(times):
        times = np.asarray(times, dtype=float)
        wp = base_fn(times - 0.5 * shift)[0]
        ws = base_fn(times + 0.5 * shift)[1]
        d1, d2 = base_fn(times)[2:]
        return wp, ws, d1, d2

    wp, ws, d1, d2 = shifted(base.t)
    area = float(np.trapezoid(np.hypot(wp, ws), base.t))
    scale = target_area / area if area > 0 else 0.0

    def field_fn(times):
        wp, ws, d1, d2 = shifted(times)
        return scale * wp, scale * ws, d1, d2

    wp, ws = scale * wp, scale * ws
    w_minus, w_0, w_plus = eigenvalues_of_fields(wp, ws, d1, d2)
    return Schedule(t=base.t, omega_p=wp, omega_s=ws, delta_1=d1, delta_2=d2,
                    w_minus=w_minus, w_0=w_0, w_plus=w_plus,
                    kind="custom", params=base.params, field_fn=field_fn)


def delay_scan(
    strategy: StrategySpec,
    delays: np.ndarray,
    fixed_area: float,
    dt: float = DEFAULT_DT,
) -> DelayScanResult:
    """Transfer probability versus pulse delay at a fixed total area.

    For STIRAP the delay is the tau parameter itself and the peak Rabi
    frequency is rescaled to hold the area (area is linear in the peak).
    For the parallel strategy the two envelopes are time-shifted in opposite
    directions on top of the design (``delays`` are the extra relative
    delays, 0 meaning the unmodified design) and then rescaled to the same
    fixed area.
    """
    delays = np.asarray(delays, dtype=float)
    grid = uniform_grid(strategy.t_span, strategy.n_samples)
    schedules: list[Schedule] = []
    if strategy.kind == "stirap":
        for tau in delays:
            unit = stirap_schedule(StirapParams(omega_max=1.0, tau=float(tau)), grid)
            omega_max = fixed_area / pulse_area(unit)
            schedules.append(
                stirap_schedule(StirapParams(omega_max=omega_max, tau=float(tau)), grid))
    elif strategy.kind == "parallel":
        probe = strategy.build(1.0)  # unit-omega0 design sets the envelope shapes
        base = make_parallel_schedule(DesignParams(
            omega0=fixed_area / pulse_area(probe), alpha=strategy.alpha,
            beta=strategy.beta, t_span=strategy.t_span,
            n_samples=strategy.n_samples))
        for d in delays:
            schedules.append(_rescaled_custom(base, float(d), fixed_area))
    else:
        raise InvalidParameterError(
            f"delay scan is not defined for strategy kind {strategy.kind!r}")

    p3 = _batch_final_p3(schedules, dt) if schedules else np.empty(0)
    return DelayScanResult(strategy=strategy.tag, delays=delays, p3=p3,
                           fixed_area=fixed_area)


def write_sweep_csv(results: Sequence[SweepResult], path,
                    provenance: str | None = None) -> None:
    """Serialize one or more sweeps into the shared CSV layout."""
    lines = []
    if provenance:
        lines.append(f"# {provenance}")
    lines.append(SWEEP_CSV_HEADER)
    for res in results:
        for pt in res.points:
            lines.append(",".join([
                res.strategy,
                f"{pt.control:.17g}",
                f"{pt.area / math.pi:.17g}",
                f"{pt.fluence:.17g}",
                f"{pt.p3_final:.17g}",
                f"{pt.deviation:.17g}",
            ]))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_sweep_manifest(results: Sequence[SweepResult], path,
                         config: dict | None = None,
                         crossover_report: dict | None = None) -> None:
    """JSON manifest with the full parameter record of every sweep."""
    manifest = {
        "strategies": [res.parameters for res in results],
    }
    if config is not None:
        manifest["config"] = config
    if crossover_report is not None:
        manifest["crossover"] = crossover_report
    Path(path).write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
