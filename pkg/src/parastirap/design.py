"""Pulse design: detuning schedules, the closed-form solve for pump/Stokes
envelopes that keeps the three eigenvalues equidistant, Gaussian-fit and
linear-chirp variants, conventional-STIRAP fields, and area/fluence metrics.

All quantities are dimensionless multiples of 1/T (time in units of T); the
spectral-shaping module owns the mapping to physical units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.special import erf

from .errors import InfeasibleDesignError, InvalidParameterError
from .lambda_system import eigenvalues_of_fields

__all__ = [
    "DesignParams",
    "StirapParams",
    "Schedule",
    "detuning_schedule",
    "solve_parallel_rabi",
    "make_parallel_schedule",
    "gaussian_fit_envelopes",
    "linearized_schedule",
    "stirap_schedule",
    "uniform_grid",
    "pulse_area",
    "fluence",
    "write_schedule_csv",
    "read_schedule_csv",
]

# Gaussian-fit envelope shape parameter and pump/Stokes peak offset (in T).
FIT_BETA = math.sqrt(math.pi / 2.0)
FIT_DELAY = 0.14

# Squared Rabi frequencies this far below zero (relative to omega0^2) are
# numerical noise from the tangential zeros at the schedule endpoints.
NEGATIVE_SQUARE_TOL = 1e-9

SCHEDULE_CSV_HEADER = "t,omega_p,omega_s,delta1,delta2,w_minus,w_0,w_plus"


@dataclass(frozen=True)
class DesignParams:
    """Knobs of a parallel adiabatic-passage design.

    ``omega0`` is the constant eigenvalue splitting (times 2) the design
    enforces, ``alpha``/``beta`` shape the two-photon detuning bump, and the
    uniform time grid covers ``[-t_span, +t_span]`` with ``n_samples`` points.
    """

    omega0: float
    alpha: float = 0.0
    beta: float = 1.25
    t_span: float = 4.0
    n_samples: int = 4096

    def __post_init__(self):
        if not (math.isfinite(self.omega0) and self.omega0 > 0):
            raise InvalidParameterError(f"omega0 must be positive, got {self.omega0}")
        if self.beta <= 0:
            raise InvalidParameterError(f"beta must be positive, got {self.beta}")
        if self.n_samples < 2:
            raise InvalidParameterError(f"n_samples must be >= 2, got {self.n_samples}")
        if not (math.isfinite(self.t_span) and self.t_span > 0):
            raise InvalidParameterError(f"t_span must be positive, got {self.t_span}")

    def grid(self) -> np.ndarray:
        return uniform_grid(self.t_span, self.n_samples)


@dataclass(frozen=True)
class StirapParams:
    """Conventional STIRAP fields: delayed Gaussians of equal peak value.

    The Gaussian 1/e half-width is fixed to T; the Stokes pulse precedes the
    pump by ``tau``.
    """

    omega_max: float
    tau: float = 1.1
    width: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.omega_max) and self.omega_max >= 0):
            raise InvalidParameterError(f"omega_max must be >= 0, got {self.omega_max}")
        if self.tau < 0:
            raise InvalidParameterError(f"tau must be >= 0, got {self.tau}")


@dataclass(frozen=True, eq=False)
class Schedule:
    """Time-sampled field record with the attached eigenvalue traces.

    ``kind`` is one of ``parallel``, ``linearized``, ``stirap``, ``custom``.
    ``field_fn`` (when present) evaluates the exact fields at arbitrary
    times; integrators prefer it over interpolating the sampled arrays.
    Arrays are read-only after construction.
    """

    t: np.ndarray
    omega_p: np.ndarray
    omega_s: np.ndarray
    delta_1: np.ndarray
    delta_2: np.ndarray
    w_minus: np.ndarray
    w_0: np.ndarray
    w_plus: np.ndarray
    kind: str
    params: object | None = field(default=None, compare=False)
    field_fn: Callable[[np.ndarray], tuple] | None = field(
        default=None, repr=False, compare=False
    )

    def __post_init__(self):
        arrays = {}
        n = None
        for name in ("t", "omega_p", "omega_s", "delta_1", "delta_2",
                     "w_minus", "w_0", "w_plus"):
            a = np.ascontiguousarray(getattr(self, name), dtype=float)
            if n is None:
                n = a.shape[0]
            if a.shape != (n,):
                raise InvalidParameterError(f"schedule array {name!r} has shape {a.shape}")
            a.flags.writeable = False
            arrays[name] = a
        for name, a in arrays.items():
            object.__setattr__(self, name, a)

    def __len__(self) -> int:
        return self.t.shape[0]

    def fields_at(self, times: np.ndarray) -> tuple[np.ndarray, ...]:
        """Exact (or interpolated) fields at arbitrary times.

        Uses the analytic closure when available, otherwise a cubic spline of
        the sampled arrays with Rabi frequencies clamped to >= 0.
        """
        times = np.asarray(times, dtype=float)
        if self.field_fn is not None:
            wp, ws, d1, d2 = self.field_fn(times)
            return (np.broadcast_to(wp, times.shape).astype(float),
                    np.broadcast_to(ws, times.shape).astype(float),
                    np.broadcast_to(d1, times.shape).astype(float),
                    np.broadcast_to(d2, times.shape).astype(float))
        from scipy.interpolate import CubicSpline

        out = []
        for a, clamp in ((self.omega_p, True), (self.omega_s, True),
                         (self.delta_1, False), (self.delta_2, False)):
            v = CubicSpline(self.t, a)(times)
            out.append(np.maximum(v, 0.0) if clamp else v)
        return tuple(out)

    def gap_asymmetry(self) -> np.ndarray:
        """Per-sample deviation from equidistant eigenvalues."""
        return np.abs((self.w_plus - self.w_0) - (self.w_0 - self.w_minus))


def uniform_grid(t_span: float, n_samples: int) -> np.ndarray:
    """Uniform time grid over [-t_span, +t_span]."""
    return np.linspace(-t_span, t_span, n_samples)


def detuning_schedule(p: DesignParams, t) -> tuple[np.ndarray, np.ndarray]:
    """One- and two-photon detunings at time(s) ``t``.

    The one-photon detuning ramps smoothly from -omega0/2 to +omega0 through
    omega0/4 at t=0; the two-photon detuning is omega0/2 plus an optional
    Gaussian bump of relative height ``alpha`` and inverse width ``beta``.
    """
    t = np.asarray(t, dtype=float)
    delta_1 = 0.75 * p.omega0 * erf(t) + 0.25 * p.omega0
    delta_2 = 0.5 * p.omega0 * (1.0 + p.alpha * np.exp(-((p.beta * t) ** 2)))
    return delta_1, delta_2


def solve_parallel_rabi(omega0: float, delta_1, delta_2):
    """Invert the equidistant-eigenvalue conditions for the Rabi frequencies.

    With ``S = omega0^2 - (4/3)(d1^2 - d1 d2 + d2^2)`` the two conditions are
    linear in the squared Rabi frequencies:

        omega_p^2 = (d1 + d2) * [9 S - 4 (2 d1 - d2)(2 d2 - d1)] / (27 d2)
        omega_s^2 = S - omega_p^2

    Squares within ``-1e-9 * omega0^2`` of zero are clamped to 0 (the level
    line touches zero tangentially at the boundaries); anything lower raises
    :class:`InfeasibleDesignError` because the requested level line does not
    exist there.  Requires ``delta_2 != 0``.
    """
    d1 = np.asarray(delta_1, dtype=float)
    d2 = np.asarray(delta_2, dtype=float)
    s = omega0**2 - (4.0 / 3.0) * (d1 * d1 - d1 * d2 + d2 * d2)
    wp2 = (d1 + d2) * (9.0 * s - 4.0 * (2.0 * d1 - d2) * (2.0 * d2 - d1)) / (27.0 * d2)
    ws2 = s - wp2

    floor = -NEGATIVE_SQUARE_TOL * omega0**2
    worst = float(np.minimum(wp2, ws2).min()) if wp2.size else 0.0
    if worst < floor:
        which = "pump" if float(np.min(wp2)) <= float(np.min(ws2)) else "Stokes"
        idx = int(np.argmin(np.minimum(wp2, ws2)))
        raise InfeasibleDesignError(
            f"no equidistant level line: squared {which} Rabi frequency reaches "
            f"{worst:.6g} (< {floor:.3g}) at sample {idx}",
            value=worst,
            index=idx,
        )
    omega_p = np.sqrt(np.maximum(wp2, 0.0))
    omega_s = np.sqrt(np.maximum(ws2, 0.0))
    if omega_p.ndim == 0:
        return float(omega_p), float(omega_s)
    return omega_p, omega_s


def _attach_eigenvalues(t, omega_p, omega_s, delta_1, delta_2, kind, params, field_fn):
    w_minus, w_0, w_plus = eigenvalues_of_fields(omega_p, omega_s, delta_1, delta_2)
    return Schedule(
        t=t, omega_p=omega_p, omega_s=omega_s, delta_1=delta_1, delta_2=delta_2,
        w_minus=w_minus, w_0=w_0, w_plus=w_plus,
        kind=kind, params=params, field_fn=field_fn,
    )


def make_parallel_schedule(p: DesignParams) -> Schedule:
    """Sample the full parallel design on the uniform grid.

    Detunings follow :func:`detuning_schedule`; the envelopes are solved
    pointwise by :func:`solve_parallel_rabi`; the eigenvalue traces come from
    the eigensolver applied to the solved fields (not from the design
    ansatz), so the attached values independently verify the construction.
    """
    t = p.grid()
    delta_1, delta_2 = detuning_schedule(p, t)
    try:
        omega_p, omega_s = solve_parallel_rabi(p.omega0, delta_1, delta_2)
    except InfeasibleDesignError as exc:
        t_bad = float(t[exc.index]) if exc.index is not None else None
        raise InfeasibleDesignError(
            f"{exc} (t = {t_bad!r})", value=exc.value, time=t_bad, index=exc.index
        ) from None

    def field_fn(times):
        d1, d2 = detuning_schedule(p, times)
        wp, ws = solve_parallel_rabi(p.omega0, d1, d2)
        return wp, ws, d1, d2

    return _attach_eigenvalues(t, omega_p, omega_s, delta_1, delta_2,
                               "parallel", p, field_fn)


def gaussian_fit_envelopes(omega0: float) -> tuple[Callable, Callable]:
    """Gaussian fits to the exact constant-two-photon-detuning envelopes.

    Both envelopes are ``(omega0/2) * beta * exp(-((t -+ 0.14)/beta)^2)`` with
    ``beta = sqrt(pi/2)``; the pump peaks at +0.14 T and the Stokes at
    -0.14 T (counterintuitive order).  Returns ``(pump_fn, stokes_fn)``.
    """
    amp = 0.5 * omega0 * FIT_BETA

    def pump(t):
        return amp * np.exp(-(((np.asarray(t, dtype=float) - FIT_DELAY) / FIT_BETA) ** 2))

    def stokes(t):
        return amp * np.exp(-(((np.asarray(t, dtype=float) + FIT_DELAY) / FIT_BETA) ** 2))

    return pump, stokes


def linearized_schedule(p: DesignParams) -> Schedule:
    """Linear-chirp variant: straight-line one-photon detuning through the
    origin with the t=0 slope of the smooth ramp, constant two-photon
    detuning, and the Gaussian-fit envelopes.

    Only defined for ``alpha = 0``.
    """
    if p.alpha != 0.0:
        raise InvalidParameterError("the linearized variant requires alpha = 0")
    slope = 1.5 * p.omega0 / math.sqrt(math.pi)
    pump, stokes = gaussian_fit_envelopes(p.omega0)
    t = p.grid()

    def field_fn(times):
        times = np.asarray(times, dtype=float)
        return (pump(times), stokes(times), slope * times,
                np.full_like(times, 0.5 * p.omega0))

    omega_p, omega_s, delta_1, delta_2 = field_fn(t)
    return _attach_eigenvalues(t, omega_p, omega_s, delta_1, delta_2,
                               "linearized", p, field_fn)


def stirap_schedule(s: StirapParams, t: np.ndarray) -> Schedule:
    """Conventional resonant STIRAP: two delayed Gaussians, zero detunings."""
    t = np.asarray(t, dtype=float)

    def field_fn(times):
        times = np.asarray(times, dtype=float)
        zeros = np.zeros_like(times)
        omega_p = s.omega_max * np.exp(-(((times - 0.5 * s.tau) / s.width) ** 2))
        omega_s = s.omega_max * np.exp(-(((times + 0.5 * s.tau) / s.width) ** 2))
        return omega_p, omega_s, zeros, zeros

    omega_p, omega_s, delta_1, delta_2 = field_fn(t)
    return _attach_eigenvalues(t, omega_p, omega_s, delta_1, delta_2,
                               "stirap", s, field_fn)


def pulse_area(s: Schedule) -> float:
    """Total pulse area: the time integral of sqrt(omega_p^2 + omega_s^2)."""
    return float(np.trapezoid(np.hypot(s.omega_p, s.omega_s), s.t))


def fluence(s: Schedule) -> float:
    """Integrated intensity: the time integral of omega_p^2 + omega_s^2."""
    return float(np.trapezoid(s.omega_p**2 + s.omega_s**2, s.t))


def write_schedule_csv(s: Schedule, path, provenance: str | None = None) -> None:
    """Serialize a schedule with 17-significant-digit columns.

    ``provenance`` (a single line, typically the resolved run configuration)
    is embedded as a leading ``#`` comment so the artifact is self-describing.
    """
    lines = []
    if provenance:
        lines.append(f"# {provenance}")
    lines.append(SCHEDULE_CSV_HEADER)
    cols = (s.t, s.omega_p, s.omega_s, s.delta_1, s.delta_2,
            s.w_minus, s.w_0, s.w_plus)
    for row in zip(*cols):
        lines.append(",".join(f"{v:.17g}" for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_schedule_csv(path) -> Schedule:
    """Read a schedule written by :func:`write_schedule_csv` (kind=custom)."""
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if line == SCHEDULE_CSV_HEADER:
                continue
            rows.append([float(x) for x in line.split(",")])
    data = np.array(rows, dtype=float)
    if data.ndim != 2 or data.shape[1] != 8:
        raise InvalidParameterError(f"malformed schedule CSV {path!r}")
    t, wp, ws, d1, d2, wm, w0, wpl = data.T
    return Schedule(t=t, omega_p=wp, omega_s=ws, delta_1=d1, delta_2=d2,
                    w_minus=wm, w_0=w0, w_plus=wpl, kind="custom")
