"""Spectral synthesis of the designed fields for a programmable pulse shaper.

Maps a dimensionless design to physical femtosecond units, computes the
common chirp phase of pump and Stokes, transforms the complex fields to
spectral amplitude/phase pairs, applies modulator pixelization, and checks
the full round trip by re-synthesizing the fields and propagating them.

Transform convention (per field):

    E * Lambda(t) * exp(i phase(t)) = (1/2pi) Integral dw A(w) exp(i [w t + phi(w)])

so the forward direction is the ordinary Fourier transform with kernel
exp(-i w t).  Spectra are stored relative to each field's carrier
(baseband); absolute level frequencies only enter carrier bookkeeping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .design import FIT_BETA, DesignParams, Schedule, make_parallel_schedule
from .errors import (
    InvalidParameterError,
    UnsupportedVariantError,
    WindowingViolationError,
)
from .lambda_system import QuantumState, eigenvalues_of_fields
from .propagator import PropagationResult, propagate

__all__ = [
    "ComplexField",
    "SpectralField",
    "PhysicalConfig",
    "PhysicalScale",
    "instantaneous_phase",
    "to_spectrum",
    "pixelize",
    "to_temporal",
    "recovered_frequency",
    "physical_units",
    "peak_intensity",
    "transmission_mask",
    "seed_spectrum",
    "shape_roundtrip",
    "write_spectrum_csv",
    "write_pixel_csv",
]

# SI constants (CODATA) and the Debye in C m.
HBAR = 1.054571817e-34
SPEED_OF_LIGHT = 2.99792458e8
VACUUM_PERMITTIVITY = 8.8541878128e-12
DEBYE = 3.33564e-30

# Field representation grid: edge decay requirement for transforms and the
# zero padding factor that refines the spectral grid enough for a 320-pixel
# mask across a 100 fs seed bandwidth.
EDGE_DECAY = 1e-6
DEFAULT_FFT_SAMPLES = 2**14
DEFAULT_SPAN_FACTOR = 2.0
DEFAULT_PAD_FACTOR = 8
SEED_BAND_FLOOR = 1e-4


@dataclass(frozen=True, eq=False)
class ComplexField:
    """Complex temporal field: unit-peak envelope, continuous phase, peak value.

    ``t`` may be in units of T or in fs; ``peak`` carries the matching Rabi
    units.  ``carrier`` is the absolute carrier frequency (reporting only).
    """

    t: np.ndarray
    envelope: np.ndarray
    phase: np.ndarray
    peak: float
    label: str = ""
    carrier: float = 0.0

    def signal(self) -> np.ndarray:
        return self.peak * self.envelope * np.exp(1j * self.phase)


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Spectral amplitude (unit peak) and unwrapped phase on a uniform grid.

    ``omega`` is relative to the carrier.  ``pixel_count`` is 0 for a
    continuous mask; after pixelization the per-pixel staircase values and
    band edges are kept alongside the resampled arrays.
    """

    omega: np.ndarray
    amplitude: np.ndarray
    phase: np.ndarray
    peak: float
    time_origin: float
    time_step: float
    pixel_count: int = 0
    label: str = ""
    carrier: float = 0.0
    pixel_edges: np.ndarray | None = None
    pixel_amplitude: np.ndarray | None = None
    pixel_phase: np.ndarray | None = None

    def complex_spectrum(self) -> np.ndarray:
        return self.peak * self.amplitude * np.exp(1j * self.phase)

    def energy(self) -> float:
        """Parseval energy (1/2pi) Integral |A|^2 dw."""
        domega = self.omega[1] - self.omega[0]
        return float(np.sum(np.abs(self.complex_spectrum()) ** 2) * domega / (2.0 * np.pi))


@dataclass(frozen=True)
class PhysicalConfig:
    """Physical realization: level frequencies [rad/fs], pulse duration, dipole."""

    omega1: float
    omega2: float
    omega3: float
    intensity_fwhm_fs: float
    dipole_debye: float = 1.0

    def __post_init__(self):
        if not (self.intensity_fwhm_fs > 0):
            raise InvalidParameterError(
                f"intensity FWHM must be positive, got {self.intensity_fwhm_fs}")
        if not (self.omega2 > self.omega1 and self.omega2 > self.omega3):
            raise InvalidParameterError(
                "lambda configuration requires omega2 > omega1 and omega2 > omega3")


@dataclass(frozen=True)
class PhysicalScale:
    """Mapping between the dimensionless design and femtosecond units."""

    t_fs: float
    omega0_rad_per_fs: float

    @property
    def omega0_thz(self) -> float:
        """Angular frequency in units of 10^12 rad/s."""
        return self.omega0_rad_per_fs * 1e3


def physical_units(p: DesignParams, intensity_fwhm_fs: float) -> PhysicalScale:
    """Physical time unit and splitting for a given intensity FWHM.

    The Gaussian-fit envelopes have intensity FWHM ``2 beta T sqrt(ln2 / 2)``
    with ``beta = sqrt(pi/2)``, which fixes T in fs; omega0 follows from the
    dimensionless product omega0*T.
    """
    t_fs = intensity_fwhm_fs / (2.0 * FIT_BETA * math.sqrt(math.log(2.0) / 2.0))
    return PhysicalScale(t_fs=t_fs, omega0_rad_per_fs=p.omega0 / t_fs)


def peak_intensity(omega_peak_rad_per_s: float, dipole_debye: float) -> float:
    """Peak intensity [GW/cm^2] of a field with the given peak Rabi frequency.

    E = hbar * Omega / mu, I = (1/2) c eps0 E^2.
    """
    if omega_peak_rad_per_s <= 0 or dipole_debye <= 0:
        raise InvalidParameterError("peak Rabi frequency and dipole must be positive")
    e_field = HBAR * omega_peak_rad_per_s / (dipole_debye * DEBYE)
    intensity_w_m2 = 0.5 * SPEED_OF_LIGHT * VACUUM_PERMITTIVITY * e_field**2
    return intensity_w_m2 / 1e13  # W/m^2 -> GW/cm^2


def _check_constant_two_photon(s: Schedule) -> None:
    params = s.params
    if isinstance(params, DesignParams):
        if params.alpha != 0.0:
            raise UnsupportedVariantError(
                "spectral shaping is implemented for constant two-photon detuning "
                "(alpha = 0); pump and Stokes would need two distinct chirps")
        return
    d2 = s.delta_2
    scale = max(abs(float(d2[0])), 1.0)
    if float(np.max(np.abs(d2 - d2[0]))) > 1e-9 * scale:
        raise UnsupportedVariantError(
            "spectral shaping requires a constant two-photon detuning")


def instantaneous_phase(
    s: Schedule,
    which: str,
    cfg: PhysicalConfig,
    n_samples: int = DEFAULT_FFT_SAMPLES,
    span_factor: float = DEFAULT_SPAN_FACTOR,
) -> ComplexField:
    """Complex temporal field (fs units) of the pump or Stokes channel.

    Both carriers are chosen as the instantaneous frequency at t = 0, so the
    relative phase is the integral of the common chirp
    ``delta_1(0) - delta_1(t)`` and is identical for the two fields.  The
    field is laid out on a widened grid (``span_factor`` times the schedule
    window) so the envelope has fully decayed at the edges.
    """
    if which not in ("pump", "stokes"):
        raise InvalidParameterError(f"field must be 'pump' or 'stokes', got {which!r}")
    _check_constant_two_photon(s)
    if not isinstance(s.params, DesignParams):
        raise UnsupportedVariantError(
            "spectral shaping needs the design parameters attached to the schedule")
    scale = physical_units(s.params, cfg.intensity_fwhm_fs)

    span = float(s.t[-1]) * span_factor
    t = np.linspace(-span, span, n_samples)
    wp, ws, d1, d2 = s.fields_at(t)
    envelope_raw = wp if which == "pump" else ws
    peak = float(np.max(envelope_raw))
    envelope = envelope_raw / peak if peak > 0 else envelope_raw

    d1_zero = float(s.fields_at(np.zeros(1))[2][0])
    nu = d1_zero - d1  # relative instantaneous frequency, equal for both fields
    phase = cumulative_trapezoid(nu, t, initial=0.0)
    phase = phase - np.interp(0.0, t, phase)

    if which == "pump":
        carrier = (cfg.omega2 - cfg.omega1) - d1_zero / scale.t_fs
    else:
        d2_zero = float(s.fields_at(np.zeros(1))[3][0])
        carrier = (cfg.omega2 - cfg.omega3) + (d2_zero - d1_zero) / scale.t_fs

    return ComplexField(
        t=t * scale.t_fs,
        envelope=envelope,
        phase=phase,  # dimensionless rad, invariant under the time rescaling
        peak=peak / scale.t_fs,
        label=which,
        carrier=carrier,
    )


def _unwrap_from_peak(phase: np.ndarray, idx: int) -> np.ndarray:
    """Standard +-pi branch correction scanning outward from sample ``idx``."""
    out = np.empty_like(phase)
    out[idx:] = np.unwrap(phase[idx:])
    out[: idx + 1] = np.unwrap(phase[: idx + 1][::-1])[::-1]
    return out


def to_spectrum(f: ComplexField, pad_factor: int = DEFAULT_PAD_FACTOR) -> SpectralField:
    """Fourier transform of the complex field, amplitude-normalized.

    The time signal is zero-padded by ``pad_factor`` (the envelope must have
    decayed below ``1e-6`` of its peak at the grid edges, else
    :class:`WindowingViolationError`), which refines the spectral grid enough
    for fine pixel masks without altering the spectrum.
    """
    if max(abs(f.envelope[0]), abs(f.envelope[-1])) >= EDGE_DECAY:
        raise WindowingViolationError(
            f"field {f.label!r} has not decayed at the window edges "
            f"(edge envelope {max(abs(f.envelope[0]), abs(f.envelope[-1])):.3g})")
    signal = f.signal()
    n = signal.size * max(1, int(pad_factor))
    dt = float(f.t[1] - f.t[0])
    t0 = float(f.t[0])

    spectrum = np.fft.fft(signal, n=n) * dt
    omega = 2.0 * np.pi * np.fft.fftfreq(n, d=dt)
    spectrum = np.fft.fftshift(spectrum)
    omega = np.fft.fftshift(omega)
    spectrum = spectrum * np.exp(-1j * omega * t0)

    amp = np.abs(spectrum)
    peak = float(np.max(amp))
    idx = int(np.argmax(amp))
    phase = _unwrap_from_peak(np.angle(spectrum), idx)
    return SpectralField(
        omega=omega,
        amplitude=amp / peak if peak > 0 else amp,
        phase=phase,
        peak=peak,
        time_origin=t0,
        time_step=dt,
        pixel_count=0,
        label=f.label,
        carrier=f.carrier,
    )


def pixelize(sf: SpectralField, pixels: int = 320,
             band: tuple[float, float] | None = None) -> SpectralField:
    """Replace amplitude and phase by per-pixel means across the band.

    ``band`` defaults to the interval where the field's own amplitude exceeds
    ``1e-4`` of its peak; a modulator at the Fourier plane of a seed pulse
    should be given the seed's band instead.  Outside the band the amplitude
    is zero (light beyond the modulator aperture is blocked).
    """
    if pixels < 2:
        raise InvalidParameterError(f"pixel count must be >= 2, got {pixels}")
    if band is None:
        support = sf.omega[sf.amplitude > SEED_BAND_FLOOR * np.max(sf.amplitude)]
        band = (float(support[0]), float(support[-1]))
    lo, hi = band
    if not hi > lo:
        raise InvalidParameterError(f"empty pixel band {band}")

    edges = np.linspace(lo, hi, pixels + 1)
    inside = (sf.omega >= lo) & (sf.omega <= hi)
    idx = np.clip(np.searchsorted(edges, sf.omega[inside], side="right") - 1,
                  0, pixels - 1)
    counts = np.bincount(idx, minlength=pixels).astype(float)
    amp_sum = np.bincount(idx, weights=sf.amplitude[inside], minlength=pixels)
    phase_sum = np.bincount(idx, weights=sf.phase[inside], minlength=pixels)
    occupied = counts > 0
    pixel_amp = np.where(occupied, amp_sum / np.maximum(counts, 1.0), 0.0)
    pixel_phase = np.where(occupied, phase_sum / np.maximum(counts, 1.0), 0.0)

    amplitude = np.zeros_like(sf.amplitude)
    phase = np.zeros_like(sf.phase)
    amplitude[inside] = pixel_amp[idx]
    phase[inside] = pixel_phase[idx]

    return replace(
        sf,
        amplitude=amplitude,
        phase=phase,
        pixel_count=pixels,
        pixel_edges=edges,
        pixel_amplitude=pixel_amp,
        pixel_phase=pixel_phase,
    )


def to_temporal(sf: SpectralField) -> ComplexField:
    """Inverse transform back to a complex temporal field.

    Returns the field on the (padded) time grid implied by the spectral grid;
    the leading samples coincide exactly with the grid the spectrum was
    computed from.
    """
    domega = float(sf.omega[1] - sf.omega[0])
    n = sf.omega.size
    spectrum = sf.complex_spectrum() * np.exp(1j * sf.omega * sf.time_origin)
    signal = np.fft.ifft(np.fft.ifftshift(spectrum)) / sf.time_step
    t = sf.time_origin + sf.time_step * np.arange(n)

    env = np.abs(signal)
    peak = float(np.max(env))
    idx = int(np.argmax(env))
    phase = _unwrap_from_peak(np.angle(signal), idx)
    phase = phase - np.interp(0.0, t, phase)
    return ComplexField(
        t=t,
        envelope=env / peak if peak > 0 else env,
        phase=phase,
        peak=peak,
        label=sf.label,
        carrier=sf.carrier,
    )


def recovered_frequency(f: ComplexField) -> np.ndarray:
    """Instantaneous frequency by differentiation of the unwrapped phase."""
    return np.gradient(f.phase, f.t)


def seed_spectrum(sf: SpectralField, seed_fwhm_fs: float) -> np.ndarray:
    """Unit-peak amplitude of a transform-limited Gaussian seed pulse.

    ``seed_fwhm_fs`` is the intensity FWHM; the returned array is sampled on
    ``sf``'s frequency grid (fs-based).
    """
    tau_a = seed_fwhm_fs / math.sqrt(2.0 * math.log(2.0))
    return np.exp(-((sf.omega * tau_a / 2.0) ** 2))


def seed_band(sf: SpectralField, seed_fwhm_fs: float,
              floor: float = SEED_BAND_FLOOR) -> tuple[float, float]:
    """Frequency interval where the seed amplitude exceeds ``floor``."""
    tau_a = seed_fwhm_fs / math.sqrt(2.0 * math.log(2.0))
    half = 2.0 * math.sqrt(-math.log(floor)) / tau_a
    return (-half, half)


def transmission_mask(sf: SpectralField, seed_amplitude: np.ndarray,
                      floor: float = SEED_BAND_FLOOR) -> dict:
    """Amplitude transmission of a passive modulator shaping ``sf`` from a seed.

    A passive mask only attenuates; if the required transmission exceeds 1
    anywhere inside the seed band the target is renormalized and the report
    flags the clipping factor.
    """
    inside = seed_amplitude >= floor
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(inside, sf.amplitude / np.maximum(seed_amplitude, 1e-300), 0.0)
    peak_ratio = float(np.max(ratio))
    clipped = peak_ratio > 1.0
    transmission = ratio / peak_ratio if clipped else ratio
    return {
        "transmission": transmission,
        "phase": sf.phase,
        "clipped": clipped,
        "renormalization": 1.0 / peak_ratio if clipped else 1.0,
    }


def _schedule_from_fields(
    pump: ComplexField,
    stokes: ComplexField,
    scale: PhysicalScale,
    delta1_zero: float,
    delta2_zero: float,
    n_keep: int,
    envelope_floor: float = 1e-2,
) -> Schedule:
    """Rebuild a dimensionless schedule from re-synthesized temporal fields.

    Detunings are recovered from the phase derivatives; where an envelope is
    below ``envelope_floor`` of its peak the phase carries no information, so
    the recovered frequency is held at its nearest trusted value there (the
    fields are off, only irrelevant phases would change).
    """
    t_fs = pump.t[:n_keep]
    t = t_fs / scale.t_fs
    omega_p = pump.peak * pump.envelope[:n_keep] * scale.t_fs
    omega_s = stokes.peak * stokes.envelope[:n_keep] * scale.t_fs

    def trusted_frequency(f: ComplexField) -> np.ndarray:
        nu = recovered_frequency(f)[:n_keep] * scale.t_fs  # rad/fs -> 1/T units
        env = f.envelope[:n_keep]
        good = np.nonzero(env > envelope_floor)[0]
        if good.size == 0:
            return np.zeros_like(nu)
        lo, hi = int(good[0]), int(good[-1])
        nu = nu.copy()
        nu[:lo] = nu[lo]
        nu[hi + 1:] = nu[hi]
        return nu

    nu_p = trusted_frequency(pump)
    nu_s = trusted_frequency(stokes)
    delta_1 = delta1_zero - nu_p
    delta_2 = delta2_zero + (nu_s - nu_p)
    w_minus, w_0, w_plus = eigenvalues_of_fields(omega_p, omega_s, delta_1, delta_2)
    return Schedule(t=t, omega_p=omega_p, omega_s=omega_s,
                    delta_1=delta_1, delta_2=delta_2,
                    w_minus=w_minus, w_0=w_0, w_plus=w_plus, kind="custom")


@dataclass(frozen=True, eq=False)
class ShapeRoundtrip:
    """Everything the shaping pipeline produces for one design."""

    scale: PhysicalScale
    pump_field: ComplexField
    stokes_field: ComplexField
    pump_spectrum: SpectralField
    stokes_spectrum: SpectralField
    pump_pixelized: SpectralField
    stokes_pixelized: SpectralField
    seed_amplitude: np.ndarray
    band: tuple[float, float]
    masks: dict
    p3_reference: float
    p3_continuous: float
    p3_pixelized: float
    peak_rabi_rad_per_fs: float
    peak_intensity_gw_cm2: float
    reference: PropagationResult

    @property
    def pixelization_shift(self) -> float:
        return abs(self.p3_pixelized - self.p3_continuous)


def shape_roundtrip(
    p: DesignParams,
    cfg: PhysicalConfig,
    pixels: int = 320,
    seed_fwhm_fs: float = 100.0,
    n_samples: int = DEFAULT_FFT_SAMPLES,
) -> ShapeRoundtrip:
    """Design -> phase synthesis -> spectrum -> pixelization -> dynamics.

    Propagates three variants of the same design: the schedule itself, the
    continuous spectral round trip, and the ``pixels``-pixel quantized round
    trip, reporting the final transfer of each plus the physical-unit summary.
    """
    schedule = make_parallel_schedule(p)
    scale = physical_units(p, cfg.intensity_fwhm_fs)

    pump_t = instantaneous_phase(schedule, "pump", cfg, n_samples=n_samples)
    stokes_t = instantaneous_phase(schedule, "stokes", cfg, n_samples=n_samples)
    pump_sf = to_spectrum(pump_t)
    stokes_sf = to_spectrum(stokes_t)

    seed_amp = seed_spectrum(pump_sf, seed_fwhm_fs)
    band = seed_band(pump_sf, seed_fwhm_fs)
    masks = {
        "pump": transmission_mask(pump_sf, seed_amp),
        "stokes": transmission_mask(stokes_sf, seed_amp),
    }

    pump_px = pixelize(pump_sf, pixels, band=band)
    stokes_px = pixelize(stokes_sf, pixels, band=band)

    d1_zero = float(schedule.fields_at(np.zeros(1))[2][0])
    d2_zero = float(schedule.fields_at(np.zeros(1))[3][0])

    def roundtrip_p3(pump_spec: SpectralField, stokes_spec: SpectralField) -> float:
        rebuilt = _schedule_from_fields(
            to_temporal(pump_spec), to_temporal(stokes_spec),
            scale, d1_zero, d2_zero, n_keep=n_samples)
        dt = float(np.max(np.diff(rebuilt.t)))
        return float(propagate(rebuilt, dt=dt, adiabatic=False).p3[-1])

    reference = propagate(schedule, adiabatic=False)
    p3_reference = float(reference.p3[-1])
    p3_continuous = roundtrip_p3(pump_sf, stokes_sf)
    p3_pixelized = roundtrip_p3(pump_px, stokes_px)

    peak_rabi_fs = float(max(np.max(schedule.omega_p), np.max(schedule.omega_s))) / scale.t_fs
    intensity = peak_intensity(peak_rabi_fs * 1e15, cfg.dipole_debye)

    return ShapeRoundtrip(
        scale=scale,
        pump_field=pump_t, stokes_field=stokes_t,
        pump_spectrum=pump_sf, stokes_spectrum=stokes_sf,
        pump_pixelized=pump_px, stokes_pixelized=stokes_px,
        seed_amplitude=seed_amp,
        band=band,
        masks=masks,
        p3_reference=p3_reference,
        p3_continuous=p3_continuous,
        p3_pixelized=p3_pixelized,
        peak_rabi_rad_per_fs=peak_rabi_fs,
        peak_intensity_gw_cm2=intensity,
        reference=reference,
    )


def write_spectrum_csv(sf: SpectralField, path,
                       provenance: str | None = None) -> None:
    """Continuous mask CSV: one row per spectral sample."""
    lines = []
    if provenance:
        lines.append(f"# {provenance}")
    lines.append("omega_rel,amplitude,phase")
    for row in zip(sf.omega, sf.amplitude, sf.phase):
        lines.append(",".join(f"{v:.17g}" for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_pixel_csv(sf: SpectralField, path,
                    provenance: str | None = None) -> None:
    """Pixelized mask CSV: one row per modulator pixel."""
    if sf.pixel_count == 0 or sf.pixel_edges is None:
        raise InvalidParameterError("spectral field carries no pixelization")
    lines = []
    if provenance:
        lines.append(f"# {provenance}")
    lines.append("pixel_index,omega_lo,omega_hi,amplitude,phase")
    for i in range(sf.pixel_count):
        lines.append(",".join([
            str(i),
            f"{sf.pixel_edges[i]:.17g}",
            f"{sf.pixel_edges[i + 1]:.17g}",
            f"{sf.pixel_amplitude[i]:.17g}",
            f"{sf.pixel_phase[i]:.17g}",
        ]))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
