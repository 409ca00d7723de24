"""Three-level lambda-system Hamiltonian and ordered symmetric 3x3 eigensolver.

Conventions used throughout the package:

* the characteristic process duration T is the unit of time, so every
  frequency-like quantity (Rabi frequencies, detunings, eigenvalues) is a
  dimensionless multiple of 1/T;
* hbar = 1, so the Schrodinger equation reads i d|phi>/dt = H(t)|phi>;
* basis ordering is (|1>, |2>, |3>) with |1> and |3> the two ground states
  and |2> the shared excited state.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .errors import InvalidParameterError, InvalidStateError

__all__ = [
    "FieldPoint",
    "Hamiltonian3",
    "EigenSystem",
    "QuantumState",
    "build_hamiltonian",
    "eigensystem",
    "eigenvalues_of_fields",
    "align_eigenvectors",
]

# Relative eigenvalue gap below which eigenvector continuity is unreliable.
DEGENERACY_GAP_RTOL = 1e-9

# Fall back to the cyclic-Jacobi path when the normalized discriminant of the
# characteristic cubic vanishes (1 - r^2 with r the trig-solver cosine), or
# when the relative gap is small enough that cross-product eigenvectors would
# lose the 1e-12 orthogonality contract.
_JACOBI_DISCRIMINANT_TOL = 1e-13
_JACOBI_GAP_RTOL = 1e-4


@dataclass(frozen=True)
class FieldPoint:
    """Instantaneous field parameters, all in units of 1/T.

    ``delta_1`` is the one-photon detuning (relative to the pump) and
    ``delta_2`` the two-photon detuning.  Rabi frequencies are real and
    non-negative by convention.
    """

    omega_p: float
    omega_s: float
    delta_1: float
    delta_2: float

    def __post_init__(self):
        vals = (self.omega_p, self.omega_s, self.delta_1, self.delta_2)
        if not all(math.isfinite(v) for v in vals):
            raise InvalidParameterError(f"field point entries must be finite, got {vals}")
        if self.omega_p < 0 or self.omega_s < 0:
            raise InvalidParameterError(
                f"Rabi frequencies must be non-negative, got "
                f"omega_p={self.omega_p}, omega_s={self.omega_s}"
            )


@dataclass(frozen=True, eq=False)
class Hamiltonian3:
    """Real symmetric 3x3 lambda-system Hamiltonian (units of 1/T).

    Layout: off-diagonals omega_p/2 and omega_s/2 on the two coupled bonds,
    diagonal (0, delta_1, delta_2), zero in the (1,3) corner.
    """

    m: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.m, dtype=float)
        if m.shape != (3, 3):
            raise InvalidParameterError(f"expected a 3x3 matrix, got shape {m.shape}")
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "m", m)

    @property
    def norm(self) -> float:
        """Frobenius norm, the scale used by all relative tolerances."""
        return float(np.linalg.norm(self.m))


@dataclass(frozen=True, eq=False)
class EigenSystem:
    """Ordered eigenvalues and orthonormal eigenvectors of a Hamiltonian3.

    ``omega_minus <= omega_0 <= omega_plus``; the eigenvectors are real unit
    vectors with a deterministic sign gauge (largest-magnitude component
    positive).  ``continuity_warning`` is set when a near-degenerate pair
    makes the eigenvector basis arbitrary within the degenerate subspace.
    """

    omega_minus: float
    omega_0: float
    omega_plus: float
    psi_minus: np.ndarray
    psi_0: np.ndarray
    psi_plus: np.ndarray
    continuity_warning: bool = False

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.array([self.omega_minus, self.omega_0, self.omega_plus])

    @property
    def vectors(self) -> np.ndarray:
        """Eigenvectors as columns, ordered (minus, 0, plus)."""
        return np.column_stack([self.psi_minus, self.psi_0, self.psi_plus])


@dataclass(frozen=True)
class QuantumState:
    """Three complex amplitudes in the bare basis."""

    c1: complex
    c2: complex
    c3: complex

    @property
    def norm_sq(self) -> float:
        return abs(self.c1) ** 2 + abs(self.c2) ** 2 + abs(self.c3) ** 2

    def as_array(self) -> np.ndarray:
        return np.array([self.c1, self.c2, self.c3], dtype=complex)

    def populations(self) -> tuple[float, float, float]:
        return (abs(self.c1) ** 2, abs(self.c2) ** 2, abs(self.c3) ** 2)

    def require_normalized(self, tol: float = 1e-9) -> None:
        if abs(self.norm_sq - 1.0) > tol:
            raise InvalidStateError(
                f"state norm^2 = {self.norm_sq!r} differs from 1 by more than {tol}"
            )

    @staticmethod
    def ground() -> "QuantumState":
        """The initially populated state |1>."""
        return QuantumState(1.0 + 0.0j, 0.0j, 0.0j)

    @staticmethod
    def basis(index: int) -> "QuantumState":
        c = [0.0j, 0.0j, 0.0j]
        c[index] = 1.0 + 0.0j
        return QuantumState(*c)


def build_hamiltonian(p: FieldPoint) -> Hamiltonian3:
    """Assemble the lambda-system Hamiltonian for one field point.

    The global factor 1/2 is applied, so the matrix is
    ``[[0, omega_p/2, 0], [omega_p/2, delta_1, omega_s/2], [0, omega_s/2, delta_2]]``.
    """
    m = np.array(
        [
            [0.0, 0.5 * p.omega_p, 0.0],
            [0.5 * p.omega_p, p.delta_1, 0.5 * p.omega_s],
            [0.0, 0.5 * p.omega_s, p.delta_2],
        ]
    )
    return Hamiltonian3(m)


def _sign_fix(v: np.ndarray) -> np.ndarray:
    """Deterministic gauge: make the largest-magnitude component positive."""
    i = int(np.argmax(np.abs(v)))
    return -v if v[i] < 0 else v


def _jacobi_eigensystem(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi diagonalization of a symmetric 3x3 matrix.

    Returns ascending eigenvalues and the matching orthonormal eigenvector
    columns.  Robust at (near-)degeneracy where the cross-product
    construction of eigenvectors breaks down.
    """
    m = a.astype(float).copy()
    v = np.eye(3)
    scale = np.linalg.norm(m)
    if scale == 0.0:
        return np.zeros(3), v
    for _ in range(64):
        off = math.sqrt(m[0, 1] ** 2 + m[0, 2] ** 2 + m[1, 2] ** 2)
        if off <= 1e-15 * scale:
            break
        for p, q in ((0, 1), (0, 2), (1, 2)):
            apq = m[p, q]
            if abs(apq) <= 1e-18 * scale:
                continue
            theta = (m[q, q] - m[p, p]) / (2.0 * apq)
            t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
            c = 1.0 / math.sqrt(t * t + 1.0)
            s = t * c
            rot = np.eye(3)
            rot[p, p] = rot[q, q] = c
            rot[p, q] = s
            rot[q, p] = -s
            m = rot.T @ m @ rot
            v = v @ rot
    w = np.diag(m).copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def _cubic_eigenvalues(a: np.ndarray) -> tuple[float, float, float, float]:
    """Trigonometric roots of the symmetric 3x3 characteristic cubic.

    Returns (w_minus, w_0, w_plus, disc) with ``disc = 1 - r^2``, the
    normalized discriminant that vanishes exactly at repeated roots.
    """
    p1 = a[0, 1] ** 2 + a[0, 2] ** 2 + a[1, 2] ** 2
    q = (a[0, 0] + a[1, 1] + a[2, 2]) / 3.0
    p2 = (a[0, 0] - q) ** 2 + (a[1, 1] - q) ** 2 + (a[2, 2] - q) ** 2 + 2.0 * p1
    if p2 == 0.0:
        return q, q, q, 0.0
    p = math.sqrt(p2 / 6.0)
    b = (a - q * np.eye(3)) / p
    r = float(np.linalg.det(b)) / 2.0
    r = min(1.0, max(-1.0, r))
    disc = 1.0 - r * r
    phi = math.acos(r) / 3.0
    w_plus = q + 2.0 * p * math.cos(phi)
    w_minus = q + 2.0 * p * math.cos(phi + 2.0 * math.pi / 3.0)
    w_0 = 3.0 * q - w_plus - w_minus
    return w_minus, w_0, w_plus, disc


def _null_vector(a: np.ndarray, w: float) -> np.ndarray:
    """Best cross-product estimate of the eigenvector of ``a`` for eigenvalue ``w``."""
    m = a - w * np.eye(3)
    candidates = (
        np.cross(m[0], m[1]),
        np.cross(m[0], m[2]),
        np.cross(m[1], m[2]),
    )
    norms = [np.dot(c, c) for c in candidates]
    v = candidates[int(np.argmax(norms))]
    n = math.sqrt(max(norms))
    if n == 0.0:
        raise FloatingPointError("degenerate eigenvector")  # caller falls back to Jacobi
    return v / n


def eigensystem(h: Hamiltonian3) -> EigenSystem:
    """Ordered eigen-decomposition with deterministic output.

    Uses the closed-form trigonometric solution of the characteristic cubic
    with cross-product eigenvectors, switching to cyclic Jacobi when the
    discriminant (or the relative eigenvalue gap) signals near-degeneracy.
    Degenerate inputs yield an arbitrary orthonormal basis of the degenerate
    subspace plus ``continuity_warning=True``; they never raise.
    """
    a = h.m
    if not np.all(np.isfinite(a)):
        raise InvalidParameterError("Hamiltonian entries must be finite")
    if not np.allclose(a, a.T, rtol=0.0, atol=1e-12 * max(1.0, h.norm)):
        raise InvalidParameterError("Hamiltonian must be symmetric")

    scale = h.norm
    w_minus, w_0, w_plus, disc = _cubic_eigenvalues(a)
    gap = min(w_0 - w_minus, w_plus - w_0)
    warning = gap <= DEGENERACY_GAP_RTOL * scale

    use_jacobi = disc < _JACOBI_DISCRIMINANT_TOL or gap <= _JACOBI_GAP_RTOL * scale
    if not use_jacobi:
        try:
            psi_plus = _null_vector(a, w_plus)
            psi_minus = _null_vector(a, w_minus)
        except FloatingPointError:
            use_jacobi = True
    if use_jacobi:
        w, v = _jacobi_eigensystem(a)
        w_minus, w_0, w_plus = (float(x) for x in w)
        psi_minus, psi_0, psi_plus = v[:, 0], v[:, 1], v[:, 2]
    else:
        # One Gram-Schmidt pass keeps the pair orthogonal to machine precision.
        psi_minus = psi_minus - np.dot(psi_plus, psi_minus) * psi_plus
        psi_minus = psi_minus / np.linalg.norm(psi_minus)
        psi_0 = np.cross(psi_plus, psi_minus)
        psi_0 = psi_0 / np.linalg.norm(psi_0)

    return EigenSystem(
        omega_minus=w_minus,
        omega_0=w_0,
        omega_plus=w_plus,
        psi_minus=_sign_fix(np.asarray(psi_minus, dtype=float)),
        psi_0=_sign_fix(np.asarray(psi_0, dtype=float)),
        psi_plus=_sign_fix(np.asarray(psi_plus, dtype=float)),
        continuity_warning=bool(warning),
    )


def eigenvalues_of_fields(
    omega_p: np.ndarray,
    omega_s: np.ndarray,
    delta_1: np.ndarray,
    delta_2: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized ordered eigenvalues for arrays of field samples.

    Same trigonometric formula as :func:`eigensystem`, evaluated elementwise;
    used to attach eigenvalue traces to whole schedules cheaply.
    """
    wp = np.asarray(omega_p, dtype=float)
    ws = np.asarray(omega_s, dtype=float)
    d1 = np.asarray(delta_1, dtype=float)
    d2 = np.asarray(delta_2, dtype=float)

    x = 0.5 * wp
    y = 0.5 * ws
    q = (d1 + d2) / 3.0
    a0 = -q
    a1 = d1 - q
    a2 = d2 - q
    p1 = x * x + y * y
    p2 = a0 * a0 + a1 * a1 + a2 * a2 + 2.0 * p1
    p = np.sqrt(p2 / 6.0)
    # det(A - q I) for the lambda sparsity pattern (zero (1,3) corner)
    det = a0 * (a1 * a2 - y * y) - x * x * a2
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(p > 0.0, det / (2.0 * p**3), 0.0)
    r = np.clip(r, -1.0, 1.0)
    phi = np.arccos(r) / 3.0
    w_plus = q + 2.0 * p * np.cos(phi)
    w_minus = q + 2.0 * p * np.cos(phi + 2.0 * np.pi / 3.0)
    w_0 = 3.0 * q - w_plus - w_minus
    return w_minus, w_0, w_plus


def align_eigenvectors(previous: EigenSystem, current: EigenSystem) -> EigenSystem:
    """Fix the sign gauge of ``current`` against ``previous``.

    Each eigenvector of ``current`` is flipped when its overlap with the
    matching eigenvector of ``previous`` is negative; eigenvalues are
    untouched.  A near-degenerate pair in either system is propagated as a
    continuity warning (and reported via ``warnings.warn``) because sign
    alignment alone cannot track a rotating degenerate subspace.
    """
    warning = previous.continuity_warning or current.continuity_warning
    if warning:
        warnings.warn(
            "eigenvector continuity is unreliable across a near-degenerate sample",
            RuntimeWarning,
            stacklevel=2,
        )
    pairs = []
    for prev_v, cur_v in (
        (previous.psi_minus, current.psi_minus),
        (previous.psi_0, current.psi_0),
        (previous.psi_plus, current.psi_plus),
    ):
        pairs.append(-cur_v if float(np.dot(prev_v, cur_v)) < 0.0 else cur_v)
    return replace(
        current,
        psi_minus=pairs[0],
        psi_0=pairs[1],
        psi_plus=pairs[2],
        continuity_warning=warning,
    )
