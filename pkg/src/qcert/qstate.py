"""Exact 2x2 linear algebra for qubit states and two-outcome measurements.

States are plain ``numpy`` arrays: a density matrix is a 2x2 complex array,
a Bloch vector a length-3 real array.  Validation helpers raise
:class:`~qcert.exceptions.InvalidStateError` instead of silently producing
garbage; all tolerances are the module constants below.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidStateError, ZeroProbabilityOutcomeError

# Entrywise tolerance for state invariants (hermiticity, trace, eigenvalues).
ATOL_STATE = 1e-12
# Looser tolerance for probability sums and norm checks on sampled data.
ATOL_PROB = 1e-9

IDENTITY = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)

for _m in (IDENTITY, SIGMA_X, SIGMA_Y, SIGMA_Z):
    _m.setflags(write=False)


def validate_density_matrix(rho: np.ndarray, atol: float = ATOL_STATE) -> np.ndarray:
    """Check hermiticity, unit trace and positivity; return the array as complex.

    Eigenvalues in ``[-atol, 0)`` are tolerated (fixed-precision arithmetic
    produces tiny negatives); anything below ``-atol`` is rejected.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise InvalidStateError(f"expected a 2x2 matrix, got shape {rho.shape}")
    if not np.allclose(rho, rho.conj().T, atol=atol, rtol=0):
        raise InvalidStateError("matrix is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > atol or abs(np.trace(rho).imag) > atol:
        raise InvalidStateError(f"trace is {np.trace(rho)}, expected 1")
    eigvals = np.linalg.eigvalsh(rho)
    if eigvals.min() < -atol:
        raise InvalidStateError(f"negative eigenvalue {eigvals.min()}")
    return rho


def clamped_eigh(rho: np.ndarray, atol: float = ATOL_STATE):
    """Spectral decomposition with eigenvalues in ``[-atol, 0)`` clamped to 0.

    Returns ``(eigenvalues, eigenvectors)`` as :func:`numpy.linalg.eigh` does.
    """
    vals, vecs = np.linalg.eigh(rho)
    if vals.min() < -atol:
        raise InvalidStateError(f"negative eigenvalue {vals.min()}")
    return np.maximum(vals, 0.0), vecs


def pure_state_bloch(alpha: float, beta: float) -> np.ndarray:
    """Bloch vector of the pure state parametrized by polar/azimuthal angles."""
    return np.array(
        [np.sin(alpha) * np.cos(beta), np.sin(alpha) * np.sin(beta), np.cos(alpha)]
    )


def bloch_to_density(r: np.ndarray) -> np.ndarray:
    """Map a Bloch vector to the density matrix ``(I + r.sigma)/2``."""
    r = np.asarray(r, dtype=float)
    norm = np.linalg.norm(r)
    if norm > 1.0 + ATOL_STATE:
        raise InvalidStateError(f"Bloch vector norm {norm} exceeds 1")
    return 0.5 * (IDENTITY + r[0] * SIGMA_X + r[1] * SIGMA_Y + r[2] * SIGMA_Z)


def density_to_bloch(rho: np.ndarray) -> np.ndarray:
    """Inverse of :func:`bloch_to_density`: ``r_i = tr(rho sigma_i)``."""
    rho = validate_density_matrix(rho)
    return np.array([np.trace(rho @ s).real for s in PAULIS])


@dataclass(frozen=True)
class PovmElement:
    """One element of a two-outcome POVM, tagged with its outcome label."""

    matrix: np.ndarray
    label: str

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if not np.allclose(m, m.conj().T, atol=ATOL_STATE, rtol=0):
            raise InvalidStateError("POVM element is not Hermitian")
        vals = np.linalg.eigvalsh(m)
        if vals.min() < -ATOL_STATE or vals.max() > 1.0 + ATOL_STATE:
            raise InvalidStateError(f"POVM eigenvalues {vals} outside [0, 1]")
        object.__setattr__(self, "matrix", m)


def projector_pair(axis: np.ndarray, labels: tuple[str, str] = ("+", "-")):
    """Two-element projective POVM ``(I ± axis.sigma)/2`` along a unit axis."""
    axis = np.asarray(axis, dtype=float)
    norm = np.linalg.norm(axis)
    if abs(norm - 1.0) > ATOL_PROB:
        raise InvalidStateError(f"measurement axis has norm {norm}, expected 1")
    op = axis[0] * SIGMA_X + axis[1] * SIGMA_Y + axis[2] * SIGMA_Z
    return (
        PovmElement(0.5 * (IDENTITY + op), labels[0]),
        PovmElement(0.5 * (IDENTITY - op), labels[1]),
    )


def born_probability(element: PovmElement, rho: np.ndarray) -> float:
    """Born-rule probability ``tr(E rho)``, clamped to [0, 1]."""
    rho = validate_density_matrix(rho)
    p = np.trace(element.matrix @ rho).real
    return float(min(max(p, 0.0), 1.0))


def measurement_update(element: PovmElement, rho: np.ndarray):
    """Projective update ``(p, M rho M^dag / p)`` for a projector element.

    Raises :class:`ZeroProbabilityOutcomeError` when the outcome probability
    is at or below 1e-15, where the conditional state is undefined.
    """
    p = born_probability(element, rho)
    if p <= 1e-15:
        raise ZeroProbabilityOutcomeError(f"outcome '{element.label}' has probability {p}")
    m = element.matrix
    post = m @ rho @ m.conj().T / p
    # renormalize away roundoff so chained updates stay valid
    post = 0.5 * (post + post.conj().T)
    post = post / np.trace(post).real
    return p, post
