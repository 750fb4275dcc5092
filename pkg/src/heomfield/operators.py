"""Spin-1/2 operator algebra and Liouville-space building blocks.

Basis ordering is fixed package wide: index 0 is the excited state, index 1
the ground state.  Density matrices are vectorized by column-major stacking,

    vec(rho) = (rho[0, 0], rho[1, 0], rho[0, 1], rho[1, 1]),

and every 4x4 superoperator in the package acts on that layout.  With this
convention ``vec(A rho B) = kron(B.T, A) vec(rho)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np


def _constant(values) -> np.ndarray:
    arr = np.array(values, dtype=complex)
    arr.setflags(write=False)
    return arr


#: Projection of the pseudo-spin onto the quantization axis, diag(1/2, -1/2).
J0 = _constant([[0.5, 0.0], [0.0, -0.5]])
#: Raising operator, maps the ground state onto the excited state.
JPLUS = _constant([[0.0, 1.0], [0.0, 0.0]])
#: Lowering operator, adjoint of :data:`JPLUS`.
JMINUS = _constant([[0.0, 0.0], [1.0, 0.0]])
IDENTITY = _constant([[1.0, 0.0], [0.0, 1.0]])


@dataclass(frozen=True)
class TlsBasis:
    """Bundle of the two-level operators used throughout the package."""

    j0: np.ndarray
    jplus: np.ndarray
    jminus: np.ndarray
    identity: np.ndarray


def tls_basis() -> TlsBasis:
    """Return the fixed spin-1/2 operator basis."""
    return TlsBasis(j0=J0, jplus=JPLUS, jminus=JMINUS, identity=IDENTITY)


class CouplingMode(enum.Enum):
    """How the system couples to the bosonic bath.

    FULL keeps the counter-rotating terms, both bath branches couple through
    J+ + J-.  RWA drops them, the branches couple through J- and J+.
    """

    FULL = "full"
    RWA = "rwa"


def coupling_ops(mode: CouplingMode) -> tuple[np.ndarray, np.ndarray]:
    """Return the pair of system operators (c1, c2) for the bath coupling."""
    if mode is CouplingMode.FULL:
        c = JPLUS + JMINUS
        return c, c.copy()
    if mode is CouplingMode.RWA:
        return JMINUS.copy(), JPLUS.copy()
    raise ValueError(f"unknown coupling mode: {mode!r}")


def vec(rho: np.ndarray) -> np.ndarray:
    """Column-major vectorization of a 2x2 matrix."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {rho.shape}")
    return rho.reshape(4, order="F").copy()


def unvec(v: np.ndarray) -> np.ndarray:
    """Inverse of :func:`vec`."""
    v = np.asarray(v, dtype=complex)
    if v.shape != (4,):
        raise ValueError(f"expected a length-4 vector, got shape {v.shape}")
    return v.reshape((2, 2), order="F").copy()


def left_super(a: np.ndarray) -> np.ndarray:
    """Superoperator for left multiplication, rho -> a rho."""
    return np.kron(IDENTITY, np.asarray(a, dtype=complex))


def right_super(b: np.ndarray) -> np.ndarray:
    """Superoperator for right multiplication, rho -> rho b."""
    return np.kron(np.asarray(b, dtype=complex).T, IDENTITY)


def commutator_super(a: np.ndarray) -> np.ndarray:
    """Superoperator for the commutator, rho -> a rho - rho a."""
    return left_super(a) - right_super(a)


def excited_state() -> np.ndarray:
    """Density matrix of the excited state."""
    return np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)


def ground_state() -> np.ndarray:
    """Density matrix of the ground state."""
    return np.array([[0.0, 0.0], [0.0, 1.0]], dtype=complex)


def plus_state() -> np.ndarray:
    """Equal superposition with maximal coherence, handy for dephasing tests."""
    return np.full((2, 2), 0.5, dtype=complex)


def maximally_mixed_state() -> np.ndarray:
    """The infinite-temperature state, identity over two."""
    return np.array([[0.5, 0.0], [0.0, 0.5]], dtype=complex)


def check_density_matrix(rho: np.ndarray, *, tol: float = 1e-9) -> np.ndarray:
    """Validate hermiticity, unit trace and positivity of a 2x2 state.

    Returns the array cast to complex on success, raises ValueError with the
    violated property otherwise.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise ValueError(f"density matrix must be 2x2, got shape {rho.shape}")
    if not np.all(np.isfinite(rho)):
        raise ValueError("density matrix contains non-finite entries")
    herm = np.max(np.abs(rho - rho.conj().T))
    if herm > tol:
        raise ValueError(f"density matrix not hermitian, defect {herm:.3e}")
    tr = rho[0, 0] + rho[1, 1]
    if abs(tr - 1.0) > tol:
        raise ValueError(f"density matrix trace is {tr:.6g}, expected 1")
    eigs = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    if eigs.min() < -tol:
        raise ValueError(f"density matrix has negative eigenvalue {eigs.min():.3e}")
    return rho
