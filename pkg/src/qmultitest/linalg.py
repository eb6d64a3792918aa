"""Dense Hermitian matrix kernel.

Everything downstream (states, detectors, exponent estimates) is built on
the spectral calculus in this module: eigendecomposition, positive parts,
supports, fractional powers and square roots of positive semidefinite
matrices, and trace utilities.

Conventions fixed here and relied on elsewhere:

* Eigenvalues at or below ``eig_floor(A) = 1e-12 * max |eigenvalue|`` are
  treated as exact zeros by ``matrix_power`` and ``support_projection``.
* ``matrix_power(A, 0)`` is the support projection of ``A`` (``0**0 := 0``).
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import HermiticityViolation, PSDViolation

TOL_HERM = 1e-10
TOL_PSD = 1e-10
EIG_FLOOR_REL = 1e-12


class HermitianEig(NamedTuple):
    """Spectral decomposition: ascending eigenvalues, orthonormal columns."""

    values: np.ndarray
    vectors: np.ndarray


def as_matrix(a) -> np.ndarray:
    """Coerce input to a 2-d complex128 array."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise HermiticityViolation(f"expected a 2-d matrix, got ndim={m.ndim}")
    return m


def check_hermitian(a, tol: float = TOL_HERM) -> np.ndarray:
    """Return ``a`` as a complex matrix, raising unless it is square and
    self-adjoint within ``tol * (1 + max |entry|)``."""
    m = as_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise HermiticityViolation(f"matrix is not square: shape {m.shape}")
    scale = 1.0 + (np.max(np.abs(m)) if m.size else 0.0)
    defect = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
    if defect > tol * scale:
        raise HermiticityViolation(
            f"matrix is not Hermitian: max |A - A^dag| = {defect:.3e}"
        )
    return m


def eigh(h) -> HermitianEig:
    """Eigendecomposition of a Hermitian matrix.

    Returns eigenvalues in ascending order and matching orthonormal
    eigenvectors as columns, so ``V @ diag(w) @ V^dag`` reconstructs the
    input.
    """
    m = check_hermitian(h)
    w, v = np.linalg.eigh(m)
    return HermitianEig(w, v)


def eigvalsh(h) -> np.ndarray:
    """Ascending eigenvalues of a Hermitian matrix (no eigenvectors)."""
    m = check_hermitian(h)
    return np.linalg.eigvalsh(m)


def eig_floor(values: np.ndarray) -> float:
    """Relative threshold below which eigenvalues count as zero."""
    if values.size == 0:
        return 0.0
    return EIG_FLOOR_REL * float(np.max(np.abs(values)))


def _check_psd(values: np.ndarray, tol: float = TOL_PSD) -> None:
    if values.size and float(values[0]) < -tol:
        raise PSDViolation(f"matrix has negative eigenvalue {values[0]:.3e}")


def _reconstruct(vectors: np.ndarray, diag: np.ndarray) -> np.ndarray:
    out = (vectors * diag) @ vectors.conj().T
    return (out + out.conj().T) / 2.0


def matrix_power(a, s: float) -> np.ndarray:
    """Fractional power ``A**s`` of a PSD matrix, ``s >= 0``.

    Eigenvalues at or below the floor are sent to zero for every ``s``,
    so ``s = 0`` yields the support projection rather than the identity.
    """
    if s < 0:
        raise ValueError(f"exponent must be nonnegative, got {s}")
    w, v = eigh(a)
    _check_psd(w)
    floor = eig_floor(w)
    powered = np.zeros_like(w)
    keep = w > floor
    powered[keep] = w[keep] ** s
    return _reconstruct(v, powered)


def positive_part(a) -> np.ndarray:
    """Zero out the negative eigenvalues of a Hermitian matrix."""
    w, v = eigh(a)
    return _reconstruct(v, np.maximum(w, 0.0))


def support_projection(a) -> np.ndarray:
    """Orthogonal projector onto the range of a PSD matrix."""
    w, v = eigh(a)
    _check_psd(w)
    keep = (w > eig_floor(w)).astype(np.float64)
    return _reconstruct(v, keep)


def sqrt_psd(a) -> np.ndarray:
    """PSD square root: returns B with ``B @ B = A``."""
    w, v = eigh(a)
    _check_psd(w)
    return _reconstruct(v, np.sqrt(np.clip(w, 0.0, None)))


def kron(a, b) -> np.ndarray:
    """Kronecker product (dimensions multiply)."""
    return np.kron(as_matrix(a), as_matrix(b))


def trace_norm(a) -> float:
    """Sum of absolute eigenvalues of a Hermitian matrix."""
    return float(np.sum(np.abs(eigvalsh(a))))


def trace_product(a: np.ndarray, b: np.ndarray) -> complex:
    """``tr[A B]`` in O(d^2) without forming the product."""
    return complex(np.sum(a * b.T))


def real_scalar(z, tol: float = 1e-9) -> float:
    """Discard an imaginary residue after asserting it is negligible.

    All physically meaningful traces in this package are real; a large
    residue signals a kernel bug and raises rather than being silenced.
    """
    z = complex(z)
    if abs(z.imag) > tol:
        raise ArithmeticError(f"imaginary residue {z.imag:.3e} exceeds {tol:.1e}")
    return z.real
