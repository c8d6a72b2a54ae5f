"""Dense complex-matrix kernel shared by every other module.

Matrices are plain ``numpy.ndarray`` of complex128. This module adds the
validation, norms and the Hermitian eigendecomposition the reconstruction
needs, plus the JSON matrix format used by all file I/O.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NoConvergence, NotHermitian

#: relative Frobenius tolerance used for Hermiticity checks
HERMITIAN_TOL = 1e-10


def as_matrix(m) -> np.ndarray:
    """Validate and return ``m`` as a square complex matrix with finite entries."""
    a = np.asarray(getattr(m, "matrix", m), dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
        raise ValueError("matrix entries must be finite (no NaN/Inf)")
    return a


def frobenius_norm(m) -> float:
    """sqrt(sum |m_ij|^2); zero iff m == 0."""
    return float(np.linalg.norm(as_matrix(m), "fro"))


def hermitianize(m: np.ndarray) -> np.ndarray:
    """Return the Hermitian part (m + m†)/2."""
    return (m + m.conj().T) / 2


def is_hermitian(m, tol: float = HERMITIAN_TOL) -> bool:
    """True iff ||m - m†||_F <= tol * max(1, ||m||_F)."""
    a = as_matrix(m)
    return np.linalg.norm(a - a.conj().T, "fro") <= tol * max(1.0, np.linalg.norm(a, "fro"))


def is_unitary(m, tol: float) -> bool:
    """True iff ||m† m - I||_F <= tol."""
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    a = as_matrix(m)
    gram = a.conj().T @ a
    return np.linalg.norm(gram - np.eye(a.shape[0]), "fro") <= tol


@dataclass(frozen=True)
class EigenDecomposition:
    """Spectrum of a Hermitian matrix.

    ``eigenvalues`` is real and sorted non-increasing; column k of
    ``eigenvectors`` is the eigenvector for ``eigenvalues[k]``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def hermitian_eig(m) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix, eigenvalues sorted non-increasing.

    Raises NotHermitian when the input fails the Hermiticity check, and
    NoConvergence if the underlying iterative diagonalization gives up.
    """
    a = as_matrix(m)
    if not is_hermitian(a):
        dev = np.linalg.norm(a - a.conj().T, "fro")
        raise NotHermitian(
            f"||M - M†||_F = {dev:.3e} exceeds {HERMITIAN_TOL:.0e} * max(1, ||M||_F)"
        )
    try:
        w, v = np.linalg.eigh(hermitianize(a))
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(f"eigendecomposition did not converge: {exc}") from exc
    # eigh returns ascending order; flip to non-increasing
    return EigenDecomposition(w[::-1].copy(), np.ascontiguousarray(v[:, ::-1]))


def diag_extract(m) -> np.ndarray:
    """Main diagonal of a matrix, as a copy."""
    return np.diagonal(as_matrix(m)).copy()


def diag_embed(v) -> np.ndarray:
    """Square matrix with ``v`` on the diagonal and zeros elsewhere."""
    return np.diag(np.asarray(v, dtype=complex))


def matrix_to_json(m) -> dict:
    """Encode a matrix as ``{"dim": d, "re": [[...]], "im": [[...]]}`` (row-major)."""
    a = as_matrix(m)
    return {"dim": a.shape[0], "re": a.real.tolist(), "im": a.imag.tolist()}


def matrix_from_json(obj: dict) -> np.ndarray:
    """Decode the JSON matrix format produced by :func:`matrix_to_json`."""
    try:
        d = int(obj["dim"])
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj["im"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed matrix JSON: {exc}") from exc
    if re.shape != (d, d) or im.shape != (d, d):
        raise DimensionMismatch(
            f"matrix JSON claims dim {d} but carries shapes {re.shape} / {im.shape}"
        )
    return as_matrix(re + 1j * im)
