"""Density matrices: validation, random generation, purity and fidelity.

Random states are drawn with numpy's PCG64 generator (``default_rng``),
seeded explicitly per call, so every construction is reproducible from its
integer seed on any platform. Pure states come from normalized complex
Gaussian vectors (Haar distributed); mixed states from the Ginibre
quotient GG†/Tr(GG†).
"""

from __future__ import annotations

import numpy as np

from . import matcore
from .errors import (
    DimensionMismatch,
    InvalidDimension,
    InvalidRank,
    NotHermitian,
    NotPSD,
    NotPure,
    TraceNotOne,
)

#: default validation tolerance for DensityMatrix invariants
STATE_TOL = 1e-10


class DensityMatrix:
    """Validated quantum state: Hermitian, unit trace, PSD within ``tol``.

    The wrapped array is read-only; treat instances as immutable values.
    """

    __slots__ = ("_matrix",)

    def __init__(self, matrix, tol: float = STATE_TOL):
        a = matcore.as_matrix(matrix).copy()
        if not matcore.is_hermitian(a, tol):
            dev = np.linalg.norm(a - a.conj().T, "fro")
            raise NotHermitian(f"state not Hermitian: ||M - M†||_F = {dev:.3e} > {tol:.1e}")
        tr = complex(np.trace(a))
        if abs(tr - 1.0) > tol:
            raise TraceNotOne(f"trace = {tr:.12g}, |trace - 1| > {tol:.1e}")
        lo = float(matcore.hermitian_eig(a).eigenvalues[-1])
        if lo < -tol:
            raise NotPSD(f"smallest eigenvalue {lo:.3e} < -{tol:.1e}")
        a.flags.writeable = False
        self._matrix = a

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def dim(self) -> int:
        return self._matrix.shape[0]

    def __repr__(self) -> str:  # pragma: no cover
        return f"DensityMatrix(dim={self.dim})"


def validate_state(m, tol: float) -> DensityMatrix:
    """Check Hermiticity, unit trace and positivity; return the validated wrapper.

    Raises NotHermitian, TraceNotOne or NotPSD naming the violated bound.
    """
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    return DensityMatrix(m, tol=tol)


def random_pure_state(d: int, seed: int) -> DensityMatrix:
    """Haar-random rank-1 state |ψ⟩⟨ψ| of dimension d."""
    if d < 2:
        raise InvalidDimension(f"pure states need d >= 2, got {d}")
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    v /= np.linalg.norm(v)
    return DensityMatrix(np.outer(v, v.conj()))


def random_state_vector(d: int, seed: int) -> np.ndarray:
    """Haar-random unit vector of dimension d (the ket behind random_pure_state)."""
    if d < 2:
        raise InvalidDimension(f"state vectors need d >= 2, got {d}")
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def random_mixed_state(d: int, r: int, seed: int) -> DensityMatrix:
    """Random rank-r state from the Ginibre quotient GG†/Tr(GG†), G complex d×r."""
    if d < 1:
        raise InvalidDimension(f"d must be >= 1, got {d}")
    if not 1 <= r <= d:
        raise InvalidRank(f"rank must satisfy 1 <= r <= {d}, got {r}")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((d, r)) + 1j * rng.standard_normal((d, r))
    m = g @ g.conj().T
    m = matcore.hermitianize(m / np.trace(m).real)
    return DensityMatrix(m)


def random_intermediate(d: int, seed: int, scale: float = 1.0) -> np.ndarray:
    """Random Hermitian unit-trace matrix, not necessarily PSD.

    Useful as a generic iterate for exercising the imposition operator off
    the PSD cone.
    """
    rng = np.random.default_rng(seed)
    h = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    h = matcore.hermitianize(h) * scale
    h -= np.eye(d) * ((np.trace(h).real - 1.0) / d)
    return h


def purity(rho: DensityMatrix) -> float:
    """Tr(ρ²), in [1/d, 1]."""
    m = matcore.as_matrix(rho)
    return float(np.trace(m @ m).real)


def fidelity_to_pure(rho: DensityMatrix, psi: DensityMatrix) -> float:
    """Tr(ρ ψ) for a pure target ψ, i.e. ⟨ψ|ρ|ψ⟩."""
    if abs(purity(psi) - 1.0) > 1e-8:
        raise NotPure(f"target purity {purity(psi):.12g} differs from 1 by more than 1e-8")
    a = matcore.as_matrix(rho)
    b = matcore.as_matrix(psi)
    if a.shape != b.shape:
        raise DimensionMismatch(f"state dims differ: {a.shape[0]} vs {b.shape[0]}")
    return float(np.trace(a @ b).real)


def state_to_json(rho) -> dict:
    """Matrix JSON plus a ``"kind": "density"`` tag."""
    obj = matcore.matrix_to_json(rho)
    obj["kind"] = "density"
    return obj


def state_from_json(obj: dict, tol: float = 1e-9) -> DensityMatrix:
    """Decode and validate a serialized density matrix."""
    if obj.get("kind") != "density":
        raise ValueError(f'expected "kind": "density", got {obj.get("kind")!r}')
    return validate_state(matcore.matrix_from_json(obj), tol=tol)
