"""Reference estimator: least-squares inversion of the Born constraints.

Serves as an independent correctness oracle for the iterative
reconstruction and as its timing counterpart. The Born rule is linear in
the state, so with H = I/d + sum_a x_a G_a over an orthonormal traceless
Hermitian generator basis, each recorded outcome contributes one linear
equation in x. The minimum-norm least-squares solution is then projected
onto the PSD cone.
"""

from __future__ import annotations

import numpy as np

from . import matcore
from .errors import AllNonPositive, DimensionMismatch
from .states import DensityMatrix


def gell_mann_basis(d: int) -> np.ndarray:
    """The d^2 - 1 generalized Gell-Mann generators, shape (d^2-1, d, d).

    Traceless, Hermitian, orthonormal under the Hilbert-Schmidt inner
    product: Tr(G_a G_b) = delta_ab. Ordering: symmetric pairs, then
    antisymmetric pairs (both j < k row-major), then the d-1 diagonal
    generators.
    """
    if d < 2:
        raise ValueError(f"generator basis needs d >= 2, got {d}")
    gens = []
    for j in range(d):
        for k in range(j + 1, d):
            g = np.zeros((d, d), dtype=complex)
            g[j, k] = g[k, j] = 1.0 / np.sqrt(2.0)
            gens.append(g)
    for j in range(d):
        for k in range(j + 1, d):
            g = np.zeros((d, d), dtype=complex)
            g[j, k] = -1j / np.sqrt(2.0)
            g[k, j] = 1j / np.sqrt(2.0)
            gens.append(g)
    for l in range(1, d):
        g = np.zeros((d, d), dtype=complex)
        g[np.arange(l), np.arange(l)] = 1.0
        g[l, l] = -l
        gens.append(g / np.sqrt(l * (l + 1)))
    return np.array(gens)


def linear_inversion(records) -> np.ndarray:
    """Minimum-norm Hermitian unit-trace solution of the recorded constraints.

    Returns the H = I/d + sum_a x_a G_a minimizing the squared residual of
    Tr(H Pi_j) = p_j over all records and outcomes; among minimizers, the
    one of least Frobenius norm (pseudo-inverse semantics). H need not be
    positive semidefinite.
    """
    records = list(records)
    if not records:
        raise ValueError("need at least one measurement record")
    d = records[0].dim
    if any(rec.dim != d for rec in records):
        raise DimensionMismatch("records mix dimensions")
    gens = gell_mann_basis(d)
    rows = []
    rhs = []
    for rec in records:
        u = rec.observable.basis
        # row (j, a) = u_j† G_a u_j; build all outcomes of the record at once
        m = np.einsum("aij,jk->aik", gens, u)
        rows.append(np.einsum("ik,aik->ka", u.conj(), m).real)
        rhs.append(rec.probabilities - 1.0 / d)
    a = np.vstack(rows)
    b = np.concatenate(rhs)
    x, *_ = np.linalg.lstsq(a, b, rcond=None)
    h = np.eye(d, dtype=complex) / d + np.tensordot(x, gens, axes=1)
    return matcore.hermitianize(h)


def psd_project(h) -> DensityMatrix:
    """Nearest-spectrum density matrix: clip negative eigenvalues, renormalize."""
    m = matcore.as_matrix(h)
    eig = matcore.hermitian_eig(m)
    lam = np.clip(eig.eigenvalues, 0.0, None)
    total = lam.sum()
    if total <= 1e-12:
        raise AllNonPositive(f"clipped spectrum sums to {total:.3e}")
    v = eig.eigenvectors
    out = (v * (lam / total)) @ v.conj().T
    return DensityMatrix(matcore.hermitianize(out))


def baseline_estimate(records) -> DensityMatrix:
    """psd_project(linear_inversion(records)): the full reference pipeline."""
    return psd_project(linear_inversion(records))
