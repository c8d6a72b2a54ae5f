"""Distances used for convergence tests and accuracy reporting.

Probability-space distances (Hellinger, and its aggregate over a set of
measurement records) drive the stopping rule; the Hilbert-Schmidt distance
compares reconstructed and reference states.
"""

from __future__ import annotations

import numpy as np

from . import matcore
from .errors import LengthMismatch, NotAProbabilityVector

PROB_TOL = 1e-9


def _check_prob_vector(p: np.ndarray, name: str) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.ndim != 1:
        raise NotAProbabilityVector(f"{name} must be a 1-d vector, got ndim={p.ndim}")
    if np.any(p < -PROB_TOL) or abs(p.sum() - 1.0) > PROB_TOL:
        raise NotAProbabilityVector(
            f"{name} not a probability vector (min {p.min():.3e}, sum {p.sum():.12f})"
        )
    p = np.clip(p, 0.0, None)
    return p / p.sum()


def hellinger(p, q) -> float:
    """Hellinger distance sqrt(2 - 2 * sum_i sqrt(p_i q_i)).

    Ranges from 0 (equal) to sqrt(2) (disjoint support). Entries may be
    off by up to 1e-9 from exact normalization; worse input raises.
    """
    p = _check_prob_vector(p, "p")
    q = _check_prob_vector(q, "q")
    if p.shape != q.shape:
        raise LengthMismatch(f"length mismatch: {p.shape[0]} vs {q.shape[0]}")
    # For normalized p, q the defining form 2 - 2*sum(sqrt(pq)) equals
    # sum((sqrt(p) - sqrt(q))^2); the latter keeps full precision near
    # p = q, where the former cancels to machine epsilon.
    return float(np.linalg.norm(np.sqrt(p) - np.sqrt(q)))


def distributional(ps, qs) -> float:
    """Root mean square of Hellinger distances over paired distributions.

    ps and qs are equal-length sequences of probability vectors; pair i is
    compared with ``hellinger``. This is the convergence figure of merit:
    zero exactly when every pair matches.
    """
    ps = list(ps)
    qs = list(qs)
    if len(ps) != len(qs):
        raise LengthMismatch(f"got {len(ps)} vs {len(qs)} distributions")
    if not ps:
        raise LengthMismatch("need at least one distribution pair")
    total = 0.0
    for p, q in zip(ps, qs):
        total += hellinger(p, q) ** 2
    return float(np.sqrt(total / len(ps)))


def hs_distance(a, b) -> float:
    """Hilbert-Schmidt (Frobenius) distance ||A - B||_F between two matrices."""
    a = matcore.as_matrix(a)
    b = matcore.as_matrix(b)
    if a.shape != b.shape:
        raise LengthMismatch(f"shape mismatch: {a.shape} vs {b.shape}")
    return matcore.frobenius_norm(a - b)
