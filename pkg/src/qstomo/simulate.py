"""Measurement simulation: Born probabilities, finite-shot sampling, prep noise.

Noise enters through two channels only: multinomial counting statistics
(measurement side) and depolarization (preparation side).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import matcore
from .errors import DimensionMismatch, InvalidEpsilon, NegativeProbability
from .observables import Observable, ObservableSet, observable_from_json, observable_to_json
from .states import DensityMatrix


@dataclass(frozen=True, eq=False)
class MeasurementRecord:
    """One observable together with the outcome distribution attributed to it.

    shots is None for exact Born probabilities; otherwise the positive
    integer count behind the empirical frequencies.
    """

    observable: Observable
    probabilities: np.ndarray
    shots: int | None = None

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=float).copy()
        if p.shape != (self.observable.dim,):
            raise DimensionMismatch(
                f"record needs {self.observable.dim} probabilities, got shape {p.shape}"
            )
        if np.any(p < -1e-12) or abs(p.sum() - 1.0) > 1e-12:
            raise NegativeProbability(
                f"record probabilities invalid (min {p.min():.3e}, sum {p.sum():.15f})"
            )
        p = np.clip(p, 0.0, None)
        p.flags.writeable = False
        object.__setattr__(self, "probabilities", p)
        if self.shots is not None and int(self.shots) < 1:
            raise ValueError(f"shots must be a positive integer, got {self.shots}")

    @property
    def dim(self) -> int:
        return self.observable.dim


def born_probabilities(rho, obs: Observable) -> np.ndarray:
    """Outcome distribution p_j = Re (U† rho U)_jj for the observable's basis U.

    Entries down to -1e-12 are clamped to zero (eigenbasis round-off);
    anything more negative means the input was not a state and raises.
    The sum is renormalized when it drifts from 1 by more than 1e-14.
    """
    m = matcore.as_matrix(rho)
    if m.shape[0] != obs.dim:
        raise DimensionMismatch(f"state dim {m.shape[0]} vs observable dim {obs.dim}")
    u = obs.basis
    p = np.einsum("ij,jk,ik->i", u.conj().T, m, u.T).real
    if np.any(p < -1e-12):
        raise NegativeProbability(
            f"negative outcome probability {p.min():.3e} (input not a state?)"
        )
    p = np.clip(p, 0.0, None)
    s = p.sum()
    if abs(s - 1.0) > 1e-14:
        p = p / s
    return p


def sample_record(rho, obs: Observable, shots: int, seed: int) -> MeasurementRecord:
    """Empirical frequencies of ``shots`` multinomial draws from the Born distribution."""
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    p = born_probabilities(rho, obs)
    rng = np.random.default_rng(seed)
    counts = rng.multinomial(shots, p)
    return MeasurementRecord(obs, counts / shots, shots=int(shots))


def depolarize(rho: DensityMatrix, epsilon: float) -> DensityMatrix:
    """Preparation error model: (1 - eps) * rho + eps * I/d."""
    if not 0.0 <= epsilon <= 1.0:
        raise InvalidEpsilon(f"epsilon must lie in [0, 1], got {epsilon}")
    m = matcore.as_matrix(rho)
    d = m.shape[0]
    return DensityMatrix((1.0 - epsilon) * m + epsilon * np.eye(d) / d)


def record_set(rho, oset: ObservableSet, shots: int | None = None, seed: int = 0):
    """One record per observable, in set order.

    Exact Born probabilities when shots is None. In sampled mode each
    observable gets an independent substream spawned from ``seed``, so the
    full record list is reproducible and order-independent noise-wise.
    """
    m = matcore.as_matrix(rho)
    if m.shape[0] != oset.dim:
        raise DimensionMismatch(f"state dim {m.shape[0]} vs observable dim {oset.dim}")
    if shots is None:
        return [MeasurementRecord(obs, born_probabilities(rho, obs)) for obs in oset]
    child_seeds = np.random.SeedSequence(seed).generate_state(len(oset), dtype=np.uint64)
    return [
        sample_record(rho, obs, shots, int(child_seeds[i]))
        for i, obs in enumerate(oset)
    ]


def record_to_json(rec: MeasurementRecord) -> dict:
    return {
        "observable": observable_to_json(rec.observable),
        "p": rec.probabilities.tolist(),
        "shots": rec.shots,
    }


def record_from_json(obj: dict) -> MeasurementRecord:
    obs = observable_from_json(obj["observable"])
    shots = obj.get("shots")
    return MeasurementRecord(obs, np.asarray(obj["p"], dtype=float),
                             shots=None if shots is None else int(shots))


def records_to_json(records) -> list:
    """A record file is a JSON array of records."""
    return [record_to_json(r) for r in records]


def records_from_json(arr) -> list:
    return [record_from_json(obj) for obj in arr]
