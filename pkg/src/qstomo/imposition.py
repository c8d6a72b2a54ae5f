"""Iterative reconstruction by imposing measured statistics on a trial state.

The elementary move rotates the iterate into the eigenbasis of one measured
observable, overwrites the diagonal there with the recorded probabilities,
and rotates back. Off-diagonal entries in that basis are untouched, so the
move is the identity on anything already consistent with the record. One
sweep applies the move for every record in order; reconstruction repeats
sweeps until the iterate reproduces all records (distributional tolerance),
stalls (step tolerance), or runs out of budget.

Intermediate iterates are Hermitian with unit trace but need not be
positive semidefinite; positivity is restored at the end, optionally, by
spectral clipping.
"""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import matcore, metrics, states
from .baseline import psd_project
from .errors import (
    DimensionMismatch,
    NonPositiveTruncation,
    NotAProbabilityVector,
    NotHermitian,
    NotPSD,
    NotPure,
    RankDegenerate,
    TraceNotOne,
)
from .observables import Observable
from .simulate import MeasurementRecord

DEFAULT_MAX_SWEEPS = 10_000
DEFAULT_TOL_DISTRIBUTIONAL = 1e-10
DEFAULT_TOL_STEP = 1e-12


class StopReason(Enum):
    DISTRIBUTIONAL_TOL = "DistributionalTol"
    STEP_TOL = "StepTol"
    MAX_SWEEPS = "MaxSweeps"


@dataclass(frozen=True)
class IterationConfig:
    """Stopping rules and options for ``reconstruct``.

    Either tolerance may be None to disable that rule, but not both.
    rank, when set, truncates the iterate spectrum after every imposition.
    """

    max_sweeps: int = DEFAULT_MAX_SWEEPS
    tol_distributional: float | None = DEFAULT_TOL_DISTRIBUTIONAL
    tol_step: float | None = DEFAULT_TOL_STEP
    rank: int | None = None
    final_psd_projection: bool = False

    def __post_init__(self):
        if self.max_sweeps < 1:
            raise ValueError(f"max_sweeps must be >= 1, got {self.max_sweeps}")
        if self.tol_distributional is None and self.tol_step is None:
            raise ValueError("at least one tolerance-based stopping rule must be active")
        for name in ("tol_distributional", "tol_step"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise ValueError(f"{name} must be positive, got {v}")
        if self.rank is not None and self.rank < 1:
            raise ValueError(f"rank must be >= 1, got {self.rank}")


@dataclass(frozen=True)
class TraceRow:
    sweep: int
    distributional: float
    hs_step: float
    fidelity: float | None
    seconds: float


@dataclass(frozen=True)
class ReconstructionTrace:
    """Per-sweep convergence log, ordered by sweep index."""

    rows: tuple

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def to_csv(self) -> str:
        """Render as ``sweep,distributional,hs_step,fidelity,seconds`` text.

        Floats carry 17 significant digits so a rewrite round-trips exactly.
        """
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["sweep", "distributional", "hs_step", "fidelity", "seconds"])
        for r in self.rows:
            fid = "" if r.fidelity is None else format(r.fidelity, ".17g")
            w.writerow(
                [
                    r.sweep,
                    format(r.distributional, ".17g"),
                    format(r.hs_step, ".17g"),
                    fid,
                    format(r.seconds, ".17g"),
                ]
            )
        return buf.getvalue()


@dataclass(frozen=True)
class ReconstructionResult:
    """Estimate plus convergence log.

    estimate is always a valid density matrix. iterate is the raw final
    sweep iterate; the two differ only when the iterate ended outside the
    PSD cone (then estimate is its spectral projection).
    """

    estimate: states.DensityMatrix
    trace: ReconstructionTrace
    converged: bool
    stop_reason: StopReason
    iterate: np.ndarray = None

    @property
    def n_sweeps(self) -> int:
        return len(self.trace)


def _validated_probabilities(p, d: int) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.shape != (d,):
        raise DimensionMismatch(f"need a length-{d} probability vector, got shape {p.shape}")
    if np.any(p < -1e-9) or abs(p.sum() - 1.0) > 1e-9:
        raise NotAProbabilityVector(
            f"not a probability vector (min {p.min():.3e}, sum {p.sum():.12f})"
        )
    p = np.clip(p, 0.0, None)
    return p / p.sum()


def impose(obs: Observable, p, sigma) -> np.ndarray:
    """Overwrite sigma's outcome statistics for ``obs`` with ``p``.

    Rotate into the observable eigenbasis (columns of the basis unitary are
    the eigenvectors), replace the diagonal by p, rotate back. The output
    is Hermitian with unit trace, reproduces p exactly under the Born rule
    for ``obs``, and keeps every off-diagonal entry of that basis intact.
    It is generally not positive semidefinite.
    """
    m = matcore.as_matrix(sigma)
    if m.shape[0] != obs.dim:
        raise DimensionMismatch(f"state dim {m.shape[0]} vs observable dim {obs.dim}")
    p = _validated_probabilities(p, obs.dim)
    u = obs.basis
    rotated = u.conj().T @ m @ u
    np.fill_diagonal(rotated, p)
    return matcore.hermitianize(u @ rotated @ u.conj().T)


def _impose_additive(obs: Observable, p, sigma) -> np.ndarray:
    """Same map written as sigma plus a rotated diagonal correction.

    Kept as an independent algebraic route for cross-checking ``impose``;
    not used by the iteration itself.
    """
    m = matcore.as_matrix(sigma)
    if m.shape[0] != obs.dim:
        raise DimensionMismatch(f"state dim {m.shape[0]} vs observable dim {obs.dim}")
    p = _validated_probabilities(p, obs.dim)
    u = obs.basis
    correction = np.diag(p - np.diagonal(u.conj().T @ m @ u).real)
    return matcore.hermitianize(m + u @ correction @ u.conj().T)


def impose_rank(obs: Observable, p, sigma, r: int) -> np.ndarray:
    """impose followed by spectral truncation to the r largest eigenvalues.

    The kept spectral weight is renormalized to unit trace. Raises
    RankDegenerate when the truncation boundary separates two eigenvalues
    closer than 1e-12 that carry actual weight (the choice of which to keep
    would be arbitrary), and NonPositiveTruncation when the kept weight sums
    to nothing.
    """
    out = impose(obs, p, sigma)
    d = out.shape[0]
    if not 1 <= r <= d:
        raise ValueError(f"rank must lie in [1, {d}], got {r}")
    if r == d:
        return out
    eig = matcore.hermitian_eig(out)
    lam, vec = eig.eigenvalues, eig.eigenvectors
    if lam[r - 1] - lam[r] < 1e-12 and lam[r - 1] > 1e-12:
        raise RankDegenerate(
            f"eigenvalues {r - 1} and {r} differ by {lam[r - 1] - lam[r]:.3e}; "
            "truncation boundary is degenerate"
        )
    kept = lam[:r]
    total = kept.sum()
    if total <= 1e-12:
        raise NonPositiveTruncation(
            f"kept spectrum sums to {total:.3e}; nothing to renormalize"
        )
    v = vec[:, :r]
    return matcore.hermitianize((v * (kept / total)) @ v.conj().T)


def impose_pure(obs: Observable, p, psi) -> np.ndarray:
    """State-vector variant: set the moduli of the obs-basis amplitudes to sqrt(p).

    The phase of each amplitude is preserved; a zero amplitude contributes
    phase 1 by convention. Unlike ``impose``, the output's off-diagonal
    entries (as a density matrix) are rebuilt from p rather than carried
    over, so the two operators genuinely differ.
    """
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if psi.shape[0] != obs.dim:
        raise DimensionMismatch(f"vector dim {psi.shape[0]} vs observable dim {obs.dim}")
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > 1e-10:
        raise NotPure(f"input vector norm {norm:.12f} is not 1")
    p = _validated_probabilities(p, obs.dim)
    amps = obs.basis.conj().T @ psi
    phases = np.ones_like(amps)
    nz = np.abs(amps) > 0.0
    phases[nz] = amps[nz] / np.abs(amps[nz])
    out = obs.basis @ (np.sqrt(p) * phases)
    return out / np.linalg.norm(out)


def sweep(records, sigma, rank: int | None = None) -> np.ndarray:
    """Apply the imposition move once per record, in list order."""
    out = matcore.as_matrix(sigma)
    for rec in records:
        if rank is None:
            out = impose(rec.observable, rec.probabilities, out)
        else:
            out = impose_rank(rec.observable, rec.probabilities, out, rank)
    return out


def _clamped_probabilities(m: np.ndarray, obs: Observable) -> np.ndarray:
    # Born probabilities of a possibly non-PSD iterate, for metric purposes
    # only: negatives clamped, then renormalized.
    p = np.einsum("ji,jk,ki->i", obs.basis.conj(), m, obs.basis).real
    p = np.clip(p, 0.0, None)
    s = p.sum()
    if s <= 0.0:
        return np.full(m.shape[0], 1.0 / m.shape[0])
    return p / s


def _distributional_to_records(m: np.ndarray, records) -> float:
    current = [_clamped_probabilities(m, rec.observable) for rec in records]
    target = [rec.probabilities for rec in records]
    return metrics.distributional(current, target)


def reconstruct(records, rho0, cfg: IterationConfig | None = None,
                true_state=None) -> ReconstructionResult:
    """Run sweeps from rho0 until a stopping rule fires.

    records must be nonempty and share one dimension. true_state, when
    given, must be a pure state (matrix or vector outer product) and adds a
    fidelity column to the trace; it does not influence the iteration.
    Hitting max_sweeps is reported through stop_reason, not raised.

    The estimate is the final iterate when that is already a valid state,
    which covers every converged run on consistent data; otherwise (or
    always, with cfg.final_psd_projection set) it is the iterate's
    projection onto the PSD cone, and the raw iterate stays available on
    the result.
    """
    if cfg is None:
        cfg = IterationConfig()
    records = list(records)
    if not records:
        raise ValueError("need at least one measurement record")
    d = records[0].dim
    if any(rec.dim != d for rec in records):
        raise DimensionMismatch("records mix dimensions")
    current = matcore.as_matrix(rho0).astype(complex)
    if current.shape[0] != d:
        raise DimensionMismatch(f"seed state dim {current.shape[0]} vs records dim {d}")
    true_matrix = None
    if true_state is not None:
        true_matrix = matcore.as_matrix(true_state)
        if abs(states.purity(true_matrix) - 1.0) > 1e-8:
            raise NotPure("fidelity diagnostic needs a pure reference state")

    # hoisted per-record data for the sweep loop
    us = [np.ascontiguousarray(rec.observable.basis) for rec in records]
    ucs = [np.ascontiguousarray(u.conj().T) for u in us]
    ps = [rec.probabilities for rec in records]
    sqrt_ps = [np.sqrt(p) for p in ps]
    diag = np.arange(d)
    inv_m = 1.0 / len(records)

    rows = []
    stop = StopReason.MAX_SWEEPS
    for n in range(1, cfg.max_sweeps + 1):
        t0 = time.perf_counter()
        previous = current
        if cfg.rank is None:
            for u, uc, p in zip(us, ucs, ps):
                rotated = uc @ current @ u
                rotated[diag, diag] = p
                current = u @ rotated @ uc
            current = (current + current.conj().T) * 0.5
        else:
            current = sweep(records, current, rank=cfg.rank)
        dist2 = 0.0
        for u, uc, sq in zip(us, ucs, sqrt_ps):
            q = ((uc @ current) * u.T).sum(axis=1).real
            np.clip(q, 0.0, None, out=q)
            q /= q.sum()
            delta = np.sqrt(q) - sq
            dist2 += delta @ delta
        dist = float(np.sqrt(dist2 * inv_m))
        step = float(np.linalg.norm(current - previous))
        seconds = time.perf_counter() - t0
        fid = None
        if true_matrix is not None:
            fid = float(np.trace(current @ true_matrix).real)
        rows.append(TraceRow(n, dist, step, fid, seconds))
        if cfg.tol_distributional is not None and dist < cfg.tol_distributional:
            stop = StopReason.DISTRIBUTIONAL_TOL
            break
        if cfg.tol_step is not None and step < cfg.tol_step:
            stop = StopReason.STEP_TOL
            break

    if cfg.final_psd_projection:
        estimate = psd_project(current)
    else:
        try:
            estimate = states.DensityMatrix(current)
        except (NotPSD, NotHermitian, TraceNotOne):
            estimate = psd_project(current)
    final = current.copy()
    final.flags.writeable = False
    return ReconstructionResult(
        estimate=estimate,
        trace=ReconstructionTrace(tuple(rows)),
        converged=stop is not StopReason.MAX_SWEEPS,
        stop_reason=stop,
        iterate=final,
    )


@dataclass(frozen=True)
class EnsembleResult:
    """Outcome of running the same records from many seed states.

    Per-seed entries are index-aligned: stop_reasons[i], sweeps[i] and
    estimates[i] describe the run started from the i-th seed state. No
    per-sweep traces are kept.
    """

    stop_reasons: tuple
    sweeps: tuple
    estimates: tuple

    @property
    def success_fraction(self) -> float:
        hits = sum(r is StopReason.DISTRIBUTIONAL_TOL for r in self.stop_reasons)
        return hits / len(self.stop_reasons)


def reconstruct_ensemble(records, cfg: IterationConfig, n_seeds: int,
                         seed: int) -> EnsembleResult:
    """Run reconstruct from n_seeds Haar-random pure seed states.

    All runs share the records, so the unconstrained case iterates the
    whole batch of seed states through each sweep at once, freezing a run
    the moment its own stopping rule fires; each run evolves exactly as a
    standalone reconstruct would. Rank-constrained configs fall back to
    per-seed reconstruct calls.
    """
    if n_seeds < 1:
        raise ValueError(f"n_seeds must be >= 1, got {n_seeds}")
    records = list(records)
    if not records:
        raise ValueError("need at least one measurement record")
    d = records[0].dim
    child = np.random.SeedSequence(seed).generate_state(n_seeds, dtype=np.uint64)
    seeds_matrices = [states.random_pure_state(d, int(s)).matrix for s in child]

    if cfg.rank is not None:
        results = [reconstruct(records, m, cfg) for m in seeds_matrices]
        return EnsembleResult(
            stop_reasons=tuple(r.stop_reason for r in results),
            sweeps=tuple(r.n_sweeps for r in results),
            estimates=tuple(r.estimate for r in results),
        )

    us = [np.ascontiguousarray(rec.observable.basis) for rec in records]
    ucs = [np.ascontiguousarray(u.conj().T) for u in us]
    ps = [rec.probabilities for rec in records]
    sqrt_ps = [np.sqrt(p) for p in ps]
    diag = np.arange(d)
    inv_m = 1.0 / len(records)

    current = np.array(seeds_matrices, dtype=complex)
    finals = np.empty_like(current)
    reasons = [StopReason.MAX_SWEEPS] * n_seeds
    sweeps = [cfg.max_sweeps] * n_seeds
    active = list(range(n_seeds))
    for n in range(1, cfg.max_sweeps + 1):
        sub = current[active]
        previous = sub
        for u, uc, p in zip(us, ucs, ps):
            rotated = uc @ sub @ u
            rotated[:, diag, diag] = p
            sub = u @ rotated @ uc
        sub = (sub + sub.conj().transpose(0, 2, 1)) * 0.5
        dist2 = np.zeros(len(active))
        for u, uc, sq in zip(us, ucs, sqrt_ps):
            q = ((uc @ sub) * u.T).sum(axis=-1).real
            np.clip(q, 0.0, None, out=q)
            q /= q.sum(axis=1, keepdims=True)
            dist2 += ((np.sqrt(q) - sq) ** 2).sum(axis=1)
        dist = np.sqrt(dist2 * inv_m)
        step = np.linalg.norm(sub - previous, axis=(1, 2))

        hit_d = np.zeros(len(active), dtype=bool)
        hit_s = np.zeros(len(active), dtype=bool)
        if cfg.tol_distributional is not None:
            hit_d = dist < cfg.tol_distributional
        if cfg.tol_step is not None:
            hit_s = ~hit_d & (step < cfg.tol_step)
        current[active] = sub
        done = hit_d | hit_s
        if done.any():
            for k in np.flatnonzero(done):
                i = active[k]
                reasons[i] = (
                    StopReason.DISTRIBUTIONAL_TOL if hit_d[k] else StopReason.STEP_TOL
                )
                sweeps[i] = n
                finals[i] = sub[k]
            active = [i for k, i in enumerate(active) if not done[k]]
            if not active:
                break
    for i in active:
        finals[i] = current[i]

    estimates = []
    for i in range(n_seeds):
        if cfg.final_psd_projection:
            estimates.append(psd_project(finals[i]))
        else:
            try:
                estimates.append(states.DensityMatrix(finals[i]))
            except (NotPSD, NotHermitian, TraceNotOne):
                estimates.append(psd_project(finals[i]))
    return EnsembleResult(
        stop_reasons=tuple(reasons), sweeps=tuple(sweeps), estimates=tuple(estimates)
    )


def success_rate(records, cfg: IterationConfig, n_seeds: int, seed: int) -> float:
    """Fraction of Haar-random pure seed states that reach the distributional tolerance."""
    return reconstruct_ensemble(records, cfg, n_seeds, seed).success_fraction


def result_to_json(result: ReconstructionResult) -> dict:
    last = result.trace.rows[-1] if len(result.trace) else None
    return {
        "estimate": matcore.matrix_to_json(result.estimate.matrix),
        "converged": result.converged,
        "stop_reason": result.stop_reason.value,
        "n_sweeps": result.n_sweeps,
        "final_distributional": None if last is None else last.distributional,
        "final_hs_step": None if last is None else last.hs_step,
    }
