"""Observable families used by the measurement and reconstruction code.

An observable is stored as its eigenbasis (a unitary whose *columns* are the
eigenvectors) plus distinct eigenvalue labels. The labels are metadata: the
reconstruction only ever consumes probabilities indexed by basis column.

Three families are provided: complementary (mutually unbiased) bases for
prime dimensions, Haar-random bases, and the three qubit Pauli eigenbases.
Constructed bases are phase-canonical: the first nonzero component of every
column is real and positive, so serialized observables are unique.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import matcore
from .errors import (
    DimensionMismatch,
    IndexOutOfRange,
    InvalidDimension,
    NotPrime,
    TooManyBases,
)

UNITARY_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class Observable:
    """Eigenbasis unitary plus eigenvalue labels for one projective measurement."""

    basis: np.ndarray
    eigenvalues: np.ndarray

    def __post_init__(self):
        basis = matcore.as_matrix(self.basis).copy()
        labels = np.asarray(self.eigenvalues, dtype=float).copy()
        if not matcore.is_unitary(basis, UNITARY_TOL):
            raise ValueError("observable basis is not unitary within 1e-10")
        if labels.shape != (basis.shape[0],):
            raise DimensionMismatch(
                f"need {basis.shape[0]} eigenvalue labels, got shape {labels.shape}"
            )
        if np.unique(labels).size != labels.size:
            raise ValueError("eigenvalue labels must be distinct (non-degenerate observable)")
        basis.flags.writeable = False
        labels.flags.writeable = False
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "eigenvalues", labels)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]


@dataclass(frozen=True, eq=False)
class ObservableSet:
    """Ordered list of same-dimension observables; ordering matters to the sweep."""

    observables: tuple
    family: str = "custom"

    def __post_init__(self):
        obs = tuple(self.observables)
        if len(obs) < 1:
            raise ValueError("an observable set needs at least one observable")
        d = obs[0].dim
        if any(o.dim != d for o in obs):
            raise DimensionMismatch("all observables in a set must share one dimension")
        object.__setattr__(self, "observables", obs)

    @property
    def dim(self) -> int:
        return self.observables[0].dim

    def __len__(self) -> int:
        return len(self.observables)

    def __iter__(self):
        return iter(self.observables)

    def __getitem__(self, i):
        return self.observables[i]


def _default_labels(d: int) -> np.ndarray:
    # descending integers d-1 .. 0; labels are metadata only
    return np.arange(d - 1, -1, -1, dtype=float)


def _canonical_phases(basis: np.ndarray) -> np.ndarray:
    """Rescale each column so its first nonzero component is real positive."""
    out = basis.copy()
    d = out.shape[0]
    for j in range(d):
        col = out[:, j]
        nz = np.flatnonzero(np.abs(col) > 1e-14)
        if nz.size:
            pivot = col[nz[0]]
            out[:, j] = col * (abs(pivot) / pivot)
    return out


def projector(obs: Observable, j: int) -> np.ndarray:
    """Rank-one projector u_j u_j† onto eigenvector j (column j of the basis)."""
    if not 0 <= j < obs.dim:
        raise IndexOutOfRange(f"projector index {j} outside [0, {obs.dim})")
    u = obs.basis[:, j]
    return np.outer(u, u.conj())


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def mub_set(d: int, m: int) -> ObservableSet:
    """First m of the d+1 mutually unbiased bases of a prime dimension d.

    Ordering: the computational basis first, then for a = 0..d-1 the basis
    with components (1/sqrt(d)) * omega^(a*l^2 + k*l), omega = exp(2*pi*i/d),
    l indexing rows and k columns. For d = 2 (where the quadratic-exponent
    construction does not apply) the Z, X, Y eigenbases are returned.
    Every returned pair (U, V) satisfies |(U†V)_ij|^2 = 1/d.
    """
    if not is_prime(d):
        raise NotPrime(f"complementary-basis construction needs prime d, got {d}")
    if not 1 <= m <= d + 1:
        raise TooManyBases(f"dimension {d} admits at most {d + 1} such bases, got m={m}")
    labels = _default_labels(d)
    if d == 2:
        bases = [_pauli_z_basis(), _pauli_x_basis(), _pauli_y_basis()][:m]
        return ObservableSet(
            tuple(Observable(b, labels) for b in bases), family="mub"
        )
    bases = [np.eye(d, dtype=complex)]
    omega = np.exp(2j * np.pi / d)
    l = np.arange(d).reshape(-1, 1)  # rows
    k = np.arange(d).reshape(1, -1)  # columns
    for a in range(d):
        if len(bases) == m:
            break
        exponent = (a * l * l + k * l) % d
        bases.append(_canonical_phases(omega**exponent / np.sqrt(d)))
    return ObservableSet(tuple(Observable(b, labels) for b in bases[:m]), family="mub")


def random_observable_set(d: int, m: int, seed: int) -> ObservableSet:
    """m Haar-random eigenbases (QR of Ginibre matrices, phases normalized)."""
    if d < 2:
        raise InvalidDimension(f"observables need d >= 2, got {d}")
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    rng = np.random.default_rng(seed)
    labels = _default_labels(d)
    obs = []
    for _ in range(m):
        g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        q, r = np.linalg.qr(g)
        q = q * (np.diagonal(r) / np.abs(np.diagonal(r)))
        obs.append(Observable(_canonical_phases(q), labels))
    return ObservableSet(tuple(obs), family="random")


def _pauli_z_basis() -> np.ndarray:
    return np.eye(2, dtype=complex)


def _pauli_x_basis() -> np.ndarray:
    return np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def _pauli_y_basis() -> np.ndarray:
    return np.array([[1, 1], [1j, -1j]], dtype=complex) / np.sqrt(2)


def pauli_set() -> ObservableSet:
    """The three qubit observables: sigma_z, sigma_x, sigma_y eigenbases, labels (+1, -1)."""
    labels = np.array([1.0, -1.0])
    return ObservableSet(
        (
            Observable(_pauli_z_basis(), labels),
            Observable(_pauli_x_basis(), labels),
            Observable(_pauli_y_basis(), labels),
        ),
        family="pauli",
    )


def observable_to_json(obs: Observable) -> dict:
    return {
        "dim": obs.dim,
        "basis": matcore.matrix_to_json(obs.basis),
        "eigenvalues": obs.eigenvalues.tolist(),
    }


def observable_from_json(obj: dict) -> Observable:
    basis = matcore.matrix_from_json(obj["basis"])
    labels = np.asarray(obj["eigenvalues"], dtype=float)
    return Observable(basis, labels)


def observable_set_to_json(oset: ObservableSet) -> dict:
    """``{"dim": d, "bases": [<matrix>...], "family": ...}``."""
    return {
        "dim": oset.dim,
        "bases": [matcore.matrix_to_json(o.basis) for o in oset],
        "family": oset.family,
    }


def observable_set_from_json(obj: dict) -> ObservableSet:
    d = int(obj["dim"])
    labels = _default_labels(d)
    obs = tuple(
        Observable(matcore.matrix_from_json(b), labels) for b in obj["bases"]
    )
    family = obj.get("family", "custom")
    return ObservableSet(obs, family=family)
