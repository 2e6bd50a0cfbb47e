"""Small dense complex linear algebra for qubit/qutrit photon-mode spaces.

Everything here works on vectors and matrices of dimension at most 4, so the
routines favour clarity and accuracy over speed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

ATOL = 1e-12

QUTRIT_LABELS = ("VAC", "PH0", "PH1")
QUBIT_LABELS = ("PH0", "PH1")

_MAX_DIM = 4


class DimensionMismatchError(ValueError):
    """Raised when two objects live on incompatible spaces."""


class NotHermitianError(ValueError):
    """Raised when a matrix fails the Hermiticity check."""


class PovmError(ValueError):
    """Raised when POVM elements are not positive or do not resolve the identity."""


@dataclass(frozen=True)
class StateVector:
    """Ket over a labelled photon-mode basis.

    Subnormalized vectors are allowed: the missing weight is the probability
    carried by modes outside the truncated space.
    """

    amplitudes: np.ndarray
    basis_labels: tuple[str, ...]

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        labels = tuple(self.basis_labels)
        if amps.shape[0] != len(labels):
            raise DimensionMismatchError(
                f"{amps.shape[0]} amplitudes for {len(labels)} basis labels"
            )
        norm2 = float(np.vdot(amps, amps).real)
        if norm2 > 1.0 + ATOL:
            raise ValueError(f"squared norm {norm2} exceeds 1")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "basis_labels", labels)

    @property
    def dim(self) -> int:
        return len(self.basis_labels)

    def norm2(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def __getitem__(self, label: str) -> complex:
        return complex(self.amplitudes[self.basis_labels.index(label)])


@dataclass(frozen=True)
class HermitianOperator:
    entries: np.ndarray

    def __post_init__(self):
        m = np.array(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatchError(f"operator must be square, got shape {m.shape}")
        if not np.all(np.abs(m - m.conj().T) <= ATOL):
            raise NotHermitianError("matrix differs from its conjugate transpose")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def identity(cls, dim: int) -> HermitianOperator:
        return cls(np.eye(dim, dtype=complex))

    @classmethod
    def projector(cls, state: StateVector | np.ndarray, weight: float = 1.0) -> HermitianOperator:
        """``weight * |v><v|`` for a (not necessarily normalized) vector ``v``."""
        v = state.amplitudes if isinstance(state, StateVector) else np.asarray(state, complex)
        return cls(weight * np.outer(v, v.conj()))

    def trace(self) -> float:
        return float(np.trace(self.entries).real)

    def __add__(self, other: HermitianOperator) -> HermitianOperator:
        _check_dims(self.dim, other.dim)
        return HermitianOperator(self.entries + other.entries)

    def __sub__(self, other: HermitianOperator) -> HermitianOperator:
        _check_dims(self.dim, other.dim)
        return HermitianOperator(self.entries - other.entries)


@dataclass(frozen=True)
class Povm:
    """Measurement given by positive elements summing to the identity.

    Both conditions are checked on construction at tolerance ``ATOL``.
    """

    elements: tuple[HermitianOperator, ...]
    labels: tuple[str, ...]

    def __post_init__(self):
        elements = tuple(self.elements)
        labels = tuple(self.labels)
        if len(elements) != len(labels) or not elements:
            raise PovmError("need one label per element and at least one element")
        dim = elements[0].dim
        total = np.zeros((dim, dim), dtype=complex)
        for label, element in zip(labels, elements):
            _check_dims(dim, element.dim)
            lam = min_eigenvalue(element)
            if lam < -ATOL:
                raise PovmError(f"element {label} has negative eigenvalue {lam:.3e}")
            total += element.entries
        dev = np.max(np.abs(total - np.eye(dim)))
        if dev > ATOL:
            raise PovmError(f"elements sum to identity only within {dev:.3e}")
        object.__setattr__(self, "elements", elements)
        object.__setattr__(self, "labels", labels)

    def __getitem__(self, label: str) -> HermitianOperator:
        return self.elements[self.labels.index(label)]

    def probabilities(self, state: StateVector) -> np.ndarray:
        """Outcome probabilities; they sum to the squared norm of ``state``."""
        return np.array([expectation(state, e) for e in self.elements])


def _check_dims(m: int, n: int) -> None:
    if m != n:
        raise DimensionMismatchError(f"dimension {m} does not match dimension {n}")


def inner_product(a: StateVector, b: StateVector) -> complex:
    """``<a|b>``, antilinear in the first argument."""
    if a.basis_labels != b.basis_labels:
        raise DimensionMismatchError(
            f"basis {a.basis_labels} does not match basis {b.basis_labels}"
        )
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def expectation(state: StateVector, op: HermitianOperator) -> float:
    _check_dims(state.dim, op.dim)
    v = state.amplitudes
    return float(np.vdot(v, op.entries @ v).real)


def _jacobi_rotation(a: np.ndarray, p: int, q: int) -> np.ndarray:
    # Unitary that zeroes a[p, q] under a -> u^H a u: a diagonal phase makes the
    # pivot real, then a real plane rotation annihilates it.
    apq = a[p, q]
    mag = abs(apq)
    n = a.shape[0]
    u = np.eye(n, dtype=complex)
    phase = apq / mag
    tau = (a[q, q].real - a[p, p].real) / (2.0 * mag)
    t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.sqrt(1.0 + tau * tau))
    c = 1.0 / np.sqrt(1.0 + t * t)
    s = t * c
    u[p, p] = c
    u[p, q] = s
    u[q, p] = -s * np.conj(phase)
    u[q, q] = c * np.conj(phase)
    return u


def eigenvalues(op: HermitianOperator, max_sweeps: int = 64) -> np.ndarray:
    """Ascending eigenvalues by cyclic complex Jacobi iteration.

    Jacobi stays accurate to roughly machine precision times the matrix norm
    even for repeated eigenvalues (rank-one POVM elements have a double zero),
    where the characteristic-polynomial route loses half the digits.
    """
    n = op.dim
    if n > _MAX_DIM:
        raise ValueError(f"dimension {n} exceeds {_MAX_DIM}")
    a = op.entries.copy()
    scale = max(np.linalg.norm(a), np.finfo(float).tiny)
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.abs(a - np.diag(np.diag(a))) ** 2))
        if off <= 1e-17 * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(a[p, q]) <= 1e-300:
                    continue
                u = _jacobi_rotation(a, p, q)
                a = u.conj().T @ a @ u
                a[p, q] = a[q, p] = 0.0
    return np.sort(np.diag(a).real)


def min_eigenvalue(op: HermitianOperator) -> float:
    return float(eigenvalues(op)[0])


def max_eigenvalue(op: HermitianOperator) -> float:
    return float(eigenvalues(op)[-1])


def sample_categorical(
    weights: Sequence[float] | np.ndarray,
    rng: np.random.Generator,
    size: int | None = None,
    classes: np.ndarray | None = None,
):
    """Draw outcome indices with the given probabilities.

    If the weights sum to less than one, an extra residual outcome with index
    ``len(weights)`` absorbs the remainder; callers decide what it means.

    Args:
        weights: Non-negative probabilities, summing to at most ``1 + 1e-9``.
            With ``classes`` this is a 2-D table holding one distribution per row.
        rng: Caller-owned generator; the draw is deterministic given its state.
        size: Number of draws. ``None`` returns a single ``int``.
        classes: Optional integer array of row indices into ``weights``; one
            draw is made per entry, from that row's distribution.

    Returns:
        An ``int``, or an integer array of shape ``(size,)`` or ``classes.shape``.
    """
    w = np.atleast_2d(np.asarray(weights, dtype=float))
    if classes is None and w.shape[0] != 1:
        raise ValueError("a table of distributions needs classes")
    if w.shape[1] == 0:
        raise ValueError("weights must be non-empty")
    if np.any(w < 0):
        raise ValueError("negative weight")
    total = w.sum(axis=1)
    if np.any(total > 1.0 + 1e-9):
        raise ValueError(f"weights sum to {total.max()} > 1")
    if np.any(total < 1.0):
        w = np.hstack((w, np.clip(1.0 - total, 0.0, None)[:, None]))
    cum = np.cumsum(w, axis=1)
    k = w.shape[1]
    # Counting boundaries <= u keeps zero-weight outcomes unreachable even
    # when u lands exactly on a cumulative boundary.
    if classes is not None:
        classes = np.asarray(classes)
        u = rng.random(classes.shape)
        idx = np.zeros(classes.shape, dtype=np.int64)
        for j in range(k - 1):
            idx += cum[:, j][classes] <= u
        return idx
    u = rng.random(size)
    idx = np.minimum(np.searchsorted(cum[0], u, side="right"), k - 1)
    if size is None:
        return int(idx)
    return idx.astype(np.int64)
