"""Exact finite-dimensional quantum states, POVMs, and entropy primitives.

Values are plain frozen dataclasses wrapping numpy arrays.  Constructors only
check cheap structural facts (shapes, norms); the expensive physical
invariants (Hermiticity, unit trace, positivity, POVM completeness) are the
job of :func:`validate_density_matrix` and :func:`validate_povm`, which report
the first violated invariant together with the measured deviation instead of
raising.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

HERMITICITY_ATOL = 1e-10
TRACE_ATOL = 1e-10
PSD_ATOL = 1e-10
NORM_ATOL = 1e-12
EIGENVALUE_CLAMP = 1e-12
PROBABILITY_ATOL = 1e-12
PROBABILITY_SUM_ATOL = 1e-10


@dataclass(frozen=True)
class SubsystemLayout:
    """Ordered local dimensions of a tensor-product space."""

    dims: tuple[int, ...]

    def __post_init__(self) -> None:
        dims = tuple(int(d) for d in self.dims)
        if not dims:
            raise ValueError("layout needs at least one subsystem")
        if any(d < 1 for d in dims):
            raise ValueError(f"local dimensions must be >= 1, got {dims}")
        object.__setattr__(self, "dims", dims)

    @property
    def total(self) -> int:
        return math.prod(self.dims)

    def __len__(self) -> int:
        return len(self.dims)

    def combined(self, other: "SubsystemLayout") -> "SubsystemLayout":
        return SubsystemLayout(self.dims + other.dims)

    def subset(self, indices: Sequence[int]) -> "SubsystemLayout":
        return SubsystemLayout(tuple(self.dims[i] for i in indices))


def _as_layout(layout: Union[SubsystemLayout, Sequence[int]]) -> SubsystemLayout:
    if isinstance(layout, SubsystemLayout):
        return layout
    return SubsystemLayout(tuple(layout))


@dataclass(frozen=True)
class DensityMatrix:
    """Square complex operator with a declared subsystem layout.

    Subsystem 0 is the system; any further subsystems are environment pieces,
    in declared order.
    """

    entries: np.ndarray
    layout: SubsystemLayout

    def __post_init__(self) -> None:
        m = np.asarray(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"density matrix must be square, got shape {m.shape}")
        layout = _as_layout(self.layout)
        if layout.total != m.shape[0]:
            raise ValueError(
                f"layout {layout.dims} has total dimension {layout.total}, "
                f"matrix is {m.shape[0]}x{m.shape[0]}"
            )
        object.__setattr__(self, "entries", m)
        object.__setattr__(self, "layout", layout)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def trace(self) -> float:
        return float(np.trace(self.entries).real)


@dataclass(frozen=True)
class PureStateVector:
    """Normalized state vector with a declared subsystem layout."""

    amplitudes: np.ndarray
    layout: SubsystemLayout

    def __post_init__(self) -> None:
        v = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        layout = _as_layout(self.layout)
        if layout.total != v.shape[0]:
            raise ValueError(
                f"layout {layout.dims} has total dimension {layout.total}, "
                f"vector has {v.shape[0]} amplitudes"
            )
        norm2 = float(np.vdot(v, v).real)
        if abs(norm2 - 1.0) > NORM_ATOL:
            raise ValueError(f"state vector squared norm {norm2} is not 1")
        object.__setattr__(self, "amplitudes", v)
        object.__setattr__(self, "layout", layout)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def projector(self) -> DensityMatrix:
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()), self.layout)


@dataclass(frozen=True)
class Povm:
    """Ordered positive operators summing to the identity on one subsystem."""

    elements: tuple[np.ndarray, ...]
    labels: tuple = ()

    def __post_init__(self) -> None:
        elems = tuple(np.asarray(e, dtype=complex) for e in self.elements)
        if not elems:
            raise ValueError("POVM needs at least one element")
        d = elems[0].shape[0]
        for e in elems:
            if e.ndim != 2 or e.shape != (d, d):
                raise ValueError("POVM elements must be square matrices of equal size")
        labels = tuple(self.labels) if self.labels else tuple(range(len(elems)))
        if len(labels) != len(elems):
            raise ValueError("one label per POVM element required")
        object.__setattr__(self, "elements", elems)
        object.__setattr__(self, "labels", labels)

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    def __len__(self) -> int:
        return len(self.elements)

    def max_element_rank(self) -> int:
        rank = 0
        for e in self.elements:
            vals = np.linalg.eigvalsh((e + e.conj().T) / 2)
            rank = max(rank, int(np.sum(vals > 1e-10)))
        return rank


@dataclass(frozen=True)
class Violation:
    """First failed invariant of a validator, with the measured deviation."""

    invariant: str
    deviation: float

    def __str__(self) -> str:
        return f"{self.invariant} violated by {self.deviation:.3e}"


def tensor_product(a, b):
    """Kronecker product of two states of the same kind; layouts concatenate."""
    if isinstance(a, DensityMatrix) and isinstance(b, DensityMatrix):
        return DensityMatrix(np.kron(a.entries, b.entries), a.layout.combined(b.layout))
    if isinstance(a, PureStateVector) and isinstance(b, PureStateVector):
        return PureStateVector(np.kron(a.amplitudes, b.amplitudes), a.layout.combined(b.layout))
    raise TypeError(
        f"tensor_product needs two operands of the same kind, "
        f"got {type(a).__name__} and {type(b).__name__}"
    )


def _resolve_keep(layout: SubsystemLayout, keep: Iterable[int]) -> tuple[int, ...]:
    kept = sorted(set(int(k) for k in keep))
    if not kept:
        raise ValueError("keep set must not be empty")
    n = len(layout)
    if kept[0] < 0 or kept[-1] >= n:
        raise ValueError(f"keep indices {kept} out of range for {n} subsystems")
    return tuple(kept)


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """Trace out every subsystem not in ``keep``; kept dims stay in order."""
    kept = _resolve_keep(rho.layout, keep)
    dims = rho.layout.dims
    n = len(dims)
    traced = tuple(i for i in range(n) if i not in kept)
    if not traced:
        return rho
    perm = kept + traced
    d_keep = math.prod(dims[i] for i in kept)
    d_tr = rho.dim // d_keep
    t = rho.entries.reshape(dims + dims)
    t = np.transpose(t, perm + tuple(n + p for p in perm))
    t = t.reshape(d_keep, d_tr, d_keep, d_tr)
    reduced = np.trace(t, axis1=1, axis2=3)
    return DensityMatrix(reduced, rho.layout.subset(kept))


def reduced_density_matrix(psi: PureStateVector, keep: Iterable[int]) -> DensityMatrix:
    """Reduced state of a pure state, computed without forming the full projector."""
    kept = _resolve_keep(psi.layout, keep)
    dims = psi.layout.dims
    n = len(dims)
    traced = tuple(i for i in range(n) if i not in kept)
    d_keep = math.prod(dims[i] for i in kept)
    v = psi.amplitudes.reshape(dims)
    v = np.transpose(v, kept + traced).reshape(d_keep, -1)
    return DensityMatrix(v @ v.conj().T, psi.layout.subset(kept))


def entropy_from_spectrum(values: Sequence[float], clamp: float = EIGENVALUE_CLAMP) -> float:
    """Shannon entropy in bits of a spectrum; values below ``clamp`` count as zero."""
    total = 0.0
    for v in np.asarray(values, dtype=float).ravel():
        if v >= clamp:
            total -= v * math.log2(v)
    return total


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """Entropy in bits of the Hermitized input, with tiny eigenvalues clamped."""
    herm = (rho.entries + rho.entries.conj().T) / 2
    return entropy_from_spectrum(np.linalg.eigvalsh(herm))


def shannon_entropy(p: Sequence[float]) -> float:
    """Entropy in bits of a probability vector (clamped, then renormalized)."""
    v = np.asarray(p, dtype=float).ravel()
    if v.min(initial=0.0) < -PROBABILITY_ATOL:
        raise ValueError(f"negative probability {v.min()} beyond tolerance")
    if v.max(initial=0.0) > 1.0 + PROBABILITY_ATOL:
        raise ValueError(f"probability {v.max()} exceeds 1 beyond tolerance")
    s = float(v.sum())
    if abs(s - 1.0) > PROBABILITY_SUM_ATOL:
        raise ValueError(f"probabilities sum to {s}, not 1")
    v = np.clip(v, 0.0, 1.0) / s
    return float(-sum(x * math.log2(x) for x in v if x > 0.0))


def binary_entropy(p: float) -> float:
    """H(p) = H((p, 1-p)) in bits."""
    if p < -PROBABILITY_ATOL or p > 1.0 + PROBABILITY_ATOL:
        raise ValueError(f"binary entropy argument {p} outside [0, 1]")
    p = min(max(p, 0.0), 1.0)
    if p == 0.0 or p == 1.0:
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def validate_density_matrix(
    entries: np.ndarray,
    layout: Union[SubsystemLayout, Sequence[int], None] = None,
) -> Union[DensityMatrix, Violation]:
    """Check Hermiticity, unit trace, and positivity; report the first failure."""
    m = np.asarray(entries, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if layout is None:
        layout = SubsystemLayout((m.shape[0],))
    else:
        layout = _as_layout(layout)

    herm_dev = float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0
    if herm_dev > HERMITICITY_ATOL:
        return Violation("hermitian", herm_dev)
    trace_dev = abs(float(np.trace(m).real) - 1.0)
    if trace_dev > TRACE_ATOL:
        return Violation("trace", trace_dev)
    lowest = float(np.linalg.eigvalsh((m + m.conj().T) / 2).min())
    if lowest < -PSD_ATOL:
        return Violation("psd", -lowest)
    return DensityMatrix(m, layout)


def validate_povm(
    elements: Sequence[np.ndarray],
    labels: Sequence = (),
) -> Union[Povm, Violation]:
    """Check per-element positivity and completeness; report the first failure."""
    elems = [np.asarray(e, dtype=complex) for e in elements]
    if not elems:
        raise ValueError("POVM needs at least one element")
    d = elems[0].shape[0]
    for i, e in enumerate(elems):
        if e.ndim != 2 or e.shape != (d, d):
            raise ValueError("POVM elements must be square matrices of equal size")
        herm_dev = float(np.max(np.abs(e - e.conj().T)))
        if herm_dev > HERMITICITY_ATOL:
            return Violation(f"element-{i}-hermitian", herm_dev)
        lowest = float(np.linalg.eigvalsh((e + e.conj().T) / 2).min())
        if lowest < -PSD_ATOL:
            return Violation(f"element-{i}-psd", -lowest)
    completeness_dev = float(np.max(np.abs(sum(elems) - np.eye(d))))
    if completeness_dev > HERMITICITY_ATOL:
        return Violation("completeness", completeness_dev)
    return Povm(tuple(elems), tuple(labels))
