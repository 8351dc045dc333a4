"""Qubit system branching against independent environment qubits.

A :class:`BranchModel` fixes two branch amplitudes and one coupling action per
environment qubit.  The per-qubit conditional states are the real symmetric
pair ``cos(T/2)|0> +/- sin(T/2)|1>``, whose overlap is exactly ``cos(T)``;
products of these overlaps are the only trace the environment leaves on any
reduced operator.  Every operator needed for the information split (rho_S,
rho_F, rho_SF, and each outcome block p_s rho_{F|s}) therefore has rank <= 2,
and its nonzero spectrum equals the spectrum of a 2x2 coefficient matrix
times the 2x2 Gram matrix of the branch vectors.  The fast path evaluates
those 2x2 spectra in closed form, at a cost independent of the environment
size; :func:`dense_info_point` is the brute-force oracle for small sizes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Union

import numpy as np

from .info import InfoPoint
from .qstate import Povm, PureStateVector, SubsystemLayout, binary_entropy

AMPLITUDE_NORM_ATOL = 1e-12
GRAM_EIGENVALUE_CLAMP = 1e-14
NEGLIGIBLE_OUTCOME = 1e-14
DENSE_ENV_CAP = 16
DENSE_FRAGMENT_DIM_CAP = 2 ** 12


class DenseCapExceeded(ValueError):
    """The dense oracle was asked for a state beyond its size caps."""


@dataclass(frozen=True)
class BranchModel:
    """Branch amplitudes (c_0, c_1) and one coupling action per environment qubit."""

    amplitudes: tuple[complex, complex]
    actions: tuple[float, ...]

    def __post_init__(self) -> None:
        c = tuple(complex(a) for a in self.amplitudes)
        if len(c) != 2:
            raise ValueError("branch model needs exactly two amplitudes")
        norm2 = abs(c[0]) ** 2 + abs(c[1]) ** 2
        if abs(norm2 - 1.0) > AMPLITUDE_NORM_ATOL:
            raise ValueError(f"amplitudes have squared norm {norm2}, not 1")
        object.__setattr__(self, "amplitudes", c)
        object.__setattr__(self, "actions", tuple(float(t) for t in self.actions))

    @classmethod
    def uniform(cls, env_size: int, action: float, p0: float = 0.5) -> "BranchModel":
        """Model with equal couplings and real amplitudes (sqrt(p0), sqrt(1-p0))."""
        if not 0.0 <= p0 <= 1.0:
            raise ValueError(f"p0 must lie in [0, 1], got {p0}")
        amps = (math.sqrt(p0), math.sqrt(1.0 - p0))
        return cls(amps, (float(action),) * int(env_size))

    @property
    def env_size(self) -> int:
        return len(self.actions)

    @property
    def pointer_probs(self) -> tuple[float, float]:
        return (abs(self.amplitudes[0]) ** 2, abs(self.amplitudes[1]) ** 2)

    def complement(self, indices: Iterable[int]) -> tuple[int, ...]:
        chosen = set(indices)
        return tuple(k for k in range(self.env_size) if k not in chosen)


@dataclass(frozen=True)
class FragmentSpec:
    """A fragment given either as explicit environment indices or as a size."""

    indices: tuple[int, ...] | None = None
    size: int | None = None

    def __post_init__(self) -> None:
        if (self.indices is None) == (self.size is None):
            raise ValueError("give exactly one of indices or size")
        if self.indices is not None:
            object.__setattr__(self, "indices", tuple(sorted(set(int(i) for i in self.indices))))
        else:
            object.__setattr__(self, "size", int(self.size))

    @classmethod
    def of_size(cls, m: int) -> "FragmentSpec":
        return cls(size=m)

    @classmethod
    def of_indices(cls, indices: Iterable[int]) -> "FragmentSpec":
        return cls(indices=tuple(indices))

    def resolve(self, env_size: int) -> tuple[int, ...]:
        """Concrete sorted index tuple; a size spec takes the first qubits."""
        if self.indices is not None:
            if self.indices and (self.indices[0] < 0 or self.indices[-1] >= env_size):
                raise ValueError(f"fragment indices {self.indices} outside 0..{env_size - 1}")
            return self.indices
        if not 0 <= self.size <= env_size:
            raise ValueError(f"fragment size {self.size} outside 0..{env_size}")
        return tuple(range(self.size))


FragmentLike = Union[FragmentSpec, int, Iterable[int]]


def _coerce_fragment(fragment: FragmentLike) -> FragmentSpec:
    if isinstance(fragment, FragmentSpec):
        return fragment
    if isinstance(fragment, (int, np.integer)):
        return FragmentSpec.of_size(int(fragment))
    return FragmentSpec.of_indices(fragment)


@dataclass(frozen=True)
class RotatedBasis:
    """System basis at angle mu from the pointer basis (mu = 0 is pointer)."""

    angle: float

    def kets(self) -> np.ndarray:
        """2x2 array with |+> and |-> as columns."""
        half = self.angle / 2.0
        plus = np.array([math.cos(half), 1j * math.sin(half)])
        minus = np.array([math.sin(half), -1j * math.cos(half)])
        return np.column_stack([plus, minus])

    def povm(self) -> Povm:
        kets = self.kets()
        elems = tuple(np.outer(kets[:, i], kets[:, i].conj()) for i in range(2))
        return Povm(elems, labels=("+", "-"))


def make_rotated_povm(mu: float) -> Povm:
    """Two rank-one projectors onto the basis rotated by ``mu`` from pointer."""
    return RotatedBasis(float(mu)).povm()


def overlap(model: BranchModel, indices: Iterable[int]) -> float:
    """Decoherence factor prod_k cos(T_k) over the given qubits; empty set gives 1."""
    result = 1.0
    for k in indices:
        result *= math.cos(model.actions[k])
    return result


def system_state(model: BranchModel) -> np.ndarray:
    """Reduced 2x2 system state; off-diagonals carry the full-environment overlap."""
    c0, c1 = model.amplitudes
    lam_e = overlap(model, range(model.env_size))
    z = c0 * c1.conjugate() * lam_e
    return np.array(
        [[abs(c0) ** 2, z], [z.conjugate(), abs(c1) ** 2]], dtype=complex
    )


def helstrom_error(state_overlap: float) -> float:
    """Minimal error probability for discriminating two pure states with this overlap."""
    lam2 = min(abs(state_overlap) ** 2, 1.0)
    return (1.0 - math.sqrt(1.0 - lam2)) / 2.0


def alicki_fannes_bound(epsilon: float, outcomes: int = 2) -> float:
    """Continuity bound 8 sqrt(eps) log2(outcomes) + 2 H(2 sqrt(eps)) in bits.

    The entropy argument is clamped at 1; past that point the bound already
    exceeds any possible information difference.
    """
    root = math.sqrt(max(epsilon, 0.0))
    return 8.0 * root * math.log2(outcomes) + 2.0 * binary_entropy(min(2.0 * root, 1.0))


def _eig2(trace: float, det: float) -> tuple[float, float]:
    disc = trace * trace - 4.0 * det
    root = math.sqrt(disc) if disc > 0.0 else 0.0
    return (trace + root) / 2.0, (trace - root) / 2.0


def _entropy2(a: float, b: float) -> float:
    total = 0.0
    if a > GRAM_EIGENVALUE_CLAMP:
        total -= a * math.log2(a)
    if b > GRAM_EIGENVALUE_CLAMP:
        total -= b * math.log2(b)
    return total


def fast_info_point(
    model: BranchModel,
    fragment: FragmentLike,
    povm: Povm,
    *,
    pointer_decohered: bool = False,
) -> InfoPoint:
    """Information split (I, chi, D) for one fragment at O(1) cost in env size.

    Writing the joint state over the two branch vectors, every reduced
    operator is a 2x2 coefficient matrix A against a 2x2 Gram matrix G:
    G carries the fragment overlap for fragment operators, and the A
    off-diagonals carry the complement overlap for rho_SF.  Spectra come from
    trace/determinant of A*G in closed form.

    With ``pointer_decohered=True`` the system off-diagonal blocks are
    dropped, i.e. the joint state is evaluated as if the complement had fully
    decohered it (the surplus-decoherence limit).
    """
    if povm.dim != 2:
        raise ValueError("fast path supports only a qubit system")
    indices = _coerce_fragment(fragment).resolve(model.env_size)
    m = len(indices)
    lam_f = overlap(model, indices)
    lam_ef = 0.0 if pointer_decohered else overlap(model, model.complement(indices))

    c0, c1 = model.amplitudes
    p0 = abs(c0) ** 2
    p1 = abs(c1) ** 2
    z = c0 * c1.conjugate()
    az2 = z.real * z.real + z.imag * z.imag

    lam_e = lam_f * lam_ef
    h_s = _entropy2(*_eig2(1.0, p0 * p1 - az2 * lam_e * lam_e))
    h_sf = _entropy2(*_eig2(1.0, p0 * p1 - az2 * lam_ef * lam_ef))
    det_g = 1.0 - lam_f * lam_f
    h_f = _entropy2(*_eig2(1.0, p0 * p1 * det_g))

    # outcome blocks: B_ij = A_ij * (pi)_ji against the fragment Gram matrix
    avg_conditional = 0.0
    for pi in povm.elements:
        b00 = p0 * pi[0, 0].real
        b11 = p1 * pi[1, 1].real
        b01 = z * lam_ef * pi[0, 1].conjugate()
        p_s = b00 + b11 + 2.0 * lam_f * b01.real
        if p_s < NEGLIGIBLE_OUTCOME:
            continue
        det_b = b00 * b11 - (b01.real * b01.real + b01.imag * b01.imag)
        lo, hi = _eig2(p_s, det_b * det_g)
        avg_conditional += p_s * _entropy2(lo / p_s, hi / p_s)

    chi = h_f - avg_conditional
    mutual = h_s + h_f - h_sf
    disc = h_s - h_sf + avg_conditional
    fraction = m / model.env_size if model.env_size else 0.0
    return InfoPoint(m, fraction, mutual, chi, disc)


def _branch_ket(action: float, branch: int) -> np.ndarray:
    half = action / 2.0
    sign = 1.0 if branch == 0 else -1.0
    return np.array([math.cos(half), sign * math.sin(half)], dtype=complex)


def dense_state(model: BranchModel) -> PureStateVector:
    """Full 2^(env_size+1) state vector of the branched system-environment state."""
    n = model.env_size
    if n > DENSE_ENV_CAP:
        raise DenseCapExceeded(f"dense state capped at env size {DENSE_ENV_CAP}, got {n}")
    amps = np.zeros(2 ** (n + 1), dtype=complex)
    for branch, amplitude in enumerate(model.amplitudes):
        system = np.zeros(2, dtype=complex)
        system[branch] = amplitude
        kets = [system] + [_branch_ket(t, branch) for t in model.actions]
        amps += reduce(np.kron, kets)
    return PureStateVector(amps, SubsystemLayout((2,) * (n + 1)))


def dense_info_point(model: BranchModel, fragment: FragmentLike, povm: Povm) -> InfoPoint:
    """Brute-force oracle: materialize rho_SF and evaluate the info measures."""
    from . import info
    from .qstate import reduced_density_matrix

    indices = _coerce_fragment(fragment).resolve(model.env_size)
    m = len(indices)
    if model.env_size > DENSE_ENV_CAP:
        raise DenseCapExceeded(
            f"dense oracle capped at env size {DENSE_ENV_CAP}, got {model.env_size}"
        )
    if 2 ** m > DENSE_FRAGMENT_DIM_CAP:
        raise DenseCapExceeded(
            f"dense oracle capped at fragment dimension {DENSE_FRAGMENT_DIM_CAP}, got 2^{m}"
        )
    fraction = m / model.env_size if model.env_size else 0.0
    if m == 0:
        return InfoPoint(0, fraction, 0.0, 0.0, 0.0)
    psi = dense_state(model)
    keep = (0,) + tuple(1 + k for k in indices)
    rho_sf = reduced_density_matrix(psi, keep)
    return info.info_point(rho_sf, povm, m, fraction)
