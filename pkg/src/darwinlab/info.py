"""Mutual information, Holevo quantity, discord, and measurement maps.

The joint state is always taken with the system as subsystem 0 of its layout
and the fragment as every remaining subsystem.  Discord is computed through
the conditional-entropy route ``H_S - H_SF + sum_s p_s H(F|s)`` rather than as
``I - chi``, so the conservation law ``I = chi + D`` remains a genuine
numerical cross-check between independent code paths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .qstate import (
    DensityMatrix,
    Povm,
    SubsystemLayout,
    partial_trace,
    shannon_entropy,
    von_neumann_entropy,
)

NEGLIGIBLE_OUTCOME = 1e-14
DISCORD_NEGATIVITY_SLACK = 1e-9
BASIS_ORTHONORMALITY_ATOL = 1e-10
COMPLEMENTARITY_ATOL = 1e-10


@dataclass(frozen=True)
class ConditionalOutcome:
    """One POVM outcome: its probability and the conditioned fragment state."""

    label: object
    probability: float
    state: DensityMatrix
    negligible: bool = False


@dataclass(frozen=True)
class ConditionalEnsemble:
    """Fragment states conditioned on each system POVM outcome."""

    outcomes: tuple[ConditionalOutcome, ...]
    povm_rank: int

    @property
    def probabilities(self) -> tuple[float, ...]:
        return tuple(o.probability for o in self.outcomes)

    def average_state(self) -> DensityMatrix:
        acc = sum(o.probability * o.state.entries for o in self.outcomes)
        return DensityMatrix(acc, self.outcomes[0].state.layout)

    def conditional_entropy(self) -> float:
        """sum_s p_s H(rho_{F|s}); negligible outcomes contribute zero."""
        total = 0.0
        for o in self.outcomes:
            if not o.negligible:
                total += o.probability * von_neumann_entropy(o.state)
        return total


@dataclass(frozen=True)
class InfoPoint:
    """Information split at one fragment size: I = chi + D up to numerics."""

    fragment_size: int
    fraction: float
    mutual_information: float
    holevo: float
    discord: float

    def conservation_residual(self) -> float:
        return self.mutual_information - self.holevo - self.discord


class ComplementarityResult(NamedTuple):
    complementary: bool
    weights: tuple[float, ...]


def _split_dims(rho_sf: DensityMatrix) -> tuple[int, int]:
    dims = rho_sf.layout.dims
    if len(dims) < 2:
        raise ValueError("joint state needs a system/fragment split (>= 2 subsystems)")
    return dims[0], math.prod(dims[1:])


def _check_povm_matches(rho_sf: DensityMatrix, povm: Povm) -> None:
    d_s, _ = _split_dims(rho_sf)
    if povm.dim != d_s:
        raise ValueError(f"POVM acts on dimension {povm.dim}, system has dimension {d_s}")


def mutual_information(rho_sf: DensityMatrix) -> float:
    """I(S:F) = H_S + H_F - H_SF in bits."""
    _split_dims(rho_sf)
    fragment = tuple(range(1, len(rho_sf.layout)))
    h_s = von_neumann_entropy(partial_trace(rho_sf, (0,)))
    h_f = von_neumann_entropy(partial_trace(rho_sf, fragment))
    h_sf = von_neumann_entropy(rho_sf)
    return h_s + h_f - h_sf


def conditional_states(rho_sf: DensityMatrix, povm: Povm) -> ConditionalEnsemble:
    """Ensemble {p_s, rho_{F|s}} with p_s rho_{F|s} = tr_S[sqrt(pi_s) rho sqrt(pi_s)].

    The square roots cancel inside the partial trace, so each unnormalized
    conditional is the block contraction sum_{ab} (pi_s)_{ba} rho[(a,k),(b,l)].
    Outcomes with probability below 1e-14 carry the reduced fragment state as
    a flagged placeholder and are excluded from entropy averages.
    """
    _check_povm_matches(rho_sf, povm)
    d_s, d_f = _split_dims(rho_sf)
    fragment_layout = SubsystemLayout(rho_sf.layout.dims[1:])
    rho4 = rho_sf.entries.reshape(d_s, d_f, d_s, d_f)
    rho_f = None

    outcomes = []
    for pi, label in zip(povm.elements, povm.labels):
        block = np.einsum("ba,akbl->kl", pi, rho4)
        p = float(np.trace(block).real)
        if p < NEGLIGIBLE_OUTCOME:
            if rho_f is None:
                rho_f = partial_trace(rho_sf, tuple(range(1, len(rho_sf.layout))))
            outcomes.append(ConditionalOutcome(label, max(p, 0.0), rho_f, negligible=True))
        else:
            state = DensityMatrix(block / p, fragment_layout)
            outcomes.append(ConditionalOutcome(label, p, state))
    return ConditionalEnsemble(tuple(outcomes), povm.max_element_rank())


def holevo(rho_sf: DensityMatrix, povm: Povm) -> float:
    """chi = H(sum_s p_s rho_{F|s}) - sum_s p_s H(rho_{F|s}) in bits."""
    ensemble = conditional_states(rho_sf, povm)
    return von_neumann_entropy(ensemble.average_state()) - ensemble.conditional_entropy()


def discord(rho_sf: DensityMatrix, povm: Povm) -> float:
    """D = H_S - H_SF + sum_s p_s H(rho_{F|s}) in bits; equals I - chi."""
    ensemble = conditional_states(rho_sf, povm)
    h_s = von_neumann_entropy(partial_trace(rho_sf, (0,)))
    h_sf = von_neumann_entropy(rho_sf)
    value = h_s - h_sf + ensemble.conditional_entropy()
    if value < -DISCORD_NEGATIVITY_SLACK:
        raise ValueError(
            f"discord {value} below the numerical slack -{DISCORD_NEGATIVITY_SLACK}; "
            "the state or POVM is inconsistent"
        )
    return value


def info_point(
    rho_sf: DensityMatrix,
    povm: Povm,
    fragment_size: int,
    fraction: float,
) -> InfoPoint:
    """Assemble (I, chi, D) for one joint state, each via its own route."""
    return InfoPoint(
        fragment_size=fragment_size,
        fraction=fraction,
        mutual_information=mutual_information(rho_sf),
        holevo=holevo(rho_sf, povm),
        discord=discord(rho_sf, povm),
    )


def _check_orthonormal(basis: np.ndarray) -> np.ndarray:
    b = np.asarray(basis, dtype=complex)
    if b.ndim != 2 or b.shape[0] != b.shape[1]:
        raise ValueError("basis must be a square matrix with kets as columns")
    gram = b.conj().T @ b
    dev = float(np.max(np.abs(gram - np.eye(b.shape[0]))))
    if dev > BASIS_ORTHONORMALITY_ATOL:
        raise ValueError(f"basis not orthonormal (deviation {dev:.3e})")
    return b


def outcome_matrix(povm: Povm, pointer_basis: np.ndarray) -> np.ndarray:
    """p[s, shat] = <shat| pi_s |shat>, the per-pointer-state outcome weights."""
    b = _check_orthonormal(pointer_basis)
    rows = [np.einsum("is,ij,js->s", b.conj(), pi, b).real for pi in povm.elements]
    return np.asarray(rows)


def plateau_chi(
    pointer_probs: Sequence[float],
    povm: Povm,
    pointer_basis: np.ndarray,
) -> float:
    """Accessible information H(Pi) - H(Pi|pointer) for a perfect pointer record."""
    p_hat = np.asarray(pointer_probs, dtype=float)
    cond = outcome_matrix(povm, pointer_basis)
    if cond.shape[1] != p_hat.shape[0]:
        raise ValueError("pointer probability vector does not match basis size")
    p_s = cond @ p_hat
    conditional = sum(p_hat[j] * shannon_entropy(cond[:, j]) for j in range(len(p_hat)))
    return shannon_entropy(p_s) - conditional


def is_complementary(povm: Povm, pointer_basis: np.ndarray) -> ComplementarityResult:
    """Whether every element is unbiased over the pointer basis; returns the weights."""
    cond = outcome_matrix(povm, pointer_basis)
    spread = float(np.max(cond.max(axis=1) - cond.min(axis=1)))
    weights = tuple(float(q) for q in cond.mean(axis=1))
    return ComplementarityResult(spread < COMPLEMENTARITY_ATOL, weights)


def _psd_sqrt(pi: np.ndarray) -> np.ndarray:
    # rank-one projector shortcut: sqrt(pi) = pi
    if np.max(np.abs(pi @ pi - pi)) < 1e-12:
        return pi
    vals, vecs = np.linalg.eigh((pi + pi.conj().T) / 2)
    vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)) @ vecs.conj().T


def measured_state(rho_sf: DensityMatrix, povm: Povm) -> DensityMatrix:
    """Post-measurement state sum_s (sqrt(pi_s) x I) rho (sqrt(pi_s) x I).

    Fixes the sqrt(pi_s) Kraus convention; the POVM alone does not pin down
    the post-measurement state of the system.
    """
    _check_povm_matches(rho_sf, povm)
    d_s, d_f = _split_dims(rho_sf)
    rho4 = rho_sf.entries.reshape(d_s, d_f, d_s, d_f)
    acc = np.zeros_like(rho4)
    for pi in povm.elements:
        root = _psd_sqrt(pi)
        acc += np.einsum("ia,akbl,bj->ikjl", root, rho4, root)
    return DensityMatrix(acc.reshape(rho_sf.dim, rho_sf.dim), rho_sf.layout)
