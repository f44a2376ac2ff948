"""Qubit channels as CPTP maps in Kraus form, with Choi-state export.

Named constructors cover the channels used throughout: the identity, the
population-preserving decoherence family, and measure-and-prepare
(entanglement-breaking) channels assembled from a POVM and output states.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .qubit import I2, PAULI_Z, assert_density_matrix

CPTP_TOL = 1e-10
POVM_TOL = 1e-10

# Maximally entangled |Phi+> = (|00> + |11>)/sqrt(2), trace-1 Choi convention.
_PHI_PLUS = np.zeros((4, 4), dtype=complex)
_PHI_PLUS[0, 0] = _PHI_PLUS[0, 3] = _PHI_PLUS[3, 0] = _PHI_PLUS[3, 3] = 0.5


@dataclass(frozen=True)
class Channel:
    """Qubit -> qubit CPTP map, stored as a tuple of 2x2 Kraus operators."""

    kraus_ops: tuple

    def __post_init__(self):
        ops = tuple(np.asarray(k, dtype=complex) for k in self.kraus_ops)
        if not ops:
            raise ValueError("channel needs at least one Kraus operator")
        for k in ops:
            if k.shape != (2, 2):
                raise ValueError(f"Kraus operators must be 2x2, got {k.shape}")
            k.flags.writeable = False
        total = sum(k.conj().T @ k for k in ops)
        if np.max(np.abs(total - I2)) > CPTP_TOL:
            raise ValueError("Kraus operators do not satisfy sum K^dag K = I")
        object.__setattr__(self, "kraus_ops", ops)


def identity() -> Channel:
    return Channel((I2,))


def decoherence(gamma: float) -> Channel:
    """Channel that keeps Z populations and scales coherences by (1 - gamma).

    Kraus form {sqrt(1-gamma/2) I, sqrt(gamma/2) Z}; fully entanglement
    breaking exactly at gamma = 1 (a Z-basis measure-and-prepare map).
    """
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must be in [0, 1], got {gamma}")
    return Channel((np.sqrt(1.0 - gamma / 2.0) * I2, np.sqrt(gamma / 2.0) * PAULI_Z))


@dataclass(frozen=True)
class EBChannelSpec:
    """POVM effects E_k and prepared outputs for a measure-and-prepare channel."""

    povm: tuple
    outputs: tuple

    def __post_init__(self):
        effects = tuple(np.asarray(e, dtype=complex) for e in self.povm)
        outs = tuple(np.asarray(o, dtype=complex) for o in self.outputs)
        if len(effects) != len(outs) or not effects:
            raise ValueError("POVM and outputs must be nonempty and equal length")
        total = np.zeros((2, 2), dtype=complex)
        for e in effects:
            if e.shape != (2, 2):
                raise ValueError("POVM effects must be 2x2")
            if np.max(np.abs(e - e.conj().T)) > POVM_TOL:
                raise ValueError("POVM effect is not Hermitian")
            if np.linalg.eigvalsh(e).min() < -POVM_TOL:
                raise ValueError("POVM effect is not positive semidefinite")
            total += e
        if np.max(np.abs(total - I2)) > POVM_TOL:
            raise ValueError("POVM effects do not sum to the identity")
        for o in outs:
            assert_density_matrix(o, "EB output state")
        object.__setattr__(self, "povm", effects)
        object.__setattr__(self, "outputs", outs)


def from_eb_spec(spec: EBChannelSpec) -> Channel:
    """Kraus form of rho -> sum_k tr[E_k rho] gamma_k.

    Decomposes each effect and each output spectrally; Kraus operators are
    sqrt(p_b) |v_kb><m_ka| with E_k = sum_a |m_ka><m_ka| and
    gamma_k = sum_b p_b |v_kb><v_kb|. The Choi state of the result is
    separable by construction.
    """
    kraus = []
    for effect, out in zip(spec.povm, spec.outputs):
        evals, evecs = np.linalg.eigh(effect)
        pvals, pvecs = np.linalg.eigh(np.asarray(out, dtype=complex))
        for a in range(2):
            if evals[a] <= POVM_TOL:
                continue
            m = np.sqrt(evals[a]) * evecs[:, a]
            for b in range(2):
                if pvals[b] <= POVM_TOL:
                    continue
                v = np.sqrt(pvals[b]) * pvecs[:, b]
                kraus.append(np.outer(v, m.conj()))
    return Channel(tuple(kraus))


def apply(ch: Channel, rho: np.ndarray) -> np.ndarray:
    """sum_k K rho K^dag."""
    rho = np.asarray(rho, dtype=complex)
    out = np.zeros((2, 2), dtype=complex)
    for k in ch.kraus_ops:
        out += k @ rho @ k.conj().T
    return out


def choi_state(ch: Channel) -> np.ndarray:
    """(ch x id) applied to |Phi+><Phi+|; trace-1 normalization."""
    out = np.zeros((4, 4), dtype=complex)
    for k in ch.kraus_ops:
        big = np.kron(k, I2)
        out += big @ _PHI_PLUS @ big.conj().T
    return out


def partial_transpose(rho: np.ndarray) -> np.ndarray:
    """Transpose of the second qubit of a two-qubit operator."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got {rho.shape}")
    return rho.reshape(2, 2, 2, 2).transpose(0, 3, 2, 1).reshape(4, 4)


def is_ppt(rho: np.ndarray, tol: float = 1e-10) -> bool:
    """Positive partial transpose test; at 2x2 this decides separability."""
    return bool(np.linalg.eigvalsh(partial_transpose(rho)).min() >= -tol)


def negativity(rho: np.ndarray) -> float:
    """Sum of |negative eigenvalues| of the partial transpose."""
    evals = np.linalg.eigvalsh(partial_transpose(rho))
    return float(-evals[evals < 0.0].sum())


def _matrix_from_json(entries) -> np.ndarray:
    """Matrix from nested lists; entries are numbers or [re, im] pairs."""
    def scalar(x):
        if isinstance(x, (list, tuple)):
            if len(x) != 2:
                raise ValueError(f"complex entry must be [re, im], got {x!r}")
            return complex(x[0], x[1])
        return complex(x)
    return np.array([[scalar(x) for x in row] for row in entries], dtype=complex)


def channel_from_dict(d: dict) -> Channel:
    """Build a channel from a structured-text spec.

    {"type": "identity"} | {"type": "decoherence", "gamma": g}
    | {"type": "eb", "povm": [...], "outputs": [...]} with matrix entries
    given as numbers or [re, im] pairs.
    """
    kind = d.get("type")
    if kind == "identity":
        return identity()
    if kind == "decoherence":
        return decoherence(float(d["gamma"]))
    if kind == "eb":
        spec = EBChannelSpec(
            tuple(_matrix_from_json(e) for e in d["povm"]),
            tuple(_matrix_from_json(o) for o in d["outputs"]),
        )
        return from_eb_spec(spec)
    raise ValueError(f"unknown channel type {kind!r}")


def channel_from_json(text: str) -> Channel:
    return channel_from_dict(json.loads(text))
