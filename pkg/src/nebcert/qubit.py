"""Qubit density matrices, Bloch-vector algebra, tomography, and fidelity.

States are plain complex numpy arrays (2x2, or 4x4 for joint systems);
this module supplies validation helpers instead of a wrapper class, so
states compose freely with numpy throughout the package.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-12
EIGVAL_TOL = 1e-10
BLOCH_NORM_TOL = 1e-10
TOMOGRAPHY_SLACK = 0.05  # allowed overshoot of |<P>| past 1 before data is called corrupt

I2 = np.eye(2, dtype=complex)
PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
PAULIS = (PAULI_X, PAULI_Y, PAULI_Z)

_BASES = ("Z", "X", "Y")


@dataclass(frozen=True)
class StateLabel:
    """Basis/bit pair naming one of the six Pauli eigenstates."""

    basis: str
    bit: int

    def __post_init__(self):
        if self.basis not in _BASES:
            raise ValueError(f"basis must be one of {_BASES}, got {self.basis!r}")
        if self.bit not in (0, 1):
            raise ValueError(f"bit must be 0 or 1, got {self.bit!r}")

    def __str__(self) -> str:
        return f"{self.basis}{self.bit}"

    def sort_key(self) -> tuple[int, int]:
        return (_BASES.index(self.basis), self.bit)

    @classmethod
    def parse(cls, text: str) -> "StateLabel":
        text = text.strip()
        if len(text) != 2:
            raise ValueError(f"cannot parse state label {text!r}")
        return cls(text[0].upper(), int(text[1]))


SIX_LABELS = (
    StateLabel("Z", 0), StateLabel("Z", 1),
    StateLabel("X", 0), StateLabel("X", 1),
    StateLabel("Y", 0), StateLabel("Y", 1),
)
FOUR_LABELS = (
    StateLabel("Z", 0), StateLabel("Z", 1),
    StateLabel("Y", 0), StateLabel("Y", 1),
)

# Bloch unit vectors of the six eigenstates; bit 1 is the antipode of bit 0.
_AXIS = {"X": np.array([1.0, 0.0, 0.0]),
         "Y": np.array([0.0, 1.0, 0.0]),
         "Z": np.array([0.0, 0.0, 1.0])}


def bloch_axis(label: StateLabel) -> np.ndarray:
    sign = 1.0 if label.bit == 0 else -1.0
    return sign * _AXIS[label.basis]


def assert_density_matrix(rho: np.ndarray, name: str = "state") -> np.ndarray:
    """Validate Hermiticity, unit trace and positivity; return as complex array."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] not in (2, 4):
        raise ValueError(f"{name} must be a 2x2 or 4x4 matrix, got shape {rho.shape}")
    if not np.all(np.isfinite(rho)):
        raise ValueError(f"{name} has non-finite entries")
    if np.max(np.abs(rho - rho.conj().T)) > HERMITICITY_TOL:
        raise ValueError(f"{name} is not Hermitian within {HERMITICITY_TOL}")
    tr = np.trace(rho)
    if abs(tr - 1.0) > TRACE_TOL:
        raise ValueError(f"{name} has trace {tr}, expected 1")
    evals = np.linalg.eigvalsh(rho)
    if evals.min() < -EIGVAL_TOL:
        raise ValueError(f"{name} has negative eigenvalue {evals.min()}")
    return rho


def ideal_state(label: StateLabel) -> np.ndarray:
    """Pure projector onto the named Pauli eigenstate."""
    return from_bloch(bloch_axis(label))


def from_bloch(v) -> np.ndarray:
    """Density matrix (I + v.sigma)/2 for a Bloch vector with |v| <= 1."""
    v = np.asarray(v, dtype=float)
    if v.shape != (3,) or not np.all(np.isfinite(v)):
        raise ValueError(f"Bloch vector must be 3 finite reals, got {v!r}")
    norm = float(np.linalg.norm(v))
    if norm > 1.0 + BLOCH_NORM_TOL:
        raise ValueError(f"Bloch vector norm {norm} exceeds 1")
    rho = 0.5 * (I2 + v[0] * PAULI_X + v[1] * PAULI_Y + v[2] * PAULI_Z)
    return rho


def to_bloch(rho: np.ndarray) -> np.ndarray:
    """Pauli expectation values (<X>, <Y>, <Z>) of a qubit state."""
    rho = np.asarray(rho, dtype=complex)
    return np.array([np.trace(rho @ p).real for p in PAULIS])


def reconstruct_tomography(exp_x: float, exp_y: float, exp_z: float) -> np.ndarray:
    """Build the nearest physical state from measured Pauli expectation values.

    Inputs may overshoot [-1, 1] by the measurement-noise slack; a Bloch
    vector of norm > 1 is rescaled radially onto the unit sphere, which is
    the closest physical qubit state along the same Bloch ray.
    """
    v = np.array([exp_x, exp_y, exp_z], dtype=float)
    if not np.all(np.isfinite(v)):
        raise ValueError("tomography inputs must be finite")
    if np.any(np.abs(v) > 1.0 + TOMOGRAPHY_SLACK):
        raise ValueError(
            f"tomography inputs {v.tolist()} outside [-1-{TOMOGRAPHY_SLACK}, 1+{TOMOGRAPHY_SLACK}]; "
            "data looks corrupt"
        )
    norm = float(np.linalg.norm(v))
    if norm > 1.0:
        v = v / norm
    return from_bloch(v)


def purity(rho: np.ndarray) -> float:
    rho = np.asarray(rho, dtype=complex)
    return float(np.trace(rho @ rho).real)


def _psd_sqrt(m: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(m)
    vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)) @ vecs.conj().T


def fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Uhlmann fidelity (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.

    Squared convention: for pure sigma this reduces to tr(rho sigma).
    """
    rho = assert_density_matrix(rho, "rho")
    sigma = assert_density_matrix(sigma, "sigma")
    s = _psd_sqrt(rho)
    f = np.trace(_psd_sqrt(s @ sigma @ s)).real ** 2
    return float(min(max(f, 0.0), 1.0))


# Transverse tilt axes used when degrading ideal states to a fidelity target.
# Different cycles for the two preparation roles so the two state sets pick up
# independent coherent errors, as unequal hardware would produce.
_TILT_AXIS = {
    "xi": {"Z": "X", "X": "Y", "Y": "Z"},
    "psi": {"Z": "Y", "X": "Z", "Y": "X"},
}


DEFAULT_ROTATION_FRACTION = 0.04


def imperfect_state(label: StateLabel, target_fidelity: float, role: str = "xi",
                    rotation_fraction: float = DEFAULT_ROTATION_FRACTION) -> np.ndarray:
    """Degrade an ideal eigenstate to an exact fidelity target.

    The infidelity is split between a coherent tilt of the Bloch vector
    (fraction `rotation_fraction`) and isotropic shrinkage (the rest).
    Pure shrinkage alone cannot stand in for realistic preparation: it
    leaves the separable-payoff bound of the degraded set at or below the
    ideal value, whereas any hardware imperfection includes small rotations
    that push the bound up. The default keeps the coherent share small, so
    percent-level infidelities move the bound by a few percent. The tilt
    direction is deterministic: a fixed transverse axis per (role, basis),
    with opposite sign for the two bits so that basis pairs lose their
    exact antipodality.
    """
    if not 0.0 < target_fidelity <= 1.0:
        raise ValueError(f"target fidelity must be in (0, 1], got {target_fidelity}")
    if not 0.0 <= rotation_fraction <= 1.0:
        raise ValueError(f"rotation fraction must be in [0, 1], got {rotation_fraction}")
    if role not in _TILT_AXIS:
        raise ValueError(f"role must be 'xi' or 'psi', got {role!r}")
    n = bloch_axis(label)
    t = _AXIS[_TILT_AXIS[role][label.basis]] * (1.0 if label.bit == 0 else -1.0)
    cos_t = 1.0 - 2.0 * rotation_fraction * (1.0 - target_fidelity)
    sin_t = np.sqrt(max(0.0, 1.0 - cos_t ** 2))
    direction = cos_t * n + sin_t * t
    length = (2.0 * target_fidelity - 1.0) / cos_t
    return from_bloch(length * direction)


def imperfect_state_set(labels, fidelities, role: str = "xi",
                        rotation_fraction: float = DEFAULT_ROTATION_FRACTION) -> list[np.ndarray]:
    """Degraded states for a list of labels; `fidelities` maps label -> target."""
    return [imperfect_state(lb, fidelities[lb], role, rotation_fraction) for lb in labels]


def read_tomography_csv(path) -> dict[str, dict[StateLabel, np.ndarray]]:
    """Ingest tomography triples from CSV and reconstruct the states.

    Columns: basis, bit, exp_x, exp_y, exp_z and an optional role column
    ('xi' or 'psi'). Without a role column the same states serve both
    preparation sides. Returns {'xi': {label: rho}, 'psi': {label: rho}}.
    """
    rows = list(csv.DictReader(Path(path).open(newline="")))
    if not rows:
        raise ValueError(f"tomography file {path} is empty")
    out: dict[str, dict[StateLabel, np.ndarray]] = {"xi": {}, "psi": {}}
    has_role = "role" in rows[0]
    for i, row in enumerate(rows, start=2):
        try:
            label = StateLabel(row["basis"].strip().upper(), int(row["bit"]))
            rho = reconstruct_tomography(
                float(row["exp_x"]), float(row["exp_y"]), float(row["exp_z"]))
        except (KeyError, ValueError) as exc:
            raise ValueError(f"{path} line {i}: {exc}") from exc
        roles = (row["role"].strip(),) if has_role else ("xi", "psi")
        for r in roles:
            if r not in out:
                raise ValueError(f"{path} line {i}: unknown role {r!r}")
            out[r][label] = rho
    return out
