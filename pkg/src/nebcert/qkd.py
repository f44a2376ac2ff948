"""MDI-QKD key-rate cross-check on the same gain records and yield bounds.

Key bits come from the Z basis at signal intensity; the X basis estimates
the single-photon phase error. The singlet outcome anti-correlates bits in
both bases, so correlated coincidences count as errors. Gains and yields
are summed over the four equally likely bit settings of a basis; both key
terms use the same normalization, so the sign and crossover of the rate do
not depend on it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .decoy import GainRecord, IntensitySet, YieldBounds
from .qubit import StateLabel

DEFAULT_EC_INEFFICIENCY = 1.16


@dataclass(frozen=True)
class KeyRateInputs:
    """Gains and error rates entering the key-rate bound."""

    q11_z: float
    q_z: float
    e_z: float
    e11_x: float
    f: float = DEFAULT_EC_INEFFICIENCY

    def __post_init__(self):
        for name in ("q11_z", "q_z"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {v}")
        for name in ("e_z", "e11_x"):
            v = getattr(self, name)
            if not 0.0 <= v <= 0.5:
                raise ValueError(f"{name} must be in [0, 0.5], got {v}")
        if self.f < 1.0:
            raise ValueError(f"f must be >= 1, got {self.f}")


def binary_entropy(x: float) -> float:
    """H(x) = -x log2 x - (1-x) log2 (1-x), with H(0) = H(1) = 0."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"binary entropy argument must be in [0, 1], got {x}")
    if x in (0.0, 1.0):
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def key_rate(inputs: KeyRateInputs) -> float:
    """R = q11_z (1 - H(e11_x)) - q_z f H(e_z); may be negative (no key)."""
    return (inputs.q11_z * (1.0 - binary_entropy(inputs.e11_x))
            - inputs.q_z * inputs.f * binary_entropy(inputs.e_z))


def _basis_settings(basis: str):
    pairs = []
    for a in (0, 1):
        for b in (0, 1):
            pairs.append((StateLabel(basis, a), StateLabel(basis, b)))
    return pairs


def qber_from_gains(gains: GainRecord, basis: str,
                    pair=("mu", "mu")) -> tuple[float, float]:
    """(total gain, QBER) over the four bit settings of a basis.

    Total gain is the sum of the four setting gains; errors are the
    correlated-bit settings (the singlet outcome anti-correlates bits in
    the Z and X bases alike).
    """
    if basis not in ("Z", "X"):
        raise ValueError(f"basis must be 'Z' or 'X', got {basis!r}")
    total = 0.0
    errors = 0.0
    for (x, y) in _basis_settings(basis):
        g = gains.get(x, y, pair).gain
        total += g
        if x.bit == y.bit:
            errors += g
    qber = errors / total if total > 0.0 else 0.0
    return total, qber


def single_photon_qber(bounds: YieldBounds, basis: str) -> float:
    """Conservative single-photon error rate from the yield bounds.

    Error (correlated) yields take their upper bounds and correct
    (anti-correlated) yields their lower bounds, so the estimate can only
    overstate the error.
    """
    err = 0.0
    ok = 0.0
    for (x, y) in _basis_settings(basis):
        if x.bit == y.bit:
            err += bounds.upper(x, y)
        else:
            ok += bounds.lower(x, y)
    total = err + ok
    return err / total if total > 0.0 else 0.5


def key_rate_from_data(gains: GainRecord, bounds: YieldBounds,
                       intensities: IntensitySet,
                       f: float = DEFAULT_EC_INEFFICIENCY) -> float:
    """Assemble the key-rate inputs from a gain record and yield bounds.

    The single-photon Z gain is exp(-2 mu) mu^2 times the summed Z-basis
    yield lower bounds. Error rates beyond 1/2 carry no more information
    than 1/2 and are clamped there.
    """
    mu = intensities.mu
    q_z, e_z = qber_from_gains(gains, "Z")
    y11_z = sum(bounds.lower(x, y) for (x, y) in _basis_settings("Z"))
    q11_z = math.exp(-2.0 * mu) * mu ** 2 * y11_z
    e11_x = single_photon_qber(bounds, "X")
    inputs = KeyRateInputs(
        q11_z=min(q11_z, 1.0),
        q_z=min(q_z, 1.0),
        e_z=min(e_z, 0.5),
        e11_x=min(e11_x, 0.5),
        f=f,
    )
    return key_rate(inputs)
