"""Payoff tables and the single-photon signaling-game payoff.

The referee scores a joint singlet-projection outcome on (channel output,
second question) with payoffs keyed to the *labels* of the prepared states:
the scoring rule is the referee's declaration and does not change when the
physical preparations are imperfect. The built-in six-state and four-state
tables pay +1/4 for anti-correlated Z (and X, in the six-state game),
-1/4 for correlated Z/X, -1/2 for correlated Y, and 0 otherwise.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import channels
from .qubit import (FOUR_LABELS, SIX_LABELS, StateLabel, assert_density_matrix,
                    ideal_state, to_bloch)

# Singlet |Psi-> = (|01> - |10>)/sqrt(2); the b = 0 outcome projector.
PSI_MINUS = np.zeros((4, 4), dtype=complex)
PSI_MINUS[1, 1] = PSI_MINUS[2, 2] = 0.5
PSI_MINUS[1, 2] = PSI_MINUS[2, 1] = -0.5


@dataclass(frozen=True)
class PayoffTable:
    """Ordered question states plus the payoff map over index pairs.

    `payoff` holds only the nonzero entries; unlisted pairs score 0. The
    label tuples key both the scoring rule and the per-setting data records,
    while the state tuples carry the actual (possibly imperfect) preparations
    used for bound computations.
    """

    labels_xi: tuple
    labels_psi: tuple
    xi_states: tuple
    psi_states: tuple
    payoff: dict

    def __post_init__(self):
        if len(self.labels_xi) != len(self.xi_states):
            raise ValueError("xi labels and states differ in length")
        if len(self.labels_psi) != len(self.psi_states):
            raise ValueError("psi labels and states differ in length")
        for s in (*self.xi_states, *self.psi_states):
            assert_density_matrix(s)
        for (ix, iy), v in self.payoff.items():
            if not (0 <= ix < len(self.labels_xi) and 0 <= iy < len(self.labels_psi)):
                raise ValueError(f"payoff index ({ix}, {iy}) out of range")
            float(v)

    def value(self, ix: int, iy: int) -> float:
        return self.payoff.get((ix, iy), 0.0)

    def nonzero_items(self):
        """(ix, iy, xi_label, psi_label, payoff) for every scoring pair."""
        for (ix, iy), v in sorted(self.payoff.items()):
            if v != 0.0:
                yield ix, iy, self.labels_xi[ix], self.labels_psi[iy], v


def _correlation_payoffs(labels_xi, labels_psi, quarter_bases) -> dict:
    payoff = {}
    for ix, lx in enumerate(labels_xi):
        for iy, ly in enumerate(labels_psi):
            if lx.basis != ly.basis:
                continue
            if lx.basis in quarter_bases:
                payoff[(ix, iy)] = 0.25 if lx.bit != ly.bit else -0.25
            elif lx.basis == "Y" and lx.bit == ly.bit:
                payoff[(ix, iy)] = -0.5
    return payoff


def six_state_table(xi_states=None, psi_states=None) -> PayoffTable:
    """Six-state game over all Pauli eigenstates, ordered Z0 Z1 X0 X1 Y0 Y1."""
    xi = tuple(xi_states) if xi_states is not None else tuple(ideal_state(l) for l in SIX_LABELS)
    psi = tuple(psi_states) if psi_states is not None else tuple(ideal_state(l) for l in SIX_LABELS)
    if len(xi) != 6 or len(psi) != 6:
        raise ValueError("six-state table needs 6 states per side")
    return PayoffTable(SIX_LABELS, SIX_LABELS, xi, psi,
                       _correlation_payoffs(SIX_LABELS, SIX_LABELS, ("Z", "X")))


def four_state_table(xi_states=None, psi_states=None) -> PayoffTable:
    """Four-state game over Z and Y eigenstates, ordered Z0 Z1 Y0 Y1."""
    xi = tuple(xi_states) if xi_states is not None else tuple(ideal_state(l) for l in FOUR_LABELS)
    psi = tuple(psi_states) if psi_states is not None else tuple(ideal_state(l) for l in FOUR_LABELS)
    if len(xi) != 4 or len(psi) != 4:
        raise ValueError("four-state table needs 4 states per side")
    return PayoffTable(FOUR_LABELS, FOUR_LABELS, xi, psi,
                       _correlation_payoffs(FOUR_LABELS, FOUR_LABELS, ("Z",)))


def singlet_overlap(rho: np.ndarray, sigma: np.ndarray) -> float:
    """<Psi-| rho x sigma |Psi-> = (1 - r.s)/4 in Bloch form."""
    r = to_bloch(rho)
    s = to_bloch(sigma)
    return float((1.0 - r @ s) / 4.0)


def ideal_probability(ch: channels.Channel, xi: np.ndarray, psi: np.ndarray) -> float:
    """Probability of the b = 0 outcome: tr[(ch(xi) x psi) |Psi-><Psi-|]."""
    joint = np.kron(channels.apply(ch, xi), np.asarray(psi, dtype=complex))
    return float(np.trace(joint @ PSI_MINUS).real)


def ideal_payoff(ch: channels.Channel, table: PayoffTable) -> float:
    """Lossless single-photon average payoff for the given channel and table."""
    total = 0.0
    for ix, iy, _, _, v in table.nonzero_items():
        total += v * ideal_probability(ch, table.xi_states[ix], table.psi_states[iy])
    return total


def table_from_dict(d: dict) -> PayoffTable:
    """Custom table from structured text.

    {"xi": ["Z0", ...], "psi": [...], "payoff": [["Z0", "Z1", 0.25], ...]}
    Ideal eigenstates are attached for each listed label; feed states through
    the table constructor arguments when imperfect preparations are needed.
    """
    labels_xi = tuple(StateLabel.parse(t) for t in d["xi"])
    labels_psi = tuple(StateLabel.parse(t) for t in d["psi"])
    payoff = {}
    for x_text, y_text, v in d["payoff"]:
        ix = labels_xi.index(StateLabel.parse(x_text))
        iy = labels_psi.index(StateLabel.parse(y_text))
        payoff[(ix, iy)] = float(v)
    return PayoffTable(labels_xi, labels_psi,
                       tuple(ideal_state(l) for l in labels_xi),
                       tuple(ideal_state(l) for l in labels_psi),
                       payoff)
