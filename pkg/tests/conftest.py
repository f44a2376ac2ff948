import numpy as np
import pytest

from nebcert.channels import Channel, EBChannelSpec
from nebcert.game import PayoffTable
from nebcert.qubit import SIX_LABELS, from_bloch

# Measured-style preparation fidelities used for imperfect-state scenarios.
XI_FIDELITIES = dict(zip(SIX_LABELS, (0.997, 0.992, 0.984, 0.969, 0.977, 0.936)))
PSI_FIDELITIES = dict(zip(SIX_LABELS, (0.995, 0.991, 0.993, 0.957, 0.986, 0.943)))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_bloch(rng, unit=False):
    v = rng.normal(size=3)
    v /= np.linalg.norm(v)
    if not unit:
        v *= rng.uniform(0.0, 1.0)
    return v


def random_density(rng, pure=False):
    return from_bloch(random_bloch(rng, unit=pure))


def random_eb_spec(rng, n_outcomes=3) -> EBChannelSpec:
    """Random measure-and-prepare channel: normalized random POVM, random outputs."""
    raw = [rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
           for _ in range(n_outcomes)]
    effects = [m @ m.conj().T for m in raw]
    total = sum(effects)
    vals, vecs = np.linalg.eigh(total)
    inv_sqrt = (vecs * (1.0 / np.sqrt(vals))) @ vecs.conj().T
    effects = [inv_sqrt @ e @ inv_sqrt for e in effects]
    outputs = [random_density(rng) for _ in range(n_outcomes)]
    return EBChannelSpec(tuple(effects), tuple(outputs))


def random_channel(rng, n_kraus=2) -> Channel:
    """Random CPTP map from the QR decomposition of a random isometry."""
    m = rng.normal(size=(2 * n_kraus, 2)) + 1j * rng.normal(size=(2 * n_kraus, 2))
    q, _ = np.linalg.qr(m)
    return Channel(tuple(q[2 * i:2 * i + 2, :] for i in range(n_kraus)))


def random_table(rng, n_entries=10, max_payoff=0.25) -> PayoffTable:
    """Random six-a-side table with sparse payoffs of bounded total weight."""
    xi = tuple(random_density(rng, pure=bool(rng.integers(2))) for _ in range(6))
    psi = tuple(random_density(rng, pure=bool(rng.integers(2))) for _ in range(6))
    payoff = {}
    while len(payoff) < n_entries:
        key = (int(rng.integers(6)), int(rng.integers(6)))
        payoff[key] = float(rng.uniform(-max_payoff, max_payoff))
    return PayoffTable(SIX_LABELS, SIX_LABELS, xi, psi, payoff)
