import math

import pytest

from nebcert.decoy import (PAIR_KEYS, GainRecord, IntensitySet, YieldBounds,
                           y11_bounds)
from nebcert.game import six_state_table
from nebcert.optics import SimConfig, simulate_gains
from nebcert.qkd import (KeyRateInputs, binary_entropy, key_rate,
                         key_rate_from_data, qber_from_gains,
                         single_photon_qber)
from nebcert.qubit import StateLabel

INTENS = IntensitySet(0.05, 0.01)


def z_record(anti_gain, corr_gain, trials=1000):
    record = GainRecord()
    for a in (0, 1):
        for b in (0, 1):
            g = anti_gain if a != b else corr_gain
            for pair in PAIR_KEYS:
                record.set(StateLabel("Z", a), StateLabel("Z", b), pair,
                           trials, g * trials)
    return record


def test_binary_entropy_values():
    assert binary_entropy(0.0) == 0.0
    assert binary_entropy(1.0) == 0.0
    assert binary_entropy(0.5) == pytest.approx(1.0, abs=1e-12)
    assert binary_entropy(0.3) == pytest.approx(binary_entropy(0.7), abs=1e-12)
    assert binary_entropy(0.11) == pytest.approx(0.4999215593, abs=1e-9)
    with pytest.raises(ValueError):
        binary_entropy(-0.01)
    with pytest.raises(ValueError):
        binary_entropy(1.01)


def test_key_rate_examples():
    assert key_rate(KeyRateInputs(q11_z=0.1, q_z=0.1, e_z=0.0, e11_x=0.5)) == 0.0
    assert key_rate(KeyRateInputs(q11_z=0.2, q_z=0.2, e_z=0.0, e11_x=0.0)) == pytest.approx(0.2)
    assert key_rate(KeyRateInputs(q11_z=0.0, q_z=0.3, e_z=0.1, e11_x=0.1)) < 0.0


def test_key_rate_monotone_in_errors():
    base = dict(q11_z=0.1, q_z=0.12, e_z=0.02, e11_x=0.05)
    r0 = key_rate(KeyRateInputs(**base))
    assert key_rate(KeyRateInputs(**{**base, "e11_x": 0.2})) <= r0
    assert key_rate(KeyRateInputs(**{**base, "e_z": 0.2})) <= r0


def test_key_rate_inputs_validation():
    with pytest.raises(ValueError):
        KeyRateInputs(q11_z=1.2, q_z=0.1, e_z=0.0, e11_x=0.0)
    with pytest.raises(ValueError):
        KeyRateInputs(q11_z=0.1, q_z=0.1, e_z=0.6, e11_x=0.0)
    with pytest.raises(ValueError):
        KeyRateInputs(q11_z=0.1, q_z=0.1, e_z=0.0, e11_x=0.0, f=0.9)


def test_qber_from_gains_examples():
    gain, qber = qber_from_gains(z_record(0.01, 0.0), "Z")
    assert qber == 0.0
    assert gain == pytest.approx(0.02)
    _, qber = qber_from_gains(z_record(0.004, 0.004), "Z")
    assert qber == pytest.approx(0.5)
    with pytest.raises(ValueError):
        qber_from_gains(z_record(0.01, 0.0), "Y")
    with pytest.raises(ValueError):
        qber_from_gains(GainRecord(), "Z")


def test_simulated_z_qber_is_small():
    gains = simulate_gains(SimConfig(intensities=INTENS), six_state_table())
    _, qber = qber_from_gains(gains, "Z")
    assert qber < 0.01


def test_single_photon_qber_conservative():
    labels = [(StateLabel("X", a), StateLabel("X", b)) for a in (0, 1) for b in (0, 1)]
    true_yields = {k: (0.02 if k[0].bit == k[1].bit else 0.4) for k in labels}
    slack = 0.01
    bounds = YieldBounds(
        {k: (v - slack, v + slack) for k, v in true_yields.items()},
        {k: 0.0 for k in labels})
    exact = YieldBounds({k: (v, v) for k, v in true_yields.items()},
                        {k: 0.0 for k in labels})
    assert single_photon_qber(bounds, "X") >= single_photon_qber(exact, "X")


def test_key_rate_with_bound_errors_is_conservative():
    gains = simulate_gains(SimConfig(intensities=INTENS), six_state_table())
    bounds = y11_bounds(gains, INTENS)
    r_bound = key_rate_from_data(gains, bounds, INTENS)
    truth = YieldBounds({k: (v[0], v[0]) for k, v in bounds.bounds.items()},
                        dict(bounds.std))
    r_truth = key_rate_from_data(gains, truth, INTENS)
    assert r_bound <= r_truth + 1e-12
    assert r_bound > 0.0  # quiet channel yields key
