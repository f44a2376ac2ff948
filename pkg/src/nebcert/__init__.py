"""Certification of non-entanglement-breaking qubit channels from
weak-coherent-pulse measurement statistics."""

__version__ = "0.1.0"

from .channels import (Channel, EBChannelSpec, apply, choi_state, decoherence,
                       from_eb_spec, identity, is_ppt, negativity)
from .decoy import (CertificationVerdict, GainRecord, IntensitySet, certify,
                    expected_gain, payoff_lower_bound, raw_gain_payoff,
                    y11_bounds)
from .ebbound import EBBoundResult, build_witness, eb_bound, eb_bound_oracle
from .game import (PayoffTable, four_state_table, ideal_payoff,
                   ideal_probability, six_state_table)
from .optics import (DetectorModel, OpticalChannel, SimConfig, TimeBinPulse,
                     prepare_pulse, simulate_gains)
from .qkd import KeyRateInputs, binary_entropy, key_rate
from .qubit import (StateLabel, fidelity, from_bloch, ideal_state,
                    imperfect_state_set, reconstruct_tomography, to_bloch)

__all__ = [
    "Channel", "EBChannelSpec", "apply", "choi_state", "decoherence",
    "from_eb_spec", "identity", "is_ppt", "negativity",
    "CertificationVerdict", "GainRecord", "IntensitySet", "certify",
    "expected_gain", "payoff_lower_bound", "raw_gain_payoff", "y11_bounds",
    "EBBoundResult", "build_witness", "eb_bound", "eb_bound_oracle",
    "PayoffTable", "four_state_table", "ideal_payoff", "ideal_probability",
    "six_state_table",
    "DetectorModel", "OpticalChannel", "SimConfig", "TimeBinPulse",
    "prepare_pulse", "simulate_gains",
    "KeyRateInputs", "binary_entropy", "key_rate",
    "StateLabel", "fidelity", "from_bloch", "ideal_state",
    "imperfect_state_set", "reconstruct_tomography", "to_bloch",
]
