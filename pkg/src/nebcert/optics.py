"""Weak-coherent-pulse stand-in for the optical experiment.

Time-bin pulses interfere on a 50/50 beam splitter; threshold detectors at
the two output ports click per time bin. Clicks follow the exact coherent-
state threshold model 1 - (1 - p_dark) exp(-eta * mean_photons), which for
Poissonian light is equivalent to photon-by-photon sampling and far faster.
Coincidences at two alternative time bins of the two detectors post-select
the singlet outcome.

Continuous-wave background light is folded in as an extra mean photon
number per detector-bin window of beta * mu_signal / 4: the background is a
fixed fraction beta of the signal-level pulse intensity, split over the two
detectors and two bins. It does not vary with the decoy level actually
fired, so photon-number yields stay setting-independent.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .decoy import PAIR_KEYS, GainRecord, IntensitySet
from .game import PayoffTable
from .qubit import StateLabel

# Relative phase of the late bin for X0, X1, Y0, Y1 encodings.
_ENCODING_PHASE = {("X", 0): 0.0, ("X", 1): math.pi,
                   ("Y", 0): math.pi / 2.0, ("Y", 1): 3.0 * math.pi / 2.0}


@dataclass(frozen=True)
class TimeBinPulse:
    """Coherent amplitudes of the early/late bins plus a global phase."""

    early: complex
    late: complex
    phase: float = 0.0

    @property
    def intensity(self) -> float:
        return abs(self.early) ** 2 + abs(self.late) ** 2

    def amplitudes(self) -> tuple[complex, complex]:
        rot = complex(math.cos(self.phase), math.sin(self.phase))
        return self.early * rot, self.late * rot


@dataclass(frozen=True)
class DetectorModel:
    """Threshold detector pair and background parameters.

    dark_prob is per gate; the default corresponds to 50 dark counts per
    second at a 37.5 MHz repetition rate and an 85% coincidence window.
    noise_beta is the continuous-wave background intensity as a fraction of
    the signal pulse intensity. mode_overlap scales the interference
    between the two arms: the fraction 1 - mode_overlap of the second
    pulse's light occupies an orthogonal spatiotemporal mode that reaches
    the detectors without interfering.
    """

    efficiency: float = 0.27
    dark_prob: float = 1.1e-6
    window_fraction: float = 0.85
    noise_beta: float = 0.0
    mode_overlap: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.efficiency <= 1.0:
            raise ValueError(f"efficiency must be in [0, 1], got {self.efficiency}")
        if not 0.0 <= self.dark_prob < 1.0:
            raise ValueError(f"dark_prob must be in [0, 1), got {self.dark_prob}")
        if not 0.0 < self.window_fraction <= 1.0:
            raise ValueError(f"window_fraction must be in (0, 1], got {self.window_fraction}")
        if self.noise_beta < 0.0:
            raise ValueError(f"noise_beta must be >= 0, got {self.noise_beta}")
        if not 0.0 <= self.mode_overlap <= 1.0:
            raise ValueError(f"mode_overlap must be in [0, 1], got {self.mode_overlap}")

    @property
    def detection_scale(self) -> float:
        """Single-photon-pair detection factor (efficiency * window)^2.

        Dividing detector-level yields by this factor calibrates them back
        to state-level probabilities for comparison with state-level bounds.
        """
        return (self.efficiency * self.window_fraction) ** 2


@dataclass(frozen=True)
class OpticalChannel:
    """Channel acting on optical pulses: identity or decoherence of strength gamma."""

    kind: str = "identity"
    gamma: float = 0.0

    def __post_init__(self):
        if self.kind not in ("identity", "decoherence"):
            raise ValueError(f"unknown optical channel kind {self.kind!r}")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must be in [0, 1], got {self.gamma}")

    def branches(self):
        """(weight, early_factor, late_factor) mixture realizing the channel.

        Decoherence keeps the pulse with probability 1 - gamma and otherwise
        deletes one time bin chosen uniformly, keeping the surviving bin's
        amplitude.
        """
        if self.kind == "identity" or self.gamma == 0.0:
            return ((1.0, 1.0, 1.0),)
        g = self.gamma
        return ((1.0 - g, 1.0, 1.0), (g / 2.0, 1.0, 0.0), (g / 2.0, 0.0, 1.0))


@dataclass(frozen=True)
class SimConfig:
    """Everything needed to reproduce one batch of simulated gains."""

    intensities: IntensitySet
    detector: DetectorModel = DetectorModel()
    channel: OpticalChannel = OpticalChannel()
    trials_per_setting: int = 1_000_000
    seed: int = 0
    mode: str = "analytic"
    phase_grid: int = 64
    exclusive_coincidence: bool = True

    def __post_init__(self):
        if self.trials_per_setting < 1:
            raise ValueError("trials_per_setting must be >= 1")
        if self.mode not in ("analytic", "montecarlo"):
            raise ValueError(f"mode must be 'analytic' or 'montecarlo', got {self.mode!r}")
        if self.phase_grid < 64:
            raise ValueError("phase_grid must be >= 64")


def prepare_pulse(label: StateLabel, intensity: float,
                  rng: np.random.Generator | None = None) -> TimeBinPulse:
    """Time-bin encoding of a question state at the given mean photon number.

    Z states occupy a single bin; X and Y states split the intensity evenly
    with late-bin phase 0, pi, pi/2, 3pi/2 for X0, X1, Y0, Y1. When an rng
    is supplied a fresh uniform global phase is attached (phase
    randomization); otherwise the global phase is 0.
    """
    if intensity < 0.0:
        raise ValueError(f"intensity must be >= 0, got {intensity}")
    phase = float(rng.uniform(0.0, 2.0 * math.pi)) if rng is not None else 0.0
    if label.basis == "Z":
        amp = math.sqrt(intensity)
        early, late = (amp, 0.0) if label.bit == 0 else (0.0, amp)
        return TimeBinPulse(complex(early), complex(late), phase)
    half = math.sqrt(intensity / 2.0)
    enc = _ENCODING_PHASE[(label.basis, label.bit)]
    return TimeBinPulse(complex(half), half * complex(math.cos(enc), math.sin(enc)), phase)


def apply_optical_decoherence(pulse: TimeBinPulse, gamma: float,
                              rng: np.random.Generator) -> TimeBinPulse:
    """Sampled decoherence: keep with probability 1 - gamma, else drop one bin."""
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must be in [0, 1], got {gamma}")
    if rng.random() >= gamma:
        return pulse
    if rng.integers(2) == 0:
        return replace(pulse, late=0.0)
    return replace(pulse, early=0.0)


def beam_splitter(a, b):
    """Symmetric 50/50 beam splitter: out0 = (a + ib)/sqrt(2), out1 = (ia + b)/sqrt(2)."""
    inv = 1.0 / math.sqrt(2.0)
    return (a + 1j * b) * inv, (1j * a + b) * inv


def _cell_click_probs(a_early, a_late, b_early, b_late, det: DetectorModel,
                      noise_mean_per_cell: float):
    """Click probabilities of the four (detector, bin) cells.

    Accepts scalars or broadcastable arrays of amplitudes; the window
    fraction scales the signal photons only, the background is already a
    per-window quantity. Imperfect mode overlap routes the orthogonal-mode
    share of the second pulse to both ports without interference.
    """
    v = math.sqrt(det.mode_overlap)
    residual = 0.5 * (1.0 - det.mode_overlap)
    out0_e, out1_e = beam_splitter(a_early, v * b_early)
    out0_l, out1_l = beam_splitter(a_late, v * b_late)
    extra_e = residual * np.abs(b_early) ** 2
    extra_l = residual * np.abs(b_late) ** 2
    keep = 1.0 - det.dark_prob

    def click(amp, extra):
        mean = det.window_fraction * (np.abs(amp) ** 2 + extra) + noise_mean_per_cell
        return 1.0 - keep * np.exp(-det.efficiency * mean)

    return (click(out0_e, extra_e), click(out0_l, extra_l),
            click(out1_e, extra_e), click(out1_l, extra_l))


def bsm_click_probs(pulse_a: TimeBinPulse, pulse_b: TimeBinPulse,
                    det: DetectorModel, noise_mean_per_cell: float = 0.0):
    """Click probabilities (det0-early, det0-late, det1-early, det1-late).

    Cells are treated as independent given the amplitudes, exact for
    coherent light on threshold detectors.
    """
    a_e, a_l = pulse_a.amplitudes()
    b_e, b_l = pulse_b.amplitudes()
    p = _cell_click_probs(a_e, a_l, b_e, b_l, det, noise_mean_per_cell)
    return tuple(float(x) for x in p)


def psi_minus_coincidence(cells, exclusive: bool = True):
    """Singlet post-selection from the four cell clicks.

    `cells` is (det0-early, det0-late, det1-early, det1-late), booleans or
    probabilities. Success means clicks at two alternative time bins of the
    two detectors; in the exclusive convention the other two cells must stay
    silent. Probability inputs assume independent cells.
    """
    d0e, d0l, d1e, d1l = cells
    if all(isinstance(c, (bool, np.bool_)) for c in cells):
        first = d0e and d1l and not d0l and not d1e
        second = d0l and d1e and not d0e and not d1l
        if exclusive:
            return first or second
        return (d0e and d1l) or (d0l and d1e)
    if exclusive:
        return (d0e * d1l * (1.0 - d0l) * (1.0 - d1e)
                + d0l * d1e * (1.0 - d0e) * (1.0 - d1l))
    return d0e * d1l + d0l * d1e - d0e * d1l * d0l * d1e


def _setting_gain_analytic(xi: TimeBinPulse, psi: TimeBinPulse, config: SimConfig,
                           noise_mean: float) -> float:
    """Expected coincidence probability, phases integrated on a uniform grid.

    The four cell intensities depend on the two global phases only through
    their difference, so averaging over a grid of phase differences equals
    the full per-arm product-grid average at the same resolution.
    """
    theta = np.arange(config.phase_grid) * (2.0 * math.pi / config.phase_grid)
    rot = np.exp(1j * theta)
    b_e, b_l = psi.amplitudes()
    gain = 0.0
    for weight, f_early, f_late in config.channel.branches():
        a_e = xi.early * f_early * rot
        a_l = xi.late * f_late * rot
        cells = _cell_click_probs(a_e, a_l, b_e, b_l, config.detector, noise_mean)
        gain += weight * float(np.mean(psi_minus_coincidence(
            cells, config.exclusive_coincidence)))
    return gain


def _setting_gain_montecarlo(xi: TimeBinPulse, psi: TimeBinPulse, config: SimConfig,
                             noise_mean: float, rng: np.random.Generator) -> int:
    """Sampled click count over trials_per_setting pulse pairs."""
    n = config.trials_per_setting
    theta = rng.uniform(0.0, 2.0 * math.pi, size=n) - rng.uniform(0.0, 2.0 * math.pi, size=n)
    rot = np.exp(1j * theta)
    branches = config.channel.branches()
    weights = [b[0] for b in branches]
    idx = rng.choice(len(branches), size=n, p=weights)
    f_early = np.array([b[1] for b in branches])[idx]
    f_late = np.array([b[2] for b in branches])[idx]
    a_e = xi.early * f_early * rot
    a_l = xi.late * f_late * rot
    b_e, b_l = psi.amplitudes()
    cells = _cell_click_probs(a_e, a_l, b_e, b_l, config.detector, noise_mean)
    clicks = tuple(rng.random(n) < p for p in cells)
    d0e, d0l, d1e, d1l = clicks
    first = d0e & d1l & ~d0l & ~d1e
    second = d0l & d1e & ~d0e & ~d1l
    if config.exclusive_coincidence:
        success = first | second
    else:
        success = (d0e & d1l) | (d0l & d1e)
    return int(np.count_nonzero(success))


def noise_mean_per_cell(config: SimConfig) -> float:
    """Background mean photon number per detector-bin window.

    Referenced to the signal intensity mu so the background is constant
    across decoy settings.
    """
    return config.detector.noise_beta * config.intensities.mu / 4.0


def simulate_gains(config: SimConfig, table: PayoffTable) -> GainRecord:
    """Gains for every scoring question pair at all seven intensity pairs.

    Analytic mode returns exact expected gains (clicks = gain * trials);
    Monte Carlo mode samples global phases, channel branches and detector
    clicks. Each setting draws its generator from a sub-seed derived from
    (seed, setting index) over the sorted setting list, so serial and
    parallel evaluation orders produce identical records.
    """
    noise = noise_mean_per_cell(config)
    settings = sorted(
        {(x, y) for _, _, x, y, _ in table.nonzero_items()},
        key=lambda xy: (xy[0].sort_key(), xy[1].sort_key()))
    record = GainRecord()
    index = 0
    for (x, y) in settings:
        for pair in PAIR_KEYS:
            a_xi, a_psi = config.intensities.pair_values(pair)
            xi = prepare_pulse(x, a_xi)
            psi = prepare_pulse(y, a_psi)
            if config.mode == "analytic":
                gain = _setting_gain_analytic(xi, psi, config, noise)
                clicks = gain * config.trials_per_setting
            else:
                rng = np.random.default_rng(np.random.SeedSequence((config.seed, index)))
                clicks = float(_setting_gain_montecarlo(xi, psi, config, noise, rng))
            record.set(x, y, pair, config.trials_per_setting, clicks)
            index += 1
    return record
