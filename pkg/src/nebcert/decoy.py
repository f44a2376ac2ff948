"""Decoy-state analysis: gains, single-photon yield bounds, certification.

Intensities follow the three-level vacuum-decoy scheme mu > nu > omega = 0.
With S(a, b) = exp(a + b) Q^{ab} the combinations

    J1 = Q_nn e^{2nu} + Q_ww - (Q_nw + Q_wn) e^{nu}
    J2 = Q_mm e^{2mu} + Q_ww - (Q_mw + Q_wm) e^{mu}

cancel every single-arm yield Y^{n0}, Y^{0m} identically, and
mu^3 J1 - nu^3 J2 additionally cancels Y^{12} and Y^{21}, leaving

    mu^3 J1 - nu^3 J2 = D Y^11 + sum_R c_nm Y^nm,
    D = mu^2 nu^2 (mu - nu),   c_nm = (mu^3 nu^{n+m} - nu^3 mu^{n+m}) / (n! m!),

over the remainder set R = {n, m >= 1, n + m >= 4}, where every c_nm < 0.
Hence Y^11 >= (mu^3 J1 - nu^3 J2)/D, with equality when all remainder
yields vanish, and Y^11 <= lower + sum_R |c_nm|/D (all remainder yields
at their ceiling of 1). The closed form of the upper shift is

    sum_R |c_nm|/D = 1 - [mu^3 (e^nu - 1)^2 - nu^3 (e^mu - 1)^2] / D.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

from .game import PayoffTable
from .qubit import StateLabel

INTENSITY_NAMES = ("mu", "nu", "omega")
PAIR_KEYS = (
    ("mu", "mu"), ("nu", "nu"),
    ("mu", "omega"), ("omega", "mu"),
    ("nu", "omega"), ("omega", "nu"),
    ("omega", "omega"),
)
DEFAULT_TRUNCATION = 20


class InconsistentStatisticsError(RuntimeError):
    """Raised when gains lead to an empty yield interval after clamping."""


@dataclass(frozen=True)
class IntensitySet:
    """Mean photon numbers per pulse for the three decoy levels."""

    mu: float
    nu: float
    omega: float = 0.0

    def __post_init__(self):
        if not self.mu > self.nu > self.omega >= 0.0:
            raise ValueError(
                f"need mu > nu > omega >= 0, got ({self.mu}, {self.nu}, {self.omega})")

    def value(self, name: str) -> float:
        if name not in INTENSITY_NAMES:
            raise ValueError(f"unknown intensity name {name!r}")
        return getattr(self, name)

    def pair_values(self, pair) -> tuple[float, float]:
        return self.value(pair[0]), self.value(pair[1])


@dataclass
class GainEntry:
    """Click statistics for one (question pair, intensity pair) setting.

    `clicks` is a float so analytically computed expected counts round-trip
    exactly; Monte Carlo runs store integer counts in the same field.
    """

    trials: int
    clicks: float

    @property
    def gain(self) -> float:
        return self.clicks / self.trials if self.trials > 0 else 0.0

    @property
    def variance(self) -> float:
        """Binomial variance of the gain estimate."""
        if self.trials <= 0:
            return 0.0
        g = min(max(self.gain, 0.0), 1.0)
        return g * (1.0 - g) / self.trials


@dataclass
class GainRecord:
    """Gains keyed by (xi label, psi label, intensity-pair names)."""

    entries: dict = field(default_factory=dict)

    def set(self, x: StateLabel, y: StateLabel, pair, trials: int, clicks: float):
        if pair not in PAIR_KEYS:
            raise ValueError(f"unknown intensity pair {pair!r}")
        self.entries[(x, y, pair)] = GainEntry(trials, clicks)

    def get(self, x: StateLabel, y: StateLabel, pair) -> GainEntry:
        try:
            return self.entries[(x, y, pair)]
        except KeyError:
            raise ValueError(f"no gain recorded for ({x}, {y}, {pair[0]}{pair[1]})") from None

    def question_pairs(self):
        seen = []
        for (x, y, _pair) in self.entries:
            if (x, y) not in seen:
                seen.append((x, y))
        return sorted(seen, key=lambda xy: (xy[0].sort_key(), xy[1].sort_key()))

    def sorted_keys(self):
        return sorted(self.entries,
                      key=lambda k: (k[0].sort_key(), k[1].sort_key(), PAIR_KEYS.index(k[2])))

    def to_csv(self, path, intensities: IntensitySet) -> None:
        with Path(path).open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["x_basis", "x_bit", "y_basis", "y_bit",
                             "alpha_xi", "alpha_psi", "trials", "clicks"])
            for (x, y, pair) in self.sorted_keys():
                e = self.entries[(x, y, pair)]
                a_xi, a_psi = intensities.pair_values(pair)
                writer.writerow([x.basis, x.bit, y.basis, y.bit,
                                 repr(a_xi), repr(a_psi), e.trials, repr(e.clicks)])

    @classmethod
    def from_csv(cls, path) -> tuple["GainRecord", IntensitySet]:
        """Read the gain table, inferring the three intensity levels."""
        rows = list(csv.DictReader(Path(path).open(newline="")))
        if not rows:
            raise ValueError(f"gain file {path} is empty")
        levels = sorted({float(r["alpha_xi"]) for r in rows}
                        | {float(r["alpha_psi"]) for r in rows}, reverse=True)
        if len(levels) != 3:
            raise ValueError(
                f"gain file {path} must use exactly three intensity levels, found {levels}")
        intensities = IntensitySet(*levels)
        by_value = dict(zip(levels, INTENSITY_NAMES))
        record = cls()
        for i, r in enumerate(rows, start=2):
            try:
                x = StateLabel(r["x_basis"].strip().upper(), int(r["x_bit"]))
                y = StateLabel(r["y_basis"].strip().upper(), int(r["y_bit"]))
                pair = (by_value[float(r["alpha_xi"])], by_value[float(r["alpha_psi"])])
                record.set(x, y, pair, int(r["trials"]), float(r["clicks"]))
            except (KeyError, ValueError) as exc:
                raise ValueError(f"{path} line {i}: {exc}") from exc
        return record, intensities


def poisson_truncation_tail(alpha_xi: float, alpha_psi: float,
                            truncation: int) -> float:
    """Mass of the two-arm Poisson distribution beyond the truncation order."""
    def cdf(a):
        return math.exp(-a) * sum(a ** n / math.factorial(n) for n in range(truncation + 1))
    return 1.0 - cdf(alpha_xi) * cdf(alpha_psi)


def expected_gain(intensities: tuple[float, float], yields: dict,
                  truncation: int = DEFAULT_TRUNCATION) -> tuple[float, float]:
    """Poisson-weighted gain from photon-number yields.

    Returns (gain, truncation_error_bound); the error bound is the Poisson
    tail mass beyond the truncation order, valid because yields lie in [0, 1].
    """
    a_xi, a_psi = intensities
    if a_xi < 0.0 or a_psi < 0.0:
        raise ValueError(f"intensities must be nonnegative, got {intensities}")
    if truncation < 10:
        raise ValueError(f"truncation must be >= 10, got {truncation}")
    total = 0.0
    for (n, m), y in yields.items():
        if not 0.0 <= y <= 1.0:
            raise ValueError(f"yield Y^({n},{m}) = {y} outside [0, 1]")
        if n <= truncation and m <= truncation:
            total += a_xi ** n * a_psi ** m / (math.factorial(n) * math.factorial(m)) * y
    gain = math.exp(-a_xi - a_psi) * total
    return gain, poisson_truncation_tail(a_xi, a_psi, truncation)


@dataclass
class YieldBounds:
    """Per-question-pair interval for the single-photon yield Y^11.

    `std` carries the 1-sigma statistical error of the interval endpoints
    (both endpoints share it: the upper bound is the lower plus a constant).
    """

    bounds: dict
    std: dict

    def lower(self, x, y) -> float:
        return self.bounds[(x, y)][0]

    def upper(self, x, y) -> float:
        return self.bounds[(x, y)][1]


def upper_shift(intensities: IntensitySet) -> float:
    """Width added to the lower bound when all remainder yields are 1."""
    mu, nu = intensities.mu, intensities.nu
    d = mu ** 2 * nu ** 2 * (mu - nu)
    return 1.0 - (mu ** 3 * math.expm1(nu) ** 2 - nu ** 3 * math.expm1(mu) ** 2) / d


def y11_bounds(gains: GainRecord, intensities: IntensitySet) -> YieldBounds:
    """Single-photon yield interval per question pair from the seven gains.

    Requires the vacuum decoy (omega = 0): the J combinations as implemented
    assume e^omega = 1. Statistical errors propagate first order through the
    linear J combinations with binomial variance per gain; J1 and J2 share
    the vacuum-vacuum gain, which contributes their only covariance.
    """
    if intensities.omega != 0.0:
        raise ValueError("yield bounds require the vacuum decoy omega = 0")
    mu, nu = intensities.mu, intensities.nu
    d = mu ** 2 * nu ** 2 * (mu - nu)
    shift = upper_shift(intensities)

    bounds = {}
    std = {}
    for (x, y) in gains.question_pairs():
        e = {pair: gains.get(x, y, pair) for pair in PAIR_KEYS}
        j1 = (e[("nu", "nu")].gain * math.exp(2 * nu) + e[("omega", "omega")].gain
              - (e[("nu", "omega")].gain + e[("omega", "nu")].gain) * math.exp(nu))
        j2 = (e[("mu", "mu")].gain * math.exp(2 * mu) + e[("omega", "omega")].gain
              - (e[("mu", "omega")].gain + e[("omega", "mu")].gain) * math.exp(mu))
        lower_raw = (mu ** 3 * j1 - nu ** 3 * j2) / d
        upper_raw = lower_raw + shift
        lower = min(max(lower_raw, 0.0), 1.0)
        upper = min(max(upper_raw, 0.0), 1.0)
        if lower > upper:
            raise InconsistentStatisticsError(
                f"empty yield interval [{lower}, {upper}] for ({x}, {y})")
        bounds[(x, y)] = (lower, upper)

        var_j1 = (math.exp(4 * nu) * e[("nu", "nu")].variance
                  + e[("omega", "omega")].variance
                  + math.exp(2 * nu) * (e[("nu", "omega")].variance
                                        + e[("omega", "nu")].variance))
        var_j2 = (math.exp(4 * mu) * e[("mu", "mu")].variance
                  + e[("omega", "omega")].variance
                  + math.exp(2 * mu) * (e[("mu", "omega")].variance
                                        + e[("omega", "mu")].variance))
        cov = e[("omega", "omega")].variance
        var_lower = (mu ** 6 * var_j1 + nu ** 6 * var_j2
                     - 2 * mu ** 3 * nu ** 3 * cov) / d ** 2
        std[(x, y)] = math.sqrt(max(var_lower, 0.0))
    return YieldBounds(bounds, std)


def payoff_lower_bound(bounds: YieldBounds, table: PayoffTable,
                       scale: float = 1.0) -> float:
    """Payoff-weighted sum of yield bounds, endpoint chosen by payoff sign.

    Positive payoffs take the lower endpoint and negative payoffs the upper,
    so the result lower-bounds the single-photon payoff. `scale` divides the
    yields, converting detector-level yields to state-level probabilities
    when a calibration factor is known.
    """
    total = 0.0
    for _, _, x, y, v in table.nonzero_items():
        if (x, y) not in bounds.bounds:
            raise ValueError(f"yield bounds missing for scoring pair ({x}, {y})")
        endpoint = bounds.lower(x, y) if v > 0 else bounds.upper(x, y)
        total += v * endpoint / scale
    return total


def payoff_lower_std(bounds: YieldBounds, table: PayoffTable,
                     scale: float = 1.0) -> float:
    """1-sigma error of the payoff lower bound; settings are independent."""
    var = 0.0
    for _, _, x, y, v in table.nonzero_items():
        var += (v / scale) ** 2 * bounds.std[(x, y)] ** 2
    return math.sqrt(var)


def raw_gain_payoff(gains: GainRecord, table: PayoffTable,
                    pair=("mu", "mu"), scale: float = 1.0) -> float:
    """Payoff with raw gains substituted for probabilities (no decoy analysis)."""
    total = 0.0
    for _, _, x, y, v in table.nonzero_items():
        total += v * gains.get(x, y, pair).gain / scale
    return total


@dataclass(frozen=True)
class CertificationVerdict:
    payoff_lower: float
    eb_bound: float
    certified: bool
    std_error: float


def certify(gains: GainRecord, intensities: IntensitySet, table: PayoffTable,
            eb_result, yield_scale: float = 1.0) -> CertificationVerdict:
    """Full verdict: extract yield bounds, form the payoff bound, compare.

    `eb_result` is the separable-bound result (or its bare value). The
    channel is declared non-entanglement-breaking when the payoff lower
    bound strictly exceeds it.
    """
    bound_value = float(getattr(eb_result, "value", eb_result))
    bounds = y11_bounds(gains, intensities)
    payoff = payoff_lower_bound(bounds, table, yield_scale)
    std = payoff_lower_std(bounds, table, yield_scale)
    return CertificationVerdict(
        payoff_lower=payoff,
        eb_bound=bound_value,
        certified=payoff > bound_value,
        std_error=std,
    )
