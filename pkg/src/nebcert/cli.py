"""Batch experiment runner: sweeps, theory curves, bound evaluation.

Certification payoffs from detector-level yields are calibrated to state
scale by the known detection factor (efficiency * window)^2 of the
configured detector pair, so they compare directly against the
separable-state bound. The no-decoy column applies the same detector
calibration to the raw signal-intensity gains and nothing more: without
the decoy analysis there is no way to divide out the Poisson weight of the
single-photon-pair events, and that unremoved weight is exactly what
cripples raw-gain certification. Sweep outputs are a CSV of plot-ready
columns, a JSON sidecar with the resolved configuration and environment
fingerprint, and rendered figures (unless disabled).
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import platform
import sys
from dataclasses import dataclass, replace
from pathlib import Path

import matplotlib
import numpy as np

from . import __version__, figures, game, qkd
from .channels import decoherence, identity
from .decoy import (InconsistentStatisticsError, IntensitySet, certify,
                    raw_gain_payoff, y11_bounds)
from .ebbound import eb_bound
from .game import PayoffTable, four_state_table, six_state_table, table_from_dict
from .optics import DetectorModel, OpticalChannel, SimConfig, simulate_gains
from .qubit import read_tomography_csv

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INCONSISTENT = 3

DEFAULT_INTENSITIES = IntensitySet(mu=0.05, nu=0.01, omega=0.0)

_PARAM_DOMAIN = {"gamma": (0.0, 1.0), "beta": (0.0, math.inf)}


@dataclass(frozen=True)
class SweepSpec:
    """One batch run: which parameter to sweep and how to simulate each point."""

    parameter: str
    values: tuple
    table_kind: str
    states_source: str
    sim: SimConfig
    custom_table: dict | None = None

    def __post_init__(self):
        if self.parameter not in _PARAM_DOMAIN:
            raise ValueError(f"parameter must be 'gamma' or 'beta', got {self.parameter!r}")
        lo, hi = _PARAM_DOMAIN[self.parameter]
        vals = tuple(float(v) for v in self.values)
        if any(not lo <= v <= hi for v in vals):
            raise ValueError(f"{self.parameter} values must lie in [{lo}, {hi}]: {vals}")
        if list(vals) != sorted(vals):
            raise ValueError("sweep values must be sorted ascending")
        if self.table_kind not in ("six_state", "four_state", "custom"):
            raise ValueError(f"unknown table_kind {self.table_kind!r}")
        if self.table_kind == "custom" and self.custom_table is None:
            raise ValueError("table_kind 'custom' requires a 'table' object")
        object.__setattr__(self, "values", vals)


def _sim_from_dict(d: dict) -> SimConfig:
    intens = d.get("intensities", {})
    det = d.get("detector", {})
    return SimConfig(
        intensities=IntensitySet(
            mu=float(intens.get("mu", DEFAULT_INTENSITIES.mu)),
            nu=float(intens.get("nu", DEFAULT_INTENSITIES.nu)),
            omega=float(intens.get("omega", 0.0)),
        ),
        detector=DetectorModel(
            efficiency=float(det.get("efficiency", DetectorModel.efficiency)),
            dark_prob=float(det.get("dark_prob", DetectorModel.dark_prob)),
            window_fraction=float(det.get("window_fraction", DetectorModel.window_fraction)),
            noise_beta=float(det.get("noise_beta", 0.0)),
        ),
        trials_per_setting=int(d.get("trials_per_setting", 1_000_000)),
        seed=int(d.get("seed", 0)),
        mode=str(d.get("mode", "analytic")),
        phase_grid=int(d.get("phase_grid", 64)),
        exclusive_coincidence=bool(d.get("exclusive_coincidence", True)),
    )


def load_sweep_spec(path) -> SweepSpec:
    try:
        raw = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    try:
        return SweepSpec(
            parameter=raw["parameter"],
            values=tuple(raw["values"]),
            table_kind=raw.get("table_kind", "six_state"),
            states_source=raw.get("states_source", "ideal"),
            sim=_sim_from_dict(raw.get("sim", {})),
            custom_table=raw.get("table"),
        )
    except KeyError as exc:
        raise ValueError(f"{path}: missing config field {exc}") from exc


def build_table(kind: str, states_source: str = "ideal",
                custom_table: dict | None = None) -> PayoffTable:
    """Payoff table with states taken from a tomography file or the ideal set."""
    if kind == "custom":
        table = table_from_dict(custom_table)
        if states_source != "ideal":
            raise ValueError("custom tables take their states from the table object")
        return table
    labels = six_state_table().labels_xi if kind == "six_state" else four_state_table().labels_xi
    if states_source == "ideal":
        xi = psi = None
    else:
        states = read_tomography_csv(states_source)
        try:
            xi = tuple(states["xi"][l] for l in labels)
            psi = tuple(states["psi"][l] for l in labels)
        except KeyError as exc:
            raise ValueError(f"{states_source} is missing state {exc} for the {kind} table") from exc
    if kind == "six_state":
        return six_state_table(xi, psi)
    return four_state_table(xi, psi)


def _point_config(spec: SweepSpec, value: float) -> SimConfig:
    if spec.parameter == "gamma":
        channel = OpticalChannel("decoherence", value) if value > 0 else OpticalChannel()
        return replace(spec.sim, channel=channel)
    detector = replace(spec.sim.detector, noise_beta=value)
    return replace(spec.sim, detector=detector)


def run_sweep(spec: SweepSpec) -> tuple[list[dict], dict]:
    """Simulate, bound and certify every sweep point.

    Returns (rows, meta); rows are ordered by parameter value and carry
    param, payoff_lower, std_error, eb_bound, certified, payoff_nodecoy and,
    for background sweeps over a table with an X basis, key_rate.
    """
    table = build_table(spec.table_kind, spec.states_source, spec.custom_table)
    bound = eb_bound(table, seed=spec.sim.seed)
    kappa = spec.sim.detector.detection_scale
    with_key_rate = (spec.parameter == "beta"
                     and any(x.basis == "X" for _, _, x, _, _ in table.nonzero_items()))

    rows = []
    for value in spec.values:
        config = _point_config(spec, value)
        gains = simulate_gains(config, table)
        verdict = certify(gains, config.intensities, table, bound,
                          yield_scale=config.detector.detection_scale)
        row = {
            "param": value,
            "payoff_lower": verdict.payoff_lower,
            "std_error": verdict.std_error,
            "eb_bound": verdict.eb_bound,
            "certified": verdict.certified,
            "payoff_nodecoy": raw_gain_payoff(gains, table, scale=kappa),
        }
        if with_key_rate:
            bounds = y11_bounds(gains, config.intensities)
            row["key_rate"] = qkd.key_rate_from_data(gains, bounds, config.intensities)
        rows.append(row)

    meta = {
        "spec": {
            "parameter": spec.parameter,
            "values": list(spec.values),
            "table_kind": spec.table_kind,
            "states_source": spec.states_source,
            "sim": {
                "intensities": {"mu": spec.sim.intensities.mu,
                                "nu": spec.sim.intensities.nu,
                                "omega": spec.sim.intensities.omega},
                "detector": {"efficiency": spec.sim.detector.efficiency,
                             "dark_prob": spec.sim.detector.dark_prob,
                             "window_fraction": spec.sim.detector.window_fraction,
                             "noise_beta": spec.sim.detector.noise_beta},
                "trials_per_setting": spec.sim.trials_per_setting,
                "seed": spec.sim.seed,
                "mode": spec.sim.mode,
                "phase_grid": spec.sim.phase_grid,
                "exclusive_coincidence": spec.sim.exclusive_coincidence,
            },
        },
        "eb_bound": bound.to_record(),
        "yield_scale": kappa,
        "environment": {
            "nebcert": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "matplotlib": matplotlib.__version__,
            "platform": platform.platform(),
        },
    }
    return rows, meta


def report_theory_curve(table_kind: str, parameter: str, values,
                        sim: SimConfig | None = None) -> list[dict]:
    """Ideal single-photon payoff next to the realistic-source expectation.

    The ideal column evaluates the lossless single-photon payoff; the
    realistic column runs the analytic-mode pipeline (exact expectations,
    no sampling) and reports the decoy payoff lower bound at state scale.
    """
    sim = sim if sim is not None else SimConfig(intensities=DEFAULT_INTENSITIES)
    sim = replace(sim, mode="analytic")
    spec = SweepSpec(parameter=parameter, values=tuple(values),
                     table_kind=table_kind, states_source="ideal", sim=sim)
    table = build_table(table_kind)
    rows, _ = run_sweep(spec)
    out = []
    for row in rows:
        value = row["param"]
        ch = decoherence(value) if parameter == "gamma" else identity()
        out.append({
            "param": value,
            "ideal_payoff": game.ideal_payoff(ch, table),
            "rsmdi_payoff": row["payoff_lower"],
        })
    return out


def _write_csv(path, rows, columns) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row[c]) for c in columns])


def _fmt(value):
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return repr(value)
    return value


def _cmd_certify(args) -> int:
    spec = load_sweep_spec(args.config)
    if args.mode:
        spec = replace(spec, sim=replace(spec.sim, mode=args.mode))
    if args.seed is not None:
        spec = replace(spec, sim=replace(spec.sim, seed=args.seed))
    rows, meta = run_sweep(spec)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    columns = ["param", "payoff_lower", "std_error", "eb_bound", "certified",
               "payoff_nodecoy"]
    if rows and "key_rate" in rows[0]:
        columns.append("key_rate")
    _write_csv(out / "certify.csv", rows, columns)
    (out / "certify.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    if not args.no_figures:
        figures.render_sweep_figure(rows, out / "certify.png", spec.parameter)
    print(f"wrote {out / 'certify.csv'}")
    return EXIT_OK


def _cmd_theory(args) -> int:
    kind = {"six": "six_state", "four": "four_state"}[args.table]
    values = _parse_values(args.values)
    sim = SimConfig(intensities=IntensitySet(args.mu, args.nu, 0.0))
    rows = report_theory_curve(kind, args.param, values, sim)
    columns = ["param", "ideal_payoff", "rsmdi_payoff"]
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        _write_csv(out / "theory.csv", rows, columns)
        figures.render_theory_figure(rows, out / "theory.png", args.param)
        print(f"wrote {out / 'theory.csv'}")
    else:
        writer = csv.writer(sys.stdout)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row[c]) for c in columns])
    return EXIT_OK


def _cmd_bound(args) -> int:
    kind = {"six": "six_state", "four": "four_state"}[args.table]
    table = build_table(kind, args.states)
    result = eb_bound(table, restarts=args.restarts, seed=args.seed)
    print(json.dumps(result.to_record(), indent=2, sort_keys=True))
    return EXIT_OK


def _parse_values(text: str) -> list[float]:
    text = text.strip()
    if not text:
        return []
    return [float(v) for v in text.split(",")]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nebcert",
        description="Certify non-entanglement-breaking qubit channels from "
                    "weak-coherent-pulse statistics.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_cert = sub.add_parser("certify", help="run a parameter sweep and certify each point")
    p_cert.add_argument("--config", required=True, help="sweep config JSON")
    p_cert.add_argument("--out", required=True, help="output directory")
    p_cert.add_argument("--mode", choices=["analytic", "montecarlo"],
                        help="override the configured simulation mode")
    p_cert.add_argument("--seed", type=int, help="override the configured seed")
    p_cert.add_argument("--no-figures", action="store_true",
                        help="skip figure rendering")
    p_cert.set_defaults(func=_cmd_certify)

    p_theory = sub.add_parser("theory", help="ideal and realistic theory curves")
    p_theory.add_argument("--table", choices=["six", "four"], required=True)
    p_theory.add_argument("--param", choices=["gamma", "beta"], required=True)
    p_theory.add_argument("--values", required=True, help="comma-separated list")
    p_theory.add_argument("--mu", type=float, default=DEFAULT_INTENSITIES.mu)
    p_theory.add_argument("--nu", type=float, default=DEFAULT_INTENSITIES.nu)
    p_theory.add_argument("--out", help="output directory (default: CSV to stdout)")
    p_theory.set_defaults(func=_cmd_theory)

    p_bound = sub.add_parser("bound", help="separable-state payoff bound for prepared states")
    p_bound.add_argument("--states", required=True, help="tomography CSV")
    p_bound.add_argument("--table", choices=["six", "four"], required=True)
    p_bound.add_argument("--restarts", type=int, default=64)
    p_bound.add_argument("--seed", type=int, default=0)
    p_bound.set_defaults(func=_cmd_bound)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InconsistentStatisticsError as exc:
        print(f"error: inconsistent statistics: {exc}", file=sys.stderr)
        return EXIT_INCONSISTENT
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
