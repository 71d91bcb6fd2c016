"""Command-line driver: tau sweeps to CSV and circuit export to OpenQASM.

Exit codes: 0 success, 2 configuration error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import math
import sys
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Sequence

import numpy as np

from . import circuits, measurement, model
from .gates import Circuit, run_circuit, to_qasm
from .model import IntensityRecord

CSV_HEADER = ("tau", "J0_analytic", "J2_analytic", "J0_sim", "J2_sim", "source")
EXPERIMENTS = ("pure", "thermal")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SweepConfig:
    experiment: str = "pure"
    beta: float = circuits.DEFAULT_BETA
    tau_start: float = 0.0
    tau_end: float = 2 * math.pi
    points: int = 65
    shots: int = 0
    noise_p: float = 0.0
    seed: int = 0
    out: str | None = None

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"experiment must be one of {EXPERIMENTS}, got {self.experiment!r}")
        if self.points < 2:
            raise ConfigError(f"points must be at least 2, got {self.points}")
        if not (math.isfinite(self.tau_start) and math.isfinite(self.tau_end)):
            raise ConfigError("tau range must be finite")
        if not self.tau_start < self.tau_end:
            raise ConfigError(f"need tau_start < tau_end, got {self.tau_start} >= {self.tau_end}")
        if self.shots < 0:
            raise ConfigError(f"shots must be >= 0, got {self.shots}")
        if not 0.0 <= self.noise_p <= 1.0:
            raise ConfigError(f"noise must lie in [0, 1], got {self.noise_p}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.experiment == "thermal" and not (self.beta > 0 and math.isfinite(self.beta)):
            raise ConfigError(f"beta must be positive and finite, got {self.beta}")

    @property
    def exact(self) -> bool:
        return self.shots == 0 and self.noise_p == 0.0

    def taus(self) -> np.ndarray:
        return np.linspace(self.tau_start, self.tau_end, self.points)


@dataclass(frozen=True)
class SweepRow:
    analytic: IntensityRecord
    simulated: IntensityRecord

    def csv_fields(self) -> list[str]:
        return [
            _fmt(self.analytic.tau),
            _fmt(self.analytic.j0),
            _fmt(self.analytic.j2),
            _fmt(self.simulated.j0),
            _fmt(self.simulated.j2),
            self.simulated.source,
        ]


def _fmt(x: float) -> str:
    return f"{x:.15g}"


def experiment_circuit(experiment: str, tau: float, beta: float = circuits.DEFAULT_BETA) -> Circuit:
    if experiment == "pure":
        return circuits.pure_ground_circuit(tau)
    if experiment == "thermal":
        return circuits.thermal_full_circuit(beta, tau)
    raise ConfigError(f"unknown experiment {experiment!r}")


def simulate_point(config: SweepConfig, tau: float, index: int) -> IntensityRecord:
    """Simulated intensities at one grid point; shot seeds are ``seed + index``."""
    circuit = experiment_circuit(config.experiment, tau, config.beta)
    subset = (1, 2) if config.experiment == "pure" else circuits.DIMER_QUBITS
    if config.noise_p > 0:
        state = measurement.run_noisy_circuit(circuit, measurement.NoiseModel(config.noise_p))
    else:
        state = run_circuit(circuit)
    if config.shots > 0:
        hist = measurement.sample(state, subset, config.shots, seed=config.seed + index)
        freqs, source = hist.frequencies(), "sampled"
    else:
        freqs, source = measurement.exact_frequencies(state, subset), "exact-circuit"
    if config.experiment == "pure":
        return measurement.estimate_pure_from_frequencies(freqs, float(tau), source)
    return measurement.estimate_thermal_from_frequencies(freqs, float(tau), config.beta, source)


def analytic_point(config: SweepConfig, tau: float) -> IntensityRecord:
    if config.experiment == "pure":
        return model.analytic_intensities_pure(tau)
    return model.analytic_intensities_thermal(config.beta, tau)


def run_sweep(config: SweepConfig) -> list[SweepRow]:
    rows = []
    for i, tau in enumerate(config.taus()):
        tau = float(tau)
        rows.append(SweepRow(analytic_point(config, tau), simulate_point(config, tau, i)))
    return rows


def format_csv(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow(row.csv_fields())
    return buf.getvalue()


def write_sweep(config: SweepConfig) -> str:
    text = format_csv(run_sweep(config))
    if config.out is None or config.out == "-":
        sys.stdout.write(text)
    else:
        Path(config.out).write_text(text)
    return text


def export_circuit(experiment: str, path, tau: float, beta: float = circuits.DEFAULT_BETA) -> str:
    text = to_qasm(experiment_circuit(experiment, tau, beta))
    Path(path).write_text(text)
    return text


# --- argument handling ---------------------------------------------------

_CONFIG_KEYS = {f.name: f.type for f in fields(SweepConfig)}
_ALIASES = {"noise": "noise_p", "tau-start": "tau_start", "tau-end": "tau_end"}


def _coerce(key: str, value: str):
    if key in ("points", "shots", "seed"):
        return int(value)
    if key in ("beta", "tau_start", "tau_end", "noise_p", "tau"):
        return float(value)
    return value


def read_config_file(path) -> dict:
    """``key = value`` lines; keys match the long flag names (dashes or underscores)."""
    text = Path(path).read_text()
    parser = configparser.ConfigParser(comment_prefixes=("#", ";"), inline_comment_prefixes=("#",))
    parser.read_string("[sweep]\n" + text)
    values = {}
    for raw_key, raw in parser["sweep"].items():
        key = _ALIASES.get(raw_key, raw_key.replace("-", "_"))
        if key not in _CONFIG_KEYS and key != "tau":
            raise ConfigError(f"unknown config key {raw_key!r}")
        try:
            values[key] = _coerce(key, raw)
        except ValueError:
            raise ConfigError(f"bad value for {raw_key!r}: {raw!r}") from None
    return values


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="mqdimer",
        description="Sweep MQ NMR intensities of a spin dimer or export its circuits.",
    )
    p.add_argument("--config", help="key = value file; command-line flags take precedence")
    p.add_argument("--experiment", choices=EXPERIMENTS)
    p.add_argument("--beta", type=float, help="inverse temperature (thermal only, default 2.12)")
    p.add_argument("--tau-start", dest="tau_start", type=float)
    p.add_argument("--tau-end", dest="tau_end", type=float)
    p.add_argument("--points", type=int)
    p.add_argument("--shots", type=int, help="0 uses exact probabilities")
    p.add_argument("--noise", dest="noise_p", type=float, help="depolarizing probability per gate")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="CSV path ('-' for stdout)")
    p.add_argument("--export-qasm", dest="export_qasm", metavar="PATH")
    p.add_argument("--tau", type=float, help="evolution time for --export-qasm (default tau-start)")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        settings = read_config_file(args.config) if args.config else {}
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, configparser.Error) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for key, value in vars(args).items():
        if key != "config" and value is not None:
            settings[key] = value
    export_path = settings.pop("export_qasm", None)
    export_tau = settings.pop("tau", None)

    try:
        config = SweepConfig(**settings)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        if export_path is not None:
            tau = config.tau_start if export_tau is None else export_tau
            if not math.isfinite(tau):
                print("error: tau must be finite", file=sys.stderr)
                return EXIT_CONFIG
            export_circuit(config.experiment, export_path, tau, config.beta)
        if export_path is None or config.out is not None:
            write_sweep(config)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
