"""Monte Carlo detection-probability sweeps.

A sweep varies one axis (SNR, channel order, subcarrier count, CP length
or modulation order) over a base configuration and estimates, per axis
value, the probability that the blind estimator recovers the true
subcarrier count. Trial seeds are derived from (master_seed, axis_index,
trial_index) alone, so results are identical however the trials are
scheduled, and a rerun of the same spec is byte-for-byte reproducible.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from configparser import ConfigParser
from dataclasses import dataclass, replace
from importlib import resources

import numpy as np

from .channel import ChannelConfig, apply_block_channel, draw_realization
from .errors import ConfigError, DataError
from .estimator import EstimatorConfig, estimate_n
from .transmitter import OfdmConfig, generate_stream

AXES = ("snr_db", "num_taps", "n_subcarriers", "mod_order", "cp_len")

# Two-sided 95% normal quantile for the Wilson interval.
_WILSON_Z = 1.959963984540054

PRESET_NAMES = ("fig2", "fig3", "fig4", "fig5")


@dataclass(frozen=True)
class SweepSpec:
    """Base configuration plus the axis to sweep and the trial budget."""
    axis: str
    axis_values: tuple
    ofdm: OfdmConfig
    num_taps: int
    snr_db: float
    n_min: int
    n_max: int
    trials: int
    master_seed: int
    label: str = "sweep"

    def __post_init__(self):
        if self.axis not in AXES:
            raise ConfigError(f"axis must be one of {AXES}, got {self.axis!r}")
        if not self.axis_values:
            raise ConfigError("axis_values must be non-empty")
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        for value in self.axis_values:
            try:
                point_configs(self, value)
            except ConfigError as err:
                raise ConfigError(f"axis point {self.axis}={value}: {err}") from None


@dataclass(frozen=True)
class SweepPoint:
    axis_value: float
    pd: float
    trials: int
    ci_halfwidth: float


@dataclass(frozen=True)
class SweepResult:
    points: tuple
    spec: SweepSpec
    version: str


def point_configs(spec: SweepSpec, axis_value):
    """Derive the per-point config bundle with the axis value applied."""
    ofdm = spec.ofdm
    num_taps, snr_db = spec.num_taps, spec.snr_db
    cp_len = ofdm.cp_len
    if spec.axis == "snr_db":
        snr_db = float(axis_value)
    elif spec.axis == "num_taps":
        num_taps = int(axis_value)
    elif spec.axis == "n_subcarriers":
        ofdm = replace(ofdm, n_subcarriers=int(axis_value))
    elif spec.axis == "mod_order":
        ofdm = replace(ofdm, mod_order=int(axis_value))
    else:
        cp_len = int(axis_value)
        ofdm = replace(ofdm, cp_len=cp_len)
    chan = ChannelConfig(num_taps=num_taps, snr_db=snr_db, block_len=ofdm.block_len)
    est = EstimatorConfig(
        cp_len=cp_len, num_taps=num_taps, n_min=spec.n_min, n_max=spec.n_max
    )
    return ofdm, chan, est


def run_trial(ofdm_cfg: OfdmConfig, chan_cfg: ChannelConfig,
              est_cfg: EstimatorConfig, trial_seed) -> bool:
    """One generate/channel/estimate round; True iff N was recovered.

    trial_seed is any SeedSequence entropy (int or tuple of ints); data,
    channel and noise each get their own child stream so holding one
    fixed while varying the others stays possible.
    """
    ss = np.random.SeedSequence(trial_seed)
    data_ss, chan_ss, noise_ss = ss.spawn(3)
    s = generate_stream(ofdm_cfg, data_ss)
    real = draw_realization(chan_cfg, ofdm_cfg.num_blocks, chan_ss)
    r = apply_block_channel(s, real, noise_ss if real.noise_var > 0 else None)
    report = estimate_n(r, est_cfg)
    return report.n_hat == ofdm_cfg.n_subcarriers


def wilson_halfwidth(successes: int, trials: int) -> float:
    """Half-width of the 95% Wilson score interval for a proportion."""
    if trials < 1:
        raise ConfigError("trials must be >= 1")
    z2 = _WILSON_Z ** 2
    p = successes / trials
    return (_WILSON_Z / (1.0 + z2 / trials)) * math.sqrt(
        p * (1.0 - p) / trials + z2 / (4.0 * trials ** 2)
    )


def run_sweep(spec: SweepSpec, workers: int | None = None) -> SweepResult:
    """Run every (axis value, trial) pair and aggregate Pd per point.

    Trials may run on a thread pool; each one is a pure function of its
    seed tuple, and aggregation is a commutative count, so the worker
    count cannot change the result.
    """
    from . import __version__

    jobs = []
    for axis_index, value in enumerate(spec.axis_values):
        bundle = point_configs(spec, value)
        for trial_index in range(spec.trials):
            seed = (spec.master_seed, axis_index, trial_index)
            jobs.append((axis_index, bundle, seed))

    def one(job):
        _, bundle, seed = job
        return run_trial(*bundle, seed)

    if workers is not None and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(one, jobs))
    else:
        outcomes = [one(job) for job in jobs]

    wins = [0] * len(spec.axis_values)
    for (axis_index, _, _), ok in zip(jobs, outcomes):
        wins[axis_index] += ok
    points = tuple(
        SweepPoint(
            axis_value=value,
            pd=wins[i] / spec.trials,
            trials=spec.trials,
            ci_halfwidth=wilson_halfwidth(wins[i], spec.trials),
        )
        for i, value in enumerate(spec.axis_values)
    )
    return SweepResult(points=points, spec=spec, version=__version__)


def emit_csv(result: SweepResult, path) -> None:
    """Write the sweep as CSV plus a key=value provenance sidecar."""
    spec = result.spec
    try:
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write("axis,axis_value,pd,trials,ci_halfwidth\n")
            for pt in result.points:
                fh.write(
                    f"{spec.axis},{float(pt.axis_value):.10g},{pt.pd:.6f},"
                    f"{pt.trials},{pt.ci_halfwidth:.6f}\n"
                )
        with open(f"{path}.provenance.txt", "w", encoding="ascii", newline="\n") as fh:
            for key, value in _provenance_fields(result).items():
                fh.write(f"{key}={value}\n")
    except OSError as err:
        raise DataError(f"cannot write {path}: {err}") from None


def _provenance_fields(result: SweepResult) -> dict:
    spec = result.spec
    return {
        "version": result.version,
        "label": spec.label,
        "axis": spec.axis,
        "axis_values": ",".join(f"{float(v):.10g}" for v in spec.axis_values),
        "trials": spec.trials,
        "master_seed": spec.master_seed,
        "n_subcarriers": spec.ofdm.n_subcarriers,
        "cp_len": spec.ofdm.cp_len,
        "symbols_per_block": spec.ofdm.symbols_per_block,
        "num_blocks": spec.ofdm.num_blocks,
        "mod_order": spec.ofdm.mod_order,
        "num_taps": spec.num_taps,
        "snr_db": spec.snr_db,
        "n_min": spec.n_min,
        "n_max": spec.n_max,
    }


# --- sweep spec files -----------------------------------------------------

_INT_KEYS = ("n", "cp", "symbols", "blocks", "mod", "taps",
             "n_min", "n_max", "trials", "master_seed")


def _spec_from_section(name: str, section) -> SweepSpec:
    try:
        axis = section["axis"]
        raw_values = [v for v in section["axis_values"].split(",") if v.strip()]
        values = tuple(
            float(v) if axis == "snr_db" else int(v) for v in raw_values
        )
        fields = {key: int(section[key]) for key in _INT_KEYS}
        snr_db = float(section["snr_db"])
    except KeyError as err:
        raise ConfigError(f"sweep spec [{name}] is missing key {err}") from None
    except ValueError as err:
        raise ConfigError(f"sweep spec [{name}]: {err}") from None
    ofdm = OfdmConfig(
        n_subcarriers=fields["n"],
        cp_len=fields["cp"],
        symbols_per_block=fields["symbols"],
        num_blocks=fields["blocks"],
        mod_order=fields["mod"],
    )
    return SweepSpec(
        axis=axis,
        axis_values=values,
        ofdm=ofdm,
        num_taps=fields["taps"],
        snr_db=snr_db,
        n_min=fields["n_min"],
        n_max=fields["n_max"],
        trials=fields["trials"],
        master_seed=fields["master_seed"],
        label=name,
    )


def parse_sweep_specs(text: str) -> dict:
    """Parse key=value sweep sections from a config string."""
    parser = ConfigParser()
    parser.read_string(text)
    return {name: _spec_from_section(name, parser[name]) for name in parser.sections()}


def load_spec_file(path) -> dict:
    try:
        with open(path, encoding="ascii") as fh:
            return parse_sweep_specs(fh.read())
    except OSError as err:
        raise DataError(f"cannot read sweep spec {path}: {err}") from None


def load_preset(name: str, scale: str = "desk") -> SweepSpec:
    """Load one of the packaged figure presets at desk or paper scale."""
    if name not in PRESET_NAMES:
        raise ConfigError(f"unknown preset {name!r}, choose from {PRESET_NAMES}")
    if scale not in ("desk", "paper"):
        raise ConfigError(f"scale must be 'desk' or 'paper', got {scale!r}")
    text = resources.files(__package__).joinpath("presets.ini").read_text()
    specs = parse_sweep_specs(text)
    section = name if scale == "desk" else f"{name}.paper"
    return specs[section]
