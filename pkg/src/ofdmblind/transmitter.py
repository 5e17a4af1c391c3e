"""CP-OFDM transmit stream synthesis.

The chain is the textbook one: random bits become Gray-mapped square-QAM
symbols, each block of M symbol vectors passes through a unitary IDFT,
a cyclic prefix of P samples is prepended to every time-domain symbol,
and the resulting (N+P) x M blocks are serialized column by column into
one long baseband stream of K*T samples, T = M*(N+P).

Also houses the raw IQ file format used at the process boundary:
little-endian interleaved float32 (re, im) pairs with no header, plus a
flat key=value sidecar carrying the generating parameters.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DataError
from .numerics import idft_apply

SUPPORTED_MOD_ORDERS = (4, 16, 64, 256)


@dataclass(frozen=True)
class OfdmConfig:
    """Transmitter parameters; all counts are per the usual CP-OFDM layout."""
    n_subcarriers: int
    cp_len: int
    symbols_per_block: int
    num_blocks: int
    mod_order: int = 4

    def __post_init__(self):
        n, p = self.n_subcarriers, self.cp_len
        if n < 2:
            raise ConfigError(f"n_subcarriers must be >= 2, got {n}")
        if p < 1:
            raise ConfigError(f"cp_len must be >= 1, got {p}")
        if p > n:
            # The CP copies rows of an N-row matrix; more rows do not exist.
            raise ConfigError(f"cp_len {p} exceeds n_subcarriers {n}")
        if self.symbols_per_block < 1:
            raise ConfigError(f"symbols_per_block must be >= 1, got {self.symbols_per_block}")
        if self.num_blocks < 1:
            raise ConfigError(f"num_blocks must be >= 1, got {self.num_blocks}")
        if self.mod_order not in SUPPORTED_MOD_ORDERS:
            raise ConfigError(
                f"mod_order must be one of {SUPPORTED_MOD_ORDERS}, got {self.mod_order}"
            )

    @property
    def symbol_len(self) -> int:
        return self.n_subcarriers + self.cp_len

    @property
    def block_len(self) -> int:
        """T = M*(N+P), samples per block."""
        return self.symbols_per_block * self.symbol_len

    @property
    def stream_len(self) -> int:
        return self.num_blocks * self.block_len


@dataclass(frozen=True)
class IqSequence:
    """A complex baseband stream, optionally tagged with its generating config."""
    samples: np.ndarray
    meta: OfdmConfig | None = None

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=complex)
        arr.flags.writeable = False
        object.__setattr__(self, "samples", arr)
        if self.meta is not None and len(arr) != self.meta.stream_len:
            raise ConfigError(
                f"stream length {len(arr)} does not match config ({self.meta.stream_len})"
            )

    def __len__(self) -> int:
        return len(self.samples)


def _gray_to_index(bits: np.ndarray) -> np.ndarray:
    """Decode per-axis Gray bit rows (MSB first) to level indices."""
    idx = np.zeros(bits.shape[0], dtype=int)
    acc = np.zeros(bits.shape[0], dtype=int)
    for col in range(bits.shape[1]):
        acc ^= bits[:, col]
        idx = (idx << 1) | acc
    return idx


def map_qam(bits: np.ndarray, mod_order: int) -> np.ndarray:
    """Map a flat 0/1 array onto unit-power Gray-coded square QAM.

    Each symbol consumes log2(mod_order) bits: the first half selects the
    in-phase level, the second half the quadrature level. Within an axis
    the bits are Gray-coded so adjacent amplitude levels differ in one
    bit, with the all-zeros pattern on the most positive level; 4-QAM
    therefore sends bits 00 to (1+1j)/sqrt(2). The constellation is
    scaled to unit average power.
    """
    if mod_order not in SUPPORTED_MOD_ORDERS:
        raise ConfigError(f"unsupported mod_order {mod_order}")
    bits = np.asarray(bits, dtype=int)
    bps = int(np.log2(mod_order))
    if bits.ndim != 1 or len(bits) % bps != 0:
        raise ConfigError(f"bit count {bits.shape} not divisible by {bps}")
    half = bps // 2
    grouped = bits.reshape(-1, bps)
    top = (1 << half) - 1
    i_amp = top - 2 * _gray_to_index(grouped[:, :half])
    q_amp = top - 2 * _gray_to_index(grouped[:, half:])
    scale = np.sqrt(2.0 * (mod_order - 1) / 3.0)
    return (i_amp + 1j * q_amp) / scale


def qam_constellation(mod_order: int) -> np.ndarray:
    """All mod_order points, indexed by their bit pattern read MSB first."""
    bps = int(np.log2(mod_order))
    patterns = np.array(
        [[(i >> (bps - 1 - b)) & 1 for b in range(bps)] for i in range(mod_order)]
    )
    return map_qam(patterns.ravel(), mod_order)


def build_cp_block(freq_block: np.ndarray, cfg: OfdmConfig) -> np.ndarray:
    """IDFT an N x M block and prepend the cyclic prefix.

    Output is (N+P) x M; by construction row i equals row i+N for
    i = 0..P-1 (0-based), which is the redundancy the estimator exploits.
    """
    fb = np.asarray(freq_block, dtype=complex)
    n, p = cfg.n_subcarriers, cfg.cp_len
    if fb.shape != (n, cfg.symbols_per_block):
        raise ConfigError(
            f"frequency block shape {fb.shape} does not match config "
            f"({n} x {cfg.symbols_per_block})"
        )
    time_block = idft_apply(fb)
    return np.vstack([time_block[n - p:, :], time_block])


def serialize_block(cp_block: np.ndarray) -> np.ndarray:
    """Stack the columns of a CP block into one vector (vec operator)."""
    return np.asarray(cp_block, dtype=complex).ravel(order="F")


def generate_stream(cfg: OfdmConfig, seed) -> IqSequence:
    """Generate the full K-block transmit stream from a seeded RNG.

    `seed` is anything numpy's default_rng accepts (int, SeedSequence,
    Generator). Symbols are drawn uniformly over the constellation, which
    is equivalent to mapping i.i.d. uniform bits.
    """
    rng = np.random.default_rng(seed)
    points = qam_constellation(cfg.mod_order)
    blocks = []
    for _ in range(cfg.num_blocks):
        idx = rng.integers(0, cfg.mod_order, size=(cfg.n_subcarriers, cfg.symbols_per_block))
        blocks.append(serialize_block(build_cp_block(points[idx], cfg)))
    return IqSequence(samples=np.concatenate(blocks), meta=cfg)


# --- raw IQ file format -------------------------------------------------

def write_iq_file(path, samples: np.ndarray) -> int:
    """Write interleaved little-endian float32 (re, im) pairs; returns sample count."""
    arr = np.asarray(samples, dtype=complex)
    inter = np.empty(2 * len(arr), dtype="<f4")
    inter[0::2] = arr.real
    inter[1::2] = arr.imag
    inter.tofile(path)
    return len(arr)


def read_iq_file(path) -> np.ndarray:
    """Read an IQ file written by write_iq_file back into a complex array."""
    raw = np.fromfile(path, dtype="<f4")
    if len(raw) % 2 != 0:
        raise DataError(f"{path}: odd float count {len(raw)}, not an IQ pair stream")
    return raw[0::2].astype(complex) + 1j * raw[1::2]


def write_meta_file(path, fields: dict) -> None:
    """Write the flat key=value sidecar accompanying an IQ file."""
    with open(path, "w", encoding="ascii") as fh:
        for key, value in fields.items():
            fh.write(f"{key}={value}\n")


def read_meta_file(path) -> dict:
    """Parse a key=value sidecar; values stay strings, callers convert."""
    fields = {}
    with open(path, encoding="ascii") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if "=" not in line:
                raise DataError(f"{path}: malformed sidecar line {line!r}")
            key, _, value = line.partition("=")
            fields[key.strip()] = value.strip()
    return fields


def meta_fields(cfg: OfdmConfig, seed) -> dict:
    """Sidecar content for a generated stream."""
    return {
        "N": cfg.n_subcarriers,
        "P": cfg.cp_len,
        "M": cfg.symbols_per_block,
        "K": cfg.num_blocks,
        "mod_order": cfg.mod_order,
        "seed": seed,
    }
