"""Blind subcarrier-count estimation from segment covariance spectra.

The receiver knows the CP length P and the channel order L but not the
number of subcarriers N. The whole stream of K*T received samples is cut
into consecutive non-overlapping segments of a candidate length N' and
laid out as the columns of an N' x M' matrix, M' = floor(K*T / N').

The cyclic prefix makes this matrix rank deficient exactly when the
segmentation is the correct one, N' = N + P. Within one received symbol
window, sample i is a convolution of transmitted samples i, i-1, ...,
i-L+1, and the CP guarantees the transmitted samples at positions i and
i+N agree for i = 1..P. Once i >= L the convolution reaches back only
into CP territory, so received rows i and i+N of the correctly segmented
matrix coincide for i = L..P: that is P-L+1 duplicate rows, leaving rank
N+L-1 out of N+P. Any other segmentation scrambles symbol boundaries
across columns and the matrix stays full rank. With noise, the duplicate
rows turn into P-L+1 covariance eigenvalues at the noise floor instead
of exact zeros, so the rank question becomes a model-order question.

The model order is read off each candidate's eigenvalue spectrum with
the MDL criterion. For a split point zeta (number of "signal"
eigenvalues), the residual lambda_{zeta+1} .. lambda_{N'} is scored by
how far its geometric mean falls below its arithmetic mean, a gap that
vanishes only when the residuals are flat:

    MDL(zeta; N') = -(N' - zeta) * M' * ln(GM/AM) + 0.5 * zeta * (2N' - zeta) * ln(M')

evaluated for zeta = 1..N'-1; the degenerate split zeta = N' has an
empty residual and is scored by its penalty alone. At the correct
segmentation the minimizing zeta sits at the signal-subspace dimension
N+L-1, so the per-candidate miss |zeta_hat - (N' + L - 1 - P)| is zero
there, and the candidate with the smallest miss yields N = N' - P.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError, DataError
from .numerics import EIG_FLOOR, EigenSpectrum, hermitian_eigenvalues, numerical_rank
from .transmitter import IqSequence

# Eigenvalues are floored at this fraction of the largest one before any
# logarithm. A purely absolute floor would let the numerically-zero
# eigenvalues of a noise-free covariance (around 1e-16 of the top, spread
# over decades) masquerade as structure and drag the MDL argmin away from
# the true split; a relative floor flattens them and keeps the criterion
# exactly scale invariant.
MDL_REL_FLOOR = 1e-12

DUPLICATE_ROW_TOL = 1e-10


@dataclass(frozen=True)
class EstimatorConfig:
    """Known side information and the search range for N.

    Candidate segment lengths run over [n_min + cp_len, n_max + cp_len].
    Reliable detection requires num_taps <= cp_len; larger values are
    deliberately not rejected so the failure regime can be measured.
    """
    cp_len: int
    num_taps: int
    n_min: int
    n_max: int

    def __post_init__(self):
        if self.cp_len < 1:
            raise ConfigError(f"cp_len must be >= 1, got {self.cp_len}")
        if self.num_taps < 1:
            raise ConfigError(f"num_taps must be >= 1, got {self.num_taps}")
        if self.n_min < 2:
            raise ConfigError(f"n_min must be >= 2, got {self.n_min}")
        if self.n_max < self.n_min:
            raise ConfigError(f"n_max {self.n_max} below n_min {self.n_min}")

    @property
    def candidates(self) -> range:
        return range(self.n_min + self.cp_len, self.n_max + self.cp_len + 1)


@dataclass(frozen=True)
class SegmentationMatrix:
    """Received stream cut into M' consecutive columns of length N'."""
    n_prime: int
    m_prime: int
    data: np.ndarray


@dataclass(frozen=True)
class MdlCurve:
    """MDL values over zeta = 1..N' for one candidate segment length.

    `metric` is the candidate's miss |zeta_hat - (N' + L - 1 - P)|; it is
    filled in by estimate_n, which knows P and L.
    """
    n_prime: int
    values: np.ndarray
    zeta_hat: int
    metric: int | None = None


@dataclass(frozen=True)
class EstimateReport:
    """Outcome of the candidate scan.

    `ambiguous` is set when no candidate reached a zero miss, meaning the
    data never produced the expected rank signature and n_hat is at best
    a guess among equally poor candidates.
    """
    n_hat: int
    chosen_n_prime: int
    per_candidate: tuple
    ambiguous: bool
    eigen_spectra: dict | None = None


def _samples(r) -> np.ndarray:
    return r.samples if isinstance(r, IqSequence) else np.asarray(r, dtype=complex)


def segment(r, n_prime: int) -> SegmentationMatrix:
    """Reshape the stream into its N' x M' segment matrix.

    Trailing samples short of a full segment are discarded. At least N'
    full segments are required, so the stream must hold N'^2 samples.
    """
    x = _samples(r)
    if n_prime < 1:
        raise ConfigError(f"segment length must be >= 1, got {n_prime}")
    m_prime = len(x) // n_prime
    if m_prime < n_prime:
        raise DataError(
            f"need at least {n_prime * n_prime} samples to segment at N'={n_prime}, "
            f"got {len(x)}"
        )
    used = x[:n_prime * m_prime]
    return SegmentationMatrix(
        n_prime=n_prime,
        m_prime=m_prime,
        data=used.reshape(n_prime, m_prime, order="F"),
    )


def covariance(seg: SegmentationMatrix) -> np.ndarray:
    """Sample covariance (1/M') R R^H of a segmentation matrix."""
    return (seg.data @ seg.data.conj().T) / seg.m_prime


def mdl(spectrum, m_prime: int) -> MdlCurve:
    """Evaluate the MDL curve over all split points of one spectrum.

    Accepts an EigenSpectrum or a plain descending array. Ties in the
    argmin resolve to the smallest zeta. The returned curve leaves
    `metric` unset.
    """
    if isinstance(spectrum, EigenSpectrum):
        lam = spectrum.values
    else:
        lam = np.asarray(spectrum, dtype=float)
        if np.any(np.diff(lam) > 0):
            raise ConfigError("spectrum must be sorted descending")
    if m_prime < 1:
        raise ConfigError(f"m_prime must be >= 1, got {m_prime}")
    n = len(lam)
    if n < 1:
        raise ConfigError("empty spectrum")

    lam = np.maximum(lam, max(EIG_FLOOR, MDL_REL_FLOOR * lam[0]))
    log_m = math.log(m_prime)
    zeta = np.arange(1, n, dtype=float)
    # Residual tail sums for each split, largest eigenvalues excluded.
    tail_sum = np.cumsum(lam[::-1])[::-1]
    tail_logsum = np.cumsum(np.log(lam[::-1]))[::-1]
    count = n - zeta
    log_gm = tail_logsum[1:] / count
    log_am = np.log(tail_sum[1:] / count)
    values = np.empty(n)
    values[:-1] = -count * m_prime * (log_gm - log_am) + 0.5 * zeta * (2 * n - zeta) * log_m
    # zeta = N' leaves no residual; only the penalty remains.
    values[-1] = 0.5 * n * n * log_m
    return MdlCurve(n_prime=n, values=values, zeta_hat=int(np.argmin(values)) + 1)


def estimate_n(r, cfg: EstimatorConfig, keep_spectra: bool = False) -> EstimateReport:
    """Scan all candidate segment lengths and pick the best-matching N.

    Every candidate N' is segmented, its covariance eigendecomposed, and
    its MDL split compared against the split a correct segmentation would
    produce, N' + L - 1 - P. The candidate with the smallest miss wins,
    ties going to the smallest N'; the reported estimate is N' - P.
    """
    x = _samples(r)
    worst = cfg.candidates[-1]
    if len(x) < worst * worst:
        raise DataError(
            f"candidate N'={worst} needs {worst * worst} samples, got {len(x)}"
        )
    target_offset = cfg.num_taps - 1 - cfg.cp_len
    curves = []
    spectra = {} if keep_spectra else None
    for n_prime in cfg.candidates:
        seg = segment(x, n_prime)
        spec = hermitian_eigenvalues(covariance(seg))
        curve = mdl(spec, seg.m_prime)
        curve = replace(curve, metric=abs(curve.zeta_hat - (n_prime + target_offset)))
        curves.append(curve)
        if keep_spectra:
            spectra[n_prime] = spec
    best = min(curves, key=lambda c: (c.metric, c.n_prime))
    return EstimateReport(
        n_hat=best.n_prime - cfg.cp_len,
        chosen_n_prime=best.n_prime,
        per_candidate=tuple(curves),
        ambiguous=best.metric > 0,
        eigen_spectra=spectra,
    )


def rank_oracle_noise_free(r, n_prime: int, rel_tol: float = 1e-9) -> int:
    """Numerical rank of the segmentation matrix; noise-free test oracle."""
    return numerical_rank(segment(r, n_prime).data, rel_tol=rel_tol)


def duplicate_row_pairs(r, n: int, p: int, l: int) -> list:
    """The 1-based row pairs (i, i+N) expected to coincide at N' = N+P.

    Returns the pairs that actually coincide within DUPLICATE_ROW_TOL
    across all columns but the first; the stream's very first segment has
    no predecessor, and its low rows are not covered by the derivation.
    """
    seg = segment(r, n + p)
    pairs = []
    for i in range(l, p + 1):
        a = seg.data[i - 1, 1:]
        b = seg.data[i - 1 + n, 1:]
        if np.max(np.abs(a - b)) <= DUPLICATE_ROW_TOL * max(1.0, np.max(np.abs(a))):
            pairs.append((i, i + n))
    return pairs


def duplicate_row_check(r, n: int, p: int, l: int) -> bool:
    """True iff every expected duplicate pair (i, i+N), i = L..P, holds."""
    if not 1 <= l <= p:
        raise ConfigError(f"need 1 <= L <= P, got L={l}, P={p}")
    return len(duplicate_row_pairs(r, n, p, l)) == p - l + 1
