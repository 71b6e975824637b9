"""Value statistics of Wigner functions: P(w), moments, excess, relaxation scans.

Phase-space averages are represented as weighted samples: the torus grid
contributes uniform weights 1/N^2, the sphere contributes its quadrature
weights (normalized to sum to 1), so every statistic below is a direct
discretization of (1/V) int f(W(x)) dx.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

from .errors import (
    DegenerateDistributionError,
    EmptyInputError,
    InvalidArgumentError,
    OutOfDomainError,
)
from .sphere import SphereWigner, TopParams, kicked_top_step, wigner_sphere_grid
from .states import QuantumState
from .torus import TorusMapParams, TorusWigner, sawtooth_step, wigner_torus

# Values this close to zero (relative to the largest magnitude in the sample)
# are treated as non-negative when counting the negative fraction: the far
# field of a localized state underflows to signed roundoff noise whose sign
# carries no information.
_SIGN_FLOOR = 1e-12


@dataclass
class WeightedSamples:
    """Real sample values with non-negative weights summing to 1."""

    values: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float).ravel()
        self.weights = np.asarray(self.weights, dtype=float).ravel()
        if self.values.shape != self.weights.shape:
            raise InvalidArgumentError("values and weights must have equal length")
        if self.values.size and np.any(self.weights < 0):
            raise InvalidArgumentError("weights must be non-negative")
        if self.values.size and abs(self.weights.sum() - 1.0) > 1e-12:
            raise InvalidArgumentError(f"weights sum to {self.weights.sum()}, not 1")

    @classmethod
    def from_torus(cls, w: TorusWigner) -> "WeightedSamples":
        n2 = w.N * w.N
        return cls(w.values.ravel(), np.full(n2, 1.0 / n2))

    @classmethod
    def from_sphere(cls, w: SphereWigner) -> "WeightedSamples":
        vals, weights = wigner_sphere_grid(w)
        return cls(vals.ravel(), weights.ravel())


@dataclass
class StatsSummary:
    mean: float
    variance: float
    excess: float
    negative_fraction: float
    sample_count: int


@dataclass
class Histogram:
    """Weighted density histogram; sum(density * width) = 1."""

    bin_edges: np.ndarray
    densities: np.ndarray

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[:-1] + self.bin_edges[1:])

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.bin_edges)


def moments_and_excess(s: WeightedSamples) -> StatsSummary:
    """Weighted mean, variance, kurtosis excess and negative fraction."""
    v, w = s.values, s.weights
    if v.size < 2:
        raise DegenerateDistributionError("need at least 2 samples")
    mean = float(np.sum(w * v))
    d = v - mean
    var = float(np.sum(w * d * d))
    if var == 0.0 or np.all(v == v[0]):
        raise DegenerateDistributionError("zero variance; excess undefined")
    excess = float(np.sum(w * d**4) / var**2 - 3.0)
    floor = _SIGN_FLOOR * float(np.abs(v).max())
    negative = float(np.sum(w[v < -floor]))
    return StatsSummary(mean, var, excess, negative, int(v.size))


def value_histogram(s: WeightedSamples, bins: int, value_range=None) -> Histogram:
    """Weighted, density-normalized histogram of WF values.

    Default range is [mean - 6, mean + 6] (six standard deviations in the
    sigma = 1 normalization of the Wigner function).
    """
    if bins < 2:
        raise InvalidArgumentError(f"bins must be >= 2, got {bins}")
    if s.values.size == 0:
        raise EmptyInputError("no samples to histogram")
    if value_range is None:
        mean = float(np.sum(s.weights * s.values))
        value_range = (mean - 6.0, mean + 6.0)
    dens, edges = np.histogram(s.values, bins=bins, range=value_range,
                               weights=s.weights, density=True)
    return Histogram(edges, dens)


def gaussian_reference(mean: float):
    """Unit-variance Gaussian density centered at `mean`, as a callable."""

    def density(w):
        w = np.asarray(w, dtype=float)
        out = np.exp(-0.5 * (w - mean) ** 2) / np.sqrt(2.0 * np.pi)
        return float(out) if out.ndim == 0 else out

    return density


def autocorrelation_torus(w: TorusWigner):
    """Circular autocorrelation C(dn, dm) = (1/N^2) sum W_nm W_{n+dn, m+dm}.

    Returns (C grid in storage order, (r, C_mean) radial profile with integer
    r bins).  C(0, 0) equals the grid mean square N/(N-1).
    """
    N = w.N
    F = sfft.fft2(w.values, workers=-1)
    C = sfft.ifft2(np.abs(F) ** 2, workers=-1).real / (N * N)
    sym = ((np.arange(N) + (N - 1) // 2) % N) - (N - 1) // 2
    r = np.sqrt(sym[:, None].astype(float) ** 2 + sym[None, :].astype(float) ** 2)
    rbin = np.rint(r).astype(int).ravel()
    sums = np.bincount(rbin, weights=C.ravel())
    counts = np.bincount(rbin)
    profile_r = np.arange(sums.size)[counts > 0]
    profile_c = sums[counts > 0] / counts[counts > 0]
    return C, (profile_r.astype(float), profile_c)


def lyapunov_sawtooth(K0: float) -> float:
    """Classical Lyapunov exponent log((2 + K0 + sqrt((2 + K0)^2 - 4)) / 2)."""
    if K0 < 0:
        raise OutOfDomainError(f"K0 must be >= 0, got {K0}")
    a = 2.0 + K0
    return float(np.log((a + np.sqrt(a * a - 4.0)) / 2.0))


@dataclass
class RelaxationSeries:
    """Per-kick Wigner value statistics of an evolving state."""

    times: np.ndarray
    excess: np.ndarray
    negative_fraction: np.ndarray
    t_r: int | None            # first |excess| < threshold
    t_c: int | None            # first negative_fraction > 0.45
    threshold: float


def _samples_for(psi: QuantumState, params) -> WeightedSamples:
    if isinstance(params, TorusMapParams):
        return WeightedSamples.from_torus(wigner_torus(psi))
    from .sphere import gkq_coefficients
    return WeightedSamples.from_sphere(gkq_coefficients(psi, params.J))


def relaxation_scan(params, initial: QuantumState, t_max: int) -> RelaxationSeries:
    """Evolve `initial` for t_max kicks, recording excess and negative fraction.

    `params` selects the map: TorusMapParams drives the sawtooth map,
    TopParams the kicked top.  The relaxation time t_r is the first kick at
    which |excess| < max(0.05, 3 sqrt(24 / sample_count)) (the estimator
    noise floor of the kurtosis), t_c the first kick with negative fraction
    above 0.45.
    """
    if t_max < 1:
        raise InvalidArgumentError(f"t_max must be >= 1, got {t_max}")
    if not isinstance(params, (TorusMapParams, TopParams)):
        raise InvalidArgumentError(f"unsupported map parameters: {params!r}")
    step = sawtooth_step if isinstance(params, TorusMapParams) else kicked_top_step

    psi = initial
    eps, neg = [], []
    threshold = None
    for _ in range(t_max + 1):
        summary = moments_and_excess(_samples_for(psi, params))
        if threshold is None:
            threshold = max(0.05, 3.0 * np.sqrt(24.0 / summary.sample_count))
        eps.append(summary.excess)
        neg.append(summary.negative_fraction)
        psi = step(psi, params)
    eps = np.array(eps)
    neg = np.array(neg)
    t_r = next((int(t) for t in range(t_max + 1) if abs(eps[t]) < threshold), None)
    t_c = next((int(t) for t in range(t_max + 1) if neg[t] > 0.45), None)
    return RelaxationSeries(np.arange(t_max + 1), eps, neg, t_r, t_c, threshold)
