"""Wigner function on a line: Fourier representation, zeros, and nodal statistics.

A WFL is the offset-subtracted Wigner function restricted to a closed line
(circle) in phase space, stored as a real trigonometric polynomial

    Wtilde(t) = u_0 + sum_{q=1}^{M} u_q cos(q t) + v_q sin(q t),  t in [0, 2 pi).

Lines come from three sources: torus columns at fixed position (M = (N-1)/2),
the sphere equator (M = 2J), and zero-mean Gaussian random-coefficient models
with the variance profile of each geometry (flat 2/(N-1) on the torus, the
semicircle law on the sphere).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

from .errors import (
    DegenerateLineError,
    EmptyStatisticsError,
    InvalidArgumentError,
    InvalidDimensionError,
)
from .sphere import _two_j, gkq_coefficients, wigner_sphere_equator
from .states import QuantumState, RngStream
from .torus import wigner_line_coefficients

_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass
class WFLine:
    """Offset-subtracted Wigner line as Fourier coefficients u_0, u_q, v_q."""

    u0: float
    u: np.ndarray           # u_q, q = 1..M
    v: np.ndarray           # v_q, q = 1..M

    def __post_init__(self):
        self.u = np.asarray(self.u, dtype=float)
        self.v = np.asarray(self.v, dtype=float)
        if self.u.shape != self.v.shape or self.u.ndim != 1:
            raise InvalidArgumentError("u and v must be 1-d arrays of equal length")

    @property
    def modes(self) -> int:
        return self.u.size

    def __call__(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        q = np.arange(1, self.modes + 1)
        qt = q[None, :] * t[:, None]
        out = self.u0 + np.cos(qt) @ self.u + np.sin(qt) @ self.v
        return out if out.size > 1 else float(out[0])

    def second_derivative(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        q = np.arange(1, self.modes + 1)
        q2 = q.astype(float) ** 2
        qt = q[None, :] * t[:, None]
        out = -(np.cos(qt) @ (q2 * self.u) + np.sin(qt) @ (q2 * self.v))
        return out if out.size > 1 else float(out[0])

    @classmethod
    def from_samples(cls, values: np.ndarray, offset: float, modes: int | None = None) -> "WFLine":
        """Exact trigonometric interpolation of uniformly spaced circle samples.

        `values` are the raw (not offset-subtracted) samples; the zero mode
        keeps the genuine fluctuation u_0 = Z_0 - offset.
        """
        values = np.asarray(values, dtype=float)
        n = values.size
        if modes is None:
            modes = (n - 1) // 2
        if n < 2 * modes + 1:
            raise InvalidArgumentError(f"{n} samples cannot resolve {modes} modes")
        Z = sfft.fft(values) / n
        u0 = float(Z[0].real) - offset
        q = np.arange(1, modes + 1)
        u = 2.0 * Z[q].real
        v = -2.0 * Z[q].imag
        return cls(u0, u, v)


def wfl_torus(psi: QuantumState, n_fixed: int) -> WFLine:
    """Wigner line at fixed position n_fixed (continuous momentum variable).

    M = (N-1)/2 modes; the offset is the exact phase-space mean 1/sqrt(N-1).
    """
    N = psi.dim
    Z = wigner_line_coefficients(psi, n_fixed)
    M = (N - 1) // 2
    mean = 1.0 / np.sqrt(N - 1.0)
    q = np.arange(1, M + 1)
    u = 2.0 * Z[q].real
    v = -2.0 * Z[q].imag
    return WFLine(float(Z[0].real) - mean, u, v)


def wfl_sphere(psi: QuantumState, J) -> WFLine:
    """Wigner line on the equator theta = pi/2; M = 2J modes, offset 1/sqrt(2J)."""
    two_J = _two_j(J)
    if psi.dim != two_J + 1:
        raise InvalidDimensionError(f"state dim {psi.dim} != 2J+1 = {two_J + 1}")
    w = gkq_coefficients(psi, J)
    values = wigner_sphere_equator(w, 2 * two_J + 2)
    return WFLine.from_samples(values, offset=1.0 / np.sqrt(two_J), modes=two_J)


@dataclass(frozen=True)
class TorusLineModel:
    """Random WFL model for an N-dimensional torus state: flat variances 2/(N-1)."""

    N: int


@dataclass(frozen=True)
class SphereLineModel:
    """Random WFL model for a spin-J state: semicircle variance profile."""

    J: float


def semicircle_variances(J) -> np.ndarray:
    """sigma_q^2 = (2 / J pi) sqrt(1 - ((q-1)/2J)^2) for q = 1..2J."""
    two_J = _two_j(J)
    q = np.arange(1, two_J + 1, dtype=float)
    return (2.0 / ((two_J / 2.0) * np.pi)) * np.sqrt(1.0 - ((q - 1.0) / two_J) ** 2)


def random_wfl(model, rng: RngStream) -> WFLine:
    """Draw a random line with independent zero-mean Gaussian coefficients.

    Torus: var(u_0) = 1/(N-1), var(u_q) = var(v_q) = 2/(N-1), M = (N-1)/2.
    Sphere: var(u_q) = var(v_q) = semicircle sigma_q^2, M = 2J, and
    var(u_0) = sigma_1^2 / 2 by analogy with the torus pattern.
    """
    g = rng.generator()
    if isinstance(model, TorusLineModel):
        N = model.N
        if N < 3 or N % 2 == 0:
            raise InvalidDimensionError(f"torus model needs odd N >= 3, got {N}")
        M = (N - 1) // 2
        sd = np.sqrt(2.0 / (N - 1.0))
        u0 = g.normal(0.0, np.sqrt(1.0 / (N - 1.0)))
        return WFLine(u0, g.normal(0.0, sd, M), g.normal(0.0, sd, M))
    if isinstance(model, SphereLineModel):
        var = semicircle_variances(model.J)
        sd = np.sqrt(var)
        u0 = g.normal(0.0, np.sqrt(var[0] / 2.0))
        M = var.size
        return WFLine(u0, g.normal(0.0, 1.0, M) * sd, g.normal(0.0, 1.0, M) * sd)
    raise InvalidArgumentError(f"unknown line model {model!r}")


def find_zeros(line: WFLine, oversample: int = 16) -> np.ndarray:
    """Sorted zeros of the line in [0, 2 pi), refined by bisection.

    Sign changes are detected on a grid of oversample * M points (oversample
    >= 8); each bracketed root is bisected to a t-tolerance of 1e-12.  The
    count is even and never exceeds 2M (trigonometric degree bound).
    """
    if oversample < 8:
        raise InvalidArgumentError(f"oversample must be >= 8, got {oversample}")
    M = max(line.modes, 1)
    n = oversample * M
    t = 2.0 * np.pi * np.arange(n) / n
    vals = line(t)
    scale = float(np.abs(vals).max())
    if scale == 0.0:
        raise DegenerateLineError("line is identically zero on the sampling grid")
    sign = np.where(vals >= 0.0, 1.0, -1.0)
    flips = np.nonzero(sign * np.roll(sign, -1) < 0)[0]
    if flips.size == 0:
        return np.empty(0)
    a = t[flips]
    b = t[flips] + 2.0 * np.pi / n
    fa = vals[flips]
    for _ in range(48):
        mid = 0.5 * (a + b)
        fm = line(mid)
        left = fa * fm <= 0.0
        b = np.where(left, mid, b)
        a = np.where(left, a, mid)
        fa = np.where(left, fa, fm)
        if np.all(b - a < 1e-12):
            break
    return np.sort(0.5 * (a + b) % (2.0 * np.pi))


@dataclass
class StructureStats:
    """Aggregated nodal-arc statistics: spacings s, signed amplitudes A, pairs."""

    spacings: np.ndarray
    amplitudes: np.ndarray
    zero_counts: np.ndarray
    modes: int

    def spacing_histogram(self, bins: int = 80):
        dens, edges = np.histogram(self.spacings, bins=bins, density=True)
        return edges, dens

    def amplitude_histogram(self, bins: int = 80):
        dens, edges = np.histogram(self.amplitudes, bins=bins, density=True)
        return edges, dens

    def joint_histogram(self, bins: int = 60):
        """2-d density over [0, 4 pi / M] x [-max|A|, max|A|]."""
        amax = float(np.abs(self.amplitudes).max())
        smax = 4.0 * np.pi / max(self.modes, 1)
        H, se, ae = np.histogram2d(self.spacings, self.amplitudes, bins=bins,
                                   range=[[0.0, smax], [-amax, amax]], density=True)
        return H, se, ae


def _arc_extrema(line: WFLine, zeros: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Spacing and signed extremal amplitude for each arc between adjacent zeros."""
    nz = zeros.size
    starts = zeros
    ends = np.roll(zeros, -1).copy()
    ends[-1] += 2.0 * np.pi
    spacings = ends - starts
    # coarse scan inside each arc, then golden-section refinement
    nscan = 33
    frac = (np.arange(1, nscan + 1)) / (nscan + 1)
    tgrid = starts[:, None] + spacings[:, None] * frac[None, :]
    vgrid = line(tgrid.ravel()).reshape(nz, nscan)
    arc_sign = np.where(vgrid.sum(axis=1) >= 0.0, 1.0, -1.0)
    best = np.argmax(arc_sign[:, None] * vgrid, axis=1)
    step = spacings / (nscan + 1)
    a = tgrid[np.arange(nz), best] - step
    b = tgrid[np.arange(nz), best] + step
    # golden-section maximization of arc_sign * line(t)
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1 = arc_sign * line(x1)
    f2 = arc_sign * line(x2)
    for _ in range(40):
        take1 = f1 >= f2
        b = np.where(take1, x2, b)
        a = np.where(take1, a, x1)
        x1n = b - _GOLDEN * (b - a)
        x2n = a + _GOLDEN * (b - a)
        f1 = np.where(take1, arc_sign * line(x1n), f2)
        f2 = np.where(take1, f2, arc_sign * line(x2n))
        x1, x2 = x1n, x2n
    tstar = 0.5 * (a + b)
    return spacings, np.atleast_1d(line(tstar))


def structure_statistics(lines, oversample: int = 16) -> StructureStats:
    """Spacings and amplitudes of nodal arcs, aggregated over a line collection."""
    spacings, amplitudes, counts = [], [], []
    modes = 0
    for line in lines:
        modes = max(modes, line.modes)
        zeros = find_zeros(line, oversample)
        counts.append(zeros.size)
        if zeros.size < 2:
            continue
        s, A = _arc_extrema(line, zeros)
        spacings.append(s)
        amplitudes.append(A)
    if not spacings:
        raise EmptyStatisticsError("no line contributed at least two zeros")
    return StructureStats(np.concatenate(spacings), np.concatenate(amplitudes),
                          np.array(counts), modes)


@dataclass
class ClusterDistribution:
    """Distribution of constant-sign run lengths on the discrete mesh."""

    lengths: np.ndarray         # 1..max observed length
    probabilities: np.ndarray
    total_clusters: int


def _cyclic_runs(signs: np.ndarray) -> np.ndarray:
    """Lengths of maximal constant-sign runs on a cyclic sequence."""
    n = signs.size
    boundaries = np.nonzero(signs != np.roll(signs, 1))[0]
    if boundaries.size == 0:
        return np.array([n])
    return np.diff(np.append(boundaries, boundaries[0] + n))


def discrete_cluster_distribution(w, offset: float) -> ClusterDistribution:
    """Cluster-length law of sign(W - offset) along every fixed-position line.

    Values exactly equal to the offset count as positive (documented
    tie-break; a measure-zero event for generic states).
    """
    grid = w.values
    all_runs = []
    for row in grid:
        signs = (row >= offset)
        all_runs.append(_cyclic_runs(signs))
    runs = np.concatenate(all_runs)
    counts = np.bincount(runs)[1:]          # drop length-0 slot
    lengths = np.arange(1, counts.size + 1)
    total = int(runs.size)
    return ClusterDistribution(lengths, counts / total, total)
