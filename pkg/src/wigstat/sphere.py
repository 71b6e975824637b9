"""SU(2) Wigner-Weyl transform on the sphere and the quantized kicked top.

The Wigner function of a spin-J state is the finite harmonic sum

    W(theta, phi) = C_s sum_{k=0}^{2J} sum_{q=-k}^{k} G_kq Y_kq(theta, phi),
    C_s = sqrt(4 pi (2J+1) / (2J)),          G_kq = tr{ rho T_kq^dag },

with multipole operators T_kq built from Wigner 3j symbols.  The C_s
normalization fixes the spherical mean to 1/sqrt(2J) and the variance to 1
for every pure state.

Amplitude convention: index i = 0 .. 2J holds <J, m|psi> with m = i - J
(ascending m; the north-pole coherent state is the last basis vector).

Spherical harmonics use the Condon-Shortley phase, which makes the
reality constraint take the standard form G_{k,-q} = (-1)^q conj(G_kq).

Two 3j evaluation routes are kept deliberately separate: ``wigner_3j`` is a
scalar log-factorial Racah sum (exact selection-rule handling, fine for
small j and as an oracle target), while the cached per-J multipole tables
are produced by a two-sided three-term recurrence in k that stays at machine
precision up to 2J ~ 200, where the Racah float sum loses ~9 digits.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import fsum, lgamma

import numpy as np
import scipy.fft as sfft
from scipy.linalg import eigh_tridiagonal
from scipy.special import sph_harm_y

from .errors import InvalidArgumentError, InvalidDimensionError
from .states import QuantumState

_IMAG_TOL = 1e-10


def _two_j(J) -> int:
    two = int(round(2 * J))
    if abs(2 * J - two) > 1e-12 or two < 1:
        raise InvalidDimensionError(f"J must be a positive half-integer, got {J}")
    return two


# ---------------------------------------------------------------------------
# Wigner 3j symbols
# ---------------------------------------------------------------------------

def _half_int(x) -> int:
    """x as a doubled integer; raises if x is not a multiple of 1/2."""
    two = int(round(2 * x))
    if abs(2 * x - two) > 1e-9:
        raise InvalidArgumentError(f"{x} is not a half-integer")
    return two


def wigner_3j(j1, j2, j3, m1, m2, m3) -> float:
    """Wigner 3j symbol by the Racah sum with log-factorials.

    Selection-rule violations (triangle, m ranges, m1+m2+m3 != 0) return 0.
    Half-integer arguments are accepted.
    """
    tj1, tj2, tj3 = _half_int(j1), _half_int(j2), _half_int(j3)
    tm1, tm2, tm3 = _half_int(m1), _half_int(m2), _half_int(m3)
    if tm1 + tm2 + tm3 != 0:
        return 0.0
    if abs(tm1) > tj1 or abs(tm2) > tj2 or abs(tm3) > tj3:
        return 0.0
    if tj3 < abs(tj1 - tj2) or tj3 > tj1 + tj2:
        return 0.0
    if (tj1 + tj2 + tj3) % 2 != 0:
        return 0.0
    if (tj1 + tm1) % 2 or (tj2 + tm2) % 2 or (tj3 + tm3) % 2:
        return 0.0

    def lf(two_x: int) -> float:
        if two_x % 2 or two_x < 0:
            raise InvalidArgumentError("factorial of a non-integer in 3j sum")
        return lgamma(two_x // 2 + 1)

    pre = 0.5 * (
        lf(tj1 + tj2 - tj3) + lf(tj1 - tj2 + tj3) + lf(-tj1 + tj2 + tj3)
        - lf(tj1 + tj2 + tj3 + 2)
        + lf(tj1 + tm1) + lf(tj1 - tm1) + lf(tj2 + tm2) + lf(tj2 - tm2)
        + lf(tj3 + tm3) + lf(tj3 - tm3)
    )
    tmin = max(0, (tj2 - tj3 - tm1) // 2, (tj1 - tj3 + tm2) // 2)
    tmax = min((tj1 + tj2 - tj3) // 2, (tj1 - tm1) // 2, (tj2 + tm2) // 2)
    if tmax < tmin:
        return 0.0
    logs = [
        pre - (lf(2 * t) + lf(tj1 + tj2 - tj3 - 2 * t) + lf(tj1 - tm1 - 2 * t)
               + lf(tj2 + tm2 - 2 * t) + lf(tj3 - tj2 + tm1 + 2 * t)
               + lf(tj3 - tj1 - tm2 + 2 * t))
        for t in range(tmin, tmax + 1)
    ]
    lmax = max(logs)
    s = fsum((-1.0) ** t * np.exp(l - lmax) for t, l in zip(range(tmin, tmax + 1), logs))
    sign = -1.0 if ((tj1 - tj2 - tm3) // 2) % 2 else 1.0
    return float(sign * np.exp(lmax) * s)


@lru_cache(maxsize=8)
def threej_jjk_table(two_J: int) -> np.ndarray:
    """tab[i1, i2, k] = 3j(J J k; m1 m2 m3) with m_i = -J + i_i, m3 = -(m1+m2).

    Two-sided three-term recurrence in k (forward from k = |m1+m2|, backward
    from k = 2J, matched where both passes are stable), vectorized over all
    (m1, m2) pairs.  Machine-precision for 2J up to a few hundred.
    """
    J = two_J / 2.0
    dim = two_J + 1
    m = -J + np.arange(dim)
    m1 = m[:, None, None]
    m2 = m[None, :, None]
    q3 = -(m1 + m2)
    kmax = two_J
    ks = np.arange(kmax + 2, dtype=float)[None, None, :]
    A = np.sqrt(np.maximum(ks**2 * ((2 * J + 1) ** 2 - ks**2) * (ks**2 - q3**2), 0.0))
    kk = np.arange(kmax + 1, dtype=float)[None, None, :]
    B = -(2 * kk + 1) * (m1 - m2) * kk * (kk + 1)
    kmin = np.abs(q3[..., 0]).astype(int)
    idx = np.arange(kmax + 1)[None, None, :]

    f = np.zeros((dim, dim, kmax + 1))
    f[idx == kmin[..., None]] = 1.0
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        for k in range(kmax):
            if k >= 1:
                num = -B[..., k] * f[..., k] - (k + 1) * A[..., k] * f[..., k - 1]
                den = k * A[..., k + 1]
                gen = np.where(den != 0, num / np.where(den == 0, 1.0, den), 0.0)
            else:
                gen = np.zeros((dim, dim))
            num2 = -B[..., k] * f[..., k]
            den2 = k * A[..., k + 1]
            start = np.where(den2 != 0, num2 / np.where(den2 == 0, 1.0, den2), 0.0)
            if k == 0:
                # q3 = 0 family starts at k = 0 where the generic two-term
                # start degenerates; ratio f(1)/f(0) = m1 / sqrt(J(J+1)).
                start = np.where(kmin == 0, m1[..., 0] / np.sqrt(J * (J + 1)), start)
            nxt = np.where(kmin == k, start, np.where(kmin < k, gen, 0.0))
            f[..., k + 1] = np.where(kmin <= k, nxt, f[..., k + 1])

        g = np.zeros((dim, dim, kmax + 1))
        g[..., kmax] = 1.0
        for k in range(kmax, 0, -1):
            num = -B[..., k] * g[..., k]
            if k < kmax:
                num = num - k * A[..., k + 1] * g[..., k + 1]
            den = (k + 1) * A[..., k]
            val = np.where(den != 0, num / np.where(den == 0, 1.0, den), 0.0)
            g[..., k - 1] = np.where(kmin <= k - 1, val, g[..., k - 1])

    # Match the passes where |f g| peaks: inside the classically allowed
    # region both recursions are stable and the product is maximal there.
    kstar = np.argmax(np.abs(f * g), axis=-1)
    ii1, ii2 = np.meshgrid(np.arange(dim), np.arange(dim), indexing="ij")
    fstar = f[ii1, ii2, kstar]
    gstar = g[ii1, ii2, kstar]
    scale = np.where(gstar != 0, fstar / np.where(gstar == 0, 1.0, gstar), 0.0)
    F = np.where(idx <= kstar[..., None], f, g * scale[..., None])
    norm = np.sqrt(np.sum((2 * np.arange(kmax + 1) + 1) * F**2, axis=-1))
    F = F / norm[..., None]
    parity = ((m1[..., 0] + m2[..., 0]).astype(int)) % 2
    target = np.where(parity == 0, 1.0, -1.0)
    flip = np.where(np.sign(F[..., kmax]) * target < 0, -1.0, 1.0)
    F = F * flip[..., None]
    if not np.all(np.isfinite(F)):
        raise InvalidArgumentError(f"3j table for 2J={two_J} contains non-finite entries")
    F.setflags(write=False)
    return F


# ---------------------------------------------------------------------------
# Multipole operators and G coefficients
# ---------------------------------------------------------------------------

@lru_cache(maxsize=8)
def _multipole_elements(two_J: int) -> np.ndarray:
    """elems[k, q + 2J, i] = <J, m_i| T_kq |J, m_i - q>, zero where invalid."""
    dim = two_J + 1
    J = two_J / 2.0
    tab = threej_jjk_table(two_J)
    elems = np.zeros((two_J + 1, 2 * two_J + 1, dim))
    i = np.arange(dim)
    phase = (-1.0) ** (two_J - i)          # (-1)^(J - m), J - m = 2J - i
    sqrt2k1 = np.sqrt(2 * np.arange(two_J + 1) + 1.0)
    for q in range(-two_J, two_J + 1):
        im = i[(i - q >= 0) & (i - q < dim)]
        if im.size == 0:
            continue
        # 3j(J k J; -m q m-q) = 3j(J J k; m-q, -m, q) by cyclic permutation
        threj = tab[im - q, (dim - 1) - im, :]          # [n_m, k]
        elems[:, q + two_J, im] = (sqrt2k1[:, None]
                                   * (phase[im] * threj.T))
    elems.setflags(write=False)
    return elems


def multipole_matrix(k: int, q: int, J) -> np.ndarray:
    """Dense multipole operator T_kq for spin J; tr{T_kq T_k'q'^dag} = delta delta."""
    two_J = _two_j(J)
    if not 0 <= k <= two_J:
        raise InvalidArgumentError(f"k={k} outside 0..2J={two_J}")
    if abs(q) > k:
        raise InvalidArgumentError(f"|q|={abs(q)} exceeds k={k}")
    dim = two_J + 1
    elems = _multipole_elements(two_J)
    T = np.zeros((dim, dim), dtype=complex)
    i = np.arange(dim)
    valid = (i - q >= 0) & (i - q < dim)
    T[i[valid], i[valid] - q] = elems[k, q + two_J, i[valid]]
    return T


@dataclass
class SphereWigner:
    """Wigner coefficient table of a spin-J state.

    G[k, q + 2J] holds G_kq for k = 0..2J, |q| <= k (zero padded outside);
    evaluation is W(x) = C_s sum G_kq Y_kq(x).
    """

    J: float
    G: np.ndarray

    @property
    def two_J(self) -> int:
        return _two_j(self.J)

    @property
    def norm_constant(self) -> float:
        two = self.two_J
        return float(np.sqrt(4.0 * np.pi * (two + 1) / two))

    def parseval_sum(self) -> float:
        return float(np.sum(np.abs(self.G) ** 2))


def gkq_coefficients(psi: QuantumState, J) -> SphereWigner:
    """G_kq = tr{|psi><psi| T_kq^dag} via the diagonal-band structure, O(J^3) total."""
    two_J = _two_j(J)
    dim = two_J + 1
    if psi.dim != dim:
        raise InvalidDimensionError(f"state dim {psi.dim} != 2J+1 = {dim}")
    c = psi.amplitudes
    elems = _multipole_elements(two_J)
    # P[q + 2J, i] = conj(c[i - q]) c[i]
    P = np.zeros((2 * two_J + 1, dim), dtype=complex)
    i = np.arange(dim)
    for q in range(-two_J, two_J + 1):
        valid = (i - q >= 0) & (i - q < dim)
        P[q + two_J, valid] = np.conj(c[i[valid] - q]) * c[i[valid]]
    G = np.einsum("kqi,qi->kq", elems, P)
    w = SphereWigner(two_J / 2.0, G)
    resid = _reality_residual(w)
    if resid > _IMAG_TOL:
        raise InvalidArgumentError(f"G reality residual {resid} exceeds {_IMAG_TOL}")
    return w


def _reality_residual(w: SphereWigner) -> float:
    two_J = w.two_J
    worst = 0.0
    for q in range(0, two_J + 1):
        lhs = w.G[:, two_J - q]
        rhs = (-1.0) ** q * np.conj(w.G[:, two_J + q])
        worst = max(worst, float(np.abs(lhs - rhs).max()))
    return worst


# ---------------------------------------------------------------------------
# Spherical harmonics and quadrature
# ---------------------------------------------------------------------------

def spherical_harmonic(k: int, q: int, theta, phi):
    """Orthonormal spherical harmonic Y_kq with the Condon-Shortley phase."""
    if abs(q) > k or k < 0:
        raise InvalidArgumentError(f"invalid harmonic order |q|={abs(q)} > k={k}")
    return complex(sph_harm_y(k, q, theta, phi))


@lru_cache(maxsize=8)
def sphere_quadrature(two_J: int):
    """(theta nodes, phi nodes, weights) exact for products up to W^4.

    Gauss-Legendre in cos(theta) with 4J+1 nodes and 8J+2 uniform phi nodes;
    weights are normalized to sum to 1 (spherical mean weights).
    """
    ntheta = 2 * two_J + 1
    nphi = 4 * two_J + 2
    x, wq = np.polynomial.legendre.leggauss(ntheta)
    theta = np.arccos(x)
    phi = 2.0 * np.pi * np.arange(nphi) / nphi
    weights = np.repeat((wq / (2.0 * nphi))[:, None], nphi, axis=1)
    return theta, phi, weights


@lru_cache(maxsize=8)
def _harmonic_theta_table(two_J: int) -> np.ndarray:
    """Lam[k, q + 2J, itheta] = Y_kq(theta_i, 0) on the quadrature nodes (real)."""
    theta, _, _ = sphere_quadrature(two_J)
    kk, qq = _valid_kq(two_J)
    vals = sph_harm_y(kk[:, None], qq[:, None], theta[None, :], 0.0).real
    Lam = np.zeros((two_J + 1, 2 * two_J + 1, theta.size))
    Lam[kk, qq + two_J, :] = vals
    for q in range(1, two_J + 1):
        Lam[:, two_J - q, :] = (-1.0) ** q * Lam[:, two_J + q, :]
    Lam.setflags(write=False)
    return Lam


@lru_cache(maxsize=8)
def _valid_kq(two_J: int):
    ks, qs = [], []
    for k in range(two_J + 1):
        for q in range(0, k + 1):
            ks.append(k)
            qs.append(q)
    return np.array(ks), np.array(qs)


def wigner_sphere_grid(w: SphereWigner):
    """Wigner values on the exact quadrature grid: (values[nt, np], weights[nt, np]).

    The weighted first four moments of the returned samples are free of
    quadrature error.
    """
    two_J = w.two_J
    theta, phi, weights = sphere_quadrature(two_J)
    Lam = _harmonic_theta_table(two_J)
    B = np.einsum("kq,kqt->qt", w.G, Lam)
    qs = np.arange(-two_J, two_J + 1)
    E = np.exp(1j * qs[:, None] * phi[None, :])
    vals = w.norm_constant * (B.T @ E)
    resid = float(np.abs(vals.imag).max())
    if resid > _IMAG_TOL:
        raise InvalidArgumentError(f"imaginary residual {resid} exceeds {_IMAG_TOL}")
    return vals.real, weights


def wigner_sphere_eval(w: SphereWigner, theta: float, phi: float) -> float:
    """Wigner function value at a single direction (theta, phi)."""
    two_J = w.two_J
    kk, qq = _valid_kq(two_J)
    Y = sph_harm_y(kk, qq, theta, phi)
    total = np.sum(w.G[kk, qq + two_J] * Y)
    for_negative = np.sum(w.G[kk[qq > 0], two_J - qq[qq > 0]]
                          * (-1.0) ** qq[qq > 0] * np.conj(Y[qq > 0]))
    val = w.norm_constant * (total + for_negative)
    if abs(val.imag) > _IMAG_TOL * max(1.0, abs(val.real)):
        raise InvalidArgumentError(f"imaginary residual {val.imag} too large")
    return float(val.real)


def wigner_sphere_equator(w: SphereWigner, n_points: int) -> np.ndarray:
    """Wigner values at n_points uniform azimuths on the equator theta = pi/2."""
    two_J = w.two_J
    kk, qq = _valid_kq(two_J)
    lam_eq = sph_harm_y(kk, qq, np.pi / 2.0, 0.0).real
    # B[q + 2J] = sum_k G[k, q] Y_kq(pi/2, 0)
    Lam = np.zeros((two_J + 1, 2 * two_J + 1))
    Lam[kk, qq + two_J] = lam_eq
    for q in range(1, two_J + 1):
        Lam[:, two_J - q] = (-1.0) ** q * Lam[:, two_J + q]
    B = np.einsum("kq,kq->q", w.G, Lam)
    phi = 2.0 * np.pi * np.arange(n_points) / n_points
    qs = np.arange(-two_J, two_J + 1)
    vals = w.norm_constant * (np.exp(1j * phi[:, None] * qs[None, :]) @ B)
    resid = float(np.abs(vals.imag).max())
    if resid > _IMAG_TOL:
        raise InvalidArgumentError(f"imaginary residual {resid} exceeds {_IMAG_TOL}")
    return vals.real


# ---------------------------------------------------------------------------
# Coherent states and the kicked top
# ---------------------------------------------------------------------------

def coherent_state_sphere(theta0: float, phi0: float, J) -> QuantumState:
    """SU(2) coherent state pointing along (theta0, phi0)."""
    two_J = _two_j(J)
    dim = two_J + 1
    i = np.arange(dim)               # m = -J + i
    log_binom = (lgamma(two_J + 1) - np.array([lgamma(ii + 1) + lgamma(two_J - ii + 1)
                                               for ii in i]))
    c, s = np.cos(theta0 / 2.0), np.sin(theta0 / 2.0)
    # exponents: (J+m) = i on cos, (J-m) = 2J-i on sin; guard log(0) * 0
    with np.errstate(divide="ignore"):
        logc = np.where(i == 0, 0.0, i * np.log(np.abs(c)) if c != 0 else -np.inf)
        logs = np.where(i == two_J, 0.0, (two_J - i) * np.log(np.abs(s)) if s != 0 else -np.inf)
    logmag = 0.5 * log_binom + logc + logs
    mag = np.exp(logmag - logmag.max())
    signs = np.sign(c) ** i * np.sign(s) ** (two_J - i) if (c < 0 or s < 0) else 1.0
    m = -two_J / 2.0 + i
    amp = mag * signs * np.exp(-1j * m * phi0)
    amp /= np.linalg.norm(amp)
    return QuantumState(amp)


@dataclass(frozen=True)
class TopParams:
    """Kicked top parameters: twist strength alpha, rotation angle gamma, spin J."""

    alpha: float
    gamma: float
    J: float

    def __post_init__(self):
        _two_j(self.J)


@lru_cache(maxsize=8)
def _jx_eigensystem(two_J: int):
    """Eigendecomposition of the real symmetric tridiagonal J_x, cached per J."""
    J = two_J / 2.0
    m = -J + np.arange(two_J + 1)
    off = 0.5 * np.sqrt(J * (J + 1) - m[:-1] * (m[:-1] + 1))
    w, v = eigh_tridiagonal(np.zeros(two_J + 1), off)
    return w, v


def kicked_top_step(psi: QuantumState, params: TopParams) -> QuantumState:
    """One kick of U_k = exp(-i gamma J_x) exp(i alpha J_z^2 / 2J)."""
    two_J = _two_j(params.J)
    dim = two_J + 1
    if psi.dim != dim:
        raise InvalidDimensionError(f"state dim {psi.dim} != 2J+1 = {dim}")
    J = two_J / 2.0
    m = -J + np.arange(dim)
    twist = np.exp(1j * params.alpha * m**2 / (2.0 * J))
    c = psi.amplitudes * twist
    w, v = _jx_eigensystem(two_J)
    c = v @ (np.exp(-1j * params.gamma * w) * (v.T @ c))
    return QuantumState(c)
