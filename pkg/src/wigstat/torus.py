"""Discrete Wigner-Weyl transform on the quantized 2-torus and the sawtooth map.

Conventions
-----------
The Hilbert dimension N is odd.  Position indices n, momentum indices k and
displacement indices all live on the symmetric range -(N-1)/2 .. (N-1)/2.
Storage maps this range to array index a = n mod N, i.e. index a holds the
symmetric value ``a`` for a <= (N-1)/2 and ``a - N`` above (the usual FFT
layout).  Grid point (n, k) sits at phase-space position
x_nk = (2 pi n / N, 2 pi k / N), taken modulo 2 pi.

Momentum basis: <n|k~> = N^{-1/2} exp(-2 pi i n k / N).  A consequence of the
kernel convention below is that the Wigner grid of the momentum state |m0~>
is supported on the row k = -m0 (mod N).

The Wigner function of a pure state is

    W(n, k) = C_t tr{ omega_nk |psi><psi| },     C_t = sqrt(N^3 / (N-1)),

which fixes the phase-space mean to 1/sqrt(N-1) and the variance to exactly 1
for every pure state.  The transform below evaluates the defining double sum
with circular FFT correlations in O(N^2 log N); `kernel_matrix_torus` is the
O(N^4) reference used to cross-check it at small N.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.fft as sfft

from .errors import InvalidDimensionError
from .states import QuantumState

_IMAG_TOL = 1e-10


def _require_odd(N: int):
    if N < 3 or N % 2 == 0:
        raise InvalidDimensionError(f"torus dimension must be odd and >= 3, got {N}")


def sym_indices(N: int) -> np.ndarray:
    """Symmetric-range value held at each storage index 0..N-1."""
    a = np.arange(N)
    return ((a + (N - 1) // 2) % N) - (N - 1) // 2


def fat_delta(l, N: int):
    """Smeared discrete delta (1/N) sin(pi l / 2) / sin(pi l / 2N).

    Equals the finite sum (1/N) sum_{m'} exp(i pi m' l / N) over the symmetric
    range; the closed form takes the limit value 1 wherever the denominator
    vanishes (l = 0 mod 2N).  Accepts scalars or integer arrays.
    """
    _require_odd(N)
    l = np.asarray(l)
    num = np.sin(np.pi * l / 2.0)
    den = np.sin(np.pi * l / (2.0 * N))
    singular = (l % (2 * N)) == 0
    safe = np.where(singular, 1.0, den)
    out = np.where(singular, 1.0, num / safe / N)
    return float(out) if out.ndim == 0 else out


def kernel_matrix_torus(n: int, k: int, N: int) -> np.ndarray:
    """Dense Wigner-Weyl kernel omega_nk; reference implementation, O(N^3).

    Self-adjoint and trace-orthonormal: tr{omega_nk omega_ml} = delta delta.
    Indices n, k are interpreted modulo N on the symmetric range.
    """
    _require_odd(N)
    sym = sym_indices(N)
    w = np.zeros((N, N), dtype=complex)
    for nprime in sym:
        phase = np.exp(-2j * np.pi * nprime * k / N)
        for l in sym:
            w[l % N, (l + nprime) % N] += phase * fat_delta(2 * l - 2 * n + nprime, N)
    return w / np.sqrt(N)


@dataclass
class TorusWigner:
    """Real N x N Wigner grid, values[n, k] in storage order (see module docstring)."""

    N: int
    values: np.ndarray

    def __post_init__(self):
        _require_odd(self.N)
        if self.values.shape != (self.N, self.N):
            raise InvalidDimensionError(
                f"grid shape {self.values.shape} does not match N={self.N}")

    @property
    def mean(self) -> float:
        return float(self.values.mean())

    @property
    def variance(self) -> float:
        return float(self.values.var())

    def positions(self):
        """(q, p) coordinates of every grid point, each in [0, 2 pi)."""
        x = 2.0 * np.pi * np.arange(self.N) / self.N
        return np.meshgrid(x, x, indexing="ij")


@lru_cache(maxsize=8)
def _fat_delta_fft(N: int) -> np.ndarray:
    """conj(FFT_j fat_delta(2 j + n')) for every displacement n', cached per N."""
    sym = sym_indices(N)
    G = fat_delta(2 * sym[None, :] + sym[:, None], N)
    return np.conj(sfft.fft(G, axis=1, workers=-1))


def wigner_torus(psi: QuantumState) -> TorusWigner:
    """Discrete Wigner function of a pure state, O(N^2 log N).

    Grid mean is 1/sqrt(N-1) and grid variance is 1 (both exact consequences
    of the normalization constant and purity).
    """
    N = psi.dim
    _require_odd(N)
    c = psi.amplitudes
    a = np.arange(N)
    nprime = sym_indices(N)
    # H[a, l] = c[(l + n'(a)) mod N] conj(c[l])
    H = c[(a[None, :] + nprime[:, None]) % N] * np.conj(c)[None, :]
    # S[a, n] = sum_j fat_delta(2 j + n') H[a, n + j]  (circular correlation)
    S = sfft.ifft(sfft.fft(H, axis=1, workers=-1) * _fat_delta_fft(N), axis=1, workers=-1)
    # W[n, k] = (N / sqrt(N-1)) sum_a exp(-2 pi i a k / N) S[a, n]
    W = sfft.fft(S, axis=0, workers=-1).T * (N / np.sqrt(N - 1.0))
    resid = float(np.abs(W.imag).max())
    if resid > _IMAG_TOL:
        raise InvalidDimensionError(f"imaginary residual {resid} exceeds {_IMAG_TOL}")
    return TorusWigner(N, np.ascontiguousarray(W.real))


def wigner_line_coefficients(psi: QuantumState, n_fixed: int) -> np.ndarray:
    """Complex Fourier coefficients Z_q of the Wigner column at fixed position.

    Returns Z indexed by storage order (q = sym value of the index), such that
    W(n_fixed, k) = sum_q Z_q exp(i q 2 pi k / N).  Cheaper than a full grid:
    O(N^2) for one line.
    """
    N = psi.dim
    _require_odd(N)
    if not -N < n_fixed < N:
        raise InvalidDimensionError(f"line index {n_fixed} out of range for N={N}")
    n = n_fixed % N
    c = psi.amplitudes
    a = np.arange(N)
    nprime = sym_indices(N)
    H = c[(a[None, :] + nprime[:, None]) % N] * np.conj(c)[None, :]
    G = fat_delta(2 * sym_indices(N)[None, :] + nprime[:, None], N)
    # S[a] = sum_l G[a, l - n] H[a, l]
    S = np.sum(np.roll(G, n, axis=1) * H, axis=1)
    # W(n, k) = (N/sqrt(N-1)) sum_a e^{-2 pi i a k/N} S[a] = sum_q Z_q e^{i q t}
    # with q = -n'(a):  Z at storage index of -a.
    Z = (N / np.sqrt(N - 1.0)) * S
    out = np.empty(N, dtype=complex)
    out[(-a) % N] = Z
    return out


def coherent_state_torus(q0: float, p0: float, N: int) -> QuantumState:
    """Minimum-uncertainty wave packet at (q0, p0), periodized over the torus.

    Symmetric widths sigma_q = sigma_p = sqrt(pi/N) (effective hbar = 2 pi/N);
    the Gaussian is summed over 5 lattice images per direction, which is
    exact to well below double precision for N >= 11.
    """
    _require_odd(N)
    q = 2.0 * np.pi * sym_indices(N) / N
    sig2 = np.pi / N                      # sigma_q^2
    inv_hbar = N / (2.0 * np.pi)
    amp = np.zeros(N, dtype=complex)
    for nu in range(-2, 3):
        qq = q + 2.0 * np.pi * nu
        amp += np.exp(-((qq - q0) ** 2) / (4.0 * sig2) + 1j * qq * p0 * inv_hbar)
    amp /= np.linalg.norm(amp)
    return QuantumState(amp)


@dataclass(frozen=True)
class TorusMapParams:
    """Quantized sawtooth map parameters: kick strength K0, vertical size L, dimension N."""

    K0: float
    L: int
    N: int

    def __post_init__(self):
        _require_odd(self.N)
        if self.L < 1:
            raise InvalidDimensionError(f"L must be >= 1, got {self.L}")

    @property
    def T(self) -> float:
        """Forcing period 2 pi L / N."""
        return 2.0 * np.pi * self.L / self.N


@lru_cache(maxsize=16)
def _sawtooth_phases(K0: float, L: int, N: int):
    n = sym_indices(N)
    T = 2.0 * np.pi * L / N
    kick = np.exp(1j * K0 * T / (2.0 * L**2) * n.astype(float) ** 2)
    free = np.exp(-1j * T / 2.0 * n.astype(float) ** 2)
    return kick, free


def sawtooth_step(psi: QuantumState, params: TorusMapParams) -> QuantumState:
    """One kick of U_s = exp(-i (T/2) m^2) exp(i (K0 T / 2 L^2) n^2), O(N log N).

    Position-diagonal kick, FFT to the momentum basis, momentum-diagonal free
    rotation, FFT back.  Exactly unitary up to roundoff.
    """
    N = params.N
    if psi.dim != N:
        raise InvalidDimensionError(f"state dim {psi.dim} != params.N {N}")
    kick, free = _sawtooth_phases(params.K0, params.L, N)
    c = psi.amplitudes * kick
    ct = np.sqrt(N) * sfft.ifft(c) * free     # <k~|psi'> = sqrt(N) ifft
    out = sfft.fft(ct) / np.sqrt(N)
    return QuantumState(out)
