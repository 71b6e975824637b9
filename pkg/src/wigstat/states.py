"""Quantum state vectors, random-state ensembles and reproducible RNG streams.

A state is a normalized complex amplitude vector of dimension N (torus) or
2J+1 (sphere).  All stochastic operations take an explicit ``RngStream`` so
that every experiment is reproducible from (seed, stream_id) alone; there is
no global generator anywhere in the package.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidDimensionError

_NORM_TOL = 1e-12


@dataclass(frozen=True)
class RngStream:
    """Deterministic random stream identified by (seed, stream_id).

    Identical (seed, stream_id) always reproduces the identical sample
    sequence, independent of process or thread layout.
    """

    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        """Fresh numpy generator positioned at the start of this stream."""
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream_id,))
        return np.random.Generator(np.random.PCG64(ss))

    def split(self, n: int) -> list["RngStream"]:
        """n independent child streams (for parallel tasks)."""
        base = self.stream_id * 1_000_003 + 1
        return [RngStream(self.seed, base + i) for i in range(n)]


@dataclass(eq=False)
class QuantumState:
    """Normalized pure state; immutable by convention after construction."""

    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex)
        if amp.ndim != 1 or amp.size < 2:
            raise InvalidDimensionError(f"state dimension must be >= 2, got shape {amp.shape}")
        amp = amp.copy()
        amp.setflags(write=False)
        object.__setattr__(self, "amplitudes", amp)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "QuantumState":
        n = self.norm()
        if n == 0.0:
            raise InvalidDimensionError("cannot normalize the zero vector")
        return QuantumState(self.amplitudes / n)

    def overlap(self, other: "QuantumState") -> complex:
        """<self|other>."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def assert_normalized(self, tol: float = _NORM_TOL):
        if abs(self.norm() - 1.0) > tol:
            raise InvalidDimensionError(f"state norm {self.norm()} deviates from 1 beyond {tol}")


def random_state(dim: int, rng: RngStream) -> QuantumState:
    """Random state with independent complex Gaussian amplitudes, then normalized.

    Before normalization each amplitude has <|c_l|^2> = 1/dim (real and
    imaginary parts independent Gaussians of variance 1/(2 dim)).
    """
    if dim < 2:
        raise InvalidDimensionError(f"dim must be >= 2, got {dim}")
    g = rng.generator()
    parts = g.standard_normal((dim, 2)) / np.sqrt(2.0 * dim)
    amp = parts[:, 0] + 1j * parts[:, 1]
    amp /= np.linalg.norm(amp)
    return QuantumState(amp)


def basis_state(dim: int, index: int) -> QuantumState:
    """Computational basis vector |index> (index taken modulo dim)."""
    if dim < 2:
        raise InvalidDimensionError(f"dim must be >= 2, got {dim}")
    amp = np.zeros(dim, dtype=complex)
    amp[index % dim] = 1.0
    return QuantumState(amp)
