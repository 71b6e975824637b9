"""Propagator diagonalization, eigenstate Wigner statistics, GOE comparison."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import InvalidArgumentError, InvalidDimensionError, InvalidOperatorError
from .sphere import TopParams, gkq_coefficients, kicked_top_step
from .states import QuantumState, RngStream, basis_state
from .stats import WeightedSamples, moments_and_excess
from .torus import TorusMapParams, sawtooth_step, wigner_torus

_UNITARY_TOL = 1e-8


def propagator_matrix(params) -> np.ndarray:
    """Dense one-kick propagator, built by applying the map to each basis vector."""
    if isinstance(params, TorusMapParams):
        dim, step = params.N, sawtooth_step
    elif isinstance(params, TopParams):
        dim = int(round(2 * params.J)) + 1
        step = kicked_top_step
    else:
        raise InvalidArgumentError(f"unsupported map parameters: {params!r}")
    U = np.empty((dim, dim), dtype=complex)
    for j in range(dim):
        U[:, j] = step(basis_state(dim, j), params).amplitudes
    return U


@dataclass
class EigenSystem:
    """Orthonormal eigenbasis of a unitary: U psi_k = exp(i Omega_k) psi_k."""

    dim: int
    eigenphases: np.ndarray       # Omega_k in [0, 2 pi)
    vectors: np.ndarray           # column k is psi_k

    def state(self, k: int) -> QuantumState:
        return QuantumState(self.vectors[:, k])

    def max_residual(self, U: np.ndarray) -> float:
        lam = np.exp(1j * self.eigenphases)
        return float(np.abs(U @ self.vectors - self.vectors * lam[None, :]).max())


def unitary_eigensystem(U: np.ndarray) -> EigenSystem:
    """Full eigendecomposition of a unitary matrix with an orthonormal basis.

    Uses the complex Schur form: for a normal matrix the Schur vectors are an
    orthonormal eigenbasis even inside (near-)degenerate eigenphase clusters,
    so no separate re-orthonormalization pass is needed.
    """
    U = np.asarray(U, dtype=complex)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise InvalidOperatorError(f"expected a square matrix, got shape {U.shape}")
    dim = U.shape[0]
    defect = float(np.abs(U.conj().T @ U - np.eye(dim)).max())
    if defect > _UNITARY_TOL:
        raise InvalidOperatorError(f"matrix is not unitary: max |U^dag U - 1| = {defect}")
    T, Z = scipy.linalg.schur(U, output="complex")
    phases = np.mod(np.angle(np.diag(T)), 2.0 * np.pi)
    es = EigenSystem(dim, phases, Z)
    resid = es.max_residual(U)
    if resid > _UNITARY_TOL:
        raise InvalidOperatorError(f"eigen residual {resid} exceeds {_UNITARY_TOL}")
    return es


def _state_excess(psi: QuantumState, geometry: str) -> float:
    if geometry == "torus":
        samples = WeightedSamples.from_torus(wigner_torus(psi))
    elif geometry == "sphere":
        J = (psi.dim - 1) / 2.0
        samples = WeightedSamples.from_sphere(gkq_coefficients(psi, J))
    else:
        raise InvalidArgumentError(f"geometry must be 'torus' or 'sphere', got {geometry!r}")
    return moments_and_excess(samples).excess


def excess_of_eigenstates(es: EigenSystem, geometry: str) -> np.ndarray:
    """Wigner-value excess eps_k of every eigenstate, aligned with es.eigenphases."""
    if geometry == "torus" and es.dim % 2 == 0:
        raise InvalidDimensionError(f"torus geometry needs odd dim, got {es.dim}")
    return np.array([_state_excess(es.state(k), geometry) for k in range(es.dim)])


def empirical_cdf(values: np.ndarray):
    """(sorted values, cumulative fractions) of an empirical distribution."""
    v = np.sort(np.asarray(values, dtype=float))
    return v, np.arange(1, v.size + 1) / v.size


def goe_matrix(dim: int, g: np.random.Generator) -> np.ndarray:
    """Real symmetric matrix with off-diagonal variance 1, diagonal variance 2."""
    a = g.standard_normal((dim, dim))
    return (a + a.T) / np.sqrt(2.0)


def goe_ensemble_excess(dim: int, realizations: int, geometry: str,
                        rng: RngStream) -> np.ndarray:
    """Wigner excess of every eigenvector of `realizations` GOE matrices.

    Each orthonormal eigenvector is read as a state in the computational
    basis of the chosen geometry (position basis for the torus, |J, m> basis
    with J = (dim-1)/2 for the sphere).
    """
    if realizations < 1:
        raise InvalidArgumentError(f"realizations must be >= 1, got {realizations}")
    if geometry == "torus" and dim % 2 == 0:
        raise InvalidDimensionError(f"torus geometry needs odd dim, got {dim}")
    g = rng.generator()
    out = []
    for _ in range(realizations):
        _, vecs = np.linalg.eigh(goe_matrix(dim, g))
        for k in range(dim):
            out.append(_state_excess(QuantumState(vecs[:, k].astype(complex)), geometry))
    return np.array(out)
