import math
from fractions import Fraction

import numpy as np
import pytest

from wigstat import (
    InvalidArgumentError,
    InvalidDimensionError,
    RngStream,
    TopParams,
    coherent_state_sphere,
    gkq_coefficients,
    kicked_top_step,
    multipole_matrix,
    random_state,
    spherical_harmonic,
    wigner_3j,
    wigner_sphere_eval,
    wigner_sphere_grid,
)
from wigstat.sphere import sphere_quadrature, threej_jjk_table
from wigstat.states import basis_state


def wigner3j_exact(j1, j2, j3, m1, m2, m3):
    """Racah sum in exact rational arithmetic; independent oracle."""
    if abs(m1) > j1 or abs(m2) > j2 or abs(m3) > j3 or m1 + m2 + m3 != 0:
        return 0.0
    if j3 < abs(j1 - j2) or j3 > j1 + j2 or (j1 + j2 + j3) % 1 != 0:
        return 0.0
    f = math.factorial
    tmin = int(max(0, j2 - j3 - m1, j1 - j3 + m2))
    tmax = int(min(j1 + j2 - j3, j1 - m1, j2 + m2))
    S = Fraction(0)
    for t in range(tmin, tmax + 1):
        S += Fraction((-1) ** t,
                      f(t) * f(int(j1 + j2 - j3 - t)) * f(int(j1 - m1 - t))
                      * f(int(j2 + m2 - t)) * f(int(j3 - j2 + m1 + t))
                      * f(int(j3 - j1 - m2 + t)))
    if S == 0:
        return 0.0
    presq = (Fraction(f(int(j1 + j2 - j3)) * f(int(j1 - j2 + j3)) * f(int(-j1 + j2 + j3)),
                      f(int(j1 + j2 + j3 + 1)))
             * f(int(j1 + m1)) * f(int(j1 - m1)) * f(int(j2 + m2)) * f(int(j2 - m2))
             * f(int(j3 + m3)) * f(int(j3 - m3)))
    val = (-1) ** int(j1 - j2 - m3) * math.sqrt(float(presq * S * S))
    return val if S > 0 else -val


# ---------------------------------------------------------------------------
# 3j symbols
# ---------------------------------------------------------------------------

def test_3j_spec_values():
    assert wigner_3j(1, 0, 1, -1, 0, 1) == pytest.approx(1 / np.sqrt(3), abs=1e-12)
    assert wigner_3j(1, 1, 1, -1, 0, 1) == pytest.approx(1 / np.sqrt(6), abs=1e-12)
    assert wigner_3j(1, 1, 1, -1, 0, 0) == 0.0          # m sum violated
    assert wigner_3j(1, 1, 3, 0, 0, 0) == 0.0           # triangle violated
    assert wigner_3j(2, 1, 1, 2, 0, -2) == 0.0          # |m3| > j3


def test_3j_diagonal_reduction():
    # (j 0 j; -m 0 m) = (-1)^(j-m) / sqrt(2j+1)
    for j in (1, 2, 3, 2.5):
        for m in np.arange(-j, j + 1):
            expect = (-1.0) ** (j - m) / np.sqrt(2 * j + 1)
            assert wigner_3j(j, 0, j, -m, 0, m) == pytest.approx(expect, abs=1e-12)


def test_3j_against_exact_oracle():
    rng = np.random.default_rng(4)
    for _ in range(200):
        tj1, tj2 = rng.integers(0, 9, 2)
        tj3 = rng.integers(abs(tj1 - tj2), tj1 + tj2 + 1)
        if (tj1 + tj2 + tj3) % 2:
            continue
        j1, j2, j3 = tj1 / 2, tj2 / 2, tj3 / 2
        m1 = rng.integers(-tj1, tj1 + 1)
        m2 = rng.integers(-tj2, tj2 + 1)
        if (m1 + tj1) % 2 or (m2 + tj2) % 2:
            continue
        m1, m2 = m1 / 2, m2 / 2
        m3 = -(m1 + m2)
        got = wigner_3j(j1, j2, j3, m1, m2, m3)
        assert got == pytest.approx(wigner3j_exact(j1, j2, j3, m1, m2, m3), abs=1e-12)


def test_3j_orthogonality_sums():
    # sum_{m1, m2} (2 j3 + 1) [3j]^2 = 1 for every valid (j1, j2, j3, m3)
    for tj1 in range(0, 9):
        for tj2 in range(0, 9):
            for tj3 in range(abs(tj1 - tj2), min(tj1 + tj2, 8) + 1, 2):
                j1, j2, j3 = tj1 / 2, tj2 / 2, tj3 / 2
                for tm3 in range(-tj3, tj3 + 1, 2):
                    total = 0.0
                    for tm1 in range(-tj1, tj1 + 1, 2):
                        tm2 = -tm3 - tm1
                        if abs(tm2) > tj2:
                            continue
                        total += (2 * j3 + 1) * wigner_3j(
                            j1, j2, j3, tm1 / 2, tm2 / 2, tm3 / 2) ** 2
                    assert total == pytest.approx(1.0, abs=1e-10), (j1, j2, j3, tm3)


@pytest.mark.parametrize("two_J", [1, 2, 3, 4, 10])
def test_threej_table_matches_scalar(two_J):
    tab = threej_jjk_table(two_J)
    assert np.all(np.isfinite(tab))
    J = two_J / 2
    for i1 in range(two_J + 1):
        for i2 in range(two_J + 1):
            for k in range(two_J + 1):
                m1, m2 = -J + i1, -J + i2
                expect = wigner_3j(J, J, k, m1, m2, -(m1 + m2))
                assert tab[i1, i2, k] == pytest.approx(expect, abs=1e-11)


def test_threej_table_large_spin_vs_exact():
    two_J = 100
    tab = threej_jjk_table(two_J)
    assert np.all(np.isfinite(tab))
    J = 50
    rng = np.random.default_rng(6)
    for _ in range(150):
        i1, i2 = rng.integers(0, two_J + 1, 2)
        k = rng.integers(0, two_J + 1)
        m1, m2 = -J + i1, -J + i2
        expect = wigner3j_exact(J, J, k, float(m1), float(m2), float(-(m1 + m2)))
        assert tab[i1, i2, k] == pytest.approx(expect, abs=1e-13)


# ---------------------------------------------------------------------------
# multipole operators
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("J", [1, 1.5, 2])
def test_multipole_identity_reduction(J):
    dim = int(round(2 * J)) + 1
    T00 = multipole_matrix(0, 0, J)
    assert np.abs(T00 - np.eye(dim) / np.sqrt(dim)).max() < 1e-12


def test_multipole_normalization_single():
    T11 = multipole_matrix(1, 1, 1)
    assert abs(np.trace(T11 @ T11.conj().T) - 1.0) < 1e-10


def test_multipole_stretched_element():
    # <1,1| T_10 |1,1> = sqrt(3) (1 1 1; -1 0 1) = 1/sqrt(2)
    T10 = multipole_matrix(1, 0, 1)
    assert T10[2, 2] == pytest.approx(1 / np.sqrt(2), abs=1e-10)


@pytest.mark.parametrize("J", [1, 1.5, 2])
def test_multipole_orthonormality(J):
    two_J = int(round(2 * J))
    ops = {(k, q): multipole_matrix(k, q, J)
           for k in range(two_J + 1) for q in range(-k, k + 1)}
    for (k, q), T in ops.items():
        for (k2, q2), T2 in ops.items():
            tr = np.trace(T @ T2.conj().T)
            expect = 1.0 if (k, q) == (k2, q2) else 0.0
            assert abs(tr - expect) < 1e-10, (k, q, k2, q2)


def test_multipole_range_errors():
    with pytest.raises(InvalidArgumentError):
        multipole_matrix(3, 0, 1)
    with pytest.raises(InvalidArgumentError):
        multipole_matrix(1, 2, 1)


# ---------------------------------------------------------------------------
# spherical harmonics
# ---------------------------------------------------------------------------

def test_harmonic_values():
    assert spherical_harmonic(0, 0, 0.3, 1.2) == pytest.approx(1 / np.sqrt(4 * np.pi), abs=1e-12)
    assert abs(spherical_harmonic(1, 0, np.pi / 2, 0.7)) < 1e-12
    assert spherical_harmonic(1, 1, np.pi / 2, 0.0) == pytest.approx(
        -np.sqrt(3 / (8 * np.pi)), abs=1e-10)


def test_harmonic_order_error():
    with pytest.raises(InvalidArgumentError):
        spherical_harmonic(1, 2, 0.0, 0.0)


def test_harmonic_quadrature_orthonormality():
    two_J = 8
    theta, phi, weights = sphere_quadrature(two_J)
    TH, PH = np.meshgrid(theta, phi, indexing="ij")
    pairs = [(k, q) for k in range(5) for q in range(-k, k + 1)]
    vals = {}
    for k, q in pairs:
        from scipy.special import sph_harm_y
        vals[(k, q)] = sph_harm_y(k, q, TH, PH)
    for a in pairs:
        for b in pairs:
            # quadrature of Y_a conj(Y_b) over the sphere, mean weights * 4pi
            integral = np.sum(weights * vals[a] * np.conj(vals[b])) * 4 * np.pi
            expect = 1.0 if a == b else 0.0
            assert abs(integral - expect) < 1e-10, (a, b)


# ---------------------------------------------------------------------------
# G coefficients
# ---------------------------------------------------------------------------

def test_g00_is_inverse_sqrt_dim():
    for J in (1, 2, 12.5):
        dim = int(round(2 * J)) + 1
        psi = random_state(dim, RngStream(21))
        w = gkq_coefficients(psi, J)
        assert w.G[0, w.two_J] == pytest.approx(1 / np.sqrt(dim), abs=1e-12)


def test_g10_of_stretched_state():
    w = gkq_coefficients(basis_state(3, 2), 1)       # |1, 1>
    assert w.G[1, w.two_J] == pytest.approx(1 / np.sqrt(2), abs=1e-10)


@pytest.mark.parametrize("J", [1, 2])
def test_gkq_matches_dense_trace_oracle(J):
    two_J = int(round(2 * J))
    psi = random_state(two_J + 1, RngStream(31))
    rho = np.outer(psi.amplitudes, psi.amplitudes.conj())
    w = gkq_coefficients(psi, J)
    for k in range(two_J + 1):
        for q in range(-k, k + 1):
            expect = np.trace(rho @ multipole_matrix(k, q, J).conj().T)
            assert w.G[k, q + two_J] == pytest.approx(expect, abs=1e-10)


def test_gkq_parseval_and_reality():
    psi = random_state(51, RngStream(41))
    w = gkq_coefficients(psi, 25)
    assert abs(w.parseval_sum() - 1.0) < 1e-10
    two_J = w.two_J
    for q in range(0, two_J + 1):
        lhs = w.G[:, two_J - q]
        rhs = (-1.0) ** q * np.conj(w.G[:, two_J + q])
        assert np.abs(lhs - rhs).max() < 1e-10


def test_gkq_dimension_mismatch():
    with pytest.raises(InvalidDimensionError):
        gkq_coefficients(random_state(4, RngStream(0)), 2)


# ---------------------------------------------------------------------------
# Wigner evaluation
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("J", [1, 5, 25, 50])
def test_sphere_exact_moments(J):
    dim = int(round(2 * J)) + 1
    psi = random_state(dim, RngStream(50 + dim))
    vals, weights = wigner_sphere_grid(gkq_coefficients(psi, J))
    mean = np.sum(weights * vals)
    var = np.sum(weights * (vals - mean) ** 2)
    assert abs(mean - 1 / np.sqrt(2 * J)) < 1e-8
    assert abs(var - 1.0) < 1e-8


def test_sphere_eval_matches_grid():
    J = 5
    psi = random_state(11, RngStream(61))
    w = gkq_coefficients(psi, J)
    vals, _ = wigner_sphere_grid(w)
    theta, phi, _ = sphere_quadrature(w.two_J)
    for i, jphi in [(0, 0), (3, 7), (10, 21)]:
        assert wigner_sphere_eval(w, theta[i], phi[jphi]) == pytest.approx(
            vals[i, jphi], abs=1e-10)


def test_sphere_negative_fraction_random_state():
    # The value distribution is Gaussian with mean 1/sqrt(2J) and sigma 1, so
    # the negative fraction converges to Phi(-1/sqrt(2J)), not to 1/2 at
    # finite J (0.4602 at J=50; the 1/2 claim is the J -> infinity limit).
    J = 50
    psi = random_state(101, RngStream(71))
    vals, weights = wigner_sphere_grid(gkq_coefficients(psi, J))
    negfrac = float(np.sum(weights[vals < 0]))
    phi_limit = 0.5 * (1 + math.erf((-1 / np.sqrt(2 * J)) / np.sqrt(2)))
    assert abs(negfrac - phi_limit) < 0.01


def test_sphere_rotation_covariance():
    # W of a coherent state depends only on the great-circle angle to its
    # center, so matched relative angles give equal values.
    J = 5
    north = gkq_coefficients(coherent_state_sphere(0.0, 0.0, J), J)
    t0, p0 = 1.1, 2.3
    rotated = gkq_coefficients(coherent_state_sphere(t0, p0, J), J)
    for ang in (0.0, 0.4, 0.9):
        ref = wigner_sphere_eval(north, ang, 0.0)
        # walk `ang` away from (t0, p0) along the meridian toward the pole
        got = wigner_sphere_eval(rotated, t0 - ang, p0)
        assert got == pytest.approx(ref, abs=1e-10)


# ---------------------------------------------------------------------------
# coherent states and kicked top
# ---------------------------------------------------------------------------

def test_coherent_north_pole():
    psi = coherent_state_sphere(0.0, 0.0, 7.5)
    assert psi.amplitudes[-1] == pytest.approx(1.0)
    assert np.abs(psi.amplitudes[:-1]).max() == 0.0


def test_coherent_norm():
    for args in [(0.3, 5.1, 50), (np.pi - 1e-3, 0.0, 12.5), (np.pi / 2, 2.0, 1)]:
        assert abs(coherent_state_sphere(*args).norm() - 1.0) < 1e-12


def test_coherent_overlap_formula():
    # |<coh|coh'>|^2 = cos^{4J}(Theta/2), Theta the great-circle angle
    J = 5
    rng = np.random.default_rng(8)
    for _ in range(10):
        t1, t2 = rng.uniform(0, np.pi, 2)
        p1, p2 = rng.uniform(0, 2 * np.pi, 2)
        a = coherent_state_sphere(t1, p1, J)
        b = coherent_state_sphere(t2, p2, J)
        dot = (np.sin(t1) * np.sin(t2) * np.cos(p1 - p2) + np.cos(t1) * np.cos(t2))
        theta_rel = np.arccos(np.clip(dot, -1, 1))
        expect = np.cos(theta_rel / 2.0) ** (4 * J)
        assert abs(a.overlap(b)) ** 2 == pytest.approx(expect, abs=1e-10)


def test_kicked_top_zero_rotation_is_twist():
    J = 3
    params = TopParams(2.0, 0.0, J)
    m = -J + np.arange(7)
    psi = random_state(7, RngStream(81))
    out = kicked_top_step(psi, params)
    expect = psi.amplitudes * np.exp(1j * params.alpha * m**2 / (2 * J))
    assert np.abs(out.amplitudes - expect).max() < 1e-12


def test_kicked_top_matches_dense_expm_oracle():
    import scipy.linalg
    J = 1
    alpha, gamma = 3.0, np.pi / 2
    m = np.array([-1.0, 0.0, 1.0])
    Jx = np.zeros((3, 3))
    for i in range(2):
        Jx[i, i + 1] = Jx[i + 1, i] = 0.5 * np.sqrt(J * (J + 1) - m[i] * (m[i] + 1))
    U = scipy.linalg.expm(-1j * gamma * Jx) @ np.diag(np.exp(1j * alpha * m**2 / (2 * J)))
    psi = basis_state(3, 2)                          # |1, 1>
    out = kicked_top_step(psi, TopParams(alpha, gamma, J))
    assert np.abs(out.amplitudes - U @ psi.amplitudes).max() < 1e-10


def test_kicked_top_norm_many_steps():
    params = TopParams(10.0, np.pi / 2, 10)
    psi = random_state(21, RngStream(91))
    for _ in range(1000):
        psi = kicked_top_step(psi, params)
    assert abs(psi.norm() - 1.0) < 1e-10


def test_kicked_top_dimension_mismatch():
    with pytest.raises(InvalidDimensionError):
        kicked_top_step(random_state(4, RngStream(0)), TopParams(1.0, 1.0, 2))
