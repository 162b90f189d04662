import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import eval_genlaguerre

from fockslice import checks
from fockslice import hamiltonians as hm
from fockslice import operators as ops


def laguerre_element(eta, omega, k, n, phi=0.0):
    """Closed form of the full series matrix element between |n> and |n+|k|>."""
    K = abs(k)
    return (omega * np.exp(1j * phi - eta**2 / 2) * (1j * eta) ** K
            * math.sqrt(math.factorial(n) / math.factorial(n + K))
            * eval_genlaguerre(n, K, eta**2))


def mode_block(h, q_row, q_col):
    m = h.shape[0] // 2
    return h[q_row * m:(q_row + 1) * m, q_col * m:(q_col + 1) * m]


# Lamb-Dicke series ---------------------------------------------------------

@pytest.mark.parametrize("k", [0, 1, 2, -1, -2])
@pytest.mark.parametrize("eta", [0.1, 0.45, 0.8])
def test_full_series_matches_laguerre_closed_form(k, eta):
    dim = 14
    cfg = hm.LaserConfig(k=k, eta=eta, omega_rabi=2.0, phi=0.3)
    h = hm.lamb_dicke_series_h(cfg, l_max=dim, dim=dim)
    eg = mode_block(h, 1, 0)          # <e, . | H | g, .>
    K = abs(k)
    for n in range(dim - K):
        row, col = (n, n + K) if k >= 0 else (n + K, n)
        assert eg[row, col] == pytest.approx(laguerre_element(eta, 2.0, k, n, 0.3), rel=1e-12, abs=1e-14)


def test_series_large_l_max_is_finite():
    cfg = hm.LaserConfig(k=3, eta=0.9, omega_rabi=1.0)
    h = hm.lamb_dicke_series_h(cfg, l_max=500, dim=60)
    assert np.all(np.isfinite(h))


def test_series_carrier():
    eta, omega = 0.3, 1.5
    h = hm.lamb_dicke_series_h(hm.LaserConfig(0, eta, omega), 0, 5)
    np.testing.assert_allclose(mode_block(h, 1, 0), omega * np.exp(-eta**2 / 2) * np.eye(5))
    assert ops.is_hermitian(h)


def test_series_zero_eta_sideband_vanishes():
    h = hm.lamb_dicke_series_h(hm.LaserConfig(1, 0.0, 1.0), 3, 6)
    assert not np.any(h)


@settings(max_examples=40)
@given(st.floats(0.05, 0.95), st.sampled_from([1, -1]))
def test_series_second_order_consistency(eta, k):
    # l_max = 1 reproduces chi(eta)[A sigma_pm + h.c.] up to e^{-eta^2/2} vs (1 - eta^2/2)
    dim = 30
    omega = 1.0
    series = hm.lamb_dicke_series_h(hm.LaserConfig(k, eta, omega), 1, dim)
    eff = hm.effective_sideband_h(eta, omega, k, dim)
    s_eg, e_eg = mode_block(series, 1, 0), mode_block(eff, 1, 0)
    nmax = min(int(0.3 / eta**2), dim - 2)
    for n in range(nmax + 1):
        idx = (n, n + 1) if k == 1 else (n + 1, n)
        rel = abs(abs(s_eg[idx]) / abs(e_eg[idx]) - 1)
        assert rel <= 2 * eta**4


# Second-order form -----------------------------------------------------------

@pytest.mark.parametrize("N", [2, 3, 5, 10])
def test_coupling_A_boundaries(N):
    dim = N + 5
    Ad = ops.adjoint(hm.coupling_A(math.sqrt(2 / N), dim))
    assert np.linalg.norm(Ad @ ops.basis(dim, N)) < 1e-14
    if N > 2:
        A = hm.coupling_A(math.sqrt(2 / (N - 1)), dim)
        assert np.linalg.norm(A @ ops.basis(dim, N)) < 1e-14


def test_coupling_A_zero_eta_is_a():
    np.testing.assert_array_equal(hm.coupling_A(0.0, 6), ops.annihilation(6))


def test_coupling_A_ordering():
    # number operator acts after a: <n|A|n+1> = sqrt(n+1)(1 - eta^2 n / 2)
    eta = 0.5
    A = hm.coupling_A(eta, 6)
    for n in range(5):
        assert A[n, n + 1] == pytest.approx(math.sqrt(n + 1) * (1 - eta**2 * n / 2))


def test_chi_values():
    eta = math.sqrt(0.4)
    assert hm.chi(eta, 1.2e6) == pytest.approx(math.sqrt(0.4) * 0.8 * 1.2e6)
    assert hm.chi_n(0, eta, 1.2e6) == pytest.approx(hm.chi(eta, 1.2e6))
    assert hm.chi_n(4, eta, 1.2e6) == pytest.approx(math.sqrt(5) * 0.2 * hm.chi(eta, 1.2e6))


@pytest.mark.parametrize("N", range(1, 41))
def test_chi_N_vanishes_exactly(N):
    assert hm.chi_n_at_boundary(N, N, 3.7e5) == 0.0
    assert abs(hm.chi_n(N, math.sqrt(2 / N), 1.0)) < 1e-14


# Bounded Hamiltonians -----------------------------------------------------------

def test_ub_matrix_elements():
    N, omega, dim = 5, 1.2e6, 12
    h = hm.build_ub(N, omega, "JC", dim)
    eg = mode_block(h, 1, 0)
    chi = hm.chi(math.sqrt(0.4), omega)
    for n in range(dim - 1):
        expected = hm.chi_n(n, math.sqrt(0.4), omega) if n < N else 0.0
        assert eg[n, n + 1] == pytest.approx(expected, rel=1e-12, abs=1e-9)
    assert eg[4, 5] == pytest.approx(math.sqrt(5) * 0.2 * chi)
    assert np.count_nonzero(eg) == N


def test_ajc_uses_sigma_minus():
    h = hm.build_ub(3, 1.0, "AJC", 8)
    ge = mode_block(h, 0, 1)          # <g,.|H|e,.> carries |n><n+1|
    assert ge[0, 1] != 0
    assert mode_block(h, 1, 0)[0, 1] == 0


@pytest.mark.parametrize("variant", ["JC", "AJC"])
@pytest.mark.parametrize("N", [2, 5, 9])
def test_ub_plus_lb_is_full_second_order(variant, N):
    dim = N + 8
    k = 1 if variant == "JC" else -1
    total = hm.build_ub(N, 1.0, variant, dim) + hm.build_lb(N, 1.0, variant, dim)
    np.testing.assert_allclose(total, hm.effective_sideband_h(math.sqrt(2 / N), 1.0, k, dim), atol=1e-14)


def test_lb_does_not_touch_N():
    N = 5
    h = hm.build_lb(N, 1.0, "JC", 14)
    assert mode_block(h, 1, 0)[N, N + 1] == 0
    assert mode_block(h, 1, 0)[N + 1, N + 2] != 0


def test_truncation_errors():
    with pytest.raises(hm.TruncationError):
        hm.build_ub(5, 1.0, "JC", 6)
    with pytest.raises(hm.TruncationError):
        hm.build_lb(5, 1.0, "JC", 8)
    with pytest.raises(hm.TruncationError):
        hm.build_sliced_B(hm.SlicedParams(4), 7)
    with pytest.raises(ValueError):
        hm.build_ub(5, 1.0, "XX", 10)


def test_large_N_warns():
    with pytest.warns(UserWarning):
        hm.build_ub(11, 1.0, "JC")
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        hm.build_ub(10, 1.0, "JC")


@pytest.mark.parametrize("builder", [
    lambda: hm.build_ub(5, 1.2e6, "JC"),
    lambda: hm.build_ub(5, 1.2e6, "AJC"),
    lambda: hm.build_lb(4, 3.0, "JC"),
    lambda: hm.build_bichromatic(6, 2.0, "ub"),
    lambda: hm.build_bichromatic(6, 2.0, "lb"),
    lambda: hm.build_sliced_h(hm.SlicedParams(4, 0.7, 5.9e5)),
    lambda: hm.lamb_dicke_series_h(hm.LaserConfig(2, 0.4, 1e6, 1.1), 4, 12),
    lambda: hm.effective_sideband_h(0.5, 1.0, -1, 9),
])
def test_builders_hermitian(builder):
    assert ops.is_hermitian(builder())


@pytest.mark.parametrize("N", [3, 5, 10])
@pytest.mark.parametrize("variant", ["JC", "AJC"])
@pytest.mark.parametrize("qubit", [ops.KET_G, ops.KET_E])
def test_ub_confinement(N, variant, qubit):
    assert checks.ub_confinement(N, 1.0, variant, qubit) < 1e-10


@pytest.mark.parametrize("variant", ["JC", "AJC"])
def test_lb_confinement(variant):
    assert checks.lb_confinement(5, 1.0, variant) < 1e-10
    assert checks.lb_confinement(3, 1.0, variant, ops.KET_E) < 1e-10


# Bichromatic -------------------------------------------------------------------

def test_bichromatic_elements_and_sum():
    N, dim = 4, 10
    ub = hm.build_bichromatic(N, 1.0, "ub", dim)
    eta = math.sqrt(2 / N)
    for n in range(N):
        assert mode_block(ub, 0, 1)[n, n + 1] == pytest.approx(hm.chi_n(n, eta, 1.0))
        assert mode_block(ub, 1, 0)[n, n + 1] == pytest.approx(hm.chi_n(n, eta, 1.0))
    total = ub + hm.build_bichromatic(N, 1.0, "lb", dim)
    ladder = hm.coupling_A(eta, dim) * hm.chi(eta, 1.0)
    np.testing.assert_allclose(total, np.kron(ops.SIGMA_X, ladder + ladder.conj().T), atol=1e-14)


@pytest.mark.parametrize("sign", [1, -1])
@pytest.mark.parametrize("bound", ["ub", "lb"])
def test_bichromatic_decouples_sigma_x_eigenstates(sign, bound):
    N, dim = 4, 14
    h = hm.build_bichromatic(N, 1.0, bound, dim)
    q = (ops.KET_G + sign * ops.KET_E) / math.sqrt(2)
    levels = range(0, N + 1) if bound == "ub" else range(N + 1, dim - 2)
    mode = np.zeros(dim, complex)
    mode[list(levels)] = 1
    mode /= np.linalg.norm(mode)
    w, v = np.linalg.eigh(h)
    psi0 = np.kron(q, mode)
    for t in np.linspace(0, 40, 30):
        psi = v @ (np.exp(-1j * w * t) * (v.conj().T @ psi0))
        rq = ops.partial_trace_mode(np.outer(psi, psi.conj()))
        assert np.real(np.trace(rq @ rq)) == pytest.approx(1, abs=1e-12)
        assert np.real(q.conj() @ rq @ q) == pytest.approx(1, abs=1e-12)


# Sliced interaction -------------------------------------------------------------------

def test_sliced_params_derived():
    p = hm.SlicedParams(4, 2.0)
    assert p.eta_sq == pytest.approx((2 / 5, 2 / 4, 2 / 3, 2 / 5))
    o1, o2, o3, o4 = p.omega_bars
    assert o1 == pytest.approx(5 * math.sqrt(5) / 3)
    assert o2 == pytest.approx(4 * math.sqrt(5) / 5)
    assert (o3, o4) == (2.0, 0.5)
    with pytest.raises(AttributeError):
        p.eta_sq = (1, 1, 1, 1)


@pytest.mark.parametrize("N", [0, 1])
def test_sliced_rejects_small_N(N):
    with pytest.raises(hm.UnsupportedSliceError):
        hm.SlicedParams(N)
    with pytest.raises(hm.UnsupportedSliceError):
        hm.dark_state(N, 1.0)


@pytest.mark.parametrize("N", [2, 4, 9])
@pytest.mark.parametrize("r3", [0.5, 1.0, 2.0])
def test_B_on_N(N, r3):
    p = hm.SlicedParams(N, r3)
    dim = N + 6
    B = hm.build_sliced_B(p, dim)
    o1, _, _, o4 = p.omega_bars
    expected = np.zeros(dim)
    expected[N] = o1 / (N + 1)
    expected[N + 1] = o4 / math.sqrt(N + 1)
    np.testing.assert_allclose(B @ ops.basis(dim, N), expected, atol=1e-14)


@pytest.mark.parametrize("N", [2, 4, 9])
@pytest.mark.parametrize("r3", [0.5, 1.0, 2.0])
def test_dark_state_is_annihilated(N, r3):
    assert checks.dark_state_residual(N, r3) < 1e-12
    assert checks.slice_block_rank(N, r3) == 1


def test_dark_state_values():
    psi = hm.dark_state(3, 1.0, 8)
    np.testing.assert_allclose(psi[3:5], [1 / math.sqrt(2)] * 2)
    assert np.linalg.norm(psi) == pytest.approx(1)
    big = hm.dark_state(3, 1e7, 8)
    assert abs(big[3]) ** 2 > 1 - 1e-12
    assert np.all(np.real(hm.dark_state(5, 0.3)[5:7]) > 0)


@pytest.mark.parametrize("N", [2, 4, 9])
def test_dark_state_spans_null_space_of_slice_block(N):
    p = hm.SlicedParams(N, 1.3)
    block = hm.slice_block(hm.build_sliced_B(p), N)
    _, s, vh = np.linalg.svd(block)
    null = vh[-1].conj()
    psi = hm.dark_state(N, 1.3)[N:N + 2]
    assert s[-1] < 1e-12 and s[0] > 1e-3
    assert abs(np.vdot(null, psi)) == pytest.approx(1, abs=1e-12)


@pytest.mark.parametrize("N", [2, 4, 9])
@pytest.mark.parametrize("r3", [0.5, 1.0, 2.0])
def test_sliced_confinement_ground_qubit(N, r3):
    assert checks.sliced_confinement(N, r3, ops.KET_G) < 1e-10


def test_sliced_confinement_fails_for_excited_qubit():
    # |psi,e> couples through B^dag to |N-1> and |N+2>; only |psi,g> is confined
    assert checks.sliced_confinement(4, 1.0, ops.KET_E) > 0.1
