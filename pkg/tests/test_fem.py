import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oracles import dense_rhs, quad_matrices
from swellfront.errors import IntegrationError, PivotBreakdown
from swellfront.fem import Mesh, Tridiagonal, assemble, rhs, thomas_solve
from swellfront.params import DimensionlessParams, PhysicalParams, nondimensionalize


def test_two_node_matrices():
    s = assemble(2)
    np.testing.assert_allclose(s.M.to_dense(), [[1 / 3, 1 / 6], [1 / 6, 1 / 3]], rtol=1e-15)
    np.testing.assert_allclose(s.A.to_dense(), [[1.0, -1.0], [-1.0, 1.0]], rtol=1e-15)
    # int y phi_i phi_j' on [0, 1] with phi_0 = 1 - y, phi_1 = y
    np.testing.assert_allclose(s.K.to_dense(), [[-1 / 6, 1 / 6], [-1 / 3, 1 / 3]], rtol=1e-15)


@pytest.mark.parametrize("N", [2, 3, 5, 11, 50])
def test_matrices_match_quadrature_oracle(N):
    s = assemble(N)
    for name, ref in zip("MKA", quad_matrices(N)):
        np.testing.assert_allclose(getattr(s, name).to_dense(), ref, atol=1e-12, rtol=0)


def test_internal_quadrature_check():
    assemble(37, verify=True)


@pytest.mark.parametrize("N", [2, 4, 25, 100])
def test_structure(N):
    s = assemble(N)
    M, K, A = (getattr(s, n).to_dense() for n in "MKA")
    assert np.allclose(M, M.T) and np.all(np.linalg.eigvalsh(M) > 0)
    assert np.allclose(A, A.T)
    ev = np.linalg.eigvalsh(A)
    assert abs(ev[0]) < 1e-9 and np.all(ev[1:] > 0)
    # K applied to a constant vanishes (derivative of a constant)
    np.testing.assert_allclose(K @ np.ones(N), 0.0, atol=1e-14)
    assert M.sum() == pytest.approx(1.0)
    # sum_i K_ij = int y phi_j' = [y phi_j] - int phi_j
    col = K.sum(axis=0)
    expected = -M.sum(axis=0)
    expected[-1] += 1.0
    np.testing.assert_allclose(col, expected, atol=1e-13)


def test_boundary_selectors():
    s = assemble(4)
    np.testing.assert_array_equal(s.e0, [1, 0, 0, 0])
    np.testing.assert_array_equal(s.eN, [0, 0, 0, 1])


def test_mesh_validation():
    with pytest.raises(ValueError):
        Mesh(1)
    assert Mesh(11).k == pytest.approx(0.1)


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 60), st.data())
def test_thomas_matches_dense_solve(n, data):
    el = st.floats(-1.0, 1.0, allow_nan=False)
    lower = data.draw(arrays(float, n - 1, elements=el))
    upper = data.draw(arrays(float, n - 1, elements=el))
    rhs_v = data.draw(arrays(float, n, elements=st.floats(-1e3, 1e3, allow_nan=False)))
    # strict diagonal dominance keeps the elimination stable without pivoting
    diag = 2.5 + np.abs(np.r_[lower, 0.0]) + np.abs(np.r_[0.0, upper])
    tri = Tridiagonal(lower, diag, upper)
    x = thomas_solve(tri, rhs_v)
    ref = np.linalg.solve(tri.to_dense(), rhs_v)
    np.testing.assert_allclose(x, ref, rtol=1e-12, atol=1e-12 * max(1.0, np.abs(ref).max()))


def test_thomas_on_mass_matrix():
    M = assemble(100).M
    b = np.sin(np.arange(100.0))
    np.testing.assert_allclose(thomas_solve(M, b), np.linalg.solve(M.to_dense(), b), rtol=1e-12)


def test_thomas_pivot_breakdown():
    tri = Tridiagonal(np.array([1.0]), np.array([0.0, 1.0]), np.array([1.0]))
    with pytest.raises(PivotBreakdown):
        thomas_solve(tri, np.ones(2))
    with pytest.raises(ValueError):
        thomas_solve(Tridiagonal(np.ones(1), np.ones(2), np.ones(1)), np.ones(3))


def _params(**kw):
    base = dict(Bi=0.0, A0=0.0, H=2.5, h0=1e-3, T_star=1e-4, ell_star=2.0, u0=1.0, sigma_slope=10.0,
                b_times=(0.0,), b_values=(10.0,))
    base.update(kw)
    return DimensionlessParams(**base)


def test_rhs_vanishes_without_coupling():
    s = assemble(12)
    a_dot, h_dot = rhs((np.ones(12), 1e-3), _params(), s)
    assert h_dot == 0.0
    np.testing.assert_allclose(a_dot, 0.0, atol=1e-12)


def test_rhs_vanishes_at_equilibrium():
    d = nondimensionalize(PhysicalParams())
    u_star, h_star = d.equilibrium()
    s = assemble(30)
    a_dot, h_dot = rhs((np.full(30, u_star), h_star), d, s)
    assert h_dot == pytest.approx(0.0, abs=1e-6)
    np.testing.assert_allclose(a_dot, 0.0, atol=1e-6)


@settings(max_examples=50, deadline=None)
@given(st.integers(3, 40), st.floats(1e-3, 1.0), st.integers(0, 2**31 - 1))
def test_rhs_matches_dense_oracle(N, h, seed):
    rng = np.random.default_rng(seed)
    d = nondimensionalize(PhysicalParams())
    s = assemble(N)
    alpha = rng.uniform(0.0, 4.0, N)
    a_dot, h_dot = rhs((alpha, h), d, s, tau=1e-5)
    M, K, A = quad_matrices(N) if N <= 8 else (s.M.to_dense(), s.K.to_dense(), s.A.to_dense())
    ref_a, ref_h = dense_rhs(alpha, h, 1e-5, M, K, A, d.Bi, d.A0, d.H, d.sigma_slope, d.b_star)
    assert h_dot == pytest.approx(ref_h, rel=1e-12, abs=1e-6)
    scale = np.abs(ref_a).max() + 1.0
    np.testing.assert_allclose(a_dot, ref_a, rtol=0, atol=1e-10 * scale)


def test_rhs_rejects_bad_front():
    s = assemble(5)
    with pytest.raises(ValueError):
        rhs((np.ones(5), 0.0), _params(), s)
    with pytest.raises(IntegrationError):
        rhs((np.full(5, np.inf), 1e-3), _params(A0=1.0), s)
