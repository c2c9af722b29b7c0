"""Piecewise-linear Galerkin discretization on the fixed unit interval.

After the front-fixing change of variables ``y = z / h`` the concentration
lives on ``[0, 1]``. With hat functions ``phi_j`` on a uniform mesh the
semi-discrete system reads

    M a' = (h'/h) K a - (1/h^2) A a + (Bi/h) (b* - H a_0) e_0 - (h'/h) a_{N-1} e_{N-1}
    h'   = A0 (a_{N-1} - sigma*(h))

with ``M_ij = int phi_i phi_j``, ``K_ij = int y phi_i phi_j'`` and
``A_ij = int phi_i' phi_j'``. All three are tridiagonal and stored as
``(lower, diag, upper)`` diagonals.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import IntegrationError, PivotBreakdown
from .params import DimensionlessParams

DEFAULT_PIVOT_FLOOR = 1e-300


@dataclass(frozen=True)
class Mesh:
    N: int

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 2:
            raise ValueError(f"mesh needs at least 2 nodes, got N={self.N}")

    @property
    def k(self) -> float:
        return 1.0 / (self.N - 1)

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.N) * self.k


@dataclass(frozen=True)
class Tridiagonal:
    """Tridiagonal matrix given by its three diagonals."""

    lower: np.ndarray
    diag: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        n = len(self.diag)
        if len(self.lower) != n - 1 or len(self.upper) != n - 1:
            raise ValueError("off-diagonals must have length n-1")

    @property
    def n(self) -> int:
        return len(self.diag)

    def matvec(self, x):
        x = np.asarray(x, dtype=float)
        out = self.diag * x
        out[:-1] += self.upper * x[1:]
        out[1:] += self.lower * x[:-1]
        return out

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.upper, 1) + np.diag(self.lower, -1)


@dataclass(frozen=True)
class FemSystem:
    mesh: Mesh
    M: Tridiagonal
    K: Tridiagonal
    A: Tridiagonal

    @property
    def e0(self) -> np.ndarray:
        e = np.zeros(self.mesh.N)
        e[0] = 1.0
        return e

    @property
    def eN(self) -> np.ndarray:
        e = np.zeros(self.mesh.N)
        e[-1] = 1.0
        return e


def _mass(mesh: Mesh) -> Tridiagonal:
    N, k = mesh.N, mesh.k
    diag = np.full(N, 4.0 * k / 6.0)
    diag[0] = diag[-1] = 2.0 * k / 6.0
    off = np.full(N - 1, k / 6.0)
    return Tridiagonal(off.copy(), diag, off.copy())


def _stiffness(mesh: Mesh) -> Tridiagonal:
    N, k = mesh.N, mesh.k
    diag = np.full(N, 2.0 / k)
    diag[0] = diag[-1] = 1.0 / k
    off = np.full(N - 1, -1.0 / k)
    return Tridiagonal(off.copy(), diag, off.copy())


def _convection(mesh: Mesh) -> Tridiagonal:
    N, k = mesh.N, mesh.k
    y = mesh.nodes
    # K[i, i+1] = (3 y_i + k)/6, K[i+1, i] = -(3 y_i + 2k)/6; rows sum to zero.
    upper = (3.0 * y[:-1] + k) / 6.0
    lower = -(3.0 * y[:-1] + 2.0 * k) / 6.0
    diag = np.full(N, -k / 3.0)
    diag[0] = -k / 6.0
    diag[-1] = (3.0 * y[-2] + 2.0 * k) / 6.0
    return Tridiagonal(lower, diag, upper)


def _quadrature_matrices(mesh: Mesh) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Element-by-element Gauss-Legendre integration (exact for these integrands)."""
    N, k = mesh.N, mesh.k
    y = mesh.nodes
    g, w = np.polynomial.legendre.leggauss(3)
    M = np.zeros((N, N))
    K = np.zeros((N, N))
    A = np.zeros((N, N))
    for e in range(N - 1):
        xq = y[e] + 0.5 * k * (g + 1.0)
        wq = 0.5 * k * w
        phi = [(y[e + 1] - xq) / k, (xq - y[e]) / k]
        dphi = [-1.0 / k, 1.0 / k]
        for a in range(2):
            for b in range(2):
                i, j = e + a, e + b
                M[i, j] += np.sum(wq * phi[a] * phi[b])
                K[i, j] += np.sum(wq * xq * phi[a] * dphi[b])
                A[i, j] += np.sum(wq * dphi[a] * dphi[b])
    return M, K, A


def assemble(mesh: Mesh | int, verify: bool = False) -> FemSystem:
    """Build M, K and A for ``mesh``.

    With ``verify=True`` the closed forms are checked against element
    quadrature and an ``AssertionError`` is raised on mismatch.
    """
    if not isinstance(mesh, Mesh):
        mesh = Mesh(mesh)
    system = FemSystem(mesh, _mass(mesh), _convection(mesh), _stiffness(mesh))
    if verify:
        for name, dense in zip("MKA", _quadrature_matrices(mesh)):
            closed = getattr(system, name).to_dense()
            err = np.max(np.abs(closed - dense))
            if err > 1e-13:
                raise AssertionError(f"closed-form {name} deviates from quadrature by {err:.3g}")
    return system


# --- tridiagonal solves ----------------------------------------------------


@njit(cache=True, nogil=True)
def _thomas_factor(lower, diag, upper, floor):
    n = diag.shape[0]
    cp = np.zeros(n)
    dinv = np.zeros(n)
    piv = diag[0]
    if abs(piv) < floor:
        return cp, dinv, 0
    dinv[0] = 1.0 / piv
    for i in range(1, n):
        cp[i - 1] = upper[i - 1] * dinv[i - 1]
        piv = diag[i] - lower[i - 1] * cp[i - 1]
        if abs(piv) < floor:
            return cp, dinv, i
        dinv[i] = 1.0 / piv
    return cp, dinv, -1


@njit(cache=True, nogil=True)
def _thomas_apply(lower, cp, dinv, rhs, out):
    n = rhs.shape[0]
    out[0] = rhs[0] * dinv[0]
    for i in range(1, n):
        out[i] = (rhs[i] - lower[i - 1] * out[i - 1]) * dinv[i]
    for i in range(n - 2, -1, -1):
        out[i] -= cp[i] * out[i + 1]


@dataclass(frozen=True)
class ThomasFactor:
    """Reusable LU factors of a tridiagonal matrix (no pivoting)."""

    lower: np.ndarray
    cp: np.ndarray
    dinv: np.ndarray

    def solve(self, rhs) -> np.ndarray:
        rhs = np.ascontiguousarray(rhs, dtype=float)
        out = np.empty_like(rhs)
        _thomas_apply(self.lower, self.cp, self.dinv, rhs, out)
        return out


def thomas_factor(tri: Tridiagonal, pivot_floor: float = DEFAULT_PIVOT_FLOOR) -> ThomasFactor:
    lower = np.ascontiguousarray(tri.lower, dtype=float)
    cp, dinv, bad = _thomas_factor(
        lower,
        np.ascontiguousarray(tri.diag, dtype=float),
        np.ascontiguousarray(tri.upper, dtype=float),
        float(pivot_floor),
    )
    if bad >= 0:
        raise PivotBreakdown(f"pivot {bad} below floor {pivot_floor:g}")
    return ThomasFactor(lower, cp, dinv)


def thomas_solve(tri: Tridiagonal, rhs, pivot_floor: float = DEFAULT_PIVOT_FLOOR) -> np.ndarray:
    """Solve ``tri @ x = rhs`` by the Thomas algorithm.

    Stable without pivoting for diagonally dominant matrices; raises
    :class:`PivotBreakdown` if a pivot magnitude drops below ``pivot_floor``.
    """
    rhs = np.asarray(rhs, dtype=float)
    if rhs.shape != (tri.n,):
        raise ValueError(f"rhs shape {rhs.shape} does not match matrix size {tri.n}")
    return thomas_factor(tri, pivot_floor).solve(rhs)


# --- semi-discrete right-hand side -----------------------------------------


@njit(cache=True, nogil=True)
def rhs_kernel(tau, y, out, ml, cp, dinv, kl, kd, ku, al, ad, au, Bi, A0, H, sig, bt, bv):
    """Write ``d/dtau [alpha, h]`` into ``out``.

    Returns the boundary inflow rate ``Bi (b* - H alpha_0)`` so callers can
    accumulate the mass balance alongside the solution.
    """
    n = y.shape[0] - 1
    h = y[n]
    a_last = y[n - 1]
    hdot = A0 * (a_last - sig * h)
    if bt.shape[0] == 1:
        bstar = bv[0]
    else:
        bstar = np.interp(tau, bt, bv)
    inflow = Bi * (bstar - H * y[0])
    conv = hdot / h
    diff = -1.0 / (h * h)
    # assemble the load vector and run the forward sweep in one pass
    for i in range(n):
        v = (conv * kd[i] + diff * ad[i]) * y[i]
        if i > 0:
            v += (conv * kl[i - 1] + diff * al[i - 1]) * y[i - 1]
        if i < n - 1:
            v += (conv * ku[i] + diff * au[i]) * y[i + 1]
        if i == 0:
            v += inflow / h
            out[0] = v * dinv[0]
        else:
            if i == n - 1:
                v -= conv * a_last
            out[i] = (v - ml[i - 1] * out[i - 1]) * dinv[i]
    for i in range(n - 2, -1, -1):
        out[i] -= cp[i] * out[i + 1]
    out[n] = hdot
    return inflow


def kernel_args(sys: FemSystem, params: DimensionlessParams) -> tuple:
    """Pack the arrays and scalars consumed by :func:`rhs_kernel`."""
    f = thomas_factor(sys.M)
    arr = lambda a: np.ascontiguousarray(a, dtype=float)  # noqa: E731
    return (
        f.lower, f.cp, f.dinv,
        arr(sys.K.lower), arr(sys.K.diag), arr(sys.K.upper),
        arr(sys.A.lower), arr(sys.A.diag), arr(sys.A.upper),
        float(params.Bi), float(params.A0), float(params.H), float(params.sigma_slope),
        arr(params.b_times), arr(params.b_values),
    )


def rhs(state, params: DimensionlessParams, sys: FemSystem, tau: float = 0.0):
    """Time derivative of ``(alpha, h)``.

    The front speed is evaluated first from the kinetic law and then reused
    in the convection and moving-boundary terms of the concentration
    equation.
    """
    alpha, h = state
    alpha = np.asarray(alpha, dtype=float)
    if not h > 0:
        raise ValueError(f"front position must be positive, got h={h}")
    if alpha.shape != (sys.mesh.N,):
        raise ValueError("alpha does not match mesh size")
    y = np.append(alpha, h)
    out = np.empty_like(y)
    rhs_kernel(float(tau), y, out, *kernel_args(sys, params))
    if not np.all(np.isfinite(out)):
        raise IntegrationError("non-finite right-hand side", tau=tau, h=h)
    return out[:-1], float(out[-1])
