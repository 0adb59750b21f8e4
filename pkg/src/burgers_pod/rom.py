"""Galerkin reduced-order model on a POD basis.

With ``u = phi @ a`` the reduced system is

    da/dt = -phi^T (u * du/dx) + nu * phi^T phi_xx a + phi^T q,

where ``du/dx`` is taken from the mode derivatives with the same sign-switched
upwinding as the full-order solver. At full rank this reproduces the projected
full-order right-hand side exactly.
"""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np
from scipy.integrate import odeint
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .discretization import (
    ConvectionScheme,
    Grid,
    central2,
    make_grid,
    one_sided_pair,
    upwind_select,
)
from .fdsolver import BlowUpError, SnapshotMatrix, source_field
from .pod import POD, PodBasis

INTEGRATORS = ("rk4", "lsoda")


@dataclass(frozen=True)
class RomOperators:
    phi: np.ndarray
    phi_t: np.ndarray
    phi_x: np.ndarray
    phi_x_fwd: np.ndarray
    phi_xx: np.ndarray
    diff_op: np.ndarray
    q_proj: np.ndarray
    nu: float
    scheme: ConvectionScheme
    grid: Grid

    @property
    def n_modes(self):
        return self.phi.shape[1]


@dataclass(frozen=True)
class RomTrajectory:
    a: np.ndarray
    times: np.ndarray
    wall_time: float = 0.0
    method: str = "rk4"


def assemble(basis, grid: Grid, nu: float, q, scheme) -> RomOperators:
    """Precompute projected operators for ``basis`` (a PodBasis or an m x i array)."""
    scheme = ConvectionScheme.parse(scheme)
    phi = np.asarray(getattr(basis, "phi", basis), dtype=float)
    q = np.asarray(q, dtype=float)
    if phi.ndim != 2 or phi.shape[0] != grid.m:
        raise ValueError(f"basis must be ({grid.m}, i), got {phi.shape}")
    if q.shape != (grid.m,):
        raise ValueError(f"source must have shape ({grid.m},), got {q.shape}")
    if scheme is ConvectionScheme.NONE:
        phi_x = np.zeros_like(phi)
        phi_x_fwd = np.zeros_like(phi)
    else:
        back, fwd = one_sided_pair(scheme)
        phi_x, phi_x_fwd = back(phi, grid), fwd(phi, grid)
    phi_xx = central2(phi, grid)
    phi_t = np.ascontiguousarray(phi.T)
    return RomOperators(
        phi=phi.copy(),
        phi_t=phi_t,
        phi_x=phi_x,
        phi_x_fwd=phi_x_fwd,
        phi_xx=phi_xx,
        diff_op=phi_t @ phi_xx,
        q_proj=phi_t @ q,
        nu=float(nu),
        scheme=scheme,
        grid=grid,
    )


def project_initial(basis, u0) -> np.ndarray:
    phi = np.asarray(getattr(basis, "phi", basis), dtype=float)
    u0 = np.asarray(u0, dtype=float)
    if u0.shape != (phi.shape[0],):
        raise ValueError(f"initial field must have shape ({phi.shape[0]},), got {u0.shape}")
    return phi.T @ u0


def rhs(a, ops: RomOperators) -> np.ndarray:
    """Reduced right-hand side: convection + nu * diffusion + source."""
    a = np.asarray(a, dtype=float)
    out = ops.nu * (ops.diff_op @ a) + ops.q_proj
    if ops.scheme is not ConvectionScheme.NONE:
        u = ops.phi @ a
        g = upwind_select(u, ops.phi_x @ a, ops.phi_x_fwd @ a)
        out = out - ops.phi_t @ (u * g)
    if not np.all(np.isfinite(out)):
        raise BlowUpError("non-finite reduced right-hand side")
    return out


def _fast_rhs(ops: RomOperators):
    # One stacked product yields u, the backward and the forward derivative.
    m = ops.grid.m
    lin = ops.nu * ops.diff_op
    q = ops.q_proj
    if ops.scheme is ConvectionScheme.NONE:
        return lambda a: lin @ a + q
    stacked = np.vstack([ops.phi, ops.phi_x, ops.phi_x_fwd])
    phi_t = ops.phi_t

    def f(a):
        w = stacked @ a
        u = w[:m]
        g = np.where(u >= 0.0, w[m : 2 * m], w[2 * m :])
        return lin @ a + q - phi_t @ (u * g)

    return f


def _substeps(times, dt):
    spans = np.diff(times)
    if dt is None:
        return np.ones(spans.size, dtype=int)
    return np.maximum(1, np.ceil(spans / dt * (1.0 - 1e-9)).astype(int))


def _rk4(f, a0, times, dt):
    out = np.empty((a0.size, times.size))
    out[:, 0] = a0
    a = a0.copy()
    for k, n_sub in enumerate(_substeps(times, dt)):
        h = (times[k + 1] - times[k]) / n_sub
        for _ in range(n_sub):
            k1 = f(a)
            k2 = f(a + 0.5 * h * k1)
            k3 = f(a + 0.5 * h * k2)
            k4 = f(a + h * k3)
            a = a + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[:, k + 1] = a
    return out


def _lsoda(f, a0, times, rtol, atol):
    return odeint(lambda a, t: f(a), a0, times, rtol=rtol, atol=atol).T


def integrate(
    ops: RomOperators,
    a0,
    times,
    dt=None,
    method="rk4",
    rtol=1e-8,
    atol=1e-10,
    repeats=1,
) -> RomTrajectory:
    """Advance the reduced system and sample it at ``times``.

    ``method="rk4"`` is classical fixed-step RK4 taking steps of at most ``dt``
    (one step per sampling interval if ``dt`` is None). ``method="lsoda"`` hands
    the system to the adaptive LSODA integrator from ODEPACK with the given
    tolerances. ``wall_time`` is the median over ``repeats`` runs.
    """
    if method not in INTEGRATORS:
        raise ValueError(f"method must be one of {INTEGRATORS}, got {method!r}")
    times = np.asarray(times, dtype=float)
    a0 = np.asarray(a0, dtype=float)
    if times.ndim != 1 or times.size < 1 or times[0] != 0.0:
        raise ValueError("times must be a 1-D sequence starting at 0")
    if np.any(np.diff(times) <= 0):
        raise ValueError("times must be strictly increasing")
    if a0.shape != (ops.n_modes,):
        raise ValueError(f"a0 must have shape ({ops.n_modes},), got {a0.shape}")

    f = _fast_rhs(ops)
    timings = []
    for _ in range(max(1, repeats)):
        with np.errstate(over="ignore", invalid="ignore"):
            start = time.perf_counter()
            if method == "rk4":
                a = _rk4(f, a0, times, dt)
            else:
                a = _lsoda(f, a0, times, rtol, atol)
            timings.append(time.perf_counter() - start)

    finite = np.all(np.isfinite(a), axis=0)
    if not finite.all():
        k = int(np.argmin(finite))
        raise BlowUpError(f"reduced model blew up by t={times[k]:.6g}", time=float(times[k]))
    return RomTrajectory(a, times.copy(), float(np.median(timings)), method)


def reconstruct(basis, traj: RomTrajectory, grid: Grid | None = None) -> SnapshotMatrix:
    phi = np.asarray(getattr(basis, "phi", basis), dtype=float)
    grid = grid or make_grid(phi.shape[0])
    return SnapshotMatrix(phi @ traj.a, traj.times, grid)


class GalerkinROM(BaseEstimator):
    """Fit a POD basis to snapshots and predict the field with the Galerkin model.

    ``X`` holds one snapshot per row on the periodic grid of ``X.shape[1]``
    points, as in :class:`burgers_pod.pod.POD`. ``predict`` takes the sample
    times and returns one reconstructed snapshot per row.
    """

    def __init__(
        self,
        n_modes=5,
        nu=0.01,
        q0_amp=0.1,
        scheme="upwind2",
        method="rk4",
        dt=None,
        rtol=1e-8,
        atol=1e-10,
    ):
        self.n_modes = n_modes
        self.nu = nu
        self.q0_amp = q0_amp
        self.scheme = scheme
        self.method = method
        self.dt = dt
        self.rtol = rtol
        self.atol = atol

    def fit(self, X, y=None):
        X = check_array(X, dtype=np.float64)
        self.grid_ = make_grid(X.shape[1])
        self.pod_ = POD(n_modes=self.n_modes).fit(X)
        self.basis_: PodBasis = self.pod_.basis_
        self.operators_ = assemble(
            self.basis_, self.grid_, self.nu, source_field(self.grid_, self.q0_amp), self.scheme
        )
        self.initial_state_ = X[0].copy()
        self.n_features_in_ = X.shape[1]
        return self

    def coefficients(self, times, u0=None) -> RomTrajectory:
        check_is_fitted(self, "operators_")
        u0 = self.initial_state_ if u0 is None else u0
        a0 = project_initial(self.basis_, u0)
        return integrate(
            self.operators_, a0, times, self.dt, self.method, self.rtol, self.atol
        )

    def predict(self, times, u0=None):
        traj = self.coefficients(times, u0)
        return reconstruct(self.basis_, traj, self.grid_).data.T
