"""Periodic 1D grid, CFL time step and the finite-difference stencils.

Every stencil works on the first axis, so a ``(m,)`` field and a ``(m, k)``
stack of mode shapes are differentiated by the same call.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

DOMAIN_LENGTH = 2.0 * math.pi


class InvalidGridError(ValueError):
    pass


class NoTimestepError(ValueError):
    pass


class ConvectionScheme(str, enum.Enum):
    UPWIND2 = "upwind2"
    UPWIND1 = "upwind1"
    NONE = "none"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ValueError(
                f"unknown convection scheme {value!r}; "
                f"expected one of {[s.value for s in cls]}"
            ) from None


@dataclass(frozen=True)
class Grid:
    m: int
    length: float = DOMAIN_LENGTH
    dx: float = field(init=False)
    x: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 4:
            raise InvalidGridError(f"grid needs at least 4 points, got m={self.m}")
        object.__setattr__(self, "m", int(self.m))
        dx = self.length / self.m
        x = np.arange(self.m) * dx
        x.setflags(write=False)
        object.__setattr__(self, "dx", dx)
        object.__setattr__(self, "x", x)


def make_grid(m: int) -> Grid:
    """Uniform periodic grid of ``m`` points on ``[0, 2*pi)``."""
    return Grid(m)


def cfl_timestep(grid: Grid, u_ref: float, nu: float, cfl: float) -> float:
    """Smallest of the convective (dx/u) and diffusive (dx^2/2nu) limits, times cfl.

    A bound whose denominator is zero is skipped.
    """
    if cfl <= 0:
        raise ValueError(f"cfl must be positive, got {cfl}")
    if nu < 0 or u_ref < 0:
        raise ValueError("u_ref and nu must be non-negative")
    bounds = []
    if u_ref > 0:
        bounds.append(grid.dx / u_ref)
    if nu > 0:
        bounds.append(grid.dx**2 / (2.0 * nu))
    if not bounds:
        raise NoTimestepError("both u_ref and nu are zero; no CFL bound applies")
    return cfl * min(bounds)


def fit_timestep(dt_max: float, t_final: float) -> tuple[float, int]:
    """Shrink ``dt_max`` so that an integer number of steps lands on ``t_final``."""
    if t_final <= 0:
        raise ValueError("t_final must be positive")
    steps = math.ceil(t_final / dt_max * (1.0 - 1e-12))
    steps = max(steps, 1)
    return t_final / steps, steps


def _shift(f: np.ndarray, k: int) -> np.ndarray:
    # result[j] = f[j - k] with periodic wrap
    m = f.shape[0]
    return f[(np.arange(m) - k) % m]


def upwind2(f: np.ndarray, grid: Grid) -> np.ndarray:
    """Second-order one-sided derivative using the two left neighbours."""
    f = np.asarray(f, dtype=float)
    # (3f_j - 4f_{j-1} + f_{j-2}) in difference form: exactly zero on constants
    f1 = _shift(f, 1)
    return (3.0 * (f - f1) - (f1 - _shift(f, 2))) / (2.0 * grid.dx)


def upwind2_forward(f: np.ndarray, grid: Grid) -> np.ndarray:
    """Mirror image of :func:`upwind2`, using the two right neighbours."""
    f = np.asarray(f, dtype=float)
    f1 = _shift(f, -1)
    return (3.0 * (f1 - f) - (_shift(f, -2) - f1)) / (2.0 * grid.dx)


def upwind1(f: np.ndarray, grid: Grid) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    return (f - _shift(f, 1)) / grid.dx


def upwind1_forward(f: np.ndarray, grid: Grid) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    return (_shift(f, -1) - f) / grid.dx


def central2(f: np.ndarray, grid: Grid) -> np.ndarray:
    """Second-order central second derivative."""
    f = np.asarray(f, dtype=float)
    return (_shift(f, -1) - 2.0 * f + _shift(f, 1)) / grid.dx**2


_ONE_SIDED = {
    ConvectionScheme.UPWIND2: (upwind2, upwind2_forward),
    ConvectionScheme.UPWIND1: (upwind1, upwind1_forward),
}


def one_sided_pair(scheme):
    """(backward, forward) stencils for a convection scheme."""
    scheme = ConvectionScheme.parse(scheme)
    if scheme is ConvectionScheme.NONE:
        raise ValueError("scheme 'none' has no convective stencil")
    return _ONE_SIDED[scheme]


def upwind_select(velocity, backward, forward):
    """Pick the backward difference where velocity >= 0, the forward one elsewhere."""
    return np.where(velocity >= 0.0, backward, forward)


def convective_derivative(u: np.ndarray, grid: Grid, scheme) -> np.ndarray:
    """du/dx upwinded by the sign of ``u`` itself."""
    back, fwd = one_sided_pair(scheme)
    return upwind_select(u, back(u, grid), fwd(u, grid))
