"""Proper orthogonal decomposition: energy spectrum, truncation, covariance check."""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from . import linalg
from .linalg import SvdFactors


class DegenerateSpectrumError(ValueError):
    pass


class TruncationError(ValueError):
    pass


class EnergyConvention(str, enum.Enum):
    SIGMA_SQUARED = "sigma_squared"
    SIGMA_LINEAR = "sigma_linear"


@dataclass(frozen=True)
class EnergySpectrum:
    r: np.ndarray
    cumulative: np.ndarray
    convention: EnergyConvention


@dataclass(frozen=True)
class PodBasis:
    phi: np.ndarray
    sigma: np.ndarray
    psi_t: np.ndarray
    captured_energy: float

    @property
    def n_modes(self) -> int:
        return self.phi.shape[1]

    def reconstruct(self) -> np.ndarray:
        return (self.phi * self.sigma) @ self.psi_t


def energy_spectrum(sigma, convention=EnergyConvention.SIGMA_SQUARED) -> EnergySpectrum:
    """Relative significance of each mode and its running total.

    ``sigma_squared`` normalizes sigma_k**2, ``sigma_linear`` normalizes sigma_k.
    """
    convention = EnergyConvention(convention)
    sigma = np.asarray(sigma, dtype=float)
    if sigma.ndim != 1 or sigma.size == 0:
        raise ValueError("sigma must be a non-empty 1-D sequence")
    if np.any(sigma < 0) or np.any(np.diff(sigma) > 0):
        raise ValueError("sigma must be non-negative and sorted in descending order")
    if not np.any(sigma > 0):
        raise DegenerateSpectrumError("all singular values are zero")
    weights = sigma**2 if convention is EnergyConvention.SIGMA_SQUARED else sigma
    r = weights / weights.sum()
    cumulative = np.cumsum(r)
    # pin the tail so the running total ends exactly at one
    cumulative = np.minimum(cumulative / cumulative[-1], 1.0)
    return EnergySpectrum(r, cumulative, convention)


def truncate(factors: SvdFactors, n_modes: int) -> PodBasis:
    p = factors.sigma.size
    if int(n_modes) != n_modes or not 1 <= n_modes <= p:
        raise TruncationError(f"mode count must lie in [1, {p}], got {n_modes}")
    i = int(n_modes)
    spectrum = energy_spectrum(factors.sigma)
    return PodBasis(
        phi=factors.phi[:, :i].copy(),
        sigma=factors.sigma[:i].copy(),
        psi_t=factors.psi_t[:i].copy(),
        captured_energy=float(spectrum.cumulative[i - 1]),
    )


@dataclass(frozen=True)
class CrosscheckReport:
    n_compared: int
    max_value_deviation: float
    subspace_angle: float
    eigenvalues: np.ndarray
    sigma_squared: np.ndarray


def covariance_crosscheck(snapshots, rel_cutoff: float = 1e-8) -> CrosscheckReport:
    """Compare the SVD of ``U`` against the eigendecomposition of ``U U^T``.

    Value deviations are scaled by the largest eigenvalue. The angle is the
    largest principal angle between the leading eigenvectors and the leading
    left singular vectors, over the ``k`` modes whose energy ``sigma_k**2``
    exceeds ``rel_cutoff * sigma_1**2``. Below that the covariance matrix
    cannot resolve its eigenvectors: forming ``U U^T`` already rounds at
    ``eps * sigma_1**2``.
    """
    u = getattr(snapshots, "data", snapshots)
    u = np.asarray(u, dtype=float)
    factors = linalg.svd(u)
    energy_spectrum(factors.sigma)  # raises on an all-zero matrix
    values, vectors = linalg.eigen_sym(u @ u.T)

    s2 = factors.sigma**2
    k = int(np.sum(s2 > rel_cutoff * s2[0]))
    dev = float(np.max(np.abs(values[:k] - s2[:k])) / s2[0])
    v, phi = vectors[:, :k], factors.phi[:, :k]
    # sine of the largest principal angle, from the part of phi outside span(v)
    residual = phi - v @ (v.T @ phi)
    angle = float(np.arcsin(min(1.0, np.linalg.norm(residual, 2))))
    return CrosscheckReport(k, dev, angle, values, s2)


class POD(TransformerMixin, BaseEstimator):
    """POD basis as a scikit-learn transformer.

    Rows of ``X`` are snapshots (one per time), columns are grid points, so
    ``X`` is the transpose of the usual snapshot matrix. Data are not centered.

    Parameters
    ----------
    n_modes : int or float, default=None
        Number of modes kept. A float in (0, 1) keeps the fewest modes whose
        cumulative energy reaches that fraction; None keeps all.
    energy_convention : {"sigma_squared", "sigma_linear"}
        Convention for ``spectrum_`` and for a fractional ``n_modes``.
        ``basis_.captured_energy`` is always the sigma-squared fraction.
    """

    def __init__(self, n_modes=None, energy_convention="sigma_squared"):
        self.n_modes = n_modes
        self.energy_convention = energy_convention

    def _resolve_n_modes(self, spectrum, p):
        n = self.n_modes
        if n is None:
            return p
        if isinstance(n, (float, np.floating)) and 0.0 < n < 1.0:
            return int(min(np.searchsorted(spectrum.cumulative, n - 1e-15) + 1, p))
        return int(n)

    def fit(self, X, y=None):
        X = check_array(X, dtype=np.float64)
        self.factors_ = linalg.svd(X.T)
        self.spectrum_ = energy_spectrum(self.factors_.sigma, self.energy_convention)
        self.basis_ = truncate(
            self.factors_, self._resolve_n_modes(self.spectrum_, self.factors_.sigma.size)
        )
        self.components_ = self.basis_.phi.T
        self.singular_values_ = self.basis_.sigma
        self.n_modes_ = self.basis_.n_modes
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "basis_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, POD was fitted with {self.n_features_in_}"
            )
        return X @ self.basis_.phi

    def inverse_transform(self, X):
        check_is_fitted(self, "basis_")
        X = check_array(X, dtype=np.float64)
        return X @ self.components_
