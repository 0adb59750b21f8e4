"""Dense factorizations used to extract modes from snapshot data.

Both factorizations are Jacobi methods: a one-sided (Hestenes) sweep for the
SVD and the classical two-sided cyclic sweep for symmetric eigenproblems.
At snapshot sizes (a few dozen rows, up to a few thousand columns) they are
fast enough and accurate to working precision.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

EPS = np.finfo(float).eps


class ShapeError(ValueError):
    pass


class FactorizationError(ArithmeticError):
    pass


class ContractViolation(ValueError):
    pass


@dataclass(frozen=True)
class SvdFactors:
    """Thin SVD ``a = phi @ diag(sigma) @ psi_t`` with ``p = min(m, n)``."""

    phi: np.ndarray
    sigma: np.ndarray
    psi_t: np.ndarray

    @property
    def rank_bound(self):
        return self.sigma.size

    def reconstruct(self) -> np.ndarray:
        return (self.phi * self.sigma) @ self.psi_t


def _as_matrix(a, name="a") -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise ShapeError(f"{name} must be 2-D, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite entries")
    return a


def matmul(a, b) -> np.ndarray:
    a, b = _as_matrix(a, "a"), _as_matrix(b, "b")
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def transpose(a) -> np.ndarray:
    return _as_matrix(a).T.copy()


def matvec(a, v) -> np.ndarray:
    a = _as_matrix(a)
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.shape[0] != a.shape[1]:
        raise ShapeError(f"cannot apply {a.shape} matrix to vector of shape {v.shape}")
    return a @ v


def sign_convention(vectors: np.ndarray) -> np.ndarray:
    """+1/-1 per column so that each column's largest-magnitude entry is >= 0.

    ``np.argmax`` returns the first maximal index, which settles ties.
    """
    idx = np.argmax(np.abs(vectors), axis=0)
    pivots = vectors[idx, np.arange(vectors.shape[1])]
    return np.where(pivots < 0.0, -1.0, 1.0)


def _complete_orthonormal(cols: np.ndarray, good: np.ndarray) -> np.ndarray:
    # Replace the columns flagged not-good with unit vectors orthogonalized
    # against everything kept so far (two Gram-Schmidt passes).
    out = cols.copy()
    basis = [out[:, k] for k in np.flatnonzero(good)]
    candidates = iter(np.eye(out.shape[0]))
    for k in np.flatnonzero(~good):
        for e in candidates:
            v = e.copy()
            for _ in range(2):
                for b in basis:
                    v -= (b @ v) * b
            norm = np.linalg.norm(v)
            if norm > 0.5:
                v /= norm
                break
        else:  # pragma: no cover - eye(m) always spans the complement
            raise FactorizationError("could not complete orthonormal basis")
        out[:, k] = v
        basis.append(v)
    return out


def complete_basis(cols) -> np.ndarray:
    """Extend orthonormal columns (m x k) to an orthonormal basis of R^m.

    The first k columns are returned unchanged.
    """
    cols = _as_matrix(cols, "cols")
    m, k = cols.shape
    if k > m:
        raise ShapeError(f"cannot have {k} orthonormal columns in R^{m}")
    if not np.allclose(cols.T @ cols, np.eye(k), atol=1e-10):
        raise ContractViolation("columns are not orthonormal")
    full = np.zeros((m, m))
    full[:, :k] = cols
    return _complete_orthonormal(full, np.arange(m) < k)


def _hestenes(g: np.ndarray, tol: float, max_sweeps: int):
    """Orthogonalize the rows of ``g`` (p x r) in place; returns (g, V)."""
    p = g.shape[0]
    v = np.eye(p)
    # columns at roundoff level of the whole matrix count as zero; rotating
    # them against each other never settles
    floor = (EPS * np.linalg.norm(g)) ** 2
    for _ in range(max_sweeps):
        rotated = False
        for i in range(p - 1):
            gi = g[i]
            for j in range(i + 1, p):
                gj = g[j]
                alpha = gi @ gi
                beta = gj @ gj
                gamma = gi @ gj
                if (
                    gamma == 0.0
                    or min(alpha, beta) <= floor
                    or abs(gamma) <= tol * np.sqrt(alpha * beta)
                ):
                    continue
                rotated = True
                zeta = (beta - alpha) / (2.0 * gamma)
                t = np.copysign(1.0, zeta) / (abs(zeta) + np.hypot(1.0, zeta))
                c = 1.0 / np.hypot(1.0, t)
                s = c * t
                new_i = c * gi - s * gj
                g[j] = s * gi + c * gj
                g[i] = gi = new_i
                vi = v[i].copy()
                v[i] = c * vi - s * v[j]
                v[j] = s * vi + c * v[j]
        if not rotated:
            return g, v
    raise FactorizationError(f"one-sided Jacobi did not converge in {max_sweeps} sweeps")


def svd(a, tol: float = 1e-15, max_sweeps: int = 60) -> SvdFactors:
    """Thin SVD by one-sided Jacobi rotations.

    Singular values come back in descending order, and each column of ``phi``
    has its largest-magnitude entry non-negative.
    """
    a = _as_matrix(a)
    m, n = a.shape
    if min(m, n) < 1:
        raise ShapeError("svd needs a non-empty matrix")
    # rotate the shorter dimension: rows of g are the p columns being orthogonalized
    wide = m < n
    g = a.copy() if wide else a.T.copy()
    g, v = _hestenes(g, tol, max_sweeps)

    sigma = np.linalg.norm(g, axis=1)
    order = np.argsort(-sigma, kind="stable")
    sigma, g, v = sigma[order], g[order], v[order]

    # g rows are sigma_k * (long singular vector); v rows are the short ones
    # directions of roundoff-level columns are noise; complete them instead
    good = sigma > max(m, n) * EPS * sigma[0]
    long_vecs = np.zeros_like(g)
    long_vecs[good] = g[good] / sigma[good, None]
    long_vecs = _complete_orthonormal(long_vecs.T, good).T

    if wide:
        phi, psi_t = v.T, long_vecs
    else:
        phi, psi_t = long_vecs.T, v
    phi = np.ascontiguousarray(phi)
    psi_t = np.ascontiguousarray(psi_t)
    signs = sign_convention(phi)
    return SvdFactors(phi * signs, sigma, psi_t * signs[:, None])


def eigen_sym(a, tol: float = 1e-15, max_sweeps: int = 60):
    """Eigenvalues (descending) and orthonormal eigenvectors of a symmetric matrix."""
    a = _as_matrix(a)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ShapeError(f"eigen_sym needs a square matrix, got {a.shape}")
    scale = max(np.max(np.abs(a)), 1.0) if a.size else 1.0
    if np.max(np.abs(a - a.T), initial=0.0) > 1e-12 * scale:
        raise ContractViolation("eigen_sym input is not symmetric")

    w = 0.5 * (a + a.T)
    vecs = np.eye(n)
    # off-diagonal entries are judged against their own diagonal pair, which
    # keeps small eigenvalues (and their vectors) accurate to working precision
    floor = EPS**2 * np.linalg.norm(w)
    for _ in range(max_sweeps):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = w[p, q]
                app, aqq = w[p, p], w[q, q]
                if abs(apq) <= max(tol * np.sqrt(abs(app * aqq)), floor):
                    continue
                rotated = True
                theta = (aqq - app) / (2.0 * apq)
                t = np.copysign(1.0, theta) / (abs(theta) + np.hypot(1.0, theta))
                c = 1.0 / np.hypot(1.0, t)
                s = t * c
                wp, wq = w[:, p].copy(), w[:, q].copy()
                w[:, p] = c * wp - s * wq
                w[:, q] = s * wp + c * wq
                wp, wq = w[p].copy(), w[q].copy()
                w[p] = c * wp - s * wq
                w[q] = s * wp + c * wq
                w[p, q] = w[q, p] = 0.0
                vp, vq = vecs[:, p].copy(), vecs[:, q].copy()
                vecs[:, p] = c * vp - s * vq
                vecs[:, q] = s * vp + c * vq
        if not rotated:
            break
    else:
        raise FactorizationError(f"Jacobi eigensolver did not converge in {max_sweeps} sweeps")

    values = np.diag(w).copy()
    order = np.argsort(-values, kind="stable")
    values, vecs = values[order], vecs[:, order]
    return values, vecs * sign_convention(vecs)
