"""Dense complex linear algebra with explicit rank/positivity tolerances.

Every floating-point judgement the package makes (is this matrix PSD? what
is its rank? are these two operators equal?) funnels through this module so
that the conventions live in exactly one place:

* rank cutoffs are *relative*: a singular value (or eigenvalue magnitude)
  counts as zero when it is below ``eps_rank`` times the largest one;
* positivity is checked against ``-eps_psd`` on the smallest eigenvalue;
* operator equality is measured in the max-entry norm against ``eps_eq``.

Matrices are plain ``numpy.ndarray`` objects with ``complex`` dtype.  The
helpers here never mutate their inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonHermitianInput, NotPSD

__all__ = [
    "Tolerance",
    "DEFAULT_TOL",
    "as_matrix",
    "max_abs",
    "require_hermitian",
    "eigh",
    "psd_check",
    "numerical_rank",
    "pseudo_inverse",
    "psd_sqrt",
    "range_projection",
    "kernel_basis",
    "close",
]

#: Hermiticity slack: a matrix within this (scale-relative) distance of its
#: adjoint is silently symmetrized; anything farther raises NonHermitianInput.
HERMITIAN_RESIDUAL = 1e-12


@dataclass(frozen=True)
class Tolerance:
    """Bundle of the three tolerances used throughout the package.

    :param eps_rank: relative singular-value cutoff for rank decisions.
    :param eps_psd: absolute slack allowed below zero for PSD checks.
    :param eps_eq: max-entry-norm threshold for operator equality.
    """

    eps_rank: float = 1e-9
    eps_psd: float = 1e-10
    eps_eq: float = 1e-9

    def __post_init__(self) -> None:
        for name in ("eps_rank", "eps_psd", "eps_eq"):
            value = getattr(self, name)
            if not (0.0 < value < 1e-3):
                raise ValueError(f"{name} must lie in (0, 1e-3), got {value!r}")


DEFAULT_TOL = Tolerance()


def as_matrix(a) -> np.ndarray:
    """Coerce ``a`` to a 2-d complex array, rejecting NaN/inf entries."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-d array, got shape {m.shape}")
    if m.size and not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    return m


def max_abs(a) -> float:
    """Max-entry norm ``max_ij |a_ij|`` (zero for an empty array)."""
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def close(a, b, tol: Tolerance = DEFAULT_TOL) -> bool:
    """True when ``a`` and ``b`` agree entrywise within ``eps_eq``."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        return False
    return max_abs(a - b) <= tol.eps_eq


def require_hermitian(m, *, residual: float = HERMITIAN_RESIDUAL) -> np.ndarray:
    """Return the Hermitian part of ``m`` if it is close enough to Hermitian.

    The residual ``max_abs(m - m*)`` is compared against ``residual`` scaled
    by ``max(1, max_abs(m))`` so that well-conditioned large matrices are not
    rejected for harmless rounding.  Beyond that, NonHermitianInput is raised
    rather than silently averaging away a real asymmetry.
    """
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise NonHermitianInput(f"matrix is not square: shape {m.shape}")
    gap = max_abs(m - m.conj().T)
    if gap > residual * max(1.0, max_abs(m)):
        raise NonHermitianInput(
            f"matrix is not Hermitian: ||M - M*||_max = {gap:.3e}"
        )
    return (m + m.conj().T) / 2.0


def eigh(m, tol: Tolerance = DEFAULT_TOL):
    """Eigendecomposition of a Hermitian matrix.

    Returns ``(w, u)`` with eigenvalues ``w`` ascending and unitary ``u``
    such that ``m = u @ diag(w) @ u*``.
    """
    h = require_hermitian(m)
    w, u = np.linalg.eigh(h)
    return w, u


def psd_check(m, tol: Tolerance = DEFAULT_TOL) -> bool:
    """True iff the smallest eigenvalue of Hermitian ``m`` is >= -eps_psd."""
    h = require_hermitian(m)
    if h.shape[0] == 0:
        return True
    w = np.linalg.eigvalsh(h)
    return bool(w[0] >= -tol.eps_psd)


def numerical_rank(m, tol: Tolerance = DEFAULT_TOL) -> int:
    """Rank of ``m`` with the relative singular-value cutoff ``eps_rank``."""
    m = as_matrix(m)
    if m.size == 0:
        return 0
    s = np.linalg.svd(m, compute_uv=False)
    top = s[0] if s.size else 0.0
    if top <= 0.0:
        return 0
    return int(np.count_nonzero(s > tol.eps_rank * top))


def pseudo_inverse(m, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Moore-Penrose inverse of a Hermitian matrix via eigendecomposition.

    Eigenvalues below ``eps_rank`` times the largest magnitude are treated
    as exact zeros, which keeps ``pseudo_inverse`` consistent with
    :func:`numerical_rank` and :func:`range_projection` on the same input.
    """
    w, u = eigh(m, tol)
    if w.size == 0:
        return np.zeros_like(np.asarray(m, dtype=complex))
    cut = tol.eps_rank * np.max(np.abs(w))
    inv = np.where(np.abs(w) > cut, 1.0 / np.where(w == 0, 1.0, w), 0.0)
    return (u * inv) @ u.conj().T


def psd_sqrt(m, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Hermitian square root of a PSD matrix; tiny negatives are clipped."""
    w, u = eigh(m, tol)
    scale = max(float(w[-1]) if w.size else 0.0, 1.0)
    if w.size and w[0] < -tol.eps_psd * scale:
        raise NotPSD(f"matrix has a negative eigenvalue {w[0]:.3e}")
    w = np.clip(w, 0.0, None)
    return (u * np.sqrt(w)) @ u.conj().T


def range_projection(m, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Orthogonal projection onto the column space of ``m``."""
    m = as_matrix(m)
    rows = m.shape[0]
    if m.size == 0:
        return np.zeros((rows, rows), dtype=complex)
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    top = s[0] if s.size else 0.0
    if top <= 0.0:
        return np.zeros((rows, rows), dtype=complex)
    r = int(np.count_nonzero(s > tol.eps_rank * top))
    ur = u[:, :r]
    return ur @ ur.conj().T


def kernel_basis(m, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis (as columns) of the kernel of ``m``.

    The result has shape ``(cols, cols - rank)``; for a full-rank matrix it
    has zero columns.  ``m @ kernel_basis(m)`` vanishes to working precision.
    """
    m = as_matrix(m)
    cols = m.shape[1]
    if cols == 0:
        return np.zeros((0, 0), dtype=complex)
    if max_abs(m) == 0.0:
        return np.eye(cols, dtype=complex)
    _, s, vh = np.linalg.svd(m, full_matrices=True)
    top = s[0] if s.size else 0.0
    r = int(np.count_nonzero(s > tol.eps_rank * top)) if top > 0 else 0
    return vh[r:, :].conj().T
