"""Linear maps between matrix algebras in Kraus and Choi form.

Conventions, fixed package-wide:

* a map acts as ``phi(X) = sum_j K_j* X K_j`` where each Kraus factor
  ``K_j`` has shape ``(d_in, d_out)``;
* the Choi matrix is the block matrix ``[phi(E_ij)]`` of shape
  ``(d_in * d_out, d_in * d_out)`` whose block ``(i, j)`` holds
  ``phi(E_ij)`` for the ``d_in x d_in`` matrix unit ``E_ij``.

Under these conventions the Choi matrix equals

    ``sum_j  v_j v_j*``   with   ``v_j = conj(K_j).reshape(-1)``

(row-major flattening), which is exactly what :func:`_kraus_vector` and
:func:`_vector_kraus` implement.  The map is completely positive iff its
Choi matrix is PSD, the minimal number of Kraus factors equals the rank of
the Choi matrix, and scaled Choi eigenvectors give a trace-orthogonal
minimal Kraus family.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import linalg
from .errors import DimensionMismatch, NotCP, NotPSD
from .linalg import DEFAULT_TOL, Tolerance

__all__ = [
    "CpMap",
    "MapClass",
    "apply",
    "kraus_to_choi",
    "choi_to_kraus",
    "minimal_kraus",
    "is_cp",
    "choi_rank",
    "classify",
    "maps_close",
]


def _kraus_vector(k: np.ndarray) -> np.ndarray:
    """Flatten a Kraus factor to the Choi vector it contributes."""
    return k.conj().reshape(-1)


def _vector_kraus(v: np.ndarray, d_in: int, d_out: int) -> np.ndarray:
    """Inverse of :func:`_kraus_vector`."""
    return v.reshape(d_in, d_out).conj()


def _canonical_phase(k: np.ndarray) -> np.ndarray:
    """Rotate a factor so its largest entry is real positive.

    A global phase on a Kraus factor leaves the map unchanged; pinning it
    makes decompositions reproducible run to run.
    """
    flat = k.reshape(-1)
    if flat.size == 0:
        return k
    idx = int(np.argmax(np.abs(flat)))
    pivot = flat[idx]
    if np.abs(pivot) == 0.0:
        return k
    return k * (np.abs(pivot) / pivot)


@dataclass(frozen=True, eq=False)
class CpMap:
    """A linear map ``M_{d_in} -> M_{d_out}`` with Hermitian Choi matrix.

    Instances always carry a Choi matrix; Kraus factors are kept when the
    map was built from them (or extracted on request).  Despite the name,
    construction does not require complete positivity -- differences of CP
    maps and other Hermiticity-preserving maps are legal values, and
    :func:`is_cp` decides positivity.
    """

    d_in: int
    d_out: int
    choi: np.ndarray
    kraus: Optional[tuple] = field(default=None)

    def __post_init__(self):
        if self.d_in < 1 or self.d_out < 1:
            raise DimensionMismatch("dimensions must be positive")
        n = self.d_in * self.d_out
        choi = linalg.require_hermitian(self.choi)
        if choi.shape != (n, n):
            raise DimensionMismatch(
                f"Choi matrix has shape {choi.shape}, expected {(n, n)}"
            )
        object.__setattr__(self, "choi", choi)
        if self.kraus is not None:
            ks = tuple(linalg.as_matrix(k) for k in self.kraus)
            for k in ks:
                if k.shape != (self.d_in, self.d_out):
                    raise DimensionMismatch(
                        f"Kraus factor has shape {k.shape}, expected "
                        f"{(self.d_in, self.d_out)}"
                    )
            object.__setattr__(self, "kraus", ks)
            rebuilt = kraus_to_choi(ks, self.d_in, self.d_out)
            if linalg.max_abs(rebuilt - choi) > 1e-9 * max(1.0, linalg.max_abs(choi)):
                raise DimensionMismatch(
                    "stored Kraus factors and Choi matrix disagree"
                )

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_kraus(cls, kraus: Sequence[np.ndarray], d_in: int | None = None,
                   d_out: int | None = None) -> "CpMap":
        ks = tuple(linalg.as_matrix(k) for k in kraus)
        if not ks:
            if d_in is None or d_out is None:
                raise DimensionMismatch(
                    "dimensions are required for an empty Kraus family"
                )
        else:
            k0 = ks[0]
            d_in = k0.shape[0] if d_in is None else d_in
            d_out = k0.shape[1] if d_out is None else d_out
        choi = kraus_to_choi(ks, d_in, d_out)
        return cls(d_in=d_in, d_out=d_out, choi=choi, kraus=ks)

    @classmethod
    def from_choi(cls, choi, d_in: int, d_out: int) -> "CpMap":
        return cls(d_in=d_in, d_out=d_out, choi=linalg.as_matrix(choi))

    @classmethod
    def from_action(cls, action: Callable[[np.ndarray], np.ndarray],
                    d_in: int, d_out: int) -> "CpMap":
        """Build a map from a callable by evaluating it on matrix units.

        The callable must be Hermiticity-preserving, otherwise the assembled
        Choi matrix fails the Hermitian check.
        """
        blocks = np.zeros((d_in * d_out, d_in * d_out), dtype=complex)
        for i in range(d_in):
            for j in range(d_in):
                unit = np.zeros((d_in, d_in), dtype=complex)
                unit[i, j] = 1.0
                value = linalg.as_matrix(action(unit))
                if value.shape != (d_out, d_out):
                    raise DimensionMismatch(
                        f"action returned shape {value.shape}, expected "
                        f"{(d_out, d_out)}"
                    )
                blocks[i * d_out:(i + 1) * d_out, j * d_out:(j + 1) * d_out] = value
        return cls(d_in=d_in, d_out=d_out, choi=blocks)

    @classmethod
    def zero(cls, d_in: int, d_out: int) -> "CpMap":
        n = d_in * d_out
        return cls(d_in=d_in, d_out=d_out, choi=np.zeros((n, n), dtype=complex),
                   kraus=())

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: "CpMap") -> "CpMap":
        self._check_same_space(other)
        if self.kraus is not None and other.kraus is not None:
            return CpMap.from_kraus(self.kraus + other.kraus,
                                    self.d_in, self.d_out)
        return CpMap(d_in=self.d_in, d_out=self.d_out,
                     choi=self.choi + other.choi)

    def __sub__(self, other: "CpMap") -> "CpMap":
        self._check_same_space(other)
        return CpMap(d_in=self.d_in, d_out=self.d_out,
                     choi=self.choi - other.choi)

    def __mul__(self, scalar: float) -> "CpMap":
        s = float(scalar)
        ks = None
        if self.kraus is not None and s >= 0.0:
            ks = tuple(np.sqrt(s) * k for k in self.kraus)
        return CpMap(d_in=self.d_in, d_out=self.d_out, choi=s * self.choi,
                     kraus=ks)

    __rmul__ = __mul__

    def _check_same_space(self, other: "CpMap") -> None:
        if (self.d_in, self.d_out) != (other.d_in, other.d_out):
            raise DimensionMismatch(
                f"maps act on different algebras: "
                f"{(self.d_in, self.d_out)} vs {(other.d_in, other.d_out)}"
            )

    # -- conveniences ------------------------------------------------------

    def unit(self) -> np.ndarray:
        """Value on the identity, ``phi(I_{d_in})``."""
        return apply(self, np.eye(self.d_in, dtype=complex))

    def is_zero(self, tol: Tolerance = DEFAULT_TOL) -> bool:
        return linalg.max_abs(self.choi) <= tol.eps_eq


def apply(phi: CpMap, x) -> np.ndarray:
    """Evaluate ``phi`` on a ``d_in x d_in`` matrix ``x``."""
    x = linalg.as_matrix(x)
    if x.shape != (phi.d_in, phi.d_in):
        raise DimensionMismatch(
            f"argument has shape {x.shape}, expected {(phi.d_in, phi.d_in)}"
        )
    if phi.kraus is not None:
        out = np.zeros((phi.d_out, phi.d_out), dtype=complex)
        for k in phi.kraus:
            out += k.conj().T @ x @ k
        return out
    # phi(X) = sum_ij X_ij phi(E_ij), and block (i, j) of the Choi matrix
    # is phi(E_ij).
    tensor = phi.choi.reshape(phi.d_in, phi.d_out, phi.d_in, phi.d_out)
    return np.einsum("ij,iajb->ab", x, tensor)


def kraus_to_choi(kraus: Sequence[np.ndarray], d_in: int | None = None,
                  d_out: int | None = None) -> np.ndarray:
    """Assemble the Choi matrix of ``X -> sum_j K_j* X K_j``."""
    ks = [linalg.as_matrix(k) for k in kraus]
    if ks:
        d_in = ks[0].shape[0] if d_in is None else d_in
        d_out = ks[0].shape[1] if d_out is None else d_out
    if d_in is None or d_out is None:
        raise DimensionMismatch("dimensions required for empty Kraus family")
    n = d_in * d_out
    choi = np.zeros((n, n), dtype=complex)
    for k in ks:
        if k.shape != (d_in, d_out):
            raise DimensionMismatch(
                f"Kraus factor has shape {k.shape}, expected {(d_in, d_out)}"
            )
        v = _kraus_vector(k)
        choi += np.outer(v, v.conj())
    return choi


def choi_to_kraus(choi, d_in: int, d_out: int,
                  tol: Tolerance = DEFAULT_TOL) -> list:
    """Minimal Kraus factors of a PSD Choi matrix.

    Eigenvectors with eigenvalue above the relative rank cutoff are scaled
    by the square root of their eigenvalue and reshaped; the resulting
    factors are linearly independent, mutually orthogonal in the trace
    inner product, and their number equals the Choi rank.  Raises NotPSD
    when the Choi matrix has an eigenvalue below ``-eps_psd``.
    """
    choi = linalg.require_hermitian(choi)
    n = d_in * d_out
    if choi.shape != (n, n):
        raise DimensionMismatch(
            f"Choi matrix has shape {choi.shape}, expected {(n, n)}"
        )
    w, u = np.linalg.eigh(choi)
    if w.size and w[0] < -tol.eps_psd:
        raise NotPSD(f"Choi matrix has eigenvalue {w[0]:.3e}")
    top = float(np.max(w)) if w.size else 0.0
    if top <= 0.0:
        return []
    keep = np.nonzero(w > tol.eps_rank * top)[0]
    factors = []
    for idx in keep[::-1]:  # largest eigenvalue first
        v = np.sqrt(w[idx]) * u[:, idx]
        factors.append(_canonical_phase(_vector_kraus(v, d_in, d_out)))
    return factors


def minimal_kraus(phi: CpMap, tol: Tolerance = DEFAULT_TOL) -> list:
    """A minimal (linearly independent) Kraus family for a CP map.

    If the map already stores a linearly independent Kraus family it is
    returned unchanged -- any independent family is a legitimate minimal
    choice, and preserving the caller's basis keeps derived objects (e.g.
    commutant factors) expressed in their coordinates.  Otherwise factors
    are extracted from the Choi matrix.
    """
    if phi.kraus is not None and len(phi.kraus) > 0:
        stack = np.stack([k.reshape(-1) for k in phi.kraus])
        if linalg.numerical_rank(stack, tol) == len(phi.kraus):
            return list(phi.kraus)
    return choi_to_kraus(phi.choi, phi.d_in, phi.d_out, tol)


def is_cp(phi: CpMap, tol: Tolerance = DEFAULT_TOL) -> bool:
    """True iff the Choi matrix of ``phi`` is PSD within ``eps_psd``."""
    return linalg.psd_check(phi.choi, tol)


def choi_rank(phi: CpMap, tol: Tolerance = DEFAULT_TOL) -> int:
    """Numerical rank of the Choi matrix = minimal Kraus count."""
    return linalg.numerical_rank(phi.choi, tol)


def maps_close(phi: CpMap, psi: CpMap, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Equality of maps, measured entrywise on the Choi matrices."""
    if (phi.d_in, phi.d_out) != (psi.d_in, psi.d_out):
        return False
    return linalg.max_abs(phi.choi - psi.choi) <= tol.eps_eq


@dataclass(frozen=True, eq=False)
class MapClass:
    """Structural summary of a CP map produced by :func:`classify`.

    ``is_entanglement_breaking_quasipure_form`` is true when every minimal
    Kraus factor is rank one with a common right vector ``v``, i.e. the map
    acts as ``X -> trace(rho X) |v><v|``; ``eb_state`` and ``eb_vector``
    then carry ``(rho, v)``.
    """

    d_in: int
    d_out: int
    is_cp: bool
    choi_rank: int
    is_pure: bool
    is_unital: bool
    is_entanglement_breaking_quasipure_form: bool
    eb_state: Optional[np.ndarray] = None
    eb_vector: Optional[np.ndarray] = None


def _eb_form(factors: list, d_in: int, d_out: int, tol: Tolerance):
    """Detect the trace-functional-times-state form of a CP map.

    Checks every minimal factor is rank <= 1 and that the right singular
    vectors coincide up to phase; returns ``(rho, v)`` or ``None``.
    """
    if not factors:
        return None
    common_v = None
    lefts = []
    for k in factors:
        s = np.linalg.svd(k, compute_uv=False)
        if s.size == 0 or s[0] <= 0.0:
            return None
        if s.size > 1 and s[1] > tol.eps_rank * s[0]:
            return None
        _, _, vh = np.linalg.svd(k)
        v = vh[0, :].conj()
        if common_v is None:
            common_v = v
        elif abs(abs(np.vdot(common_v, v)) - 1.0) > 1e-9:
            return None
    # pin the phase of v: first significant entry real positive
    idx = int(np.argmax(np.abs(common_v)))
    common_v = common_v * (np.abs(common_v[idx]) / common_v[idx])
    for k in factors:
        lefts.append(k @ common_v)  # k = |w><v|  =>  k v = w
    rho = np.zeros((d_in, d_in), dtype=complex)
    for w in lefts:
        rho += np.outer(w, w.conj())
    # confirm the reconstruction phi(X) = trace(rho X) |v><v| on units
    for i in range(d_in):
        for j in range(d_in):
            unit = np.zeros((d_in, d_in), dtype=complex)
            unit[i, j] = 1.0
            expected = rho[j, i] * np.outer(common_v, common_v.conj())
            got = np.zeros((d_out, d_out), dtype=complex)
            for k in factors:
                got += k.conj().T @ unit @ k
            if linalg.max_abs(expected - got) > 1e-8 * max(1.0, linalg.max_abs(rho)):
                return None
    return rho, common_v


def classify(phi: CpMap, tol: Tolerance = DEFAULT_TOL) -> MapClass:
    """Structural facts about a CP map; raises NotCP on a non-CP input."""
    if not is_cp(phi, tol):
        raise NotCP("classify requires a completely positive map")
    rank = choi_rank(phi, tol)
    factors = minimal_kraus(phi, tol)
    unital = linalg.max_abs(phi.unit() - np.eye(phi.d_out)) <= tol.eps_eq
    eb = _eb_form(factors, phi.d_in, phi.d_out, tol)
    return MapClass(
        d_in=phi.d_in,
        d_out=phi.d_out,
        is_cp=True,
        choi_rank=rank,
        is_pure=rank <= 1,
        is_unital=bool(unital),
        is_entanglement_breaking_quasipure_form=eb is not None,
        eb_state=None if eb is None else eb[0],
        eb_vector=None if eb is None else eb[1],
    )
