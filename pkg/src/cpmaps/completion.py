"""Positive block completion and minimal CP completion.

Block problem.  Given a projection ``P`` on ``C^n`` and the blocks
``A = P M P`` and ``C = (I-P) M P`` of an unknown PSD matrix ``M``, a
positive completion exists iff ``A`` is PSD and ``ker A`` (within
``ran P``) is contained in ``ker C``.  In finite dimension that kernel
condition is equivalent to the quadratic bound ``C* C <= q A`` for some
``q > 0``:

* if ``C* C <= q A`` then any ``v`` with ``A v = 0`` has
  ``||C v||^2 <= q <v, A v> = 0``;
* conversely, if ``ker A <= ker C`` then ``C* C`` is supported on
  ``ran A``, where ``A >= lambda_min+ . P_ran(A)``, so
  ``q = ||C||^2 / lambda_min+(A)`` works.

Both directions are exercised numerically in the test suite.  Among all
completions -- which share ``A`` and ``C`` and differ only in the free
corner -- there is a least one in the PSD order, with corner
``D = C A^+ C*`` (the limit of ``C (A + t)^{-1} C*`` as ``t`` decreases to
``0``).

CP problem.  A partial map ``beta(X) = phi(X) R`` determines the Choi
column ``[beta(E_ij)]``; a CP completion exists iff that column extends to
a PSD matrix, i.e. iff the block problem with splitting
``P = I (x) P_R`` is completable.  The minimal CP completion can be
computed two independent ways, which must agree:

* Choi route: minimal positive completion of the block problem;
* Stinespring route: compress a seed completion's dilation to the
  reducing subspace generated by ``V P_R``.

Blocks here are carried in *operator form*: ``A`` and ``C`` are ``n x n``
matrices satisfying ``A = P A P`` and ``C = (I-P) C P``, which avoids any
choice of basis for ``ran P``.  ``BlockCompletionProblem.from_blocks``
accepts the familiar compact ``[[A, C*], [C, *]]`` corner layout.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import linalg
from .cp_map import CpMap, apply, is_cp
from .errors import (
    DimensionMismatch,
    MalformedPartialMap,
    NotCompletable,
    RNotProjection,
    SeedNotACompletion,
)
from .linalg import DEFAULT_TOL, Tolerance
from .stinespring import map_from_dilation, minimal_stinespring, reducing_projection

__all__ = [
    "BlockCompletionProblem",
    "PartialCpMap",
    "CompletionFeasibilityReport",
    "block_completable",
    "minimal_block_completion",
    "cp_completable",
    "minimal_cp_completion_choi",
    "minimal_cp_completion_stinespring",
    "necessary_conditions_report",
]


def _check_projection(p: np.ndarray, tol: Tolerance, what: str) -> np.ndarray:
    p = linalg.require_hermitian(p)
    if linalg.max_abs(p @ p - p) > 1e-9 * max(1.0, linalg.max_abs(p)):
        raise RNotProjection(f"{what} is not an orthogonal projection")
    return p


@dataclass(frozen=True, eq=False)
class BlockCompletionProblem:
    """Known data of a partially specified PSD matrix.

    ``p`` is the splitting projection; ``a`` and ``c`` are the known
    compression and off-diagonal block in operator form (``a = p a p``,
    ``c = (1-p) c p``, both ``n x n``).
    """

    p: np.ndarray
    a: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        p = _check_projection(self.p, DEFAULT_TOL, "the splitting")
        a = linalg.require_hermitian(self.a)
        c = linalg.as_matrix(self.c)
        n = p.shape[0]
        if a.shape != (n, n) or c.shape != (n, n):
            raise DimensionMismatch("blocks must match the splitting dimension")
        comp = np.eye(n, dtype=complex) - p
        scale = max(1.0, linalg.max_abs(a), linalg.max_abs(c))
        if linalg.max_abs(p @ a @ p - a) > 1e-9 * scale:
            raise DimensionMismatch("diagonal block is not supported on ran P")
        if linalg.max_abs(comp @ c @ p - c) > 1e-9 * scale:
            raise DimensionMismatch(
                "off-diagonal block must map ran P into its complement"
            )
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "c", c)

    @property
    def dim(self) -> int:
        return self.p.shape[0]

    @classmethod
    def from_blocks(cls, a, c) -> "BlockCompletionProblem":
        """Build from compact corner blocks ``a`` (r x r) and ``c`` (s x r).

        The splitting projection is onto the first ``r`` coordinates of
        ``C^{r+s}``, matching the ``[[A, C*], [C, *]]`` corner picture.
        """
        a = linalg.as_matrix(a)
        c = linalg.as_matrix(c)
        r = a.shape[0]
        if a.shape != (r, r):
            raise DimensionMismatch("diagonal block must be square")
        if c.shape[1] != r:
            raise DimensionMismatch("off-diagonal block must have r columns")
        s = c.shape[0]
        n = r + s
        p = np.zeros((n, n), dtype=complex)
        p[:r, :r] = np.eye(r)
        a_op = np.zeros((n, n), dtype=complex)
        a_op[:r, :r] = a
        c_op = np.zeros((n, n), dtype=complex)
        c_op[r:, :r] = c
        return cls(p=p, a=a_op, c=c_op)


def block_completable(problem: BlockCompletionProblem,
                      tol: Tolerance = DEFAULT_TOL) -> bool:
    """True iff the block data extends to some PSD matrix.

    The test is ``A`` PSD together with ``ker A <= ker C`` (kernels taken
    inside ``ran P``); see the module docstring for why this matches the
    quadratic criterion ``C* C <= q A``.
    """
    if not linalg.psd_check(problem.a, tol):
        return False
    comp = np.eye(problem.dim, dtype=complex) - problem.p
    # kernel of A inside ran P = kernel of (A + (1 - P)), which is PSD
    null = linalg.kernel_basis(problem.a + comp, tol)
    if null.shape[1] == 0:
        return True
    image = problem.c @ null
    c_scale = linalg.max_abs(problem.c)
    if c_scale == 0.0:
        return True
    s = np.linalg.svd(image, compute_uv=False)
    top = float(s[0]) if s.size else 0.0
    return top <= tol.eps_rank * max(1.0, c_scale)


def minimal_block_completion(problem: BlockCompletionProblem,
                             tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """The least PSD completion ``A + C + C* + C A^+ C*``.

    Every completion differs from this one only in the free corner, and by
    a larger-or-equal PSD corner; NotCompletable is raised when no
    completion exists at all.
    """
    if not block_completable(problem, tol):
        raise NotCompletable("the block data admits no PSD completion")
    a_pinv = linalg.pseudo_inverse(problem.a, tol)
    corner = problem.c @ a_pinv @ problem.c.conj().T
    m = problem.a + problem.c + problem.c.conj().T + corner
    return (m + m.conj().T) / 2.0


# ---------------------------------------------------------------------------
# partial CP maps


@dataclass(frozen=True, eq=False)
class PartialCpMap:
    """The data ``beta(X) = phi(X) R`` of an unknown CP map ``phi``.

    ``blocks[i][j]`` holds ``beta(E_ij)``; every block must lie in the
    right ideal ``M_{d_out} . R`` (i.e. vanish against the orthocomplement
    of ``ran R``), otherwise MalformedPartialMap is raised.
    """

    d_in: int
    d_out: int
    r: np.ndarray
    blocks: tuple

    def __post_init__(self):
        r = linalg.as_matrix(self.r)
        if r.shape != (self.d_out, self.d_out):
            raise DimensionMismatch(
                f"R has shape {r.shape}, expected {(self.d_out, self.d_out)}"
            )
        object.__setattr__(self, "r", r)
        p_r = linalg.range_projection(r)
        comp = np.eye(self.d_out, dtype=complex) - p_r
        rows = []
        scale = max(1.0, linalg.max_abs(r))
        for i in range(self.d_in):
            row = []
            for j in range(self.d_in):
                b = linalg.as_matrix(self.blocks[i][j])
                if b.shape != (self.d_out, self.d_out):
                    raise DimensionMismatch(
                        f"block ({i},{j}) has shape {b.shape}"
                    )
                scale = max(scale, linalg.max_abs(b))
                row.append(b)
            rows.append(tuple(row))
        for i in range(self.d_in):
            for j in range(self.d_in):
                if linalg.max_abs(rows[i][j] @ comp) > 1e-9 * scale:
                    raise MalformedPartialMap(
                        f"block ({i},{j}) does not lie in M_d . R"
                    )
        object.__setattr__(self, "blocks", tuple(rows))

    @classmethod
    def from_map(cls, phi: CpMap, r) -> "PartialCpMap":
        r = linalg.as_matrix(r)
        blocks = []
        for i in range(phi.d_in):
            row = []
            for j in range(phi.d_in):
                unit = np.zeros((phi.d_in, phi.d_in), dtype=complex)
                unit[i, j] = 1.0
                row.append(apply(phi, unit) @ r)
            blocks.append(tuple(row))
        return cls(d_in=phi.d_in, d_out=phi.d_out, r=r, blocks=tuple(blocks))

    def range_projection(self, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
        return linalg.range_projection(self.r, tol)

    def evaluate(self, x) -> np.ndarray:
        """beta(X) by linearity from the unit blocks."""
        x = linalg.as_matrix(x)
        out = np.zeros((self.d_out, self.d_out), dtype=complex)
        for i in range(self.d_in):
            for j in range(self.d_in):
                out += x[i, j] * self.blocks[i][j]
        return out


def _split_blocks(beta: PartialCpMap, tol: Tolerance):
    """The block problem induced by a partial CP map.

    Knowing ``phi(X) R`` is the same as knowing ``phi(X) P_R`` (multiply by
    the pseudo-inverse of ``R`` or by ``R`` itself), so the known Choi
    column is ``N = [beta(E_ij) R^+]`` and the splitting is
    ``P = I (x) P_R``.
    """
    d1, d2 = beta.d_in, beta.d_out
    n = d1 * d2
    r_pinv = np.linalg.pinv(beta.r, rcond=tol.eps_rank)
    p_r = beta.range_projection(tol)
    column = np.zeros((n, n), dtype=complex)
    for i in range(d1):
        for j in range(d1):
            column[i * d2:(i + 1) * d2, j * d2:(j + 1) * d2] = (
                beta.blocks[i][j] @ r_pinv
            )
    p_split = np.kron(np.eye(d1, dtype=complex), p_r)
    a = p_split @ column
    c = (np.eye(n, dtype=complex) - p_split) @ column
    return p_split, a, c


def cp_completable(beta: PartialCpMap, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Whether some CP map ``phi`` satisfies ``phi(X) R = beta(X)``.

    Reduces to positive completability of the known Choi column, with the
    additional self-consistency requirement that the known compression be
    Hermitian (equivalently ``beta(E_ij)* ~ beta(E_ji)`` against ``R``).
    """
    p_split, a, c = _split_blocks(beta, tol)
    scale = max(1.0, linalg.max_abs(a))
    if linalg.max_abs(a - a.conj().T) > 1e-9 * scale:
        return False
    a = (a + a.conj().T) / 2.0
    try:
        problem = BlockCompletionProblem(p=p_split, a=a, c=c)
    except DimensionMismatch:
        return False
    return block_completable(problem, tol)


def minimal_cp_completion_choi(beta: PartialCpMap,
                               tol: Tolerance = DEFAULT_TOL) -> CpMap:
    """Minimal CP completion via the positive block completion of the Choi.

    The PSD order on Choi matrices is the CP domination order, and all
    completions share everything but the free corner, so the least block
    completion is the Choi matrix of the least CP completion.
    """
    if not cp_completable(beta, tol):
        raise NotCompletable("the partial map admits no CP completion")
    p_split, a, c = _split_blocks(beta, tol)
    a = (a + a.conj().T) / 2.0
    problem = BlockCompletionProblem(p=p_split, a=a, c=c)
    choi = minimal_block_completion(problem, tol)
    return CpMap.from_choi(choi, beta.d_in, beta.d_out)


def _seed_completes(beta: PartialCpMap, seed: CpMap, tol: Tolerance) -> bool:
    if (seed.d_in, seed.d_out) != (beta.d_in, beta.d_out):
        return False
    if not is_cp(seed, tol):
        return False
    scale = max(1.0, linalg.max_abs(seed.choi), linalg.max_abs(beta.r))
    for i in range(beta.d_in):
        for j in range(beta.d_in):
            unit = np.zeros((beta.d_in, beta.d_in), dtype=complex)
            unit[i, j] = 1.0
            got = apply(seed, unit) @ beta.r
            if linalg.max_abs(got - beta.blocks[i][j]) > 1e-7 * scale:
                return False
    return True


def minimal_cp_completion_stinespring(beta: PartialCpMap, seed: CpMap,
                                      tol: Tolerance = DEFAULT_TOL) -> CpMap:
    """Minimal CP completion via compression of a seed completion.

    Given any CP completion ``seed``, the subspace generated by
    ``pi(X) V P_R h`` inside the seed's minimal dilation is reducing; the
    compression of the dilation to it is the unique minimal completion,
    independent of which seed was supplied.  SeedNotACompletion is raised
    when the seed does not actually complete ``beta``.
    """
    if not _seed_completes(beta, seed, tol):
        raise SeedNotACompletion(
            "the seed map is not a CP completion of the partial data"
        )
    if seed.is_zero(tol):
        return CpMap.zero(beta.d_in, beta.d_out)
    triple = minimal_stinespring(seed, tol)
    p_r = beta.range_projection(tol)
    q = reducing_projection(triple, p_r, tol)
    w = q @ triple.v
    return map_from_dilation(w, beta.d_in, beta.d_out, triple.multiplicity)


# ---------------------------------------------------------------------------
# feasibility diagnostics


@dataclass(frozen=True, eq=False)
class CompletionFeasibilityReport:
    """Sampled necessary conditions for CP completability against a projection.

    ``compressed_cp``: whether ``X -> R beta(X)`` has a PSD Choi column.
    ``q_bound``: smallest sampled constant with
    ``beta(X)* (1-R) beta(X) <= q ||X|| R beta(X)`` over the PSD samples, or
    ``None`` with a ``q_witness`` when some sample admits no such constant.
    ``completable``: the exact feasibility decision.
    """

    compressed_cp: bool
    q_bound: Optional[float]
    q_witness: Optional[np.ndarray]
    completable: bool
    trials: int


def necessary_conditions_report(beta: PartialCpMap, *, trials: int = 25,
                                seed: int = 0,
                                tol: Tolerance = DEFAULT_TOL
                                ) -> CompletionFeasibilityReport:
    """Diagnostic report on the classical necessary conditions.

    Requires ``R`` to be an orthogonal projection (RNotProjection
    otherwise), since the compressed-map condition reads against ``R``
    itself rather than its range projection.
    """
    r = _check_projection(beta.r, tol, "R")
    d1, d2 = beta.d_in, beta.d_out

    compressed = np.zeros((d1 * d2, d1 * d2), dtype=complex)
    for i in range(d1):
        for j in range(d1):
            compressed[i * d2:(i + 1) * d2, j * d2:(j + 1) * d2] = (
                r @ beta.blocks[i][j]
            )
    gap = linalg.max_abs(compressed - compressed.conj().T)
    compressed_cp = gap <= 1e-9 * max(1.0, linalg.max_abs(compressed))
    if compressed_cp:
        compressed_cp = linalg.psd_check(compressed, tol)

    rng = np.random.default_rng(seed)
    comp = np.eye(d2, dtype=complex) - r
    q_bound = 0.0
    q_witness = None
    for _ in range(trials):
        g = rng.normal(size=(d1, d1)) + 1j * rng.normal(size=(d1, d1))
        x = g @ g.conj().T
        bx = beta.evaluate(x)
        s = bx.conj().T @ comp @ bx
        t = float(np.linalg.norm(x, ord=2)) * (r @ bx)
        t_gap = linalg.max_abs(t - t.conj().T)
        t_scale = max(1.0, linalg.max_abs(t))
        if t_gap > 1e-8 * t_scale or not linalg.psd_check((t + t.conj().T) / 2, tol):
            q_bound, q_witness = None, x
            break
        t = (t + t.conj().T) / 2
        p_t = linalg.range_projection(t, tol)
        off = (np.eye(d2) - p_t) @ s @ (np.eye(d2) - p_t)
        if linalg.max_abs(off) > 1e-8 * max(1.0, linalg.max_abs(s)):
            q_bound, q_witness = None, x
            break
        t_inv_half = linalg.psd_sqrt(linalg.pseudo_inverse(t, tol), tol)
        ratio = t_inv_half @ s @ t_inv_half
        w = np.linalg.eigvalsh((ratio + ratio.conj().T) / 2)
        q_x = float(w[-1]) if w.size else 0.0
        q_bound = max(q_bound, q_x)

    return CompletionFeasibilityReport(
        compressed_cp=bool(compressed_cp),
        q_bound=q_bound,
        q_witness=q_witness,
        completable=cp_completable(beta, tol),
        trials=trials,
    )
