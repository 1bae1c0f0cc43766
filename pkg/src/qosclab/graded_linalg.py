"""Z2-graded sparse linear algebra.

Operators act on ordered tensor products of finite graded spaces.  The
basis of a product is row-major over the factor list, and the matrix of
``A (x) B`` carries the Koszul sign ``(-1)**(p(B) * parity(col_A))`` so that
``(A (x) B)(C (x) D) = (-1)**(p(B) p(C)) (AC (x) BD)`` holds as a matrix
identity.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache, reduce
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

DROP_TOL = 1e-14


@dataclass(frozen=True)
class Tolerance:
    abs_tol: float = 1e-10
    drop_tol: float = DROP_TOL

    def __post_init__(self):
        if not 0 < self.drop_tol < self.abs_tol < 1:
            raise ValueError("need 0 < drop_tol < abs_tol < 1")


@dataclass(frozen=True)
class ParityProfile:
    """The pair (M, N); index i in 1..M+N is odd iff i > M."""

    M: int
    N: int

    def __post_init__(self):
        if self.M < 0 or self.N < 0 or self.M + self.N < 1:
            raise ValueError(f"invalid profile ({self.M},{self.N})")

    @property
    def n(self) -> int:
        return self.M + self.N

    def p(self, i: int) -> int:
        """Grading of index ``i``; indices are read modulo M+N with 0 == M+N."""
        i = (i - 1) % self.n + 1
        return 0 if i <= self.M else 1

    def sign(self, i: int) -> int:
        return -1 if self.p(i) else 1

    @property
    def indices(self) -> range:
        return range(1, self.n + 1)

    def cartan(self, i: int, j: int) -> int:
        """Affine Cartan matrix a_ij, indices modulo M+N."""
        n = self.n
        i, j = i % n, j % n
        a = 0
        if i == j:
            a += self.sign(i) + self.sign(i + 1)
        if (i - (j - 1)) % n == 0:
            a -= self.sign(i + 1)
        if (i - (j + 1)) % n == 0:
            a -= self.sign(i)
        return a

    def __str__(self):
        return f"({self.M},{self.N})"


@dataclass(frozen=True)
class GradedSpace:
    parities: tuple[int, ...]

    def __post_init__(self):
        if not self.parities or any(p not in (0, 1) for p in self.parities):
            raise ValueError("parities must be a non-empty tuple of 0/1")

    @property
    def dim(self) -> int:
        return len(self.parities)

    @classmethod
    def even(cls, dim: int) -> "GradedSpace":
        return cls((0,) * dim)

    @classmethod
    def fundamental(cls, profile: ParityProfile) -> "GradedSpace":
        return cls(tuple(profile.p(i) for i in profile.indices))


def basis_parity(factors: Sequence[GradedSpace]) -> np.ndarray:
    """Parity of every product basis state, row-major over ``factors``."""
    return _basis_parity(tuple(factors))


@lru_cache(maxsize=512)
def _basis_parity(factors: tuple[GradedSpace, ...]) -> np.ndarray:
    vecs = [np.asarray(f.parities, dtype=np.int8) for f in factors]
    out = np.asarray(reduce(lambda a, b: (a[:, None] + b[None, :]).ravel() % 2, vecs),
                     dtype=np.int8)
    out.flags.writeable = False
    return out


def _prune(m: sp.spmatrix, drop_tol: float) -> sp.csr_matrix:
    if not (sp.isspmatrix_csr(m) and m.dtype == complex):
        m = sp.csr_matrix(m, dtype=complex)
    if m.nnz:
        small = np.abs(m.data) < drop_tol
        if small.any():
            m = m.copy()
            m.data[small] = 0
            m.eliminate_zeros()
    return m


@dataclass(frozen=True, eq=False)
class SparseOperator:
    """Linear endomorphism of a graded tensor product.

    ``parity`` is 0 or 1 for homogeneous operators and ``None`` for
    parity-mixed containers such as an evaluated L-operator.
    """

    matrix: sp.csr_matrix
    factors: tuple[GradedSpace, ...]
    parity: int | None = 0
    _bp: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        object.__setattr__(self, "matrix", _prune(self.matrix, DROP_TOL))
        bp = basis_parity(self.factors)
        object.__setattr__(self, "_bp", bp)
        if self.matrix.shape != (bp.size, bp.size):
            raise ValueError(
                f"matrix shape {self.matrix.shape} does not match spaces ({bp.size})"
            )
        if self.parity is not None and self.matrix.nnz:
            m = self.matrix
            rows = np.repeat(np.arange(m.shape[0]), np.diff(m.indptr))
            bad = (bp[rows] + bp[m.indices]) % 2 != self.parity
            if bad.any():
                raise ValueError(f"entries inconsistent with parity {self.parity}")

    # construction -------------------------------------------------------
    @classmethod
    def from_matrix(cls, matrix, factors, parity="auto") -> "SparseOperator":
        """Wrap a matrix; ``parity="auto"`` infers it from the stored entries."""
        factors = tuple(factors)
        m = _prune(sp.csr_matrix(matrix, dtype=complex), DROP_TOL)
        if parity == "auto":
            parity = _infer_parity(m, basis_parity(factors))
        return cls(m, factors, parity)

    @classmethod
    def identity(cls, factors) -> "SparseOperator":
        factors = tuple(factors)
        d = int(np.prod([f.dim for f in factors]))
        return cls(sp.identity(d, dtype=complex, format="csr"), factors, 0)

    @classmethod
    def zero(cls, factors, parity: int | None = 0) -> "SparseOperator":
        factors = tuple(factors)
        d = int(np.prod([f.dim for f in factors]))
        return cls(sp.csr_matrix((d, d), dtype=complex), factors, parity)

    @classmethod
    def diagonal(cls, values, factors) -> "SparseOperator":
        return cls(sp.diags(np.asarray(values, dtype=complex), format="csr"), factors, 0)

    # properties ---------------------------------------------------------
    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def basis_parity(self) -> np.ndarray:
        return self._bp

    @property
    def nnz(self) -> int:
        return self.matrix.nnz

    def is_zero(self) -> bool:
        return self.matrix.nnz == 0

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def diag(self) -> np.ndarray:
        return self.matrix.diagonal()

    # arithmetic ---------------------------------------------------------
    def _check(self, other: "SparseOperator"):
        if self.factors != other.factors:
            raise ValueError("operators act on different spaces")

    def __matmul__(self, other: "SparseOperator") -> "SparseOperator":
        self._check(other)
        if self.parity is None or other.parity is None:
            parity = "auto"
        else:
            parity = (self.parity + other.parity) % 2
        return SparseOperator.from_matrix(self.matrix @ other.matrix, self.factors, parity)

    def _sum_parity(self, other):
        if self.is_zero():
            return other.parity
        if other.is_zero():
            return self.parity
        return self.parity if self.parity == other.parity else "auto"

    def __add__(self, other: "SparseOperator") -> "SparseOperator":
        self._check(other)
        return SparseOperator.from_matrix(
            self.matrix + other.matrix, self.factors, self._sum_parity(other)
        )

    def __sub__(self, other: "SparseOperator") -> "SparseOperator":
        self._check(other)
        return SparseOperator.from_matrix(
            self.matrix - other.matrix, self.factors, self._sum_parity(other)
        )

    def __neg__(self) -> "SparseOperator":
        return SparseOperator(-self.matrix, self.factors, self.parity)

    def __mul__(self, c) -> "SparseOperator":
        if isinstance(c, SparseOperator):
            raise TypeError("use @ for operator products")
        return SparseOperator(self.matrix * complex(c), self.factors, self.parity)

    __rmul__ = __mul__

    def __truediv__(self, c) -> "SparseOperator":
        return self * (1.0 / complex(c))

    def restrict_columns(self, mask: np.ndarray) -> "SparseOperator":
        """Zero every column outside ``mask`` (a boolean vector over the basis)."""
        proj = sp.diags(np.asarray(mask, dtype=complex), format="csr")
        return SparseOperator(self.matrix @ proj, self.factors, self.parity)

    def parts(self) -> dict[int, "SparseOperator"]:
        """Split into homogeneous components, keyed by parity."""
        coo = self.matrix.tocoo()
        ep = (self._bp[coo.row] + self._bp[coo.col]) % 2
        out = {}
        for p in (0, 1):
            sel = ep == p
            m = sp.csr_matrix((coo.data[sel], (coo.row[sel], coo.col[sel])), shape=coo.shape)
            out[p] = SparseOperator(m, self.factors, p)
        return out


def _infer_parity(m: sp.csr_matrix, bp: np.ndarray) -> int | None:
    coo = m.tocoo()
    if coo.nnz == 0:
        return 0
    ep = np.unique((bp[coo.row] + bp[coo.col]) % 2)
    return int(ep[0]) if ep.size == 1 else None


def matrix_unit(space: GradedSpace, i: int, j: int) -> SparseOperator:
    """E_ij on ``space`` with 1-based indices."""
    d = space.dim
    if not (1 <= i <= d and 1 <= j <= d):
        raise IndexError(f"matrix unit ({i},{j}) out of range for dim {d}")
    m = sp.csr_matrix(([1.0 + 0j], ([i - 1], [j - 1])), shape=(d, d))
    parity = (space.parities[i - 1] + space.parities[j - 1]) % 2
    return SparseOperator(m, (space,), parity)


def graded_kron(A: SparseOperator, B: SparseOperator) -> SparseOperator:
    """Graded tensor product of homogeneous operators."""
    if A.parity is None or B.parity is None:
        raise ValueError("graded_kron needs homogeneous operators")
    if B.parity:
        sign = np.where(A.basis_parity == 1, -1.0, 1.0)
        a = A.matrix @ sp.diags(sign, format="csr")
    else:
        a = A.matrix
    return SparseOperator(
        sp.kron(a, B.matrix, format="csr"),
        A.factors + B.factors,
        (A.parity + B.parity) % 2,
    )


def graded_kron_mixed(A: SparseOperator, B: SparseOperator) -> SparseOperator:
    """Graded tensor product extended bilinearly to parity-mixed operands."""
    pa = A.parts() if A.parity is None else {A.parity: A}
    pb = B.parts() if B.parity is None else {B.parity: B}
    out = None
    for a in pa.values():
        for b in pb.values():
            t = graded_kron(a, b)
            out = t if out is None else out + t
    return out


def embed_factor(A: SparseOperator, position: int, factors: Sequence[GradedSpace]) -> SparseOperator:
    """``1 (x) ... (x) A (x) ... (x) 1`` with ``A`` at ``position`` (0-based)."""
    factors = tuple(factors)
    if not 0 <= position < len(factors):
        raise IndexError("position out of range")
    if A.factors != (factors[position],):
        raise ValueError(f"operator does not act on factor {position}")
    return embed_term([A], [position], factors)


def embed_term(ops: Sequence[SparseOperator], positions: Sequence[int],
               factors: Sequence[GradedSpace]) -> SparseOperator:
    """Graded product ``op_0 (x) op_1 ...`` placed at increasing ``positions``.

    Each op may itself span several consecutive factors; identities fill the
    remaining slots.
    """
    factors = tuple(factors)
    slots: list[SparseOperator] = []
    k = 0
    queue = sorted(zip(positions, ops), key=lambda t: t[0])
    for pos, op in queue:
        if k < pos:
            # one identity over the whole gap keeps the kron chain short
            slots.append(SparseOperator.identity(factors[k:pos]))
            k = pos
        width = len(op.factors)
        if op.factors != factors[pos:pos + width]:
            raise ValueError(f"space mismatch at position {pos}")
        slots.append(op)
        k += width
    if k < len(factors):
        slots.append(SparseOperator.identity(factors[k:]))
    return reduce(graded_kron, slots)


def embed_sum(terms: Iterable[tuple[complex, Sequence[SparseOperator]]],
              positions: Sequence[int], factors: Sequence[GradedSpace]) -> SparseOperator:
    """Sum of coefficient-weighted embedded tensor terms."""
    out = None
    for coef, ops in terms:
        t = embed_term(ops, positions, factors) * coef
        out = t if out is None else out + t
    if out is None:
        return SparseOperator.zero(factors)
    return out


def supertrace(A: SparseOperator) -> complex:
    return complex(np.sum(np.where(A.basis_parity == 1, -1.0, 1.0) * A.diag()))


def partial_supertrace(A: SparseOperator, n_traced: int = 1) -> SparseOperator:
    """Supertrace over the leading ``n_traced`` factors."""
    lead = A.factors[:n_traced]
    rest = A.factors[n_traced:]
    if not rest:
        raise ValueError("nothing left after the partial trace")
    dr = int(np.prod([f.dim for f in rest]))
    signs = np.where(basis_parity(lead) == 1, -1.0, 1.0)
    coo = A.matrix.tocoo()
    blk_r, blk_c = coo.row // dr, coo.col // dr
    keep = blk_r == blk_c
    data = coo.data[keep] * signs[blk_r[keep]]
    out = sp.csr_matrix((data, (coo.row[keep] % dr, coo.col[keep] % dr)), shape=(dr, dr))
    return SparseOperator.from_matrix(out, rest)


def residual(A: SparseOperator, B: SparseOperator) -> float:
    """Max-absolute-entry norm of ``A - B``."""
    if A.matrix.shape != B.matrix.shape:
        raise ValueError(f"shape mismatch {A.matrix.shape} vs {B.matrix.shape}")
    d = A.matrix - B.matrix
    return float(np.max(np.abs(d.data))) if d.nnz else 0.0


def gcomm(X: SparseOperator, Y: SparseOperator, qfac: complex = 1.0) -> SparseOperator:
    """Graded q-commutator ``XY - (-1)**(p(X)p(Y)) qfac YX``."""
    if X.parity is None or Y.parity is None:
        raise ValueError("graded commutator needs homogeneous operators")
    s = -1.0 if X.parity * Y.parity else 1.0
    return X @ Y - (Y @ X) * (s * qfac)


def qint(x, q):
    """q-number [x]_q = (q^x - q^-x)/(q - 1/q)."""
    return (q ** x - q ** (-np.asarray(x))) / (q - 1 / q)


def relative_residual(A: SparseOperator, B: SparseOperator) -> float:
    """``residual(A, B)`` divided by max(1, largest entry of A or B)."""
    scale = max(1.0, float(np.max(np.abs(A.matrix.data), initial=0.0)),
                float(np.max(np.abs(B.matrix.data), initial=0.0)))
    return residual(A, B) / scale


@dataclass(frozen=True, eq=False)
class Words:
    """An operator kept as an unevaluated sum of products.

    Identities whose sides cancel between large terms are judged against
    the size of the individual terms rather than the size of their sum.
    """

    terms: tuple[SparseOperator, ...]
    parity: int | None = 0

    @classmethod
    def of(cls, op: "SparseOperator | Words") -> "Words":
        if isinstance(op, Words):
            return op
        return cls((op,) if not op.is_zero() else (), op.parity)

    def __matmul__(self, other) -> "Words":
        other = Words.of(other)
        p = None if self.parity is None or other.parity is None else (self.parity + other.parity) % 2
        terms = tuple(a @ b for a in self.terms for b in other.terms)
        return Words(tuple(t for t in terms if not t.is_zero()), p)

    def __add__(self, other) -> "Words":
        other = Words.of(other)
        return Words(self.terms + other.terms, self.parity if self.terms else other.parity)

    def __sub__(self, other) -> "Words":
        return self + (-Words.of(other))

    def __neg__(self) -> "Words":
        return Words(tuple(-t for t in self.terms), self.parity)

    def __mul__(self, c) -> "Words":
        return Words(tuple(t * c for t in self.terms), self.parity)

    __rmul__ = __mul__

    def __truediv__(self, c) -> "Words":
        return self * (1 / c)

    def total(self, factors) -> SparseOperator:
        out = SparseOperator.zero(factors, None)
        for t in self.terms:
            out = out + t
        return out


def wcomm(X, Y, qfac: complex = 1.0) -> Words:
    """Graded q-commutator on unevaluated sums."""
    X, Y = Words.of(X), Words.of(Y)
    if X.parity is None or Y.parity is None:
        raise ValueError("graded commutator needs homogeneous operators")
    s = -1.0 if X.parity * Y.parity else 1.0
    return X @ Y - (Y @ X) * (s * qfac)


def word_residual(lhs, rhs, factors, mask=None) -> float:
    """Max entry of lhs - rhs over the largest entry of any single term (floored at 1)."""
    lhs, rhs = Words.of(lhs), Words.of(rhs)
    scale = 1.0
    diff = SparseOperator.zero(factors, None)
    for sign, side in ((1.0, lhs), (-1.0, rhs)):
        for t in side.terms:
            if mask is not None:
                t = t.restrict_columns(mask)
            if t.nnz:
                scale = max(scale, float(np.max(np.abs(t.matrix.data))))
            diff = diff + t * sign
    return residual(diff, SparseOperator.zero(factors, None)) / scale
