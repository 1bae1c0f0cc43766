"""Perk-Schultz R-matrix and the fundamental evaluation representation."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .graded_linalg import (
    GradedSpace,
    ParityProfile,
    SparseOperator,
    embed_sum,
    gcomm,
    graded_kron,
    matrix_unit,
    residual,
)

# Tensor terms: (coefficient, (operator on factor 1, operator on factor 2)).
Terms = list[tuple[complex, tuple[SparseOperator, SparseOperator]]]


def _check_q(q: complex):
    if q == 0 or abs(q - 1) < 1e-12 or abs(q + 1) < 1e-12:
        raise ValueError(f"degenerate q = {q}")


def constant_r_terms(profile: ParityProfile, q: complex) -> tuple[Terms, Terms]:
    """Tensor-term form of the constant parts (R, Rbar)."""
    R, Rb = _constant_r_terms(profile, complex(q))
    return list(R), list(Rb)


@lru_cache(maxsize=128)
def _constant_r_terms(profile: ParityProfile, q: complex):
    _check_q(q)
    V = GradedSpace.fundamental(profile)
    E = lambda i, j: matrix_unit(V, i, j)  # noqa: E731
    n = profile.n
    R: Terms = []
    Rb: Terms = []
    for i in range(1, n + 1):
        s = profile.sign(i)
        R.append((q ** s, (E(i, i), E(i, i))))
        Rb.append((q ** (-s), (E(i, i), E(i, i))))
        for j in range(1, n + 1):
            if i != j:
                R.append((1.0, (E(i, i), E(j, j))))
                Rb.append((1.0, (E(i, i), E(j, j))))
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i < j:
                R.append(((q - 1 / q) * profile.sign(j), (E(i, j), E(j, i))))
            elif i > j:
                Rb.append((-(q - 1 / q) * profile.sign(j), (E(i, j), E(j, i))))
    return tuple(R), tuple(Rb)


def _assemble(terms: Terms) -> SparseOperator:
    out = None
    for c, (a, b) in terms:
        t = graded_kron(a, b) * c
        out = t if out is None else out + t
    return out


@lru_cache(maxsize=128)
def build_constant_r(profile: ParityProfile, q: complex) -> tuple[SparseOperator, SparseOperator]:
    R, Rb = constant_r_terms(profile, q)
    return _assemble(R), _assemble(Rb)


@dataclass(frozen=True, eq=False)
class RMatrix:
    profile: ParityProfile
    q: complex
    x1: complex
    x2: complex
    matrix: SparseOperator

    @property
    def ratio(self) -> complex:
        return self.x1 / self.x2

    def terms(self) -> Terms:
        R, Rb = constant_r_terms(self.profile, self.q)
        return R + [(-self.ratio * c, ops) for c, ops in Rb]


def build_ps_rmatrix(profile: ParityProfile, q: complex, x1: complex, x2: complex) -> RMatrix:
    if x2 == 0:
        raise ValueError("x2 must be nonzero")
    R, Rb = build_constant_r(profile, q)
    return RMatrix(profile, q, x1, x2, R - Rb * (x1 / x2))


def check_graded_ybe(profile: ParityProfile, q: complex, x1: complex, x2: complex,
                     x3: complex) -> float:
    """Residual of R12 R13 R23 = R23 R13 R12 on V (x) V (x) V."""
    if 0 in (x1, x2, x3):
        raise ValueError("spectral parameters must be nonzero")
    _check_q(q)
    r12 = _embedded_r(profile, q, x1 / x2, (0, 1))
    r13 = _embedded_r(profile, q, x1 / x3, (0, 2))
    r23 = _embedded_r(profile, q, x2 / x3, (1, 2))
    return residual(r12 @ r13 @ r23, r23 @ r13 @ r12)


@lru_cache(maxsize=64)
def _embedded_pieces(profile: ParityProfile, slots: tuple[int, int]):
    """q-independent pieces of the constant R-matrices embedded in V (x) V (x) V.

    Order: diagonal with sign +1, diagonal with sign -1, off-diagonal
    E_ii E_jj, upper E_ij E_ji, lower E_ij E_ji (the last two carry sign(j)).
    """
    V = GradedSpace.fundamental(profile)
    E = lambda i, j: matrix_unit(V, i, j)  # noqa: E731
    idx = profile.indices
    groups = (
        [(1.0, (E(i, i), E(i, i))) for i in idx if profile.sign(i) > 0],
        [(1.0, (E(i, i), E(i, i))) for i in idx if profile.sign(i) < 0],
        [(1.0, (E(i, i), E(j, j))) for i in idx for j in idx if i != j],
        [(profile.sign(j), (E(i, j), E(j, i))) for i in idx for j in idx if i < j],
        [(profile.sign(j), (E(i, j), E(j, i))) for i in idx for j in idx if i > j],
    )
    fac = (V, V, V)
    zero = SparseOperator.zero(fac)
    return tuple(embed_sum(g, slots, fac) if g else zero for g in groups)


def _embedded_r(profile, q, ratio, slots) -> SparseOperator:
    dp, dm, off, up, lo = _embedded_pieces(profile, slots)
    c = q - 1 / q
    R = dp * q + dm * (1 / q) + off + up * c
    Rb = dp * (1 / q) + dm * q + off - lo * c
    return R - Rb * ratio


# -- fundamental evaluation representation -------------------------------

@dataclass(frozen=True, eq=False)
class ChevalleyImage:
    """Images of e_i, f_i, q^{h_i} (0 <= i < M+N) and q^{k_i}, q^{kbar_i} (1 <= i <= M+N).

    Keys of ``qkbar`` may be missing where the image is not defined.
    Cartan data are stored as exponentiated diagonal operators; ``h`` and
    ``k`` hold the exponents themselves.
    """

    profile: ParityProfile
    q: complex
    e: dict[int, SparseOperator]
    f: dict[int, SparseOperator]
    h: dict[int, SparseOperator]
    k: dict[int, SparseOperator]
    qk: dict[int, SparseOperator]
    qkbar: dict[int, SparseOperator]

    def qh(self, i: int, power: complex = 1) -> SparseOperator:
        d = self.h[i % self.profile.n].diag()
        return SparseOperator.diagonal(self.q ** (power * d), self.h[0].factors)

    @property
    def factors(self):
        return self.h[0].factors


def generator_parity(profile: ParityProfile, i: int) -> int:
    """Parity of e_i / f_i: odd exactly for i in {0, M} when MN != 0."""
    if profile.M * profile.N == 0:
        return 0
    return int(i % profile.n in (0, profile.M % profile.n))


def fundamental_rep(profile: ParityProfile, q: complex, x: complex,
                    affine: bool = True) -> ChevalleyImage:
    if x == 0:
        raise ValueError("x must be nonzero")
    n = profile.n
    if affine and (profile.M, profile.N) == (1, 1):
        raise ValueError("the affine evaluation map is excluded for (M,N)=(1,1); "
                         "use affine=False for the finite part")
    V = GradedSpace.fundamental(profile)
    E = lambda i, j: matrix_unit(V, i, j)  # noqa: E731
    sg = profile.sign
    e, f, h = {}, {}, {}
    for i in range(1, n):
        e[i] = E(i, i + 1)
        f[i] = E(i + 1, i) * sg(i)
        h[i] = E(i, i) * sg(i) - E(i + 1, i + 1) * sg(i + 1)
    if n == 1:
        h[0] = SparseOperator.zero((V,))
    else:
        h[0] = E(n, n) * sg(n) - E(1, 1) * sg(1)
        if affine:
            # q-power diagonal factors act trivially next to E_{n1}, E_{1n}
            e[0] = E(n, 1) * x
            f[0] = E(1, n) * (sg(n) / x)
    k = {i: E(i, i) for i in range(1, n + 1)}
    qk = {i: SparseOperator.diagonal(q ** k[i].diag(), (V,)) for i in k}
    qkbar = {i: SparseOperator.diagonal(q ** (-k[i].diag()), (V,)) for i in k}
    return ChevalleyImage(profile, q, e, f, h, k, qk, qkbar)


def _qbracket(h: SparseOperator, q: complex) -> SparseOperator:
    d = h.diag()
    return SparseOperator.diagonal((q ** d - q ** (-d)) / (q - 1 / q), h.factors)


def check_chevalley_relations(rep: ChevalleyImage) -> dict[str, float]:
    """Residuals of the Chevalley relations of the affine superalgebra on ``rep``."""
    prof, q = rep.profile, rep.q
    n = prof.n
    fac = rep.factors
    zero = SparseOperator.zero(fac)
    idx = sorted(rep.e)
    out: dict[str, float] = {}

    def put(name, val):
        out[name] = max(out.get(name, 0.0), val)

    for i in rep.h:
        for j in rep.h:
            put("[h,h]", residual(gcomm(rep.h[i], rep.h[j]), zero))
    for i in rep.h:
        for j in idx:
            a = prof.cartan(i, j)
            put("[h,e]", residual(gcomm(rep.h[i], rep.e[j]), rep.e[j] * a))
            put("[h,f]", residual(gcomm(rep.h[i], rep.f[j]), rep.f[j] * (-a)))
    for i in idx:
        for j in idx:
            target = _qbracket(rep.h[i], q) if i == j else zero
            put("[e,f]", residual(gcomm(rep.e[i], rep.f[j]), target))
    for i in idx:
        for j in idx:
            if prof.cartan(i, j) == 0:
                put("[e,e]=0", residual(gcomm(rep.e[i], rep.e[j]), zero))
                put("[f,f]=0", residual(gcomm(rep.f[i], rep.f[j]), zero))
    for i in idx:
        for j in idx:
            if i != j and abs(prof.cartan(i, j)) == 1 and prof.cartan(i, i) != 0:
                ee = gcomm(rep.e[i], gcomm(rep.e[i], rep.e[j], q), 1 / q)
                ff = gcomm(rep.f[i], gcomm(rep.f[i], rep.f[j], 1 / q), q)
                put("serre", max(residual(ee, zero), residual(ff, zero)))
    if (prof.M, prof.N) in ((2, 0), (0, 2)) and len(idx) == 2:
        for i in idx:
            for j in idx:
                if i != j:
                    ee = gcomm(rep.e[i], gcomm(rep.e[i], gcomm(rep.e[i], rep.e[j], q ** 2)), q ** -2)
                    ff = gcomm(rep.f[i], gcomm(rep.f[i], gcomm(rep.f[i], rep.f[j], q ** -2)), q ** 2)
                    put("serre-cubic", max(residual(ee, zero), residual(ff, zero)))
    if prof.M * prof.N and n >= 4 and len(idx) == n:
        for (i, j, k) in ((n - 1, 0, 1), (prof.M - 1, prof.M, prof.M + 1)):
            i, j, k = i % n, j % n, k % n
            ee = gcomm(gcomm(gcomm(rep.e[i], rep.e[j], q), rep.e[k], 1 / q), rep.e[j])
            ff = gcomm(gcomm(gcomm(rep.f[i], rep.f[j], 1 / q), rep.f[k], q), rep.f[j])
            put("extra-serre", max(residual(ee, zero), residual(ff, zero)))
    if (prof.M, prof.N) in ((2, 1), (1, 2)) and len(idx) == 3:
        a, b, c = (0, 2, 1) if (prof.M, prof.N) == (2, 1) else (0, 1, 2)
        for g in (rep.e, rep.f):
            lhs = gcomm(g[a], gcomm(g[b], gcomm(g[a], gcomm(g[b], g[c], 1 / q))), q)
            rhs = gcomm(g[b], gcomm(g[a], gcomm(g[b], gcomm(g[a], g[c], 1 / q))), q)
            put("quartic", residual(lhs, rhs))
    level = zero
    for i in rep.h:
        level = level + rep.h[i]
    put("level-zero", residual(level, zero))
    return out
