"""Truncated Fock spaces of the q-oscillator superalgebra.

One mode per pair (i, a) with i in I and a in the complement.  A mode is
fermionic when p(i) + p(a) is odd.  Bosonic modes are cut at ``cutoff``:
``cdag`` maps the top state to zero, and all q-factors live in ``c`` so that
``c cdag = [n+1]_q`` and ``cdag c = [n]_q`` below the cutoff.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Mapping

import numpy as np
import scipy.sparse as sp

from .graded_linalg import (
    GradedSpace,
    ParityProfile,
    SparseOperator,
    embed_factor,
    gcomm,
    qint,
    residual,
)


@dataclass(frozen=True)
class IndexSet:
    profile: ParityProfile
    I: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "I", frozenset(self.I))
        if not self.I <= set(self.profile.indices):
            raise ValueError(f"index set {sorted(self.I)} not inside 1..{self.profile.n}")

    @property
    def Ibar(self) -> frozenset[int]:
        return frozenset(self.profile.indices) - self.I

    def __contains__(self, k: int) -> bool:
        n = self.profile.n
        return ((k - 1) % n + 1) in self.I

    @property
    def label(self) -> str:
        return "{" + ",".join(map(str, sorted(self.I))) + "}"


@dataclass(frozen=True, order=True)
class FockMode:
    i: int
    a: int
    fermionic: bool

    @property
    def parity(self) -> int:
        return int(self.fermionic)


@dataclass(frozen=True)
class FockSpace:
    index_set: IndexSet
    cutoff: int = 6

    def __post_init__(self):
        if self.cutoff < 2:
            raise ValueError("cutoff must be at least 2")

    @cached_property
    def modes(self) -> tuple[FockMode, ...]:
        prof = self.index_set.profile
        return tuple(
            FockMode(i, a, bool((prof.p(i) + prof.p(a)) % 2))
            for i in sorted(self.index_set.I)
            for a in sorted(self.index_set.Ibar)
        )

    def mode(self, i: int, a: int) -> FockMode:
        for m in self.modes:
            if (m.i, m.a) == (i, a):
                return m
        raise KeyError(f"no mode ({i},{a}) in {self.index_set.label}")

    @cached_property
    def factors(self) -> tuple[GradedSpace, ...]:
        if not self.modes:
            return (GradedSpace.even(1),)
        return tuple(
            GradedSpace((0, 1)) if m.fermionic else GradedSpace.even(self.cutoff + 1)
            for m in self.modes
        )

    @property
    def dim(self) -> int:
        return int(np.prod([f.dim for f in self.factors]))

    @cached_property
    def occupations(self) -> np.ndarray:
        """Occupation table, shape (dim, #modes), row-major basis order."""
        if not self.modes:
            return np.zeros((1, 0), dtype=int)
        grids = np.meshgrid(*[np.arange(f.dim) for f in self.factors], indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=1)

    def interior(self, depth: int) -> np.ndarray:
        """Basis mask with every bosonic occupancy <= cutoff - depth."""
        occ = self.occupations
        mask = np.ones(self.dim, dtype=bool)
        for k, m in enumerate(self.modes):
            if not m.fermionic:
                mask &= occ[:, k] <= self.cutoff - depth
        return mask

    def bosonic_occupancy_max(self) -> np.ndarray:
        occ = self.occupations
        cols = [k for k, m in enumerate(self.modes) if not m.fermionic]
        if not cols:
            return np.zeros(self.dim, dtype=int)
        return occ[:, cols].max(axis=1)


def build_vacuum(space: FockSpace) -> np.ndarray:
    v = np.zeros(space.dim, dtype=complex)
    v[0] = 1.0
    return v


def _single_mode(kind: str, mode: FockMode, cutoff: int, q: complex) -> SparseOperator:
    if mode.fermionic:
        f = GradedSpace((0, 1))
        mats = {
            "n": ([[0, 0], [0, 1]], 0),
            "cdag": ([[0, 0], [1, 0]], 1),
            "c": ([[0, 1], [0, 0]], 1),
        }
        m, p = mats[kind]
        return SparseOperator(sp.csr_matrix(np.array(m, dtype=complex)), (f,), p)
    d = cutoff + 1
    f = GradedSpace.even(d)
    k = np.arange(d)
    if kind == "n":
        m = sp.diags(k.astype(complex))
    elif kind == "cdag":
        m = sp.diags(np.ones(d - 1, dtype=complex), -1)
    elif kind == "c":
        m = sp.diags(qint(k[1:], q).astype(complex), 1)
    else:
        raise ValueError(f"unknown generator kind {kind!r}")
    return SparseOperator(sp.csr_matrix(m), (f,), 0)


@dataclass(frozen=True, eq=False)
class OscillatorGenerators:
    """The generators c_{ai}, cdag_{ia}, n_{ia} of every mode, on the full space."""

    space: FockSpace
    q: complex
    c: Mapping[tuple[int, int], SparseOperator]
    cdag: Mapping[tuple[int, int], SparseOperator]
    n: Mapping[tuple[int, int], SparseOperator]

    def qpow(self, coeffs: Mapping[tuple[int, int], float]) -> SparseOperator:
        """Diagonal ``q**(sum coef * n_mode)`` by exact diagonal exponentiation."""
        expo = np.zeros(self.space.dim, dtype=complex)
        for key, coef in coeffs.items():
            if coef:
                expo = expo + coef * self.n[key].diag()
        return SparseOperator.diagonal(self.q ** expo, self.space.factors)

    def number_combination(self, coeffs: Mapping[tuple[int, int], float]) -> SparseOperator:
        expo = np.zeros(self.space.dim, dtype=complex)
        for key, coef in coeffs.items():
            if coef:
                expo = expo + coef * self.n[key].diag()
        return SparseOperator.diagonal(expo, self.space.factors)

    @property
    def identity(self) -> SparseOperator:
        return SparseOperator.identity(self.space.factors)


def build_generator(space: FockSpace, kind: str, mode: FockMode, q: complex) -> SparseOperator:
    if mode not in space.modes:
        raise KeyError(f"mode {mode} not in space")
    k = space.modes.index(mode)
    return embed_factor(_single_mode(kind, mode, space.cutoff, q), k, space.factors)


def build_generators(space: FockSpace, q: complex) -> OscillatorGenerators:
    c, cdag, n = {}, {}, {}
    for m in space.modes:
        key = (m.i, m.a)
        c[key] = build_generator(space, "c", m, q)
        cdag[key] = build_generator(space, "cdag", m, q)
        n[key] = build_generator(space, "n", m, q)
    return OscillatorGenerators(space, q, c, cdag, n)


def check_osc_relations(gens: OscillatorGenerators) -> dict[str, float]:
    """Max residual of every defining relation, on the truncation-exact interior."""
    space, q = gens.space, gens.q
    prof = space.index_set.profile
    mask = space.interior(2)
    out = {"q-commutator-minus": 0.0, "q-commutator-plus": 0.0, "cross-mode": 0.0,
           "number": 0.0, "nilpotency": 0.0}

    def res(op, target=None):
        if target is None:
            target = SparseOperator.zero(space.factors, op.parity)
        return residual(op.restrict_columns(mask), target.restrict_columns(mask))

    keys = [(m.i, m.a) for m in space.modes]
    for (i, a) in keys:
        for (j, b) in keys:
            same = (i, a) == (j, b)
            c, cd = gens.c[(i, a)], gens.cdag[(j, b)]
            if same:
                s = prof.sign(a)
                out["q-commutator-minus"] = max(
                    out["q-commutator-minus"],
                    res(gcomm(c, cd, q ** s), gens.qpow({(i, a): -prof.sign(i)})),
                )
                out["q-commutator-plus"] = max(
                    out["q-commutator-plus"],
                    res(gcomm(c, cd, q ** (-s)), gens.qpow({(i, a): prof.sign(i)})),
                )
            else:
                out["cross-mode"] = max(out["cross-mode"], res(gcomm(c, cd)))
            delta = 1.0 if same else 0.0
            n = gens.n[(i, a)]
            out["number"] = max(
                out["number"],
                res(gcomm(n, gens.c[(j, b)]) + gens.c[(j, b)] * delta),
                res(gcomm(n, gens.cdag[(j, b)]) - gens.cdag[(j, b)] * delta),
                res(gcomm(n, gens.n[(j, b)])),
            )
            out["cross-mode"] = max(
                out["cross-mode"],
                res(gcomm(gens.c[(i, a)], gens.c[(j, b)])),
                res(gcomm(gens.cdag[(i, a)], gens.cdag[(j, b)])),
            )
    for m in space.modes:
        if m.fermionic:
            key = (m.i, m.a)
            out["nilpotency"] = max(
                out["nilpotency"],
                residual(gens.c[key] @ gens.c[key], SparseOperator.zero(space.factors)),
                residual(gens.cdag[key] @ gens.cdag[key], SparseOperator.zero(space.factors)),
            )
    return out


def apply_osc_automorphism(gens: OscillatorGenerators, xi: Mapping[tuple[int, int], complex],
                           eta: Mapping[tuple[tuple[int, int], tuple[int, int]], complex]
                           ) -> OscillatorGenerators:
    """c -> xi c q^(sum eta n), cdag -> xi^-1 cdag q^(-sum eta n), n -> n.

    ``eta`` is keyed by pairs of mode keys and must be symmetric; missing
    entries are zero.
    """
    keys = list(gens.n)
    for k in keys:
        if xi.get(k, 1.0) == 0:
            raise ValueError(f"xi for mode {k} is zero")
    for (k1, k2), v in eta.items():
        if abs(eta.get((k2, k1), 0.0) - v) > 0:
            raise ValueError(f"eta not symmetric at {k1},{k2}")
    c, cdag = {}, {}
    for k in keys:
        coeffs = {k2: eta.get((k, k2), 0.0) for k2 in keys}
        x = complex(xi.get(k, 1.0))
        c[k] = (gens.c[k] @ gens.qpow(coeffs)) * x
        cdag[k] = (gens.cdag[k] @ gens.qpow({kk: -v for kk, v in coeffs.items()})) / x
    return OscillatorGenerators(gens.space, gens.q, c, cdag, dict(gens.n))


def apply_discrete_automorphism(gens: OscillatorGenerators, mode: tuple[int, int]
                                ) -> OscillatorGenerators:
    """n -> -n - (-1)^s, c -> cdag, cdag -> -(-1)^s c on one mode, s = p(i)+p(a)."""
    if mode not in gens.n:
        raise KeyError(f"mode {mode} not in space")
    prof = gens.space.index_set.profile
    sgn = prof.sign(mode[0]) * prof.sign(mode[1])
    c, cdag, n = dict(gens.c), dict(gens.cdag), dict(gens.n)
    n[mode] = -gens.n[mode] - gens.identity * sgn
    c[mode] = gens.cdag[mode]
    cdag[mode] = gens.c[mode] * (-sgn)
    return OscillatorGenerators(gens.space, gens.q, c, cdag, n)
