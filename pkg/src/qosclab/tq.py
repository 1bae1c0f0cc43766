"""Twists, traced lattice T- and Q-operators, closed one-site forms and characters.

Conventions:

* Twists are nonzero complex numbers z_1..z_n.  On a lattice of L
  fundamental sites the twist acts on a quantum basis state through its
  site content: z_k -> z_k q^{(-1)^{p(k)} count_k}.  This "dressing" is what
  the one-site closed forms call the (i,i) matrix element of z_k.
* The Fock-space boundary operator is prod (z_a/z_i)^{n_ia}, i in I, a in
  the complement.  A bosonic mode whose ratio has modulus above one is traced
  over the flipped vacuum (n -> -n-1), which sums the same rational function
  in the other convergence region.  Fermionic modes with a large
  ratio are flipped too (n -> 1-n), purely for conditioning.  The overall
  sign this introduces cancels between numerator and normalization.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

from .fock import FockSpace, IndexSet, apply_discrete_automorphism, build_generators
from .graded_linalg import (
    GradedSpace,
    ParityProfile,
    SparseOperator,
    embed_sum,
    matrix_unit,
    partial_supertrace,
    relative_residual,
    supertrace,
)
from .loperators import LOperatorPair, build_L_pair, classify_index_set
from .rmatrix import build_ps_rmatrix


class ConvergenceError(ValueError):
    """A trace over a bosonic mode would not converge."""


class CutoffExhausted(RuntimeError):
    """The adaptive cutoff reached its maximum without stabilizing."""


@dataclass(frozen=True)
class TwistParams:
    z: tuple[complex, ...]

    def __post_init__(self):
        object.__setattr__(self, "z", tuple(complex(v) for v in self.z))
        if any(v == 0 for v in self.z):
            raise ValueError("twist values must be nonzero")

    @classmethod
    def from_exponents(cls, q: complex, phi: Sequence[complex]) -> "TwistParams":
        return cls(tuple(q ** complex(f) for f in phi))

    def __getitem__(self, k: int) -> complex:
        """1-based access."""
        return self.z[k - 1]

    def __len__(self):
        return len(self.z)

    def ratio(self, i: int, a: int) -> complex:
        return self[a] / self[i]

    def dressed(self, profile: ParityProfile, q: complex, counts: Sequence[int]) -> np.ndarray:
        """z_k q^{(-1)^{p(k)} count_k} for one quantum basis state."""
        return np.array([self[k] * q ** (profile.sign(k) * counts[k - 1])
                         for k in profile.indices])

    def at_row(self, profile: ParityProfile, q: complex, i: int) -> "TwistParams":
        """One-site dressing: z_k q^{(-1)^{p(k)} delta_ik}."""
        counts = [int(k == i) for k in profile.indices]
        return TwistParams(tuple(self.dressed(profile, q, counts)))

    def converges(self, index_set: IndexSet) -> bool:
        prof = index_set.profile
        for i in index_set.I:
            for a in index_set.Ibar:
                if (prof.p(i) + prof.p(a)) % 2 == 0 and abs(self.ratio(i, a)) >= 1:
                    return False
        return True


@dataclass(frozen=True)
class LatticeConfig:
    xi: tuple[complex, ...]

    def __post_init__(self):
        object.__setattr__(self, "xi", tuple(complex(v) for v in self.xi))
        if not self.xi:
            raise ValueError("at least one site is required")
        if any(v == 0 for v in self.xi):
            raise ValueError("inhomogeneities must be nonzero")

    @property
    def L(self) -> int:
        return len(self.xi)


@dataclass(frozen=True)
class WeightVector:
    lam: tuple[complex, ...]

    def __post_init__(self):
        object.__setattr__(self, "lam", tuple(complex(v) for v in self.lam))
        if not all(np.isfinite(v) for v in self.lam):
            raise ValueError("weights must be finite")

    def __getitem__(self, k: int) -> complex:
        return self.lam[k - 1]


# -- quantum space helpers ----------------------------------------------------

def quantum_factors(profile: ParityProfile, L: int) -> tuple[GradedSpace, ...]:
    return (GradedSpace.fundamental(profile),) * L


def site_counts(profile: ParityProfile, L: int) -> np.ndarray:
    """counts[s, k-1] = number of sites of basis state s in state k."""
    n = profile.n
    states = np.array(list(itertools.product(range(n), repeat=L)), dtype=int).reshape(-1, L)
    out = np.zeros((states.shape[0], n), dtype=int)
    for k in range(n):
        out[:, k] = (states == k).sum(axis=1)
    return out


def dressed_twist(profile: ParityProfile, q: complex, twist: TwistParams, L: int) -> np.ndarray:
    """Array (n^L, n) of dressed twist values per quantum basis state."""
    counts = site_counts(profile, L)
    signs = np.array([profile.sign(k) for k in profile.indices])
    return np.asarray(twist.z)[None, :] * q ** (signs[None, :] * counts)


# -- boundary operator and normalization -------------------------------------

def boundary_operator_fock(index_set: IndexSet, space: FockSpace, twist: TwistParams,
                           gens=None, z: Sequence[complex] | None = None,
                           vacuum_normalized: bool = False) -> SparseOperator:
    """Diagonal prod (z_a/z_i)^{n_ia} on the Fock space.

    ``z`` overrides the twist values (used for dressed values); ``gens``
    supplies the number operators, e.g. after a vacuum flip.  With
    ``vacuum_normalized`` each exponent is shifted by its vacuum value, so
    the vacuum has weight 1 even when it is flipped.
    """
    if gens is None:
        gens = build_generators(space, 0.5)
    zz = twist.z if z is None else tuple(z)
    vals = np.ones(space.dim, dtype=complex)
    for m in space.modes:
        w = zz[m.a - 1] / zz[m.i - 1]
        n = gens.n[(m.i, m.a)].diag()
        vals = vals * w ** (n - n[0] if vacuum_normalized else n)
    return SparseOperator.diagonal(vals, space.factors)


def normalization_Z(index_set: IndexSet, twist: TwistParams, strict: bool = True) -> complex:
    """prod (1 - z_a/z_i)^{-(-1)^{p(i)+p(a)}}."""
    if strict and not twist.converges(index_set):
        raise ConvergenceError(f"twist does not satisfy |z_a/z_i| < 1 on bosonic modes of "
                               f"I={index_set.label}")
    prof = index_set.profile
    out = 1.0 + 0j
    for i in index_set.I:
        for a in index_set.Ibar:
            e = -1 if (prof.p(i) + prof.p(a)) % 2 == 0 else 1
            out *= (1 - twist.ratio(i, a)) ** e
    return out


def normalization_Z_trace(index_set: IndexSet, space: FockSpace, twist: TwistParams
                          ) -> tuple[complex, float]:
    """Truncated supertrace of the boundary operator and a rigorous tail bound."""
    if not twist.converges(index_set):
        raise ConvergenceError(f"twist does not satisfy |z_a/z_i| < 1 on bosonic modes of "
                               f"I={index_set.label}")
    value = supertrace(boundary_operator_fock(index_set, space, twist))
    mags, eps = [], []
    for m in space.modes:
        w = twist.ratio(m.i, m.a)
        if m.fermionic:
            mags.append(abs(1 - w))
            eps.append(0.0)
        else:
            c = space.cutoff
            mags.append(abs((1 - w ** (c + 1)) / (1 - w)))
            eps.append(abs(w) ** (c + 1) / (1 - abs(w)))
    bound = float(np.prod([m + e for m, e in zip(mags, eps)]) - np.prod(mags)) if mags else 0.0
    return value, bound


# -- lattice operators --------------------------------------------------------

def _flipped_modes(index_set: IndexSet, twist: TwistParams) -> list[tuple[int, int]]:
    """Modes traced over the flipped vacuum: those with |z_a/z_i| > 1.

    Bosonic modes need it for convergence.  Fermionic traces are finite,
    but flipping keeps every weight at most 1 and avoids cancellation.
    """
    prof = index_set.profile
    out = []
    for i in sorted(index_set.I):
        for a in sorted(index_set.Ibar):
            w = abs(twist.ratio(i, a))
            if (prof.p(i) + prof.p(a)) % 2:
                if w > 1:
                    out.append((i, a))
                continue
            if w == 1:
                raise ConvergenceError(f"|z_{a}/z_{i}| = 1: trace over mode ({i},{a}) diverges")
            if w > 1:
                out.append((i, a))
    return out


def _check_effective_ratio(index_set: IndexSet, twist: TwistParams, q: complex, L: int):
    prof = index_set.profile
    growth = max(abs(q), 1 / abs(q)) ** (2 * L)
    for i in index_set.I:
        for a in index_set.Ibar:
            if (prof.p(i) + prof.p(a)) % 2:
                continue
            w = abs(twist.ratio(i, a))
            rho = min(w, 1 / w) * growth
            if rho >= 1:
                raise ConvergenceError(
                    f"mode ({i},{a}): |z_a/z_i| = {w:.3g} is too close to 1 for L={L} "
                    f"(effective ratio {rho:.3g}); separate the twist moduli further")


def oriented_pair(index_set: IndexSet, q: complex, twist: TwistParams, cutoff: int
                  ) -> LOperatorPair:
    """L-operator pair on a Fock space whose vacuum is flipped where needed."""
    space = FockSpace(index_set, cutoff)
    gens = build_generators(space, q)
    for mode in _flipped_modes(index_set, twist):
        gens = apply_discrete_automorphism(gens, mode)
    return build_L_pair(index_set, space, q, gens=gens)


def _lattice_Q_fixed(pair: LOperatorPair, x: complex, config: LatticeConfig,
                     twist: TwistParams) -> SparseOperator:
    prof, q = pair.profile, pair.q
    L = config.L
    V = GradedSpace.fundamental(prof)
    nf = len(pair.factors)
    fac = pair.factors + (V,) * L
    D = boundary_operator_fock(pair.index_set, pair.space, twist, gens=pair.gens,
                               vacuum_normalized=True)
    prod = embed_sum([(1.0, (D,))], (0,), fac)
    for s in range(L):
        u = config.xi[s] / x
        terms = []
        for (i, j) in set(pair.L) | set(pair.Lbar):
            op = pair.l_at(i, j, u)
            if not op.is_zero():
                terms.append((1.0, (op, matrix_unit(V, i, j))))
        prod = embed_sum(terms, (0, nf + s), fac) @ prod
    numer = partial_supertrace(prod, nf)
    # operator-valued normalization: the same trace with dressed twist values,
    # carrying the constant removed from D by the vacuum shift
    zd = dressed_twist(prof, q, twist, L)
    vac = {(m.i, m.a): pair.gens.n[(m.i, m.a)].diag()[0] for m in pair.space.modes}
    Z = np.empty(zd.shape[0], dtype=complex)
    cache: dict[tuple, complex] = {}
    for s, row in enumerate(zd):
        key = tuple(np.round(row, 15))
        if key not in cache:
            shift = np.prod([((row[a - 1] / row[i - 1]) / twist.ratio(i, a)) ** v
                             for (i, a), v in vac.items()])
            cache[key] = shift * supertrace(boundary_operator_fock(
                pair.index_set, pair.space, twist, gens=pair.gens, z=row, vacuum_normalized=True))
        Z[s] = cache[key]
    return SparseOperator.diagonal(1 / Z, numer.factors) @ numer


@dataclass(frozen=True, eq=False)
class TracedOperator:
    matrix: SparseOperator
    cutoff: int
    truncation_bound: float

    def dense(self) -> np.ndarray:
        return self.matrix.dense()


def lattice_Q(index_set: IndexSet, x: complex, config: LatticeConfig, twist: TwistParams,
              q: complex, cutoff: int = 8, tol: float = 1e-13, max_cutoff: int = 64
              ) -> TracedOperator:
    """Normalized Fock supertrace of the L-operator chain with the boundary twist.

    The cutoff is adaptive: results at c and c+3 must agree within ``tol``
    (relative), otherwise c doubles until ``max_cutoff``.
    """
    if x == 0:
        raise ValueError("x must be nonzero")
    classify_index_set(index_set)
    _check_effective_ratio(index_set, twist, q, config.L)
    if not any(not m.fermionic for m in FockSpace(index_set, 2).modes):
        pair = oriented_pair(index_set, q, twist, 2)
        return TracedOperator(_lattice_Q_fixed(pair, x, config, twist), 2, 0.0)
    c = max(cutoff, 2)
    while True:
        a = _lattice_Q_fixed(oriented_pair(index_set, q, twist, c), x, config, twist)
        b = _lattice_Q_fixed(oriented_pair(index_set, q, twist, c + 3), x, config, twist)
        diff = relative_residual(a, b)
        if diff < tol:
            return TracedOperator(b, c + 3, diff)
        if c >= max_cutoff:
            raise CutoffExhausted(f"lattice_Q for I={index_set.label} did not stabilize by "
                                  f"cutoff {c} (change {diff:.2e})")
        c = min(2 * c, max_cutoff)


def lattice_T_fundamental(profile: ParityProfile, q: complex, x: complex, config: LatticeConfig,
                          twist: TwistParams) -> SparseOperator:
    """Auxiliary supertrace of R-matrix chain with boundary diag(z) on the auxiliary space."""
    if x == 0:
        raise ValueError("x must be nonzero")
    V = GradedSpace.fundamental(profile)
    L = config.L
    fac = (V,) * (L + 1)
    D = SparseOperator.diagonal(np.asarray(twist.z), (V,))
    prod = embed_sum([(1.0, (D,))], (0,), fac)
    for s in range(L):
        R = build_ps_rmatrix(profile, q, x, config.xi[s])
        prod = embed_sum(R.terms(), (0, s + 1), fac) @ prod
    return partial_supertrace(prod, 1)


# -- one-site closed forms ---------------------------------------------------

def _ratio_product(profile: ParityProfile, q: complex, zi: TwistParams, i: int,
                   others) -> complex:
    s = profile.sign(i)
    out = 1.0 + 0j
    for b in others:
        num = 1 - zi[b] / zi[i]
        den = 1 - zi[b] * q ** (2 * s) / zi[i]
        if den == 0:
            raise ZeroDivisionError(f"pole in the one-site product at b={b}")
        out *= (num / den) ** (profile.sign(i) * profile.sign(b))
    return out


def one_site_Q(index_set: IndexSet, x: complex, xi1: complex, twist: TwistParams,
               q: complex) -> np.ndarray:
    """Diagonal closed form of the one-site Q-operator, with row-dressed twists."""
    prof = index_set.profile
    out = np.eye(prof.n, dtype=complex)
    for i in index_set.I:
        zi = twist.at_row(prof, q, i)
        out[i - 1, i - 1] = 1 - (x / xi1) * _ratio_product(prof, q, zi, i, sorted(index_set.Ibar))
    return out


def _height(profile: ParityProfile, lam: WeightVector, j: int) -> complex:
    return profile.sign(j) * lam[j] - sum(profile.sign(k) for k in range(1, j))


def verma_prefactor(profile: ParityProfile, lam: WeightVector, z: TwistParams) -> complex:
    """prod z_b^{lam_b} prod (-z_f)^{lam_f} with principal-branch powers."""
    out = 1.0 + 0j
    for k in profile.indices:
        base = z[k] if profile.p(k) == 0 else -z[k]
        out *= base ** lam[k]
    return out


def superdenominator(profile: ParityProfile, z: TwistParams) -> complex:
    M, N = profile.M, profile.N
    num = 1.0 + 0j
    for b in range(1, M + 1):
        for b2 in range(b + 1, M + 1):
            num *= z[b] - z[b2]
    for f in range(M + 1, M + N + 1):
        for f2 in range(f + 1, M + N + 1):
            num *= z[f2] - z[f]
    den = 1.0 + 0j
    for b in range(1, M + 1):
        for f in range(M + 1, M + N + 1):
            den *= z[b] - z[f]
    if num == 0 or den == 0:
        raise ZeroDivisionError("coincident twist values make the superdenominator degenerate")
    return num / den


def verma_supercharacter(profile: ParityProfile, lam: WeightVector, z: TwistParams,
                         normalized: bool = False) -> complex:
    """Supercharacter of the Verma module.

    Bosonic exponents are lam_b + M - N - b and fermionic exponents are
    lam_f + M + N - f, the latter fixed by the PBW expansion.  With
    ``normalized`` the prefactor ``verma_prefactor`` is divided out, leaving
    a rational function of z.
    """
    M, N = profile.M, profile.N
    D = superdenominator(profile, z)
    rest = 1.0 + 0j
    for b in range(1, M + 1):
        rest *= z[b] ** (M - N - b)
    for f in range(M + 1, M + N + 1):
        rest *= (-z[f]) ** (M + N - f)
    rest /= D
    if normalized:
        return rest
    return verma_prefactor(profile, lam, z) * rest


def positive_roots(profile: ParityProfile) -> list[tuple[int, int, int]]:
    """(i, j, parity) for the roots eps_i - eps_j, i < j."""
    return [(i, j, (profile.p(i) + profile.p(j)) % 2)
            for i in profile.indices for j in profile.indices if i < j]


def verma_character_series(profile: ParityProfile, z: TwistParams, degree_cap: int
                           ) -> np.ndarray:
    """PBW enumeration of the normalized Verma supercharacter, graded by root height.

    Returns c with c[d] = sum over multisets of negative roots of total height
    d (bosonic roots unbounded, fermionic at most once) of the signed
    monomial prod (z_j/z_i)^{m_ij} (-1)^{p(i)+p(j)}.  Odd roots flip the
    parity, which is where the sign comes from.
    """
    if degree_cap < 0:
        raise ValueError("degree_cap must be non-negative")
    coeffs = np.zeros(degree_cap + 1, dtype=complex)
    coeffs[0] = 1.0
    for (i, j, par) in positive_roots(profile):
        h = j - i
        t = z[j] / z[i] * (-1 if par else 1)
        new = np.zeros_like(coeffs)
        kmax = 1 if par else degree_cap // h
        for k in range(kmax + 1):
            if k * h > degree_cap:
                break
            new[k * h:] += coeffs[:degree_cap + 1 - k * h] * t ** k
        coeffs = new
    return coeffs


def verma_character_coefficients(profile: ParityProfile, z: TwistParams, degree_cap: int,
                                 radius: float = 0.5, samples: int = 128) -> np.ndarray:
    """Height-graded coefficients of the closed form, by a Cauchy integral.

    Substitutes z_k -> z_k t^k so each root ratio z_j/z_i picks up
    t^{j-i}, then extracts the Taylor coefficients in t with an FFT on a
    circle of the given radius.  The normalized closed form tends to 1 as
    t -> 0, so no monomial correction is needed.
    """
    t = radius * np.exp(2j * np.pi * np.arange(samples) / samples)
    vals = np.empty(samples, dtype=complex)
    for k, tk in enumerate(t):
        zt = TwistParams(tuple(z[m] * tk ** m for m in profile.indices))
        vals[k] = verma_supercharacter(profile, WeightVector((0,) * profile.n), zt, normalized=True)
    c = np.fft.fft(vals) / samples
    return c[:degree_cap + 1] / radius ** np.arange(degree_cap + 1)


def one_site_T_verma(profile: ParityProfile, lam: WeightVector, x: complex, xi1: complex,
                     twist: TwistParams, q: complex) -> np.ndarray:
    # written out independently of one_site_Q so the factorization check compares two code paths
    out = np.zeros((profile.n, profile.n), dtype=complex)
    for i in profile.indices:
        zi = twist.at_row(profile, q, i)
        si = profile.sign(i)
        z = np.array(zi.z)
        b = np.array([k - 1 for k in profile.indices if k != i], dtype=int)
        expo = np.array([si * profile.sign(k + 1) for k in b])
        ratios = z[b] / z[i - 1]
        if np.any(ratios * q ** (2 * si) == 1):
            raise ZeroDivisionError(f"pole in the one-site Verma product at row {i}")
        prod = np.prod(((1 - ratios) / (1 - ratios * q ** (2 * si))) ** expo)
        shift = q ** (-2 * _height(profile, lam, i))
        out[i - 1, i - 1] = verma_supercharacter(profile, lam, zi) * (1 - x * shift / xi1 * prod)
    return out


def check_verma_factorization(profile: ParityProfile, lam: WeightVector, x: complex, xi1: complex,
                              twist: TwistParams, q: complex) -> float:
    """Closed one-site Verma T against Z+ times the product of single-index Q's."""
    T = one_site_T_verma(profile, lam, x, xi1, twist, q)
    rhs = np.zeros_like(T)
    prod = np.eye(profile.n, dtype=complex)
    for j in profile.indices:
        xj = x * q ** (-2 * _height(profile, lam, j))
        prod = prod @ one_site_Q(IndexSet(profile, {j}), xj, xi1, twist, q)
    for i in profile.indices:
        zi = twist.at_row(profile, q, i)
        rhs[i - 1, i - 1] = verma_supercharacter(profile, lam, zi) * prod[i - 1, i - 1]
    scale = max(1.0, float(np.max(np.abs(T))), float(np.max(np.abs(rhs))))
    return float(np.max(np.abs(T - rhs))) / scale


# -- QQ relations and commutativity ------------------------------------------

@dataclass(frozen=True)
class QQResult:
    relation: str
    residual: float
    truncation_bound: float
    cutoffs: tuple[int, ...] = ()


def _q_matrix(index_set, x, config, twist, q, traced, **kw):
    if not traced:
        return one_site_Q(index_set, x, config.xi[0], twist, q), 0.0, 0
    res = lattice_Q(index_set, x, config, twist, q, **kw)
    return res.dense(), res.truncation_bound, res.cutoff


def check_qq_relations(profile: ParityProfile, I: Sequence[int], i: int, j: int, x: complex,
                       twist: TwistParams, q: complex, config: LatticeConfig,
                       traced: bool | None = None, **kw) -> QQResult:
    """Bilinear QQ-relation among Q_I, Q_{I+i}, Q_{I+j}, Q_{I+i+j}.

    The equal-parity form is used when p(i) = p(j), the mixed form otherwise.
    With ``traced`` false (the default at one site) the closed forms are used.
    """
    I = frozenset(I)
    if i == j or i in I or j in I:
        raise ValueError("need distinct i, j outside I")
    if traced is None:
        traced = config.L > 1
    if not traced and config.L != 1:
        raise ValueError("closed forms exist only for one site")
    sets = {k: IndexSet(profile, I | extra) for k, extra in
            (("0", frozenset()), ("i", {i}), ("j", {j}), ("ij", {i, j}))}
    for s in sets.values():
        classify_index_set(s)
    s = profile.sign(i)
    up, dn = x * q ** s, x * q ** (-s)  # x q^{1-2p(i)}, x q^{-1+2p(i)}
    Qs, bounds, cuts = {}, [], []
    for key, arg in (("0", up), ("0", dn), ("i", up), ("i", dn), ("j", up), ("j", dn),
                     ("ij", up), ("ij", dn)):
        m, b, c = _q_matrix(sets[key], arg, config, twist, q, traced, **kw)
        Qs[key, arg] = m
        bounds.append(b)
        cuts.append(c)
    zd = dressed_twist(profile, q, twist, config.L)
    Zi, Zj = np.diag(zd[:, i - 1]), np.diag(zd[:, j - 1])
    if profile.p(i) == profile.p(j):
        name = "qq-1"
        lhs = (Zi - Zj) @ Qs["0", up] @ Qs["ij", dn]
        t1 = Zi @ Qs["i", dn] @ Qs["j", up]
        t2 = Zj @ Qs["i", up] @ Qs["j", dn]
    else:
        name = "qq-2"
        lhs = (Zi - Zj) @ Qs["i", dn] @ Qs["j", up]
        t1 = Zi @ Qs["0", up] @ Qs["ij", dn]
        t2 = Zj @ Qs["0", dn] @ Qs["ij", up]
    scale = max(1.0, *(float(np.max(np.abs(m))) for m in (lhs, t1, t2)))
    res = float(np.max(np.abs(lhs - t1 + t2))) / scale
    return QQResult(name, res, max(bounds), tuple(cuts))


def commutator_residual(A: np.ndarray, B: np.ndarray) -> float:
    AB, BA = A @ B, B @ A
    scale = max(1.0, float(np.max(np.abs(AB))), float(np.max(np.abs(BA))))
    return float(np.max(np.abs(AB - BA))) / scale


# -- Kirillov-Reshetikhin limit -----------------------------------------------

def schur_function(lam: Sequence[int], z: Sequence[complex]) -> complex:
    """det(z_i^{M+lam_j-j}) / det(z_i^{M-j}) for a partition padded to len(z)."""
    z = np.asarray(z, dtype=complex)
    M = z.size
    lam = list(lam) + [0] * (M - len(lam))
    if len(lam) > M:
        raise ValueError("partition longer than the number of variables")
    if any(lam[k] < lam[k + 1] for k in range(M - 1)) or (lam and lam[-1] < 0):
        raise ValueError(f"{lam} is not a partition")
    if M == 0:
        return 1.0 + 0j
    j = np.arange(1, M + 1)
    den = np.linalg.det(z[:, None] ** (M - j)[None, :])
    if abs(den) < 1e-300:
        raise ZeroDivisionError("coincident variables")
    num = np.linalg.det(z[:, None] ** (M + np.asarray(lam) - j)[None, :])
    return complex(num / den)


@dataclass(frozen=True)
class KRLimitResult:
    m: tuple[int, ...]
    values: tuple[complex, ...]
    errors: tuple[float, ...]
    target: complex
    predicted_ratio: float
    observed_ratio: float

    @property
    def ratio_deviation(self) -> float:
        if self.predicted_ratio == 0:
            return 0.0 if self.observed_ratio == 0 else float("inf")
        return abs(self.observed_ratio / self.predicted_ratio - 1)


def check_kr_limit(index_set: IndexSet, twist: TwistParams, m_list: Sequence[int]
                   ) -> KRLimitResult:
    """Normalized Schur function of a rectangular weight against the normalization."""
    prof = index_set.profile
    if prof.N != 0:
        raise ValueError("the Kirillov-Reshetikhin limit is checked for N = 0 only")
    if not twist.converges(index_set):
        raise ConvergenceError("need |z_i| > |z_a| for i in I, a in the complement")
    target = normalization_Z(index_set, twist)
    z = np.asarray(twist.z)
    vals, errs = [], []
    for m in m_list:
        lam = [m if k in index_set.I else 0 for k in prof.indices]
        if any(lam[k] < lam[k + 1] for k in range(len(lam) - 1)):
            # S_lam is symmetric: reorder variables so the weight is a partition
            order = sorted(prof.indices, key=lambda k: -lam[k - 1])
            zz = z[[k - 1 for k in order]]
            ll = [lam[k - 1] for k in order]
        else:
            zz, ll = z, lam
        v = schur_function(ll, zz) / np.prod(z ** np.asarray(lam))
        vals.append(complex(v))
        errs.append(float(abs(v - target)))
    ratios = [abs(twist.ratio(i, a)) for i in index_set.I for a in index_set.Ibar]
    predicted = max(ratios, default=0.0)
    if max(errs) < 1e-10:
        # full or empty index set: the normalized character is exactly 1
        observed = predicted = 0.0
    else:
        observed = errs[-1] / errs[-2] if len(errs) >= 2 else float("nan")
    return KRLimitResult(tuple(m_list), tuple(vals), tuple(errs), target, predicted, observed)


# -- Drinfeld polynomials ----------------------------------------------------

def drinfeld_degree(profile: ParityProfile, lam: WeightVector, i: int) -> int:
    d = lam[i] - (-1) ** (profile.p(i) + profile.p(i + 1)) * lam[i + 1]
    if abs(d.imag) > 1e-12 or abs(d.real - round(d.real)) > 1e-12 or round(d.real) < 0:
        raise ValueError(f"lam_{i} - (+-)lam_{i + 1} = {d} is not a non-negative integer")
    return int(round(d.real))


def drinfeld_polynomial(profile: ParityProfile, lam: WeightVector, i: int, q: complex
                        ) -> np.ndarray:
    """Coefficients (ascending powers of x) of the i-th Drinfeld polynomial."""
    if not 1 <= i < profile.n:
        raise ValueError(f"i must lie in 1..{profile.n - 1}")
    deg = drinfeld_degree(profile, lam, i)
    si, sn = profile.sign(i), profile.sign(i + 1)
    roots = [q ** (-2 * sn * lam[i + 1] - 2 * si * (k - 1)) for k in range(1, deg + 1)]
    return reduce(np.convolve, [np.array([1.0, -r]) for r in roots], np.array([1.0 + 0j]))
