"""Suite cases: parameters are drawn up front, runners are pure functions of them."""
from __future__ import annotations

import itertools
import zlib
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from .. import tq
from ..fock import FockSpace, IndexSet, build_generators, check_osc_relations
from ..graded_linalg import ParityProfile
from ..loperators import (
    build_L_pair,
    check_appendix_a,
    check_contracted_relations,
    check_intertwining,
    check_rll_affine,
    check_rll_finite,
    check_structure,
    supported_index_sets,
    vacuum_highest_weight,
)
from ..rmatrix import check_graded_ybe
from .catalog import EXACT_KEYS
from .config import SuiteConfig


@dataclass(frozen=True)
class Outcome:
    check_id: str
    key: str
    residual: float | None
    tol: float
    truncation_bound: float = 0.0
    skipped: str = ""

    @property
    def passed(self) -> bool:
        if self.skipped:
            return True
        return self.residual is not None and self.residual <= self.tol + self.truncation_bound


@dataclass(frozen=True)
class Case:
    suite: str
    label: str
    runner: str
    params: dict[str, Any] = field(default_factory=dict)


# -- sampling ----------------------------------------------------------------

def case_rng(cfg: SuiteConfig, suite: str) -> np.random.Generator:
    return np.random.default_rng([cfg.seed, zlib.crc32(suite.encode())])


def draw_q(rng, cfg: SuiteConfig) -> complex:
    lo, hi = cfg.q_modulus
    return complex(rng.uniform(lo, hi) * np.exp(2j * np.pi * rng.random()))


def draw_point(rng) -> complex:
    return complex(rng.uniform(0.5, 2.0) * np.exp(2j * np.pi * rng.random()))


def draw_twist(rng, cfg: SuiteConfig) -> tuple[complex, ...]:
    if not isinstance(cfg.twist, str):
        return cfg.twist
    n = sum(cfg.profile)
    return tuple(complex(10.0 ** (-3 * k) * (1 + 0.2 * rng.random())
                         * np.exp(2j * np.pi * rng.random())) for k in range(n))


def ordered_twist(rng, profile: ParityProfile, I: frozenset[int], step: float
                  ) -> tuple[complex, ...]:
    """Moduli step^r with the indices of I first, so |z_a/z_i| <= step."""
    order = sorted(I) + sorted(set(profile.indices) - set(I))
    return tuple(complex(step ** order.index(k) * np.exp(2j * np.pi * rng.random()))
                 for k in profile.indices)


def draw_xi(rng, cfg: SuiteConfig, L: int) -> tuple[complex, ...]:
    if not isinstance(cfg.xi, str) and L == cfg.lattice_sites:
        return cfg.xi
    if not isinstance(cfg.xi, str):
        return cfg.xi[:L]
    return tuple(draw_point(rng) for _ in range(L))


# -- runners -----------------------------------------------------------------

def _dict_outcomes(check_id, d, cfg, exact=EXACT_KEYS, count_keys=()):
    out = []
    for k, v in sorted(d.items()):
        if k in count_keys:
            continue
        tol = 0.0 if k in exact else cfg.tol(check_id)
        if k == "diagonal product":
            tol = 1e-12
        out.append(Outcome(check_id, k, float(v), tol))
    return out


def _pair(p, cfg):
    return build_L_pair(IndexSet(ParityProfile(*p["profile"]), frozenset(p["I"])),
                        q=p["q"], cutoff=cfg.cutoff)


def run_ybe(p, cfg):
    r = check_graded_ybe(ParityProfile(*p["profile"]), p["q"], p["x1"], p["x2"], p["x3"])
    return [Outcome("ybe", "", r, cfg.tol("ybe"))]


def run_rll(p, cfg):
    pair = _pair(p, cfg)
    out = [Outcome("rll-affine", "", check_rll_affine(pair, p["x"], p["y"]), cfg.tol("rll-affine"))]
    out += _dict_outcomes("rll-finite", check_rll_finite(pair), cfg)
    return out


def run_appendix_a(p, cfg):
    pair = _pair(p, cfg)
    return (_dict_outcomes("appendix-a", check_appendix_a(pair), cfg)
            + _dict_outcomes("structure", check_structure(pair), cfg,
                             exact=EXACT_KEYS))


def run_contracted(p, cfg):
    pair = _pair(p, cfg)
    return _dict_outcomes("contracted", check_contracted_relations(pair, p["x"]), cfg)


def run_intertwining(p, cfg):
    pair = _pair(p, cfg)
    return _dict_outcomes("intertwining", check_intertwining(pair, p["x"], p["y"]), cfg,
                          count_keys=("f-intertwining trivial branches",))


def run_osc(p, cfg):
    I = IndexSet(ParityProfile(*p["profile"]), frozenset(p["I"]))
    gens = build_generators(FockSpace(I, cfg.cutoff), p["q"])
    return _dict_outcomes("osc", check_osc_relations(gens), cfg)


def run_q_one_site(p, cfg):
    prof = ParityProfile(*p["profile"])
    I = IndexSet(prof, frozenset(p["I"]))
    tw = tq.TwistParams(p["z"])
    res = tq.lattice_Q(I, p["x"], tq.LatticeConfig((p["xi"],)), tw, p["q"])
    closed = tq.one_site_Q(I, p["x"], p["xi"], tw, p["q"])
    diff = float(np.max(np.abs(res.dense() - closed)))
    tol = max(cfg.tol("q-one-site"), res.truncation_bound)
    return [Outcome("q-one-site", "", diff, tol)]


def run_qq(p, cfg):
    prof = ParityProfile(*p["profile"])
    tw = tq.TwistParams(p["z"])
    r = tq.check_qq_relations(prof, p["I"], p["i"], p["j"], p["x"], tw, p["q"],
                              tq.LatticeConfig(p["xi"]))
    tol = cfg.tol(r.relation) if len(p["xi"]) == 1 else max(cfg.tol(r.relation), 1e-7)
    return [Outcome(r.relation, f"L={len(p['xi'])}", r.residual, tol)]


def run_commutativity(p, cfg):
    prof = ParityProfile(*p["profile"])
    tw = tq.TwistParams(p["z"])
    lc = tq.LatticeConfig(p["xi"])
    q, (x, y) = p["q"], p["points"]
    T = [tq.lattice_T_fundamental(prof, q, u, lc, tw).dense() for u in (x, y)]
    Qs = {}
    for I in p["sets"]:
        s = IndexSet(prof, frozenset(I))
        Qs[I] = [tq.lattice_Q(s, u, lc, tw, q).dense() for u in (x, y)]
    out = [Outcome("commute-tt", "", tq.commutator_residual(T[0], T[1]), cfg.tol("commute-tt"))]
    for I, (Qx, Qy) in Qs.items():
        label = "{" + ",".join(map(str, I)) + "}"
        out.append(Outcome("commute-tq", label, tq.commutator_residual(T[0], Qy),
                           cfg.tol("commute-tq")))
        for J, (_, QJy) in Qs.items():
            if J < I:
                continue
            lj = "{" + ",".join(map(str, J)) + "}"
            out.append(Outcome("commute-qq", f"{label},{lj}", tq.commutator_residual(Qx, QJy),
                               cfg.tol("commute-qq")))
    return out


def run_verma_series(p, cfg):
    prof = ParityProfile(*p["profile"])
    z = tq.TwistParams(p["z"])
    a = tq.verma_character_series(prof, z, cfg.verma_degree)
    b = tq.verma_character_coefficients(prof, z, cfg.verma_degree)
    return [Outcome("verma-series", "", float(np.max(np.abs(a - b))), cfg.tol("verma-series"))]


def run_z_trace(p, cfg):
    prof = ParityProfile(*p["profile"])
    I = IndexSet(prof, frozenset(p["I"]))
    z = tq.TwistParams(p["z"])
    exact = tq.normalization_Z(I, z)
    val, bound = tq.normalization_Z_trace(I, FockSpace(I, cfg.cutoff), z)
    return [Outcome("z-trace", "", float(abs(val - exact)), cfg.tol("z-trace") + 1e-13, bound)]


def run_verma_factorization(p, cfg):
    prof = ParityProfile(*p["profile"])
    r = tq.check_verma_factorization(prof, tq.WeightVector(p["lam"]), p["x"], p["xi"],
                                     tq.TwistParams(p["z"]), p["q"])
    return [Outcome("verma-factorization", "", r, cfg.tol("verma-factorization"))]


def run_kr(p, cfg):
    prof = ParityProfile(*p["profile"])
    I = IndexSet(prof, frozenset(p["I"]))
    r = tq.check_kr_limit(I, tq.TwistParams(p["z"]), list(range(1, cfg.kr_m_max + 1)))
    errs = r.errors
    monotone = r.predicted_ratio == 0 or all(b <= a * (1 + 1e-9) for a, b in zip(errs, errs[1:]))
    dev = r.ratio_deviation if monotone else float("inf")
    return [Outcome("kr-limit", "", dev, cfg.tol("kr-limit"))]


def run_drinfeld(p, cfg):
    prof = ParityProfile(*p["profile"])
    lam = tq.WeightVector(p["lam"])
    i, q, x = p["i"], p["q"], p["x"]
    coeffs = tq.drinfeld_polynomial(prof, lam, i, q)
    si, sn = prof.sign(i), prof.sign(i + 1)
    direct = np.prod([1 - x * q ** (-2 * sn * lam[i + 1] - 2 * si * (k - 1))
                      for k in range(1, p["degree"] + 1)])
    val = np.polynomial.polynomial.polyval(x, coeffs)
    err = abs(val - direct) / max(1.0, abs(direct))
    if len(coeffs) - 1 != p["degree"]:
        err = float("inf")
    return [Outcome("drinfeld", f"i={i}", float(err), cfg.tol("drinfeld"))]


def run_vacuum(p, cfg):
    pair = _pair(p, cfg)
    w = vacuum_highest_weight(pair, p["x"])
    return _dict_outcomes("vacuum-weight", w.residuals, cfg)


RUNNERS: dict[str, Callable] = {
    "ybe": run_ybe, "rll": run_rll, "appendix-a": run_appendix_a,
    "contracted": run_contracted, "intertwining": run_intertwining, "osc": run_osc,
    "q-one-site": run_q_one_site, "qq": run_qq, "commutativity": run_commutativity,
    "verma-series": run_verma_series, "z-trace": run_z_trace,
    "verma-factorization": run_verma_factorization, "kr-limit": run_kr,
    "drinfeld": run_drinfeld, "vacuum": run_vacuum,
}


# -- case generation ---------------------------------------------------------

def _per_set(cfg, suite, runner, rng, extra: Callable[[IndexSet], dict]) -> list[Case]:
    sets, _ = cfg.resolved_index_sets()
    out = []
    for s in sets:
        for k in range(cfg.samples):
            params = {"profile": cfg.profile, "I": tuple(sorted(s.I)), "q": draw_q(rng, cfg)}
            params.update(extra(s))
            out.append(Case(suite, f"I={s.label} #{k}", runner, params))
    return out


def build_cases(cfg: SuiteConfig, suite: str) -> tuple[list[Case], list[str]]:
    """Cases for one suite and notes about anything skipped."""
    rng = case_rng(cfg, suite)
    prof = cfg.parity_profile
    n = prof.n
    notes = [f"index set {s.label} skipped: unsupported"
             for s in cfg.resolved_index_sets()[1]]
    pt = lambda s: {"x": draw_point(rng), "y": draw_point(rng)}  # noqa: E731
    if suite == "ybe":
        return [Case(suite, f"#{k}", "ybe", {"profile": cfg.profile, "q": draw_q(rng, cfg),
                                              "x1": draw_point(rng), "x2": draw_point(rng),
                                              "x3": draw_point(rng)})
                for k in range(cfg.samples)], []
    if suite == "rll":
        return _per_set(cfg, suite, "rll", rng, pt), notes
    if suite == "appendix-a":
        return _per_set(cfg, suite, "appendix-a", rng, lambda s: {}), notes
    if suite == "contracted-serre":
        return _per_set(cfg, suite, "contracted", rng, lambda s: {"x": draw_point(rng)}), notes
    if suite == "intertwining":
        return _per_set(cfg, suite, "intertwining", rng, pt), notes
    if suite == "osc-relations":
        return _per_set(cfg, suite, "osc", rng, lambda s: {}), notes
    if suite == "q-one-site":
        return _per_set(cfg, suite, "q-one-site", rng,
                        lambda s: {"x": draw_point(rng), "xi": draw_point(rng),
                                   "z": draw_twist(rng, cfg)}), notes
    if suite == "qq":
        if n > 3:
            return [], notes + [f"qq skipped: M+N = {n} > 3 needs unsupported index sets"]
        out = []
        for r in range(n - 1):
            for I in itertools.combinations(prof.indices, r):
                rest = [k for k in prof.indices if k not in I]
                for i, j in itertools.combinations(rest, 2):
                    for L in sorted({1, cfg.lattice_sites}):
                        out.append(Case(suite, "I={" + ",".join(map(str, I)) + f"}} i={i} j={j} L={L}", "qq", {
                            "profile": cfg.profile, "I": I, "i": i, "j": j,
                            "q": draw_q(rng, cfg), "x": draw_point(rng),
                            "xi": draw_xi(rng, cfg, L), "z": draw_twist(rng, cfg)}))
        return out, notes
    if suite == "commutativity":
        sets, _ = cfg.resolved_index_sets()
        return [Case(suite, f"L={cfg.lattice_sites} #{k}", "commutativity", {
            "profile": cfg.profile, "sets": tuple(tuple(sorted(s.I)) for s in sets),
            "q": draw_q(rng, cfg), "points": (draw_point(rng), draw_point(rng)),
            "xi": draw_xi(rng, cfg, cfg.lattice_sites), "z": draw_twist(rng, cfg)})
            for k in range(cfg.samples)], notes
    if suite == "characters":
        out = [Case(suite, f"verma-series #{k}", "verma-series", {
            "profile": cfg.profile,
            "z": tuple(complex(0.6 ** m * (1 + 0.1 * rng.random()) * np.exp(2j * np.pi * rng.random()))
                       for m in range(n))}) for k in range(cfg.samples)]
        sets, _ = cfg.resolved_index_sets()
        for s in sets:
            out.append(Case(suite, f"z-trace I={s.label}", "z-trace", {
                "profile": cfg.profile, "I": tuple(sorted(s.I)),
                "z": ordered_twist(rng, prof, s.I, 0.3)}))
        for k in range(cfg.verma_draws):
            out.append(Case(suite, f"verma-factorization #{k}", "verma-factorization", {
                "profile": cfg.profile,
                "lam": tuple(complex(a, b) for a, b in rng.normal(size=(n, 2))),
                "q": draw_q(rng, cfg), "x": draw_point(rng), "xi": draw_point(rng),
                "z": tuple(draw_point(rng) for _ in range(n))}))
        return out, notes
    if suite == "kr-limit":
        if prof.N != 0:
            return [], ["kr-limit skipped: defined for N = 0 only"]
        return [Case(suite, f"I={s.label}", "kr-limit", {
            "profile": cfg.profile, "I": tuple(sorted(s.I)),
            "z": ordered_twist(rng, prof, s.I, 0.4)})
            for s in supported_index_sets(prof)], []
    if suite == "drinfeld":
        out = []
        for i in range(1, n):
            for k in range(cfg.samples):
                deg = int(rng.integers(0, 5))
                lam = [complex(a, b) for a, b in rng.normal(size=(n, 2))]
                lam[i - 1] = deg + (-1) ** (prof.p(i) + prof.p(i + 1)) * lam[i]
                out.append(Case(suite, f"i={i} #{k}", "drinfeld", {
                    "profile": cfg.profile, "lam": tuple(lam), "i": i, "degree": deg,
                    "q": draw_q(rng, cfg), "x": draw_point(rng)}))
        out += _per_set(cfg, suite, "vacuum", rng, lambda s: {"x": draw_point(rng)})
        return out, notes
    raise KeyError(suite)


def run_case(case: Case, cfg: SuiteConfig) -> list[Outcome]:
    return RUNNERS[case.runner](case.params, cfg)
