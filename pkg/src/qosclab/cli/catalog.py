"""Check identifiers, the identity each one tests and its tolerance policy."""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class CheckInfo:
    check_id: str
    suite: str
    anchor: str
    statement: str
    tol: float
    policy: str


_REL = "max-abs difference divided by max(1, largest entry of either side)"
_WORD = ("max-abs difference divided by max(1, largest single product term), "
         "on the truncation-exact interior subspace")

CHECKS: dict[str, CheckInfo] = {c.check_id: c for c in [
    CheckInfo("ybe", "ybe", "graded Yang-Baxter equation",
              "R12(x1,x2) R13(x1,x3) R23(x2,x3) = R23 R13 R12 on V(x)V(x)V with Koszul signs",
              1e-12, "absolute max-abs difference"),
    CheckInfo("rll-affine", "rll", "affine RLL relation",
              "R23(x,y) L13(y) L12(x) = L12(x) L13(y) R23(x,y), L(x) = L - Lbar/x",
              1e-10, _REL + ", on the interior subspace"),
    CheckInfo("rll-finite", "rll", "finite RLL relations",
              "constant-R exchange relations for the pairs (L,L), (Lbar,Lbar), (L,Lbar)",
              1e-10, _REL + ", on the interior subspace"),
    CheckInfo("appendix-a", "appendix-a", "entrywise commutation relations of L and Lbar",
              "element-wise (q-)commutators between entries of L and Lbar implied by the RLL "
              "relations; odd off-diagonal entries square to zero",
              1e-10, _WORD + "; nilpotency is required to vanish exactly"),
    CheckInfo("structure", "appendix-a", "contraction invariants",
              "L upper-triangular part and Lbar lower part vanish, Lbar_aa = 0 off I, "
              "diagonal exponents of L and Lbar cancel",
              0.0, "exact zero; the diagonal product uses 1e-12"),
    CheckInfo("contracted", "contracted-serre", "contracted Chevalley and Serre relations",
              "images of e_i, f_i, q^{k_i} under the oscillator map satisfy the contracted "
              "[e,f] branches, Cartan relations and the contracted Serre-type relations",
              1e-10, _WORD + "; the f-zero relation must vanish exactly"),
    CheckInfo("intertwining", "intertwining", "intertwining with the fundamental representation",
              "L_I(y/x) intertwines the co-product images of k_i, e_i and the contracted f_i "
              "under the oscillator map at x and the fundamental evaluation at y",
              1e-10, _REL),
    CheckInfo("osc", "osc-relations", "q-oscillator superalgebra relations",
              "c cdag - q^{+-1} cdag c = q^{-+n}, [n, c] = -c, distinct modes (anti)commute, "
              "fermionic generators square to zero",
              1e-12, "absolute, on occupancies below the cutoff"),
    CheckInfo("q-one-site", "q-one-site", "one-site Q-operator closed form",
              "normalized Fock supertrace of L_I(xi/x) D_I equals the closed diagonal form",
              1e-8, "entrywise max-abs difference against max(1e-8, truncation change)"),
    CheckInfo("qq-1", "qq", "QQ-relation, equal parities",
              "(z_i - z_j) Q_I(x q^{s}) Q_{I+ij}(x q^{-s}) = z_i Q_{I+i}(x q^{-s}) Q_{I+j}(x q^{s}) "
              "- z_j Q_{I+i}(x q^{s}) Q_{I+j}(x q^{-s}), s = (-1)^{p(i)}",
              1e-12, _REL + " over the three terms; 1e-12 at one site, 1e-7 traced"),
    CheckInfo("qq-2", "qq", "QQ-relation, opposite parities",
              "(z_i - z_j) Q_{I+i}(x q^{-s}) Q_{I+j}(x q^{s}) = z_i Q_I(x q^{s}) Q_{I+ij}(x q^{-s}) "
              "- z_j Q_I(x q^{-s}) Q_{I+ij}(x q^{s}), s = (-1)^{p(i)}",
              1e-12, _REL + " over the three terms; 1e-12 at one site, 1e-7 traced"),
    CheckInfo("commute-tt", "commutativity", "commuting transfer matrices",
              "[T(x), T(y)] = 0 for the fundamental auxiliary space", 1e-8, _REL),
    CheckInfo("commute-tq", "commutativity", "T and Q commute",
              "[T(x), Q_I(y)] = 0", 1e-8, _REL),
    CheckInfo("commute-qq", "commutativity", "Q-operators commute",
              "[Q_I(x), Q_J(y)] = 0", 1e-8, _REL),
    CheckInfo("verma-series", "characters", "Verma supercharacter",
              "closed product form of the normalized Verma supercharacter matches the PBW "
              "enumeration coefficient by coefficient in the root height",
              1e-10, "max-abs coefficient difference"),
    CheckInfo("z-trace", "characters", "normalization as a Fock supertrace",
              "prod (1 - z_a/z_i)^{-(-1)^{p(i)+p(a)}} equals the truncated supertrace of the "
              "boundary operator", 0.0, "difference within the computed tail bound"),
    CheckInfo("verma-factorization", "characters", "Verma T-operator factorization",
              "one-site Verma T equals Z+(lambda) times the product of single-index Q's at "
              "weight-shifted spectral parameters", 1e-12, _REL),
    CheckInfo("kr-limit", "kr-limit", "Kirillov-Reshetikhin limit",
              "normalized Schur function of the rectangular weight m on I tends to the Fock "
              "normalization as m grows", 0.1,
              "relative deviation of the last error ratio from max |z_a/z_i|"),
    CheckInfo("drinfeld", "drinfeld", "Drinfeld polynomials",
              "coefficient list has the stated degree and reproduces the product over its roots",
              1e-12, "relative difference at a random point"),
    CheckInfo("vacuum-weight", "drinfeld", "vacuum eigenvalues and their ratios",
              "diagonal entries of L(x) act on the vacuum by 1 - 1/x on I and 1 off I; "
              "lowering entries kill the vacuum", 1e-12, "absolute"),
]}

SUITES = ("ybe", "rll", "appendix-a", "contracted-serre", "intertwining", "osc-relations",
          "q-one-site", "qq", "commutativity", "characters", "kr-limit", "drinfeld")

EXACT_KEYS = frozenset({"upper L zero", "lower Lbar zero", "Lbar zero on complement",
                        "diagonal exponent sum", "odd nilpotency", "f-zero"})


def explain(check_id: str) -> str:
    try:
        c = CHECKS[check_id]
    except KeyError:
        raise KeyError(f"unknown check id {check_id!r}; known: {', '.join(sorted(CHECKS))}")
    return (f"{c.check_id} (suite {c.suite})\n"
            f"  anchor:    {c.anchor}\n"
            f"  identity:  {c.statement}\n"
            f"  tolerance: {c.tol:g}; {c.policy}\n")
