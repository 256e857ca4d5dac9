"""Theorem checks with explicit hypotheses and witnesses.

Structural hypotheses (cycle terminality, FSK, ILC, T-hat independence,
kinetic deficiency) are decided exactly. Conclusions that depend on an
equilibria atlas are certificates only when they are lower-bound claims
(two equilibria found means multistationary); otherwise they are tagged
EVIDENCE_ONLY.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import linprog

from .equilibria import (
    DEFAULT_SEED,
    TAU_EQ,
    EquilibriaAtlas,
    find_equilibria,
    is_equilibrium,
    per_linkage_equilibria,
    rate_scale,
    reference_equilibria,
    sfrf,
)
from .errors import LinearSystemInconsistent
from .kinetics import (
    PowerLawKinetics,
    classify,
    factor_map_eval,
    kinetic_order_subspace,
    laplacian,
    t_hat_independence,
    t_matrix,
)
from .linalg import TAU_LIN, Subspace, contains_positive_vector
from .network import (
    ReactionNetwork,
    deficiency,
    has_ILC,
    is_cycle_terminal,
    is_weakly_reversible,
    linkage_classes,
    linkage_reaction_indices,
    linkage_subnetworks,
    molecularity_matrix,
    terminal_points,
)
from .verdict import Conclusion, Hypothesis, Verdict, verdict

log = logging.getLogger(__name__)


def _structural_hypotheses(net: ReactionNetwork, kin: PowerLawKinetics) -> list[Hypothesis]:
    cls = classify(net, kin)
    return [
        Hypothesis("cycle_terminal", is_cycle_terminal(net), list(terminal_points(net)) or None),
        Hypothesis("pl_fsk", cls.is_fsk, cls.witnesses.get("fsk")),
        Hypothesis("ilc", has_ILC(net).holds, has_ILC(net).payload),
    ]


def poly_plp_verdict(net: ReactionNetwork, kin: PowerLawKinetics, atlas: EquilibriaAtlas) -> Verdict:
    """E+ is a disjoint union of LP sets with flux subspace S~ (cycle terminal, PL-FSK, ILC, E+ nonempty)."""
    hyps = _structural_hypotheses(net, kin)
    hyps.append(Hypothesis("equilibria_nonempty", atlas.count > 0, atlas.count))
    if not all(h.ok for h in hyps):
        return verdict("poly_plp", hyps, Conclusion.NOT_APPLICABLE)
    flux, kdef = kinetic_order_subspace(net, kin)
    ref = reference_equilibria(atlas, flux)
    return verdict(
        "poly_plp",
        hyps,
        Conclusion.HOLDS if ref.disjoint else Conclusion.FAILS,
        {
            "flux_subspace": flux,
            "flux_dim": flux.dim,
            "kinetic_deficiency": kdef,
            "lp_parameter_dim": net.m - flux.dim,
            "reference_points": [np.asarray(x) for x in ref.points],
            "mu_lower_bound": ref.mu_lower_bound,
            "mu_exhaustive": False,
            "disjoint": ref.disjoint,
            "overlaps": list(ref.overlaps),
        },
    )


def t_hat_existence_verdict(
    net: ReactionNetwork,
    kin: PowerLawKinetics,
    anchor=None,
    budget: int = 64,
    seed: int = DEFAULT_SEED,
) -> Verdict:
    """Glue per-linkage-class equilibria into a global one (T-hat independent PL-RDK with ILC)."""
    cls = classify(net, kin)
    hyps = [Hypothesis("pl_rdk", cls.is_rdk, cls.witnesses.get("rdk"))]
    ilc = has_ILC(net)
    hyps.append(Hypothesis("ilc", ilc.holds, ilc.payload))
    if cls.is_rdk:
        ti = t_hat_independence(net, kin)
        hyps.append(Hypothesis("t_hat_independence", ti.holds, ti.payload))
    if not all(h.ok for h in hyps):
        return verdict("t_hat_existence", hyps, Conclusion.NOT_APPLICABLE)

    p = np.ones(net.m) if anchor is None else np.asarray(anchor, dtype=float)
    class_eq = []
    for sub, idx in zip(linkage_subnetworks(net), linkage_reaction_indices(net)):
        atlas = find_equilibria(sub, kin.restrict(idx), p, budget=budget, seed=seed)
        class_eq.append(atlas.equilibria[0] if atlas.count else None)
    empty = [i for i, x in enumerate(class_eq) if x is None]
    if empty:
        return verdict(
            "t_hat_existence",
            hyps,
            Conclusion.EVIDENCE_ONLY,
            {"classes_without_equilibria": empty, "note": "no equilibrium found for these classes; emptiness not certified"},
        )

    T = t_matrix(net, kin).astype(float)
    reactants = net.reactant_complexes()
    lcs = linkage_classes(net).linkage_classes
    rows, rhs = [], []
    for i, lc in enumerate(lcs):
        members = set(lc)
        cols = [c for c, j in enumerate(reactants) if j in members]
        # v^i = psi^i(x^i) on the class's reactant complexes
        v = np.exp(T[:, cols].T @ np.log(class_eq[i]))
        for c, lv in zip(cols, np.log(v)):
            rows.append(np.append(T[:, c], 1.0))
            rhs.append(lv)
    M, rhs = np.array(rows), np.array(rhs)
    sol = np.linalg.lstsq(M, rhs, rcond=None)[0]
    resid = float(np.linalg.norm(M @ sol - rhs)) / max(1.0, float(np.linalg.norm(rhs)))
    if resid > TAU_EQ:
        raise LinearSystemInconsistent(resid)
    u, w = sol[:-1], sol[-1]
    x = np.exp(u)
    gamma = float(np.exp(-w))

    # f(x) = Y A_k psi(x) = sum_i gamma * Y^i A^i v^i
    Y = molecularity_matrix(net).astype(float)
    via_laplacian = Y @ laplacian(net, kin) @ factor_map_eval(net, kin, x)
    f = sfrf(net, kin, x)
    scale = rate_scale(net, kin, x)
    per_class = per_linkage_equilibria(net, kin, x)
    ok = is_equilibrium(net, kin, x) and all(per_class)
    return verdict(
        "t_hat_existence",
        hyps,
        Conclusion.HOLDS if ok else Conclusion.FAILS,
        {
            "equilibrium": x,
            "f_residual": float(np.linalg.norm(f)) / scale,
            "laplacian_form_residual": float(np.linalg.norm(via_laplacian - f)) / scale,
            "gamma": [gamma] * len(lcs),
            "class_equilibria": class_eq,
            "per_linkage": per_class,
            "stacked_residual": resid,
        },
    )


def acb_verdict(
    net: ReactionNetwork,
    kin: PowerLawKinetics,
    atlas: EquilibriaAtlas,
    plp: Verdict | None = None,
) -> Verdict:
    """Absolute complex balancing for a poly-PLP system with flux subspace S~.

    HOLDS: ACB certified (deficiency zero and complex balanced).
    FAILS: non-ACB certified (two equilibria in one class, or a found
    equilibrium that is not complex balanced).
    EVIDENCE_ONLY: one equilibrium found, ACB suggested but monostationarity
    is not certified.
    """
    plp = plp if plp is not None else poly_plp_verdict(net, kin, atlas)
    hyps = [Hypothesis("poly_plp", plp.holds, plp.conclusion.value)]
    payload: dict = {}
    cb_certified = cb_evidence = False
    if plp.holds:
        wr = is_weakly_reversible(net)
        kdef = plp.payload["kinetic_deficiency"]
        cb_certified = wr and kdef == 0
        cb_evidence = any(atlas.complex_balanced)
        route = "weakly reversible with zero kinetic deficiency" if cb_certified else (
            "complex balanced equilibrium found" if cb_evidence else None
        )
        hyps.append(Hypothesis("complex_balanced", cb_certified or cb_evidence, route))
        if not (cb_certified or cb_evidence) and wr and kdef > 0:
            payload["note"] = "undetermined: weakly reversible, positive kinetic deficiency, no complex balanced point found"
    if not all(h.ok for h in hyps):
        return verdict("absolute_complex_balancing", hyps, Conclusion.NOT_APPLICABLE, payload)

    payload["complex_balance_certified"] = cb_certified
    mu = atlas.count
    non_cb = [i for i, flag in enumerate(atlas.complex_balanced) if not flag]
    payload.update({"mu_lower_bound": mu, "non_complex_balanced_points": non_cb})
    if deficiency(net).delta == 0:
        payload["route"] = "deficiency zero and complex balanced"
        return verdict("absolute_complex_balancing", hyps, Conclusion.HOLDS, payload)
    if mu >= 2 or non_cb:
        payload["multi_plp"] = True
        payload["route"] = (
            f"{mu} equilibria in one class" if mu >= 2 else "found equilibrium that is not complex balanced"
        )
        return verdict("absolute_complex_balancing", hyps, Conclusion.FAILS, payload)
    payload["multi_plp"] = False
    payload["route"] = "one equilibrium found; monostationarity not certified"
    return verdict("absolute_complex_balancing", hyps, Conclusion.EVIDENCE_ONLY, payload)


@dataclass(frozen=True)
class ACRReport:
    species: tuple[str, ...]
    acr: tuple[bool, ...]
    span_dim: int
    bound: int
    transform: str

    @property
    def acr_species(self) -> list[str]:
        return [s for s, ok in zip(self.species, self.acr) if ok]


def _transform(points, transform: str) -> np.ndarray:
    X = np.array([np.asarray(x, dtype=float) for x in points])
    if transform == "log":
        return np.log(X)
    if transform == "identity":
        return X
    raise ValueError(f"unknown transform {transform!r}")


def _numeric_rank(M: np.ndarray, scale: float, tol: float) -> int:
    if M.size == 0:
        return 0
    return int(np.linalg.matrix_rank(M, tol=tol * max(scale, 1.0) * max(M.shape)))


def acr_general(
    equilibria: Sequence,
    transform: str = "log",
    species: Sequence[str] | None = None,
    tol: float = TAU_LIN,
) -> ACRReport:
    """Species hyperplane test on the span of pairwise transformed differences."""
    Z = _transform(equilibria, transform)
    m = Z.shape[1]
    names = tuple(species) if species else tuple(f"x{i}" for i in range(m))
    scale = max(1.0, float(np.max(np.abs(Z))))
    D = Z[1:] - Z[0] if len(Z) > 1 else np.zeros((0, m))
    acr = tuple(bool(D.shape[0] == 0 or np.max(np.abs(D[:, s])) <= tol * scale) for s in range(m))
    dim = _numeric_rank(D, scale, tol)
    return ACRReport(names, acr, dim, m - dim, transform)


def acr_poly_plp(
    flux: Subspace,
    reference_points: Sequence,
    species: Sequence[str] | None = None,
    tol: float = TAU_LIN,
) -> ACRReport:
    """ACR in species S iff P_E-perp + (P_E*)-perp lies in the hyperplane x_S = 0.

    P_E-perp is checked exactly; (P_E*)-perp is spanned by log x*_j - log x*_1.
    ``bound`` is dim(P_E ∩ P_E*), an upper bound on the number of ACR species.
    """
    m = flux.ambient_dim
    names = tuple(species) if species else tuple(f"x{i}" for i in range(m))
    perp = flux.perp()
    exact_ok = [all(v[s] == 0 for v in perp.basis) for s in range(m)]
    L = np.log(np.array([np.asarray(x, dtype=float) for x in reference_points])) if len(reference_points) else np.zeros((0, m))
    D = L[1:] - L[0] if len(L) > 1 else np.zeros((0, m))
    scale = max(1.0, float(np.max(np.abs(L)))) if L.size else 1.0
    float_ok = [D.shape[0] == 0 or float(np.max(np.abs(D[:, s]))) <= tol * scale for s in range(m)]
    acr = tuple(a and b for a, b in zip(exact_ok, float_ok))
    stacked = np.vstack([perp.as_float(), D]) if D.size else perp.as_float()
    dim_sum = _numeric_rank(stacked, scale, tol)
    return ACRReport(names, acr, dim_sum, m - dim_sum, "log")


SCREEN_MARGIN = 1e-6


def _float_positive_vector(G: np.ndarray, tol: float = TAU_LIN):
    """Positive vector in span(G), or None.

    Maximises the margin t with Q^T c >= t over |c_i| <= 1, where Q is an
    orthonormal basis of span(G) (directions with singular value below tol
    dropped). Bounding c keeps t comparable across spans, so a vector whose
    smallest entry is round-off does not count.
    """
    scale = max(1.0, float(np.max(np.abs(G))))
    _, sv, Vt = np.linalg.svd(G, full_matrices=False)
    Q = Vt[sv > tol * scale * max(G.shape)]
    if Q.shape[0] == 0:
        return None
    k, d = Q.shape
    cost = np.zeros(k + 1)
    cost[-1] = -1.0
    A_ub = np.hstack([-Q.T, np.ones((d, 1))])
    res = linprog(cost, A_ub=A_ub, b_ub=np.zeros(d), bounds=[(-1.0, 1.0)] * k + [(None, None)], method="highs")
    if res.status != 0 or -res.fun <= SCREEN_MARGIN:
        return None
    v = Q.T @ res.x[:-1]
    return v / np.max(v)


def positive_vector_screen(spans: Sequence) -> Verdict:
    """If the given spans (or their sum) contain a positive vector, no species has ACR.

    ``spans`` holds exact Subspaces and/or float arrays whose rows are generators.
    Exact spans are screened first, so a witness is exact whenever one exists there.
    """
    exact = [s for s in spans if isinstance(s, Subspace)]
    floats = [np.atleast_2d(np.asarray(s, dtype=float)) for s in spans if not isinstance(s, Subspace)]
    floats = [f for f in floats if f.size]
    for s in exact:
        w = contains_positive_vector(s)
        if w is not None:
            return Verdict("positive_vector_screen", (), Conclusion.HOLDS, {"no_acr": True, "witness": w, "exact": True})
    if len(exact) > 1:
        total = exact[0]
        for s in exact[1:]:
            total = total + s
        w = contains_positive_vector(total)
        if w is not None:
            return Verdict("positive_vector_screen", (), Conclusion.HOLDS, {"no_acr": True, "witness": w, "exact": True})
    if floats:
        G = np.vstack([s.as_float() for s in exact if s.dim] + floats)
        v = _float_positive_vector(G)
        if v is not None:
            return Verdict("positive_vector_screen", (), Conclusion.HOLDS, {"no_acr": True, "witness": v, "exact": False})
    return Verdict("positive_vector_screen", (), Conclusion.FAILS, {"no_acr": False, "witness": None})


def acr_verdict(
    net: ReactionNetwork,
    kin: PowerLawKinetics,
    atlas: EquilibriaAtlas,
    extra_atlases: Sequence[EquilibriaAtlas] = (),
) -> tuple[Verdict, ACRReport | None]:
    """ACR analysis of a poly-PLP system: positive-vector screen plus hyperplane criterion.

    Reference points are pooled from ``atlas`` and ``extra_atlases`` (other
    stoichiometric classes), since LP sets need not meet every class.
    """
    plp = poly_plp_verdict(net, kin, atlas)
    if not plp.holds:
        return verdict("acr", [Hypothesis("poly_plp", False, plp.conclusion.value)], Conclusion.NOT_APPLICABLE), None
    flux = plp.payload["flux_subspace"]
    refs = list(plp.payload["reference_points"])
    for extra in extra_atlases:
        refs.extend(extra.equilibria)
    report = acr_poly_plp(flux, refs, net.species)
    L = np.log(np.array(refs))
    screen = positive_vector_screen([flux.perp(), L[1:] - L[0]] if len(L) > 1 else [flux.perp()])
    if screen.holds and any(report.acr):
        raise AssertionError("positive vector found but hyperplane criterion reports ACR species")
    # a species kept by the criterion may still vary on LP sets the search missed
    conclusion = Conclusion.EVIDENCE_ONLY if any(report.acr) else Conclusion.FAILS
    return (
        verdict(
            "acr",
            [Hypothesis("poly_plp", True)],
            conclusion,
            {
                "acr_species": report.acr_species,
                "bound": report.bound,
                "reference_points": len(refs),
                "screen_fired": screen.holds,
                "screen_witness": screen.payload.get("witness"),
                "screen_exact": screen.payload.get("exact"),
            },
        ),
        report,
    )


def class_count_consistency(
    net: ReactionNetwork,
    kin: PowerLawKinetics,
    anchors: Sequence,
    budget: int = 64,
    seed: int = DEFAULT_SEED,
) -> list[int]:
    """Equilibria counts per class; a mismatch is only warned about, since multistart is incomplete."""
    counts = [find_equilibria(net, kin, a, budget=budget, seed=seed).count for a in anchors]
    if len(set(counts)) > 1:
        warnings.warn(f"equilibria counts differ across classes: {counts}", stacklevel=2)
    return counts
