"""JSON analysis report (schema 1).

Top-level keys, in order: schema, network, invariants, flags, verdicts,
equilibria, seed, tolerances. Exact rationals are written as strings
("3/2"), floats are rounded to 12 significant digits, and quantities that
do not apply (kinetic deficiency of a non-cycle-terminal network, say) are
null.
"""

from __future__ import annotations

import json
import math
from dataclasses import fields, is_dataclass
from enum import Enum
from fractions import Fraction
from typing import Any

import numpy as np

from .equilibria import (
    DEFAULT_SEED,
    NEWTON_MAX_ITER,
    START_SPREAD,
    TAU_DEDUPE,
    TAU_EQ,
    EquilibriaAtlas,
    find_equilibria,
)
from .errors import CRNError
from .kinetics import (
    PowerLawKinetics,
    check_digraph_isomorphism,
    classify,
    kinetic_order_subspace,
    t_hat_independence,
)
from .linalg import TAU_LIN, Subspace
from .network import (
    ReactionNetwork,
    deficiency,
    has_ILC,
    is_conservative,
    is_cycle_terminal,
    is_weakly_reversible,
    linkage_classes,
)
from .theorems import acb_verdict, acr_verdict, poly_plp_verdict, t_hat_existence_verdict
from .verdict import Verdict

SCHEMA_VERSION = 1


def jsonable(obj: Any) -> Any:
    """Convert analysis objects into plain JSON values."""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return float(f"{x:.12g}") if math.isfinite(x) else None
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()] if obj.dtype != object else [jsonable(v) for v in obj]
    if isinstance(obj, Subspace):
        return {"dim": obj.dim, "basis": [jsonable(v) for v in obj.basis]}
    if isinstance(obj, Verdict):
        return {
            "name": obj.name,
            "conclusion": obj.conclusion.value,
            "hypotheses": [{"label": h.label, "ok": bool(h.ok), "witness": jsonable(h.witness)} for h in obj.hypotheses],
            "payload": jsonable(obj.payload),
        }
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set)):
        return [jsonable(v) for v in obj]
    if is_dataclass(obj):
        return {f.name: jsonable(getattr(obj, f.name)) for f in fields(obj)}
    return str(obj)


def atlas_json(net: ReactionNetwork, atlas: EquilibriaAtlas) -> dict:
    return {
        "anchor": jsonable(atlas.anchor),
        "starts": atlas.starts,
        "converged_starts": atlas.converged_starts,
        "count": atlas.count,
        "points": [
            {
                "x": jsonable(dict(zip(net.species, x))),
                "residual": jsonable(r),
                "complex_balanced": bool(cb),
            }
            for x, r, cb in zip(atlas.equilibria, atlas.residuals, atlas.complex_balanced)
        ],
        "exhaustive": False,
    }


def invariants(net: ReactionNetwork, kin: PowerLawKinetics) -> dict:
    d = linkage_classes(net)
    defi = deficiency(net)
    s_tilde = delta_tilde = None
    if is_cycle_terminal(net) and classify(net, kin).is_rdk:
        S_t, delta_tilde = kinetic_order_subspace(net, kin)
        s_tilde = S_t.dim
    return {
        "m": net.m,
        "r": net.r,
        "n": net.n,
        "l": d.l,
        "sl": d.sl,
        "t": d.t,
        "n_r": d.n_r,
        "s": defi.s,
        "delta": defi.delta,
        "s_tilde": s_tilde,
        "delta_tilde": delta_tilde,
    }


def flags(net: ReactionNetwork, kin: PowerLawKinetics) -> dict:
    cls = classify(net, kin)
    out = {
        "weakly_reversible": is_weakly_reversible(net),
        "cycle_terminal": is_cycle_terminal(net),
        "ilc": has_ILC(net).holds,
        "conservative": is_conservative(net)[0],
    }
    out.update(cls.flags())
    out["t_hat_independent"] = t_hat_independence(net, kin).holds if cls.is_rdk else None
    return out


def extra_anchors(m: int, seed: int, count: int = 2) -> list[np.ndarray]:
    """Deterministic anchors of further classes, log-uniform on [-1, 1]^m."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, 1]))
    return [np.exp(rng.uniform(-1.0, 1.0, m)) for _ in range(count)]


def verdicts(net: ReactionNetwork, kin: PowerLawKinetics, atlas: EquilibriaAtlas, seed: int) -> dict[str, Verdict | None]:
    out: dict[str, Verdict | None] = {"ilc": has_ILC(net)}
    cls = classify(net, kin)
    try:
        out["digraph_isomorphism"] = check_digraph_isomorphism(net, kin)
    except CRNError:
        out["digraph_isomorphism"] = None
    out["t_hat_independence"] = t_hat_independence(net, kin) if cls.is_rdk else None
    out["t_hat_existence"] = t_hat_existence_verdict(net, kin, anchor=atlas.anchor, budget=16, seed=seed)
    plp = poly_plp_verdict(net, kin, atlas)
    out["poly_plp"] = plp
    out["absolute_complex_balancing"] = acb_verdict(net, kin, atlas, plp)
    others = [find_equilibria(net, kin, a, budget=max(8, atlas.starts // 4), seed=seed) for a in extra_anchors(net.m, seed)]
    out["acr"] = acr_verdict(net, kin, atlas, others)[0]
    return out


def build_report(
    net: ReactionNetwork,
    kin: PowerLawKinetics,
    atlas: EquilibriaAtlas | None = None,
    *,
    name: str | None = None,
    anchor=None,
    starts: int = 64,
    seed: int = DEFAULT_SEED,
) -> dict:
    """Full analysis as an ordered JSON-ready dict."""
    if atlas is None:
        p = np.ones(net.m) if anchor is None else np.asarray(anchor, dtype=float)
        atlas = find_equilibria(net, kin, p, budget=starts, seed=seed)
    return {
        "schema": SCHEMA_VERSION,
        "network": {
            "name": name,
            "species": list(net.species),
            "complexes": [net.complex_str(j) for j in range(net.n)],
            "reactions": [net.reaction_str(q) for q in range(net.r)],
            "labels": list(net.labels) if net.labels else None,
            "kinetic_orders": jsonable(kin.F),
            "rate_constants": jsonable(kin.k),
        },
        "invariants": invariants(net, kin),
        "flags": flags(net, kin),
        "verdicts": jsonable(verdicts(net, kin, atlas, atlas.seed)),
        "equilibria": atlas_json(net, atlas),
        "seed": atlas.seed,
        "tolerances": {
            "tau_lin": TAU_LIN,
            "tau_eq": TAU_EQ,
            "tau_dedupe": TAU_DEDUPE,
            "newton_max_iter": NEWTON_MAX_ITER,
            "start_spread": START_SPREAD,
        },
    }


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, allow_nan=False) + "\n"
