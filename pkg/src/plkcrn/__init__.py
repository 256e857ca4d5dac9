"""Power-law chemical reaction networks: structure, kinetics, equilibria and robustness."""

from .dsl import format_document, load, load_example, parse, to_model
from .equilibria import EquilibriaAtlas, birch_point, find_equilibria, sfrf
from .kinetics import PowerLawKinetics, classify, kinetic_order_subspace, t_hat
from .linalg import Subspace, contains_positive_vector
from .network import ReactionNetwork, deficiency, has_ILC, linkage_classes
from .theorems import (
    acb_verdict,
    acr_general,
    acr_poly_plp,
    acr_verdict,
    poly_plp_verdict,
    positive_vector_screen,
    t_hat_existence_verdict,
)
from .verdict import Conclusion, Verdict

__all__ = [
    "Conclusion",
    "EquilibriaAtlas",
    "PowerLawKinetics",
    "ReactionNetwork",
    "Subspace",
    "Verdict",
    "acb_verdict",
    "acr_general",
    "acr_poly_plp",
    "acr_verdict",
    "birch_point",
    "classify",
    "contains_positive_vector",
    "deficiency",
    "find_equilibria",
    "format_document",
    "has_ILC",
    "kinetic_order_subspace",
    "linkage_classes",
    "load",
    "load_example",
    "parse",
    "poly_plp_verdict",
    "positive_vector_screen",
    "sfrf",
    "t_hat",
    "t_hat_existence_verdict",
    "to_model",
]
