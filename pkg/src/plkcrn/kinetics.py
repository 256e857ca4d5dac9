"""Power-law kinetics: kinetic orders, the PLK taxonomy, T / T-hat matrices,
the network of kinetic complexes, and the kinetic order subspace."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import NotCycleTerminal, NotFSK, NotRDK
from .linalg import Subspace, column_space, is_direct_sum, qvector, rank
from .network import (
    ReactionNetwork,
    incidence_matrix,
    is_cycle_terminal,
    linkage_classes,
    terminal_points,
)
from .verdict import Conclusion, Verdict


@dataclass(frozen=True)
class PowerLawKinetics:
    """Kinetic-order matrix F (r x m, exact) and positive rate constants k."""

    F: tuple[tuple[Fraction, ...], ...]
    k: tuple[float, ...]

    def __post_init__(self):
        F = tuple(qvector(row) for row in self.F)
        k = tuple(float(x) for x in self.k)
        if len(F) != len(k):
            raise ValueError(f"{len(F)} kinetic-order rows but {len(k)} rate constants")
        if len({len(row) for row in F}) > 1:
            raise ValueError("kinetic-order rows have different lengths")
        if not all(np.isfinite(x) and x > 0 for x in k):
            raise ValueError("rate constants must be strictly positive")
        object.__setattr__(self, "F", F)
        object.__setattr__(self, "k", k)

    @classmethod
    def mass_action(cls, net: ReactionNetwork, k: Sequence[float]) -> "PowerLawKinetics":
        return cls(tuple(net.complexes[a] for a, _ in net.reactions), tuple(k))

    @property
    def F_matrix(self) -> np.ndarray:
        out = np.empty((len(self.F), len(self.F[0]) if self.F else 0), dtype=object)
        for q, row in enumerate(self.F):
            out[q, :] = row
        return out

    def F_float(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.F], dtype=float)

    def k_array(self) -> np.ndarray:
        return np.asarray(self.k, dtype=float)

    def restrict(self, reaction_indices: Sequence[int]) -> "PowerLawKinetics":
        return PowerLawKinetics(tuple(self.F[q] for q in reaction_indices), tuple(self.k[q] for q in reaction_indices))


def _check_shapes(net: ReactionNetwork, kin: PowerLawKinetics) -> None:
    if len(kin.F) != net.r:
        raise ValueError(f"kinetics has {len(kin.F)} rows, network has {net.r} reactions")
    if kin.F and len(kin.F[0]) != net.m:
        raise ValueError(f"kinetic-order rows have length {len(kin.F[0])}, network has {net.m} species")


def _rdk_violation(net: ReactionNetwork, kin: PowerLawKinetics):
    for j in net.reactant_complexes():
        qs = net.reactions_of(j)
        for q in qs[1:]:
            if kin.F[q] != kin.F[qs[0]]:
                return (qs[0], q), j
    return None


def kinetic_rows(net: ReactionNetwork, kin: PowerLawKinetics) -> dict[int, tuple[Fraction, ...]]:
    """Reactant complex index -> its kinetic-order row; requires PL-RDK."""
    _check_shapes(net, kin)
    bad = _rdk_violation(net, kin)
    if bad:
        raise NotRDK(*bad)
    return {j: kin.F[net.reactions_of(j)[0]] for j in net.reactant_complexes()}


@dataclass(frozen=True)
class KineticsClassification:
    is_rdk: bool
    is_fsk: bool
    is_tik: bool
    is_rlk: bool
    is_mass_action: bool
    witnesses: dict = field(default_factory=dict)

    def flags(self) -> dict[str, bool]:
        return {
            "rdk": self.is_rdk,
            "fsk": self.is_fsk,
            "tik": self.is_tik,
            "rlk": self.is_rlk,
            "mass_action": self.is_mass_action,
        }


def classify(net: ReactionNetwork, kin: PowerLawKinetics) -> KineticsClassification:
    _check_shapes(net, kin)
    w: dict = {}
    mass = True
    for q, (a, _) in enumerate(net.reactions):
        if kin.F[q] != net.complexes[a]:
            mass = False
            w["mass_action"] = {"reaction": q}
            break

    bad = _rdk_violation(net, kin)
    if bad:
        w["rdk"] = {"reactions": bad[0], "complex": bad[1]}
        for key in ("fsk", "tik", "rlk"):
            w[key] = "not PL-RDK"
        return KineticsClassification(False, False, False, False, mass, w)

    rows = kinetic_rows(net, kin)
    fsk = True
    seen: dict[tuple, int] = {}
    for j, row in rows.items():
        if row in seen:
            fsk = False
            w["fsk"] = {"complexes": (seen[row], j)}
            break
        seen[row] = j

    n_r = len(rows)
    rT = rank(t_matrix(net, kin))
    rTh = rank(t_hat(net, kin))
    tik, rlk = rTh == n_r, rT == n_r
    if not tik:
        w["tik"] = {"rank": rTh, "n_r": n_r}
    if not rlk:
        w["rlk"] = {"rank": rT, "n_r": n_r}
    return KineticsClassification(True, fsk, tik, rlk, mass, w)


def y_tilde(net: ReactionNetwork, kin: PowerLawKinetics) -> np.ndarray:
    """m x n: column j is the kinetic-order row of complex j (zero if j is not a reactant)."""
    rows = kinetic_rows(net, kin)
    Yt = np.empty((net.m, net.n), dtype=object)
    Yt[:, :] = Fraction(0)
    for j, row in rows.items():
        Yt[:, j] = row
    return Yt


def t_matrix(net: ReactionNetwork, kin: PowerLawKinetics) -> np.ndarray:
    """Y-tilde with the non-reactant columns deleted (m x n_r)."""
    return y_tilde(net, kin)[:, list(net.reactant_complexes())]


def t_hat(net: ReactionNetwork, kin: PowerLawKinetics) -> np.ndarray:
    """[T; L^T], (m + l) x n_r; row m+i flags reactant complexes of linkage class i."""
    T = t_matrix(net, kin)
    reactants = net.reactant_complexes()
    lc = linkage_classes(net).linkage_classes
    L = np.empty((len(lc), len(reactants)), dtype=object)
    for i, cls in enumerate(lc):
        members = set(cls)
        L[i, :] = [Fraction(int(j in members)) for j in reactants]
    return np.vstack([T, L]) if T.size or L.size else np.empty((net.m + len(lc), 0), dtype=object)


def t_hat_blocks(net: ReactionNetwork, kin: PowerLawKinetics) -> list[np.ndarray]:
    """Per-linkage-class blocks: T restricted to the class's reactant columns plus one ones-row."""
    T = t_matrix(net, kin)
    reactants = net.reactant_complexes()
    blocks = []
    for cls in linkage_classes(net).linkage_classes:
        cols = [i for i, j in enumerate(reactants) if j in set(cls)]
        ones = np.array([[Fraction(1)] * len(cols)], dtype=object)
        blocks.append(np.vstack([T[:, cols], ones]))
    return blocks


def t_hat_independence(net: ReactionNetwork, kin: PowerLawKinetics) -> Verdict:
    blocks = t_hat_blocks(net, kin)
    spaces = [column_space(b) for b in blocks]
    ok = is_direct_sum(spaces)
    return Verdict(
        "t_hat_independence",
        (),
        Conclusion.HOLDS if ok else Conclusion.FAILS,
        {"block_ranks": [s.dim for s in spaces], "sum_rank": sum(s.dim for s in spaces) if ok else None},
    )


@dataclass(frozen=True)
class KineticNetwork:
    """Network of kinetic complexes of a cycle-terminal PLK system.

    ``reactions`` may contain self-loops when distinct complexes share a
    kinetic complex (non-FSK input); ``network`` is then None.
    """

    complexes: tuple[tuple[Fraction, ...], ...]
    reactions: tuple[tuple[int, int], ...]
    origin: tuple[int, ...]  # source reaction q for each kinetic reaction
    complex_map: tuple[tuple[int, ...], ...]  # complex y -> indices of C~(y)
    network: ReactionNetwork | None


def kinetic_network(net: ReactionNetwork, kin: PowerLawKinetics) -> KineticNetwork:
    _check_shapes(net, kin)
    if not is_cycle_terminal(net):
        raise NotCycleTerminal(terminal_points(net))
    pos: dict[tuple, int] = {}
    ck: list[tuple] = []
    cmap: list[list[int]] = [[] for _ in range(net.n)]
    for q, (a, _) in enumerate(net.reactions):
        row = kin.F[q]
        if row not in pos:
            pos[row] = len(ck)
            ck.append(row)
        if pos[row] not in cmap[a]:
            cmap[a].append(pos[row])
    rk, origin = [], []
    for q, (a, b) in enumerate(net.reactions):
        for ya in cmap[a]:
            for yb in cmap[b]:
                rk.append((ya, yb))
                origin.append(q)
    network = None
    if all(a != b for a, b in rk):
        network = ReactionNetwork(net.species, tuple(ck), tuple(rk))
    return KineticNetwork(tuple(ck), tuple(rk), tuple(origin), tuple(map(tuple, cmap)), network)


def check_digraph_isomorphism(net: ReactionNetwork, kin: PowerLawKinetics) -> Verdict:
    """For cycle-terminal PL-FSK input, y -> y~ is a digraph isomorphism and I_a = I~_a."""
    if not is_cycle_terminal(net):
        raise NotCycleTerminal(terminal_points(net))
    rows = kinetic_rows(net, kin)
    seen: dict[tuple, int] = {}
    for j, row in rows.items():
        if row in seen:
            raise NotFSK((seen[row], j))
        seen[row] = j

    kn = kinetic_network(net, kin)
    phi = [cm[0] for cm in kn.complex_map]
    bijective = all(len(cm) == 1 for cm in kn.complex_map) and sorted(phi) == list(range(len(kn.complexes)))
    image = [(phi[a], phi[b]) for a, b in net.reactions]
    # the kinetic reactions of q must be exactly {(phi(y), phi(y'))}
    reactions_match = (
        len(kn.reactions) == net.r
        and list(kn.origin) == list(range(net.r))
        and list(kn.reactions) == image
    )
    incidence_equal = False
    if bijective and reactions_match and kn.network is not None:
        Ia = incidence_matrix(net)
        Ik = incidence_matrix(kn.network)
        # reorder kinetic rows by phi^-1; columns already aligned by origin
        incidence_equal = bool(np.array_equal(Ik[phi, :][:, list(kn.origin)], Ia))
    ok = bijective and reactions_match and incidence_equal
    return Verdict(
        "digraph_isomorphism",
        (),
        Conclusion.HOLDS if ok else Conclusion.FAILS,
        {
            "complex_map": phi,
            "bijective": bijective,
            "reactions_match": reactions_match,
            "incidence_equal": incidence_equal,
        },
    )


def kinetic_order_subspace(net: ReactionNetwork, kin: PowerLawKinetics) -> tuple[Subspace, int]:
    """S~ = <y~' - y~ : y -> y'> and the kinetic deficiency n - l - dim S~."""
    if not is_cycle_terminal(net):
        raise NotCycleTerminal(terminal_points(net))
    Yt = y_tilde(net, kin)
    S = column_space(np.dot(Yt, incidence_matrix(net).astype(object)))
    return S, net.n - linkage_classes(net).l - S.dim


def factor_map_eval(net: ReactionNetwork, kin: PowerLawKinetics, x) -> np.ndarray:
    """psi(x): x^(kinetic row) at reactant complexes, 0 elsewhere."""
    x = np.asarray(x, dtype=float)
    out = np.zeros(net.n)
    for j, row in kinetic_rows(net, kin).items():
        out[j] = np.prod(x ** np.array([float(v) for v in row]))
    return out


def laplacian(net: ReactionNetwork, kin: PowerLawKinetics) -> np.ndarray:
    """A_k, n x n: (i, j) is the rate constant of j -> i; columns sum to zero."""
    _check_shapes(net, kin)
    A = np.zeros((net.n, net.n))
    for q, (a, b) in enumerate(net.reactions):
        A[b, a] += kin.k[q]
        A[a, a] -= kin.k[q]
    return A


def pi_y(net: ReactionNetwork, kin: PowerLawKinetics, y: int, x, x_ref) -> float:
    """prod_s (x_s / x'_s) ** Y~[s, y]."""
    x = np.asarray(x, dtype=float)
    x_ref = np.asarray(x_ref, dtype=float)
    if np.any(x <= 0) or np.any(x_ref <= 0):
        raise ValueError("pi_y needs strictly positive arguments")
    col = np.array([float(v) for v in y_tilde(net, kin)[:, y]])
    return float(np.prod((x / x_ref) ** col))
