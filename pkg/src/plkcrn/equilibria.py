"""Numerics for positive equilibria.

Species formation rate, complex-balance residual, Birch points, multistart
equilibrium search inside a stoichiometric class, and LP-set bookkeeping.

Multistart search is incomplete by nature: an atlas lists the equilibria it
found, never a proof that there are no others.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import CRNError, NoConvergence
from .kinetics import PowerLawKinetics, kinetic_order_subspace
from .linalg import TAU_LIN, Subspace, member
from .network import (
    ReactionNetwork,
    has_ILC,
    incidence_matrix,
    is_cycle_terminal,
    linkage_reaction_indices,
    stoichiometric_matrix,
    stoichiometric_subspace,
)

log = logging.getLogger(__name__)

TAU_EQ = 1e-9  # relative to ||N|| * ||K(x)||
TAU_DEDUPE = 1e-6  # log-coordinates
NEWTON_MAX_ITER = 200
DEFAULT_SEED = 20220817
START_SPREAD = 3.0


def _N_float(net: ReactionNetwork) -> np.ndarray:
    return stoichiometric_matrix(net).astype(float)


def rates(net: ReactionNetwork, kin: PowerLawKinetics, x) -> np.ndarray:
    """K(x), K_q = k_q * x^F_q."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("concentrations must be strictly positive")
    return kin.k_array() * np.prod(x[None, :] ** kin.F_float(), axis=1)


def sfrf(net: ReactionNetwork, kin: PowerLawKinetics, x) -> np.ndarray:
    """Species formation rate f(x) = N K(x)."""
    return _N_float(net) @ rates(net, kin, x)


def rate_scale(net: ReactionNetwork, kin: PowerLawKinetics, x) -> float:
    return float(np.linalg.norm(_N_float(net)) * np.linalg.norm(rates(net, kin, x)))


def is_equilibrium(net: ReactionNetwork, kin: PowerLawKinetics, x, tol: float = TAU_EQ) -> bool:
    return float(np.linalg.norm(sfrf(net, kin, x))) <= tol * max(rate_scale(net, kin, x), 1e-300)


def complex_balance_residual(net: ReactionNetwork, kin: PowerLawKinetics, x) -> np.ndarray:
    return incidence_matrix(net) @ rates(net, kin, x)


def is_complex_balanced(net: ReactionNetwork, kin: PowerLawKinetics, x, tol: float = TAU_EQ) -> bool:
    K = rates(net, kin, x)
    Ia = incidence_matrix(net)
    scale = np.linalg.norm(Ia) * np.linalg.norm(K)
    return float(np.linalg.norm(Ia @ K)) <= tol * max(scale, 1e-300)


def birch_point(p, x_star, V: Subspace, tol: float = TAU_EQ, max_iter: int = NEWTON_MAX_ITER) -> np.ndarray:
    """The unique x > 0 with x - p in V and log x - log x* orthogonal to V.

    Newton on the strictly convex dual  phi(w) = sum(exp(log x* + A^T w)) - w.(A p),
    whose gradient A(x(w) - p) vanishes exactly at the answer (rows of A span V-perp).
    """
    p = np.asarray(p, dtype=float)
    xs = np.asarray(x_star, dtype=float)
    if np.any(p <= 0) or np.any(xs <= 0):
        raise ValueError("birch_point needs strictly positive p and x*")
    A = V.perp().orthonormal()
    if A.shape[0] == 0:
        return xs.copy()
    lx = np.log(xs)
    b = A @ p
    scale = max(float(np.linalg.norm(p)), 1e-300)

    def phi(w):
        with np.errstate(over="ignore"):
            x = np.exp(lx + A.T @ w)
            return float(x.sum() - w @ b), x

    w = np.zeros(A.shape[0])
    val, x = phi(w)
    g = A @ x - b
    stalls = 0
    for _ in range(max_iter):
        gn = float(np.linalg.norm(g))
        if gn <= 1e-15 * scale or stalls >= 3:
            break
        H = (A * x) @ A.T
        try:
            step = np.linalg.solve(H, -g)
        except np.linalg.LinAlgError:
            step = -g
        slope = float(g @ step)
        vn, xn = phi(w + step)
        if np.isfinite(vn) and np.linalg.norm(A @ xn - b) <= 0.5 * gn:
            # quadratic region: Armijo on phi is below rounding there
            wn, accepted = w + step, True
        else:
            t, accepted = 1.0, False
            for _ in range(60):
                wn = w + t * step
                vn, xn = phi(wn)
                if np.isfinite(vn) and vn <= val + 1e-4 * t * slope:
                    accepted = True
                    break
                t *= 0.5
        if not accepted:
            stalls += 1
            continue
        gnew = A @ xn - b
        stalls = stalls + 1 if np.linalg.norm(gnew) >= gn else 0
        w, val, x, g = wn, vn, xn, gnew
    resid = float(np.linalg.norm(A @ x - b)) / scale
    if not np.isfinite(resid) or resid > tol:
        raise NoConvergence("birch point Newton did not converge", best=x, residual=resid)
    return x


@dataclass(frozen=True)
class LPSet:
    """Q(x*) = {x > 0 : log x - log x* in P-perp}."""

    flux_subspace: Subspace
    reference_point: np.ndarray

    def contains(self, x, tol: float = TAU_LIN) -> bool:
        return lp_set_membership(x, self.reference_point, self.flux_subspace, tol)


@dataclass
class EquilibriaAtlas:
    anchor: np.ndarray
    equilibria: list[np.ndarray]
    residuals: list[float]
    complex_balanced: list[bool]
    lp_sets: list[LPSet | None]
    seed: int
    starts: int
    converged_starts: int
    notes: list[str] = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.equilibria)

    def __len__(self) -> int:
        return len(self.equilibria)


class _Newton:
    """Damped Newton in log-coordinates on  [W(x - p); B^T f(x)] = 0."""

    def __init__(self, net: ReactionNetwork, kin: PowerLawKinetics, p: np.ndarray, S: Subspace):
        self.N = _N_float(net)
        self.nN = float(np.linalg.norm(self.N))
        self.F = kin.F_float()
        self.lk = np.log(kin.k_array())
        self.p = p
        self.ps = float(np.linalg.norm(p))
        self.B = S.orthonormal().T  # m x s
        self.W = S.perp().orthonormal()  # (m - s) x m

    def residual(self, z, sc):
        with np.errstate(over="ignore", invalid="ignore"):
            x = np.exp(z)
            K = np.exp(self.lk + self.F @ z)
            return np.concatenate([self.W @ (x - self.p) / self.ps, self.B.T @ (self.N @ K) / sc]), x, K

    def scale(self, z):
        with np.errstate(over="ignore"):
            return self.nN * float(np.linalg.norm(np.exp(self.lk + self.F @ z)))

    def solve(self, z, max_iter=NEWTON_MAX_ITER):
        with np.errstate(over="ignore", invalid="ignore"):
            return self._solve(z, max_iter)

    def _solve(self, z, max_iter):
        polish = 0
        for _ in range(max_iter):
            sc = self.scale(z)
            if not np.isfinite(sc) or sc == 0:
                return None
            G, x, K = self.residual(z, sc)
            if not np.all(np.isfinite(G)):
                return None
            J = np.vstack([self.W * x / self.ps, (self.B.T @ (self.N * K)) @ self.F / sc])
            step = np.linalg.lstsq(J, -G, rcond=None)[0]
            m0 = float(G @ G)
            t = 1.0
            for _ in range(40):
                zn = z + t * step
                Gn, _, _ = self.residual(zn, sc)
                if np.all(np.isfinite(Gn)) and float(Gn @ Gn) <= (1 - 1e-4 * t) * m0:
                    break
                t *= 0.5
            else:
                zn = z + step
                Gn, _, _ = self.residual(zn, sc)
                if not (np.all(np.isfinite(Gn)) and float(Gn @ Gn) < m0):
                    break
            z = zn
            if np.max(np.abs(z)) > 200:
                return None
            if self.converged(z):
                polish += 1
                if polish >= 3:
                    break
        return z if self.converged(z) else None

    def converged(self, z) -> bool:
        sc = self.scale(z)
        if not np.isfinite(sc) or sc == 0:
            return False
        x = np.exp(z)
        K = np.exp(self.lk + self.F @ z)
        f = self.N @ K
        return (
            float(np.linalg.norm(f)) <= TAU_EQ * sc
            and float(np.linalg.norm(self.W @ (x - self.p))) <= TAU_LIN * self.ps
        )


def class_starts(p, S: Subspace, count: int, seed: int) -> list[np.ndarray]:
    """Start points spread over the class of p.

    Each start draws w log-uniformly on [-3, 3]^dim S around p and maps
    exp(log p + B w) back into the class by its Birch point.
    """
    p = np.asarray(p, dtype=float)
    B = S.orthonormal().T
    children = np.random.SeedSequence(seed).spawn(count)
    out = []
    for child in children:
        rng = np.random.default_rng(child)
        w = rng.uniform(-START_SPREAD, START_SPREAD, size=B.shape[1])
        y = np.exp(np.log(p) + B @ w)
        out.append(birch_point(p, y, S))
    return out


def _dedupe(points: list[np.ndarray]) -> list[np.ndarray]:
    pts = sorted(points, key=lambda x: tuple(np.log(x)))
    kept: list[np.ndarray] = []
    for x in pts:
        if all(np.max(np.abs(np.log(x) - np.log(y))) > TAU_DEDUPE for y in kept):
            kept.append(x)
    return kept


def find_equilibria(
    net: ReactionNetwork,
    kin: PowerLawKinetics,
    p,
    budget: int = 64,
    seed: int = DEFAULT_SEED,
) -> EquilibriaAtlas:
    """Multistart damped Newton for positive equilibria in the class (p + S) of p."""
    p = np.asarray(p, dtype=float)
    if p.shape != (net.m,) or np.any(p <= 0):
        raise ValueError("class anchor must be a strictly positive vector of length m")
    S = stoichiometric_subspace(net)
    solver = _Newton(net, kin, p, S)
    found = []
    converged = 0
    for x0 in class_starts(p, S, budget, seed):
        z = solver.solve(np.log(x0))
        if z is not None:
            converged += 1
            found.append(np.exp(z))
    eqs = _dedupe(found)

    flux = None
    if is_cycle_terminal(net):
        try:
            flux = kinetic_order_subspace(net, kin)[0]
        except CRNError:
            flux = None
    atlas = EquilibriaAtlas(
        anchor=p,
        equilibria=eqs,
        residuals=[float(np.linalg.norm(sfrf(net, kin, x)) / rate_scale(net, kin, x)) for x in eqs],
        complex_balanced=[is_complex_balanced(net, kin, x) for x in eqs],
        lp_sets=[LPSet(flux, x) if flux is not None else None for x in eqs],
        seed=seed,
        starts=budget,
        converged_starts=converged,
    )
    atlas.notes.append(f"found {len(eqs)} equilibria from {budget} starts; search is not exhaustive")
    return atlas


def lp_set_membership(x, x_star, V: Subspace, tol: float = TAU_LIN) -> bool:
    """x in Q(x*) for flux subspace V: log x - log x* in V-perp."""
    d = np.log(np.asarray(x, dtype=float)) - np.log(np.asarray(x_star, dtype=float))
    return member(d, V.perp(), tol)


@dataclass(frozen=True)
class ReferenceEquilibria:
    points: tuple[np.ndarray, ...]
    mu_lower_bound: int
    disjoint: bool
    overlaps: tuple[tuple[int, int], ...] = ()


def reference_equilibria(atlas: EquilibriaAtlas, V: Subspace) -> ReferenceEquilibria:
    """Found equilibria of one class as LP-set reference points, checking pairwise disjointness."""
    pts = tuple(atlas.equilibria)
    overlaps = []
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            if lp_set_membership(pts[i], pts[j], V) or lp_set_membership(pts[j], pts[i], V):
                overlaps.append((i, j))
    return ReferenceEquilibria(pts, len(pts), not overlaps, tuple(overlaps))


def per_linkage_equilibria(net: ReactionNetwork, kin: PowerLawKinetics, x, tol: float = TAU_EQ) -> list[bool]:
    """Whether each linkage-class rate function f^i vanishes at x."""
    x = np.asarray(x, dtype=float)
    N = _N_float(net)
    K = rates(net, kin, x)
    scale = max(np.linalg.norm(N) * np.linalg.norm(K), 1e-300)
    out = []
    for idx in linkage_reaction_indices(net):
        fi = N[:, idx] @ K[list(idx)]
        out.append(bool(np.linalg.norm(fi) <= tol * scale))
    f = N @ K
    whole = float(np.linalg.norm(f)) <= tol * scale
    if all(out) != whole and has_ILC(net).holds:
        # with ILC the two must agree; only a decisive gap is a contradiction
        norms = [float(np.linalg.norm(N[:, idx] @ K[list(idx)])) for idx in linkage_reaction_indices(net)]
        if (whole and max(norms) > 1e3 * tol * scale) or (all(out) and np.linalg.norm(f) > 1e3 * tol * scale):
            raise AssertionError("linkage-class rates disagree with the global rate under ILC")
        log.warning("per-class and global equilibrium tests disagree near tolerance")
    return out


def sample_lp_set(x_star, V: Subspace, count: int, rng: np.random.Generator, spread: float = 1.0):
    """Points exp(log x* + v) for random v in V-perp."""
    P = V.perp().orthonormal()
    lx = np.log(np.asarray(x_star, dtype=float))
    return [np.exp(lx + rng.uniform(-spread, spread, P.shape[0]) @ P) for _ in range(count)]
