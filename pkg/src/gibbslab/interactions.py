"""Local interactions: term maps, decay norms, Hamiltonians, model builders.

An interaction assigns a Hermitian operator to each region it acts on.  The
builders cover the test families used throughout: diagonal Ising (the
certified commuting family), transverse-field Ising, Heisenberg, and seeded
random short-range models with a target decay norm.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .geometry import DEFAULT_METRIC, Metric, Region, diam, region
from .operators import (
    HERM_TOL, LocalOperator, PAULI_X, PAULI_Y, PAULI_Z, cond_expectation,
    commutator, embed, identity, mul, op_norm, random_hermitian,
)


@dataclass
class Interaction:
    """Family of Hermitian terms indexed by their support regions."""

    terms: dict[Region, LocalOperator]
    ambient: Region
    local_dim: int = 2
    metric: Metric = DEFAULT_METRIC

    def __post_init__(self):
        for X, op in self.terms.items():
            if op.support != X:
                raise ValueError(f"term support {op.support.sites} != key {X.sites}")
            if not X.issubset(self.ambient):
                raise ValueError("term outside ambient region")
            if not op.is_hermitian(HERM_TOL):
                raise ValueError(f"non-Hermitian term on {X.sites}")

    @property
    def supports(self) -> list[Region]:
        """Support family S: regions with a nonzero term."""
        return [X for X, op in self.terms.items() if op_norm(op) > 0]

    def is_diagonal(self, tol: float = 1e-12) -> bool:
        return all(np.max(np.abs(op.matrix - np.diag(np.diag(op.matrix)))) <= tol
                   for op in self.terms.values())

    def restricted(self, Y: Region) -> "Interaction":
        """Terms with support inside Y."""
        kept = {X: op for X, op in self.terms.items() if X.issubset(Y)}
        return Interaction(kept, self.ambient, self.local_dim, self.metric)


@dataclass(frozen=True)
class SubadditiveWeight:
    """Region weight b with b(X u Y) <= b(X) + b(Y), e.g. lam|X| + mu diam(X)."""

    fn: Callable[[Region], float]
    description: str = ""

    def __call__(self, X: Region) -> float:
        return float(self.fn(X))

    def spot_check(self, pool: list[Region], rng: np.random.Generator,
                   trials: int = 30) -> bool:
        """Subadditivity on intersecting pairs, the regime the expansions use.

        Weights with a diameter term are not subadditive across disjoint
        distant pairs, and no estimate here ever applies them that way.
        """
        done = 0
        for _ in range(trials * 10):
            if done >= trials:
                break
            i, j = rng.integers(0, len(pool), size=2)
            X, Y = pool[i], pool[j]
            if X.isdisjoint(Y):
                continue
            done += 1
            if self(X.union(Y)) > self(X) + self(Y) + 1e-9:
                return False
        return True


def size_diam_weight(lam: float, mu: float,
                     metric: Metric = DEFAULT_METRIC) -> SubadditiveWeight:
    return SubadditiveWeight(
        lambda X: lam * len(X) + mu * diam(X, metric),
        f"{lam}*|X| + {mu}*diam(X)")


def constant_weight(a: float) -> SubadditiveWeight:
    return SubadditiveWeight(lambda X: a, f"constant {a}")


def norm_lambda_mu(phi: Interaction, lam: float, mu: float) -> float:
    """max over sites x of sum_{X containing x} ||Phi_X|| e^{lam|X| + mu diam(X)}."""
    if lam < 0 or mu < 0:
        raise ValueError("weights must be nonnegative")
    best = 0.0
    per_site: dict = {}
    for X, op in phi.terms.items():
        w = op_norm(op) * math.exp(lam * len(X) + mu * diam(X, phi.metric))
        for x in X:
            per_site[x] = per_site.get(x, 0.0) + w
    return max(per_site.values(), default=0.0)


def norm_weighted(phi: Interaction, b: SubadditiveWeight) -> float:
    """Same sup-over-sites norm with a general subadditive weight e^{b(X)}."""
    per_site: dict = {}
    for X, op in phi.terms.items():
        w = op_norm(op) * math.exp(b(X))
        for x in X:
            per_site[x] = per_site.get(x, 0.0) + w
    return max(per_site.values(), default=0.0)


def hamiltonian(phi: Interaction, Y: Region) -> LocalOperator:
    """H_Y = sum of terms supported inside Y, embedded into Y."""
    if not Y.issubset(phi.ambient):
        raise ValueError("region outside ambient")
    D = phi.local_dim
    H = LocalOperator(Y, np.zeros((D ** len(Y),) * 2), D)
    for X, op in phi.terms.items():
        if X.issubset(Y):
            H = H.add(embed(op, Y))
    return H


def hamiltonian_diagonal(phi: Interaction, Y: Region) -> np.ndarray:
    """Diagonal of H_Y as a vector (valid only for diagonal interactions)."""
    D = phi.local_dim
    n = len(Y)
    h = np.zeros([D] * n if n else [1])
    for X, op in phi.terms.items():
        if not X.issubset(Y):
            continue
        d = np.diag(op.matrix).real
        # canonical orders agree, so the term's axes land at increasing
        # positions in Y and a broadcast reshape places them correctly
        shape = [1] * n
        for s in X.sites:
            shape[Y.index(s)] = D
        h = h + d.reshape(shape if n else [1])
    return h.reshape(-1)


def degree(phi: Interaction) -> int:
    """max over supports X of the number of supports meeting X (X included)."""
    S = phi.supports
    if not S:
        return 0
    best = 0
    for X in S:
        cnt = sum(1 for Y in S if not X.isdisjoint(Y))
        best = max(best, cnt)
    return best


def _bonds(ambient: Region) -> list[Region]:
    """Axis-aligned nearest-neighbor pairs inside the ambient region."""
    sset = set(ambient.sites)
    g = ambient.lattice_dim
    out = []
    for s in ambient:
        for ax in range(g):
            t = tuple(c + (1 if i == ax else 0) for i, c in enumerate(s))
            if t in sset:
                out.append(Region((s, t), g))
    return out


def ising(ambient: Region, J: float, h: float) -> Interaction:
    """Diagonal Ising: J Z.Z on bonds, h Z on sites (the commuting family)."""
    terms: dict[Region, LocalOperator] = {}
    for b in _bonds(ambient):
        if J != 0.0:
            terms[b] = LocalOperator(b, J * np.kron(PAULI_Z, PAULI_Z), 2)
    if h != 0.0:
        for s in ambient:
            X = Region((s,), ambient.lattice_dim)
            terms[X] = LocalOperator(X, h * PAULI_Z, 2)
    return Interaction(terms, ambient, 2)


def tfim(ambient: Region, J: float, g_field: float) -> Interaction:
    """Transverse-field Ising: J Z.Z on bonds, g X on sites (non-commuting)."""
    terms: dict[Region, LocalOperator] = {}
    for b in _bonds(ambient):
        if J != 0.0:
            terms[b] = LocalOperator(b, J * np.kron(PAULI_Z, PAULI_Z), 2)
    if g_field != 0.0:
        for s in ambient:
            X = Region((s,), ambient.lattice_dim)
            terms[X] = LocalOperator(X, g_field * PAULI_X, 2)
    return Interaction(terms, ambient, 2)


def heisenberg(ambient: Region, Jx: float, Jy: float, Jz: float) -> Interaction:
    terms: dict[Region, LocalOperator] = {}
    pair = Jx * np.kron(PAULI_X, PAULI_X) + Jy * np.kron(PAULI_Y, PAULI_Y) \
        + Jz * np.kron(PAULI_Z, PAULI_Z)
    for b in _bonds(ambient):
        terms[b] = LocalOperator(b, pair, 2)
    return Interaction(terms, ambient, 2)


def random_short_range(ambient: Region, seed: int, max_range: int = 2,
                       target_norm: float = 1.0, lam: float = 0.5,
                       mu: float = 0.5, max_sites: int = 3,
                       metric: Metric = DEFAULT_METRIC) -> Interaction:
    """Seeded random Hermitian terms on sets of diameter <= max_range.

    Term norms are drawn with an e^{-mu diam} envelope and the whole family is
    rescaled afterwards so that ||Phi||_{lam,mu} equals target_norm.
    """
    rng = np.random.default_rng(seed)
    sites = list(ambient.sites)
    candidates: list[Region] = []
    for k in range(1, max_sites + 1):
        for combo in itertools.combinations(sites, k):
            X = Region(tuple(combo), ambient.lattice_dim)
            if diam(X, metric) <= max_range:
                candidates.append(X)
    terms: dict[Region, LocalOperator] = {}
    for X in candidates:
        if rng.uniform() < 0.7:
            scale = math.exp(-mu * diam(X, metric)) * rng.uniform(0.2, 1.0)
            m = random_hermitian(rng, 2 ** len(X), scale)
            terms[X] = LocalOperator(X, m, 2)
    phi = Interaction(terms, ambient, 2, metric)
    actual = norm_lambda_mu(phi, lam, mu)
    if actual > 0:
        factor = target_norm / actual
        phi = Interaction({X: op.scale(factor) for X, op in terms.items()},
                          ambient, 2, metric)
    return phi


@dataclass
class CommutingReport:
    passed: bool
    worst_commutator: float
    witness: tuple | None = None
    checked_pairs: int = 0

    def __str__(self):
        tag = "pass" if self.passed else "FAIL"
        w = f", witness {self.witness}" if self.witness else ""
        return (f"commuting-hypothesis check: {tag} "
                f"(worst commutator {self.worst_commutator:.3e}, "
                f"{self.checked_pairs} pairs{w})")


def commuting_hypothesis_check(phi: Interaction, word_len_max: int = 2,
                               sample_Ls: list[Region] | None = None,
                               tol: float = 1e-10) -> CommutingReport:
    """Commutation of the finitely generated family; necessary, not sufficient.

    Checks (a) all term pairs commute, (b) for each sampled kept region L, the
    conditional expectations of term monomials up to the given word length
    commute with each other and with the terms.
    """
    if word_len_max < 1:
        raise ValueError("word_len_max must be >= 1")
    ops = [op for op in phi.terms.values()]
    family: list[tuple[str, LocalOperator]] = [
        (f"term{X.sites}", op) for X, op in phi.terms.items()]
    if sample_Ls is None:
        n = len(phi.ambient)
        half = Region(phi.ambient.sites[: max(1, n // 2)], phi.ambient.lattice_dim)
        sample_Ls = [half]
    for L in sample_Ls:
        monomials: list[LocalOperator] = list(ops)
        frontier = list(ops)
        for _ in range(word_len_max - 1):
            nxt = []
            for a in frontier:
                for b in ops:
                    nxt.append(mul(a, b))
            monomials.extend(nxt)
            frontier = nxt
        for i, m in enumerate(monomials):
            keep = m.support.intersection(L)
            family.append((f"E_L{L.sites}[w{i}]", cond_expectation(m, keep)))
    worst, witness = 0.0, None
    pairs = 0
    for (na, a), (nb, b) in itertools.combinations(family, 2):
        if a.support.isdisjoint(b.support):
            continue  # disjoint supports commute exactly
        c = op_norm(commutator(a, b))
        pairs += 1
        if c > worst:
            worst, witness = c, (na, nb)
    return CommutingReport(worst <= tol, worst, witness if worst > tol else None,
                           pairs)
