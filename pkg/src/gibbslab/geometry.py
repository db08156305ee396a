"""Finite sublattices of Z^g: regions, p-metrics, boundaries, boundary sums.

Sites are integer coordinate tuples.  A Region keeps its sites in lexicographic
order so that every module building tensor products agrees on leg order.
"""

from __future__ import annotations

import itertools
import math
import numbers
from dataclasses import dataclass, field


Site = tuple[int, ...]


@dataclass(frozen=True)
class Metric:
    """p-norm metric on Z^g; p is 1, 2 or math.inf (default sup-distance)."""

    p: float = math.inf

    def __post_init__(self):
        if self.p not in (1, 2, math.inf):
            raise ValueError(f"unsupported metric p={self.p}; use 1, 2 or inf")

    def site_dist(self, a: Site, b: Site) -> float:
        d = [abs(x - y) for x, y in zip(a, b)]
        if self.p == 1:
            return float(sum(d))
        if self.p == 2:
            return math.sqrt(sum(x * x for x in d))
        return float(max(d)) if d else 0.0


DEFAULT_METRIC = Metric(math.inf)


@dataclass(frozen=True)
class Region:
    """Finite ordered set of lattice sites (canonical lexicographic order)."""

    sites: tuple[Site, ...]
    lattice_dim: int = field(default=0)

    def __post_init__(self):
        sites = tuple(tuple(int(c) for c in s) for s in self.sites)
        if len(set(sites)) != len(sites):
            raise ValueError("duplicate sites in region")
        dims = {len(s) for s in sites}
        if len(dims) > 1:
            raise ValueError("sites of mixed dimension")
        g = dims.pop() if dims else self.lattice_dim
        if g < 1 and sites:
            raise ValueError("lattice dimension must be >= 1")
        object.__setattr__(self, "sites", tuple(sorted(sites)))
        object.__setattr__(self, "lattice_dim", g if g else self.lattice_dim)

    def __len__(self) -> int:
        return len(self.sites)

    def __iter__(self):
        return iter(self.sites)

    def __contains__(self, site) -> bool:
        return tuple(site) in set(self.sites)

    def index(self, site: Site) -> int:
        return self.sites.index(tuple(site))

    def union(self, other: "Region") -> "Region":
        return Region(tuple(set(self.sites) | set(other.sites)), self.lattice_dim)

    def intersection(self, other: "Region") -> "Region":
        return Region(tuple(set(self.sites) & set(other.sites)), self.lattice_dim)

    def difference(self, other: "Region") -> "Region":
        return Region(tuple(set(self.sites) - set(other.sites)), self.lattice_dim)

    def issubset(self, other: "Region") -> bool:
        return set(self.sites) <= set(other.sites)

    def isdisjoint(self, other: "Region") -> bool:
        return set(self.sites).isdisjoint(other.sites)


def region(sites, dim: int | None = None) -> Region:
    """Region from an iterable of sites; bare ints are read as 1-D sites."""
    norm = []
    for s in sites:
        if isinstance(s, numbers.Integral):
            norm.append((int(s),))
        else:
            norm.append(tuple(int(c) for c in s))
    g = dim if dim is not None else (len(norm[0]) if norm else 1)
    return Region(tuple(norm), g)


def chain(length: int, start: int = 0) -> Region:
    """1-D interval [start, start+length)."""
    return region([(i,) for i in range(start, start + length)])


def box(lo, hi) -> Region:
    """Axis-aligned box with inclusive corners lo..hi."""
    lo = tuple(int(c) for c in (lo if not isinstance(lo, int) else (lo,)))
    hi = tuple(int(c) for c in (hi if not isinstance(hi, int) else (hi,)))
    if len(lo) != len(hi):
        raise ValueError("box corners of mixed dimension")
    ranges = [range(a, b + 1) for a, b in zip(lo, hi)]
    return region(list(itertools.product(*ranges)))


def dist(X: Region, Y: Region, metric: Metric = DEFAULT_METRIC) -> float:
    """min over site pairs of the p-distance; 0 iff the regions overlap."""
    if len(X) == 0 or len(Y) == 0:
        raise ValueError("empty region")
    return min(metric.site_dist(a, b) for a in X for b in Y)


def diam(X: Region, metric: Metric = DEFAULT_METRIC) -> float:
    """max pairwise distance; 0 for singletons."""
    if len(X) == 0:
        raise ValueError("empty region")
    sites = X.sites
    if len(sites) == 1:
        return 0.0
    return max(metric.site_dist(a, b) for a, b in itertools.combinations(sites, 2))


def _ball_offsets(g: int, r: float, metric: Metric):
    """Integer offsets o != 0 with |o|_p <= r."""
    kmax = int(math.floor(r + 1e-12))
    out = []
    for off in itertools.product(range(-kmax, kmax + 1), repeat=g):
        if any(off) and metric.site_dist(off, (0,) * g) <= r + 1e-12:
            out.append(off)
    return out


def inner_boundary(A: Region, r: float = 1.0, ambient: Region | None = None,
                   metric: Metric = DEFAULT_METRIC) -> Region:
    """Sites of A within distance r of the complement.

    ambient=None means the complement is taken in the infinite lattice Z^g
    (the setting of the boundary-counting estimates); a finite ambient uses
    ambient \\ A, with the convention that ambient == A gives an empty
    boundary.
    """
    if r <= 0:
        raise ValueError("r must be positive")
    Aset = set(A.sites)
    if ambient is None:
        offs = _ball_offsets(A.lattice_dim, r, metric)
        picked = [v for v in A
                  if any(tuple(c + o for c, o in zip(v, off)) not in Aset for off in offs)]
        return Region(tuple(picked), A.lattice_dim)
    if not A.issubset(ambient):
        raise ValueError("A not contained in ambient")
    comp = ambient.difference(A)
    if len(comp) == 0:
        return Region((), A.lattice_dim)
    picked = [v for v in A if min(metric.site_dist(v, u) for u in comp) <= r + 1e-12]
    return Region(tuple(picked), A.lattice_dim)


def outer_boundary(A: Region, ambient: Region | None = None,
                   metric: Metric = DEFAULT_METRIC, r: float = 1.0) -> Region:
    """Complement sites within distance r of A (mirror of inner_boundary)."""
    if r <= 0:
        raise ValueError("r must be positive")
    Aset = set(A.sites)
    if ambient is None:
        offs = _ball_offsets(A.lattice_dim, r, metric)
        picked = {tuple(c + o for c, o in zip(v, off))
                  for v in A for off in offs} - Aset
        return Region(tuple(picked), A.lattice_dim)
    if not A.issubset(ambient):
        raise ValueError("A not contained in ambient")
    comp = ambient.difference(A)
    if len(comp) == 0:
        return Region((), A.lattice_dim)
    picked = [u for u in comp if min(metric.site_dist(u, v) for v in A) <= r + 1e-12]
    return Region(tuple(picked), A.lattice_dim)


def onion_constant(mu: float, g: int) -> float:
    """nu = sup_k (2k+1)^g e^{-mu k/2} * sum_{j>=0} e^{-mu j/2}.

    The supremand is unimodal in k, so a short scan past the turning point
    suffices.
    """
    if mu <= 0:
        raise ValueError("mu must be positive")
    geom = 1.0 / (1.0 - math.exp(-mu / 2.0))
    best = 0.0
    kmax = int(math.ceil(2.0 * g / mu)) + 10
    for k in range(kmax + 1):
        best = max(best, (2 * k + 1) ** g * math.exp(-mu * k / 2.0))
    return best * geom


def boundary_sum(A: Region, X: Region, mu: float,
                 metric: Metric = DEFAULT_METRIC) -> tuple[float, float]:
    """(exact, bound) for sum_{v in A} e^{-mu dist(v, X)}.

    The bound is |inner_boundary(A)| * nu * e^{-(mu/2) dist(A,X)} with the
    inner boundary taken against the infinite lattice, which is the form the
    expansional estimates consume.
    """
    if mu <= 0:
        raise ValueError("mu must be positive")
    if not A.isdisjoint(X):
        raise ValueError("regions overlap")
    exact = sum(math.exp(-mu * min(metric.site_dist(v, u) for u in X)) for v in A)
    nu = onion_constant(mu, A.lattice_dim)
    bound = len(inner_boundary(A, 1.0, None, metric)) * nu \
        * math.exp(-(mu / 2.0) * dist(A, X, metric))
    return exact, bound
