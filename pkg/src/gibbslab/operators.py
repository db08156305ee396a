"""Dense operator algebra on tensor products of local Hilbert spaces.

Everything is exact dense linear algebra: embeddings, products, partial
traces, conditional expectations, Hermitian matrix functions, norms.  The
hard size cap keeps matrices within what double-precision eigensolvers
handle comfortably.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import Region

DIM_CAP = 16384  # D^n for n=14, D=2
HERM_TOL = 1e-10
PD_FLOOR = 1e-12


class DenseCapError(ValueError):
    pass


def _check_dim(D: int, nsites: int):
    if D ** nsites > DIM_CAP:
        raise DenseCapError(
            f"dense cap exceeded: {nsites} sites at local dim {D} "
            f"gives dimension {D ** nsites} > {DIM_CAP}")


@dataclass
class LocalOperator:
    """Dense complex matrix bound to an ordered support region."""

    support: Region
    matrix: np.ndarray
    local_dim: int = 2

    def __post_init__(self):
        _check_dim(self.local_dim, len(self.support))
        d = self.local_dim ** len(self.support)
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (d, d):
            raise ValueError(f"matrix shape {m.shape} does not match support "
                             f"dimension {d}")
        self.matrix = m

    @property
    def dim(self) -> int:
        return self.local_dim ** len(self.support)

    def is_hermitian(self, tol: float = HERM_TOL) -> bool:
        return np.max(np.abs(self.matrix - self.matrix.conj().T)) <= tol

    def dagger(self) -> "LocalOperator":
        return LocalOperator(self.support, self.matrix.conj().T, self.local_dim)

    def scale(self, c: complex) -> "LocalOperator":
        return LocalOperator(self.support, c * self.matrix, self.local_dim)

    def add(self, other: "LocalOperator") -> "LocalOperator":
        a, b = align(self, other)
        return LocalOperator(a.support, a.matrix + b.matrix, a.local_dim)

    def sub(self, other: "LocalOperator") -> "LocalOperator":
        a, b = align(self, other)
        return LocalOperator(a.support, a.matrix - b.matrix, a.local_dim)


def identity(support: Region, local_dim: int = 2) -> LocalOperator:
    _check_dim(local_dim, len(support))
    return LocalOperator(support, np.eye(local_dim ** len(support)), local_dim)


def embed(Q: LocalOperator, Y: Region) -> LocalOperator:
    """Q tensor identity on Y \\ supp(Q), legs permuted to Y's canonical order."""
    if not Q.support.issubset(Y):
        raise ValueError("operator support not contained in target region")
    D = Q.local_dim
    n = len(Y)
    _check_dim(D, n)
    rest = Y.difference(Q.support)
    big = np.kron(Q.matrix, np.eye(D ** len(rest)))
    # current leg order: supp(Q) sites then rest sites; permute to Y order
    cur_sites = list(Q.support.sites) + list(rest.sites)
    perm = [cur_sites.index(s) for s in Y.sites]
    t = big.reshape([D] * (2 * n))
    t = t.transpose(perm + [n + p for p in perm])
    return LocalOperator(Y, t.reshape(D ** n, D ** n), D)


def align(A: LocalOperator, B: LocalOperator) -> tuple[LocalOperator, LocalOperator]:
    if A.local_dim != B.local_dim:
        raise ValueError("local dimension mismatch")
    Y = A.support.union(B.support)
    return embed(A, Y), embed(B, Y)


def mul(A: LocalOperator, B: LocalOperator) -> LocalOperator:
    """Product after embedding both factors into the union support."""
    a, b = align(A, B)
    return LocalOperator(a.support, a.matrix @ b.matrix, a.local_dim)


def commutator(A: LocalOperator, B: LocalOperator) -> LocalOperator:
    a, b = align(A, B)
    return LocalOperator(a.support, a.matrix @ b.matrix - b.matrix @ a.matrix,
                         a.local_dim)


def partial_trace(Q: LocalOperator, X: Region) -> LocalOperator:
    """Trace out the sites of X; full trace leaves a 1x1 operator on ()."""
    if not X.issubset(Q.support):
        raise ValueError("trace region not contained in operator support")
    D = Q.local_dim
    n = len(Q.support)
    keep = Q.support.difference(X)
    t = Q.matrix.reshape([D] * (2 * n))
    axes = sorted(Q.support.index(s) for s in X)
    for k, ax in enumerate(axes):
        a = ax - k  # axes shift as we trace
        t = np.trace(t, axis1=a, axis2=a + (n - k))
    d = D ** len(keep)
    return LocalOperator(keep, t.reshape(d, d), D)


def trace(Q: LocalOperator) -> complex:
    return complex(np.trace(Q.matrix))


def cond_expectation(Q: LocalOperator, keep: Region) -> LocalOperator:
    """Normalized partial trace keeping `keep`: unital, idempotent."""
    drop = Q.support.difference(keep)
    out = partial_trace(Q, drop)
    return out.scale(1.0 / Q.local_dim ** len(drop))


def herm_fn(Q: LocalOperator, f, pd_floor: float = PD_FLOOR,
            require_pd: bool = False) -> LocalOperator:
    """Apply a scalar function through the eigendecomposition of Hermitian Q."""
    if not Q.is_hermitian():
        raise ValueError("herm_fn requires a Hermitian operator")
    w, U = np.linalg.eigh(Q.matrix)
    if require_pd and w.min() <= pd_floor:
        raise ValueError(f"marginal not positive definite: min eigenvalue "
                         f"{w.min():.3e} <= floor {pd_floor:.0e}")
    return LocalOperator(Q.support, (U * f(w)) @ U.conj().T, Q.local_dim)


def herm_exp(Q: LocalOperator) -> LocalOperator:
    return herm_fn(Q, np.exp)


def herm_log(Q: LocalOperator, pd_floor: float = PD_FLOOR) -> LocalOperator:
    return herm_fn(Q, np.log, pd_floor=pd_floor, require_pd=True)


def herm_inv(Q: LocalOperator, pd_floor: float = PD_FLOOR) -> LocalOperator:
    return herm_fn(Q, lambda w: 1.0 / w, pd_floor=pd_floor, require_pd=True)


def op_norm(Q: LocalOperator | np.ndarray) -> float:
    m = Q.matrix if isinstance(Q, LocalOperator) else np.asarray(Q)
    return float(np.linalg.norm(m, 2))


def trace_norm(Q: LocalOperator | np.ndarray) -> float:
    m = Q.matrix if isinstance(Q, LocalOperator) else np.asarray(Q)
    return float(np.sum(np.linalg.svd(m, compute_uv=False)))


@dataclass
class DensityMatrix:
    """State with validated trace/hermiticity and a cached eigendecomposition."""

    op: LocalOperator
    _eig: tuple | None = field(default=None, repr=False)

    def __post_init__(self):
        if not self.op.is_hermitian():
            raise ValueError("density matrix not Hermitian")
        tr = trace(self.op)
        if abs(tr - 1.0) > 1e-10:
            raise ValueError(f"density matrix trace {tr} != 1")
        if self.eigvals().min() < -1e-12:
            raise ValueError(f"negative eigenvalue {self.eigvals().min():.3e}")

    def eig(self):
        if self._eig is None:
            w, U = np.linalg.eigh(self.op.matrix)
            self._eig = (w, U)
        return self._eig

    def eigvals(self) -> np.ndarray:
        return self.eig()[0]

    @property
    def support(self) -> Region:
        return self.op.support

    @property
    def matrix(self) -> np.ndarray:
        return self.op.matrix


# Pauli matrices, ubiquitous in the test models
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def pauli_on(kind: str, site, Y: Region) -> LocalOperator:
    """Single-site Pauli embedded into Y."""
    mats = {"X": PAULI_X, "Y": PAULI_Y, "Z": PAULI_Z}
    site = (site,) if isinstance(site, int) else tuple(site)
    single = LocalOperator(Region((site,), Y.lattice_dim), mats[kind], 2)
    return embed(single, Y)


def random_hermitian(rng: np.random.Generator, dim: int, scale: float = 1.0) -> np.ndarray:
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    h = (g + g.conj().T) / 2.0
    return scale * h / max(np.linalg.norm(h, 2), 1e-30)
