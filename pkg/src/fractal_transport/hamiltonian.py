"""Sparse symmetric operators on a lattice.

Two operators are assembled from the same bond list:

* the tight-binding frequency operator ``H/hbar`` with hopping ``-J`` on fractal
  bonds, ``-gamma*J`` on complement bonds and zero on-site terms;
* the classical random-walk generator with ``-J`` on every bond and the site
  degree times ``J`` on the diagonal, so that every row sums to zero.

Operators are stored as an upper-triangle coordinate list (``row <= col``)
sorted by ``(row, col)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import DomainError
from .lattice import CouplingClass


@dataclass(frozen=True)
class CouplingConfig:
    """Hopping strength ``J`` and the complement-to-fractal ratio ``gamma = J'/J``."""

    J: float = 1.0
    gamma: float = 1.0

    def __post_init__(self):
        if not np.isfinite(self.J) or self.J <= 0:
            raise DomainError(f"J must be positive, got {self.J}")
        if not 0.0 <= self.gamma <= 1.0:
            raise DomainError(f"gamma must lie in [0, 1], got {self.gamma}")


@dataclass(frozen=True, eq=False)
class SymmetricOperator:
    """Real symmetric ``dim x dim`` matrix stored as its upper triangle."""

    dim: int
    rows: np.ndarray = field(repr=False)
    cols: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        if np.any(self.rows > self.cols):
            raise DomainError("entries must satisfy row <= col")
        if not np.all(np.isfinite(self.values)):
            raise DomainError("non-finite operator entry")
        for arr in (self.rows, self.cols, self.values):
            arr.setflags(write=False)

    @classmethod
    def from_triplets(cls, dim, rows, cols, values):
        """Build from arbitrary ``(i, j, v)`` triplets of the upper triangle.

        Duplicates are summed, explicit zeros dropped and the result sorted.
        """
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        values = np.asarray(values, dtype=float)
        lo, hi = np.minimum(rows, cols), np.maximum(rows, cols)
        coo = sp.coo_matrix((values, (lo, hi)), shape=(dim, dim)).tocsr()
        coo.sum_duplicates()
        coo.eliminate_zeros()
        coo = coo.tocoo()
        order = np.lexsort((coo.col, coo.row))
        return cls(int(dim), coo.row[order].astype(np.int64), coo.col[order].astype(np.int64),
                   coo.data[order].astype(float))

    @property
    def nnz_stored(self):
        return len(self.values)

    def to_sparse(self):
        """Full symmetric CSR matrix."""
        off = self.rows != self.cols
        r = np.r_[self.rows, self.cols[off]]
        c = np.r_[self.cols, self.rows[off]]
        v = np.r_[self.values, self.values[off]]
        return sp.csr_matrix((v, (r, c)), shape=(self.dim, self.dim))

    def to_dense(self):
        return self.to_sparse().toarray()

    def matvec(self, x):
        return self.to_sparse() @ x

    def diagonal(self):
        d = np.zeros(self.dim)
        on = self.rows == self.cols
        d[self.rows[on]] = self.values[on]
        return d

    def trace(self):
        return float(self.diagonal().sum())

    def row_sums(self):
        return np.asarray(self.to_sparse().sum(axis=1)).ravel()

    def __eq__(self, other):
        if not isinstance(other, SymmetricOperator):
            return NotImplemented
        return (
            self.dim == other.dim
            and np.array_equal(self.rows, other.rows)
            and np.array_equal(self.cols, other.cols)
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None


def assemble_quantum(lattice, config=None):
    """Tight-binding ``H/hbar`` in units where hopping on fractal bonds is ``J``.

    Complement bonds (present only in interpolating lattices) carry ``-gamma*J``;
    with ``gamma = 0`` they are dropped altogether.  On-site terms are zero.
    """
    config = config or CouplingConfig()
    comp = lattice.edge_classes == CouplingClass.COMPLEMENT
    hop = np.where(comp, -config.gamma * config.J, -config.J)
    return SymmetricOperator.from_triplets(
        lattice.n_sites, lattice.edges[:, 0], lattice.edges[:, 1], hop
    )


def assemble_ctrw_generator(lattice, J=1.0):
    """Classical master-equation generator: ``-J`` per bond, ``deg(i)*J`` on the diagonal."""
    if J <= 0:
        raise DomainError(f"J must be positive, got {J}")
    n = lattice.n_sites
    diag = np.arange(n)
    rows = np.r_[lattice.edges[:, 0], diag]
    cols = np.r_[lattice.edges[:, 1], diag]
    vals = np.r_[np.full(lattice.n_edges, -J), J * lattice.degrees().astype(float)]
    return SymmetricOperator.from_triplets(n, rows, cols, vals)
