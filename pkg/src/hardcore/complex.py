"""Weighted independence complexes: boundary maps, Laplacians, Betti numbers
and the supercharge picture.

Level ``k`` holds the ``k``-vertex simplices (the ``k``-particle hard-core
sector), and level 0 holds the empty simplex, so ``C_1 -> C_0`` sends every
vertex to the vacuum. Homology is therefore *reduced*: ``betti(G, k)`` is the
reduced Betti number in topological dimension ``k - 1``. For example the
three isolated points of ``Ind(K_3)`` give ``betti(K_3, 1) == 2``.

Simplices are stored as unit vectors with the vertex weights absorbed, so a
face ``sigma - {v}`` of ``sigma`` appears in the boundary with coefficient
``(-1)**i * u_v`` where ``i`` (starting at 1) is the position of ``v`` in
``sigma``'s ascending vertex list. All adjoints are plain transposes.
"""

from __future__ import annotations

import math
from itertools import combinations

import numpy as np
import scipy.sparse as sp

from .errors import NumericalError
from .fock import FockBasis, apply_annihilation, apply_hop, enumerate_basis
from .graph import ConstraintGraph
from .operators import SparseHermitian, assemble_hopping, projector_diagonal

RANK_TOL = 1e-8


def simplex_basis(graph: ConstraintGraph, k: int) -> FockBasis:
    """``k``-vertex simplices; identical to the ``k``-particle Fock basis."""
    return enumerate_basis(graph, k)


def _empty(rows: int, cols: int) -> sp.csr_matrix:
    return sp.csr_matrix((rows, cols))


def boundary_operator(graph: ConstraintGraph, k: int) -> sp.csr_matrix:
    """Matrix of ``C_k -> C_{k-1}`` (rows: ``k-1`` simplices, cols: ``k`` simplices)."""
    if k < 1:
        raise ValueError("boundary maps start at level 1")
    if k > graph.n_modes:
        lo_dim = simplex_basis(graph, k - 1).dim if k - 1 <= graph.n_modes else 0
        return _empty(lo_dim, 0)
    hi = simplex_basis(graph, k)
    lo = simplex_basis(graph, k - 1)
    u = graph.vertex_weights
    rows, cols, vals = [], [], []
    for col, sigma in enumerate(hi.states):
        verts = [v for v in range(graph.n_modes) if sigma >> v & 1]
        for pos, v in enumerate(verts, start=1):
            rows.append(lo.index[sigma & ~(1 << v)])
            cols.append(col)
            vals.append((-1) ** pos * u[v])
    return sp.csr_matrix((vals, (rows, cols)), shape=(lo.dim, hi.dim))


def laplacian(graph: ConstraintGraph, k: int) -> SparseHermitian:
    """``Delta_k = d_k^T d_k + d_{k+1} d_{k+1}^T`` on level ``k``."""
    if k < 0 or k > graph.n_modes:
        raise ValueError(f"level {k} outside [0, {graph.n_modes}]")
    dim = simplex_basis(graph, k).dim
    total = _empty(dim, dim)
    if k >= 1:
        d = boundary_operator(graph, k)
        total = total + d.T @ d
    if k < graph.n_modes:
        d = boundary_operator(graph, k + 1)
        total = total + d @ d.T
    return SparseHermitian._canonical(total)


def supercharge(graph: ConstraintGraph, k: int) -> sp.csr_matrix:
    """``Q = sum_i u_i P_i a_i`` from the ``k``- to the ``(k-1)``-particle sector.

    Built from the fermionic annihilation rule, independently of
    :func:`boundary_operator`.
    """
    if k < 1:
        raise ValueError("the supercharge lowers particle number; k must be >= 1")
    hi = enumerate_basis(graph, k)
    lo = enumerate_basis(graph, k - 1)
    nm = graph.neighbor_masks
    u = graph.vertex_weights
    rows, cols, vals = [], [], []
    for col, s in enumerate(hi.states):
        for i in range(graph.n_modes):
            out = apply_annihilation(s, i)
            if out is None:
                continue
            t, sign = out
            if t & nm[i]:  # P_i after a_i
                continue
            rows.append(lo.index[t])
            cols.append(col)
            vals.append(u[i] * sign)
    return sp.csr_matrix((vals, (rows, cols)), shape=(lo.dim, hi.dim))


def supercharge_laplacian(graph: ConstraintGraph, k: int) -> SparseHermitian:
    """``Q^T Q + Q Q^T`` on the ``k``-particle sector."""
    dim = enumerate_basis(graph, k).dim
    total = _empty(dim, dim)
    if k >= 1:
        q = supercharge(graph, k)
        total = total + q.T @ q
    if k < graph.n_modes:
        q = supercharge(graph, k + 1)
        total = total + q @ q.T
    return SparseHermitian._canonical(total)


def _lap_diagonal(graph: ConstraintGraph, basis: FockBasis) -> np.ndarray:
    u = np.asarray(graph.vertex_weights)
    diag = np.zeros(basis.dim)
    for i in range(graph.n_modes):
        diag += u[i] ** 2 * projector_diagonal(graph, i, basis)
    return diag


def build_susy_hamiltonian(graph: ConstraintGraph, k: int, form: str = "bare") -> SparseHermitian:
    """``H_Lap`` on the hard-core ``k``-particle sector.

    ``form="bare"`` uses ``sum_{ij in E} u_i u_j (a†_i a_j + h.c.) + sum u_i^2 P_i``
    with hop endpoints outside the sector dropped; ``form="dressed"`` uses
    ``sum_{ij in E} u_i u_j P_i a†_i a_j P_j + (i <-> j) + sum u_i^2 P_i``
    with the projectors applied explicitly.
    """
    basis = enumerate_basis(graph, k)
    u = graph.vertex_weights
    if not all(math.isfinite(w * w) for w in u):
        raise NumericalError("squared vertex weights overflow")
    diag = sp.diags(_lap_diagonal(graph, basis), format="csr")
    if form == "bare":
        hop_graph = graph.with_weights(hopping_weights={(a, b): u[a] * u[b] for a, b in graph.edges})
        return assemble_hopping(hop_graph, basis) + SparseHermitian._canonical(diag)
    if form != "dressed":
        raise ValueError(f"unknown form {form!r}")
    nm = graph.neighbor_masks
    rows, cols, vals = [], [], []
    for col, t in enumerate(basis.states):
        for a, b in graph.edges:
            for src, dst in ((a, b), (b, a)):
                if t & nm[src]:  # P_src
                    continue
                out = apply_hop(t, src, dst)
                if out is None:
                    continue
                s, sign = out
                if s & nm[dst]:  # P_dst
                    continue
                rows.append(basis.index[s])
                cols.append(col)
                vals.append(u[a] * u[b] * sign)
    hop = sp.csr_matrix((vals, (rows, cols)), shape=(basis.dim, basis.dim))
    return SparseHermitian._canonical(hop + diag)


def _rank(m, tol: float = RANK_TOL) -> int:
    if min(m.shape) == 0:
        return 0
    s = np.linalg.svd(m.toarray() if sp.issparse(m) else m, compute_uv=False)
    return int(np.sum(s > tol))


def betti(graph: ConstraintGraph, k: int, tol: float = RANK_TOL) -> int:
    """Reduced Betti number at level ``k``: ``dim C_k - rank d_k - rank d_{k+1}``.

    Ranks count singular values above ``tol``.
    """
    if k < 0 or k > graph.n_modes:
        raise ValueError(f"level {k} outside [0, {graph.n_modes}]")
    dim = simplex_basis(graph, k).dim
    r_down = _rank(boundary_operator(graph, k), tol) if k >= 1 else 0
    r_up = _rank(boundary_operator(graph, k + 1), tol) if k < graph.n_modes else 0
    return dim - r_down - r_up


def laplacian_kernel_dim(graph: ConstraintGraph, k: int) -> int:
    """Kernel dimension of ``Delta_k`` from its eigenvalues (``< RANK_TOL``)."""
    lap = laplacian(graph, k)
    if lap.dim == 0:
        return 0
    return int(np.sum(np.linalg.eigvalsh(lap.toarray()) < RANK_TOL))


def clique_laplacian(graph: ConstraintGraph, k: int) -> SparseHermitian:
    """Level-``k`` Laplacian of the clique complex of ``graph``, built by
    enumerating cliques directly (no independence-set machinery)."""
    n = graph.n_modes
    u = graph.vertex_weights

    def cliques(size):
        return [c for c in combinations(range(n), size) if all(graph.has_edge(a, b) for a, b in combinations(c, 2))]

    def bnd(size):
        hi, lo = cliques(size), cliques(size - 1)
        idx = {c: r for r, c in enumerate(lo)}
        m = np.zeros((len(lo), len(hi)))
        for col, c in enumerate(hi):
            for pos, v in enumerate(c, start=1):
                m[idx[c[: pos - 1] + c[pos:]], col] = (-1) ** pos * u[v]
        return m

    dim = len(cliques(k))
    total = np.zeros((dim, dim))
    if k >= 1:
        d = bnd(k)
        total += d.T @ d
    if k < n:
        d = bnd(k + 1)
        total += d @ d.T
    return SparseHermitian._canonical(sp.csr_matrix(total))
