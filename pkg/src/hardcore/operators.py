"""Sparse real-symmetric operators over Fock bases, Pauli decompositions and
extremal eigenvalues."""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import reduce
from itertools import product

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import ArpackError, ArpackNoConvergence, eigsh

from .errors import ConsistencyError, NumericalError, ParseError
from .fock import FockBasis, apply_hop
from .graph import ConstraintGraph

DENSE_LIMIT = 4096
SEED = 0x5EED


@dataclass(frozen=True)
class SparseHermitian:
    """Real symmetric matrix stored as a canonical CSR matrix.

    The upper triangle (``row <= col``) is the canonical entry list, see
    :meth:`entries`.
    """

    matrix: sp.csr_matrix

    def __post_init__(self):
        m = self.matrix
        if m.shape[0] != m.shape[1]:
            raise ValueError("operator must be square")
        if np.iscomplexobj(m.data):
            raise ValueError("operator must be real")

    @classmethod
    def from_triplets(cls, dim: int, rows, cols, vals) -> "SparseHermitian":
        # duplicates are summed by the COO -> CSR conversion
        m = sp.coo_matrix((np.asarray(vals, float), (np.asarray(rows, int), np.asarray(cols, int))), shape=(dim, dim))
        m = m.tocsr()
        m.sum_duplicates()
        m.eliminate_zeros()
        m.sort_indices()
        return cls(m)

    @classmethod
    def from_dense(cls, a) -> "SparseHermitian":
        a = np.asarray(a, float)
        if not np.allclose(a, a.T, atol=1e-12, rtol=0):
            raise ValueError("dense input is not symmetric")
        return cls._canonical(sp.csr_matrix(a))

    @classmethod
    def identity(cls, dim: int) -> "SparseHermitian":
        return cls._canonical(sp.identity(dim, format="csr"))

    @classmethod
    def zeros(cls, dim: int) -> "SparseHermitian":
        return cls(sp.csr_matrix((dim, dim)))

    @classmethod
    def _canonical(cls, m) -> "SparseHermitian":
        m = sp.csr_matrix(m, dtype=float)
        m.sum_duplicates()
        m.eliminate_zeros()
        m.sort_indices()
        return cls(m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()

    def entries(self) -> list[tuple[int, int, float]]:
        up = sp.triu(self.matrix).tocoo()
        order = np.lexsort((up.col, up.row))
        return [(int(up.row[n]), int(up.col[n]), float(up.data[n])) for n in order]

    def is_symmetric(self, atol: float = 0.0) -> bool:
        diff = self.matrix - self.matrix.T
        return diff.nnz == 0 or float(abs(diff).max()) <= atol

    def __add__(self, other):
        return SparseHermitian._canonical(self.matrix + other.matrix)

    def __sub__(self, other):
        return SparseHermitian._canonical(self.matrix - other.matrix)

    def __mul__(self, c: float):
        return SparseHermitian._canonical(self.matrix * float(c))

    __rmul__ = __mul__

    def __matmul__(self, v):
        return self.matrix @ v

    def to_coo_text(self) -> str:
        lines = [str(self.dim)]
        lines += [f"{r} {c} {v:.17g}" for r, c, v in self.entries()]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_coo_text(cls, text: str) -> "SparseHermitian":
        rows = [ln.split() for ln in text.strip().splitlines()]
        try:
            dim = int(rows[0][0])
            r, c, v = [], [], []
            for n, parts in enumerate(rows[1:], start=2):
                if len(parts) != 3:
                    raise ParseError(f"line {n}: expected 'row col value'")
                a, b, x = int(parts[0]), int(parts[1]), float(parts[2])
                if a > b:
                    raise ParseError(f"line {n}: entries must satisfy row <= col")
                r.append(a)
                c.append(b)
                v.append(x)
        except (IndexError, ValueError) as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(f"malformed coordinate list: {exc}") from None
        up = sp.coo_matrix((v, (r, c)), shape=(dim, dim)).tocsr()
        full = up + sp.triu(up, k=1).T
        return cls._canonical(full)


def _check_basis(graph: ConstraintGraph, basis: FockBasis) -> None:
    if not graph.same_constraints(basis.graph):
        raise ConsistencyError("basis was enumerated on a graph with different modes or constraints")


def hopping_triplets(basis: FockBasis, weighted_edges):
    """Row/col/value arrays of ``sum w (a†_a a_b + a†_b a_a)`` over ``basis``.

    Endpoints that leave the basis are dropped.
    """
    index = basis.index
    rows, cols, vals = [], [], []
    for col, t in enumerate(basis.states):
        for (a, b), w in weighted_edges:
            if w == 0.0:
                continue
            for src, dst in ((a, b), (b, a)):
                out = apply_hop(t, src, dst)
                if out is None:
                    continue
                s, sign = out
                row = index.get(s)
                if row is not None:
                    rows.append(row)
                    cols.append(col)
                    vals.append(w * sign)
    return rows, cols, vals


def assemble_hopping(graph: ConstraintGraph, basis: FockBasis, edges=None) -> SparseHermitian:
    """``sum_{ij in E} w_ij (a†_i a_j + a†_j a_i)`` restricted to the basis.

    ``edges`` optionally restricts the sum to a subset of graph edges.
    """
    _check_basis(graph, basis)
    chosen = graph.edges if edges is None else [tuple(sorted(e)) for e in edges]
    weighted = [(e, graph.hopping(*e)) for e in chosen]
    return SparseHermitian.from_triplets(basis.dim, *hopping_triplets(basis, weighted))


def projector_diagonal(graph: ConstraintGraph, i: int, basis: FockBasis) -> np.ndarray:
    if not 0 <= i < graph.n_modes:
        raise IndexError(f"mode {i} out of range")
    nm = graph.neighbor_masks[i]
    return np.array([0.0 if s & nm else 1.0 for s in basis.states])


def assemble_projector_term(graph: ConstraintGraph, i: int, basis: FockBasis) -> SparseHermitian:
    """Diagonal ``P_i = prod_{j ~ i} (1 - n_j)``."""
    _check_basis(graph, basis)
    return SparseHermitian._canonical(sp.diags(projector_diagonal(graph, i, basis), format="csr"))


def assemble_number_weighted(graph: ConstraintGraph, basis: FockBasis) -> SparseHermitian:
    """Diagonal ``sum_i c_i n_i`` with ``c_i`` the vertex weights."""
    _check_basis(graph, basis)
    w = graph.vertex_weights
    diag = [sum(w[i] for i in range(graph.n_modes) if s >> i & 1) for s in basis.states]
    return SparseHermitian._canonical(sp.diags(np.asarray(diag, float), format="csr"))


# Eigensolvers --------------------------------------------------------------


def lowest_eigenpairs(op: SparseHermitian, count: int = 1, method: str = "auto", seed: int = SEED, tol: float = 0.0):
    """Smallest ``count`` eigenvalues (ascending) and eigenvectors (columns)."""
    n = op.dim
    if n < 1:
        raise ValueError("operator has empty dimension")
    if method not in ("auto", "dense", "iterative"):
        raise ValueError(f"unknown eigensolver method {method!r}")
    if not np.all(np.isfinite(op.matrix.data)):
        raise NumericalError("operator has non-finite entries")
    count = min(count, n)
    dense = method == "dense" or (method == "auto" and n <= DENSE_LIMIT) or n <= count + 1
    if dense:
        vals, vecs = np.linalg.eigh(op.toarray())
        if not np.all(np.isfinite(vals)):
            raise NumericalError("eigensolver returned non-finite eigenvalues")
        return vals[:count], vecs[:, :count]
    if op.matrix.nnz == 0:
        # Krylov methods stall on the zero operator (A v0 = 0)
        return np.zeros(count), np.eye(n, count)
    v0 = np.random.default_rng(seed).standard_normal(n)
    try:
        vals, vecs = eigsh(op.matrix, k=count, which="SA", v0=v0, maxiter=10 * n, tol=tol)
    except ArpackNoConvergence as exc:
        res = np.nan
        if len(exc.eigenvalues):
            x = exc.eigenvectors[:, 0]
            res = float(np.linalg.norm(op.matrix @ x - exc.eigenvalues[0] * x))
        raise NumericalError(f"Lanczos did not converge within {10 * n} iterations (residual {res:.3e})", residual=res) from None
    except ArpackError as exc:
        raise NumericalError(f"Lanczos failed: {exc}") from None
    if not np.all(np.isfinite(vals)):
        raise NumericalError("eigensolver returned non-finite eigenvalues")
    order = np.argsort(vals)
    return vals[order], vecs[:, order]


def min_eigenvalue(op: SparseHermitian, method: str = "auto", seed: int = SEED) -> float:
    """Smallest eigenvalue; dense ``eigh`` up to 4096 rows, seeded Lanczos above."""
    vals, _ = lowest_eigenpairs(op, 1, method=method, seed=seed)
    return float(vals[0])


def spectrum(op: SparseHermitian) -> np.ndarray:
    return np.linalg.eigvalsh(op.toarray())


# Pauli algebra -------------------------------------------------------------

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli_matrix(word: str) -> np.ndarray:
    """Kronecker product with ``word[0]`` acting on the most significant qubit."""
    return reduce(np.kron, (PAULI[c] for c in word), np.eye(1, dtype=complex))


@dataclass(frozen=True)
class PauliSum:
    """Real-coefficient sum of Pauli words, one entry per distinct word."""

    n_qubits: int
    terms: tuple[tuple[float, str], ...]

    def __post_init__(self):
        words = [w for _, w in self.terms]
        if len(set(words)) != len(words):
            raise ValueError("duplicate Pauli words")
        for c, w in self.terms:
            if len(w) != self.n_qubits or set(w) - set("IXYZ"):
                raise ValueError(f"bad Pauli word {w!r} for {self.n_qubits} qubits")
            if not np.isfinite(c):
                raise ValueError("non-finite coefficient")

    @classmethod
    def from_dict(cls, n_qubits: int, coeffs: dict[str, float]) -> "PauliSum":
        return cls(n_qubits, tuple((float(c), w) for w, c in sorted(coeffs.items()) if c != 0))

    def as_dict(self) -> dict[str, float]:
        return {w: c for c, w in self.terms}

    def coeff(self, word: str) -> float:
        return self.as_dict().get(word, 0.0)

    def to_matrix(self) -> np.ndarray:
        dim = 2**self.n_qubits
        out = np.zeros((dim, dim), dtype=complex)
        for c, w in self.terms:
            out += c * pauli_matrix(w)
        return out

    def to_json(self) -> str:
        return json.dumps([{"coeff": c, "word": w} for c, w in self.terms])

    @classmethod
    def from_json(cls, text: str) -> "PauliSum":
        try:
            items = json.loads(text)
            terms = tuple((float(t["coeff"]), str(t["word"])) for t in items)
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise ParseError(f"invalid PauliSum document: {exc}") from None
        if not terms:
            raise ParseError("cannot infer n_qubits from an empty PauliSum")
        return cls(len(terms[0][1]), terms)

    def is_xz(self) -> bool:
        """Non-identity words use only X/Z and touch at most two qubits."""
        for _, w in self.terms:
            support = [c for c in w if c != "I"]
            if "Y" in support or len(support) > 2:
                return False
        return True


def pauli_decompose(m, tol: float = 1e-12) -> PauliSum:
    """Coefficients ``Tr(m W) / 2**n`` for every Pauli word ``W``.

    Words with ``|c| < tol`` are dropped. Hermitian input gives real
    coefficients, so the imaginary parts (rounding only) are discarded.
    """
    m = np.asarray(m)
    dim = m.shape[0]
    n = dim.bit_length() - 1
    if m.shape != (dim, dim) or dim != 1 << n or dim < 2:
        raise ValueError(f"matrix dimension {m.shape} is not a power of two")
    if not np.allclose(m, m.conj().T, atol=1e-12, rtol=0):
        raise ValueError("matrix is not Hermitian")
    coeffs = {}
    for letters in product("IXYZ", repeat=n):
        w = "".join(letters)
        c = np.trace(m @ pauli_matrix(w)) / dim
        if abs(c.real) >= tol:
            coeffs[w] = float(c.real)
    return PauliSum.from_dict(n, coeffs)


def reconstruct(ps: PauliSum) -> np.ndarray:
    return ps.to_matrix()


def place(n_qubits: int, letters: dict[int, str]) -> str:
    """Pauli word with the given letters on the given qubits, identity elsewhere."""
    w = ["I"] * n_qubits
    for q, c in letters.items():
        w[q] = c
    return "".join(w)
