"""Triangle qubit encoding, second-order Schrieffer-Wolff effective
Hamiltonians, and the compilers from XZ targets to hard-core fermion
instances.

Two flavors share one graph construction:

``fis``
    ``H = Delta * sum_q H0_q + sqrt(Delta) * sum_ij sqrt(mu_ij) V_main(ij)``
    with ``H0_q = I + (triangle hops)``. Simulates
    ``sum_ij 4/9 mu_ij (X_i X_j + Z_i Z_j)`` up to ``-10/9 mu_ij`` per edge.
``laplacian``
    ``H_Lap`` with vertex weights ``sqrt(Delta)`` on qubit modes and
    ``sqrt(mu_ij)`` on the mediators of pair ``ij``. Simulates
    ``sum_ij 3/8 mu_ij (X_i X_j + Z_i Z_j)`` up to ``+3/4 mu_ij`` per edge.

Encoded basis order is ``|00>, |01>, |10>, |11>``, qubit ``i`` first.
"""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, NamedTuple

import numpy as np
import scipy.sparse as sp
from scipy.linalg import null_space

from .errors import NumericalError, ParseError, PreconditionError, TargetError, UnsupportedCouplingError
from .fock import FockBasis, apply_creation, enumerate_basis
from .graph import ConstraintGraph, GadgetLayout, build_gadget_graph, mediator_edges, triangle_edges
from .operators import (
    SEED,
    PauliSum,
    SparseHermitian,
    hopping_triplets,
    lowest_eigenpairs,
    pauli_decompose,
    place,
    projector_diagonal,
)

FLAVORS = ("fis", "laplacian")
TARGET_SCALE = {"fis": 4 / 9, "laplacian": 3 / 8}
# identity part of the effective interaction per unit coupling
EDGE_OFFSET = {"fis": -10 / 9, "laplacian": -7 / 12 + 4 / 3}

KERNEL_TOL = 1e-10
GAP_TOL = 1e-10

_R3 = math.sqrt(3.0)


def _check_flavor(flavor: str) -> None:
    if flavor not in FLAVORS:
        raise ParseError(f"unknown flavor {flavor!r}; expected one of {FLAVORS}")


# Encoding -------------------------------------------------------------------


@dataclass(frozen=True)
class EncodedQubit:
    """Single-particle amplitudes on the triangle modes ``(q1, q2, q3)``."""

    s0: np.ndarray
    s1: np.ndarray
    s2: np.ndarray

    @property
    def logical(self) -> tuple[np.ndarray, np.ndarray]:
        return self.s0, self.s1


def encode_qubit() -> EncodedQubit:
    c = 1 / (2 * _R3)
    s0 = c * np.array([-2.0, 1 + _R3, 1 - _R3])
    s1 = c * np.array([-2.0, 1 - _R3, 1 + _R3])
    s2 = np.ones(3) / _R3
    return EncodedQubit(s0, s1, s2)


def encoded_states(basis: FockBasis, layout: GadgetLayout) -> np.ndarray:
    """Columns ``S_{0,b0} S_{1,b1} ... |vac>`` over ``basis`` for every
    bitstring ``b0 b1 ...`` (qubit 0 most significant), mediators empty."""
    n = layout.n_qubits
    if basis.k != n:
        raise PreconditionError(f"encoded states live in the {n}-particle sector, basis has k={basis.k}")
    enc = encode_qubit().logical
    out = np.zeros((basis.dim, 2**n))
    for col in range(2**n):
        bits = [(col >> (n - 1 - q)) & 1 for q in range(n)]
        # expand the product of creation operators, rightmost (last qubit) first
        amps = {0: 1.0}
        for q in reversed(range(n)):
            coeffs = enc[bits[q]]
            nxt: dict[int, float] = {}
            for state, amp in amps.items():
                for pos, mode in enumerate(layout.qubit_modes[q]):
                    res = apply_creation(state, mode)
                    if res is None:
                        continue
                    s, sign = res
                    nxt[s] = nxt.get(s, 0.0) + sign * amp * coeffs[pos]
            amps = nxt
        for s, amp in amps.items():
            out[basis.index[s], col] += amp
    return out


# Operator pieces ------------------------------------------------------------

MEDIATOR_PARTS = ("v1p", "v1", "v2", "vmain")


def mediator_hop_edges(layout: GadgetLayout, pair, part: str = "vmain") -> list[tuple[int, int]]:
    """Hop edges of ``V_1'``, ``V_1``, ``V_2`` or ``V_main`` for a coupled pair."""
    i, j = sorted(pair)
    med = layout.mediator_modes[(i, j)]
    i2x, i3y, j2x, j3y, i1z, j1z = mediator_edges(layout.qubit_modes[i], layout.qubit_modes[j], med)
    parts = {
        "v1p": [i2x],
        "v1": [i2x, j2x, i3y, j3y],
        "v2": [i1z, j1z],
        "vmain": [i2x, j2x, i3y, j3y, i1z, j1z],
    }
    if part not in parts:
        raise ValueError(f"unknown perturbation part {part!r}")
    return parts[part]


def _unit_hops(graph: ConstraintGraph, basis: FockBasis, edges) -> SparseHermitian:
    weighted = [(tuple(sorted(e)), 1.0) for e in edges]
    for e, _ in weighted:
        if not graph.has_edge(*e):
            raise ParseError(f"hop {e} is not a constraint edge")
    return SparseHermitian.from_triplets(basis.dim, *hopping_triplets(basis, weighted))


def _diag(values) -> SparseHermitian:
    return SparseHermitian._canonical(sp.diags(np.asarray(values, float), format="csr"))


def _gadget_basis(layout: GadgetLayout, basis: FockBasis | None) -> FockBasis:
    if basis is None:
        return enumerate_basis(build_gadget_graph(layout), layout.n_qubits)
    return basis


def build_unperturbed(layout: GadgetLayout, flavor: str, basis: FockBasis | None = None) -> SparseHermitian:
    """``sum_q H0_q`` with unit weights.

    ``fis``: triangle hops plus one identity per qubit. ``laplacian``:
    triangle hops plus ``P_m`` for every qubit mode, where ``P_m`` includes
    the mediator neighbours.
    """
    _check_flavor(flavor)
    basis = _gadget_basis(layout, basis)
    graph = basis.graph
    edges = [e for t in layout.qubit_modes for e in triangle_edges(t)]
    h0 = _unit_hops(graph, basis, edges)
    if flavor == "fis":
        return h0 + layout.n_qubits * SparseHermitian.identity(basis.dim)
    diag = sum(projector_diagonal(graph, m, basis) for t in layout.qubit_modes for m in t)
    return h0 + _diag(diag)


def build_perturbation(layout: GadgetLayout, pair, flavor: str, basis: FockBasis | None = None, part: str = "vmain"):
    """``(V_main, V_extra)`` for one coupled pair.

    ``V_main`` holds the six mediator hops (or the ``part`` subset);
    ``V_extra`` is zero for ``fis`` and ``P_x + P_y + P_z`` for ``laplacian``.
    """
    _check_flavor(flavor)
    basis = _gadget_basis(layout, basis)
    graph = basis.graph
    v_main = _unit_hops(graph, basis, mediator_hop_edges(layout, pair, part))
    if flavor == "fis":
        return v_main, SparseHermitian.zeros(basis.dim)
    med = layout.mediator_modes[tuple(sorted(pair))]
    return v_main, _diag(sum(projector_diagonal(graph, m, basis) for m in med))


# Schrieffer-Wolff -----------------------------------------------------------


def _dense(op) -> np.ndarray:
    if isinstance(op, SparseHermitian):
        return op.toarray()
    if sp.issparse(op):
        return op.toarray()
    return np.asarray(op, float)


def _split(h0: np.ndarray, low: np.ndarray):
    resid = np.abs(h0 @ low).max() if low.size else 0.0
    if resid > KERNEL_TOL:
        raise PreconditionError(f"low-energy states are not annihilated by H0 (residual {resid:.3e})", residual=resid)
    gram = low.T @ low
    if not np.allclose(gram, np.eye(low.shape[1]), atol=1e-10):
        raise PreconditionError("low-energy states are not orthonormal")
    return null_space(low.T)


def sw_first_order(h0, v, low: np.ndarray) -> np.ndarray:
    """``(V)_{--}`` in the ``low`` basis."""
    h0, v = _dense(h0), _dense(v)
    _split(h0, low)
    return low.T @ v @ low


def _excited_resolvent(h0: np.ndarray, comp: np.ndarray) -> np.ndarray:
    hpp = comp.T @ h0 @ comp
    gap = np.linalg.eigvalsh(hpp).min() if hpp.size else np.inf
    if gap <= GAP_TOL:
        raise NumericalError(f"H0 restricted to the excited space is singular (min eigenvalue {gap:.3e})", residual=gap)
    return hpp


def sw_second_order(h0, v_main, v_extra, low: np.ndarray) -> np.ndarray:
    """``(V_extra)_{--} - (V_main)_{-+} H0^{-1} (V_main)_{+-}``.

    ``H0^{-1}`` is the inverse of ``H0`` on the orthogonal complement of
    ``low`` inside the sector.
    """
    h0, vm = _dense(h0), _dense(v_main)
    ve = np.zeros_like(h0) if v_extra is None else _dense(v_extra)
    comp = _split(h0, low)
    hpp = _excited_resolvent(h0, comp)
    up = comp.T @ vm @ low
    return low.T @ ve @ low - up.T @ np.linalg.solve(hpp, up)


def relaxed_block_residual(h0, v_main, v_extra, low: np.ndarray) -> float:
    """Max entry of ``(V_main)_{-+} H0^{-1} (V_extra)_{+-}``."""
    h0, vm, ve = _dense(h0), _dense(v_main), _dense(v_extra)
    comp = _split(h0, low)
    hpp = _excited_resolvent(h0, comp)
    m = (low.T @ vm @ comp) @ np.linalg.solve(hpp, comp.T @ ve @ low)
    return float(np.abs(m).max()) if m.size else 0.0


@dataclass
class TwoQubitGadget:
    """The canonical nine-mode gadget with its unit-weight operator pieces."""

    flavor: str
    layout: GadgetLayout = field(default_factory=lambda: GadgetLayout.standard(2, [(0, 1)]))

    @cached_property
    def basis(self) -> FockBasis:
        return enumerate_basis(build_gadget_graph(self.layout), 2)

    @cached_property
    def h0(self) -> SparseHermitian:
        return build_unperturbed(self.layout, self.flavor, self.basis)

    @cached_property
    def low(self) -> np.ndarray:
        return encoded_states(self.basis, self.layout)

    def v(self, part: str = "vmain") -> SparseHermitian:
        return build_perturbation(self.layout, (0, 1), self.flavor, self.basis, part)[0]

    @cached_property
    def v_extra(self) -> SparseHermitian:
        return build_perturbation(self.layout, (0, 1), self.flavor, self.basis)[1]

    def second_order(self, part: str = "vmain", with_extra: bool = False) -> np.ndarray:
        return sw_second_order(self.h0, self.v(part), self.v_extra if with_extra else None, self.low)

    def first_order(self, op) -> np.ndarray:
        return sw_first_order(self.h0, op, self.low)


def effective_matrix(flavor: str, which: str) -> np.ndarray:
    """Effective 4x4 matrix of one gadget piece.

    ``v1p``/``v1``/``v2``/``vmain``: ``-(V)_{-+} H0^{-1} (V)_{+-}``;
    ``vextra``: ``(V_extra)_{--}``.
    """
    _check_flavor(flavor)
    gadget = TwoQubitGadget(flavor)
    if which == "vextra":
        return gadget.first_order(gadget.v_extra)
    if which not in MEDIATOR_PARTS:
        raise ParseError(f"unknown effective-matrix selector {which!r}")
    return gadget.second_order(which)


# Targets and compilation ----------------------------------------------------


def xz_target(n_qubits: int, couplings: Mapping[tuple[int, int], float], flavor: str) -> PauliSum:
    """``sum_ij scale * mu_ij (X_i X_j + Z_i Z_j)`` with the flavor's scale."""
    _check_flavor(flavor)
    c = TARGET_SCALE[flavor]
    coeffs: dict[str, float] = {}
    for (i, j), mu in couplings.items():
        if mu == 0:
            continue
        for p in "XZ":
            w = place(n_qubits, {i: p, j: p})
            coeffs[w] = coeffs.get(w, 0.0) + c * mu
    return PauliSum.from_dict(n_qubits, coeffs)


def target_couplings(target: PauliSum, flavor: str) -> dict[tuple[int, int], float]:
    """Read ``mu_ij`` back from a target of the form ``scale * mu (XX + ZZ)``."""
    _check_flavor(flavor)
    xx: dict[tuple[int, int], float] = {}
    zz: dict[tuple[int, int], float] = {}
    for c, w in target.terms:
        support = [(q, p) for q, p in enumerate(w) if p != "I"]
        letters = {p for _, p in support}
        if len(support) != 2 or len(letters) != 1 or "Y" in letters:
            raise TargetError(f"term {w} is not an XX or ZZ pair interaction")
        key = (support[0][0], support[1][0])
        (xx if letters == {"X"} else zz)[key] = c
    out = {}
    for key in sorted(set(xx) | set(zz)):
        cx, cz = xx.get(key, 0.0), zz.get(key, 0.0)
        if not math.isclose(cx, cz, rel_tol=1e-12, abs_tol=1e-15):
            raise TargetError(f"pair {key} has XX coefficient {cx} but ZZ coefficient {cz}")
        mu = cx / TARGET_SCALE[flavor]
        if mu < 0:
            raise UnsupportedCouplingError(f"pair {key} has negative coupling {mu}")
        out[key] = mu
    return out


class Term(NamedTuple):
    kind: str  # "hop", "projector" or "identity"
    modes: tuple[int, ...]
    coeff: float


@dataclass(frozen=True)
class GadgetInstance:
    """A compiled gadget.

    ``graph.vertex_weights`` holds the per-mode weight factors
    (``sqrt(Delta)`` on qubit modes, ``sqrt(mu_ij)`` on mediators) and
    ``graph.hopping_weights`` the hop coefficients. ``offset`` is the
    identity part of the effective interaction, so the ground energy of
    the instance approximates ``lambda_min(target) + offset``.
    """

    graph: ConstraintGraph
    layout: GadgetLayout
    k: int
    terms: tuple[Term, ...]
    delta: float
    offset: float
    flavor: str
    couplings: Mapping[tuple[int, int], float]

    @cached_property
    def basis(self) -> FockBasis:
        return enumerate_basis(self.graph, self.k)

    def hamiltonian(self, basis: FockBasis | None = None) -> SparseHermitian:
        basis = self.basis if basis is None else basis
        hops = [((t.modes[0], t.modes[1]), t.coeff) for t in self.terms if t.kind == "hop"]
        out = SparseHermitian.from_triplets(basis.dim, *hopping_triplets(basis, hops))
        diag = np.zeros(basis.dim)
        for t in self.terms:
            if t.kind == "projector":
                diag += t.coeff * projector_diagonal(self.graph, t.modes[0], basis)
            elif t.kind == "identity":
                diag += t.coeff
        return out + _diag(diag)

    def encoded_states(self) -> np.ndarray:
        return encoded_states(self.basis, self.layout)

    def to_dict(self) -> dict:
        return {
            "flavor": self.flavor,
            "delta": self.delta,
            "k": self.k,
            "offset": self.offset,
            "graph": self.graph.to_dict(),
            "layout": self.layout.to_dict(),
            "couplings": [[i, j, mu] for (i, j), mu in sorted(self.couplings.items())],
            "terms": [{"kind": t.kind, "modes": list(t.modes), "coeff": t.coeff} for t in self.terms],
        }

    @classmethod
    def from_dict(cls, doc: Mapping) -> "GadgetInstance":
        try:
            return cls(
                graph=ConstraintGraph.from_dict(doc["graph"]),
                layout=GadgetLayout.from_dict(doc["layout"]),
                k=int(doc["k"]),
                terms=tuple(Term(t["kind"], tuple(t["modes"]), float(t["coeff"])) for t in doc["terms"]),
                delta=float(doc["delta"]),
                offset=float(doc["offset"]),
                flavor=str(doc["flavor"]),
                couplings={(int(i), int(j)): float(mu) for i, j, mu in doc["couplings"]},
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(f"invalid gadget instance document: {exc}") from None


def compile_couplings(n_qubits: int, couplings: Mapping[tuple[int, int], float], delta: float, flavor: str) -> GadgetInstance:
    """Compile ``{(i, j): mu_ij}`` into a gadget instance at strength ``delta``."""
    _check_flavor(flavor)
    if not delta > 0:
        raise ParseError("interaction strength delta must be positive")
    norm = {}
    for (i, j), mu in couplings.items():
        if mu < 0:
            raise UnsupportedCouplingError(f"pair ({i}, {j}) has negative coupling {mu}")
        if i == j or not (0 <= i < n_qubits and 0 <= j < n_qubits):
            raise TargetError(f"pair ({i}, {j}) is not a pair of distinct qubits in [0, {n_qubits})")
        if mu > 0:
            norm[tuple(sorted((i, j)))] = float(mu)
    layout = GadgetLayout.standard(n_qubits, sorted(norm))
    skeleton = build_gadget_graph(layout)

    root_delta = math.sqrt(delta)
    weights = [0.0] * skeleton.n_modes
    for t in layout.qubit_modes:
        for m in t:
            weights[m] = root_delta
    for key, med in layout.mediator_modes.items():
        for m in med:
            weights[m] = math.sqrt(norm[key])

    hops: dict[tuple[int, int], float] = {}
    for t in layout.qubit_modes:
        for e in triangle_edges(t):
            hops[e] = delta if flavor == "fis" else weights[e[0]] * weights[e[1]]
    for key, med in layout.mediator_modes.items():
        for e in mediator_edges(layout.qubit_modes[key[0]], layout.qubit_modes[key[1]], med):
            hops[tuple(sorted(e))] = weights[e[0]] * weights[e[1]]

    terms = [Term("hop", e, w) for e, w in sorted(hops.items())]
    if flavor == "fis":
        terms.append(Term("identity", (), delta * n_qubits))
    else:
        terms += [Term("projector", (m,), weights[m] ** 2) for m in range(skeleton.n_modes)]
    graph = skeleton.with_weights(vertex_weights=weights, hopping_weights=hops)
    offset = sum(EDGE_OFFSET[flavor] * mu for mu in norm.values())
    return GadgetInstance(graph, layout, n_qubits, tuple(terms), float(delta), offset, flavor, norm)


def compile_target(target: PauliSum, delta: float, flavor: str) -> GadgetInstance:
    """Compile an XZ target ``sum scale * mu_ij (X_i X_j + Z_i Z_j)``."""
    return compile_couplings(target.n_qubits, target_couplings(target, flavor), delta, flavor)


def factorization_audit(instance: GadgetInstance) -> list[str]:
    """Hop coefficients that are not the product of their endpoint mode
    weights. An empty list means the instance passes."""
    u = instance.graph.vertex_weights
    bad = []
    for t in instance.terms:
        if t.kind != "hop":
            continue
        a, b = t.modes
        prod = u[a] * u[b]
        if t.coeff != prod and not math.isclose(t.coeff, prod, rel_tol=1e-12, abs_tol=0.0):
            bad.append(f"hop {t.modes}: coefficient {t.coeff!r} != {u[a]!r} * {u[b]!r}")
        if instance.graph.hopping(a, b) != t.coeff:
            bad.append(f"hop {t.modes}: graph weight disagrees with term list")
    return bad


# Verification ---------------------------------------------------------------


@dataclass(frozen=True)
class SimulationPoint:
    delta: float
    lambda_sim: float
    lambda_target: float
    offset: float
    error: float
    ground_overlap: float


@dataclass(frozen=True)
class SimulationReport:
    flavor: str
    n_qubits: int
    dim: int
    points: tuple[SimulationPoint, ...]
    exponent: float | None

    @property
    def errors(self) -> list[float]:
        return [p.error for p in self.points]

    def to_dict(self) -> dict:
        return {
            "flavor": self.flavor,
            "n_qubits": self.n_qubits,
            "dim": self.dim,
            "exponent": self.exponent,
            "points": [p.__dict__.copy() for p in self.points],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["delta", "lambda_sim", "lambda_target", "offset", "error", "ground_overlap"])
        for p in self.points:
            w.writerow([f"{x:.17g}" for x in (p.delta, p.lambda_sim, p.lambda_target, p.offset, p.error, p.ground_overlap)])
        return buf.getvalue()


def target_ground_energy(target: PauliSum) -> float:
    if not target.terms:
        return 0.0
    return float(np.linalg.eigvalsh(target.to_matrix()).min())


NOISE_FLOOR = 1e-13


def fit_exponent(deltas: Iterable[float], errors: Iterable[float]) -> float | None:
    """Least-squares slope of ``log(error)`` against ``log(delta)``.

    ``None`` when any error sits at the rounding floor
    (``NOISE_FLOOR * delta``), where a slope would only fit noise.
    """
    d, e = np.asarray(list(deltas), float), np.asarray(list(errors), float)
    if len(d) < 2 or np.any(e <= NOISE_FLOOR * d):
        return None
    return float(np.polyfit(np.log(d), np.log(e), 1)[0])


def _thread_count() -> int:
    env = os.environ.get("HARDCORE_THREADS")
    try:
        return max(1, int(env)) if env else 1
    except ValueError:
        return 1


def verify_simulation(
    target: PauliSum,
    deltas: Iterable[float],
    flavor: str,
    method: str = "auto",
    seed: int = SEED,
) -> SimulationReport:
    """Compile ``target`` at every ``delta`` and compare offset-corrected
    ground energies in the ``k = n_qubits`` sector."""
    deltas = [float(d) for d in deltas]
    if len(deltas) < 3:
        raise ParseError("need at least three delta values")
    if any(b <= a for a, b in zip(deltas, deltas[1:])):
        raise ParseError("delta values must be strictly increasing")
    couplings = target_couplings(target, flavor)
    lam_target = target_ground_energy(target)

    def point(delta):
        inst = compile_couplings(target.n_qubits, couplings, delta, flavor)
        vals, vecs = lowest_eigenpairs(inst.hamiltonian(), 1, method=method, seed=seed)
        lam = float(vals[0])
        overlap = float(np.linalg.norm(inst.encoded_states().T @ vecs[:, 0]))
        err = abs(lam - inst.offset - lam_target)
        return SimulationPoint(delta, lam, lam_target, inst.offset, err, overlap), inst.basis.dim

    workers = min(_thread_count(), len(deltas))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(point, deltas))
    else:
        results = [point(d) for d in deltas]
    points = tuple(r[0] for r in results)
    return SimulationReport(
        flavor=flavor,
        n_qubits=target.n_qubits,
        dim=results[0][1],
        points=points,
        exponent=fit_exponent(deltas, [p.error for p in points]),
    )
