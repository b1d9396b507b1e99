"""Vertex-weighted constraint graphs and brute-force Independent Set oracles.

A :class:`ConstraintGraph` plays two roles at once: its edges are the
hard-core (independence) constraints, and the same edges carry the hopping
amplitudes of the fermionic Hamiltonians built on top of it. Modes are
0-based integers; the gadget labels ``i1, i2, i3`` and ``x, y, z`` only live
in :class:`GadgetLayout`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable, Mapping

from .errors import LayoutError, ParseError, SizeError

MAX_MODES = 64
MAX_IS_MODES = 24

Edge = tuple[int, int]


def _edge(a: int, b: int) -> Edge:
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class ConstraintGraph:
    """Immutable constraint graph.

    ``edges`` is kept sorted with ``a < b`` inside every pair and
    ``hopping_weights`` is aligned with it. Use :meth:`from_edges` rather
    than the raw constructor.
    """

    n_modes: int
    edges: tuple[Edge, ...]
    vertex_weights: tuple[float, ...]
    hopping_weights: tuple[float, ...]

    def __post_init__(self):
        if self.n_modes < 1:
            raise ParseError("n_modes must be positive")
        if self.n_modes > MAX_MODES:
            raise SizeError(f"{self.n_modes} modes exceeds the {MAX_MODES}-mode bitmask capacity")
        if len(self.vertex_weights) != self.n_modes:
            raise ParseError("vertex_weights must have one entry per mode")
        if len(self.hopping_weights) != len(self.edges):
            raise ParseError("hopping_weights must align with edges")
        seen = set()
        for a, b in self.edges:
            if a == b:
                raise ParseError(f"self-loop on mode {a}")
            if not (0 <= a < b < self.n_modes):
                raise ParseError(f"edge ({a}, {b}) is not a normalized pair of modes in [0, {self.n_modes})")
            if (a, b) in seen:
                raise ParseError(f"duplicate edge ({a}, {b})")
            seen.add((a, b))
        if list(self.edges) != sorted(self.edges):
            raise ParseError("edges must be sorted; build graphs with ConstraintGraph.from_edges")
        for i, u in enumerate(self.vertex_weights):
            if not (u >= 0 and math.isfinite(u)):
                raise ParseError(f"vertex weight of mode {i} must be finite and nonnegative, got {u}")
        for e, w in zip(self.edges, self.hopping_weights):
            if not math.isfinite(w):
                raise ParseError(f"hopping weight of edge {e} must be finite, got {w}")

    @classmethod
    def from_edges(
        cls,
        n_modes: int,
        edges: Iterable[Edge] = (),
        vertex_weights: Iterable[float] | None = None,
        hopping_weights: Mapping[Edge, float] | Iterable[tuple[int, int, float]] | None = None,
    ) -> "ConstraintGraph":
        """Build a graph from an unordered edge list.

        Missing vertex weights default to 1, missing hopping weights to 0.
        Hopping weights may be given as a mapping ``{(a, b): w}`` or as
        ``(a, b, w)`` triples; each must refer to an edge of the graph.
        """
        norm = set()
        for a, b in edges:
            a, b = int(a), int(b)
            if a == b:
                raise ParseError(f"self-loop on mode {a}")
            norm.add(_edge(a, b))
        ordered = tuple(sorted(norm))
        if vertex_weights is None:
            vw = (1.0,) * n_modes
        else:
            vw = tuple(float(u) for u in vertex_weights)
        hw = dict.fromkeys(ordered, 0.0)
        if hopping_weights is not None:
            items = hopping_weights.items() if isinstance(hopping_weights, Mapping) else (
                ((a, b), w) for a, b, w in hopping_weights
            )
            for (a, b), w in items:
                e = _edge(int(a), int(b))
                if e not in hw:
                    raise ParseError(f"hopping weight given for non-edge {e}")
                hw[e] = float(w)
        return cls(int(n_modes), ordered, vw, tuple(hw[e] for e in ordered))

    @cached_property
    def neighbor_masks(self) -> tuple[int, ...]:
        masks = [0] * self.n_modes
        for a, b in self.edges:
            masks[a] |= 1 << b
            masks[b] |= 1 << a
        return tuple(masks)

    @cached_property
    def _edge_index(self) -> dict[Edge, int]:
        return {e: n for n, e in enumerate(self.edges)}

    def has_edge(self, a: int, b: int) -> bool:
        return _edge(a, b) in self._edge_index

    def hopping(self, a: int, b: int) -> float:
        return self.hopping_weights[self._edge_index[_edge(a, b)]]

    def neighbors(self, i: int) -> list[int]:
        m = self.neighbor_masks[i]
        return [j for j in range(self.n_modes) if m >> j & 1]

    def degree(self, i: int) -> int:
        return self.neighbor_masks[i].bit_count()

    def is_independent(self, mask: int) -> bool:
        nm = self.neighbor_masks
        m = mask
        while m:
            low = m & -m
            i = low.bit_length() - 1
            if nm[i] & mask:
                return False
            m ^= low
        return True

    def same_constraints(self, other: "ConstraintGraph") -> bool:
        return self.n_modes == other.n_modes and self.edges == other.edges

    def with_weights(self, vertex_weights=None, hopping_weights=None) -> "ConstraintGraph":
        """Copy with replaced vertex and/or hopping weights."""
        return ConstraintGraph.from_edges(
            self.n_modes,
            self.edges,
            self.vertex_weights if vertex_weights is None else vertex_weights,
            dict(zip(self.edges, self.hopping_weights)) if hopping_weights is None else hopping_weights,
        )

    def induced(self, modes: Iterable[int]) -> "ConstraintGraph":
        """Induced subgraph, relabeled by position in ``modes``."""
        modes = list(modes)
        pos = {m: n for n, m in enumerate(modes)}
        edges = [(pos[a], pos[b]) for a, b in self.edges if a in pos and b in pos]
        hops = [(pos[a], pos[b], w) for (a, b), w in zip(self.edges, self.hopping_weights) if a in pos and b in pos]
        return ConstraintGraph.from_edges(len(modes), edges, [self.vertex_weights[m] for m in modes], hops)

    # JSON ------------------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "n_modes": self.n_modes,
            "edges": [list(e) for e in self.edges],
            "vertex_weights": list(self.vertex_weights),
            "hopping_weights": [[a, b, w] for (a, b), w in zip(self.edges, self.hopping_weights)],
        }

    @classmethod
    def from_dict(cls, doc: Mapping) -> "ConstraintGraph":
        try:
            n = doc["n_modes"]
            if not isinstance(n, int) or isinstance(n, bool):
                raise ParseError("n_modes must be an integer")
            edges = [tuple(e) for e in doc.get("edges", [])]
            if any(len(e) != 2 for e in edges):
                raise ParseError("each edge must be a pair [a, b]")
            return cls.from_edges(n, edges, doc.get("vertex_weights"), doc.get("hopping_weights"))
        except KeyError as exc:
            raise ParseError(f"missing key {exc.args[0]!r} in graph document") from None
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(f"invalid graph document: {exc}") from None


def loads_graph(text: str) -> ConstraintGraph:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ParseError("graph document must be a JSON object")
    return ConstraintGraph.from_dict(doc)


def dumps_graph(graph: ConstraintGraph) -> str:
    return json.dumps(graph.to_dict())


# Gadget layout ------------------------------------------------------------


@dataclass(frozen=True)
class GadgetLayout:
    """Mode assignment for a gadget.

    ``qubit_modes[q]`` is the ordered triple ``(q1, q2, q3)`` of logical
    qubit ``q``; ``mediator_modes[(i, j)]`` is the ``(x, y, z)`` triple that
    couples qubits ``i < j``.
    """

    qubit_modes: tuple[tuple[int, int, int], ...]
    mediator_modes: Mapping[Edge, tuple[int, int, int]] = field(default_factory=dict)

    def __post_init__(self):
        used: dict[int, str] = {}
        triples = [(f"qubit {q}", t) for q, t in enumerate(self.qubit_modes)]
        for e, t in self.mediator_modes.items():
            i, j = e
            if not (i < j) or not (0 <= i and j < len(self.qubit_modes)):
                raise LayoutError(f"mediator key {e} must be an ordered pair of known qubits")
            triples.append((f"mediator {e}", t))
        for owner, t in triples:
            if len(t) != 3:
                raise LayoutError(f"{owner} must own exactly three modes")
            for m in t:
                if m < 0:
                    raise LayoutError(f"{owner} references negative mode {m}")
                if m in used:
                    raise LayoutError(f"mode {m} shared by {used[m]} and {owner}")
                used[m] = owner

    @classmethod
    def standard(cls, n_qubits: int, pairs: Iterable[Edge] = ()) -> "GadgetLayout":
        """Qubit ``q`` on modes ``3q..3q+2``, mediators appended in pair order."""
        qubits = tuple((3 * q, 3 * q + 1, 3 * q + 2) for q in range(n_qubits))
        meds = {}
        nxt = 3 * n_qubits
        for i, j in pairs:
            e = _edge(i, j)
            if e in meds:
                raise LayoutError(f"pair {e} listed twice")
            meds[e] = (nxt, nxt + 1, nxt + 2)
            nxt += 3
        return cls(qubits, meds)

    @property
    def n_qubits(self) -> int:
        return len(self.qubit_modes)

    @property
    def n_modes(self) -> int:
        return 1 + max([m for t in self.qubit_modes for m in t] + [m for t in self.mediator_modes.values() for m in t])

    def check_graph(self, graph: ConstraintGraph) -> None:
        if self.n_modes > graph.n_modes:
            raise LayoutError(f"layout references mode {self.n_modes - 1} but graph has {graph.n_modes} modes")

    def to_dict(self) -> dict:
        return {
            "qubit_modes": [list(t) for t in self.qubit_modes],
            "mediator_modes": [[i, j, *t] for (i, j), t in sorted(self.mediator_modes.items())],
        }

    @classmethod
    def from_dict(cls, doc: Mapping) -> "GadgetLayout":
        try:
            qubits = tuple(tuple(int(m) for m in t) for t in doc["qubit_modes"])
            meds = {(int(r[0]), int(r[1])): tuple(int(m) for m in r[2:]) for r in doc.get("mediator_modes", [])}
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise ParseError(f"invalid layout document: {exc}") from None
        return cls(qubits, meds)


def mediator_edges(qi: tuple[int, int, int], qj: tuple[int, int, int], med: tuple[int, int, int]) -> list[Edge]:
    """The six extra constraint edges (i2,x), (i3,y), (j2,x), (j3,y), (i1,z), (j1,z)."""
    (i1, i2, i3), (j1, j2, j3), (x, y, z) = qi, qj, med
    return [(i2, x), (i3, y), (j2, x), (j3, y), (i1, z), (j1, z)]


def triangle_edges(t: tuple[int, int, int]) -> list[Edge]:
    a, b, c = t
    return [(a, b), (b, c), (a, c)]


def build_triangle_graph(hopping: float = 0.0) -> ConstraintGraph:
    """Complete graph on three modes: the single-qubit encoding."""
    edges = triangle_edges((0, 1, 2))
    return ConstraintGraph.from_edges(3, edges, hopping_weights={e: hopping for e in edges})


def build_gadget_graph(layout: GadgetLayout, n_modes: int | None = None) -> ConstraintGraph:
    """Constraint graph of a whole layout: one triangle per qubit plus the
    six mediator edges of every coupled pair. Weights are left at defaults."""
    n = layout.n_modes if n_modes is None else n_modes
    edges = []
    for t in layout.qubit_modes:
        edges += triangle_edges(t)
    for (i, j), med in layout.mediator_modes.items():
        edges += mediator_edges(layout.qubit_modes[i], layout.qubit_modes[j], med)
    return ConstraintGraph.from_edges(n, edges)


def build_interaction_graph(qubits: Edge, layout: GadgetLayout) -> ConstraintGraph:
    """Nine-mode graph coupling two encoded qubits through one mediator triple.

    Modes are relabeled compactly: qubit ``i`` -> 0..2, qubit ``j`` -> 3..5,
    mediator ``(x, y, z)`` -> 6..8.
    """
    i, j = qubits
    key = _edge(i, j)
    if key not in layout.mediator_modes:
        raise LayoutError(f"layout has no mediator triple for pair {key}")
    if i == j:
        raise LayoutError("a qubit cannot interact with itself")
    local = GadgetLayout.standard(2, [(0, 1)])
    return build_gadget_graph(local)


def max_weight_independent_set(graph: ConstraintGraph) -> tuple[float, frozenset[int]]:
    """Exhaustive maximum-weight independent set under ``vertex_weights``.

    Every independent set is visited by backtracking; ties go to the smallest
    bitmask.
    """
    n = graph.n_modes
    if n > MAX_IS_MODES:
        raise SizeError(f"brute-force IS oracle is capped at {MAX_IS_MODES} modes, got {n}")
    nm = graph.neighbor_masks
    w = graph.vertex_weights
    best_w, best_mask = 0.0, 0

    def visit(i, mask, blocked, total):
        nonlocal best_w, best_mask
        if i == n:
            if total > best_w or (total == best_w and mask < best_mask):
                best_w, best_mask = total, mask
            return
        visit(i + 1, mask, blocked, total)
        if not blocked >> i & 1:
            visit(i + 1, mask | 1 << i, blocked | nm[i], total + w[i])

    visit(0, 0, 0, 0.0)
    return best_w, frozenset(i for i in range(n) if best_mask >> i & 1)


def complement_graph(graph: ConstraintGraph) -> ConstraintGraph:
    """Same modes and vertex weights, complementary edge set (hopping weights reset)."""
    edges = [e for e in combinations(range(graph.n_modes), 2) if not graph.has_edge(*e)]
    return ConstraintGraph.from_edges(graph.n_modes, edges, graph.vertex_weights)


def cycle_graph(n: int) -> ConstraintGraph:
    return ConstraintGraph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n: int) -> ConstraintGraph:
    return ConstraintGraph.from_edges(n, combinations(range(n), 2))


def edgeless_graph(n: int) -> ConstraintGraph:
    return ConstraintGraph.from_edges(n, [])
