"""Hard-core occupation bases and the three primitive fermionic moves.

A state is an ``int`` bitmask (bit ``i`` set = mode ``i`` occupied) and
stands for the ordered product ``a†_{m1} a†_{m2} ... |vac>`` with
``m1 < m2 < ...``. With that convention a creation or annihilation on mode
``i`` picks up ``(-1)**(number of occupied modes below i)``.

Sector ``k`` holds the ``k``-particle states, so it is the set of
``k``-vertex simplices of the independence complex (topological dimension
``k - 1``).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property

from .errors import ParseError
from .graph import ConstraintGraph


def _sign_below(state: int, mode: int) -> int:
    return -1 if (state & ((1 << mode) - 1)).bit_count() & 1 else 1


def apply_creation(state: int, mode: int):
    """``a†_mode |state>`` as ``(new_state, sign)``, or ``None`` if occupied."""
    if state >> mode & 1:
        return None
    return state | (1 << mode), _sign_below(state, mode)


def apply_annihilation(state: int, mode: int):
    """``a_mode |state>`` as ``(new_state, sign)``, or ``None`` if empty."""
    if not state >> mode & 1:
        return None
    return state & ~(1 << mode), _sign_below(state, mode)


def apply_hop(state: int, src: int, dst: int):
    """``a†_dst a_src |state>`` as ``(new_state, sign)``, or ``None``."""
    if src == dst:
        raise ValueError("hop needs distinct source and destination modes")
    out = apply_annihilation(state, src)
    if out is None:
        return None
    mid, s1 = out
    out = apply_creation(mid, dst)
    if out is None:
        return None
    new, s2 = out
    return new, s1 * s2


def occupied(state: int) -> list[int]:
    return [i for i in range(state.bit_length()) if state >> i & 1]


@dataclass(frozen=True)
class FockBasis:
    """Sorted hard-core ``k``-particle states of a constraint graph."""

    graph: ConstraintGraph
    k: int
    states: tuple[int, ...]

    @cached_property
    def index(self) -> dict[int, int]:
        return {s: n for n, s in enumerate(self.states)}

    def __len__(self):
        return len(self.states)

    def __iter__(self):
        return iter(self.states)

    def __contains__(self, state):
        return state in self.index

    @property
    def dim(self) -> int:
        return len(self.states)

    def to_json(self) -> str:
        return json.dumps(list(self.states))

    @classmethod
    def from_json(cls, graph: ConstraintGraph, k: int, text: str) -> "FockBasis":
        states = tuple(int(s) for s in json.loads(text))
        for s in states:
            if s.bit_count() != k or not graph.is_independent(s) or s >> graph.n_modes:
                raise ParseError(f"state {s} is not a hard-core {k}-particle state of the graph")
        if list(states) != sorted(set(states)):
            raise ParseError("basis states must be strictly ascending")
        return cls(graph, k, states)


def enumerate_basis(graph: ConstraintGraph, k: int) -> FockBasis:
    """All independent sets of size ``k`` as an ascending bitmask list."""
    n = graph.n_modes
    if k < 0 or k > n:
        raise ValueError(f"particle number {k} outside [0, {n}]")
    nm = graph.neighbor_masks
    out: list[int] = []

    def grow(start, mask, blocked, left):
        if left == 0:
            out.append(mask)
            return
        for i in range(start, n - left + 1):
            if not blocked >> i & 1:
                grow(i + 1, mask | 1 << i, blocked | nm[i], left - 1)

    grow(0, 0, 0, k)
    out.sort()
    return FockBasis(graph, k, tuple(out))


def sector_dimensions(graph: ConstraintGraph) -> list[int]:
    """Number of hard-core states for every ``k`` (the independence polynomial)."""
    return [enumerate_basis(graph, k).dim for k in range(graph.n_modes + 1)]
