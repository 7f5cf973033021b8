"""Finite posets on labels 1..n with exact relation bookkeeping.

A poset stores its full set of strict relations (transitively closed)
and derives Hasse structure, extremal data, order-complex topology and
substructure predicates from it. Labels always satisfy the convention
p < q whenever p precedes q; constructors relabel by a linear extension
when the input violates it and record the permutation.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from .linalg import RatMatrix, rank

ISO_SIZE_LIMIT = 12


class PosetError(ValueError):
    """Invalid poset input."""


class CycleError(PosetError):
    """The cover digraph contains a directed cycle."""


class UnsupportedSizeError(PosetError):
    """Operation refused above its documented size cap."""


@dataclass(frozen=True)
class ExtremalData:
    minimal: frozenset
    maximal: frozenset
    ext: frozenset
    rel_e: frozenset


def _transitive_closure(n, pairs):
    up = {p: set() for p in range(1, n + 1)}
    for p, q in pairs:
        up[p].add(q)
    order = _linear_extension_order(n, pairs)
    closed = {p: set(up[p]) for p in up}
    for p in reversed(order):
        acc = set(closed[p])
        for q in up[p]:
            acc |= closed[q]
        closed[p] = acc
    return {(p, q) for p in closed for q in closed[p]}


def _linear_extension_order(n, pairs):
    """Kahn's algorithm with a min-heap; raises CycleError on cycles."""
    succ = {p: set() for p in range(1, n + 1)}
    indeg = {p: 0 for p in range(1, n + 1)}
    for p, q in set(pairs):
        if q not in succ[p]:
            succ[p].add(q)
            indeg[q] += 1
    heap = [p for p in range(1, n + 1) if indeg[p] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        p = heapq.heappop(heap)
        order.append(p)
        for q in sorted(succ[p]):
            indeg[q] -= 1
            if indeg[q] == 0:
                heapq.heappush(heap, q)
    if len(order) != n:
        raise CycleError("cover relation digraph contains a cycle")
    return order


class Poset:
    """Immutable finite poset; construct via ``Poset.from_covers``."""

    def __init__(self, n, relations, relabeling=None, _validated=False):
        if n < 1:
            raise PosetError("posets must have at least one element")
        relations = frozenset((int(p), int(q)) for p, q in relations)
        if not _validated:
            for p, q in relations:
                if not (1 <= p <= n and 1 <= q <= n):
                    raise PosetError(f"relation ({p},{q}) out of range 1..{n}")
                if p >= q:
                    raise PosetError(f"relation ({p},{q}) violates the p<q label convention")
            for p, q in relations:
                for r, s in relations:
                    if q == r and (p, s) not in relations:
                        raise PosetError(f"relations are not transitively closed at ({p},{s})")
        self.n = n
        self.relations = relations
        self.relabeling = dict(relabeling) if relabeling else {p: p for p in range(1, n + 1)}

    @classmethod
    def from_covers(cls, n, covers):
        covers = [(int(p), int(q)) for p, q in covers]
        for p, q in covers:
            if not (1 <= p <= n and 1 <= q <= n):
                raise PosetError(f"cover ({p},{q}) out of range 1..{n}")
            if p == q:
                raise PosetError(f"cover ({p},{p}) is reflexive")
        order = _linear_extension_order(n, covers)  # raises CycleError
        closure = _transitive_closure(n, covers)
        if all(p < q for p, q in closure):
            return cls(n, closure, _validated=True)
        relabel = {old: new for new, old in enumerate(order, start=1)}
        relabeled = {(relabel[p], relabel[q]) for p, q in closure}
        return cls(n, relabeled, relabeling=relabel, _validated=True)

    @classmethod
    def chain(cls, n):
        return cls.from_covers(n, [(i, i + 1) for i in range(1, n)])

    @classmethod
    def antichain(cls, n):
        return cls.from_covers(n, [])

    def __eq__(self, other):
        return isinstance(other, Poset) and self.n == other.n and self.relations == other.relations

    def __hash__(self):
        return hash((self.n, self.relations))

    def __repr__(self):
        return f"Poset(n={self.n}, covers={sorted(self.covers)})"

    def __len__(self):
        return self.n

    @property
    def elements(self):
        return range(1, self.n + 1)

    def leq(self, p, q):
        return p == q or (p, q) in self.relations

    def related(self, p, q):
        return p == q or (p, q) in self.relations or (q, p) in self.relations

    @cached_property
    def up_sets(self):
        up = {p: set() for p in self.elements}
        for p, q in self.relations:
            up[p].add(q)
        return up

    @cached_property
    def down_sets(self):
        down = {p: set() for p in self.elements}
        for p, q in self.relations:
            down[q].add(p)
        return down

    @cached_property
    def covers(self):
        out = set()
        for p, q in self.relations:
            if not (self.up_sets[p] & self.down_sets[q]):
                out.add((p, q))
        return frozenset(out)

    @cached_property
    def minimal_elements(self):
        return frozenset(p for p in self.elements if not self.down_sets[p])

    @cached_property
    def maximal_elements(self):
        return frozenset(p for p in self.elements if not self.up_sets[p])

    def extremal_data(self):
        ext = self.minimal_elements | self.maximal_elements
        rel_e = frozenset((p, q) for p, q in self.relations if p in ext and q in ext)
        return ExtremalData(self.minimal_elements, self.maximal_elements, frozenset(ext), rel_e)

    def is_filter(self, subset):
        subset = set(subset)
        if not subset <= set(self.elements):
            raise PosetError("subset contains labels outside the poset")
        return all(q in subset for p in subset for q in self.up_sets[p])

    def is_ideal(self, subset):
        subset = set(subset)
        if not subset <= set(self.elements):
            raise PosetError("subset contains labels outside the poset")
        return all(q in subset for p in subset for q in self.down_sets[p])

    @cached_property
    def hasse_adjacency(self):
        adj = {p: set() for p in self.elements}
        for p, q in self.covers:
            adj[p].add(q)
            adj[q].add(p)
        return adj

    def connected_components(self):
        seen = set()
        comps = []
        for start in self.elements:
            if start in seen:
                continue
            comp = {start}
            stack = [start]
            while stack:
                v = stack.pop()
                for w in self.hasse_adjacency[v]:
                    if w not in comp:
                        comp.add(w)
                        stack.append(w)
            seen |= comp
            comps.append(frozenset(comp))
        return comps

    def is_connected(self):
        return len(self.connected_components()) == 1

    @cached_property
    def height(self):
        depth = {}
        for p in _linear_extension_order(self.n, self.covers):
            below = [depth[q] for q in self.down_sets[p]]
            depth[p] = 1 + max(below) if below else 0
        return max(depth.values())

    def induced_subposet(self, subset):
        """Subposet on ``subset``, relabeled 1..|subset| in sorted label order."""
        subset = sorted(set(subset))
        if not subset:
            raise PosetError("induced subposet needs at least one element")
        if not set(subset) <= set(self.elements):
            raise PosetError("subset contains labels outside the poset")
        relabel = {old: i for i, old in enumerate(subset, start=1)}
        rels = {
            (relabel[p], relabel[q])
            for p, q in self.relations
            if p in relabel and q in relabel
        }
        return Poset(len(subset), rels, relabeling=relabel, _validated=True)

    def comparability_graph(self):
        adj = {p: set() for p in self.elements}
        for p, q in self.relations:
            adj[p].add(q)
            adj[q].add(p)
        return adj

    def disjoint_sum(self, other):
        covers = list(self.covers) + [(p + self.n, q + self.n) for p, q in other.covers]
        return Poset.from_covers(self.n + other.n, covers)

    def dual(self):
        n = self.n
        rels = {(n + 1 - q, n + 1 - p) for p, q in self.relations}
        return Poset(n, rels, relabeling={p: n + 1 - p for p in self.elements}, _validated=True)

    # ----- order complex -------------------------------------------------

    def chains_by_size(self, max_size):
        """All chains of cardinality 1..max_size, keyed by cardinality."""
        out = {k: [] for k in range(1, max_size + 1)}
        up = self.up_sets

        def extend(chain):
            k = len(chain)
            out[k].append(tuple(chain))
            if k == max_size:
                return
            for q in sorted(up[chain[-1]]):
                chain.append(q)
                extend(chain)
                chain.pop()

        for p in self.elements:
            extend([p])
        for k in out:
            out[k].sort()
        return out

    def order_complex(self, max_dim=None):
        """Faces of the order complex by dimension (chains of size dim+1)."""
        cap = self.height + 1 if max_dim is None else min(max_dim + 1, self.height + 1)
        chains = self.chains_by_size(cap)
        return {k - 1: chains[k] for k in chains}

    def betti_numbers(self, max_dim):
        """Betti numbers beta_0..beta_max_dim of the order complex over Q."""
        faces = self.chains_by_size(min(max_dim + 2, self.height + 1))
        index = {
            k: {face: i for i, face in enumerate(faces[k])} for k in faces
        }
        ranks = {}
        for k in range(2, max_dim + 2 + 1):
            if k not in faces or not faces[k]:
                ranks[k] = 0
                continue
            rows = len(faces[k - 1])
            mat = RatMatrix.zeros(rows, len(faces[k]))
            for j, face in enumerate(faces[k]):
                for drop in range(k):
                    sub = face[:drop] + face[drop + 1 :]
                    mat.rows[index[k - 1][sub]][j] = Fraction((-1) ** drop)
            ranks[k] = rank(mat)
        betti = []
        for dim in range(max_dim + 1):
            k = dim + 1
            n_faces = len(faces.get(k, []))
            betti.append(n_faces - ranks.get(k, 0) - ranks.get(k + 1, 0))
        return betti

    # ----- isomorphism ----------------------------------------------------

    def _signature(self):
        depth = {}
        for p in _linear_extension_order(self.n, self.covers):
            below = [depth[q] for q in self.down_sets[p]]
            depth[p] = 1 + max(below) if below else 0
        sig = {}
        for p in self.elements:
            sig[p] = (
                len(self.down_sets[p]),
                len(self.up_sets[p]),
                depth[p],
                sum(1 for c in self.covers if c[0] == p),
                sum(1 for c in self.covers if c[1] == p),
            )
        return sig

    def isomorphism_to(self, other):
        """An order isomorphism as a dict, or None. Capped at 12 elements."""
        if self.n != other.n:
            return None
        if self.n > ISO_SIZE_LIMIT:
            raise UnsupportedSizeError(
                f"isomorphism search is capped at {ISO_SIZE_LIMIT} elements"
            )
        if len(self.relations) != len(other.relations):
            return None
        sig_a, sig_b = self._signature(), other._signature()
        from collections import Counter

        if Counter(sig_a.values()) != Counter(sig_b.values()):
            return None
        candidates = {
            p: [q for q in other.elements if sig_b[q] == sig_a[p]] for p in self.elements
        }
        order = sorted(self.elements, key=lambda p: len(candidates[p]))
        mapping = {}
        used = set()

        def backtrack(i):
            if i == len(order):
                return True
            p = order[i]
            for q in candidates[p]:
                if q in used:
                    continue
                ok = True
                for p2, q2 in mapping.items():
                    if ((p, p2) in self.relations) != ((q, q2) in other.relations):
                        ok = False
                        break
                    if ((p2, p) in self.relations) != ((q2, q) in other.relations):
                        ok = False
                        break
                if ok:
                    mapping[p] = q
                    used.add(q)
                    if backtrack(i + 1):
                        return True
                    del mapping[p]
                    used.remove(q)
            return False

        if backtrack(0):
            return dict(mapping)
        return None

    def is_isomorphic_to(self, other):
        return self.isomorphism_to(other) is not None

    # ----- serialization --------------------------------------------------

    def to_json(self):
        return {"n": self.n, "covers": [list(c) for c in sorted(self.covers)]}

    @classmethod
    def from_json(cls, data):
        try:
            n = int(data["n"])
            covers = [(int(p), int(q)) for p, q in data["covers"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise PosetError(f"malformed poset JSON: {exc}") from exc
        return cls.from_covers(n, covers)

    def to_dot(self, name="poset"):
        depth = {}
        for p in _linear_extension_order(self.n, self.covers):
            below = [depth[q] for q in self.down_sets[p]]
            depth[p] = 1 + max(below) if below else 0
        lines = [f"digraph {name} {{", "  rankdir=BT;"]
        by_rank = {}
        for p, d in depth.items():
            by_rank.setdefault(d, []).append(p)
        for d in sorted(by_rank):
            members = " ".join(f'"{p}"' for p in sorted(by_rank[d]))
            lines.append(f"  {{ rank=same; {members} }}")
        for p, q in sorted(self.covers):
            lines.append(f'  "{p}" -> "{q}";')
        lines.append("}")
        return "\n".join(lines)


def poset_from_json_file(path):
    with open(path) as fh:
        return Poset.from_json(json.load(fh))


def transitive_reduction(n, relations):
    """Covering pairs of an arbitrary (closed) strict relation set."""
    rel = set(relations)
    up = {p: {q for (a, q) in rel if a == p} for p in range(1, n + 1)}
    return {
        (p, q)
        for p, q in rel
        if not any(z in up[p] for z in range(1, n + 1) if (z, q) in rel)
    }


__all__ = [
    "CycleError",
    "ExtremalData",
    "ISO_SIZE_LIMIT",
    "Poset",
    "PosetError",
    "UnsupportedSizeError",
    "poset_from_json_file",
    "transitive_reduction",
]
