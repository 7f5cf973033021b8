"""Empirical enumeration support for the conjecture sweep.

Enumerates connected posets up to isomorphism by repeatedly attaching a
new maximal element over an order ideal, classifies each as contact or
not by randomized witnesses (never a proof), and compares the contact
ones against everything reachable by contact-sequence gluing.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .algebras import build_gA
from .forms import functional_on_basis, index, kernel
from .posets import Poset
from .toral.blocks import block, catalog
from .toral.gluing import CONTACT_RULES, _valid_identifications, glue

SWEEP_MAX_N = 8


def canonical_key(poset):
    """Lexicographically smallest relation tuple over all relabelings
    that keep the ascending-label convention."""
    n = poset.n
    rels = poset.relations
    if not rels:
        return (n, ())
    down = poset.down_sets
    best = [None]

    def extend(assigned, placed):
        if len(placed) == n:
            key = tuple(sorted((assigned[p], assigned[q]) for p, q in rels))
            if best[0] is None or key < best[0]:
                best[0] = key
            return
        nxt = len(placed) + 1
        for cand in poset.elements:
            if cand in assigned or not down[cand] <= placed:
                continue
            assigned[cand] = nxt
            placed.add(cand)
            extend(assigned, placed)
            del assigned[cand]
            placed.remove(cand)

    extend({}, set())
    return (n, best[0])


def iter_ideals(poset):
    """All down-closed subsets, as sorted tuples."""
    order = sorted(poset.elements, key=lambda p: len(poset.down_sets[p]))
    down = poset.down_sets
    out = []

    def walk(i, current):
        if i == len(order):
            out.append(tuple(sorted(current)))
            return
        e = order[i]
        walk(i + 1, current)
        if down[e] <= current:
            current.add(e)
            walk(i + 1, current)
            current.remove(e)

    walk(0, set())
    return out


def enumerate_posets(max_n, connected_only=True):
    """Isomorphism representatives of posets with up to max_n elements."""
    if max_n > SWEEP_MAX_N:
        raise ValueError(f"enumeration supports at most {SWEEP_MAX_N} elements")
    levels = {1: [Poset.from_covers(1, [])]}
    for n in range(2, max_n + 1):
        seen = {}
        for parent in levels[n - 1]:
            for ideal in iter_ideals(parent):
                covers = list(parent.covers) + [
                    (i, n)
                    for i in ideal
                    if not any(j in parent.up_sets[i] and j in ideal for j in ideal)
                ]
                child = Poset.from_covers(n, covers)
                key = canonical_key(child)
                if key not in seen:
                    seen[key] = child
        levels[n] = list(seen.values())
    out = []
    for n in range(1, max_n + 1):
        for poset in levels[n]:
            if not connected_only or poset.is_connected():
                out.append(poset)
    return out


def classify_contact(poset, seed=0, trials=5, witness_attempts=60):
    """(verdict, reason, witness-or-None); empirical, never a proof."""
    gA = build_gA(poset)
    d = gA.dim
    if d == 0:
        return False, "zero-dimensional algebra", None
    if d % 2 == 0:
        return False, "even dimension", None
    if not poset.is_connected():
        comps = poset.connected_components()
        if len(comps) != 2:
            return False, f"{len(comps)} components", None
        for comp in comps:
            sub = poset.induced_subposet(sorted(comp))
            if index(build_gA(sub), trials=trials, seed=seed) != 0:
                return False, "a component is not Frobenius", None
        return True, "disjoint sum of two Frobenius posets", None
    from .toral.gluing import ext_hasse_has_cycle

    if ext_hasse_has_cycle(poset):
        return False, "extremal Hasse diagram contains a cycle", None
    if index(gA, trials=trials, seed=seed) != 1:
        return False, "index is not one", None
    rng = random.Random(seed)
    strict_idx = [i for i, lab in enumerate(gA.labels) if lab[0] == "e"]
    diag_idx = [i for i, lab in enumerate(gA.labels) if lab[0] == "h"]
    for _ in range(witness_attempts):
        values = [Fraction(0)] * d
        for i in strict_idx:
            values[i] = Fraction(rng.randint(1, 1 << 16))
        rep = kernel(gA, functional_on_basis(gA, values))
        if rep.dimension != 1:
            continue
        gen = rep.vectors[0]
        phi_b = sum(values[i] * gen[i] for i in strict_idx)
        if phi_b != 0:
            return True, "random regular form is contact", values
        # the kernel generator's diagonal freedom can fix a vanishing pairing
        for i in diag_idx:
            if gen[i]:
                values[i] = Fraction(1)
                check = sum(values[k] * gen[k] for k in range(d))
                if check == 0:
                    values[i] = Fraction(2)
                return True, "regular form completed on the diagonal", values
    return False, "no contact witness found (empirical)", None


def reachable_contact_posets(max_n, rule_pool=CONTACT_RULES):
    """Canonical keys of contact-sequence outputs with at most max_n elements."""
    contact_start = []
    toral_blocks = []
    for fam in catalog():
        sizes = []
        if fam.parametric:
            lo, hi = fam.n_range
            sizes = [n for n in range(lo, hi + 1)]
        else:
            sizes = [None]
        for n in sizes:
            blk = block(fam.id, n)
            if blk.poset.n > max_n:
                continue
            if fam.kind == "contact":
                contact_start.append(blk)
            else:
                toral_blocks.append(blk)
    frontier = []
    seen = {}
    for blk in contact_start:
        key = canonical_key(blk.poset)
        if key not in seen:
            seen[key] = blk.poset
            frontier.append(blk.poset)
    while frontier:
        poset = frontier.pop()
        for blk in toral_blocks:
            for rule in sorted(rule_pool):
                for identify in _valid_identifications(poset, blk, rule):
                    result = glue(poset, blk, rule, identify)
                    if result.poset.n > max_n:
                        continue
                    key = canonical_key(result.poset)
                    if key not in seen:
                        seen[key] = result.poset
                        frontier.append(result.poset)
    return seen


def conjecture_sweep(max_n, seed=0, trials=5):
    """Flag contact posets up to max_n and check script reachability."""
    posets = enumerate_posets(max_n, connected_only=True)
    reachable = reachable_contact_posets(max_n)
    contact = []
    unreachable = []
    for poset in posets:
        verdict, reason, witness = classify_contact(poset, seed=seed, trials=trials)
        if not verdict:
            continue
        entry = {
            "poset": poset.to_json(),
            "reason": reason,
        }
        contact.append(entry)
        if canonical_key(poset) not in reachable:
            unreachable.append(entry)
    return {
        "max_n": max_n,
        "connected_posets_checked": len(posets),
        "contact_found": len(contact),
        "contact": contact,
        "unreachable_by_scripts": unreachable,
        "note": "empirical sweep; witnesses are randomized, nothing here is a proof",
    }
