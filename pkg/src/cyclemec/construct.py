"""Randomized construct-and-correct solver for block recovery instances.

The solver grows an edge trail: starting from a focus vertex it keeps adding
one orientation of an unchecked link, and whenever the new edge is unsafe
(its target gains a parent pair that must not share a child) it walks the
trail backwards, removing, flipping or re-rooting earlier edges.  Each trail
entry carries a status code (its own value while untouched, -1 flipped,
0 removed, 1 added as a removal replacement, 2 placed to satisfy a
common-child obligation) plus the index or partner that caused the change,
so corrections can unwind precisely.  When a correction cannot proceed it
truncates the trail at the offending edge and restarts; stagnation rolls the
whole attempt back to its snapshot with freshly shuffled candidate orders.
"""

from __future__ import annotations

import random
from collections import Counter

from .builder import SccrInstance
from .graphs import DirectedGraph
from .mec import p_adjacencies


class _Restart(Exception):
    """Back to the top of the attempt loop, keeping the modified trail."""


class _Rewind(Exception):
    """Back to the top of the attempt loop from the snapshot."""


class _Hard(Exception):
    """Unrecoverable for this run: report failure."""


def _canon(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


def _in_links(inst: SccrInstance, a: int, b: int) -> bool:
    return (
        (a, b) in inst.a_pairs or (b, a) in inst.a_pairs
        or (a, b) in inst.b_pairs or (b, a) in inst.b_pairs
    )


def is_safe(inst: SccrInstance, edge: tuple[int, int], parents: dict[int, Counter]) -> bool:
    """An edge (a,b) is safe when no other current parent of b clashes with a:
    the pair must not be barred from sharing a child, and if either end sits
    in the block they must be linked."""
    a, b = edge
    for v, count in parents.get(b, Counter()).items():
        if count <= 0 or v == a:
            continue
        if _canon(v, a) in inst.no_com_ch:
            return False
        if (v in inst.c or a in inst.c) and not _in_links(inst, v, a):
            return False
    return True


def are_incompatible(inst: SccrInstance, e_one: tuple[int, int], e_two: tuple[int, int]) -> bool:
    """Two edges into the same vertex conflict when their sources must not
    share a child in the block."""
    a, c = e_one[0], e_two[0]
    if a == c:
        return False
    if a not in inst.c and c not in inst.c:
        return _canon(a, c) in inst.no_com_ch
    return not _in_links(inst, a, c)


def validate_output(inst: SccrInstance, edges: frozenset[tuple[int, int]]) -> list[str]:
    """All recovery requirements, checked directly; empty list means valid."""
    problems = []
    for u, v in edges:
        if v not in inst.c:
            problems.append(f"edge ({u},{v}) does not point into the block")
        if u == v or not (1 <= u <= inst.n and 1 <= v <= inst.n):
            problems.append(f"edge ({u},{v}) is malformed")
    if problems:
        return problems
    g = DirectedGraph(inst.n, frozenset(edges))
    want = frozenset(_canon(a, b) for a, b in inst.a_pairs) | frozenset(
        _canon(a, b) for a, b in inst.b_pairs
    )
    got = p_adjacencies(g)
    if got != want:
        extra = sorted(got - want)
        missing = sorted(want - got)
        problems.append(f"p-adjacency mismatch: extra={extra} missing={missing}")
    if inst.c not in (frozenset(b) for b in g.scc()):
        problems.append("block is not a strongly connected component")
    children = g.children_mask
    cmask = 0
    for v in inst.c:
        cmask |= 1 << (v - 1)
    for a, c in inst.com_ch:
        if not children[a] & children[c] & cmask:
            problems.append(f"pair ({a},{c}) lacks its required common child")
    for a, c in inst.no_com_ch:
        if children[a] & children[c] & cmask:
            problems.append(f"pair ({a},{c}) has a forbidden common child")
    return problems


def construct_correct(
    inst: SccrInstance,
    max_rounds: int = 100,
    rng: random.Random | None = None,
    seed: int = 0,
) -> frozenset[tuple[int, int]] | None:
    """Run the randomized solver for up to `max_rounds` restarts.

    Returns the live trail edges if they make the block a strongly connected
    component, None on failure.  Every loop is additionally bounded by a
    per-attempt step budget so a degenerate instance cannot spin forever;
    hitting the budget counts as a stagnation rewind.
    """
    rng = rng if rng is not None else random.Random(seed)
    cset = inst.c
    cvert = sorted(cset)
    aset = inst.a_pairs
    bset = inst.b_pairs
    A = sorted(aset)
    B = sorted(bset)
    rng.shuffle(A)
    rng.shuffle(B)
    comch = sorted(inst.com_ch)
    prefix_len = 2 * len(comch)
    target_checked = len(A) // 2 + len(B)
    pair_budget = 64 * (target_checked + len(cvert) + 4) ** 2
    two = cvert if len(cvert) == 2 else None

    adeg = {x: sum(1 for (u, _) in aset if u == x) for x in cvert}
    bindeg = {x: sum(1 for (_, v) in bset if v == x) for x in cvert}

    trail: list[tuple[int, int]] = []
    codes: list = []
    cause: list[int] = []
    a: int | None = None
    avoid: tuple[int, int] | None = None
    rounds = 0

    # Attempt-scoped state, rebuilt at every restart.
    checked: set[tuple[int, int]] = set()
    parents: dict[int, Counter] = {}
    corder: list[int] = []
    budget = 0

    def spend():
        nonlocal budget
        budget -= 1
        if budget < 0:
            raise _Rewind

    def drop_parent(tgt: int, src: int):
        cnt = parents[tgt]
        if cnt[src] > 0:
            cnt[src] -= 1
        if cnt[src] <= 0:
            del cnt[src]

    def live_value(edge: tuple[int, int]) -> bool:
        return any(trail[i] == edge and codes[i] != 0 for i in range(len(trail)))

    def jump_back(j: int):
        """Truncate the trail at the cause of entry j and restart."""
        nonlocal a, avoid
        avoid = trail[j]
        if codes[j] == 2:
            if j % 2 == 0:
                keep = list(range(j)) + list(range(j + 2, prefix_len))
            else:
                keep = list(range(j - 1)) + list(range(j + 1, prefix_len))
            trail[:] = [trail[t] for t in keep]
            codes[:] = [codes[t] for t in keep]
            cause[:] = [cause[t] for t in keep]
            a = None
            rng.shuffle(A)
            rng.shuffle(B)
            raise _Restart
        j2 = cause[j]
        new_trail = trail[:j2]
        new_codes = codes[:j2]
        new_cause = cause[:j2]
        for k in range(j2):
            if new_codes[k] in (-1, 0) and new_cause[k] >= j2:
                new_trail[k] = (new_trail[k][1], new_trail[k][0])
                new_codes[k] = new_trail[k]
                new_cause[k] = k
        in_a = trail[j2] in aset
        if codes[j2] in (-1, 0) and in_a:
            a = trail[j2][1]
        elif codes[j2] in (-1, 0):
            a = trail[j2][0]
        elif in_a:
            a = trail[j2][0]
        else:
            a = trail[j2][1]
        trail[:] = new_trail
        codes[:] = new_codes
        cause[:] = new_cause
        rng.shuffle(A)
        rng.shuffle(B)
        raise _Restart

    def assign_common_children():
        if sum(1 for cd in codes if cd == 2) >= prefix_len:
            return
        for p1, p2 in comch:
            if any(
                live_value((p1, v)) and live_value((p2, v)) for v in cvert
            ):
                continue
            placed = False
            for v in corder:
                e_one, e_two = (p1, v), (p2, v)
                if e_one not in bset or e_two not in bset:
                    continue
                if avoid is not None and avoid in (e_one, e_two):
                    continue
                if is_safe(inst, e_one, parents) and is_safe(inst, e_two, parents):
                    trail.append(e_one)
                    codes.append(2)
                    cause.append(p2)
                    trail.append(e_two)
                    codes.append(2)
                    cause.append(p1)
                    parents[v][p1] += 1
                    parents[v][p2] += 1
                    checked.add(_canon(p1, v))
                    checked.add(_canon(p2, v))
                    placed = True
                    break
            if not placed:
                raise _Hard

    def two_cycle_pending() -> bool:
        if two is None or not A:
            return False
        u, v = two
        return not (live_value((u, v)) and live_value((v, u)))

    def correction(i: int, cnum: int, potential: list) -> int:
        """Walk the trail backwards from entry i until the focus is safe.

        Returns the next focus vertex; raises _Restart via jump_back, _Hard
        when the per-vertex stagnation counter overflows.
        """
        r_vertex = 0
        r_vertex_compare: int | None = None
        while True:
            spend()
            if r_vertex_compare is not None and r_vertex > r_vertex_compare:
                raise _Hard
            e = trail[i]
            e1, e2 = e
            if e1 in cset:
                v_found = None
                for v in corder:
                    e_one, e_two = (e1, v), (e2, v)
                    if e_one not in aset or e_two not in aset:
                        continue
                    if first_edge[0] and avoid is not None and avoid in (e_one, e_two):
                        continue
                    if is_safe(inst, e_one, parents) and is_safe(inst, e_two, parents):
                        v_found = v
                        break
                if v_found is not None:
                    v = v_found
                    trail[i] = (e2, e1)
                    codes[i] = 0
                    cause[i] = cnum
                    trail.append((e1, v))
                    codes.append(1)
                    cause.append(cnum)
                    trail.append((e2, v))
                    codes.append(1)
                    cause.append(cnum)
                    drop_parent(e2, e1)
                    parents[v][e1] += 1
                    parents[v][e2] += 1
                    for pr in (_canon(e1, v), _canon(e2, v)):
                        if pr not in checked:
                            reset_r(update_compare=False)
                            checked.add(pr)
                    return v
                trail[i] = (e2, e1)
                codes[i] = -1
                cause[i] = cnum
                parents[e1][e2] += 1
                drop_parent(e2, e1)
                if is_safe(inst, (e2, e1), parents):
                    return e1
                conflict = [
                    k for k in range(len(trail))
                    if trail[k][1] == e1
                    and parents[e1].get(trail[k][0], 0) > 0
                    and are_incompatible(inst, trail[k], (e2, e1))
                ]
                flipped = [k for k in conflict if codes[k] in (-1, 1)]
                if flipped:
                    val = trail[max(flipped)]
                    j = next(k for k in range(len(trail)) if trail[k] == val)
                    jump_back(j)
                potential.append((e2, e1))
                live = [k for k in conflict if codes[k] != 0]
                if not live:
                    raise _Rewind
                i = max(live)
                r_vertex = 0
                continue
            # Incoming edge from outside the block.
            v_found = None
            for v in corder:
                e_one, e_two = (e1, v), (e2, v)
                if e_one not in bset or e_two not in aset:
                    continue
                if first_edge[0] and avoid is not None and avoid in (e_one, e_two):
                    continue
                if is_safe(inst, e_one, parents) and is_safe(inst, e_two, parents):
                    v_found = v
                    break
            moved_ok = False
            if v_found is not None:
                v = v_found
                if codes[i] != 2:
                    trail[i] = (e2, e1)
                    codes[i] = 0
                    cause[i] = cnum
                trail.append((e1, v))
                codes.append(1)
                cause.append(cnum)
                trail.append((e2, v))
                codes.append(1)
                cause.append(cnum)
                drop_parent(e2, e1)
                parents[v][e1] += 1
                parents[v][e2] += 1
                for pr in (_canon(e1, v), _canon(e2, v)):
                    if pr not in checked:
                        reset_r(update_compare=True)
                        checked.add(pr)
                stale = [k for k in range(len(trail)) if trail[k] == e and codes[k] == 2]
                moved_ok = True
                for k in stale:
                    partner = cause[k]
                    w_found = None
                    for w in corder:
                        w_one, w_two = (e1, w), (partner, w)
                        if w_one not in bset or w_two not in bset:
                            continue
                        if is_safe(inst, w_one, parents) and is_safe(inst, w_two, parents):
                            w_found = w
                            break
                    if w_found is None:
                        moved_ok = False
                        break
                    w = w_found
                    trail[k] = (e1, w)
                    if k % 2 == 0:
                        trail[k + 1] = (partner, w)
                    else:
                        trail[k - 1] = (partner, w)
                    parents[w][e1] += 1
                    parents[w][partner] += 1
                    drop_parent(e2, e1)
                    drop_parent(e2, partner)
                    for pr in (_canon(e1, w), _canon(partner, w)):
                        if pr not in checked:
                            reset_r(update_compare=True)
                            checked.add(pr)
                if moved_ok:
                    return v
            conflict = [
                k for k in range(len(trail))
                if trail[k][1] == e2
                and parents[e2].get(trail[k][0], 0) > 0
                and are_incompatible(inst, trail[k], e)
            ]
            flipped = [k for k in conflict if codes[k] in (-1, 1)]
            if flipped:
                j = rng.choice(flipped)
                jump_back(j)
            potential.append(e)
            live = [k for k in conflict if codes[k] != 0]
            if not live:
                raise _Rewind
            i = max(live)
            if r_vertex == 0:
                r_vertex_compare = sum(1 for (_, y) in trail if y == e2)
            r_vertex += 1

    # R bookkeeping shared between the main loop and corrections.
    r_state = [0, 0]  # R, R_compare

    def reset_r(update_compare: bool):
        r_state[0] = 0
        if update_compare:
            r_state[1] = len(trail)

    first_edge = [True]

    while True:
        snapshot = (list(trail), list(codes), list(cause), avoid, a)
        if rounds == max_rounds:
            return None
        rounds += 1
        first_edge[0] = True
        budget = pair_budget
        corder = list(cvert)
        rng.shuffle(corder)
        checked = set()
        parents = {v: Counter() for v in cvert}
        for (u, w), cd in zip(trail, codes):
            checked.add(_canon(u, w))
            if cd != 0:
                parents[w][u] += 1
        try:
            assign_common_children()
            if a is None:
                a = min(corder, key=lambda x: adeg[x] + bindeg[x])
            f = {v: 0 for v in cvert}
            r_state[0] = 0
            r_state[1] = len(trail)
            while len(checked) != target_checked or two_cycle_pending():
                spend()
                if r_state[0] > r_state[1]:
                    raise _Rewind
                cand_a = [y for (x, y) in A if x == a]
                cand_b = [v for (v, y) in B if y == a]
                if first_edge[0] and avoid is not None:
                    cand_a = [y for y in cand_a if (a, y) != avoid]
                    cand_b = [v for v in cand_b if (v, a) != avoid]
                cands = cand_a + cand_b
                if not cands:
                    raise _Hard
                pick = None
                for b in cands:
                    if _canon(a, b) not in checked:
                        pick = b
                        break
                if pick is None:
                    f[a] += 1
                    pick = cands[(f[a] - 1) % len(cands)]
                b = pick
                cnum = len(trail)
                edge = (a, b) if b in cset else (b, a)
                trail.append(edge)
                codes.append(edge)
                cause.append(cnum)
                parents[edge[1]][edge[0]] += 1
                pr = _canon(*edge)
                if pr in checked:
                    r_state[0] += 1
                else:
                    reset_r(update_compare=True)
                    checked.add(pr)
                if is_safe(inst, edge, parents):
                    a = edge[1]
                    first_edge[0] = False
                    continue
                potential: list = []
                a = correction(len(trail) - 1, cnum, potential)
                for prob in potential:
                    if not is_safe(inst, prob, parents):
                        tgt = prob[1]
                        clash = sorted(
                            v for v, cnt in parents[tgt].items()
                            if cnt > 0 and are_incompatible(inst, (v, tgt), prob)
                        )
                        v = rng.choice(clash)
                        j = next(
                            k for k in range(len(trail))
                            if trail[k] == (v, tgt) and codes[k] != 0
                        )
                        jump_back(j)
                first_edge[0] = False
        except _Restart:
            continue
        except _Rewind:
            trail[:] = snapshot[0]
            codes[:] = snapshot[1]
            cause[:] = snapshot[2]
            avoid = snapshot[3]
            a = snapshot[4]
            rng.shuffle(A)
            rng.shuffle(B)
            continue
        except _Hard:
            return None
        edges = frozenset(trail[i] for i in range(len(trail)) if codes[i] != 0)
        if cset in (frozenset(b) for b in DirectedGraph(inst.n, edges).scc()):
            return edges
        return None
