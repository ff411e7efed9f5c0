"""Omega-automata: LTL to nondeterministic Buchi, Buchi to deterministic
parity, and direct deterministic safety automata for the safety fragment.

Edges are labeled symbolically with boolean predicates over proposition
names (:class:`hyperfence.preds.Pred`); a missing letter simply has no
transition in a Buchi automaton, while parity and safety automata keep
their transition relations total and deterministic.

Parity acceptance is max-even throughout: a run is accepting iff the
highest state color it visits infinitely often is even.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Callable, Iterable, Sequence

from .errors import BudgetExceededError
from .logic import (
    And,
    Atom,
    Const,
    Finally,
    Formula,
    Globally,
    LassoWord,
    Next,
    Not,
    Or,
    Release,
    TRUE,
    Until,
    WeakUntil,
    classify_syntactic_safety,
    format_formula,
    nnf_for_safety,
    simplify,
    subformulas,
    support,
    to_nnf,
)
from .preds import MAX_EXPLICIT_SUPPORT, Pred, cover_is_total, disjoint

DEFAULT_STATE_BUDGET = 100_000


# ---------------------------------------------------------------------------
# Automaton types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Nba:
    """Nondeterministic Buchi automaton with symbolic edge labels."""

    aps: tuple[str, ...]
    states: tuple[str, ...]
    initial: str
    edges: dict[str, tuple[tuple[Pred, str], ...]]
    accepting: frozenset[str]

    def successors(self, state: str, letter: frozenset[str]) -> frozenset[str]:
        return frozenset(t for p, t in self.edges[state] if p.evaluate(letter))


@dataclass(frozen=True)
class Dpa:
    """Deterministic parity automaton; max-even acceptance on state colors."""

    aps: tuple[str, ...]
    states: tuple[str, ...]
    initial: str
    edges: dict[str, tuple[tuple[Pred, str], ...]]
    colors: dict[str, int]

    def step(self, state: str, letter: frozenset[str]) -> str:
        for p, t in self.edges[state]:
            if p.evaluate(letter):
                return t
        raise ValueError(f"no transition from {state!r} on {sorted(letter)}")


@dataclass(frozen=True)
class SafetyAutomaton:
    """Deterministic automaton whose absorbing reject state is reached by
    exactly the bad prefixes of its language."""

    aps: tuple[str, ...]
    states: tuple[str, ...]
    initial: str
    edges: dict[str, tuple[tuple[Pred, str], ...]]
    reject: str

    def step(self, state: str, letter: frozenset[str]) -> str:
        for p, t in self.edges[state]:
            if p.evaluate(letter):
                return t
        raise ValueError(f"no transition from {state!r} on {sorted(letter)}")

    def run(self, events: Iterable[frozenset[str]]) -> str:
        state = self.initial
        for ev in events:
            state = self.step(state, ev)
        return state

    def is_bad_prefix(self, events: Iterable[frozenset[str]]) -> bool:
        return self.run(events) == self.reject


def check_deterministic_total(edges: Sequence[tuple[Pred, str]]) -> bool:
    preds = [p for p, _ in edges]
    for i in range(len(preds)):
        for j in range(i + 1, len(preds)):
            if not disjoint(preds[i], preds[j]):
                return False
    return cover_is_total(preds)


# ---------------------------------------------------------------------------
# Canonical naming
# ---------------------------------------------------------------------------


def _canonical_names(initial, edge_iter: Callable, target_key: Callable) -> dict:
    """Breadth-first state renaming (s0, s1, ...) with deterministic edge
    ordering, so constructions are independent of hash seeds."""
    names: dict = {initial: "s0"}
    queue = [initial]
    while queue:
        state = queue.pop(0)
        outgoing = sorted(edge_iter(state), key=lambda e: (e[0].sort_key(), target_key(e[1])))
        for _, tgt in outgoing:
            if tgt not in names:
                names[tgt] = f"s{len(names)}"
                queue.append(tgt)
    return names


# ---------------------------------------------------------------------------
# LTL -> NBA (tableau with counter-based degeneralization)
# ---------------------------------------------------------------------------

_Branch = tuple[frozenset, frozenset, frozenset]  # literals, next-set, pending


def _expand(state: frozenset) -> list[_Branch]:
    """Decompose a set of formulas into disjunctive branches of literal
    constraints for the current step plus obligations for the next one.

    Least-fixpoint operators (U, F) mark the branch that postpones them as
    pending; greatest-fixpoint operators (G, R, W) unfold without a mark.
    Branches with contradictory literals are pruned.
    """
    branches: list[tuple[set, set, set, list, set]] = [
        (set(), set(), set(), sorted(state, key=format_formula), set())
    ]
    done: list[_Branch] = []
    while branches:
        lits, nxt, pending, todo, seen = branches.pop()
        alive = True
        while todo:
            g = todo.pop()
            if g in seen:
                continue
            seen.add(g)
            if isinstance(g, Const):
                if not g.value:
                    alive = False
                    break
                continue
            if isinstance(g, (Atom, Not)):
                name = g.resolved if isinstance(g, Atom) else g.arg.resolved
                positive = isinstance(g, Atom)
                if (Not(Atom(name)) if positive else Atom(name)) in lits:
                    alive = False
                    break
                lits.add(Atom(name) if positive else Not(Atom(name)))
                continue
            if isinstance(g, And):
                todo += [g.left, g.right]
                continue
            if isinstance(g, Next):
                nxt.add(g.arg)
                continue
            if isinstance(g, Globally):
                todo.append(g.arg)
                nxt.add(g)
                continue
            if isinstance(g, Or):
                branches.append(
                    (set(lits), set(nxt), set(pending), todo + [g.right], set(seen))
                )
                todo.append(g.left)
                continue
            if isinstance(g, Until):
                branches.append(
                    (set(lits), set(nxt) | {g}, set(pending) | {g}, todo + [g.left], set(seen))
                )
                todo.append(g.right)
                continue
            if isinstance(g, Finally):
                branches.append(
                    (set(lits), set(nxt) | {g}, set(pending) | {g}, list(todo), set(seen))
                )
                todo.append(g.arg)
                continue
            if isinstance(g, WeakUntil):
                branches.append((set(lits), set(nxt) | {g}, set(pending), todo + [g.left], set(seen)))
                todo.append(g.right)
                continue
            if isinstance(g, Release):
                branches.append((set(lits), set(nxt) | {g}, set(pending), todo + [g.right], set(seen)))
                todo += [g.left, g.right]
                continue
            raise TypeError(f"unexpected formula node {type(g).__name__}")
        if alive:
            done.append((frozenset(lits), frozenset(nxt), frozenset(pending)))
    # Deduplicate while keeping first-seen order.
    out: dict[_Branch, None] = {}
    for b in done:
        out.setdefault(b)
    return list(out)


def _branch_pred(lits: frozenset) -> Pred:
    pos = [l.name for l in lits if isinstance(l, Atom)]
    neg = [l.arg.name for l in lits if isinstance(l, Not)]
    return Pred.cube(pos, neg)


def ltl_to_nba(f: Formula, budget: int = DEFAULT_STATE_BUDGET) -> Nba:
    """Tableau translation; the input is normalized to negation normal form
    (weak until kept primitive) before expansion."""
    g = to_nnf(f, keep_weak=True)
    obligations = sorted(
        {s for s in subformulas(g) if isinstance(s, (Until, Finally))},
        key=format_formula,
    )
    m = len(obligations)
    initial = frozenset() if g == TRUE else frozenset({g})

    def advance(i: int, pending: frozenset) -> int:
        if i == m:
            i = 0
        while i < m and obligations[i] not in pending:
            i += 1
        return i

    expansions: dict[frozenset, list[_Branch]] = {}
    raw_edges: dict[tuple, list[tuple[Pred, tuple]]] = {}
    start = (initial, 0)
    queue = [start]
    seen = {start}
    while queue:
        state = queue.pop(0)
        if len(seen) > budget:
            raise BudgetExceededError(
                f"automaton construction exceeded the budget of {budget} states"
            )
        sset, counter = state
        if sset not in expansions:
            expansions[sset] = _expand(sset)
        outgoing: list[tuple[Pred, tuple]] = []
        for lits, nxt, pending in expansions[sset]:
            pred = _branch_pred(lits)
            target = (frozenset(x for x in nxt if x != TRUE), advance(counter, pending))
            outgoing.append((pred, target))
            if target not in seen:
                seen.add(target)
                queue.append(target)
        raw_edges[state] = outgoing

    def state_key(s: tuple) -> tuple:
        return (s[1], tuple(sorted(format_formula(x) for x in s[0])))

    names = _canonical_names(start, lambda s: raw_edges[s], state_key)
    edges = {
        names[s]: tuple(
            (p, names[t])
            for p, t in sorted(raw_edges[s], key=lambda e: (e[0].sort_key(), state_key(e[1])))
        )
        for s in names
    }
    accepting = frozenset(names[s] for s in names if s[1] == m)
    aps = tuple(sorted(support(g)))
    ordered = tuple(sorted(names.values(), key=lambda n: int(n[1:])))
    return Nba(aps, ordered, names[start], edges, accepting)


def nba_accepts_lasso(nba: Nba, word: LassoWord) -> bool:
    """Product-graph membership check: does some run visit an accepting
    state infinitely often on this ultimately periodic word?"""
    n = word.positions
    start = (nba.initial, 0)
    succs: dict[tuple, list[tuple]] = {}
    reach = {start}
    queue = [start]
    while queue:
        q, p = queue.pop(0)
        targets = [(t, word.successor(p)) for t in nba.successors(q, word.event_at(p))]
        succs[(q, p)] = targets
        for node in targets:
            if node not in reach:
                reach.add(node)
                queue.append(node)
    # A good node lies on a cycle through an accepting state.
    for node in reach:
        q, p = node
        if q not in nba.accepting:
            continue
        frontier = list(succs[node])
        visited = set(frontier)
        while frontier:
            cur = frontier.pop()
            if cur == node:
                return True
            for nxt in succs.get(cur, ()):  # only reachable nodes matter
                if nxt not in visited:
                    visited.add(nxt)
                    frontier.append(nxt)
    return False


# ---------------------------------------------------------------------------
# NBA -> DPA (Safra trees with compact order-preserving names)
# ---------------------------------------------------------------------------

_TreeNode = tuple[int, frozenset, tuple]  # name, label, children


def _tree_names(nd: _TreeNode) -> list[int]:
    out = [nd[0]]
    for c in nd[2]:
        out += _tree_names(c)
    return out


def _spawn(nd: _TreeNode, acc: frozenset, ctr: list[int]) -> _TreeNode:
    name, label, children = nd
    newborn = None
    if label & acc:
        newborn = (ctr[0], label & acc, ())
        ctr[0] += 1
    kids = tuple(_spawn(c, acc, ctr) for c in children)
    if newborn is not None:
        kids = kids + (newborn,)
    return (name, label, kids)


def _subset_move(nd: _TreeNode, step: Callable[[frozenset], frozenset]) -> _TreeNode:
    name, label, children = nd
    return (name, step(label), tuple(_subset_move(c, step) for c in children))


def _strip_states(nd: _TreeNode, gone: frozenset) -> _TreeNode:
    name, label, children = nd
    return (name, label - gone, tuple(_strip_states(c, gone) for c in children))


def _hmerge(nd: _TreeNode) -> _TreeNode:
    name, label, children = nd
    claimed: frozenset = frozenset()
    kids = []
    for c in children:
        c = _strip_states(c, claimed)
        claimed |= c[1]
        kids.append(_hmerge(c))
    return (name, label, tuple(kids))


def _remove_empty(nd: _TreeNode) -> tuple[_TreeNode | None, list[int]]:
    name, label, children = nd
    if not label:
        return None, _tree_names(nd)
    kids = []
    dead: list[int] = []
    for c in children:
        c2, d = _remove_empty(c)
        dead += d
        if c2 is not None:
            kids.append(c2)
    return (name, label, tuple(kids)), dead


def _vmerge(nd: _TreeNode) -> tuple[_TreeNode, list[int]]:
    name, label, children = nd
    union: frozenset = frozenset()
    for c in children:
        union |= c[1]
    if children and union == label:
        return (name, label, ()), [name]
    kids = []
    greens: list[int] = []
    for c in children:
        c2, g = _vmerge(c)
        greens += g
        kids.append(c2)
    return (name, label, tuple(kids)), greens


def _compact(nd: _TreeNode) -> _TreeNode:
    mapping = {old: i + 1 for i, old in enumerate(sorted(_tree_names(nd)))}

    def rec(node: _TreeNode) -> _TreeNode:
        name, label, children = node
        return (mapping[name], label, tuple(rec(c) for c in children))

    return rec(nd)


def _tree_step(
    tree: _TreeNode | None,
    acc: frozenset,
    step: Callable[[frozenset], frozenset],
    neutral: int,
) -> tuple[_TreeNode | None, int]:
    """One determinization step; returns the successor tree and the
    transition priority (min-even convention, 1..neutral)."""
    if tree is None:
        return None, 1
    ctr = [max(_tree_names(tree)) + 1]
    t = _spawn(tree, acc, ctr)
    t = _subset_move(t, step)
    t = _hmerge(t)
    t2, dead = _remove_empty(t)
    if t2 is None:
        return None, 1
    t3, greens = _vmerge(t2)
    e = min(dead) if dead else None
    f = min(greens) if greens else None
    if e is not None and (f is None or e < f):
        priority = min(2 * e - 1, neutral)
    elif f is not None:
        priority = 2 * f
    else:
        priority = neutral
    return _compact(t3), priority


def nba_to_dpa(nba: Nba, budget: int = DEFAULT_STATE_BUDGET) -> Dpa:
    """Determinization via compound ordered trees of subset labels.

    Transition priorities (smallest dead node name -> odd, smallest
    breakpoint name -> even, min-even convention) are converted to max-even
    state colors by splitting each tree on the priority of its incoming
    transition: color = K - priority with even K = 2|Q| + 2.
    """
    n_q = len(nba.states)
    neutral = 2 * n_q + 1
    kconst = 2 * n_q + 2
    acc = frozenset(nba.accepting)

    step_cache: dict[tuple[str, frozenset], frozenset] = {}

    def make_step(letter: frozenset) -> Callable[[frozenset], frozenset]:
        def step(label: frozenset) -> frozenset:
            out: frozenset = frozenset()
            for q in label:
                key = (q, letter)
                got = step_cache.get(key)
                if got is None:
                    got = nba.successors(q, letter)
                    step_cache[key] = got
                out |= got
            return out

        return step

    def tree_support(tree: _TreeNode | None) -> tuple[str, ...]:
        if tree is None:
            return ()
        sup: set[str] = set()
        for q in tree[1]:  # root label covers every node's label
            for p, _ in nba.edges[q]:
                sup.update(p.support)
        return tuple(sorted(sup))

    initial_tree: _TreeNode = (1, frozenset({nba.initial}), ())
    start = (initial_tree, 1)
    raw_edges: dict[tuple, list[tuple[Pred, tuple]]] = {}
    seen = {start}
    queue = [start]
    while queue:
        state = queue.pop(0)
        if len(seen) > budget:
            raise BudgetExceededError(
                f"determinization exceeded the budget of {budget} states"
            )
        tree, _color = state
        sup = tree_support(tree)
        if len(sup) > MAX_EXPLICIT_SUPPORT:
            raise BudgetExceededError(
                f"letter expansion over {len(sup)} propositions refused"
            )
        grouped: dict[tuple, Pred] = {}
        for bits in product((False, True), repeat=len(sup)):
            letter = frozenset(p for p, b in zip(sup, bits) if b)
            succ_tree, priority = _tree_step(tree, acc, make_step(letter), neutral)
            target = (succ_tree, kconst - priority)
            cube = Pred.of_letter(letter, sup)
            grouped[target] = grouped.get(target, Pred.false()) | cube
        outgoing = list(grouped.items())
        raw_edges[state] = [(p, t) for t, p in outgoing]
        for t, _p in outgoing:
            if t not in seen:
                seen.add(t)
                queue.append(t)

    def tree_key(tree: _TreeNode | None) -> tuple:
        if tree is None:
            return ()
        name, label, children = tree
        return (name, tuple(sorted(label)), tuple(tree_key(c) for c in children))

    def state_key(s: tuple) -> tuple:
        return (s[1], tree_key(s[0]))

    names = _canonical_names(start, lambda s: raw_edges[s], state_key)
    edges = {
        names[s]: tuple(
            (p, names[t])
            for p, t in sorted(raw_edges[s], key=lambda e: (e[0].sort_key(), state_key(e[1])))
        )
        for s in names
    }
    colors = {names[s]: s[1] for s in names}
    ordered = tuple(sorted(names.values(), key=lambda n: int(n[1:])))
    return Dpa(nba.aps, ordered, names[start], edges, colors)


def ltl_to_dpa(f: Formula, budget: int = DEFAULT_STATE_BUDGET) -> Dpa:
    """Full pipeline: simplify, normalize, tableau, determinize."""
    return nba_to_dpa(ltl_to_nba(simplify(f), budget), budget)


def dpa_accepts_lasso(dpa: Dpa, word: LassoWord) -> bool:
    """Run the stem, then find the cycle of loop-start states and check
    the parity of the highest color on it."""
    state = dpa.initial
    for ev in word.stem:
        state = dpa.step(state, ev)
    entries: dict[str, int] = {}
    traversal_colors: list[list[int]] = []
    while state not in entries:
        entries[state] = len(traversal_colors)
        colors = []
        for ev in word.loop:
            state = dpa.step(state, ev)
            colors.append(dpa.colors[state])
        traversal_colors.append(colors)
    first = entries[state]
    cycle_colors = [c for chunk in traversal_colors[first:] for c in chunk]
    return max(cycle_colors) % 2 == 0


# ---------------------------------------------------------------------------
# Safety fragment: direct deterministic bad-prefix recognizer
# ---------------------------------------------------------------------------


def safety_ltl_to_safety_automaton(
    f: Formula, budget: int = DEFAULT_STATE_BUDGET
) -> SafetyAutomaton:
    """Subset construction over tableau obligations for a syntactic-safety
    formula, followed by a dead-state merge so that the reject sink is
    reached by exactly the bad prefixes."""
    if not classify_syntactic_safety(f):
        raise ValueError(f"not a syntactic safety formula: {format_formula(f)}")
    g = nnf_for_safety(f)
    aps = tuple(sorted(support(g)))

    expansions: dict[frozenset, list[_Branch]] = {}

    def expanded(obligation: frozenset) -> list[_Branch]:
        if obligation not in expansions:
            branches = _expand(obligation)
            assert all(not pending for _, _, pending in branches)
            expansions[obligation] = branches
        return expansions[obligation]

    def normalize(alternatives: Iterable[frozenset]) -> frozenset:
        alts = {frozenset(x for x in alt if x != TRUE) for alt in alternatives}
        if frozenset() in alts:
            return frozenset({frozenset()})
        # Antichain: a smaller obligation set is weaker and subsumes supersets.
        keep = [a for a in alts if not any(b < a for b in alts)]
        return frozenset(keep)

    reject_state: frozenset = frozenset()
    initial = normalize([frozenset({g})])

    raw_edges: dict[frozenset, list[tuple[Pred, frozenset]]] = {}
    seen = {initial, reject_state}
    queue = [initial]
    while queue:
        state = queue.pop(0)
        if len(seen) > budget:
            raise BudgetExceededError(
                f"safety construction exceeded the budget of {budget} states"
            )
        if state == reject_state:
            continue
        sup_set: set[str] = set()
        branch_map: dict[frozenset, list[_Branch]] = {}
        for alt in state:
            branch_map[alt] = expanded(alt)
            for lits, _, _ in branch_map[alt]:
                sup_set.update(
                    l.name if isinstance(l, Atom) else l.arg.name for l in lits
                )
        sup = tuple(sorted(sup_set))
        if len(sup) > MAX_EXPLICIT_SUPPORT:
            raise BudgetExceededError(
                f"letter expansion over {len(sup)} propositions refused"
            )
        grouped: dict[frozenset, Pred] = {}
        for bits in product((False, True), repeat=len(sup)):
            letter = frozenset(p for p, b in zip(sup, bits) if b)
            nexts = []
            for alt in state:
                for lits, nxt, _ in branch_map[alt]:
                    if _branch_pred(lits).evaluate(letter):
                        nexts.append(nxt)
            target = normalize(nexts) if nexts else reject_state
            cube = Pred.of_letter(letter, sup)
            grouped[target] = grouped.get(target, Pred.false()) | cube
        raw_edges[state] = [(p, t) for t, p in grouped.items()]
        for t in grouped:
            if t not in seen:
                seen.add(t)
                queue.append(t)
    raw_edges[reject_state] = [(Pred.true(), reject_state)]

    # Dead-state merge: states that cannot avoid reject forever recognize no
    # infinite word, so they are bad-prefix states themselves.
    alive = {s for s in raw_edges if s != reject_state}
    changed = True
    while changed:
        changed = False
        for s in list(alive):
            if not any(t in alive for _, t in raw_edges[s]):
                alive.discard(s)
                changed = True

    def redirect(t: frozenset) -> frozenset:
        return t if t in alive else reject_state

    merged_edges: dict[frozenset, list[tuple[Pred, frozenset]]] = {}
    for s in raw_edges:
        if s not in alive and s != reject_state:
            continue
        grouped2: dict[frozenset, Pred] = {}
        for p, t in raw_edges[s]:
            t2 = redirect(t)
            grouped2[t2] = grouped2.get(t2, Pred.false()) | p
        merged_edges[s] = [(p, t) for t, p in grouped2.items()]

    start = redirect(initial)

    def state_key(s: frozenset) -> tuple:
        return tuple(sorted(tuple(sorted(format_formula(x) for x in alt)) for alt in s))

    names = _canonical_names(start, lambda s: merged_edges[s], state_key)
    if reject_state not in names:
        names[reject_state] = f"s{len(names)}"
        merged_edges.setdefault(reject_state, [(Pred.true(), reject_state)])
    edges = {
        names[s]: tuple(
            (p, names[t])
            for p, t in sorted(merged_edges[s], key=lambda e: (e[0].sort_key(), state_key(e[1])))
        )
        for s in names
    }
    ordered = tuple(sorted(names.values(), key=lambda n: int(n[1:])))
    return SafetyAutomaton(aps, ordered, names[start], edges, names[reject_state])


def product_automaton(a: SafetyAutomaton, b: SafetyAutomaton) -> SafetyAutomaton:
    """Synchronous product; rejects as soon as either component rejects
    (its bad-prefix set is the union of the components' bad-prefix sets)."""
    aps = tuple(sorted(set(a.aps) | set(b.aps)))
    reject = "reject"
    start: tuple[str, str] | str = (a.initial, b.initial)
    if a.initial == a.reject or b.initial == b.reject:
        start = reject

    def pair_edges(state: tuple[str, str]) -> list[tuple[Pred, tuple[str, str] | str]]:
        qa, qb = state
        out: dict[tuple[str, str] | str, Pred] = {}
        for pa, ta in a.edges[qa]:
            for pb, tb in b.edges[qb]:
                p = pa & pb
                if p.is_false:
                    continue
                tgt: tuple[str, str] | str = (
                    reject if ta == a.reject or tb == b.reject else (ta, tb)
                )
                out[tgt] = out.get(tgt, Pred.false()) | p
        return [(p, t) for t, p in out.items()]

    raw: dict = {reject: [(Pred.true(), reject)]}
    queue = [start]
    seen = {start, reject}
    while queue:
        s = queue.pop(0)
        if s == reject:
            continue
        raw[s] = pair_edges(s)
        for _, t in raw[s]:
            if t not in seen:
                seen.add(t)
                queue.append(t)

    def state_key(s) -> tuple:
        return ("", "") if s == reject else s

    names = _canonical_names(start, lambda s: raw[s], state_key)
    if reject not in names:
        names[reject] = f"s{len(names)}"
        raw.setdefault(reject, [(Pred.true(), reject)])
    edges = {
        names[s]: tuple(
            (p, names[t])
            for p, t in sorted(raw[s], key=lambda e: (e[0].sort_key(), state_key(e[1])))
        )
        for s in names
    }
    ordered = tuple(sorted(names.values(), key=lambda n: int(n[1:])))
    return SafetyAutomaton(aps, ordered, names[start], edges, names[reject])


# ---------------------------------------------------------------------------
# Baking a fixed word into an automaton
# ---------------------------------------------------------------------------


def _restricted_edges(edges, pos, word, fixed, succ_pos):
    out = []
    for p, t in edges:
        relevant = {
            name: name in word.event_at(pos) for name in p.support if name in fixed
        }
        rp = p.restrict(relevant)
        if not rp.is_false:
            out.append((rp, (t, succ_pos)))
    return out


def restrict_dpa_to_word(dpa: Dpa, word: LassoWord, fixed_props: Iterable[str]) -> Dpa:
    """Partial-evaluate the automaton against a fixed ultimately periodic
    word over ``fixed_props``; the result reads only the remaining
    propositions."""
    fixed = frozenset(fixed_props)
    start = (dpa.initial, 0)
    raw: dict[tuple, list] = {}
    seen = {start}
    queue = [start]
    while queue:
        q, pos = queue.pop(0)
        grouped: dict[tuple, Pred] = {}
        for rp, tgt in _restricted_edges(dpa.edges[q], pos, word, fixed, word.successor(pos)):
            grouped[tgt] = grouped.get(tgt, Pred.false()) | rp
        raw[(q, pos)] = [(p, t) for t, p in grouped.items()]
        for _, t in raw[(q, pos)]:
            if t not in seen:
                seen.add(t)
                queue.append(t)

    names = _canonical_names(start, lambda s: raw[s], lambda t: t)
    edges = {
        names[s]: tuple(
            (p, names[t]) for p, t in sorted(raw[s], key=lambda e: (e[0].sort_key(), e[1]))
        )
        for s in names
    }
    colors = {names[(q, pos)]: dpa.colors[q] for (q, pos) in names}
    aps = tuple(a for a in dpa.aps if a not in fixed)
    ordered = tuple(sorted(names.values(), key=lambda n: int(n[1:])))
    return Dpa(aps, ordered, names[start], edges, colors)


def restrict_safety_to_word(
    aut: SafetyAutomaton, word: LassoWord, fixed_props: Iterable[str]
) -> SafetyAutomaton:
    """Safety analogue of :func:`restrict_dpa_to_word`; the reject sink
    stays a single absorbing state."""
    fixed = frozenset(fixed_props)
    reject = "reject"
    start: tuple | str = (aut.initial, 0) if aut.initial != aut.reject else reject
    raw: dict = {reject: [(Pred.true(), reject)]}
    seen = {start, reject}
    queue = [start] if start != reject else []
    while queue:
        state = queue.pop(0)
        q, pos = state
        grouped: dict = {}
        for rp, (t, npos) in _restricted_edges(
            aut.edges[q], pos, word, fixed, word.successor(pos)
        ):
            tgt = reject if t == aut.reject else (t, npos)
            grouped[tgt] = grouped.get(tgt, Pred.false()) | rp
        raw[state] = [(p, t) for t, p in grouped.items()]
        for _, t in raw[state]:
            if t not in seen:
                seen.add(t)
                queue.append(t)

    def state_key(s) -> tuple:
        return ("", -1) if s == reject else s

    names = _canonical_names(start, lambda s: raw[s], state_key)
    if reject not in names:
        names[reject] = f"s{len(names)}"
    edges = {
        names[s]: tuple(
            (p, names[t])
            for p, t in sorted(raw[s], key=lambda e: (e[0].sort_key(), state_key(e[1])))
        )
        for s in names
    }
    aps = tuple(a for a in aut.aps if a not in fixed)
    ordered = tuple(sorted(names.values(), key=lambda n: int(n[1:])))
    return SafetyAutomaton(aps, ordered, names[start], edges, names[reject])


# ---------------------------------------------------------------------------
# HOA export
# ---------------------------------------------------------------------------


def _parity_max_even_formula(colors: int) -> str:
    def rec(h: int) -> str:
        if h == 0:
            return "Inf(0)"
        if h % 2 == 0:
            return f"Inf({h}) | (Fin({h}) & ({rec(h - 1)}))"
        return f"Fin({h}) & ({rec(h - 1)})"

    return rec(colors - 1) if colors > 0 else "f"


def _pred_to_hoa(p: Pred, ap_index: dict[str, int]) -> str:
    if p.is_true:
        return "t"
    if p.is_false:
        return "f"
    terms = []
    for letter in p.assignments():
        lits = [
            (str(ap_index[name]) if name in letter else f"!{ap_index[name]}")
            for name in p.support
        ]
        terms.append(" & ".join(lits))
    return " | ".join(terms)


def dpa_to_hoa(dpa: Dpa) -> str:
    """Hanoi Omega-Automata text form of the parity automaton."""
    ncolors = max(dpa.colors.values()) + 1
    ap_index = {a: i for i, a in enumerate(dpa.aps)}
    state_index = {s: i for i, s in enumerate(dpa.states)}
    lines = [
        "HOA: v1",
        f"States: {len(dpa.states)}",
        f"Start: {state_index[dpa.initial]}",
        f"AP: {len(dpa.aps)} " + " ".join(f'"{a}"' for a in dpa.aps),
        f"acc-name: parity max even {ncolors}",
        f"Acceptance: {ncolors} {_parity_max_even_formula(ncolors)}",
        "--BODY--",
    ]
    for s in dpa.states:
        lines.append(f"State: {state_index[s]} {{{dpa.colors[s]}}}")
        for p, t in dpa.edges[s]:
            lines.append(f"[{_pred_to_hoa(p, ap_index)}] {state_index[t]}")
    lines.append("--END--")
    return "\n".join(lines) + "\n"
