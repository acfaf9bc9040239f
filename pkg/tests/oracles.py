"""Slow reference implementations that share no code with the package."""

from __future__ import annotations

import itertools


def _acyclic(n, edges):
    adj = {v: [b for a, b in edges if a == v] for v in range(n)}
    state = [0] * n

    def visit(v):
        state[v] = 1
        for w in adj[v]:
            if state[w] == 1 or (state[w] == 0 and not visit(w)):
                return False
        state[v] = 2
        return True

    return all(state[v] or visit(v) for v in range(n))


def labeled_dags(n):
    """Every DAG on labeled nodes 0..n-1 as a frozenset of arcs."""
    pairs = list(itertools.combinations(range(n), 2))
    out = []
    for choice in itertools.product((0, 1, 2), repeat=len(pairs)):
        edges = set()
        for (a, b), c in zip(pairs, choice):
            if c == 1:
                edges.add((a, b))
            elif c == 2:
                edges.add((b, a))
        if _acyclic(n, edges):
            out.append(frozenset(edges))
    return out


def iso_key(n, edges):
    return min(tuple(sorted((p[a], p[b]) for a, b in edges)) for p in itertools.permutations(range(n)))


def descendants(edges, v):
    seen, stack = {v}, [v]
    while stack:
        u = stack.pop()
        for a, b in edges:
            if a == u and b not in seen:
                seen.add(b)
                stack.append(b)
    return seen


def d_separated(n, edges, x, y, z):
    """True when every simple path between x and y is blocked by z."""
    z = set(z)
    nbrs = {v: set() for v in range(n)}
    for a, b in edges:
        nbrs[a].add(b)
        nbrs[b].add(a)

    def paths(cur, seen):
        if cur == y:
            yield [cur]
            return
        for w in nbrs[cur]:
            if w not in seen:
                for rest in paths(w, seen | {w}):
                    yield [cur] + rest

    for path in paths(x, {x}):
        blocked = False
        for i in range(1, len(path) - 1):
            prev, mid, nxt = path[i - 1], path[i], path[i + 1]
            collider = (prev, mid) in edges and (nxt, mid) in edges
            if collider:
                if not (descendants(edges, mid) & z):
                    blocked = True
            elif mid in z:
                blocked = True
            if blocked:
                break
        if not blocked:
            return False
    return True


def pattern_bits(n_total, edges, observed):
    """Dependency bits over observed variables, evidence sets by size then lexicographic."""
    k = len(observed)
    bits = []
    for size in range(k - 1):
        for s in itertools.combinations(range(k), size):
            rest = [v for v in range(k) if v not in s]
            for a, b in itertools.combinations(rest, 2):
                sep = d_separated(n_total, edges, observed[a], observed[b], [observed[v] for v in s])
                bits.append(not sep)
    return tuple(bits)
