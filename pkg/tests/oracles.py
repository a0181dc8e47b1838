"""Reference implementations used as test oracles."""
from __future__ import annotations


def is_source(g, w) -> bool:
    return not g.unknown[w] or not g.predecessors(w)


def closest_sources_by_paths(g, v) -> set[int]:
    """Sources with a walk to ``v`` whose inner vertices are non-sources.

    Works forwards from each source separately: a breadth-first walk that
    may only continue through non-source vertices.
    """
    found = set()
    for w in range(g.n):
        if w == v or not is_source(g, w):
            continue
        seen, frontier = {w}, [w]
        while frontier and w not in found:
            nxt = []
            for u in frontier:
                for x in g.successors(u):
                    if x == v:
                        found.add(w)
                    elif x not in seen and not is_source(g, x):
                        seen.add(x)
                        nxt.append(x)
            frontier = nxt
    return found


def select_by_paths(g) -> set[int]:
    """Candidates all of whose closest sources have a concrete given type."""
    out = set()
    for v in range(g.n):
        if g.is_site[v] and g.unknown[v]:
            if all(not g.unknown[w] for w in closest_sources_by_paths(g, v)):
                out.add(v)
    return out
