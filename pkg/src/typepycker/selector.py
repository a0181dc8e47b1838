"""Choose which inferred annotations to append.

A candidate (variable, parameter or return vertex whose given type contains
``*``) keeps its inferred type only when every closest source vertex that
reaches it along the data flow has a fully concrete given type. Sources are
vertices with a concrete given type (clean) or with no incoming edge (dirty
when their given type contains ``*``).

:func:`select` decides all candidates with one forward propagation from the
dirty sources, linear in the size of the graph. :func:`closest_sources` is
the per-vertex declarative form, used for explanations and as a test oracle.
"""
from __future__ import annotations

from collections import deque
from enum import Enum

from .flowgraph import FlowGraph
from .types import Type

AnnotationSet = dict  # Site (BindingId | ReturnOf) -> Type


class SourceClass(str, Enum):
    CLEAN = "clean-source"
    DIRTY = "dirty-source"
    INTERIOR = "interior"


def classify(g: FlowGraph) -> list[SourceClass]:
    out = []
    ptr = g.pred_ptr
    for i in range(g.n):
        if not g.unknown[i]:
            out.append(SourceClass.CLEAN)
        elif ptr[i] == ptr[i + 1]:
            out.append(SourceClass.DIRTY)
        else:
            out.append(SourceClass.INTERIOR)
    return out


def candidates(g: FlowGraph) -> set[int]:
    return {i for i in range(g.n) if g.is_site[i] and g.unknown[i]}


def closest_sources(g: FlowGraph, v: int) -> set[int]:
    """Sources ``w != v`` with a path to ``v`` whose inner vertices are all non-sources."""
    cls = classify(g)
    found: set[int] = set()
    seen = {v}
    stack = [v]
    while stack:
        u = stack.pop()
        for w in g.predecessors(u):
            if w in seen:
                continue
            seen.add(w)
            if cls[w] is SourceClass.INTERIOR:
                stack.append(w)
            else:
                found.add(w)
    return found


def tainted(g: FlowGraph) -> bytearray:
    """Mark every vertex reachable from a dirty source through interior vertices only.

    Dirty sources start the walk but are not marked themselves (they have no
    incoming edge); clean sources stop it.
    """
    n = g.n
    unknown = g.unknown
    pred_ptr, succ_ptr, succ_idx = g.pred_ptr, g.succ_ptr, g.succ_idx
    marked = bytearray(n)
    work = deque(i for i in range(n) if unknown[i] and pred_ptr[i] == pred_ptr[i + 1])
    pop, push = work.pop, work.append
    while work:
        u = pop()
        for j in range(succ_ptr[u], succ_ptr[u + 1]):
            w = succ_idx[j]
            if not marked[w] and unknown[w]:
                # w has an incoming edge, so an unknown-typed w is interior
                marked[w] = 1
                push(w)
    return marked


def selected_vertices(g: FlowGraph) -> set[int]:
    marked = tainted(g)
    is_site, unknown = g.is_site, g.unknown
    return {i for i in range(g.n) if is_site[i] and unknown[i] and not marked[i]}


def select(g: FlowGraph) -> AnnotationSet:
    """Annotation sites to append, mapped to their inferred types.

    Selected sites whose inferred type equals the given type are left out,
    since appending them would change nothing.
    """
    out: AnnotationSet = {}
    for i in sorted(selected_vertices(g)):
        t: Type = g.inferred[i]
        if t != g.given[i] and g.origins[i] is not None:
            out[g.origins[i]] = t
    return out
