"""Program variants: append annotations, and the fast-slow function split."""
from __future__ import annotations

from dataclasses import replace
from enum import Enum

from .errors import UnknownSite
from .resolve import FUNCTION, PARAM, VAR, BindingId, Resolved, ReturnOf, points_to, resolve_names
from .selector import AnnotationSet
from .syntax import Assign, Call, Def, Param, Program, Var, clone, rebuild, walk_program
from .types import is_subtype


class VariantKind(str, Enum):
    GIVEN = "given"
    INFER = "infer"
    CHOSEN = "chosen"


def _edits(res: Resolved, sites: AnnotationSet) -> dict:
    """Map node nid -> new annotation for every node a site touches."""
    edits = {}
    for site, t in sites.items():
        if not res.has_site(site):
            raise UnknownSite(f"no annotation site {site} in this program", getattr(site, "span", None))
        if isinstance(site, ReturnOf):
            edits[res.defs[site.fn].nid] = t
        elif site.kind == VAR:
            for a in res.assigns[site]:
                edits[a.nid] = t
        else:
            d = _def_by_nid(res, site.scope)
            for prm in d.params:
                if prm.name == site.name:
                    edits[prm.nid] = t
    return edits


def _def_by_nid(res: Resolved, nid: int) -> Def:
    for d in res.defs.values():
        if d.nid == nid:
            return d
    raise KeyError(nid)


def _apply_edits(stmts, edits: dict):
    def fn(n):
        t = edits.get(n.nid)
        if t is None:
            return None
        if isinstance(n, Def):
            return replace(n, ret=t)
        if isinstance(n, (Assign, Param)):
            return replace(n, annot=t)
        return None
    return tuple(rebuild(s, fn) for s in stmts)


def annotate(p: Program, sites: AnnotationSet, res: Resolved | None = None) -> Program:
    """Replace each site's annotation with the mapped type; node ids are kept."""
    if not sites:
        return p
    res = res or resolve_names(p)
    edits = _edits(res, sites)
    return Program(_apply_edits(p.stmts, edits), dict(p.prelude), dict(p.prelude_spans))


def _names(p: Program) -> set[str]:
    out = set(p.prelude)
    for n in walk_program(p):
        if isinstance(n, (Def, Assign, Param, Var)):
            out.add(n.name)
    return out


def _fast_name(name: str, taken: set[str]) -> str:
    cand, k = f"{name}_fast", 2
    while cand in taken:
        cand, k = f"{name}_fast{k}", k + 1
    taken.add(cand)
    return cand


def fast_slow(p: Program, sites: AnnotationSet) -> Program:
    """Split each function with param/return sites into an annotated fast copy and
    the unmodified original, and send call sites to the fast copy when the
    arguments' static types already fit it.

    Variable sites are applied in place, since locals never cross a call.
    """
    from .runtime.elaborate import elaborate

    res = resolve_names(p)
    var_sites = {s: t for s, t in sites.items() if isinstance(s, BindingId) and s.kind == VAR}
    fn_sites: dict[BindingId, dict] = {}
    for s, t in sites.items():
        if isinstance(s, ReturnOf):
            fn_sites.setdefault(s.fn, {})[s] = t
        elif isinstance(s, BindingId) and s.kind == PARAM:
            fn = res.def_binding[_def_by_nid(res, s.scope).nid]
            fn_sites.setdefault(fn, {})[s] = t
        elif s not in var_sites:
            raise UnknownSite(f"no annotation site {s} in this program", getattr(s, "span", None))
    for s in sites:
        if not res.has_site(s):
            raise UnknownSite(f"no annotation site {s} in this program", getattr(s, "span", None))
    if not fn_sites:
        return annotate(p, var_sites, res)

    edits = _edits(res, var_sites)
    stmts = _apply_edits(p.stmts, edits)
    taken = _names(p)
    fast_of: dict[str, tuple[str, dict]] = {}   # original Def nid -> (fast name, edits)
    for fn, fsites in sorted(fn_sites.items(), key=lambda kv: (kv[0].span, kv[0].name)):
        d = res.defs[fn]
        fast_of[d.nid] = (_fast_name(fn.name, taken), _edits(res, fsites))

    def split(body):
        out = []
        for s in body:
            if isinstance(s, Def):
                s = replace(s, body=split(s.body)) if any(isinstance(b, Def) for b in s.body) else s
                if s.nid in fast_of:
                    name, fedits = fast_of[s.nid]
                    annotated = _apply_edits((s,), fedits)[0]
                    out.append(replace(clone(annotated), name=name))
            out.append(s)
        return tuple(out)

    p2 = Program(split(stmts), dict(p.prelude), dict(p.prelude_spans))
    res2 = resolve_names(p2)
    cm2 = points_to(res2)
    static = elaborate(res2).types
    slow = set(fast_of)
    fast_binding = {}
    for b, d in res2.defs.items():
        if d.nid in fast_of:
            name = fast_of[d.nid][0]
            fast_binding[b] = (name, res2.declared[BindingId(FUNCTION, name, b.scope)])

    rewrites = {}
    for n in walk_program(p2):
        if not isinstance(n, Call) or not isinstance(n.callee, Var):
            continue
        target = res2.refs[n.callee.nid]
        if target.kind != FUNCTION or target not in fast_binding:
            continue
        if cm2.get(n.nid) != frozenset({target}) or _inside(res2, n, slow):
            continue
        name, ftype = fast_binding[target]
        if len(ftype.params) != len(n.args):
            continue
        if all(is_subtype(static[a.nid], pt) for a, pt in zip(n.args, ftype.params)):
            rewrites[n.callee.nid] = name

    def redirect(n):
        name = rewrites.get(n.nid)
        return replace(n, name=name) if name is not None and isinstance(n, Var) else None

    return Program(tuple(rebuild(s, redirect) for s in p2.stmts), dict(p.prelude), dict(p.prelude_spans))


def _inside(res: Resolved, node, defs: set[int]) -> bool:
    """True when ``node`` sits (at any depth) in the body of a Def whose nid is in ``defs``."""
    d = res.owner.get(node.nid)
    while d is not None:
        if d.nid in defs:
            return True
        d = res.owner.get(d.nid)
    return False


def variant_sites(analysis, kind: VariantKind | str) -> AnnotationSet:
    kind = VariantKind(kind)
    if kind is VariantKind.GIVEN:
        return {}
    if kind is VariantKind.INFER:
        return analysis.inferred_sites
    return dict(analysis.chosen)


def make_variant(p: Program, kind: VariantKind | str, fast: bool = False, analysis=None) -> Program:
    if analysis is None:
        from .analysis import analyze
        analysis = analyze(p)
    sites = variant_sites(analysis, kind)
    return fast_slow(p, sites) if fast else annotate(p, sites, analysis.resolved)
