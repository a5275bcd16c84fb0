"""Direct checker of the correctness conditions on concrete pseudo-terms.

A door node ``PDoor(k, t)`` stands for |k| unit doors (``§`` when k > 0,
``§-`` when k < 0); all door words are evaluated unit by unit.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

from . import constraints as C
from . import decor as D
from . import fterm as F
from .decor import DBang, DForall, DLolli, DPara, PApp, PDoor, PLam, PTApp, PTLam, PVar


@dataclass
class Violation(Exception):
    condition: str
    clause: str
    path: tuple
    message: str

    def __str__(self):
        where = f"{self.condition} ({self.clause})" if self.clause else self.condition
        return f"{where} at {D.show_path(self.path)}: {self.message}"

    def as_dict(self) -> dict:
        return {"condition": self.condition, "clause": self.clause,
                "path": D.show_path(self.path), "message": self.message}


def unit_word(exps) -> list:
    """Expand door exponents into a word over {+1, -1}."""
    return [1 if k > 0 else -1 for k in exps for _ in range(abs(k))]


def prefix_sums(word) -> list:
    out, s = [0], 0
    for d in word:
        s += d
        out.append(s)
    return out


def weakly_bracketed(word) -> bool:
    return min(prefix_sums(word)) >= 0


def well_bracketed(word) -> bool:
    return weakly_bracketed(word) and sum(word) == 0


def _word(t, path):
    return unit_word(C.doors(t, path))


# ---------------------------------------------------------------- regularity


def check_regular(t: D.PTerm):
    for path, s in D.occurrences(t):
        if isinstance(s, PDoor):
            if s.exp == 0:
                raise Violation("regular", "door", path, "door with exponent 0")
            if isinstance(s.body, PDoor) and (s.body.exp > 0) != (s.exp > 0):
                raise Violation("regular", "adjacent", path, "opposite doors are adjacent")


# ---------------------------------------------------------------- local typing


def _wf(a, bang_ok: bool) -> bool:
    """Star-form well-formedness: '!' only on binder types and arrow domains."""
    if isinstance(a, DBang):
        return bang_ok and _wf(a.body, False)
    if isinstance(a, DLolli):
        return _wf(a.dom, True) and _wf(a.cod, False)
    if isinstance(a, (DForall, DPara)):
        return _wf(a.body, False)
    return isinstance(a, D.DVar)


def check_local_typing(t: D.PTerm, env: Optional[dict] = None) -> dict:
    """Output DLAL* type of every occurrence; raises Violation on failure."""
    types: dict = {}
    free = dict(env or {})
    counts: dict = {}

    def go(t, path, scope):
        if isinstance(t, PVar):
            key = scope.get(t.name, ("free", t.name))
            declared = key[2] if key[0] == "bound" else free.setdefault(t.name, t.type)
            if not D.dtype_eq(declared, t.type):
                raise Violation("local typing", "i", path,
                                f"occurrence of {t.name} typed {D.show_dtype(t.type)}, "
                                f"declared {D.show_dtype(declared)}")
            if not _wf(t.type, True):
                raise Violation("local typing", "i", path, "ill-formed variable type")
            counts.setdefault(key[:2], (t.name, []))[1].append((path, t.type))
            out = DPara(t.type.body) if isinstance(t.type, DBang) else t.type
        elif isinstance(t, PDoor):
            out = go(t.body, path + (0,), scope)
            if t.exp > 0:
                out = D.para(t.exp, out)
            for _ in range(-t.exp):
                if not isinstance(out, DPara):
                    raise Violation("local typing", "i", path,
                                    f"'§-' applied to non-§ type {D.show_dtype(out)}")
                out = out.body
        elif isinstance(t, PLam):
            if not _wf(t.type, True):
                raise Violation("local typing", "i", path, "ill-formed binder type")
            body = go(t.body, path + (0,), {**scope, t.var: ("bound", path, t.type)})
            out = DLolli(t.type, body)
        elif isinstance(t, PApp):
            f = go(t.fun, path + (0,), scope)
            u = go(t.arg, path + (1,), scope)
            if not isinstance(f, DLolli):
                raise Violation("local typing", "i", path,
                                f"operator has type {D.show_dtype(f)}, not an arrow")
            want = DPara(f.dom.body) if isinstance(f.dom, DBang) else f.dom
            if not D.dtype_eq(want, u):
                raise Violation("local typing", "i", path,
                                f"operand has type {D.show_dtype(u)}, expected {D.show_dtype(want)}")
            out = f.cod
        elif isinstance(t, PTLam):
            for name, key in scope.items():
                if key[0] == "bound" and t.tvar in D.dtype_ftv(key[2]) and \
                        _occurs_free(t.body, name):
                    raise Violation("local typing", "iii", path,
                                    f"{t.tvar} is free in the type of {name}")
            for name, ty in free.items():
                if t.tvar in D.dtype_ftv(ty) and _occurs_free(t.body, name):
                    raise Violation("local typing", "iii", path,
                                    f"{t.tvar} is free in the type of {name}")
            out = DForall(t.tvar, go(t.body, path + (0,), scope))
        else:
            f = go(t.fun, path + (0,), scope)
            if not isinstance(f, DForall):
                raise Violation("local typing", "i", path,
                                f"type application of {D.show_dtype(f)}")
            if not _wf(t.type, False):
                raise Violation("local typing", "i", path, "type argument is not a linear type")
            out = D.dtype_subst(f.body, f.var, t.type)
        types[path] = out
        return out

    go(t, (), {})
    for name, occ in counts.values():
        if len(occ) > 1 and not isinstance(occ[0][1], DBang):
            raise Violation("local typing", "ii", occ[1][0],
                            f"variable {name} occurs more than once with a linear type")
    return types


def _occurs_free(t, name) -> bool:
    return any(v.name == name for _, v in C.free_occurrences(t))


# ---------------------------------------------------------------- bracketing


def check_bracketing(t: D.PTerm):
    for path, x in C.free_occurrences(t):
        if not well_bracketed(_word(t, path)):
            raise Violation("bracketing", "i", path,
                            f"doors to free variable {x.name} are not well-bracketed")
    for path, s in D.occurrences(t):
        if isinstance(s, PLam):
            if not weakly_bracketed(_word(t, path)):
                raise Violation("bracketing", "ii", path,
                                "doors to abstraction are not weakly well-bracketed")
            body = path + (0,)
            for rel, v in D.occurrences(s.body):
                if isinstance(v, PVar) and v.name == s.var and \
                        not _rebound(s.body, rel, s.var) and \
                        not well_bracketed(_word(s.body, rel)):
                    raise Violation("bracketing", "iii", body + rel,
                                    f"doors from binder body to {v.name} are not well-bracketed")


def _rebound(t, rel, name) -> bool:
    """True when the occurrence at rel is captured by an inner binder of name."""
    for step in rel:
        if isinstance(t, PLam) and t.var == name:
            return True
        t = D.children(t)[step]
    return False


# ---------------------------------------------------------------- bang


def _unit_subterms(u):
    """(door sum, path, node) for every unit-level subterm occurrence of u.

    The intermediate positions inside a multi-unit door count as subterms of
    their own (node None).
    """
    def go(t, path, s):
        yield s, path, t
        if isinstance(t, PDoor):
            step = 1 if t.exp > 0 else -1
            for j in range(1, abs(t.exp)):
                yield s + step * j, path, None
            yield from go(t.body, path + (0,), s + t.exp)
        else:
            for i, k in enumerate(D.children(t)):
                yield from go(k, path + (i,), s)

    return go(u, (), 0)


def check_bang(t: D.PTerm, types: dict):
    for path, s in D.occurrences(t):
        if not isinstance(s, PApp):
            continue
        f = types[path + (0,)]
        if not (isinstance(f, DLolli) and isinstance(f.dom, DBang)):
            continue
        upath = path + (1,)
        frees = list(C.free_occurrences(s.arg))
        if len(frees) > 1:
            raise Violation("bang", "i", upath,
                            f"bang subterm has {len(frees)} free variable occurrences")
        x_rel = None
        if frees:
            x_rel, x = frees[0]
            if not isinstance(x.type, DBang):
                raise Violation("bang", "i", upath + x_rel,
                                f"free variable {x.name} of a bang subterm has a linear type")
        for k, rel, v in _unit_subterms(s.arg):
            if rel == () and v is s.arg:
                continue
            if rel == x_rel and v is not None:
                if k < 0:
                    raise Violation("bang", "ii", upath + rel,
                                    "distinguished variable under negative door balance")
                continue
            if k < 1:
                raise Violation("bang", "ii", upath + rel,
                                f"proper subterm of a bang subterm at door depth {k}")


# ---------------------------------------------------------------- scope


def check_scope(t: D.PTerm, types: dict):
    for path, s in D.occurrences(t):
        if not isinstance(s, PTLam):
            continue
        upath = path + (0,)
        for rel, v in D.occurrences(s.body):
            if s.tvar in D.dtype_ftv(types[upath + rel]) and \
                    not weakly_bracketed(_word(s.body, rel)):
                raise Violation("scope", "", upath + rel,
                                f"subterm depending on {s.tvar} escapes its scope")


# ---------------------------------------------------------------- all


def verify_all(t: D.PTerm, env: Optional[dict] = None) -> Optional[Violation]:
    """First violated condition, or None when the pseudo-term is correct.

    Order: local typing, bracketing, bang, scope, then regularity.
    """
    try:
        types = check_local_typing(t, env)
        check_bracketing(t)
        check_bang(t, types)
        check_scope(t, types)
        check_regular(t)
    except Violation as v:
        return v
    return None


def free_context(t: D.PTerm) -> dict:
    """Free variables with their type and whether they sit in the bang context."""
    out = {}
    for _, x in C.free_occurrences(t):
        out.setdefault(x.name, {"type": D.show_dtype(D.star_inverse(x.type))
                                if not isinstance(x.type, DBang)
                                else D.show_dtype(D.star_inverse(x.type.body)),
                                "nonlinear": isinstance(x.type, DBang)})
    return out


# ---------------------------------------------------------------- bounded search


class CapExceeded(RuntimeError):
    pass


def bounded_search(m: F.FTerm, bound: int, cap: int = 2_000_000, prune: bool = False,
                   limit: Optional[int] = None) -> list:
    """Admissible instantiations with integers in [-bound..bound] passing verify_all.

    The plain mode enumerates the whole box and refuses when it has more than
    ``cap`` points. With ``prune=True`` the enumeration is a depth-first walk
    that cuts a branch as soon as a generated constraint atom with all its
    parameters assigned is violated; leaves are still checked by verify_all.
    """
    gen = C.gen_all(m)
    dec = gen.decoration
    bools, ints = dec.bool_params(), dec.int_params()
    values = range(-bound, bound + 1)
    found = []
    if not prune:
        size = (2 * bound + 1) ** len(ints) * 2 ** len(bools)
        if size > cap:
            raise CapExceeded(f"{size} instantiations exceed the cap of {cap}")
        for bv in itertools.product((0, 1), repeat=len(bools)):
            for iv in itertools.product(values, repeat=len(ints)):
                phi = D.Instantiation(dict(zip(bools, bv)), dict(zip(ints, iv)))
                if _passes(dec.term, phi):
                    found.append(phi)
                    if limit and len(found) >= limit:
                        return found
        return found

    order = bools + ints
    pos = {p: i for i, p in enumerate(order)}
    watch = [[] for _ in order]
    for atom in gen.store:
        _, last = _atom_span(atom, pos)
        watch[last].append(atom)
    phi = D.Instantiation({}, {})
    nodes = 0

    def dfs(i):
        nonlocal nodes
        nodes += 1
        if nodes > cap:
            raise CapExceeded(f"pruned search visited more than {cap} nodes")
        if i == len(order):
            if _passes(dec.term, phi):
                found.append(D.Instantiation(dict(phi.bools), dict(phi.ints)))
            return
        p = order[i]
        target = phi.bools if p in bools else phi.ints
        for v in ((0, 1) if p in bools else values):
            target[p] = v
            if all(a.holds(phi) for a in watch[i]):
                dfs(i + 1)
                if limit and len(found) >= limit:
                    break
        target.pop(p, None)

    dfs(0)
    return found


def _atom_span(atom, pos) -> tuple:
    params = []
    for f in ("a", "b"):
        v = getattr(atom, f, None)
        if isinstance(v, str):
            params.append(v)
    for f in ("c", "lhs", "rhs"):
        v = getattr(atom, f, None)
        if isinstance(v, D.LinComb):
            params.extend(v.params())
    idx = [pos[p] for p in params] or [0]
    return min(idx), max(idx)


def _passes(term, phi) -> bool:
    if D.admissibility_violation(term, phi):
        return False
    return verify_all(D.instantiate(term, phi)) is None
