"""Output p-types and the constraint store Ltype + Bracket + Bang + Scope."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from . import decor as D
from . import fterm as F
from .decor import LinComb, PBang, PLin, SkArrow, SkForall, SkVar, ZERO


class UnificationError(ValueError):
    pass


# ---------------------------------------------------------------- atoms


def _prov():
    return field(default=("", ()), compare=False, repr=False)


@dataclass(frozen=True)
class BoolEq:
    a: str
    b: str
    prov: tuple = _prov()
    cls = "B"

    def holds(self, phi: D.Instantiation) -> bool:
        return phi.b(self.a) == phi.b(self.b)

    def __str__(self):
        return f"{self.a} = {self.b}"


@dataclass(frozen=True)
class BoolConst:
    b: str
    value: int
    prov: tuple = _prov()
    cls = "B"

    def holds(self, phi):
        return phi.b(self.b) == self.value

    def __str__(self):
        return f"{self.b} = {self.value}"


@dataclass(frozen=True)
class BoolImpl:
    """``a = 1 => b = 1``."""
    a: str
    b: str
    prov: tuple = _prov()
    cls = "B"

    def holds(self, phi):
        return phi.b(self.a) == 0 or phi.b(self.b) == 1

    def __str__(self):
        return f"{self.a} = 1 => {self.b} = 1"


@dataclass(frozen=True)
class LinEq:
    lhs: LinComb
    rhs: LinComb
    prov: tuple = _prov()
    cls = "L"

    def holds(self, phi):
        return phi.i(self.lhs) == phi.i(self.rhs)

    def row(self) -> tuple:
        d = self.lhs.as_dict()
        for p, c in self.rhs.terms:
            d[p] = d.get(p, 0) - c
        return d, "=", 0

    def __str__(self):
        return f"{self.lhs} = {self.rhs}"


@dataclass(frozen=True)
class LinGeq:
    c: LinComb
    k: int
    prov: tuple = _prov()
    cls = "L"

    def holds(self, phi):
        return phi.i(self.c) >= self.k

    def row(self):
        return self.c.as_dict(), ">=", self.k

    def __str__(self):
        return f"{self.c} >= {self.k}"


@dataclass(frozen=True)
class LinConst:
    """``c = k``; only produced when a goal type is imposed."""
    c: LinComb
    k: int
    prov: tuple = _prov()
    cls = "L"

    def holds(self, phi):
        return phi.i(self.c) == self.k

    def row(self):
        return self.c.as_dict(), "=", self.k

    def __str__(self):
        return f"{self.c} = {self.k}"


@dataclass(frozen=True)
class Mixed:
    """``b = 1 => c >= k``."""
    b: str
    c: LinComb
    k: int = 1
    prov: tuple = _prov()
    cls = "M"

    def holds(self, phi):
        return phi.b(self.b) == 0 or phi.i(self.c) >= self.k

    def guarded(self) -> LinGeq:
        return LinGeq(self.c, self.k, self.prov)

    def __str__(self):
        return f"{self.b} = 1 => {self.c} >= {self.k}"


Atom = Union[BoolEq, BoolConst, BoolImpl, LinEq, LinGeq, LinConst, Mixed]


def _canonical(atom):
    """Drop trivially true atoms; cancel common terms of equations."""
    if isinstance(atom, BoolEq):
        if atom.a == atom.b:
            return None
        a, b = sorted((atom.a, atom.b), key=D.param_key)
        return BoolEq(a, b, atom.prov)
    if isinstance(atom, LinEq):
        d, _, _ = atom.row()
        lhs = LinComb.from_dict({p: c for p, c in d.items() if c > 0})
        rhs = LinComb.from_dict({p: -c for p, c in d.items() if c < 0})
        if not lhs and not rhs:
            return None
        if D.param_key(lhs.params()[0] if lhs else "~") > D.param_key(rhs.params()[0] if rhs else "~"):
            lhs, rhs = rhs, lhs
        return LinEq(lhs, rhs, atom.prov)
    if isinstance(atom, LinGeq) and not atom.c.terms and atom.k <= 0:
        return None
    if isinstance(atom, Mixed) and not atom.c.terms and atom.k <= 0:
        return None
    return atom


class Store:
    """Deduplicated constraint atoms, each keeping its first provenance."""

    def __init__(self):
        self._atoms: dict = {}

    def add(self, atom, rule: str, path: tuple):
        atom = _canonical(atom)
        if atom is None:
            return
        if atom not in self._atoms:
            object.__setattr__(atom, "prov", (rule, path))
            self._atoms[atom] = len(self._atoms)

    def extend(self, atoms, rule: str, path: tuple):
        for a in atoms:
            self.add(a, rule, path)

    def __iter__(self):
        return iter(self._atoms)

    def __len__(self):
        return len(self._atoms)

    def __contains__(self, atom):
        return atom in self._atoms

    def of_class(self, cls: str) -> list:
        return [a for a in self._atoms if a.cls == cls]

    @property
    def boolean(self):
        return self.of_class("B")

    @property
    def linear(self):
        return self.of_class("L")

    @property
    def mixed(self):
        return self.of_class("M")

    def counts(self) -> dict:
        return {"boolean": len(self.boolean), "linear": len(self.linear),
                "mixed": len(self.mixed)}

    def params(self) -> tuple:
        """(boolean parameters, integer parameters) mentioned by some atom."""
        bools, ints = set(), set()
        for a in self._atoms:
            if isinstance(a, (BoolEq, BoolImpl)):
                bools |= {a.a, a.b}
            elif isinstance(a, BoolConst):
                bools.add(a.b)
            elif isinstance(a, LinEq):
                ints |= set(a.lhs.params()) | set(a.rhs.params())
            else:
                ints |= set(a.c.params())
                if isinstance(a, Mixed):
                    bools.add(a.b)
        return sorted(bools, key=D.param_key), sorted(ints, key=D.param_key)

    def violated(self, phi: D.Instantiation) -> list:
        return [a for a in self._atoms if not a.holds(phi)]

    def dump(self) -> str:
        order = sorted(self._atoms.items(), key=lambda kv: (kv[0].prov[1], kv[1]))
        return "\n".join(f"{a.cls} | {a} | {a.prov[0]} | {D.show_path(a.prov[1])}"
                         for a, _ in order)


# ---------------------------------------------------------------- unification & admissibility


def unify(e1, e2) -> list:
    """Atoms making two p-types instantiate identically; raises on skeleton mismatch."""
    out = []
    if isinstance(e1, PBang) != isinstance(e2, PBang):
        raise UnificationError("bang and linear p-types do not unify")
    if isinstance(e1, PBang):
        out.append(BoolEq(e1.b, e2.b))
    out.append(LinEq(e1.c, e2.c))
    s1, s2 = e1.sk, e2.sk
    if isinstance(s1, SkVar) and isinstance(s2, SkVar):
        if s1.name != s2.name:
            raise UnificationError(f"type variables {s1.name} and {s2.name} differ")
        return out
    if isinstance(s1, SkArrow) and isinstance(s2, SkArrow):
        return out + unify(s1.dom, s2.dom) + unify(s1.cod, s2.cod)
    if isinstance(s1, SkForall) and isinstance(s2, SkForall):
        avoid = D.ptype_ftv(s1.body) | D.ptype_ftv(s2.body) | {s1.var, s2.var}
        v = F.fresh_name("u", avoid)
        return out + unify(D.ptype_rename(s1.body, s1.var, v), D.ptype_rename(s2.body, s2.var, v))
    raise UnificationError("skeletons differ")


def admissibility(e) -> list:
    out = []
    for node in D.ptype_nodes(e):
        out.append(LinGeq(node.c, 0))
        if isinstance(node, PBang):
            out.append(Mixed(node.b, node.c, 1))
    return out


# ---------------------------------------------------------------- local typing


@dataclass
class Typed:
    """A p-term with the output p-type of every subterm occurrence."""
    term: D.PTerm
    types: dict

    def type_at(self, path: tuple) -> PLin:
        return self.types[path]

    @property
    def conclusion(self) -> PLin:
        return self.types[()]


def local_typing(t: D.PTerm, store: Optional[Store] = None) -> Typed:
    store = store if store is not None else Store()
    types: dict = {}
    uses: dict = {}

    def go(t, path):
        if isinstance(t, D.PDoor):
            a = go(t.body, path + (0,))
            out = PLin(LinComb.of(t.exp) + a.c, a.sk)
            store.add(LinGeq(out.c, 0), "ltype:door", path)
        elif isinstance(t, D.PVar):
            uses.setdefault(t.name, []).append((path, t.type))
            store.extend(admissibility(t.type), "ltype:var", path)
            out = t.type.circ
        elif isinstance(t, D.PLam):
            store.extend(admissibility(t.type), "ltype:lam", path)
            out = PLin(ZERO, SkArrow(t.type, go(t.body, path + (0,))))
        elif isinstance(t, D.PApp):
            f = go(t.fun, path + (0,))
            u = go(t.arg, path + (1,))
            if not isinstance(f.sk, SkArrow):
                raise UnificationError(f"operator at {D.show_path(path)} is not an arrow")
            store.add(LinEq(f.c, ZERO), "ltype:app", path)
            store.extend(unify(f.sk.dom.circ, u), "ltype:app", path)
            out = f.sk.cod
        elif isinstance(t, D.PTLam):
            out = PLin(ZERO, SkForall(t.tvar, go(t.body, path + (0,))))
        else:
            f = go(t.fun, path + (0,))
            if not isinstance(f.sk, SkForall):
                raise UnificationError(f"operator at {D.show_path(path)} is not polymorphic")
            store.add(LinEq(f.c, ZERO), "ltype:tapp", path)
            store.extend(admissibility(t.type), "ltype:tapp", path)
            out = D.ptype_subst(f.sk.body, f.sk.var, t.type)
        types[path] = out
        return out

    go(t, ())
    for name, occ in uses.items():
        if len(occ) > 1:
            store.add(BoolConst(occ[0][1].b, 1), "ltype:contraction", occ[0][0])
    return Typed(t, types)


# ---------------------------------------------------------------- doors


def doors(t: D.PTerm, path: tuple) -> list:
    """Door exponents met on the way from t down to the occurrence at path."""
    out = []
    for step in path:
        if isinstance(t, D.PDoor):
            out.append(t.exp)
        kids = D.children(t)
        if step >= len(kids):
            raise IndexError(f"invalid occurrence {path}")
        t = kids[step]
    return out


def lsum(l) -> LinComb:
    return LinComb.of(*l)


def wbracket(l) -> list:
    return [LinGeq(lsum(l[:i]), 0) for i in range(len(l) + 1)]


def bracket(l) -> list:
    return wbracket(l) + [LinEq(lsum(l), ZERO)]


def free_occurrences(t: D.PTerm, bound: frozenset = frozenset(), path: tuple = ()):
    """(path, PVar) for each occurrence in t of a variable not bound inside t."""
    if isinstance(t, D.PVar):
        if t.name not in bound:
            yield path, t
        return
    if isinstance(t, D.PLam):
        bound = bound | {t.var}
    for i, k in enumerate(D.children(t)):
        yield from free_occurrences(k, bound, path + (i,))


# ---------------------------------------------------------------- boxing constraints


def gen_bracketing(t: D.PTerm, store: Store):
    for path, x in free_occurrences(t):
        store.extend(bracket(doors(t, path)), "bracket:i", path)
    for path, s in D.occurrences(t):
        if isinstance(s, D.PLam):
            store.extend(wbracket(doors(t, path)), "bracket:ii", path)
            body = path + (0,)
            for p, v in D.occurrences(s.body, body):
                if isinstance(v, D.PVar) and v.name == s.var:
                    store.extend(bracket(doors(s.body, p[len(body):])), "bracket:iii", p)


def gen_bang(typed: Typed, store: Store):
    t = typed.term
    for path, s in D.occurrences(t):
        if not isinstance(s, D.PApp):
            continue
        b = typed.type_at(path + (0,)).sk.dom.b
        upath = path + (1,)
        u = s.arg
        frees = list(free_occurrences(u))
        x_rel = None
        if len(frees) > 1:
            store.add(BoolConst(b, 0), "bang:i", upath)
        elif len(frees) == 1:
            x_rel, x = frees[0]
            store.add(BoolImpl(b, x.type.b), "bang:i", upath)
            store.add(Mixed(b, lsum(doors(u, x_rel)), 0), "bang:x", upath + x_rel)
        for rel, v in D.occurrences(u):
            if rel == () or rel == x_rel:
                continue
            store.add(Mixed(b, lsum(doors(u, rel)), 1), "bang:ii", upath + rel)


def gen_scope(typed: Typed, store: Store):
    t = typed.term
    for path, s in D.occurrences(t):
        if not isinstance(s, D.PTLam):
            continue
        upath = path + (0,)
        for rel, v in D.occurrences(s.body):
            if s.tvar in D.ptype_ftv(typed.type_at(upath + rel)):
                store.extend(wbracket(doors(s.body, rel)), "scope", upath + rel)


# ---------------------------------------------------------------- goal


def goal_atoms(conclusion: PLin, goal: D.DType) -> list:
    """Atoms forcing the conclusion p-type to instantiate to a star-form goal."""
    out = []

    def strip(t):
        k = 0
        while isinstance(t, D.DPara):
            k, t = k + 1, t.body
        return k, t

    def node(e, g, ren):
        if isinstance(e, PBang):
            if isinstance(g, D.DBang):
                k, h = strip(g.body)
                out.append(BoolConst(e.b, 1))
                out.append(LinConst(e.c, k + 1))
            else:
                k, h = strip(g)
                out.append(BoolConst(e.b, 0))
                out.append(LinConst(e.c, k))
        else:
            if isinstance(g, D.DBang):
                raise UnificationError("'!' outside an arrow domain in goal")
            k, h = strip(g)
            out.append(LinConst(e.c, k))
        sk = e.sk
        if isinstance(sk, SkVar) and isinstance(h, D.DVar):
            if ren.get(h.name, h.name) != sk.name:
                raise UnificationError(f"goal variable {h.name} does not match {sk.name}")
        elif isinstance(sk, SkArrow) and isinstance(h, D.DLolli):
            node(sk.dom, h.dom, ren)
            node(sk.cod, h.cod, ren)
        elif isinstance(sk, SkForall) and isinstance(h, D.DForall):
            node(sk.body, h.body, {**ren, h.var: sk.var})
        else:
            raise UnificationError("goal type does not erase to the term's type")

    node(conclusion, D.star(goal), {})
    return out


# ---------------------------------------------------------------- all


@dataclass
class Generated:
    decoration: D.Decoration
    typed: Typed
    store: Store

    @property
    def conclusion(self) -> PLin:
        return self.typed.conclusion


def gen_all(m: F.FTerm, goal: Optional[D.DType] = None) -> Generated:
    """Free decoration of m and its full constraint store.

    m must be annotated and alpha-normalized (see ``fterm.alpha_normalize``).
    """
    dec = D.free_decoration(m)
    store = Store()
    typed = local_typing(dec.term, store)
    gen_bracketing(dec.term, store)
    gen_bang(typed, store)
    gen_scope(typed, store)
    if goal is not None:
        store.extend(goal_atoms(typed.conclusion, goal), "goal", ())
    return Generated(dec, typed, store)
