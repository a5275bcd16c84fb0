"""Church-typed System F: types, terms, parsing, typechecking, normalization."""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterator, Optional, Union


# ---------------------------------------------------------------- types

@dataclass(frozen=True)
class TVar:
    name: str


@dataclass(frozen=True)
class Arrow:
    dom: "FType"
    cod: "FType"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "FType"


FType = Union[TVar, Arrow, Forall]


# ---------------------------------------------------------------- terms

@dataclass(frozen=True)
class Var:
    name: str
    type: Optional[FType] = None


@dataclass(frozen=True)
class Lam:
    var: str
    type: FType
    body: "FTerm"


@dataclass(frozen=True)
class App:
    fun: "FTerm"
    arg: "FTerm"


@dataclass(frozen=True)
class TLam:
    tvar: str
    body: "FTerm"


@dataclass(frozen=True)
class TApp:
    fun: "FTerm"
    type: FType


FTerm = Union[Var, Lam, App, TLam, TApp]

# An occurrence is the path of child selectors from the root: 0 for the
# body/function side, 1 for the argument of a term application.
Occurrence = tuple


class FParseError(ValueError):
    def __init__(self, message: str, pos: int, expected: tuple = ()):
        self.pos = pos
        self.expected = expected
        if expected:
            message = f"{message} (expected {' or '.join(expected)})"
        super().__init__(f"{message} at offset {pos}")


class FTypeError(TypeError):
    pass


class FuelExhausted(RuntimeError):
    def __init__(self, steps: int, term: FTerm):
        self.steps = steps
        self.term = term
        super().__init__(f"fuel exhausted after {steps} steps")


_counter = itertools.count(1)


def fresh_name(base: str, avoid: set) -> str:
    base = base.split("_")[0] or "v"
    while True:
        cand = f"{base}_{next(_counter)}"
        if cand not in avoid:
            return cand


# ---------------------------------------------------------------- type ops

def ftv(t: FType) -> set:
    if isinstance(t, TVar):
        return {t.name}
    if isinstance(t, Arrow):
        return ftv(t.dom) | ftv(t.cod)
    return ftv(t.body) - {t.var}


def type_names(t: FType) -> set:
    """Every variable name, free or bound, mentioned in t."""
    if isinstance(t, TVar):
        return {t.name}
    if isinstance(t, Arrow):
        return type_names(t.dom) | type_names(t.cod)
    return type_names(t.body) | {t.var}


def subst_type(t: FType, var: str, repl: FType) -> FType:
    """Capture-avoiding t[repl/var]."""
    if isinstance(t, TVar):
        return repl if t.name == var else t
    if isinstance(t, Arrow):
        return Arrow(subst_type(t.dom, var, repl), subst_type(t.cod, var, repl))
    if t.var == var or var not in ftv(t.body):
        return t
    if t.var in ftv(repl):
        new = fresh_name(t.var, ftv(repl) | type_names(t.body))
        body = subst_type(t.body, t.var, TVar(new))
        return Forall(new, subst_type(body, var, repl))
    return Forall(t.var, subst_type(t.body, var, repl))


def alpha_eq(a: FType, b: FType, env_a: dict = None, env_b: dict = None, depth: int = 0) -> bool:
    env_a = env_a or {}
    env_b = env_b or {}
    if isinstance(a, TVar) and isinstance(b, TVar):
        ia, ib = env_a.get(a.name), env_b.get(b.name)
        if ia is None and ib is None:
            return a.name == b.name
        return ia == ib
    if isinstance(a, Arrow) and isinstance(b, Arrow):
        return (alpha_eq(a.dom, b.dom, env_a, env_b, depth)
                and alpha_eq(a.cod, b.cod, env_a, env_b, depth))
    if isinstance(a, Forall) and isinstance(b, Forall):
        return alpha_eq(a.body, b.body, {**env_a, a.var: depth},
                        {**env_b, b.var: depth}, depth + 1)
    return False


# ---------------------------------------------------------------- term ops

def children(t: FTerm) -> list:
    if isinstance(t, App):
        return [t.fun, t.arg]
    if isinstance(t, (Lam, TLam)):
        return [t.body]
    if isinstance(t, TApp):
        return [t.fun]
    return []


def subterm(t: FTerm, path: Occurrence) -> FTerm:
    for step in path:
        kids = children(t)
        if step >= len(kids):
            raise IndexError(f"invalid occurrence {path}")
        t = kids[step]
    return t


def occurrences(t: FTerm, path: Occurrence = ()) -> Iterator[tuple]:
    """Pre-order (path, subterm) pairs."""
    yield path, t
    for i, k in enumerate(children(t)):
        yield from occurrences(k, path + (i,))


def term_size(t: FTerm) -> int:
    """Number of term nodes; types inside annotations are not counted."""
    return sum(1 for _ in occurrences(t))


def free_vars(t: FTerm) -> dict:
    """Free term variables mapped to their annotated types."""
    if isinstance(t, Var):
        return {t.name: t.type}
    if isinstance(t, Lam):
        fv = free_vars(t.body)
        fv.pop(t.var, None)
        return fv
    if isinstance(t, App):
        return {**free_vars(t.fun), **free_vars(t.arg)}
    return free_vars(t.body if isinstance(t, TLam) else t.fun)


def free_tvars(t: FTerm) -> set:
    if isinstance(t, Var):
        return ftv(t.type) if t.type is not None else set()
    if isinstance(t, Lam):
        return ftv(t.type) | free_tvars(t.body)
    if isinstance(t, App):
        return free_tvars(t.fun) | free_tvars(t.arg)
    if isinstance(t, TLam):
        return free_tvars(t.body) - {t.tvar}
    return free_tvars(t.fun) | ftv(t.type)


def _names(t: FTerm) -> set:
    out = set()
    for _, s in occurrences(t):
        if isinstance(s, (Var, Lam)):
            out.add(s.var if isinstance(s, Lam) else s.name)
        if isinstance(s, TLam):
            out.add(s.tvar)
        for ty in _types_at(s):
            out |= type_names(ty)
    return out


def _types_at(t: FTerm) -> list:
    if isinstance(t, Var):
        return [t.type] if t.type is not None else []
    if isinstance(t, (Lam, TApp)):
        return [t.type]
    return []


def subst_term(t: FTerm, x: str, n: FTerm) -> FTerm:
    """Capture-avoiding t[n/x] (term and type variables of n are protected)."""
    fv_n = None

    def go(t):
        nonlocal fv_n
        if isinstance(t, Var):
            return n if t.name == x else t
        if isinstance(t, App):
            return App(go(t.fun), go(t.arg))
        if isinstance(t, TApp):
            return TApp(go(t.fun), t.type)
        if isinstance(t, Lam):
            if t.var == x or x not in free_vars(t.body):
                return t
            if fv_n is None:
                fv_n = set(free_vars(n))
            if t.var in fv_n:
                new = fresh_name(t.var, fv_n | _names(t.body))
                body = subst_term(t.body, t.var, Var(new, t.type))
                return Lam(new, t.type, go(body))
            return Lam(t.var, t.type, go(t.body))
        # TLam
        if x not in free_vars(t.body):
            return t
        if t.tvar in free_tvars(n):
            new = fresh_name(t.tvar, free_tvars(n) | _names(t.body))
            return TLam(new, go(subst_tvar(t.body, t.tvar, TVar(new))))
        return TLam(t.tvar, go(t.body))

    return go(t)


def subst_tvar(t: FTerm, a: str, ty: FType) -> FTerm:
    """Substitute type ty for type variable a throughout t's annotations."""
    if isinstance(t, Var):
        return Var(t.name, subst_type(t.type, a, ty)) if t.type is not None else t
    if isinstance(t, Lam):
        return Lam(t.var, subst_type(t.type, a, ty), subst_tvar(t.body, a, ty))
    if isinstance(t, App):
        return App(subst_tvar(t.fun, a, ty), subst_tvar(t.arg, a, ty))
    if isinstance(t, TApp):
        return TApp(subst_tvar(t.fun, a, ty), subst_type(t.type, a, ty))
    if t.tvar == a:
        return t
    if t.tvar in ftv(ty):
        new = fresh_name(t.tvar, ftv(ty) | _names(t.body))
        body = subst_tvar(t.body, t.tvar, TVar(new))
        return TLam(new, subst_tvar(body, a, ty))
    return TLam(t.tvar, subst_tvar(t.body, a, ty))


def alpha_normalize(t: FTerm) -> FTerm:
    """Rename binders so every term and type-abstraction binder is unique.

    Free names are kept; a binder keeps its source name the first time it
    is seen and gets a numbered variant afterwards.  Forall binders inside
    annotations are renamed away from every Lambda-bound name.
    """
    used = set(free_vars(t)) | free_tvars(t)
    tlam_names = {s.tvar for _, s in occurrences(t) if isinstance(s, TLam)}

    def pick(name):
        if name not in used:
            used.add(name)
            return name
        base = name.split("_")[0] or "v"
        k = 1
        while f"{base}_{k}" in used:
            k += 1
        used.add(f"{base}_{k}")
        return f"{base}_{k}"

    def norm_type(ty, tenv):
        if isinstance(ty, TVar):
            return TVar(tenv.get(ty.name, ty.name))
        if isinstance(ty, Arrow):
            return Arrow(norm_type(ty.dom, tenv), norm_type(ty.cod, tenv))
        v = ty.var
        if v in tlam_names or v in tenv.values():
            k = 1
            while f"{v}_{k}" in used | tlam_names | set(tenv.values()):
                k += 1
            v = f"{v}_{k}"
        return Forall(v, norm_type(ty.body, {**tenv, ty.var: v}))

    def go(t, env, tenv):
        if isinstance(t, Var):
            ty = norm_type(t.type, tenv) if t.type is not None else None
            return Var(env.get(t.name, t.name), ty)
        if isinstance(t, Lam):
            new = pick(t.var)
            return Lam(new, norm_type(t.type, tenv), go(t.body, {**env, t.var: new}, tenv))
        if isinstance(t, App):
            return App(go(t.fun, env, tenv), go(t.arg, env, tenv))
        if isinstance(t, TLam):
            new = pick(t.tvar)
            return TLam(new, go(t.body, env, {**tenv, t.tvar: new}))
        return TApp(go(t.fun, env, tenv), norm_type(t.type, tenv))

    return go(t, {}, {})


def term_alpha_eq(a: FTerm, b: FTerm) -> bool:
    def go(a, b, ea, eb, ta, tb, d):
        if type(a) is not type(b):
            return False
        if isinstance(a, Var):
            ia, ib = ea.get(a.name), eb.get(b.name)
            if ia is None and ib is None:
                return a.name == b.name
            return ia == ib
        if isinstance(a, Lam):
            return (_ty_eq(a.type, b.type, ta, tb)
                    and go(a.body, b.body, {**ea, a.var: d}, {**eb, b.var: d}, ta, tb, d + 1))
        if isinstance(a, App):
            return go(a.fun, b.fun, ea, eb, ta, tb, d) and go(a.arg, b.arg, ea, eb, ta, tb, d)
        if isinstance(a, TLam):
            return go(a.body, b.body, ea, eb, {**ta, a.tvar: d}, {**tb, b.tvar: d}, d + 1)
        return go(a.fun, b.fun, ea, eb, ta, tb, d) and _ty_eq(a.type, b.type, ta, tb)

    return go(a, b, {}, {}, {}, {}, 0)


def _ty_eq(a, b, ta, tb):
    # Lambda-bound names are compared through their binder index.
    return alpha_eq(_rename_free(a, ta), _rename_free(b, tb))


def _rename_free(ty, tenv):
    for name, idx in tenv.items():
        ty = subst_type(ty, name, TVar(f"#{idx}"))
    return ty


# ---------------------------------------------------------------- typing

def typecheck(t: FTerm, env: Optional[dict] = None) -> FType:
    """Return the type of t, enforcing annotations and the eigenvariable rule."""
    env = dict(env or {})

    def go(t, env):
        if isinstance(t, Var):
            if t.type is not None:
                if t.name in env and not alpha_eq(env[t.name], t.type):
                    raise FTypeError(f"variable {t.name} annotated inconsistently with its binder")
                return t.type
            if t.name not in env:
                raise FTypeError(f"unbound variable {t.name}")
            return env[t.name]
        if isinstance(t, Lam):
            return Arrow(t.type, go(t.body, {**env, t.var: t.type}))
        if isinstance(t, App):
            f = go(t.fun, env)
            a = go(t.arg, env)
            if not isinstance(f, Arrow):
                raise FTypeError(f"application of non-function of type {show_type(f)}")
            if not alpha_eq(f.dom, a):
                raise FTypeError(
                    f"argument type {show_type(a)} does not match {show_type(f.dom)}")
            return f.cod
        if isinstance(t, TLam):
            for name, ty in free_vars(t.body).items():
                ty = ty if ty is not None else env.get(name)
                if ty is not None and t.tvar in ftv(ty):
                    raise FTypeError(
                        f"eigenvariable condition violated: {t.tvar} free in type of {name}")
            return Forall(t.tvar, go(t.body, env))
        f = go(t.fun, env)
        if not isinstance(f, Forall):
            raise FTypeError(f"type application of non-polymorphic type {show_type(f)}")
        return subst_type(f.body, f.var, t.type)

    return go(t, env)


def annotate(t: FTerm, env: Optional[dict] = None) -> FTerm:
    """Fill in missing occurrence annotations from binders or env."""
    env = dict(env or {})

    def go(t, env):
        if isinstance(t, Var):
            if t.type is None:
                if t.name not in env:
                    raise FTypeError(f"unbound variable {t.name}")
                return Var(t.name, env[t.name])
            return t
        if isinstance(t, Lam):
            return Lam(t.var, t.type, go(t.body, {**env, t.var: t.type}))
        if isinstance(t, App):
            return App(go(t.fun, env), go(t.arg, env))
        if isinstance(t, TLam):
            return TLam(t.tvar, go(t.body, env))
        return TApp(go(t.fun, env), t.type)

    return go(t, env)


# ---------------------------------------------------------------- reduction

def _step(t: FTerm):
    """One leftmost-outermost step: (term, is_beta) or None at normal form."""
    if isinstance(t, App):
        if isinstance(t.fun, Lam):
            return subst_term(t.fun.body, t.fun.var, t.arg), True
        r = _step(t.fun)
        if r is not None:
            return App(r[0], t.arg), r[1]
        r = _step(t.arg)
        if r is not None:
            return App(t.fun, r[0]), r[1]
        return None
    if isinstance(t, TApp):
        if isinstance(t.fun, TLam):
            return subst_tvar(t.fun.body, t.fun.tvar, t.type), False
        r = _step(t.fun)
        return None if r is None else (TApp(r[0], t.type), r[1])
    if isinstance(t, (Lam, TLam)):
        r = _step(t.body)
        if r is None:
            return None
        if isinstance(t, Lam):
            return Lam(t.var, t.type, r[0]), r[1]
        return TLam(t.tvar, r[0]), r[1]
    return None


def beta_normalize(t: FTerm, fuel: int = 100_000) -> tuple:
    """Normal-order reduction; returns (normal form, number of term beta steps).

    Type-level redexes are contracted but not counted.  Each contraction of
    either kind consumes one unit of fuel.
    """
    if fuel <= 0:
        raise ValueError("fuel must be positive")
    steps = 0
    spent = 0
    while True:
        r = _step(t)
        if r is None:
            return t, steps
        if spent >= fuel:
            raise FuelExhausted(steps, t)
        t, is_beta = r
        spent += 1
        steps += is_beta


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(r"""
    (?P<ws>\s+|--[^\n]*)
  | (?P<arrow>->|→)
  | (?P<tlam>/\\|Λ)
  | (?P<lam>\\|λ)
  | (?P<forall>∀)
  | (?P<punct>[().:\[\]])
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
""", re.VERBOSE)


def tokenize(text: str, extra: Optional[re.Pattern] = None) -> list:
    toks = []
    pos = 0
    while pos < len(text):
        m = extra.match(text, pos) if extra is not None else None
        if m is None:
            m = _TOKEN.match(text, pos)
        if m is None:
            raise FParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            val = m.group()
            if kind == "ident" and val == "forall":
                kind = "forall"
            toks.append((kind, val, pos))
        pos = m.end()
    toks.append(("eof", "", len(text)))
    return toks


class Parser:
    def __init__(self, text: str, extra: Optional[re.Pattern] = None):
        self.toks = tokenize(text, extra)
        self.i = 0

    @property
    def tok(self):
        return self.toks[self.i]

    def at(self, kind, val=None):
        k, v, _ = self.tok
        return k == kind and (val is None or v == val)

    def expect(self, kind, val=None):
        if not self.at(kind, val):
            k, v, pos = self.tok
            raise FParseError(f"unexpected {v or k!r}", pos, (repr(val) if val else kind,))
        t = self.tok
        self.i += 1
        return t[1]

    def eat(self, kind, val=None):
        if self.at(kind, val):
            self.i += 1
            return True
        return False

    # Type  ::= forall a. Type | AType -> Type | AType
    def ftype(self) -> FType:
        if self.eat("forall"):
            name = self.expect("ident")
            self.expect("punct", ".")
            return Forall(name, self.ftype())
        left = self.atype()
        if self.eat("arrow"):
            return Arrow(left, self.ftype())
        return left

    def atype(self) -> FType:
        if self.eat("punct", "("):
            t = self.ftype()
            self.expect("punct", ")")
            return t
        if self.at("ident"):
            return TVar(self.expect("ident"))
        k, v, pos = self.tok
        raise FParseError(f"unexpected {v or k!r}", pos, ("type variable", "'('"))

    def term(self, env: dict) -> FTerm:
        if self.eat("lam"):
            name = self.expect("ident")
            self.expect("punct", ":")
            ty = self.ftype()
            self.expect("punct", ".")
            return Lam(name, ty, self.term({**env, name: ty}))
        if self.eat("tlam"):
            name = self.expect("ident")
            self.expect("punct", ".")
            return TLam(name, self.term(env))
        return self.app(env)

    def app(self, env: dict) -> FTerm:
        t = self.atom(env)
        while True:
            if self.eat("punct", "["):
                ty = self.ftype()
                self.expect("punct", "]")
                t = TApp(t, ty)
            elif self.at("ident") or self.at("punct", "("):
                t = App(t, self.atom(env))
            elif self.at("lam") or self.at("tlam"):
                t = App(t, self.term(env))
            else:
                return t

    def atom(self, env: dict) -> FTerm:
        if self.eat("punct", "("):
            t = self.term(env)
            self.expect("punct", ")")
            return t
        if self.at("ident"):
            name = self.expect("ident")
            return Var(name, env.get(name))
        k, v, pos = self.tok
        raise FParseError(f"unexpected {v or k!r}", pos, ("identifier", "'('", "'\\'"))

    def done(self):
        if not self.at("eof"):
            k, v, pos = self.tok
            raise FParseError(f"trailing input {v!r}", pos, ("end of input",))


def parse_type(text: str) -> FType:
    p = Parser(text)
    t = p.ftype()
    p.done()
    return t


def parse_term(text: str) -> FTerm:
    """Parse a Church-annotated term; occurrences take their binder's type."""
    p = Parser(text)
    t = p.term({})
    p.done()
    return t


# ---------------------------------------------------------------- printing

def show_type(t: FType) -> str:
    if isinstance(t, TVar):
        return t.name
    if isinstance(t, Arrow):
        dom = show_type(t.dom)
        if not isinstance(t.dom, TVar):
            dom = f"({dom})"
        return f"{dom} -> {show_type(t.cod)}"
    return f"forall {t.var}. {show_type(t.body)}"


def show_term(t: FTerm) -> str:
    def atom(t):
        s = show_term(t)
        return s if isinstance(t, Var) else f"({s})"

    if isinstance(t, Var):
        return t.name
    if isinstance(t, Lam):
        return f"\\{t.var}:{show_type(t.type)}. {show_term(t.body)}"
    if isinstance(t, TLam):
        return f"/\\{t.tvar}. {show_term(t.body)}"
    if isinstance(t, App):
        fun = show_term(t.fun) if isinstance(t.fun, (Var, App, TApp)) else atom(t.fun)
        return f"{fun} {atom(t.arg)}"
    fun = show_term(t.fun) if isinstance(t.fun, (Var, App, TApp)) else atom(t.fun)
    return f"{fun} [{show_type(t.type)}]"
