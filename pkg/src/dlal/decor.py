"""Parameterized DLAL* types and terms, free decorations and instantiation.

The same term node classes serve for p-terms (door exponents are integer
parameter names, types are p-types) and for concrete pseudo-terms (door
exponents are nonzero ints, types are DLAL* types).
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

from . import fterm as F

# ---------------------------------------------------------------- parameters


def param_key(p: str) -> tuple:
    m = re.fullmatch(r"([a-z]+)(\d+)", p)
    return (m.group(1), int(m.group(2))) if m else (p, 0)


class ParamSupply:
    """Allocator of fresh parameter names: ``m`` doors, ``n`` types, ``b`` flags."""

    def __init__(self):
        self._counters = {"m": itertools.count(1), "n": itertools.count(1),
                          "b": itertools.count(1)}

    def door(self) -> str:
        return f"m{next(self._counters['m'])}"

    def int(self) -> str:
        return f"n{next(self._counters['n'])}"

    def bool(self) -> str:
        return f"b{next(self._counters['b'])}"


def is_bool_param(p: str) -> bool:
    return p.startswith("b")


@dataclass(frozen=True)
class LinComb:
    """Sum of integer parameters with positive coefficients; empty means 0."""

    terms: tuple = ()

    @classmethod
    def of(cls, *params: str) -> "LinComb":
        acc = {}
        for p in params:
            acc[p] = acc.get(p, 0) + 1
        return cls.from_dict(acc)

    @classmethod
    def from_dict(cls, d: dict) -> "LinComb":
        return cls(tuple(sorted(((p, c) for p, c in d.items() if c),
                                key=lambda pc: param_key(pc[0]))))

    def as_dict(self) -> dict:
        return dict(self.terms)

    def __add__(self, other: "LinComb") -> "LinComb":
        d = self.as_dict()
        for p, c in other.terms:
            d[p] = d.get(p, 0) + c
        return LinComb.from_dict(d)

    def params(self) -> list:
        return [p for p, _ in self.terms]

    def evaluate(self, values: dict):
        return sum(c * values.get(p, 0) for p, c in self.terms)

    def __bool__(self):
        return bool(self.terms)

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(p if c == 1 else f"{c}{p}" for p, c in self.terms)


ZERO = LinComb()

# ---------------------------------------------------------------- p-types


@dataclass(frozen=True)
class SkVar:
    name: str


@dataclass(frozen=True)
class SkArrow:
    dom: "PBang"
    cod: "PLin"


@dataclass(frozen=True)
class SkForall:
    var: str
    body: "PLin"


Skeleton = Union[SkVar, SkArrow, SkForall]


@dataclass(frozen=True)
class PLin:
    c: LinComb
    sk: Skeleton


@dataclass(frozen=True)
class PBang:
    b: str
    c: LinComb
    sk: Skeleton

    @property
    def circ(self) -> PLin:
        return PLin(self.c, self.sk)


PType = Union[PLin, PBang]

# ---------------------------------------------------------------- concrete DLAL types


@dataclass(frozen=True)
class DVar:
    name: str


@dataclass(frozen=True)
class DLolli:
    dom: "DType"
    cod: "DType"


@dataclass(frozen=True)
class DImp:
    """Non-linear arrow; only present in the user-facing (non-star) form."""
    dom: "DType"
    cod: "DType"


@dataclass(frozen=True)
class DForall:
    var: str
    body: "DType"


@dataclass(frozen=True)
class DPara:
    body: "DType"


@dataclass(frozen=True)
class DBang:
    body: "DType"


DType = Union[DVar, DLolli, DImp, DForall, DPara, DBang]


def para(k: int, t: DType) -> DType:
    for _ in range(k):
        t = DPara(t)
    return t


# ---------------------------------------------------------------- terms


@dataclass(frozen=True)
class PVar:
    name: str
    type: object


@dataclass(frozen=True)
class PLam:
    var: str
    type: object
    body: "PTerm"


@dataclass(frozen=True)
class PApp:
    fun: "PTerm"
    arg: "PTerm"


@dataclass(frozen=True)
class PTLam:
    tvar: str
    body: "PTerm"


@dataclass(frozen=True)
class PTApp:
    fun: "PTerm"
    type: object


@dataclass(frozen=True)
class PDoor:
    """``exp`` is a parameter name in a p-term, a nonzero int in a pseudo-term."""
    exp: object
    body: "PTerm"


PTerm = Union[PVar, PLam, PApp, PTLam, PTApp, PDoor]


def children(t: PTerm) -> list:
    if isinstance(t, PApp):
        return [t.fun, t.arg]
    if isinstance(t, (PLam, PTLam, PDoor)):
        return [t.body]
    if isinstance(t, PTApp):
        return [t.fun]
    return []


def subterm(t: PTerm, path: tuple) -> PTerm:
    for step in path:
        kids = children(t)
        if step >= len(kids):
            raise IndexError(f"invalid occurrence {path}")
        t = kids[step]
    return t


def occurrences(t: PTerm, path: tuple = ()) -> Iterator[tuple]:
    yield path, t
    for i, k in enumerate(children(t)):
        yield from occurrences(k, path + (i,))


def show_path(path: tuple) -> str:
    return ".".join(map(str, path)) if path else "ε"


# ---------------------------------------------------------------- free decoration


@dataclass
class Decoration:
    """The free decoration of a term, with the bang decoration of each variable."""
    term: PTerm
    source: F.FTerm
    var_types: dict = field(default_factory=dict)
    supply: ParamSupply = field(default_factory=ParamSupply)

    def int_params(self) -> list:
        return sorted(_params(self.term, bools=False), key=param_key)

    def bool_params(self) -> list:
        return sorted(_params(self.term, bools=True), key=param_key)


def linear_free(t: F.FType, supply: ParamSupply) -> PLin:
    return PLin(LinComb.of(supply.int()), _skeleton(t, supply))


def bang_free(t: F.FType, supply: ParamSupply) -> PBang:
    b = supply.bool()
    return PBang(b, LinComb.of(supply.int()), _skeleton(t, supply))


def _skeleton(t: F.FType, supply: ParamSupply) -> Skeleton:
    if isinstance(t, F.TVar):
        return SkVar(t.name)
    if isinstance(t, F.Arrow):
        return SkArrow(bang_free(t.dom, supply), linear_free(t.cod, supply))
    return SkForall(t.var, linear_free(t.body, supply))


def free_decoration(m: F.FTerm, supply: Optional[ParamSupply] = None) -> Decoration:
    """Decorate every node with a fresh door and every type with fresh parameters.

    ``m`` must be annotated and alpha-normalized so that each variable name
    denotes one variable; all its occurrences then share one decoration.
    """
    supply = supply or ParamSupply()
    var_types: dict = {}

    def dec_var(name, ty):
        if name not in var_types:
            var_types[name] = bang_free(ty, supply)
        return var_types[name]

    def go(t):
        m_ = supply.door()
        if isinstance(t, F.Var):
            return PDoor(m_, PVar(t.name, dec_var(t.name, t.type)))
        if isinstance(t, F.Lam):
            d = dec_var(t.var, t.type)
            return PDoor(m_, PLam(t.var, d, go(t.body)))
        if isinstance(t, F.App):
            return PDoor(m_, PApp(go(t.fun), go(t.arg)))
        if isinstance(t, F.TLam):
            return PDoor(m_, PTLam(t.tvar, go(t.body)))
        fun = go(t.fun)
        return PDoor(m_, PTApp(fun, linear_free(t.type, supply)))

    return Decoration(go(m), m, var_types, supply)


def _params(t: PTerm, bools: bool) -> set:
    out = set()
    for _, s in occurrences(t):
        if isinstance(s, PDoor) and not bools:
            out.add(s.exp)
        if isinstance(s, (PVar, PLam, PTApp)):
            out |= ptype_params(s.type, bools)
    return out


def ptype_params(e, bools: bool) -> set:
    out = set()
    for node in ptype_nodes(e):
        if bools and isinstance(node, PBang):
            out.add(node.b)
        if not bools:
            out.update(node.c.params())
    return out


def ptype_nodes(e) -> Iterator:
    """Every PLin/PBang node of a p-type, outermost first."""
    yield e
    sk = e.sk
    if isinstance(sk, SkArrow):
        yield from ptype_nodes(sk.dom)
        yield from ptype_nodes(sk.cod)
    elif isinstance(sk, SkForall):
        yield from ptype_nodes(sk.body)


# ---------------------------------------------------------------- p-type operations


def ptype_ftv(e) -> set:
    sk = e.sk
    if isinstance(sk, SkVar):
        return {sk.name}
    if isinstance(sk, SkArrow):
        return ptype_ftv(sk.dom) | ptype_ftv(sk.cod)
    return ptype_ftv(sk.body) - {sk.var}


def _ptype_names(e) -> set:
    sk = e.sk
    if isinstance(sk, SkVar):
        return {sk.name}
    if isinstance(sk, SkArrow):
        return _ptype_names(sk.dom) | _ptype_names(sk.cod)
    return _ptype_names(sk.body) | {sk.var}


def _with(e, c: LinComb, sk: Skeleton):
    return PBang(e.b, c, sk) if isinstance(e, PBang) else PLin(c, sk)


def ptype_subst(e, var: str, a: PLin):
    """Replace each ``§^c' var`` in e by ``§^(c'+c) F`` where a = (c, F)."""
    sk = e.sk
    if isinstance(sk, SkVar):
        return _with(e, e.c + a.c, a.sk) if sk.name == var else e
    if isinstance(sk, SkArrow):
        return _with(e, e.c, SkArrow(ptype_subst(sk.dom, var, a), ptype_subst(sk.cod, var, a)))
    if sk.var == var or var not in ptype_ftv(sk.body):
        return e
    body = sk.body
    v = sk.var
    if v in ptype_ftv(a):
        v = F.fresh_name(v, ptype_ftv(a) | _ptype_names(body))
        body = ptype_rename(body, sk.var, v)
    return _with(e, e.c, SkForall(v, ptype_subst(body, var, a)))


def ptype_rename(e, old: str, new: str):
    return ptype_subst(e, old, PLin(ZERO, SkVar(new)))


# ---------------------------------------------------------------- instantiation


class InstantiationError(ValueError):
    pass


@dataclass
class Instantiation:
    bools: dict = field(default_factory=dict)
    ints: dict = field(default_factory=dict)

    def b(self, p: str) -> int:
        return self.bools.get(p, 0)

    def i(self, c: LinComb):
        return c.evaluate(self.ints)

    def key(self) -> tuple:
        return (tuple(sorted(self.bools.items(), key=lambda kv: param_key(kv[0]))),
                tuple(sorted(self.ints.items(), key=lambda kv: param_key(kv[0]))))


def type_admissibility_violation(e, phi: Instantiation) -> Optional[str]:
    for node in ptype_nodes(e):
        v = phi.i(node.c)
        if v < 0:
            return f"{node.c} >= 0"
        if isinstance(node, PBang) and phi.b(node.b) == 1 and v < 1:
            return f"{node.b} = 1 => {node.c} >= 1"
    return None


def admissibility_violation(t: PTerm, phi: Instantiation) -> Optional[str]:
    for path, s in occurrences(t):
        if isinstance(s, (PVar, PLam, PTApp)):
            bad = type_admissibility_violation(s.type, phi)
            if bad:
                return f"{bad} at {show_path(path)}"
    return None


def instantiate_type(e, phi: Instantiation) -> DType:
    k = phi.i(e.c)
    if k != int(k):
        raise InstantiationError("instantiation requires integer values")
    k = int(k)
    sk = e.sk
    if isinstance(sk, SkVar):
        inner = DVar(sk.name)
    elif isinstance(sk, SkArrow):
        inner = DLolli(instantiate_type(sk.dom, phi), instantiate_type(sk.cod, phi))
    else:
        inner = DForall(sk.var, instantiate_type(sk.body, phi))
    if k < 0:
        raise InstantiationError(f"{e.c} evaluates to {k} < 0")
    if isinstance(e, PBang) and phi.b(e.b) == 1:
        if k < 1:
            raise InstantiationError(f"{e.b} = 1 but {e.c} evaluates to {k}")
        return DBang(para(k - 1, inner))
    return para(k, inner)


def instantiate(t: PTerm, phi: Instantiation) -> PTerm:
    """Concrete regular pseudo-term for an admissible instantiation."""
    bad = admissibility_violation(t, phi)
    if bad:
        raise InstantiationError(f"inadmissible instantiation: {bad}")
    cache: dict = {}

    def ty(e):
        if id(e) not in cache:
            cache[id(e)] = (e, instantiate_type(e, phi))
        return cache[id(e)][1]

    def go(t):
        if isinstance(t, PDoor):
            k = phi.ints.get(t.exp, 0)
            if k != int(k):
                raise InstantiationError("instantiation requires integer values")
            body = go(t.body)
            return PDoor(int(k), body) if k else body
        if isinstance(t, PVar):
            return PVar(t.name, ty(t.type))
        if isinstance(t, PLam):
            return PLam(t.var, ty(t.type), go(t.body))
        if isinstance(t, PApp):
            return PApp(go(t.fun), go(t.arg))
        if isinstance(t, PTLam):
            return PTLam(t.tvar, go(t.body))
        return PTApp(go(t.fun), ty(t.type))

    return go(t)


# ---------------------------------------------------------------- erasure


def erase_type(t) -> F.FType:
    """Forget modalities and parameters of a p-type, skeleton or DLAL type."""
    if isinstance(t, (PLin, PBang)):
        return erase_type(t.sk)
    if isinstance(t, (SkVar, DVar)):
        return F.TVar(t.name)
    if isinstance(t, SkArrow):
        return F.Arrow(erase_type(t.dom), erase_type(t.cod))
    if isinstance(t, (DLolli, DImp)):
        return F.Arrow(erase_type(t.dom), erase_type(t.cod))
    if isinstance(t, (SkForall, DForall)):
        return F.Forall(t.var, erase_type(t.body))
    if isinstance(t, (DPara, DBang)):
        return erase_type(t.body)
    raise TypeError(f"not a type: {t!r}")


def erase(t):
    """Erasure of a p-term, pseudo-term, p-type or DLAL type."""
    if isinstance(t, PDoor):
        return erase(t.body)
    if isinstance(t, PVar):
        return F.Var(t.name, erase_type(t.type))
    if isinstance(t, PLam):
        return F.Lam(t.var, erase_type(t.type), erase(t.body))
    if isinstance(t, PApp):
        return F.App(erase(t.fun), erase(t.arg))
    if isinstance(t, PTLam):
        return F.TLam(t.tvar, erase(t.body))
    if isinstance(t, PTApp):
        return F.TApp(erase(t.fun), erase_type(t.type))
    return erase_type(t)


# ---------------------------------------------------------------- DLAL type utilities


class StarError(ValueError):
    pass


def star(t: DType) -> DType:
    """DLAL to DLAL*: ``A => B`` becomes ``!A -o B``."""
    if isinstance(t, DImp):
        return DLolli(DBang(star(t.dom)), star(t.cod))
    if isinstance(t, DLolli):
        return DLolli(star(t.dom), star(t.cod))
    if isinstance(t, DForall):
        return DForall(t.var, star(t.body))
    if isinstance(t, DPara):
        return DPara(star(t.body))
    if isinstance(t, DBang):
        return DBang(star(t.body))
    return t


def star_inverse(t: DType) -> DType:
    """DLAL* to DLAL: ``!A -o B`` becomes ``A => B``."""
    if isinstance(t, DLolli):
        if isinstance(t.dom, DBang):
            return DImp(star_inverse(t.dom.body), star_inverse(t.cod))
        return DLolli(star_inverse(t.dom), star_inverse(t.cod))
    if isinstance(t, DBang):
        raise StarError("'!' outside an arrow domain")
    if isinstance(t, DForall):
        return DForall(t.var, star_inverse(t.body))
    if isinstance(t, DPara):
        return DPara(star_inverse(t.body))
    if isinstance(t, DImp):
        return DImp(star_inverse(t.dom), star_inverse(t.cod))
    return t


def depth(t: DType) -> int:
    if isinstance(t, DVar):
        return 0
    if isinstance(t, DForall):
        return depth(t.body)
    if isinstance(t, DLolli):
        return max(depth(t.dom), depth(t.cod))
    if isinstance(t, DPara):
        return depth(t.body) + 1
    if isinstance(t, DImp):
        return max(depth(t.dom) + 1, depth(t.cod))
    if isinstance(t, DBang):
        # only reachable on star forms; !A counts like the domain of =>
        return depth(t.body) + 1
    raise TypeError(t)


def is_pi1(t: DType, positive: bool = True) -> bool:
    """True when no forall occurs negatively."""
    if isinstance(t, DVar):
        return True
    if isinstance(t, DForall):
        return positive and is_pi1(t.body, positive)
    if isinstance(t, (DLolli, DImp)):
        return is_pi1(t.dom, not positive) and is_pi1(t.cod, positive)
    return is_pi1(t.body, positive)


def dtype_ftv(t: DType) -> set:
    if isinstance(t, DVar):
        return {t.name}
    if isinstance(t, (DLolli, DImp)):
        return dtype_ftv(t.dom) | dtype_ftv(t.cod)
    if isinstance(t, DForall):
        return dtype_ftv(t.body) - {t.var}
    return dtype_ftv(t.body)


def _dtype_names(t: DType) -> set:
    if isinstance(t, DVar):
        return {t.name}
    if isinstance(t, (DLolli, DImp)):
        return _dtype_names(t.dom) | _dtype_names(t.cod)
    if isinstance(t, DForall):
        return _dtype_names(t.body) | {t.var}
    return _dtype_names(t.body)


def dtype_subst(t: DType, var: str, repl: DType) -> DType:
    if isinstance(t, DVar):
        return repl if t.name == var else t
    if isinstance(t, (DLolli, DImp)):
        return type(t)(dtype_subst(t.dom, var, repl), dtype_subst(t.cod, var, repl))
    if isinstance(t, (DPara, DBang)):
        return type(t)(dtype_subst(t.body, var, repl))
    if t.var == var or var not in dtype_ftv(t.body):
        return t
    if t.var in dtype_ftv(repl):
        new = F.fresh_name(t.var, dtype_ftv(repl) | _dtype_names(t.body))
        return DForall(new, dtype_subst(dtype_subst(t.body, t.var, DVar(new)), var, repl))
    return DForall(t.var, dtype_subst(t.body, var, repl))


def dtype_eq(a: DType, b: DType, ea: dict = None, eb: dict = None, d: int = 0) -> bool:
    """Equality up to renaming of bound type variables."""
    ea = ea or {}
    eb = eb or {}
    if type(a) is not type(b):
        return False
    if isinstance(a, DVar):
        ia, ib = ea.get(a.name), eb.get(b.name)
        return a.name == b.name if ia is None and ib is None else ia == ib
    if isinstance(a, (DLolli, DImp)):
        return dtype_eq(a.dom, b.dom, ea, eb, d) and dtype_eq(a.cod, b.cod, ea, eb, d)
    if isinstance(a, DForall):
        return dtype_eq(a.body, b.body, {**ea, a.var: d}, {**eb, b.var: d}, d + 1)
    return dtype_eq(a.body, b.body, ea, eb, d)


# ---------------------------------------------------------------- printing


def show_dtype(t: DType, level: int = 0) -> str:
    """``forall a.`` < arrows (``-o``, ``=>``) < prefix ``§``/``!`` < atoms."""
    if isinstance(t, DVar):
        return t.name
    if isinstance(t, (DPara, DBang)):
        sym = "§" if isinstance(t, DPara) else "!"
        return sym + show_dtype(t.body, 2)
    if isinstance(t, (DLolli, DImp)):
        op = "-o" if isinstance(t, DLolli) else "=>"
        s = f"{show_dtype(t.dom, 2)} {op} {show_dtype(t.cod, 1)}"
        return f"({s})" if level > 1 else s
    s = f"forall {t.var}. {show_dtype(t.body, 0)}"
    return f"({s})" if level > 0 else s


def show_ptype(e) -> str:
    head = f"§{{{e.b},{e.c}}}" if isinstance(e, PBang) else f"§{{{e.c}}}"
    sk = e.sk
    if isinstance(sk, SkVar):
        return head + sk.name
    if isinstance(sk, SkArrow):
        return f"{head}({show_ptype(sk.dom)} -o {show_ptype(sk.cod)})"
    return f"{head}(forall {sk.var}. {show_ptype(sk.body)})"


def show_term(t: PTerm) -> str:
    """Pseudo-terms print doors as ``§`` / ``§-``; p-terms as ``§{m}``."""
    def ty(x):
        return show_dtype(x) if not isinstance(x, (PLin, PBang)) else show_ptype(x)

    def atom(t):
        s = show_term(t)
        return s if isinstance(t, (PVar, PDoor)) else f"({s})"

    if isinstance(t, PVar):
        return t.name
    if isinstance(t, PDoor):
        if isinstance(t.exp, int):
            sym = ("§ " if t.exp > 0 else "§- ") * abs(t.exp)
        else:
            sym = f"§{{{t.exp}}} "
        inner = show_term(t.body) if isinstance(t.body, PVar) else f"({show_term(t.body)})"
        return sym + inner
    if isinstance(t, PLam):
        return f"\\{t.var}:{ty(t.type)}. {show_term(t.body)}"
    if isinstance(t, PTLam):
        return f"/\\{t.tvar}. {show_term(t.body)}"
    if isinstance(t, PApp):
        fun = show_term(t.fun) if isinstance(t.fun, (PVar, PApp, PTApp)) else f"({show_term(t.fun)})"
        return f"{fun} {atom(t.arg)}"
    fun = show_term(t.fun) if isinstance(t.fun, (PVar, PApp, PTApp)) else f"({show_term(t.fun)})"
    return f"{fun} [{ty(t.type)}]"


# ---------------------------------------------------------------- parsing

_DTOKENS = re.compile(r"""
    (?P<dbar>§-|§̄|\$-)
  | (?P<sect>§|\$)
  | (?P<bang>!)
  | (?P<lolli>-o|⊸)
  | (?P<imp>=>|⇒)
""", re.VERBOSE)


class _DParser(F.Parser):
    def __init__(self, text: str):
        super().__init__(text, _DTOKENS)

    def dtype(self) -> DType:
        if self.eat("forall"):
            name = self.expect("ident")
            self.expect("punct", ".")
            return DForall(name, self.dtype())
        left = self.dprefix()
        if self.eat("lolli"):
            return DLolli(left, self.dtype())
        if self.eat("imp"):
            return DImp(left, self.dtype())
        return left

    def dprefix(self) -> DType:
        if self.at("forall"):
            return self.dtype()
        if self.eat("sect"):
            return DPara(self.dprefix())
        if self.eat("bang"):
            return DBang(self.dprefix())
        if self.eat("punct", "("):
            t = self.dtype()
            self.expect("punct", ")")
            return t
        if self.at("ident"):
            return DVar(self.expect("ident"))
        k, v, pos = self.tok
        raise F.FParseError(f"unexpected {v or k!r}", pos, ("type",))

    def pterm(self, env: dict) -> PTerm:
        if self.at("sect") or self.at("dbar"):
            return self._door(lambda: self.pterm(env))
        if self.eat("lam"):
            name = self.expect("ident")
            self.expect("punct", ":")
            ty = star(self.dtype())
            self.expect("punct", ".")
            return PLam(name, ty, self.pterm({**env, name: ty}))
        if self.eat("tlam"):
            name = self.expect("ident")
            self.expect("punct", ".")
            return PTLam(name, self.pterm(env))
        return self.papp(env)

    def _door(self, rest) -> PTerm:
        sign = 1 if self.at("sect") else -1
        self.i += 1
        body = rest()
        if isinstance(body, PDoor) and (body.exp > 0) == (sign > 0):
            return PDoor(body.exp + sign, body.body)
        return PDoor(sign, body)

    def papp(self, env: dict) -> PTerm:
        t = self.patom(env)
        while True:
            if self.eat("punct", "["):
                ty = star(self.dtype())
                self.expect("punct", "]")
                t = PTApp(t, ty)
            elif self.at("ident") or self.at("punct", "(") or self.at("sect") or self.at("dbar"):
                t = PApp(t, self.patom(env))
            else:
                return t

    def patom(self, env: dict) -> PTerm:
        if self.at("sect") or self.at("dbar"):
            return self._door(lambda: self.patom(env))
        if self.eat("punct", "("):
            t = self.pterm(env)
            self.expect("punct", ")")
            return t
        if self.at("ident"):
            _, name, pos = self.tok
            self.i += 1
            if name not in env:
                raise F.FParseError(f"free variable {name!r} has no declared type", pos)
            return PVar(name, env[name])
        k, v, pos = self.tok
        raise F.FParseError(f"unexpected {v or k!r}", pos, ("identifier", "'('", "door"))


def parse_dtype(text: str) -> DType:
    """Parse a DLAL type; ``=>`` and ``!`` forms are both accepted."""
    p = _DParser(text)
    t = p.dtype()
    p.done()
    return t


def parse_pseudo(text: str, env: Optional[dict] = None) -> PTerm:
    """Parse a pseudo-term; binder types are read in star form."""
    p = _DParser(text)
    t = p.pterm({k: star(v) for k, v in (env or {}).items()})
    p.done()
    return t
