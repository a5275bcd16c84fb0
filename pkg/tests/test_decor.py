import random

import pytest

from dlal import constraints as C
from dlal import decor as D
from dlal import encodings as E
from dlal import fterm as F
from dlal.decor import LinComb, PBang, PLin, SkArrow, SkForall, SkVar

from helpers import random_admissible


def dec(src):
    return D.free_decoration(F.annotate(F.alpha_normalize(F.parse_term(src))))


W_DLAL = "forall a. (a -o a) => (a -o a) => §(a -o a)"


def test_free_decoration_variable():
    d = D.free_decoration(F.Var("x", F.TVar("a")))
    assert D.show_term(d.term) == "§{m1} x"
    assert d.var_types["x"] == PBang("b1", LinComb.of("n1"), SkVar("a"))


def test_free_decoration_identity():
    d = dec("\\x:a. x")
    assert D.show_term(d.term) == "§{m1} (\\x:§{b1,n1}a. §{m2} x)"


def test_free_decoration_type_application_is_linear():
    d = dec("(/\\a. \\x:a. x) [b]")
    top = d.term.body
    assert isinstance(top, D.PTApp) and isinstance(top.type, PLin)


def test_free_decoration_fresh_and_single():
    d = dec(E.REV)
    assert len(d.int_params()) == 58 and len(d.bool_params()) == 18
    for _, s in D.occurrences(d.term):
        if isinstance(s, (D.PVar, D.PLam, D.PTApp)):
            assert all(len(n.c.terms) == 1 for n in D.ptype_nodes(s.type))


def test_shared_decoration_per_variable():
    d = dec("\\f:a -> a. \\x:a. f (f x)")
    fs = [s.type for _, s in D.occurrences(d.term) if isinstance(s, D.PVar) and s.name == "f"]
    assert len(fs) == 2 and fs[0] is fs[1]


@pytest.mark.parametrize("name", sorted(E.encodings()))
def test_erase_free_decoration(name):
    m = E.load(name)
    assert F.term_alpha_eq(D.erase(D.free_decoration(m).term), m)


def test_ptype_subst_clauses():
    a = PLin(LinComb.of("n9"), SkVar("g"))
    b = PLin(LinComb.of("n1"), SkVar("x"))
    assert D.ptype_subst(b, "x", a) == PLin(LinComb.of("n1", "n9"), SkVar("g"))
    assert D.ptype_subst(b, "y", a) == b
    inner = PBang("b1", LinComb.of("n2"), SkVar("x"))
    body = PLin(LinComb(), SkArrow(inner, PLin(LinComb.of("n3"), SkVar("y"))))
    out = D.ptype_subst(PLin(LinComb(), SkForall("y", body)), "x", a)
    assert out.sk.body.sk.dom == PBang("b1", LinComb.of("n2", "n9"), SkVar("g"))
    assert out.c == LinComb()


def test_ptype_subst_avoids_capture():
    b = PLin(LinComb(), SkForall("y", PLin(LinComb(), SkVar("x"))))
    a = PLin(LinComb(), SkVar("y"))
    out = D.ptype_subst(b, "x", a)
    assert out.sk.var != "y" and out.sk.body.sk == SkVar("y")


def test_ptype_subst_commutes_with_erasure():
    rng = random.Random(3)
    for name in ("rev", "append", "double"):
        d = D.free_decoration(E.load(name))
        ptypes = [s.type for _, s in D.occurrences(d.term) if isinstance(s, D.PLam)]
        for _ in range(20):
            b, a = rng.choice(ptypes), rng.choice(ptypes).circ
            for v in sorted(D.ptype_ftv(b)):
                lhs = D.erase_type(D.ptype_subst(b, v, a))
                rhs = F.subst_type(D.erase_type(b), v, D.erase_type(a))
                assert F.alpha_eq(lhs, rhs)


def test_lincomb_coefficients():
    c = LinComb.of("m1") + LinComb.of("n2", "m1")
    assert c.as_dict() == {"m1": 2, "n2": 1} and str(c) == "2m1 + n2"
    assert C.lsum([]) == LinComb() and str(C.lsum(["m", "n", "m"])) == "2m + n"


def test_instantiate_bang_and_doors():
    e = PBang("b1", LinComb.of("n1"), SkVar("a"))
    phi = D.Instantiation({"b1": 1}, {"n1": 2})
    assert D.show_dtype(D.instantiate_type(e, phi)) == "!§a"
    d = dec("\\x:a. x")
    phi = D.Instantiation({}, {"m1": 0, "m2": -1, "n1": 1})
    assert D.show_term(D.instantiate(d.term, phi)) == "\\x:§a. §- x"
    assert D.show_term(D.instantiate(d.term, D.Instantiation())) == "\\x:a. x"


def test_instantiate_rejects_inadmissible():
    d = dec("\\x:a. x")
    with pytest.raises(D.InstantiationError, match="b1 = 1"):
        D.instantiate(d.term, D.Instantiation({"b1": 1}, {"n1": 0}))
    with pytest.raises(D.InstantiationError, match=">= 0"):
        D.instantiate(d.term, D.Instantiation({}, {"n1": -1}))


def test_instantiate_is_regular():
    rng = random.Random(7)
    d = D.free_decoration(E.load("rev"))
    for _ in range(50):
        phi = random_admissible(d, rng)
        t = D.instantiate(d.term, phi)
        for _, s in D.occurrences(t):
            if isinstance(s, D.PDoor):
                assert not (isinstance(s.body, D.PDoor) and (s.body.exp > 0) != (s.exp > 0))


def test_star_and_inverse():
    w = D.parse_dtype(W_DLAL)
    ws = D.star(w)
    assert D.show_dtype(ws) == "forall a. !(a -o a) -o !(a -o a) -o §(a -o a)"
    assert D.star_inverse(ws) == w
    t = D.parse_dtype("!(a -o a) -o §(a -o a)")
    assert D.show_dtype(D.star_inverse(t)) == "(a -o a) => §(a -o a)"
    plain = D.parse_dtype("a -o §a")
    assert D.star_inverse(plain) == plain
    with pytest.raises(D.StarError):
        D.star_inverse(D.parse_dtype("a -o !a"))


def test_depth_and_pi1():
    w = D.parse_dtype(W_DLAL)
    assert D.depth(D.DVar("a")) == 0
    assert D.depth(w) == 1
    assert D.depth(D.star_inverse(D.star(w))) == 1
    ww = D.DLolli(w, D.DPara(w))
    assert D.depth(ww) == 2
    assert D.is_pi1(w) and not D.is_pi1(ww)
    assert D.is_pi1(D.parse_dtype("a -o a"))


def test_erase_types():
    w = D.parse_dtype(W_DLAL)
    assert F.alpha_eq(D.erase(w), E.W_F)
    assert D.erase(D.parse_dtype("!§a -o b")) == F.Arrow(F.TVar("a"), F.TVar("b"))


@pytest.mark.parametrize("text", [
    "forall a. (a -o a) => (a -o a) => §(a -o a)",
    "!(a -o b) -o §§c",
    "§(forall a. a) -o b",
])
def test_dtype_print_parse_round_trip(text):
    t = D.parse_dtype(text)
    assert D.parse_dtype(D.show_dtype(t)) == t


def test_pseudo_ascii_aliases():
    a = D.parse_pseudo("\\x:$a. $- x")
    b = D.parse_pseudo("\\x:§a. §- x")
    assert a == b


def test_pseudo_round_trip_of_instantiations():
    rng = random.Random(11)
    for name in ("rev-1010", "append", "cons0"):
        d = D.free_decoration(E.load(name))
        for _ in range(10):
            t = D.instantiate(d.term, random_admissible(d, rng))
            assert D.parse_pseudo(D.show_term(t)) == t
