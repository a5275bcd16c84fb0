import pytest

from dlal import encodings as E
from dlal import fterm as F
from dlal.fterm import Arrow, Forall, Lam, TLam, TVar, Var


def test_parse_identity():
    t = F.parse_term("/\\a. \\x:a. x")
    assert t == TLam("a", Lam("x", TVar("a"), Var("x", TVar("a"))))


def test_parse_unicode_and_comments():
    t = F.parse_term("Λa. λx:a → a. x -- trailing comment")
    assert F.typecheck(t) == Forall("a", Arrow(Arrow(TVar("a"), TVar("a")), Arrow(TVar("a"), TVar("a"))))


def test_parse_self_application_then_reject():
    t = F.parse_term("\\x:a. x x")
    with pytest.raises(F.FTypeError):
        F.typecheck(t)


@pytest.mark.parametrize("text", ["\\x a. x", "/\\a x", "(\\x:a. x", "\\x:a. x ]"])
def test_parse_errors_carry_position(text):
    with pytest.raises(F.FParseError) as e:
        F.parse_term(text)
    assert e.value.pos >= 0


def test_typecheck_examples():
    assert F.show_type(F.typecheck(E.load("id"))) == "forall a. a -> a"
    assert F.alpha_eq(F.typecheck(E.word("1010")), E.W_F)
    with pytest.raises(F.FTypeError, match="non-polymorphic"):
        F.typecheck(F.parse_term("\\x:a. x [a]"))


def test_eigenvariable_condition():
    with pytest.raises(F.FTypeError, match="eigenvariable"):
        F.typecheck(F.parse_term("\\x:a. /\\a. x"))


def test_unbound_variable():
    with pytest.raises(F.FTypeError, match="unbound"):
        F.typecheck(F.parse_term("y"))
    assert F.typecheck(F.parse_term("y"), {"y": TVar("b")}) == TVar("b")


def test_term_size():
    assert F.term_size(Var("x", TVar("a"))) == 1
    assert F.term_size(F.parse_term("\\x:a. x")) == 2
    # golden sizes of the corpus, recorded once and audited on the identity
    sizes = {name: F.term_size(E.load(name)) for name in ("id", "rev", "append", "rev-1010")}
    assert sizes == {"id": 3, "rev": 27, "append": 21, "rev-1010": 41}


def test_beta_normalize_counts_term_steps_only():
    t = F.parse_term("(\\x:a. x) y")
    nf, steps = F.beta_normalize(F.annotate(t, {"y": TVar("a")}))
    assert steps == 1 and nf == Var("y", TVar("a"))
    nf, steps = F.beta_normalize(F.parse_term("(/\\a. \\x:a. x) [b]"))
    assert steps == 0 and isinstance(nf, Lam)


def test_normal_form_is_fixed_point():
    w = E.word("0110")
    assert F.beta_normalize(w) == (w, 0)


def test_rev_1010_reverses():
    nf, steps = F.beta_normalize(E.rev_applied("1010"))
    assert F.term_alpha_eq(nf, E.word("0101"))
    assert steps == 12


def test_fuel_exhausted():
    with pytest.raises(F.FuelExhausted) as e:
        F.beta_normalize(E.rev_applied("1010"), fuel=3)
    assert e.value.steps <= 3


@pytest.mark.parametrize("name", sorted(E.encodings()))
def test_subject_reduction(name):
    t = E.load(name)
    nf, _ = F.beta_normalize(t)
    assert F.alpha_eq(F.typecheck(nf), F.typecheck(t))


@pytest.mark.parametrize("name", sorted(E.encodings()))
def test_print_parse_round_trip(name):
    t = E.load(name)
    assert F.term_alpha_eq(F.parse_term(F.show_term(t)), t)


def test_alpha_normalize_makes_binders_unique():
    t = E.load("rev-rev")
    names = [s.var for _, s in F.occurrences(t) if isinstance(s, Lam)]
    tnames = [s.tvar for _, s in F.occurrences(t) if isinstance(s, TLam)]
    assert len(names) == len(set(names))
    assert len(tnames) == len(set(tnames))


def test_capture_avoiding_substitution():
    # (\y:a. \x:a. y) x  must not capture the free x
    t = F.annotate(F.parse_term("(\\y:a. \\x:a. y) x"), {"x": TVar("a")})
    nf, _ = F.beta_normalize(t)
    assert isinstance(nf, Lam) and nf.var != "x" and nf.body == Var("x", TVar("a"))


def test_encodings_shapes():
    assert F.show_term(E.word("")) == "/\\a. \\so:a -> a. \\si:a -> a. \\x:a. x"
    assert F.alpha_eq(F.typecheck(E.numeral(3)), E.N_F)
    assert F.alpha_eq(F.typecheck(E.load("exp-fn")), Arrow(E.N_F, E.N_F))
    with pytest.raises(KeyError):
        E.lookup("nope")
