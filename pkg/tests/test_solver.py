import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dlal import constraints as C
from dlal import decor as D
from dlal import encodings as E
from dlal import fterm as F
from dlal import solver as S
from dlal.decor import LinComb

L = LinComb.of


def store_of(atoms):
    s = C.Store()
    for i, a in enumerate(atoms):
        s.add(a, "test", (i,))
    return s


def brute_boolean(atoms, names):
    sols = []
    for bits in itertools.product((0, 1), repeat=len(names)):
        phi = D.Instantiation(dict(zip(names, bits)), {})
        if all(a.holds(phi) for a in atoms):
            sols.append(dict(zip(names, bits)))
    return sols


# ---------------------------------------------------------------- boolean phase


def test_boolean_examples():
    atoms = [C.BoolEq("b1", "b2"), C.BoolImpl("b2", "b3"), C.BoolConst("b1", 1)]
    assert S.solve_boolean_minimal(atoms, ["b4"]) == {"b1": 1, "b2": 1, "b3": 1, "b4": 0}
    # implication in the other direction does not propagate 0 -> 1
    assert S.solve_boolean_minimal([C.BoolImpl("b1", "b2"), C.BoolConst("b2", 1)]) == {"b1": 0, "b2": 1}


def test_boolean_conflict_has_trace():
    atoms = [C.BoolConst("b1", 1), C.BoolEq("b1", "b2"), C.BoolConst("b2", 0)]
    s = store_of(atoms)
    with pytest.raises(S.Unsatisfiable) as e:
        S.solve_boolean_minimal(s.boolean)
    assert e.value.phase == "boolean"
    assert any("b2 = 1" in line for line in e.value.trace)
    assert any("b2 = 0" in line for line in e.value.trace)


def test_equality_propagates_zero_both_ways():
    atoms = [C.BoolConst("b2", 0), C.BoolEq("b1", "b2"), C.BoolImpl("b3", "b1"), C.BoolConst("b3", 1)]
    with pytest.raises(S.Unsatisfiable):
        S.solve_boolean_minimal(atoms)


def boolean_atom(names):
    return st.one_of(
        st.builds(C.BoolEq, st.sampled_from(names), st.sampled_from(names)),
        st.builds(C.BoolImpl, st.sampled_from(names), st.sampled_from(names)),
        st.builds(C.BoolConst, st.sampled_from(names), st.integers(0, 1)),
    )


NAMES = [f"b{i}" for i in range(1, 7)]


@settings(max_examples=300, deadline=None)
@given(st.lists(boolean_atom(NAMES), max_size=12))
def test_boolean_minimality_against_brute_force(atoms):
    sols = brute_boolean(atoms, NAMES)
    if not sols:
        with pytest.raises(S.Unsatisfiable):
            S.solve_boolean_minimal(atoms, NAMES)
        return
    psi = S.solve_boolean_minimal(atoms, NAMES)
    assert psi in sols
    for other in sols:
        assert all(psi[b] <= other[b] for b in NAMES)


def test_guards():
    mixed = [C.Mixed("b1", L("n1"), 1), C.Mixed("b2", L("n2"), 0)]
    assert S.apply_guards({"b1": 1, "b2": 0}, mixed) == [C.LinGeq(L("n1"), 1)]


# ---------------------------------------------------------------- linear phase


def test_lp_examples():
    sol = S.lp_feasible([({"x1": 1, "x2": -1}, "=", 0), ({"x1": 1}, ">=", 1)])
    assert sol["x1"] == sol["x2"] >= 1
    with pytest.raises(S.Infeasible):
        S.lp_feasible([({"x": 1}, ">=", 1), ({"x": 1}, "=", 0)])
    with pytest.raises(S.Infeasible):
        S.lp_feasible([({"x": 1, "y": 1}, ">=", 1), ({"x": -1}, ">=", 0), ({"y": -1}, ">=", 0)])


def test_lp_negative_values_allowed():
    sol = S.lp_feasible([({"m1": 1}, ">=", -3), ({"m1": -1}, ">=", 2)])
    assert -3 <= sol["m1"] <= -2


def test_fractional_then_scaled():
    rows = [({"x": 1, "y": 1}, ">=", 1), ({"x": 3, "y": -1}, "=", 0), ({"x": 1}, ">=", 0)]
    sol = S.lp_feasible(rows)
    assert sol == {"x": Fraction(1, 4), "y": Fraction(3, 4)}
    assert S.scale_to_integers(sol) == {"x": 1, "y": 3}


def test_minimize():
    rows = [({"n1": 1, "n2": 1}, ">=", 2), ({"n1": 1}, ">=", 0), ({"n2": 1}, ">=", 0),
            ({"n1": 1}, ">=", 5)]
    sol = S.lp_feasible(rows, objective={"n1": 1, "n2": 1})
    assert sol["n1"] + sol["n2"] == 5


def random_homogeneous_system(rng, nvars, nrows):
    names = [f"n{i}" for i in range(1, nvars + 1)]
    rows = [({v: 1}, ">=", 0) for v in names]
    for _ in range(nrows):
        vs = rng.sample(names, rng.randint(1, min(3, nvars)))
        coeffs = {v: rng.choice([-2, -1, 1, 2, 3]) for v in vs}
        rel = rng.choice(["=", ">=", ">="])
        rows.append((coeffs, rel, 0 if rel == "=" else rng.randint(0, 1)))
    return names, rows


def test_scaling_preserves_homogeneous_systems():
    rng = random.Random(5)
    solved = fractional = 0
    for _ in range(300):
        names, rows = random_homogeneous_system(rng, rng.randint(2, 5), rng.randint(1, 5))
        try:
            sol = S.lp_feasible(rows, names)
        except S.Infeasible:
            continue
        solved += 1
        fractional += any(v.denominator != 1 for v in sol.values())
        ints = S.scale_to_integers(sol)
        for coeffs, rel, k in rows:
            lhs = sum(c * ints[v] for v, c in coeffs.items())
            assert lhs == k if rel == "=" else lhs >= k
    assert solved > 50 and fractional > 5


def test_infeasible_matches_brute_force_on_small_boxes():
    rng = random.Random(9)
    for _ in range(150):
        names, rows = random_homogeneous_system(rng, 2, rng.randint(2, 4))
        try:
            S.lp_feasible(rows, names)
            feasible = True
        except S.Infeasible:
            feasible = False
        # every feasible homogeneous system of this shape has a small integer point
        box = any(all(sum(c * dict(zip(names, p))[v] for v, c in co.items()) == k if rel == "="
                      else sum(c * dict(zip(names, p))[v] for v, c in co.items()) >= k
                      for co, rel, k in rows)
                  for p in itertools.product(range(0, 13), repeat=2))
        if box:
            assert feasible


# ---------------------------------------------------------------- pipeline


def solve(m, goal=None, **kw):
    g = C.gen_all(m, goal)
    return g, S.solve_all(g.store, **kw)


@pytest.mark.parametrize("name", ["id", "rev", "append", "double", "rev-1010", "cons0", "lin-id"])
def test_solution_satisfies_store(name):
    g, sol = solve(E.load(name))
    assert not g.store.violated(sol.phi)
    assert all(isinstance(v, int) for v in sol.phi.ints.values())


def test_linear_rejection_certificate():
    s = store_of([C.LinGeq(L("n1"), 1), C.LinEq(L("n1"), LinComb())])
    with pytest.raises(S.Unsatisfiable) as e:
        S.solve_all(s)
    assert e.value.phase == "linear" and e.value.certificate > 0


def test_exp_rejected_in_boolean_phase():
    with pytest.raises(S.Unsatisfiable) as e:
        solve(E.load("exp"))
    assert e.value.phase == "boolean"


def test_minimize_does_not_increase_size():
    g, plain = solve(E.load("rev-1010"))
    _, small = solve(E.load("rev-1010"), minimize=True)
    n = lambda phi: sum(v for k, v in phi.ints.items() if k.startswith("n"))
    assert n(small.phi) <= n(plain.phi)
    assert not g.store.violated(small.phi)


def test_goal_forces_shape():
    goal = D.parse_dtype("forall a. §a -o §a")
    g, sol = solve(E.load("id"), goal)
    t = D.instantiate(g.decoration.term, sol.phi)
    from dlal import verify as V
    assert V.verify_all(t) is None
    types = V.check_local_typing(t)
    assert D.dtype_eq(types[()], D.star(goal))


def test_branch_and_bound_fallback():
    s = store_of([C.LinConst(L("n1", "n2"), 1), C.LinEq(L("n1"), L("n2")),
                  C.LinGeq(L("n1"), 0)])
    with pytest.raises(S.Unsatisfiable):
        S.solve_all(s)
    s = store_of([C.LinConst(L("n1", "n2", "n3"), 2), C.LinEq(L("n1"), L("n2")),
                  C.LinGeq(L("n1"), 0), C.LinGeq(L("n3"), 0), C.LinGeq(L("n3", "n1"), 1)])
    sol = S.solve_all(s)
    assert not s.violated(sol.phi)


def test_large_random_store_is_fast():
    import time
    t0 = time.perf_counter()
    solve(E.rev_applied("10" * 4))
    assert time.perf_counter() - t0 < 10
