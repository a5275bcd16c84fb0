"""Shared fixtures data: hand-written pseudo-terms and oracle comparisons."""

import itertools
import random

from dlal import constraints as C
from dlal import decor as D
from dlal import solver as S
from dlal import verify as V

# criterion number -> (ok, detail), filled in by the acceptance tests
ACCEPTANCE = {}

# name -> (pseudo-term, expected (condition, clause) or None)
NAMED = {
    "dereliction": ("\\x:§a. §- x", ("bracketing", "iii")),
    "digging": ("\\x:§a. § x", ("bracketing", "iii")),
    "mon1": ("\\x:!(a -o b). \\y:!b -o c. \\z:!a. y § ((§- x) §- z)", ("bang", "i")),
    "mon2": ("\\x:§a. \\y:!a -o b. y § (§- x)", ("bang", "i")),
    "t1": ("\\x:§(forall a. a). /\\a. § ((§- x) [a])", None),
    "t2": ("\\x:forall a. §a. § /\\a. §- (x [a])", ("scope", "")),
}


def verdict(text):
    v = V.verify_all(D.parse_pseudo(text))
    return None if v is None else (v.condition, v.clause)


def oracle_agrees(term, store, phi):
    """Store satisfaction and the direct checker agree on one instantiation."""
    if D.admissibility_violation(term, phi):
        return True
    by_store = not store.violated(phi)
    by_check = V.verify_all(D.instantiate(term, phi)) is None
    return by_store == by_check


def exhaustive_mismatches(m, bound):
    """(assignments, passing, mismatches) over the whole box."""
    g = C.gen_all(m)
    dec = g.decoration
    bools, ints = dec.bool_params(), dec.int_params()
    total = passing = 0
    bad = []
    for bv in itertools.product((0, 1), repeat=len(bools)):
        for iv in itertools.product(range(-bound, bound + 1), repeat=len(ints)):
            phi = D.Instantiation(dict(zip(bools, bv)), dict(zip(ints, iv)))
            if D.admissibility_violation(dec.term, phi):
                continue
            total += 1
            ok = not g.store.violated(phi)
            passing += ok
            if ok != (V.verify_all(D.instantiate(dec.term, phi)) is None):
                bad.append(phi)
    return total, passing, bad


def perturbations(m, count, seed=0):
    """Instantiations near a solver solution, each admissible."""
    g = C.gen_all(m)
    sol = S.solve_all(g.store)
    rng = random.Random(seed)
    dec = g.decoration
    bools, ints = dec.bool_params(), dec.int_params()
    out = []
    while len(out) < count:
        b = {k: sol.phi.b(k) for k in bools}
        i = {k: sol.phi.ints.get(k, 0) for k in ints}
        for _ in range(rng.randint(1, 3)):
            if bools and rng.random() < 0.3:
                k = rng.choice(bools)
                b[k] = 1 - b[k]
            else:
                k = rng.choice(ints)
                i[k] += rng.choice([-2, -1, 1, 2])
        phi = D.Instantiation(b, i)
        if not D.admissibility_violation(dec.term, phi):
            out.append(phi)
    return g, out


def random_admissible(d, rng, spread=3):
    bools = {b: rng.randint(0, 1) for b in d.bool_params()}
    ints = {}
    for p in d.int_params():
        ints[p] = rng.randint(-spread, spread) if p.startswith("m") else rng.randint(0, spread)
    for _, s in D.occurrences(d.term):
        if isinstance(s, (D.PVar, D.PLam, D.PTApp)):
            for node in D.ptype_nodes(s.type):
                if isinstance(node, D.PBang) and bools[node.b] and ints[node.c.params()[0]] < 1:
                    ints[node.c.params()[0]] = rng.randint(1, spread)
    return D.Instantiation(bools, ints)
