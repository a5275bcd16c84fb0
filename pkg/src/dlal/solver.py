"""Boolean minimal solution, guard elimination and exact rational simplex."""

from __future__ import annotations

import math
from collections import defaultdict, deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import constraints as C
from .decor import Instantiation, param_key


class Unsatisfiable(Exception):
    def __init__(self, phase: str, message: str, atoms=(), trace=(), certificate=None):
        super().__init__(message)
        self.phase = phase
        self.atoms = list(atoms)
        self.trace = list(trace)
        self.certificate = certificate

    def as_dict(self) -> dict:
        return {
            "phase": self.phase,
            "message": str(self),
            "atoms": [{"atom": str(a), "rule": a.prov[0], "path": _path(a.prov[1])}
                      for a in self.atoms],
            "trace": list(self.trace),
            "certificate": None if self.certificate is None else str(self.certificate),
        }


def _path(p):
    return ".".join(map(str, p)) if p else "ε"


# ---------------------------------------------------------------- boolean phase


def solve_boolean_minimal(atoms, params=()) -> dict:
    """Least boolean assignment satisfying the atoms, by saturation.

    Returns a total map over ``params`` and every parameter mentioned.
    Raises Unsatisfiable with a derivation trace when some parameter is
    forced both to 0 and to 1.
    """
    eq = defaultdict(list)
    impl = defaultdict(list)
    derived: dict = {}
    queue = deque()
    names = set(params)

    def derive(b, v, why, parent):
        if (b, v) in derived:
            return
        derived[(b, v)] = (why, parent)
        queue.append((b, v))

    for a in atoms:
        if isinstance(a, C.BoolEq):
            eq[a.a].append((a.b, a))
            eq[a.b].append((a.a, a))
            names |= {a.a, a.b}
        elif isinstance(a, C.BoolImpl):
            impl[a.a].append((a.b, a))
            names |= {a.a, a.b}
        elif isinstance(a, C.BoolConst):
            names.add(a.b)
    for a in atoms:
        if isinstance(a, C.BoolConst):
            derive(a.b, a.value, a, None)

    while queue:
        b, v = queue.popleft()
        if (b, 1 - v) in derived:
            trace = _trace(derived, (b, v)) + _trace(derived, (b, 1 - v))
            culprits = [derived[k][0] for k in ((b, v), (b, 1 - v))]
            raise Unsatisfiable("boolean", f"{b} is forced to both 0 and 1",
                                culprits, trace)
        for other, a in eq[b]:
            derive(other, v, a, (b, v))
        if v == 1:
            for other, a in impl[b]:
                derive(other, 1, a, (b, v))

    return {b: int((b, 1) in derived) for b in sorted(names, key=param_key)}


def _trace(derived, key) -> list:
    out = []
    while key is not None:
        why, parent = derived[key]
        out.append(f"{key[0]} = {key[1]} by {why} [{why.prov[0]} at {_path(why.prov[1])}]")
        key = parent
    return out[::-1]


def apply_guards(psi: dict, mixed) -> list:
    return [m.guarded() for m in mixed if psi.get(m.b, 0) == 1]


# ---------------------------------------------------------------- simplex


class Infeasible(Exception):
    def __init__(self, objective: Fraction, rows: list):
        super().__init__(f"phase-1 optimum {objective} > 0")
        self.objective = objective
        self.rows = rows


@dataclass
class _Tableau:
    rows: list           # list of dict col -> Fraction
    rhs: list
    basis: list
    ncols: int
    artificial: set = field(default_factory=set)

    def pivot(self, r: int, col: int):
        row = self.rows[r]
        piv = row[col]
        if piv != 1:
            inv = 1 / piv
            for k in row:
                row[k] *= inv
            self.rhs[r] *= inv
        for i, other in enumerate(self.rows):
            if i == r:
                continue
            f = other.get(col)
            if not f:
                continue
            for k, v in row.items():
                nv = other.get(k, 0) - f * v
                if nv:
                    other[k] = nv
                else:
                    other.pop(k, None)
            self.rhs[i] -= f * self.rhs[r]
        self.basis[r] = col

    def minimize(self, cost: dict, allowed) -> Fraction:
        """Bland's-rule primal simplex on the current basis; returns optimum."""
        while True:
            # reduced cost of column j: cost_j - sum_i cost_{basis_i} * a_ij
            red = dict((j, c) for j, c in cost.items() if allowed(j))
            for i, row in enumerate(self.rows):
                cb = cost.get(self.basis[i], 0)
                if cb:
                    for j, v in row.items():
                        if allowed(j):
                            red[j] = red.get(j, 0) - cb * v
            basic = set(self.basis)
            entering = min((j for j, v in red.items() if v < 0 and j not in basic),
                           default=None)
            if entering is None:
                return sum(cost.get(b, 0) * self.rhs[i] for i, b in enumerate(self.basis))
            best = None
            for i, row in enumerate(self.rows):
                a = row.get(entering, 0)
                if a > 0:
                    key = (self.rhs[i] / a, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                raise ArithmeticError("unbounded objective")
            self.pivot(best[1], entering)


def lp_feasible(rows, variables=None, objective: Optional[dict] = None) -> dict:
    """Exact rational feasibility (and optional minimization) of linear rows.

    Each row is ``(coeffs: dict var -> number, rel in {'=', '>='}, rhs)``.
    Equalities are eliminated exactly first; the remaining variables are free
    and each is split into a difference of two nonnegative columns. Returns a
    map var -> Fraction. Raises Infeasible otherwise.
    """
    names = sorted({v for r in rows for v in r[0]} | set(variables or ()), key=param_key)
    defs, ineqs = _eliminate(rows)
    sub_obj = None
    if objective:
        sub_obj, _ = _substitute({v: Fraction(c) for v, c in objective.items()}, defs)
    free = _simplex(ineqs, sub_obj)
    sol = {v: free.get(v, Fraction(0)) for v in names if v not in defs}
    for v, (expr, const) in defs.items():
        sol[v] = const + sum(c * sol.get(w, Fraction(0)) for w, c in expr.items())
    return {v: sol[v] for v in names}


def _substitute(coeffs: dict, defs: dict) -> tuple:
    """Rewrite ``sum coeffs`` over non-eliminated variables; returns (expr, const)."""
    out, const = {}, Fraction(0)
    for v, c in coeffs.items():
        if v in defs:
            expr, k = defs[v]
            const += c * k
            for w, d in expr.items():
                out[w] = out.get(w, 0) + c * d
        else:
            out[v] = out.get(v, 0) + c
    return {v: c for v, c in out.items() if c}, const


def _eliminate(rows) -> tuple:
    """Gauss-Jordan on the equality rows.

    Returns ``defs`` (var -> (expr, const) with var = expr + const over the
    remaining variables) and the inequality rows rewritten over those.
    """
    defs: dict = {}
    for idx, (coeffs, rel, b) in enumerate(rows):
        if rel != "=":
            continue
        expr, const = _substitute({v: Fraction(c) for v, c in coeffs.items()}, defs)
        rest = Fraction(b) - const
        if not expr:
            if rest:
                raise Infeasible(abs(rest), [idx])
            continue
        piv = min(expr, key=param_key)
        a = expr.pop(piv)
        new = ({v: -c / a for v, c in expr.items()}, rest / a)
        for v, (e, k) in list(defs.items()):
            c = e.pop(piv, None)
            if c:
                for w, d in new[0].items():
                    nv = e.get(w, 0) + c * d
                    if nv:
                        e[w] = nv
                    else:
                        e.pop(w, None)
                defs[v] = (e, k + c * new[1])
        defs[piv] = new
    ineqs = []
    for idx, (coeffs, rel, b) in enumerate(rows):
        if rel == "=":
            continue
        expr, const = _substitute({v: Fraction(c) for v, c in coeffs.items()}, defs)
        rest = Fraction(b) - const
        if not expr:
            if rest > 0:
                raise Infeasible(rest, [idx])
            continue
        ineqs.append((expr, rest, idx))
    return defs, ineqs


def _simplex(ineqs, objective: Optional[dict]) -> dict:
    """Rows ``expr >= rhs`` over free variables; phase 1 then optional phase 2."""
    names = sorted({v for e, _, _ in ineqs for v in e} | set(objective or ()), key=param_key)
    col = {v: (2 * i, 2 * i + 1) for i, v in enumerate(names)}
    ncols = 2 * len(names)
    trows, rhs, basis, origin = [], [], [], []
    art = set()
    pending = []
    for expr, b, idx in ineqs:
        row = {}
        for v, c in expr.items():
            p, m = col[v]
            row[p] = c
            row[m] = -c
        slack = ncols
        ncols += 1
        if b <= 0:
            # -expr + s = -b with s >= 0 starts basic
            row = {k: -v for k, v in row.items()}
            row[slack] = Fraction(1)
            trows.append(row)
            rhs.append(-b)
            basis.append(slack)
            origin.append(idx)
        else:
            row[slack] = Fraction(-1)
            pending.append((row, b, idx))
    for row, b, idx in pending:
        a = ncols
        ncols += 1
        row[a] = Fraction(1)
        art.add(a)
        trows.append(row)
        rhs.append(b)
        basis.append(a)
        origin.append(idx)

    tab = _Tableau(trows, rhs, basis, ncols, art)
    if art:
        opt = tab.minimize({a: 1 for a in art}, lambda j: True)
        if opt > 0:
            bad = sorted(origin[i] for i, b in enumerate(tab.basis) if b in art and tab.rhs[i] > 0)
            raise Infeasible(opt, bad)
        _drive_out(tab)
    if objective:
        cost = {}
        for v, c in objective.items():
            p, m = col[v]
            cost[p] = Fraction(c)
            cost[m] = -Fraction(c)
        tab.minimize(cost, lambda j: j not in art)

    values = [Fraction(0)] * tab.ncols
    for i, b in enumerate(tab.basis):
        values[b] = tab.rhs[i]
    return {v: values[p] - values[m] for v, (p, m) in col.items()}


def _drive_out(tab: _Tableau):
    """Pivot zero-level artificials out of the basis; drop redundant rows."""
    i = 0
    while i < len(tab.rows):
        if tab.basis[i] in tab.artificial:
            row = tab.rows[i]
            j = min((k for k in row if k not in tab.artificial), default=None)
            if j is None:
                del tab.rows[i], tab.rhs[i], tab.basis[i]
                continue
            tab.pivot(i, j)
        i += 1
    for row in tab.rows:
        for a in tab.artificial:
            row.pop(a, None)


def scale_to_integers(sol: dict) -> dict:
    """Multiply a rational solution by the lcm of its denominators."""
    lcm = 1
    for v in sol.values():
        lcm = math.lcm(lcm, Fraction(v).denominator)
    return {k: int(Fraction(v) * lcm) for k, v in sol.items()}


# ---------------------------------------------------------------- pipeline


@dataclass
class Solution:
    phi: Instantiation
    psi: dict
    rational: dict
    linear_atoms: list
    scale: int = 1


def _rows(atoms) -> list:
    return [a.row() for a in atoms]


def solve_all(store: C.Store, minimize: bool = False, bnb_limit: int = 200) -> Solution:
    """Boolean phase, guards, simplex, integer scaling, exact re-check."""
    bools, ints = store.params()
    psi = solve_boolean_minimal(store.boolean, bools)
    linear = store.linear + apply_guards(psi, store.mixed)
    objective = {v: 1 for v in ints if v.startswith("n")} if minimize else None
    try:
        rational = lp_feasible(_rows(linear), ints, objective)
    except Infeasible as e:
        raise Unsatisfiable("linear", "the linear system has no rational solution",
                            [linear[i] for i in e.rows], certificate=e.objective) from None
    ints_sol = scale_to_integers(rational)
    scale = _scale_factor(rational)
    phi = Instantiation(dict(psi), ints_sol)
    if store.violated(phi):
        # only non-homogeneous goal atoms can break under scaling
        ints_sol = _branch_and_bound(linear, ints, objective, bnb_limit)
        phi = Instantiation(dict(psi), ints_sol)
        scale = 1
    bad = store.violated(phi)
    if bad:
        raise RuntimeError(f"solver produced an assignment violating {bad[0]}")
    return Solution(phi, psi, rational, linear, scale)


def _scale_factor(sol: dict) -> int:
    lcm = 1
    for v in sol.values():
        lcm = math.lcm(lcm, Fraction(v).denominator)
    return lcm


def _branch_and_bound(linear, ints, objective, limit) -> dict:
    stack = [[]]
    explored = 0
    while stack and explored < limit:
        extra = stack.pop()
        explored += 1
        try:
            sol = lp_feasible(_rows(linear) + extra, ints, objective)
        except Infeasible:
            continue
        frac = next((v for v in sorted(sol, key=param_key) if sol[v].denominator != 1), None)
        if frac is None:
            return {k: int(v) for k, v in sol.items()}
        fl = math.floor(sol[frac])
        stack.append(extra + [({frac: 1}, ">=", fl + 1)])
        stack.append(extra + [({frac: -1}, ">=", -fl)])
    raise Unsatisfiable("linear", "no integer solution found within the branch-and-bound limit")
