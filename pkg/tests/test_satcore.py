import itertools
import random

import pytest

from reloc.satcore import (
    CnfFormula,
    SatError,
    SatSolver,
    from_dimacs,
    incremental_solve,
    solve,
    to_dimacs,
)


def brute_force(num_vars, clauses):
    for bits in itertools.product([False, True], repeat=num_vars):
        model = {v: bits[v - 1] for v in range(1, num_vars + 1)}
        if all(any(model[abs(l)] == (l > 0) for l in c) for c in clauses):
            return model
    return None


def formula_of(num_vars, clauses):
    f = CnfFormula()
    for _ in range(num_vars):
        f.new_var()
    for c in clauses:
        f.add_clause(c)
    return f


def random_clauses(rng, num_vars, m, width=3):
    out = []
    for _ in range(m):
        w = rng.randint(1, width)
        out.append([rng.choice([-1, 1]) * rng.randint(1, num_vars) for _ in range(w)])
    return out


def php(holes):
    """Pigeonhole: holes+1 pigeons into `holes` holes. Classic UNSAT."""
    f = CnfFormula()
    pigeons = holes + 1
    var = {(p, h): f.new_var() for p in range(pigeons) for h in range(holes)}
    for p in range(pigeons):
        f.add_clause([var[p, h] for h in range(holes)])
    for h in range(holes):
        for p1 in range(pigeons):
            for p2 in range(p1 + 1, pigeons):
                f.add_clause([-var[p1, h], -var[p2, h]])
    return f


# --- formula container --------------------------------------------------------

def test_formula_rejects_unallocated_literals():
    f = formula_of(2, [])
    with pytest.raises(SatError):
        f.add_clause([3])
    with pytest.raises(SatError):
        f.add_clause([0])


def test_check_model():
    f = formula_of(2, [[1, 2], [-1]])
    assert f.check_model({1: False, 2: True})
    assert not f.check_model({1: False, 2: False})


# --- solver vs brute force ----------------------------------------------------

def test_trivial_cases():
    assert solve(formula_of(0, [])) == {}
    assert solve(formula_of(1, [[1], [-1]])) == "UNSAT"
    m = solve(formula_of(1, [[1]]))
    assert m == {1: True}


def test_random_formulas_match_brute_force():
    rng = random.Random(0)
    for trial in range(300):
        nv = rng.randint(1, 8)
        clauses = random_clauses(rng, nv, rng.randint(1, 24))
        f = formula_of(nv, clauses)
        got = solve(f)
        want = brute_force(nv, clauses)
        if want is None:
            assert got == "UNSAT", f"trial {trial}"
        else:
            assert isinstance(got, dict) and f.check_model(got), f"trial {trial}"


def test_pigeonhole_unsat():
    assert solve(php(5)) == "UNSAT"


def test_empty_clause_is_unsat():
    f = formula_of(2, [[1], []])
    assert solve(f) == "UNSAT"


# --- incremental interface ----------------------------------------------------

def test_incremental_matches_scratch():
    rng = random.Random(1)
    for trial in range(100):
        nv = rng.randint(2, 7)
        clauses = random_clauses(rng, nv, rng.randint(4, 20))
        s = SatSolver(nv)
        cut = rng.randint(0, len(clauses))
        for c in clauses[:cut]:
            s.add_clause(list(c))
        first = s.solve()
        # add the rest mid-session, possibly after a model was returned
        res = incremental_solve(s, clauses[cut:])
        want = brute_force(nv, clauses)
        if want is None:
            assert res == "UNSAT", f"trial {trial}"
        else:
            assert isinstance(res, dict), f"trial {trial} (first={first})"
            assert all(
                any(res[abs(l)] == (l > 0) for l in c) for c in clauses
            ), f"trial {trial}"


def test_incremental_tightening_to_unsat():
    s = SatSolver(3)
    s.add_clause([1, 2, 3])
    assert isinstance(s.solve(), dict)
    for res_expected, clause in [
        (dict, [-1]), (dict, [-2]), (str, [-3]),
    ]:
        res = incremental_solve(s, [clause])
        if res_expected is dict:
            assert isinstance(res, dict)
        else:
            assert res == "UNSAT"
    # once unsat, always unsat
    assert s.solve() == "UNSAT"


def test_incremental_unit_after_model():
    s = SatSolver(2)
    s.add_clause([1, 2])
    m = s.solve()
    assert isinstance(m, dict)
    picked = 1 if m[1] else 2
    res = incremental_solve(s, [[-picked]])
    assert isinstance(res, dict) and not res[picked]


# --- dimacs round trip --------------------------------------------------------

def test_dimacs_round_trip():
    f = formula_of(3, [[1, -2], [2, 3], [-3]])
    text = to_dimacs(f, comments=["hello"])
    g = from_dimacs(text)
    assert g.num_vars == f.num_vars and g.clauses == f.clauses


def test_dimacs_error_reports_line_numbers():
    with pytest.raises(SatError, match="line 2"):
        from_dimacs("p cnf 2 1\n1 3 0\n")
    with pytest.raises(SatError, match="line 1"):
        from_dimacs("1 2 0\np cnf 2 1\n")
    with pytest.raises(SatError, match="line 3"):
        from_dimacs("c ok\np cnf 2 1\n1 x 0\n")
    with pytest.raises(SatError, match="header"):
        from_dimacs("")
    with pytest.raises(SatError, match="unterminated"):
        from_dimacs("p cnf 2 1\n1 2\n")
    with pytest.raises(SatError, match="declared 2"):
        from_dimacs("p cnf 2 2\n1 2 0\n")


def test_dimacs_multi_clause_lines_and_blank_lines():
    f = from_dimacs("p cnf 2 2\n\n1 0 -2 0\n")
    assert f.clauses == [[1], [-2]]
