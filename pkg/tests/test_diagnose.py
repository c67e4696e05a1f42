import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from effham import diagnose as dg
from effham import hamlib as hl
from effham.effective import EffectiveTable, PGrid, exact_table
from effham.hjsolver import SolverConfig, TorusGrid


def _table(f, dim=2, samples=21, ranges=None):
    pg = PGrid(dim, ranges or (1.0,) * dim, samples)
    P = pg.points()
    return EffectiveTable(pg, f(P))


def _in_hull_slow(pts, q):
    # q is in the hull iff no separating direction among edge normals of point pairs
    pts = [tuple(map(Fraction, p)) for p in pts]
    q = tuple(map(Fraction, q))
    if q in pts:
        return True
    cands = {(b[1] - a[1], a[0] - b[0]) for a in pts for b in pts if a != b}
    cands |= {(1, 0), (-1, 0), (0, 1), (0, -1)}
    for n in cands:
        if all(n[0] * (p[0] - q[0]) + n[1] * (p[1] - q[1]) < 0 for p in pts):
            return False
    return True


_pt = st.tuples(st.integers(-6, 6), st.integers(-6, 6))


@settings(max_examples=150, deadline=None)
@given(st.lists(_pt, min_size=1, max_size=9), st.lists(_pt, min_size=1, max_size=12))
def test_lattice_hull_membership_is_exact(pts, queries):
    hull = dg._hull(np.array(pts))
    got = dg._inside_hull(hull, np.array(queries))
    want = [_in_hull_slow(pts, q) for q in queries]
    assert got.tolist() == want
    assert dg._inside_hull(hull, np.array(pts)).all()


def test_paraboloid_passes_everything_convex():
    t = _table(lambda P: (P ** 2).sum(-1))
    assert dg.quasiconvexity_check(t).passed
    assert dg.evenness_defect(t).defect == 0.0
    rep = dg.flat_part(t, tolerance=1e-9)
    assert rep.passed and rep.defect == 0.0 and rep.details["nodes"] == 1


def test_double_well_zero_potential_is_not_quasiconvex():
    H = hl.double_well()
    t = exact_table(H, PGrid(2, (2.0, 2.0), 21))
    rep = dg.quasiconvexity_check(t)
    assert not rep.passed
    assert rep.defect == pytest.approx(1.0, abs=1e-12)
    lv = dg.levelset_convexity(t, 0.5)
    assert not lv.passed
    assert (0.5, (0.0, 0.0)) in lv.witnesses


def test_levelset_1d_interval():
    t = _table(lambda P: np.abs(np.abs(P[..., 0]) - 0.5), dim=1)
    assert not dg.levelset_convexity(t, 0.2).passed
    assert dg.levelset_convexity(t, 0.6).passed
    assert dg.levelset_convexity(t, -1.0).defect == 0.0


def test_unconverged_nodes_are_ignored():
    pg = PGrid(1, samples=5)
    vals = np.array([0.0, 0.0, 9.0, 0.0, 0.0])
    conv = np.array([True, True, False, True, True])
    assert dg.quasiconvexity_check(EffectiveTable(pg, vals, conv)).passed
    assert not dg.quasiconvexity_check(EffectiveTable(pg, vals)).passed
    odd = EffectiveTable(pg, [0.0, 1.0, 0.0, 3.0, 0.0], [True, False, True, True, True])
    assert dg.evenness_defect(odd).defect == 0.0


def test_evenness_witnesses():
    t = _table(lambda P: P[..., 0] + P[..., 1] ** 2)
    rep = dg.evenness_defect(t, 0.5)
    assert rep.defect == pytest.approx(2.0)
    assert (1.0, 0.0) in rep.witnesses and (-1.0, 0.0) in rep.witnesses


def test_flat_part_plateau():
    t = _table(lambda P: np.maximum(np.linalg.norm(P, axis=-1) - 0.3, 0.0))
    rep = dg.flat_part(t, tolerance=1e-9)
    assert not rep.passed
    assert rep.details["interior"]
    # lattice nodes with |p| <= 0.3 span from (-0.3, 0) to (0.3, 0)
    assert rep.defect == pytest.approx(0.6, abs=1e-9)
    assert dg.flat_part(t, tolerance=1e-9, max_diameter=1.0).passed


_grid_vals = st.lists(st.floats(-2, 2), min_size=49, max_size=49).map(lambda v: np.reshape(v, (7, 7)))


@settings(max_examples=60, deadline=None)
@given(_grid_vals, st.floats(0, 0.5), st.floats(0, 0.5))
def test_pass_is_monotone_in_tolerance(vals, t1, t2):
    t = EffectiveTable(PGrid(2, samples=7), vals)
    lo, hi = sorted((t1, t2))
    for check in (dg.evenness_defect, dg.quasiconvexity_check):
        a, b = check(t, lo), check(t, hi)
        assert a.defect == b.defect
        assert b.passed or not a.passed


@settings(max_examples=60, deadline=None)
@given(_grid_vals)
def test_evenness_of_symmetrized_table(vals):
    pg = PGrid(2, samples=7)
    t = EffectiveTable(pg, vals + pg.mirror(vals))
    assert dg.evenness_defect(t, 0.0).passed


def test_f_infinity_values():
    assert dg.f_infinity([1.0, 0.0]) == 0.0
    assert dg.f_infinity([0.0, 0.0]) == 1.0
    assert dg.f_infinity([0.0, 2.0]) == 2.0
    assert dg.f_infinity([-1.5, 0.25]) == 0.5
    with pytest.raises(ValueError):
        dg.f_infinity([1.0])


def _flimit_tables(offsets):
    pg = PGrid(2, (2.0, 2.0), 11)
    F = dg.f_infinity(pg.points())
    meta = {"hamiltonian": "double_well", "potential": "sine_product"}
    return {S: EffectiveTable(pg, F + d, meta=meta) for S, d in offsets.items()}


def test_compare_flimit():
    rep = dg.compare_flimit(_flimit_tables({1: 0.3, 2: 0.1, 4: 0.0}), strict=True)
    assert rep.passed and rep.details["distances"] == pytest.approx([0.3, 0.1, 0.0])
    rep = dg.compare_flimit(_flimit_tables({1: 0.3, 2: -0.05}))
    assert not rep.passed and rep.defect == pytest.approx(0.05)
    rep = dg.compare_flimit(_flimit_tables({1: 0.1, 2: 0.1}), strict=True)
    assert rep.defect == math.inf and not rep.details["monotone"]
    assert dg.compare_flimit(_flimit_tables({1: 0.1, 2: 0.1})).passed
    bad = _flimit_tables({1: 0.1})
    bad[1].meta["potential"] = "sine_squares"
    with pytest.raises(hl.HamlibError):
        dg.compare_flimit(bad)


def test_report_kinds():
    with pytest.raises(ValueError):
        dg.DiagnosticReport("shape", True, 0.0, [], 0.1)
    rep = dg.DiagnosticReport("evenness", False, 0.3, [], 0.1)
    assert not rep and rep.summary() == "evenness: FAIL (defect 0.3, tol 0.1)"


def test_discounted_consistency_zero_potential():
    H = hl.radial(hl.eikonal_profile(), 1)
    rep = dg.discounted_consistency(H, hl.zero_potential(1), (0.5,), [0.2, 0.1, 0.05],
                                    TorusGrid(1, 32), SolverConfig(window=0.05, t_max=0.1))
    assert rep.passed
    assert max(rep.details["defects"]) <= 1e-2
    with pytest.raises(ValueError):
        dg.discounted_consistency(H, hl.zero_potential(1), (0.5,), [0.1, 0.2], TorusGrid(1, 32))
