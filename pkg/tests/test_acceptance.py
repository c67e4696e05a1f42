"""Acceptance suite: one or more tests per criterion, summarized at the end of the run.

Tables are computed once per session and shared between criteria.  The
default (desk) resolution is N=32 per axis in 2-D and N=401 in 1-D; the
``slow`` variants at the stated paper/desk resolutions run with
``pytest -m slow``.
"""

import functools
import math

import numpy as np
import pytest

from effham import diagnose as dg
from effham import hamlib as hl
from effham.effective import PGrid, exact_table, oracle_1d_eikonal, sweep
from effham.hjsolver import SolverConfig, TorusGrid
from effham.minmax import HypothesisError, compose_profile, conditional_decomposition_1d

from test_hjsolver import lf_monotone_violations, weno_errors

DESK_N = 32
# 2-D big-T settings shared by every criterion that sweeps a nonzero potential
CFG2 = SolverConfig(window=1.0, t_max=20.0, min_time=2.0, confirm=2, tol_slope=1e-3,
                    init="cossin", cfl=0.8, alpha_margin=1.0)
CFG1 = SolverConfig(window=1.0, t_max=40.0, min_time=3.0, confirm=2, tol_slope=1e-4, init="cossin")
ZERO_CFG = SolverConfig(window=0.002, t_max=0.004)

P21 = PGrid(2, samples=21)
P11 = PGrid(2, samples=11)
P41 = PGrid(1, samples=41)
LEVEL_TOL = 2e-2

EX1 = hl.example1_profile()


def crit(n, title):
    return pytest.mark.criterion(n, title=title)


@functools.lru_cache(maxsize=None)
def ex1_table(S, n=DESK_N):
    return sweep(hl.radial(EX1, 2), hl.sine_product(S), P21, TorusGrid(2, n), CFG2)


@functools.lru_cache(maxsize=None)
def composed_table(name, S, n=DESK_N):
    prof = {"example1": EX1, "figure1": hl.figure1_profile()}[name]
    plan = hl.decompose_profile(prof, require_ordering=False)
    return compose_profile(plan, hl.sine_product(S), P21, TorusGrid(2, n), CFG2)


@functools.lru_cache(maxsize=None)
def direct_table(name, S, n=DESK_N):
    if name == "example1":
        return ex1_table(S, n)
    return sweep(hl.radial(hl.figure1_profile(), 2), hl.sine_product(S), P21, TorusGrid(2, n), CFG2)


@functools.lru_cache(maxsize=None)
def example2_table(S):
    return sweep(hl.radial(EX1, 1), hl.triangle(S), P41, TorusGrid(1, 401), CFG1)


@functools.lru_cache(maxsize=None)
def well_table(kind, S):
    V = {"sine_product": hl.sine_product, "sine_squares": hl.sine_squares, "asym_sine": hl.asym_sine}[kind](S)
    return sweep(hl.double_well(), V, P11, TorusGrid(2, DESK_N), CFG2)


# -- 1 ---------------------------------------------------------------------------

ZERO_CASES = {
    "eikonal-1d": (hl.radial(hl.eikonal_profile(), 1), P41, 401),
    "example2-1d": (hl.radial(EX1, 1), P41, 401),
    "example1-2d": (hl.radial(EX1, 2), P21, 201),
    "double_well-2d": (hl.double_well(), P21, 201),
    "figure1-2d": (hl.radial(hl.figure1_profile(), 2), P21, 201),
}


@crit(1, "zero-potential recovery")
@pytest.mark.parametrize("name", sorted(ZERO_CASES))
def test_c1_zero_potential_recovery(name):
    H, pg, n = ZERO_CASES[name]
    tab = sweep(H, hl.zero_potential(H.dimension), pg, TorusGrid(H.dimension, n), ZERO_CFG)
    err = np.max(np.abs(tab.values - exact_table(H, pg).values))
    print(f"C1 {name}: max |Hbar - H| = {err:.3g}")
    assert tab.all_converged and err <= 5e-3


# -- 2 ---------------------------------------------------------------------------


@crit(2, "1-D eikonal oracle")
def test_c2_eikonal_oracle():
    V = hl.triangle(1.0)
    tab = sweep(hl.radial(hl.eikonal_profile(), 1), V, P41, TorusGrid(1, 401), CFG1)
    ps = P41.axis(0)
    closed = np.maximum(0.0, np.abs(ps) - 0.5)
    quad = np.array([oracle_1d_eikonal(V, p) for p in ps])
    assert np.max(np.abs(closed - quad)) <= 1e-9
    err = np.max(np.abs(tab.values - closed))
    print(f"C2 max error {err:.3g}")
    assert tab.all_converged and err <= 2e-2


# -- 3 ---------------------------------------------------------------------------


def _pipeline_gap(name, S):
    d, c = direct_table(name, S), composed_table(name, S)
    ok = d.converged & c.converged
    gap = float(np.max(np.abs(d.values - c.values)[ok]))
    print(f"C3 {name} S={S}: composed vs direct {gap:.3g} on {ok.sum()} nodes")
    return gap


@crit(3, "decomposition equivalence")
@pytest.mark.parametrize("S", [0.125, 0.5])
def test_c3_figure1_pipelines_agree(S):
    assert _pipeline_gap("figure1", S) <= 5e-2


@crit(3, "decomposition equivalence")
@pytest.mark.xfail(strict=True, reason="example 1 violates the valley/peak ordering the gluing formula "
                                         "needs; the glued value near p=0 is pinned at phi(s2) - min V = 1")
@pytest.mark.parametrize("S", [0.125, 0.5])
def test_c3_example1_pipelines_agree(S):
    assert _pipeline_gap("example1", S) <= 5e-2


@crit(3, "decomposition equivalence")
def test_c3_example1_gap_is_the_valley_lift():
    # the disagreement is exactly where direct Hbar drops below the valley value 1
    d, c = direct_table("example1", 0.5), composed_table("example1", 0.5)
    assert np.all(c.values >= 1.0 - 1e-12)
    far = d.values >= 1.0 + LEVEL_TOL
    assert np.max(np.abs(d.values - c.values)[far]) <= 5e-2


# -- 4 ---------------------------------------------------------------------------


@crit(4, "quasi-convexification threshold")
@pytest.mark.parametrize("S, expect", [(0.125, False), (0.25, True), (0.30, True), (0.5, True)])
def test_c4_threshold(S, expect):
    tab = ex1_table(S)
    rep = dg.quasiconvexity_check(tab, LEVEL_TOL)
    print(f"C4 S={S}: {rep.summary()}")
    assert tab.all_converged
    assert rep.passed is expect


@crit(4, "quasi-convexification threshold")
@pytest.mark.slow
@pytest.mark.parametrize("n", [201, 401])
@pytest.mark.parametrize("S, expect", [(0.125, False), (0.25, True), (0.30, True), (0.5, True)])
def test_c4_threshold_fine_grid(S, expect, n):
    rep = dg.quasiconvexity_check(ex1_table(S, n), LEVEL_TOL)
    assert rep.passed is expect


# -- 5 ---------------------------------------------------------------------------

M1_LOW, M1_HIGH = 1.0, 2.0


def _levels(tab, lo, hi):
    vals = tab.values[tab.converged]
    grid = np.linspace(lo, hi, 41)
    return np.unique(np.concatenate([vals[(vals >= lo) & (vals <= hi)], grid]))


@crit(5, "level sets above m1")
def test_c5_levels_above_m1_convex():
    tab = ex1_table(0.25)
    mus = _levels(tab, M1_LOW, float(tab.values.max()))
    bad = [mu for mu in mus if not dg.levelset_convexity(tab, mu, LEVEL_TOL).passed]
    print(f"C5 S=0.25: {len(mus)} levels >= m1, {len(bad)} failing")
    assert not bad


@crit(5, "level sets above m1")
@pytest.mark.xfail(strict=True, reason="at S=0.125 every level below m1 is convex; the nonconvex "
                                         "levels lie in (m1, M1)")
def test_c5_some_level_below_m1_fails():
    tab = ex1_table(0.125)
    mus = _levels(tab, float(tab.values.min()), M1_LOW - 1e-9)
    assert any(not dg.levelset_convexity(tab, mu, LEVEL_TOL).passed for mu in mus)


@crit(5, "level sets above m1")
def test_c5_nonconvex_levels_between_m1_and_M1():
    tab = ex1_table(0.125)
    mus = _levels(tab, M1_LOW, M1_HIGH)
    bad = [mu for mu in mus if not dg.levelset_convexity(tab, mu, LEVEL_TOL).passed]
    assert bad and all(M1_LOW < mu < M1_HIGH for mu in bad)


# -- 6 ---------------------------------------------------------------------------


@crit(6, "1-D transition")
def test_c6_small_scale_even_not_quasiconvex():
    tab = example2_table(0.5)
    assert dg.evenness_defect(tab, LEVEL_TOL).passed
    assert not dg.quasiconvexity_check(tab, LEVEL_TOL).passed


@crit(6, "1-D transition")
def test_c6_unit_scale_even_and_quasiconvex():
    tab = example2_table(1.0)
    assert dg.evenness_defect(tab, LEVEL_TOL).passed
    assert dg.quasiconvexity_check(tab, LEVEL_TOL).passed


@crit(6, "1-D transition")
def test_c6_large_scale_quasiconvex_not_even():
    tab = example2_table(1.5)
    ev = dg.evenness_defect(tab, 5e-2)
    print(f"C6 S=1.5: {ev.summary()}")
    assert dg.quasiconvexity_check(tab, LEVEL_TOL).passed
    assert ev.defect > 5e-2


@crit(6, "1-D transition")
def test_c6_conditional_decomposition():
    flat, plateau = hl.plateau_split(EX1)
    g = TorusGrid(1, 401)

    def piece(f, V):
        return sweep(hl.HamiltonianSpec("piece", 1, profile=f, orientation="increasing"), V, P41, g, CFG1)

    V = hl.triangle(0.5)
    depth = EX1.values[1] - EX1.values[2]
    out = conditional_decomposition_1d(piece(flat, V), piece(plateau, V), hl.reference_stats(V), depth)
    gap = np.max(np.abs(out.values - example2_table(0.5).values))
    print(f"C6 conditional vs direct at S=0.5: {gap:.3g}")
    assert gap <= 5e-2
    V = hl.triangle(1.5)
    with pytest.raises(HypothesisError):
        conditional_decomposition_1d(out, out, hl.reference_stats(V), depth)


# -- 7 ---------------------------------------------------------------------------


@crit(7, "double-well limit")
def test_c7_double_well_limit():
    tables = {S: well_table("sine_product", float(S)) for S in (1, 2, 4, 8)}
    rep = dg.compare_flimit(tables, LEVEL_TOL, strict=True)
    print(f"C7 {rep.summary()} distances={np.round(rep.details['distances'], 4).tolist()}")
    assert all(t.all_converged for t in tables.values())
    assert rep.details["monotone"]
    assert min(-b for b in rep.details["one_sided"]) >= -LEVEL_TOL


# -- 8 ---------------------------------------------------------------------------


@crit(8, "stable potential decay")
def test_c8_sine_squares_decay():
    r = np.linalg.norm(P11.points(), axis=-1)
    inside = r <= 1.0 + 1e-12
    tops = [float(well_table("sine_squares", S).values[inside].max()) for S in (0.5, 1.0, 2.0, 4.0)]
    print(f"C8 max over |p|<=1: {np.round(tops, 4).tolist()}")
    assert all(b <= a for a, b in zip(tops, tops[1:]))
    assert tops[-1] < 0.5 * tops[0]


# -- 9 ---------------------------------------------------------------------------


@crit(9, "evenness loss")
@pytest.mark.xfail(strict=True, reason="the computed evenness defect shrinks under refinement "
                                         "and stays below 5e-2")
@pytest.mark.parametrize("S", [0.25, 0.5])
def test_c9_asym_potential_breaks_evenness(S):
    assert dg.evenness_defect(well_table("asym_sine", S), 5e-2).defect > 5e-2


@crit(9, "evenness loss")
@pytest.mark.parametrize("S", [0.25, 0.5])
def test_c9_control_stays_even(S):
    ctl = hl.decompose_profile(EX1, require_ordering=False).pieces[2].hamiltonian(2)
    tab = sweep(ctl, hl.asym_sine(S), P11, TorusGrid(2, DESK_N), CFG2)
    rep = dg.evenness_defect(tab, LEVEL_TOL)
    print(f"C9 control S={S}: {rep.summary()}")
    assert rep.passed


# -- 10 --------------------------------------------------------------------------

DISCOUNT_CFG = SolverConfig(window=1.0, t_max=20.0, tol_slope=1e-3, cfl=0.8, alpha_margin=1.0)
DISCOUNT_CASES = {
    "eikonal-1d": (hl.radial(hl.eikonal_profile(), 1), hl.triangle(1.0), (0.75,), TorusGrid(1, 401), CFG1),
    "double_well": (hl.double_well(), hl.sine_product(1.0), (0.5, 0.0), TorusGrid(2, DESK_N), CFG2),
    "example1": (hl.radial(EX1, 2), hl.sine_product(0.5), (0.5, 0.5), TorusGrid(2, DESK_N), CFG2),
}


@crit(10, "discounted consistency")
@pytest.mark.parametrize("name", sorted(DISCOUNT_CASES))
def test_c10_discounted_consistency(name):
    H, V, p, grid, cfg = DISCOUNT_CASES[name]
    rep = dg.discounted_consistency(H, V, p, [0.1, 0.05, 0.025], grid, cfg, tolerance=5e-2,
                                    slack=0.1, discount_config=DISCOUNT_CFG)
    print(f"C10 {name}: defects {np.round(rep.details['defects'], 4).tolist()}")
    assert rep.passed


# -- 11 --------------------------------------------------------------------------


@crit(11, "scheme properties")
def test_c11_lf_flux_monotone():
    assert lf_monotone_violations(10_000, seed=11) == 0


@crit(11, "scheme properties")
def test_c11_weno_order():
    errs = weno_errors()
    orders = [math.log2(a / b) for a, b in zip(errs, errs[1:])]
    assert min(orders) >= 2.5


@crit(11, "scheme properties")
def test_c11_thread_reproducibility(monkeypatch):
    H = hl.radial(EX1, 2)
    cfg = SolverConfig(window=0.5, t_max=2.0, init="cossin", cfl=0.8, alpha_margin=1.0)
    out = []
    for threads in ("1", "2", "8"):
        monkeypatch.setenv("EFFHAM_THREADS", threads)
        out.append(sweep(H, hl.sine_product(0.25), P11, TorusGrid(2, 16), cfg))
    for t in out[1:]:
        assert t.values.tobytes() == out[0].values.tobytes()
        assert t.converged.tobytes() == out[0].converged.tobytes()
