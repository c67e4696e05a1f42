import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from effham import hamlib as hl
from effham.effective import EffectiveTable, PGrid, exact_table, oracle_1d_eikonal
from effham.hjsolver import SolverConfig, TorusGrid
from effham.minmax import (
    CompositionError,
    HypothesisError,
    compose_basic,
    compose_inductive,
    compose_profile,
    conditional_decomposition_1d,
    large_oscillation_formula,
    piece_tables,
)

FAST = SolverConfig(window=0.05, t_max=0.1)
PROFILES = {
    "example1": lambda: hl.decompose_profile(hl.example1_profile(), require_ordering=False),
    "figure1": lambda: hl.decompose_profile(hl.figure1_profile(), relaxed=True),
    "figure4": lambda: hl.decompose_profile(hl.figure4_profile(), require_ordering=False),
}


def _radial_tables(plan, pg):
    r = np.linalg.norm(pg.points(), axis=-1)
    return [EffectiveTable(pg, pc.function(r), provenance="constant") for pc in plan.pieces]


@pytest.mark.parametrize("name", ["figure1", "figure4"])
def test_zero_potential_gluing_rebuilds_profile(name):
    plan = PROFILES[name]().with_potential(0.0, 0.0)
    pg = PGrid(2, (3.0, 3.0), 41)
    out = compose_inductive(plan, _radial_tables(plan, pg))
    r = np.linalg.norm(pg.points(), axis=-1)
    assert out.provenance == "composed"
    assert np.max(np.abs(out.values - plan.profile(r))) <= 1e-12


def test_unordered_profile_gluing_lifts_to_valley_value():
    # example 1 has its valley (1) above phi(0) = 0, so the glued zero-potential
    # formula cannot return below 1
    plan = PROFILES["example1"]().with_potential(0.0, 0.0)
    pg = PGrid(2, (3.0, 3.0), 41)
    out = compose_inductive(plan, _radial_tables(plan, pg))
    r = np.linalg.norm(pg.points(), axis=-1)
    assert np.max(np.abs(out.values - np.maximum(plan.profile(r), 1.0))) <= 1e-12


def test_composition_errors():
    plan = PROFILES["figure1"]()
    pg = PGrid(2, samples=5)
    tabs = _radial_tables(plan, pg)
    with pytest.raises(CompositionError, match="with_potential"):
        compose_inductive(plan, tabs)
    plan = plan.with_potential(0.0, 0.5)
    with pytest.raises(CompositionError, match="expected 3"):
        compose_inductive(plan, tabs[:2])
    other = EffectiveTable(PGrid(2, samples=7), np.zeros((7, 7)))
    with pytest.raises(CompositionError, match="lattices"):
        compose_inductive(plan, [tabs[0], tabs[1], other])


def test_unconverged_and_residual_propagate():
    plan = PROFILES["figure1"]().with_potential(0.0, 0.0)
    pg = PGrid(1, samples=3)
    tabs = _radial_tables(plan, pg)
    tabs[1] = EffectiveTable(pg, tabs[1].values, [True, False, True], [0.0, 0.5, 0.1])
    out = compose_inductive(plan, tabs)
    assert out.converged.tolist() == [True, False, True]
    assert out.residuals.tolist() == [0.0, 0.5, 0.1]


_vals = arrays(np.float64, 9, elements=st.floats(-3, 3))


@settings(max_examples=100, deadline=None)
@given(_vals, _vals, _vals, _vals, st.integers(0, 2))
def test_gluing_is_monotone_in_each_piece(a, b, c, bump, which):
    plan = PROFILES["figure1"]().with_potential(0.0, 0.3)
    pg = PGrid(1, samples=9)
    base = [EffectiveTable(pg, x) for x in (a, b, c)]
    raised = list(base)
    raised[which] = EffectiveTable(pg, base[which].values + np.abs(bump))
    lo = compose_inductive(plan, base).values
    hi = compose_inductive(plan, raised).values
    assert np.all(hi >= lo)


def test_basic_and_large_oscillation_hand_values():
    pg = PGrid(1, samples=3)
    h1 = EffectiveTable(pg, [-1.0, 0.5, 2.0])
    h2 = EffectiveTable(pg, [-2.0, 1.0, 0.0])
    assert compose_basic(h1, h2).values.tolist() == [0.0, 1.0, 2.0]
    stats = hl.PotentialStats(-1.5, 0.5)
    out = large_oscillation_formula(h1, stats, 1.0)
    assert out.values.tolist() == [1.5, 1.5, 2.0]
    assert out.meta["quasiconvex_by_theorem"]
    with pytest.raises(HypothesisError):
        large_oscillation_formula(h1, stats, 3.0)


def test_conditional_hypotheses():
    pg1 = PGrid(1, samples=3)
    a = EffectiveTable(pg1, [1.0, 0.0, 1.0])
    b = EffectiveTable(pg1, [0.5, 0.5, 2.0])
    out = conditional_decomposition_1d(a, b, hl.PotentialStats(0.0, 0.5), 1.0)
    assert out.values.tolist() == [0.5, 0.0, 1.0]
    with pytest.raises(HypothesisError, match="normalized"):
        conditional_decomposition_1d(a, b, hl.PotentialStats(0.1, 0.5), 1.0)
    with pytest.raises(HypothesisError, match="below"):
        conditional_decomposition_1d(a, b, hl.PotentialStats(0.0, 1.0), 1.0)
    pg2 = PGrid(2, samples=3)
    c = EffectiveTable(pg2, np.zeros((3, 3)))
    with pytest.raises(HypothesisError, match="one dimension"):
        conditional_decomposition_1d(c, c, hl.PotentialStats(0.0, 0.5), 1.0)


def test_piece_tables_use_duality_for_falling_pieces():
    plan = PROFILES["figure1"]()
    tabs = piece_tables(plan, hl.zero_potential(2), PGrid(2, samples=5), TorusGrid(2, 8), FAST)
    assert [t.provenance for t in tabs] == ["direct", "duality", "direct"]


def test_compose_profile_zero_potential_matches_profile():
    plan = PROFILES["figure1"]()
    pg = PGrid(2, samples=5)
    H = hl.radial(hl.figure1_profile(), 2)
    out = compose_profile(plan, hl.zero_potential(2), pg, TorusGrid(2, 8), FAST)
    assert np.max(np.abs(out.values - exact_table(H, pg).values)) <= 1e-6
    assert out.meta["potential"] == "zero"


def test_compose_profile_1d_eikonal_matches_oracle():
    # m = 0: the single piece is the eikonal profile itself
    plan = hl.decompose_profile(hl.eikonal_profile())
    V = hl.triangle(0.8)
    pg = PGrid(1, (1.0,), 5)
    cfg = SolverConfig(window=1.0, t_max=30.0, min_time=2.0, confirm=2, init="cossin")
    out = compose_profile(plan, V, pg, TorusGrid(1, 201), cfg)
    want = [oracle_1d_eikonal(V, p) for p in pg.flat_points()[:, 0]]
    assert np.max(np.abs(out.values - want)) <= 1e-3
