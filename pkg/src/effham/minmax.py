"""Table-level min-max formulas assembling effective Hamiltonians from pieces."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .effective import EffectiveTable, sweep, sweep_quasiconcave
from .hamlib import DecompositionPlan, HamlibError, PotentialStats, reference_stats


class HypothesisError(HamlibError):
    """The structural hypothesis behind a formula does not hold."""


class CompositionError(ValueError):
    pass


def _check_grids(tables):
    first = tables[0].pgrid
    for t in tables[1:]:
        if t.pgrid != first:
            raise CompositionError("piece tables live on different p-lattices")
    return first


def _merged(tables, values, **meta):
    pg = _check_grids(tables)
    conv = np.logical_and.reduce([t.converged for t in tables])
    res = np.maximum.reduce([t.residuals for t in tables])
    return EffectiveTable(pg, values, conv, res, "composed", meta)


def compose_inductive(plan: DecompositionPlan, piece_tables: Sequence[EffectiveTable]) -> EffectiveTable:
    """Glue piece tables ``Phi_0 .. Phi_2m`` by the alternating min/max recursion.

    ``plan`` must carry its potential constants (see
    ``DecompositionPlan.with_potential``).
    """
    m = plan.m
    tables = list(piece_tables)
    if len(tables) != 2 * m + 1:
        raise CompositionError(f"expected {2 * m + 1} piece tables for m = {m}, got {len(tables)}")
    if m and (len(plan.constants_min) != m or len(plan.constants_max) != m):
        raise CompositionError("plan has no potential constants; call with_potential first")
    _check_grids(tables)
    out = tables[0].values.copy()
    for k in range(1, m + 1):
        low = np.minimum(np.minimum(out, tables[2 * k - 1].values), plan.constants_max[k - 1])
        out = np.maximum(np.maximum(low, tables[2 * k].values), plan.constants_min[k - 1])
    return _merged(tables, out, formula="inductive", m=m)


def compose_basic(h1: EffectiveTable, h2: EffectiveTable) -> EffectiveTable:
    """``max(H1bar, H2bar, 0)`` under the min H = min V = 0 normalization."""
    out = np.maximum(np.maximum(h1.values, h2.values), 0.0)
    return _merged([h1, h2], out, formula="basic")


def large_oscillation_formula(h1: EffectiveTable, stats: PotentialStats, max_h_on_u: float) -> EffectiveTable:
    """``max(H1bar, -min V)``, valid once ``osc V >= max_U H``."""
    if stats.osc < max_h_on_u:
        raise HypothesisError(f"osc V = {stats.osc:g} is below max_U H = {max_h_on_u:g}")
    out = np.maximum(h1.values, -stats.min)
    return _merged([h1], out, formula="large_oscillation", quasiconvex_by_theorem=True)


def conditional_decomposition_1d(h1_flat: EffectiveTable, h2_qc: EffectiveTable, stats: PotentialStats,
                                 depth: float) -> EffectiveTable:
    """``min(H1bar, H2bar)`` in one dimension when ``max V < M1 - m1``.

    ``depth`` is ``M1 - m1``; the potential must be normalized to min 0.
    """
    if h1_flat.pgrid.dimension != 1 or h2_qc.pgrid.dimension != 1:
        raise HypothesisError("the conditional min-decomposition is only known in one dimension")
    if abs(stats.min) > 1e-12:
        raise HypothesisError("potential must be normalized to min V = 0")
    if not stats.max < depth:
        raise HypothesisError(f"max V = {stats.max:g} is not below M1 - m1 = {depth:g}")
    out = np.minimum(h1_flat.values, h2_qc.values)
    return _merged([h1_flat, h2_qc], out, formula="conditional_1d")


def piece_tables(plan: DecompositionPlan, V, pgrid, grid, config) -> list:
    """Tabulate every piece: rising ones directly, falling ones through duality."""
    out = []
    for pc in plan.pieces:
        if pc.orientation == "increasing":
            out.append(sweep(pc.hamiltonian(pgrid.dimension), V, pgrid, grid, config))
        else:
            out.append(sweep_quasiconcave(pc, V, pgrid, grid, config))
    return out


def compose_profile(plan: DecompositionPlan, V, pgrid, grid, config) -> EffectiveTable:
    """Sweep the pieces of ``plan`` over ``V`` and glue them inductively."""
    st = reference_stats(V)
    tables = piece_tables(plan, V, pgrid, grid, config)
    out = compose_inductive(plan.with_potential(st.min, st.max), tables)
    out.meta.update(potential=V.kind, scale=V.scale, n=grid.n)
    return out
