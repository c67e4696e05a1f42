"""Structural checks on effective Hamiltonian tables.

Every check reports through :class:`DiagnosticReport`; a check passes
exactly when its defect is at most the tolerance, and failing checks list
the offending p nodes.  Nodes flagged unconverged never enter a defect.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .effective import EffectiveTable
from .hamlib import HamiltonianSpec, HamlibError, PotentialSpec
from .hjsolver import SolverConfig, TorusGrid, big_t_effective, discounted_value

KINDS = ("evenness", "quasiconvexity", "levelset", "flatpart", "flimit", "discount")
DEFAULT_LEVEL_TOL = 2e-2


@dataclass
class DiagnosticReport:
    kind: str
    passed: bool
    defect: float
    witnesses: list
    tolerance: float
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown diagnostic kind {self.kind!r}")

    def __bool__(self):
        return self.passed

    def summary(self) -> str:
        state = "pass" if self.passed else "FAIL"
        return f"{self.kind}: {state} (defect {self.defect:.4g}, tol {self.tolerance:g})"


def _report(kind, defect, tol, witnesses, **details):
    passed = bool(defect <= tol)
    return DiagnosticReport(kind, passed, float(defect), list(witnesses) if not passed else [], tol, details)


def evenness_defect(table: EffectiveTable, tolerance: float = DEFAULT_LEVEL_TOL) -> DiagnosticReport:
    """``max |Hbar(p) - Hbar(-p)|`` over nodes where both values converged."""
    pg = table.pgrid
    mirrored = pg.mirror(table.values)
    ok = table.converged & pg.mirror(table.converged)
    diff = np.where(ok, np.abs(table.values - mirrored), 0.0)
    defect = float(diff.max()) if diff.size else 0.0
    pts = pg.points()
    bad = [tuple(pts[idx]) for idx in zip(*np.nonzero(diff > tolerance))]
    return _report("evenness", defect, tolerance, bad)


# -- convex hulls in integer lattice coordinates -------------------------------


def _hull(points: np.ndarray) -> np.ndarray:
    """Counter-clockwise hull vertices of integer points (collinear ones dropped)."""
    pts = sorted(set(map(tuple, points.tolist())))
    if len(pts) <= 2:
        return np.array(pts, dtype=np.int64)

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return np.array(lower[:-1] + upper[:-1], dtype=np.int64)


def _inside_hull(hull: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Closed-hull membership for integer points ``q`` (shape (k, 2)), exact."""
    if len(hull) == 0:
        return np.zeros(len(q), dtype=bool)
    if len(hull) == 1:
        return np.all(q == hull[0], axis=1)
    if len(hull) == 2:
        a, b = hull
        d = b - a
        r = q - a
        on_line = d[0] * r[:, 1] - d[1] * r[:, 0] == 0
        t = r @ d
        return on_line & (t >= 0) & (t <= d @ d)
    a = hull
    b = np.roll(hull, -1, axis=0)
    e = b - a
    # cross(e_i, q - a_i) >= 0 for every edge
    cr = e[:, 0][None, :] * (q[:, 1][:, None] - a[:, 1][None, :]) \
        - e[:, 1][None, :] * (q[:, 0][:, None] - a[:, 0][None, :])
    return np.all(cr >= 0, axis=1)


def _lattice_index(table):
    half = table.pgrid.samples // 2
    idx = np.indices(table.pgrid.shape).reshape(table.pgrid.dimension, -1).T - half
    return idx.astype(np.int64)


def _level_excess(table: EffectiveTable, mu: float):
    """Largest ``Hbar - mu`` over nodes between sublevel-set nodes, with witnesses."""
    vals = table.values.reshape(-1)
    conv = table.converged.reshape(-1)
    member = conv & (vals <= mu)
    if not member.any():
        return 0.0, np.zeros(0, dtype=int)
    if table.pgrid.dimension == 1:
        where = np.nonzero(member)[0]
        span = np.zeros_like(member)
        span[where[0]: where[-1] + 1] = True
    else:
        idx = _lattice_index(table)
        hull = _hull(idx[member])
        span = _inside_hull(hull, idx)
    span &= conv
    excess = np.where(span, vals - mu, -np.inf)
    return float(max(excess.max(), 0.0)), np.nonzero(span & (excess > 0))[0]


def levelset_convexity(table: EffectiveTable, mu: float,
                       tolerance: float = DEFAULT_LEVEL_TOL) -> DiagnosticReport:
    """Grid convexity of ``{Hbar <= mu}``.

    In 2-D every node in the closed convex hull of the sublevel nodes must
    satisfy ``Hbar <= mu + tolerance``; in 1-D the hull is an index interval.
    Hull tests run on integer lattice indices, so they are exact.
    """
    defect, bad = _level_excess(table, mu)
    pts = table.pgrid.flat_points()
    wit = [(float(mu), tuple(pts[i])) for i in bad] if defect > tolerance else []
    return _report("levelset", defect, tolerance, wit, mu=float(mu))


def quasiconvexity_check(table: EffectiveTable, level_tolerance: float = DEFAULT_LEVEL_TOL,
                         levels: Optional[Sequence[float]] = None) -> DiagnosticReport:
    """Sublevel-set convexity at every distinct converged table value (or ``levels``)."""
    vals = table.values[table.converged]
    mus = np.unique(vals) if levels is None else np.asarray(levels, dtype=float)
    worst = 0.0
    worst_mu = math.nan
    wit = []
    pts = table.pgrid.flat_points()
    for mu in mus:
        d, bad = _level_excess(table, float(mu))
        if d > worst:
            worst, worst_mu = d, float(mu)
        if d > level_tolerance:
            excess = table.values.reshape(-1)[bad] - mu
            wit.extend((float(mu), tuple(pts[i])) for i in bad[excess > level_tolerance])
    return _report("quasiconvexity", worst, level_tolerance, wit, worst_level=worst_mu, levels=len(mus))


def flat_part(table: EffectiveTable, tolerance: float = DEFAULT_LEVEL_TOL,
              max_diameter: float = 0.0) -> DiagnosticReport:
    """Locate ``{Hbar <= min Hbar + tolerance}``.

    The defect is the diameter of that node set, so the report passes when
    the minimum is attained at a single node (no flat part) and otherwise
    lists the flat nodes.  ``details["interior"]`` tells whether some node
    has all lattice neighbours in the set.
    """
    vals = table.values
    conv = table.converged
    if not conv.any():
        return _report("flatpart", 0.0, max_diameter, [], interior=False, level=math.nan)
    low = float(vals[conv].min())
    member = conv & (vals <= low + tolerance)
    pts = table.pgrid.points()
    sel = pts[member]
    diff = sel[:, None, :] - sel[None, :, :]
    diam = float(np.sqrt((diff ** 2).sum(-1)).max())
    core = member.copy()
    for ax in range(table.pgrid.dimension):
        fwd = np.zeros_like(member)
        bwd = np.zeros_like(member)
        sl_a = [slice(None)] * member.ndim
        sl_b = [slice(None)] * member.ndim
        sl_a[ax], sl_b[ax] = slice(1, None), slice(None, -1)
        fwd[tuple(sl_b)] = member[tuple(sl_a)]
        bwd[tuple(sl_a)] = member[tuple(sl_b)]
        core &= fwd & bwd
    interior = bool(core.any())
    wit = [tuple(p) for p in sel]
    return _report("flatpart", diam, max_diameter, wit, interior=interior, level=low + tolerance,
                   nodes=int(member.sum()))


def f_infinity(p) -> np.ndarray:
    """Large-S limit ``max(|p2|, min(|p1 - 1|, |p1 + 1|))`` of the double-well problem."""
    p = np.asarray(p, dtype=float)
    if p.shape[-1] != 2:
        raise ValueError("f_infinity takes 2-D p")
    p1, p2 = p[..., 0], p[..., 1]
    out = np.maximum(np.abs(p2), np.minimum(np.abs(p1 - 1.0), np.abs(p1 + 1.0)))
    return out if out.ndim else float(out)


def compare_flimit(tables: Mapping[float, EffectiveTable], eps: float = DEFAULT_LEVEL_TOL,
                   strict: bool = False) -> DiagnosticReport:
    """One-sided bound ``Hbar >= F_inf - eps`` and monotone sup-distance to the limit.

    ``defect`` is the worst one-sided violation ``max(F_inf - Hbar)``; if the
    sup-distances fail to decrease along increasing S the defect is inf.
    """
    if not tables:
        raise ValueError("no tables given")
    scales = sorted(tables)
    dists = []
    below = []
    wit = []
    for S in scales:
        t = tables[S]
        if t.pgrid.dimension != 2:
            raise HamlibError("the double-well limit is two-dimensional")
        h = t.meta.get("hamiltonian")
        v = t.meta.get("potential")
        if (h is not None and h != "double_well") or (v is not None and v != "sine_product"):
            raise HamlibError("compare_flimit needs double-well tables over sine_product potentials")
        F = f_infinity(t.pgrid.points())
        gap = np.where(t.converged, F - t.values, -np.inf)
        below.append(float(gap.max()))
        dists.append(float(np.abs(np.where(t.converged, t.values - F, 0.0)).max()))
        pts = t.pgrid.points()
        wit.extend((S, tuple(pts[i])) for i in zip(*np.nonzero(gap > eps)))
    steps = np.diff(dists)
    monotone = bool(np.all(steps < 0) if strict else np.all(steps <= 0))
    defect = max(below) if monotone else math.inf
    if not monotone:
        wit.append(("distance", tuple(dists)))
    return _report("flimit", defect, eps, wit, scales=scales, distances=dists, one_sided=below,
                   monotone=monotone)


def discounted_consistency(H: HamiltonianSpec, V: PotentialSpec, p, lambdas: Sequence[float],
                           grid: TorusGrid, config: SolverConfig = SolverConfig(),
                           tolerance: float = 5e-2, slack: float = 0.1,
                           hbar: Optional[float] = None,
                           discount_config: Optional[SolverConfig] = None) -> DiagnosticReport:
    """``|lam v_lam(0) + Hbar(p)|`` along a decreasing sequence of discounts.

    Passes when each defect is at most ``(1 + slack)`` times the previous one
    and the last is within ``tolerance``; otherwise the defect is inf or the
    last value.
    """
    lams = [float(x) for x in lambdas]
    if not lams or any(x <= 0 for x in lams) or any(b >= a for a, b in zip(lams, lams[1:])):
        raise ValueError("lambdas must be a decreasing sequence of positive numbers")
    if hbar is None:
        hbar, _ = big_t_effective(H, V, p, grid, config)
    dcfg = discount_config or config
    defects = []
    for lam in lams:
        v, _ = discounted_value(H, V, p, lam, grid, dcfg)
        origin = v.values[(0,) * grid.dimension]
        defects.append(abs(lam * origin + hbar))
    monotone = all(b <= (1 + slack) * a + 1e-12 for a, b in zip(defects, defects[1:]))
    defect = defects[-1] if monotone else math.inf
    wit = [] if monotone else [("defects", tuple(defects))]
    if defects[-1] > tolerance:
        wit.append((lams[-1], defects[-1]))
    return _report("discount", defect, tolerance, wit, lambdas=lams, defects=defects, hbar=hbar,
                   monotone=monotone)
