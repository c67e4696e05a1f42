"""p-lattice sweeps that tabulate effective Hamiltonians."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .accel import thread_count
from .hamlib import (
    HamiltonianSpec,
    HamlibError,
    Piece,
    PotentialSpec,
    eval_hamiltonian_grid,
    eval_potential,
    reference_stats,
)
from .hjsolver import SolverConfig, TorusGrid, big_t_effective

PROVENANCES = ("direct", "composed", "duality", "constant")


@dataclass(frozen=True)
class PGrid:
    """Closed symmetric lattice ``[-r_i, r_i]`` with an odd sample count per axis."""

    dimension: int
    ranges: tuple = ()
    samples: int = 21

    def __post_init__(self):
        if self.dimension not in (1, 2):
            raise ValueError(f"dimension must be 1 or 2, got {self.dimension}")
        ranges = tuple(float(r) for r in self.ranges) if self.ranges else (1.0,) * self.dimension
        if len(ranges) != self.dimension or not all(r > 0 for r in ranges):
            raise ValueError("need one positive half-width per axis")
        object.__setattr__(self, "ranges", ranges)
        if self.samples < 1 or self.samples % 2 == 0:
            raise ValueError("samples per axis must be odd so that 0 and -p are on the lattice")

    @property
    def shape(self) -> tuple:
        return (self.samples,) * self.dimension

    def axis(self, i: int) -> np.ndarray:
        r = self.ranges[i]
        half = self.samples // 2
        if half == 0:
            return np.zeros(1)
        # exact symmetry: axis[-k-1] == -axis[k]
        k = np.arange(-half, half + 1)
        return r * k / half

    def axes(self) -> list:
        return [self.axis(i) for i in range(self.dimension)]

    def points(self) -> np.ndarray:
        """Nodes as an array of shape ``shape + (dimension,)``."""
        if self.dimension == 1:
            return self.axis(0)[:, None]
        P1, P2 = np.meshgrid(self.axis(0), self.axis(1), indexing="ij")
        return np.stack([P1, P2], axis=-1)

    def flat_points(self) -> np.ndarray:
        return self.points().reshape(-1, self.dimension)

    def mirror(self, values: np.ndarray) -> np.ndarray:
        """``values`` re-indexed at ``-p``."""
        return np.asarray(values)[(slice(None, None, -1),) * self.dimension]


@dataclass
class EffectiveTable:
    pgrid: PGrid
    values: np.ndarray
    converged: np.ndarray = None
    residuals: np.ndarray = None
    provenance: str = "direct"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float).reshape(self.pgrid.shape)
        if not np.all(np.isfinite(self.values)):
            raise ValueError("effective table values must be finite")
        if self.converged is None:
            self.converged = np.ones(self.pgrid.shape, dtype=bool)
        self.converged = np.asarray(self.converged, dtype=bool).reshape(self.pgrid.shape)
        if self.residuals is None:
            self.residuals = np.zeros(self.pgrid.shape)
        self.residuals = np.asarray(self.residuals, dtype=float).reshape(self.pgrid.shape)
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")

    def derived(self, values, provenance, **meta) -> "EffectiveTable":
        return EffectiveTable(self.pgrid, values, self.converged.copy(), self.residuals.copy(),
                              provenance, {**self.meta, **meta})

    @property
    def all_converged(self) -> bool:
        return bool(np.all(self.converged))


def constant_table(pgrid: PGrid, value: float) -> EffectiveTable:
    return EffectiveTable(pgrid, np.full(pgrid.shape, float(value)), provenance="constant")


def _solve_all(H, V, pgrid, grid, config):
    pts = pgrid.flat_points()

    def one(p):
        return big_t_effective(H, V, p, grid, config)

    workers = min(thread_count(), len(pts))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, pts))
    else:
        results = [one(p) for p in pts]
    vals = np.array([r[0] for r in results])
    conv = np.array([r[1].converged for r in results])
    res = np.array([r[1].residual for r in results])
    return vals, conv, res


def sweep(H: HamiltonianSpec, V: PotentialSpec, pgrid: PGrid, grid: TorusGrid,
          config: SolverConfig = SolverConfig()) -> EffectiveTable:
    """One big-T solve per lattice node.

    Independent nodes run on ``EFFHAM_THREADS`` worker threads; the table is
    assembled by index so scheduling never changes the result.
    """
    if not H.coercive:
        raise HamlibError("sweep needs a coercive Hamiltonian; use sweep_quasiconcave for decreasing pieces")
    if H.dimension != pgrid.dimension:
        raise ValueError("p-lattice and Hamiltonian dimensions differ")
    vals, conv, res = _solve_all(H, V, pgrid, grid, config)
    return EffectiveTable(pgrid, vals, conv, res, "direct",
                          {"hamiltonian": H.name, "potential": V.kind, "scale": V.scale,
                           "n": grid.n})


def dual_potential(V: PotentialSpec) -> tuple:
    """``(-V + max V, max V)``: the reflected potential with min 0, and its shift."""
    top = reference_stats(V).max
    return V.reflected(top), top


def sweep_quasiconcave(piece, V: PotentialSpec, pgrid: PGrid, grid: TorusGrid,
                       config: SolverConfig = SolverConfig()) -> EffectiveTable:
    """Effective Hamiltonian of a decreasing piece through the coercive dual.

    With ``G(q) = -phi(|q|)`` and ``W = max V - V``, the table is
    ``-Gbar_W(-p) - max V``.
    """
    H = piece.hamiltonian(pgrid.dimension) if isinstance(piece, Piece) else piece
    f = H.radial_function
    if H.kind == "double_well" or f is None or not f.tail_slope < 0 or not f.is_decreasing():
        raise HamlibError("sweep_quasiconcave needs a strictly decreasing radial piece")
    G = H.dual()
    W, top = dual_potential(V)
    inner = sweep(G, W, pgrid, grid, config)
    values = -pgrid.mirror(inner.values) - top
    conv = pgrid.mirror(inner.converged)
    res = pgrid.mirror(inner.residuals)
    return EffectiveTable(pgrid, values, conv, res, "duality", {**inner.meta, "hamiltonian": H.name})


def exact_table(H: HamiltonianSpec, pgrid: PGrid, shift: float = 0.0) -> EffectiveTable:
    """``H(p) - shift`` on the lattice; the effective Hamiltonian for a constant potential."""
    return EffectiveTable(pgrid, eval_hamiltonian_grid(H, pgrid.points()) - shift, provenance="constant")


def oracle_1d_eikonal(V: PotentialSpec, p: float, H: Optional[HamiltonianSpec] = None,
                      nodes: int = 100_000) -> float:
    """Closed-form effective Hamiltonian of ``|p + v'| = c + V`` in 1-D.

    A periodic solution either keeps ``p + v'`` of one sign, forcing
    ``c = |p| - mean V``, or touches zero where V is minimal, forcing
    ``c = -min V``; hence ``max(-min V, |p| - mean V)``.  The mean comes
    from a midpoint rule on ``nodes`` cells.
    """
    if V.dimension != 1:
        raise HamlibError("the 1-D oracle needs a 1-D potential")
    if H is not None:
        f = H.radial_function
        if (H.kind == "double_well" or H.dimension != 1 or f is None or f.tail_slope != 1.0
                or len(f.knots) != 1 or f.values[0] != 0.0):
            raise HamlibError("the 1-D oracle only covers H(p) = |p|")
    x = (np.arange(nodes) + 0.5) / nodes
    vals = eval_potential(V, x[:, None])
    mean = math.fsum(vals) / nodes
    vmin = reference_stats(V).min
    return max(-vmin, abs(float(p)) - mean)


def bounds_check(table: EffectiveTable, H: HamiltonianSpec, V: PotentialSpec, tol: float = 1e-2):
    """Nodes violating ``H(p) - max V <= Hbar(p) <= H(p) - min V`` by more than ``tol``."""
    st = reference_stats(V)
    hp = eval_hamiltonian_grid(H, table.pgrid.points())
    bad = (table.values < hp - st.max - tol) | (table.values > hp - st.min + tol)
    return np.argwhere(bad)
