"""Time-dependent Hamilton-Jacobi solver on the periodic unit torus.

The big-T estimator evolves the periodic part ``w(x, t)`` of the solution
with linear initial data ``p.x``::

    w_t + H(p + Dw) - V(x) = 0,

whose spatial mean decreases at the asymptotic rate ``Hbar(p)``.  The
discounted solver marches ``v_t + lam v + H(p + Dv) - V = 0`` to its
steady state.  Space: Lax-Friedrichs numerical Hamiltonian fed with
either first-order (monotone) or WENO3 one-sided gradients; time: SSP-RK3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .hamlib import (
    HamiltonianSpec,
    PotentialSpec,
    eval_hamiltonian,
    potential_on_grid,
    reference_stats,
)
from .kernels import get_kernels


SCHEMES = {"godunov": 0, "lax_friedrichs": 1, "weno3": 3}


class SolverError(RuntimeError):
    pass


class InstabilityError(SolverError):
    def __init__(self, time):
        super().__init__(f"non-finite values at t = {time:.6g}")
        self.time = time


@dataclass(frozen=True)
class TorusGrid:
    dimension: int
    n: int

    def __post_init__(self):
        if self.dimension not in (1, 2):
            raise ValueError(f"dimension must be 1 or 2, got {self.dimension}")
        if self.n < 1:
            raise ValueError("points_per_dim must be positive")

    @property
    def h(self) -> float:
        return 1.0 / self.n

    @property
    def shape(self) -> tuple:
        return (self.n,) * self.dimension

    def nodes(self) -> np.ndarray:
        """Node coordinates, shape ``shape + (dimension,)``."""
        x = np.arange(self.n) / self.n
        if self.dimension == 1:
            return x[:, None]
        X1, X2 = np.meshgrid(x, x, indexing="ij")
        return np.stack([X1, X2], axis=-1)


@dataclass
class Field:
    grid: TorusGrid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.grid.shape:
            raise ValueError(f"field shape {self.values.shape} does not match grid {self.grid.shape}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field has non-finite entries")

    def mean(self) -> float:
        return float(np.sum(self.values) / self.values.size)


@dataclass(frozen=True)
class SolverConfig:
    """Stepping and stopping knobs.

    ``p_box_radius=None`` means ``|p| + osc V + max profile value``.
    ``min_time`` delays the first convergence test and ``confirm`` is how
    many consecutive window-to-window changes must all fall below
    ``tol_slope`` (1 compares just two estimates).  ``init`` is ``"zero"``
    or ``"cossin"`` (``cos 2 pi x1 * sin 2 pi x2``, or ``cos 2 pi x`` in 1-D).
    ``scheme`` picks the numerical flux: ``"godunov"`` (exact extremal flux
    over first-order differences, the default), ``"lax_friedrichs"`` or
    ``"weno3"`` (WENO3 reconstruction with a Lax-Friedrichs flux).  WENO3 is
    not monotone, and for nonconvex H its long-time slope can settle on a
    spurious value that depends on the initial data.
    """

    cfl: float = 0.5
    t_max: float = 80.0
    window: float = 10.0
    tol_slope: float = 1e-3
    alpha_margin: float = 1.5
    p_box_radius: Optional[float] = None
    min_time: float = 0.0
    confirm: int = 1
    init: str = "zero"
    backend: Optional[str] = None
    scheme: str = "godunov"

    def __post_init__(self):
        if not 0 < self.cfl <= 1:
            raise ValueError("cfl must lie in (0, 1]")
        for name in ("t_max", "window", "tol_slope"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.alpha_margin < 1:
            raise ValueError("alpha_margin must be >= 1")
        if self.p_box_radius is not None and not self.p_box_radius > 0:
            raise ValueError("p_box_radius must be positive")
        if self.min_time < 0:
            raise ValueError("min_time must be nonnegative")
        if int(self.confirm) != self.confirm or self.confirm < 1:
            raise ValueError("confirm must be a positive integer")
        if self.init not in ("zero", "cossin"):
            raise ValueError(f"init must be 'zero' or 'cossin', got {self.init!r}")
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {sorted(SCHEMES)}, got {self.scheme!r}")

    @property
    def order(self) -> int:
        return SCHEMES[self.scheme]

    def with_(self, **kw) -> "SolverConfig":
        return replace(self, **kw)


def _as_p(p, dimension):
    p = np.atleast_1d(np.asarray(p, dtype=float))
    if p.shape != (dimension,):
        raise ValueError(f"p has shape {p.shape}, expected ({dimension},)")
    return p


def _kernel_p(p):
    out = np.zeros(2)
    out[: p.size] = p
    return out


def lf_alpha(H: HamiltonianSpec, V: PotentialSpec, p, config: SolverConfig) -> np.ndarray:
    """Per-axis Lax-Friedrichs dissipation ``margin * Lip(H)`` on the p-box."""
    p = np.atleast_1d(np.asarray(p, dtype=float))
    radius = config.p_box_radius
    if radius is None:
        stats = reference_stats(V)
        f = H.radial_function
        top = max(abs(x) for x in f.values) if f is not None else 0.0
        radius = float(np.linalg.norm(p)) + stats.osc + top
    lip = H.lipschitz(radius)
    return np.full(H.dimension, config.alpha_margin * lip)


def weno3_gradients(w: Field, axis: int = 0, backend: Optional[str] = None):
    """Left- and right-biased third-order derivatives along ``axis``."""
    if w.grid.n < 5:
        raise ValueError("WENO3 needs at least 5 points per axis")
    if not 0 <= axis < w.grid.dimension:
        raise ValueError(f"axis {axis} out of range for a {w.grid.dimension}-D field")
    k = get_kernels(backend)
    gm, gp = k.weno3(np.ascontiguousarray(w.values), w.grid.h, axis)
    return Field(w.grid, gm), Field(w.grid, gp)


def lf_flux(H: HamiltonianSpec, p, grad_minus, grad_plus, alpha) -> float:
    """Lax-Friedrichs numerical Hamiltonian at one node."""
    p = _as_p(p, H.dimension)
    gm = _as_p(grad_minus, H.dimension)
    gp = _as_p(grad_plus, H.dimension)
    al = _as_p(alpha, H.dimension)
    return eval_hamiltonian(H, p + 0.5 * (gm + gp)) - float(np.sum(0.5 * al * (gp - gm)))


def _initial(grid: TorusGrid, init: str) -> np.ndarray:
    if init == "zero":
        return np.zeros(grid.shape)
    x = grid.nodes()
    if grid.dimension == 1:
        return np.cos(2 * np.pi * x[..., 0])
    return np.cos(2 * np.pi * x[..., 0]) * np.sin(2 * np.pi * x[..., 1])


@dataclass
class _Setup:
    kernels: object
    params: tuple
    V: np.ndarray
    p: np.ndarray
    alpha: np.ndarray
    h: float
    dt: float
    steps: int
    order: int


def _setup(H, V, p, grid, config, window):
    if H.dimension != grid.dimension or V.dimension != grid.dimension:
        raise ValueError("Hamiltonian, potential and grid dimensions differ")
    if grid.n < 5:
        raise ValueError("grid needs at least 5 points per axis")
    p = _as_p(p, grid.dimension)
    alpha = lf_alpha(H, V, p, config)
    dt_max = config.cfl * grid.h / float(np.sum(alpha))
    steps = max(1, math.ceil(window / dt_max - 1e-9))
    Vg = np.ascontiguousarray(potential_on_grid(V, grid.n), dtype=float)
    return _Setup(get_kernels(config.backend), H.kernel_params(), Vg, _kernel_p(p),
                  np.ascontiguousarray(_kernel_p(alpha)), grid.h, window / steps, steps, config.order)


def _advance(st: _Setup, w, lam, t):
    kind, knots, vals, tail, a = st.params
    done = st.kernels.rk3_advance(w, st.V, st.p, kind, knots, vals, tail, a, st.alpha,
                                  st.h, lam, st.dt, st.steps, st.order)
    if done < st.steps:
        raise InstabilityError(t + (done + 1) * st.dt)


def _rate(st: _Setup, w, lam):
    kind, knots, vals, tail, a = st.params
    return st.kernels.rhs(w, st.V, st.p, kind, knots, vals, tail, a, st.alpha, st.h, lam, st.order)


@dataclass
class EvolveResult:
    field: Field
    times: np.ndarray
    means: np.ndarray
    estimates: np.ndarray
    residual: float
    dt: float
    steps: int


def evolve_bigT(H: HamiltonianSpec, V: PotentialSpec, p, grid: TorusGrid, config: SolverConfig,
                windows: Optional[int] = None, stop=None) -> EvolveResult:
    """Evolve the periodic corrector window by window.

    ``estimates[k]`` is minus the slope of the spatial mean over window k.
    Runs ``windows`` windows (default ``t_max / window``) unless ``stop``,
    called with the estimates so far, returns True.
    """
    if not H.coercive:
        raise SolverError("big-T needs a coercive Hamiltonian; route quasiconcave pieces through duality")
    st = _setup(H, V, p, grid, config, config.window)
    w = np.ascontiguousarray(_initial(grid, config.init))
    total = windows if windows is not None else max(1, math.ceil(config.t_max / config.window - 1e-9))
    times = [0.0]
    means = [float(np.sum(w) / w.size)]
    est = []
    t = 0.0
    for k in range(total):
        _advance(st, w, 0.0, t)
        t = (k + 1) * config.window
        m = float(np.sum(w) / w.size)
        est.append(-(m - means[-1]) / config.window)
        times.append(t)
        means.append(m)
        if stop is not None and stop(t, est):
            break
    residual = float(np.ptp(_rate(st, w, 0.0)))
    return EvolveResult(Field(grid, w), np.asarray(times), np.asarray(means), np.asarray(est),
                        residual, st.dt, st.steps * len(est))


@dataclass
class ConvergenceReport:
    converged: bool
    iterations: int
    final_change: float
    residual: float
    time: float


def big_t_effective(H: HamiltonianSpec, V: PotentialSpec, p, grid: TorusGrid,
                    config: SolverConfig = SolverConfig()):
    """``Hbar(p)`` from the trailing-window slope of the corrector mean.

    Stops once two successive window estimates differ by less than
    ``tol_slope`` (after ``min_time``; ``confirm`` such changes in a row);
    otherwise returns the ``t_max`` estimate flagged unconverged.
    """
    k = int(config.confirm)

    def change_of(est):
        if len(est) < k + 1:
            return math.inf
        return float(np.max(np.abs(np.diff(np.asarray(est[-k - 1:])))))

    def stop(t, est):
        return t >= config.min_time and change_of(est) < config.tol_slope

    res = evolve_bigT(H, V, p, grid, config, stop=stop)
    est = res.estimates
    change = change_of(est)
    converged = bool(res.times[-1] >= config.min_time and change < config.tol_slope)
    report = ConvergenceReport(converged, res.steps, float(change), res.residual, float(res.times[-1]))
    return float(est[-1]), report


@dataclass
class DiscountReport:
    converged: bool
    residual: float
    time: float
    bound: float


def discounted_value(H: HamiltonianSpec, V: PotentialSpec, p, lam: float, grid: TorusGrid,
                     config: SolverConfig = SolverConfig()):
    """Steady state of ``v_t + lam v + H(p + Dv) - V = 0``.

    Starts from the constant ``-(H(p) - mean V) / lam`` and stops when
    ``max |v_t| < tol_slope * lam``; gives up at ``t_max / lam``.
    """
    if not lam > 0:
        raise ValueError("lambda must be positive")
    if not H.coercive:
        raise SolverError("discounted solver needs a coercive Hamiltonian")
    pv = _as_p(p, grid.dimension)
    chunk = config.window
    st = _setup(H, V, pv, grid, config, chunk)
    Vg = st.V
    hp = eval_hamiltonian(H, pv)
    v = np.full(grid.shape, -(hp - float(np.sum(Vg) / Vg.size)) / lam)
    t = 0.0
    limit = config.t_max / lam
    residual = float(np.max(np.abs(_rate(st, v, lam))))
    while residual >= config.tol_slope * lam and t < limit:
        _advance(st, v, lam, t)
        t += chunk
        residual = float(np.max(np.abs(_rate(st, v, lam))))
    # |lam v| is bounded by max |H(p + q) - V| over the gradients the scheme sees
    kind, knots, vals, tail, a = st.params
    gm = [st.kernels.weno3(v, grid.h, ax) for ax in range(grid.dimension)]
    q1 = pv[0] + 0.5 * (gm[0][0] + gm[0][1])
    q2 = pv[1] + 0.5 * (gm[1][0] + gm[1][1]) if grid.dimension == 2 else 0.0
    hvals = st.kernels.ham(kind, q1, q2, knots, vals, tail, a)
    bound = float(max(np.max(np.abs(hvals - Vg)), abs(hp - Vg.min()), abs(hp - Vg.max())))
    report = DiscountReport(residual < config.tol_slope * lam, residual, t, bound)
    return Field(grid, v), report
