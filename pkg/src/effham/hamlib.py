"""Analytic Hamiltonians and potentials, structural checks, profile splitting.

Radial Hamiltonians are ``H(p) = f(|p|)`` with ``f`` piecewise linear.  A
:class:`RadialProfile` is the alternating rise/fall kinetic profile; its
:func:`decompose_profile` pieces are plain :class:`PiecewiseLinear` maps
tagged increasing or decreasing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .kernels import DOUBLE_WELL, RADIAL, ham_np


class HamlibError(ValueError):
    pass


class DimensionError(HamlibError):
    pass


class ProfileError(HamlibError):
    """A profile segment runs the wrong way, or breakpoints are malformed."""


class ConstructionError(HamlibError):
    """Extension slopes could not be steepened into an ordered decomposition."""


# --------------------------------------------------------------------------
# piecewise-linear radial maps


@dataclass(frozen=True)
class PiecewiseLinear:
    """Continuous piecewise-linear map on ``[0, inf)``.

    ``knots`` start at 0 and strictly increase; past the last knot the map
    continues with ``tail_slope`` (negative for quasiconcave pieces).
    """

    knots: tuple
    values: tuple
    tail_slope: float

    def __post_init__(self):
        k = np.asarray(self.knots, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if k.ndim != 1 or k.shape != v.shape or k.size < 1:
            raise ProfileError("knots and values must be equal-length 1-D sequences")
        if k[0] != 0.0:
            raise ProfileError(f"first knot must be 0, got {k[0]}")
        if np.any(np.diff(k) <= 0):
            raise ProfileError(f"knots must strictly increase: {self.knots}")
        if not (np.all(np.isfinite(v)) and math.isfinite(self.tail_slope)):
            raise ProfileError("profile values must be finite")
        object.__setattr__(self, "knots", tuple(float(x) for x in k))
        object.__setattr__(self, "values", tuple(float(x) for x in v))
        object.__setattr__(self, "tail_slope", float(self.tail_slope))

    @property
    def slopes(self) -> np.ndarray:
        """Segment slopes followed by the tail slope."""
        k = np.asarray(self.knots)
        v = np.asarray(self.values)
        return np.append(np.diff(v) / np.diff(k), self.tail_slope)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        k = np.asarray(self.knots)
        v = np.asarray(self.values)
        inner = np.interp(np.minimum(r, k[-1]), k, v)
        out = np.where(r >= k[-1], v[-1] + self.tail_slope * (r - k[-1]), inner)
        return out if out.ndim else float(out)

    def negated(self) -> "PiecewiseLinear":
        return PiecewiseLinear(self.knots, tuple(-x for x in self.values), -self.tail_slope)

    def max_abs_slope(self, radius: float = math.inf) -> float:
        """Largest ``|f'|`` over segments meeting ``[0, radius]``."""
        s = np.abs(self.slopes)
        starts = np.asarray(self.knots)
        live = starts <= radius
        live[0] = True
        return float(np.max(s[: len(starts)][live])) if live.any() else float(s[-1])

    def is_increasing(self) -> bool:
        return bool(np.all(self.slopes > 0))

    def is_decreasing(self) -> bool:
        return bool(np.all(self.slopes < 0))


@dataclass(frozen=True)
class RadialProfile:
    """Alternating rise/fall profile ``phi`` with breakpoints ``s_0 .. s_2m``.

    ``phi`` rises on ``(s_2i, s_2i+1)``, falls on ``(s_2i+1, s_2i+2)`` and rises
    with ``tail_slope`` past ``s_2m``.  ``s_1 == s_0 == 0`` is allowed for a
    profile that falls straight from the origin (the rising piece is then
    the single point 0).
    """

    breakpoints: tuple
    values: tuple
    tail_slope: float

    def __post_init__(self):
        s = np.asarray(self.breakpoints, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if s.ndim != 1 or s.shape != v.shape:
            raise ProfileError("breakpoints and values must have equal length")
        if s.size % 2 != 1:
            raise ProfileError(f"need an odd number 2m+1 of breakpoints, got {s.size}")
        if s[0] != 0.0:
            raise ProfileError("s_0 must be 0")
        gaps = np.diff(s)
        if np.any(gaps < 0) or np.any(gaps[1:] == 0):
            raise ProfileError(f"breakpoints must increase strictly (s_1 = 0 allowed): {self.breakpoints}")
        if s.size > 1 and gaps[0] == 0 and v[0] != v[1]:
            raise ProfileError("degenerate first segment needs phi(s_0) == phi(s_1)")
        if not self.tail_slope > 0:
            raise ProfileError("tail slope must be positive (coercivity)")
        object.__setattr__(self, "breakpoints", tuple(float(x) for x in s))
        object.__setattr__(self, "values", tuple(float(x) for x in v))
        object.__setattr__(self, "tail_slope", float(self.tail_slope))

    @property
    def m(self) -> int:
        return (len(self.breakpoints) - 1) // 2

    @property
    def function(self) -> PiecewiseLinear:
        s, v = list(self.breakpoints), list(self.values)
        if len(s) > 1 and s[1] == s[0]:
            del s[1], v[1]
        return PiecewiseLinear(tuple(s), tuple(v), self.tail_slope)

    @property
    def segment_slopes(self) -> tuple:
        """Slopes on ``(s_k, s_k+1)``; ``nan`` for a degenerate first segment."""
        s = np.asarray(self.breakpoints)
        v = np.asarray(self.values)
        out = []
        for k in range(len(s) - 1):
            ds = s[k + 1] - s[k]
            out.append(float("nan") if ds == 0 else float((v[k + 1] - v[k]) / ds))
        return tuple(out)

    def __call__(self, r):
        return self.function(r)

    @property
    def peaks(self) -> tuple:
        """``M_i = phi(s_2i-1)``, i = 1..m."""
        return tuple(self.values[1::2])

    @property
    def valleys(self) -> tuple:
        """``m_j = phi(s_2j)``, j = 1..m."""
        return tuple(self.values[2::2])


# --------------------------------------------------------------------------
# Hamiltonians


@dataclass(frozen=True)
class HamiltonianSpec:
    """Catalog Hamiltonian ``H(p)`` in dimension 1 or 2.

    ``kind`` is ``"radial"`` (``profile`` holds a RadialProfile or any
    increasing PiecewiseLinear), ``"double_well"`` (``offset`` is ``a``) or
    ``"piece"`` (``profile`` is a PiecewiseLinear with an ``orientation``).
    """

    kind: str
    dimension: int
    profile: Optional[object] = None
    offset: Optional[tuple] = None
    orientation: str = "increasing"
    name: str = ""

    def __post_init__(self):
        if self.dimension not in (1, 2):
            raise DimensionError(f"dimension must be 1 or 2, got {self.dimension}")
        if self.kind in ("radial", "piece"):
            if self.profile is None:
                raise HamlibError(f"{self.kind} Hamiltonian needs a profile")
            if self.kind == "piece" and self.orientation not in ("increasing", "decreasing"):
                raise HamlibError(f"bad orientation {self.orientation!r}")
            if self.kind == "radial" and isinstance(self.profile, PiecewiseLinear) and self.profile.tail_slope <= 0:
                raise HamlibError("radial Hamiltonian must be coercive")
        elif self.kind == "double_well":
            a = tuple(float(x) for x in (self.offset if self.offset is not None else (1.0, 0.0)))
            if len(a) != self.dimension:
                raise DimensionError(f"offset {a} does not match dimension {self.dimension}")
            object.__setattr__(self, "offset", a)
        else:
            raise HamlibError(f"unknown Hamiltonian kind {self.kind!r}")

    @property
    def radial_function(self) -> Optional[PiecewiseLinear]:
        if self.profile is None:
            return None
        if isinstance(self.profile, RadialProfile):
            return self.profile.function
        return self.profile

    @property
    def coercive(self) -> bool:
        if self.kind == "double_well":
            return True
        return self.radial_function.tail_slope > 0

    @property
    def even(self) -> bool:
        # every catalog kind is radial or a symmetric pair of wells
        return True

    def kernel_params(self):
        """Flat ``(kind, knots, vals, tail, a)`` tuple for the stencil kernels."""
        if self.kind == "double_well":
            a = np.zeros(2)
            a[: self.dimension] = self.offset
            dummy = np.zeros(1)
            return (DOUBLE_WELL, dummy, dummy, 0.0, a)
        f = self.radial_function
        return (RADIAL, np.asarray(f.knots), np.asarray(f.values), f.tail_slope, np.zeros(2))

    def lipschitz(self, radius: float = math.inf) -> float:
        """Bound on ``|dH/dq_i|`` over ``|q| <= radius``."""
        if self.kind == "double_well":
            return 1.0
        return self.radial_function.max_abs_slope(radius)

    def minimum(self) -> float:
        if self.kind == "double_well":
            return 0.0
        f = self.radial_function
        return float(min(f.values)) if f.tail_slope > 0 else -math.inf

    def dual(self) -> "HamiltonianSpec":
        """``G(q) = -H(-q)``; radial kinds only."""
        if self.kind == "double_well":
            raise HamlibError("duality transform is only defined for radial pieces")
        f = self.radial_function.negated()
        orient = "increasing" if f.tail_slope > 0 else "decreasing"
        return HamiltonianSpec("piece", self.dimension, profile=f, orientation=orient,
                               name=f"dual({self.name})" if self.name else "")


def eval_hamiltonian(spec: HamiltonianSpec, p) -> float:
    p = np.atleast_1d(np.asarray(p, dtype=float))
    if p.shape != (spec.dimension,):
        raise DimensionError(f"p has shape {p.shape}, Hamiltonian is {spec.dimension}-D")
    kind, knots, vals, tail, a = spec.kernel_params()
    q2 = p[1] if spec.dimension == 2 else 0.0
    return float(ham_np(kind, p[0], q2, knots, vals, tail, a))


def eval_hamiltonian_grid(spec: HamiltonianSpec, points: np.ndarray) -> np.ndarray:
    """Vectorised ``H`` over ``points`` of shape ``(..., dimension)``."""
    pts = np.asarray(points, dtype=float)
    if pts.shape[-1] != spec.dimension:
        raise DimensionError(f"points have trailing size {pts.shape[-1]}, Hamiltonian is {spec.dimension}-D")
    kind, knots, vals, tail, a = spec.kernel_params()
    q2 = pts[..., 1] if spec.dimension == 2 else 0.0
    return ham_np(kind, pts[..., 0], q2, knots, vals, tail, a)


# --------------------------------------------------------------------------
# potentials

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class PotentialSpec:
    """Periodic potential ``V`` on the unit torus, scaled by ``scale``.

    ``params`` carries ``c0`` and ``s`` for ``triangle_1d`` and ``values``
    (a grid array) for ``tabulated``.  Any kind may also carry
    ``reflect=c``, which turns the potential into ``c - V``.
    """

    kind: str
    dimension: int
    scale: float = 1.0
    params: dict = field(default_factory=dict)

    KINDS = ("zero", "constant", "sine_product", "sine_squares", "asym_sine", "triangle_1d", "tabulated")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise HamlibError(f"unknown potential kind {self.kind!r}")
        if self.dimension not in (1, 2):
            raise DimensionError(f"dimension must be 1 or 2, got {self.dimension}")
        if self.scale < 0:
            raise HamlibError("scale must be nonnegative")
        if self.kind in ("sine_product", "sine_squares", "asym_sine") and self.dimension != 2:
            raise DimensionError(f"{self.kind} is two-dimensional")
        if self.kind == "triangle_1d":
            if self.dimension != 1:
                raise DimensionError("triangle_1d is one-dimensional")
            c0 = float(self.params.get("c0", 1.0))
            s = float(self.params.get("s", 0.5))
            if not (c0 > 0 and 0 < s < 1):
                raise HamlibError("triangle_1d needs c0 > 0 and 0 < s < 1")
        if self.kind == "tabulated":
            vals = np.asarray(self.params.get("values"), dtype=float)
            if vals.ndim != self.dimension or not np.all(np.isfinite(vals)):
                raise HamlibError("tabulated potential needs finite grid values of matching dimension")

    def with_scale(self, scale: float) -> "PotentialSpec":
        return PotentialSpec(self.kind, self.dimension, scale, dict(self.params))

    def reflected(self, top: float) -> "PotentialSpec":
        """``top - V``; reflecting twice with the same ``top`` gives V back."""
        params = dict(self.params)
        if "reflect" in params:
            shift = top - params.pop("reflect")
            if shift == 0:
                return PotentialSpec(self.kind, self.dimension, self.scale, params)
            raise HamlibError("nested reflections with different tops are not supported")
        params["reflect"] = float(top)
        return PotentialSpec(self.kind, self.dimension, self.scale, params)

    def analytic_extrema(self) -> Optional[tuple]:
        """Exact ``(min V, max V)`` for catalog kinds, else None."""
        if "reflect" in self.params:
            base = self._base().analytic_extrema()
            if base is None:
                return None
            c = self.params["reflect"]
            return c - base[1], c - base[0]
        S = self.scale
        if self.kind == "zero":
            return 0.0, 0.0
        if self.kind == "constant":
            c = S * float(self.params.get("c", 1.0))
            return c, c
        if self.kind == "sine_product":
            return 0.0, 4.0 * S
        if self.kind == "sine_squares":
            return 0.0, 2.0 * S
        if self.kind == "asym_sine":
            # g(t) = sin t + sin 2t has extrema -/+ g(arccos((sqrt(33)-1)/8))
            t = math.acos((math.sqrt(33.0) - 1.0) / 8.0)
            g = math.sin(t) + math.sin(2 * t)
            return S * (3.0 - g - 1.0), S * (3.0 + g + 1.0)
        if self.kind == "triangle_1d":
            return 0.0, S * float(self.params.get("c0", 1.0))
        vals = np.asarray(self.params["values"], dtype=float)
        return S * float(vals.min()), S * float(vals.max())

    def modulus(self) -> float:
        """Lipschitz constant of ``V`` (used for grid/analytic comparisons)."""
        S = self.scale
        if self.kind in ("zero", "constant"):
            return 0.0
        if self.kind == "sine_product":
            return S * _TWO_PI * 2.0 * math.sqrt(2.0)
        if self.kind == "sine_squares":
            return S * 2.0 * _TWO_PI
        if self.kind == "asym_sine":
            return S * math.hypot(3.0 * _TWO_PI, _TWO_PI)
        if self.kind == "triangle_1d":
            c0 = float(self.params.get("c0", 1.0))
            s = float(self.params.get("s", 0.5))
            return S * c0 * max(1.0 / s, 1.0 / (1.0 - s))
        return math.inf

    def _base(self) -> "PotentialSpec":
        params = {k: v for k, v in self.params.items() if k != "reflect"}
        return PotentialSpec(self.kind, self.dimension, self.scale, params)


def eval_potential(spec: PotentialSpec, x):
    """``V(x)``; ``x`` has trailing size ``dimension`` and is read modulo 1."""
    if "reflect" in spec.params:
        return spec.params["reflect"] - eval_potential(spec._base(), x)
    x = np.asarray(x, dtype=float)
    if x.shape == () and spec.dimension == 1:
        x = x.reshape(1)
    if x.shape[-1] != spec.dimension:
        raise DimensionError(f"x has trailing size {x.shape[-1]}, potential is {spec.dimension}-D")
    x = np.mod(x, 1.0)
    S = spec.scale
    k = spec.kind
    if k == "zero":
        out = np.zeros(x.shape[:-1])
    elif k == "constant":
        out = np.full(x.shape[:-1], S * float(spec.params.get("c", 1.0)))
    elif k == "sine_product":
        out = S * (1 + np.sin(_TWO_PI * x[..., 0])) * (1 + np.sin(_TWO_PI * x[..., 1]))
    elif k == "sine_squares":
        out = S * (np.sin(_TWO_PI * x[..., 0]) ** 2 + np.sin(_TWO_PI * x[..., 1]) ** 2)
    elif k == "asym_sine":
        out = S * (3 + np.sin(_TWO_PI * x[..., 0]) + np.sin(2 * _TWO_PI * x[..., 0])
                   + np.sin(_TWO_PI * x[..., 1]))
    elif k == "triangle_1d":
        c0 = float(spec.params.get("c0", 1.0))
        s = float(spec.params.get("s", 0.5))
        t = x[..., 0]
        out = S * c0 * np.minimum(t / s, (1.0 - t) / (1.0 - s))
    else:
        vals = np.asarray(spec.params["values"], dtype=float)
        n = vals.shape[0]
        idx = tuple(np.rint(x[..., d] * n).astype(int) % n for d in range(spec.dimension))
        out = S * vals[idx]
    return float(out) if out.ndim == 0 else out


def potential_on_grid(spec: PotentialSpec, n: int) -> np.ndarray:
    """Node values ``V(i/n[, j/n])`` as an ``n`` or ``n x n`` array."""
    if "reflect" in spec.params:
        return spec.params["reflect"] - potential_on_grid(spec._base(), n)
    if spec.kind == "tabulated":
        vals = spec.scale * np.asarray(spec.params["values"], dtype=float)
        if vals.shape != (n,) * spec.dimension:
            raise DimensionError(f"tabulated potential has shape {vals.shape}, grid needs {(n,) * spec.dimension}")
        return vals
    x = np.arange(n) / n
    if spec.dimension == 1:
        return eval_potential(spec, x[:, None])
    X1, X2 = np.meshgrid(x, x, indexing="ij")
    return eval_potential(spec, np.stack([X1, X2], axis=-1))


@dataclass(frozen=True)
class PotentialStats:
    min: float
    max: float

    @property
    def osc(self) -> float:
        return self.max - self.min


def potential_stats(spec: PotentialSpec, n: int) -> PotentialStats:
    """Grid extrema of ``V`` on an ``n``-point-per-axis torus grid."""
    if n < 3:
        raise HamlibError("potential_stats needs at least 3 points per dimension")
    vals = potential_on_grid(spec, n)
    return PotentialStats(float(vals.min()), float(vals.max()))


def reference_stats(spec: PotentialSpec, n: int = 401) -> PotentialStats:
    """Analytic extrema when known, grid extrema otherwise."""
    ext = spec.analytic_extrema()
    if ext is not None:
        return PotentialStats(*ext)
    return potential_stats(spec, n)


# --------------------------------------------------------------------------
# structural hypotheses


@dataclass
class HypothesisReport:
    m: int
    strict_h6: bool
    relaxed_h6: bool
    h7: bool
    h8: bool
    violations: list

    @property
    def classes(self) -> list:
        out = []
        if self.strict_h6:
            out.append("H6-strict")
        if self.relaxed_h6:
            out.append("H6-relaxed")
        if self.h7:
            out.append("H7")
        if self.h8:
            out.append("H8")
        return out

    @property
    def quasiconvex(self) -> bool:
        return self.m == 0


def validate_hypotheses(profile: RadialProfile) -> HypothesisReport:
    """Classify ``profile`` against the rise/fall ordering hypotheses.

    Raises ProfileError when a segment runs against its required direction.
    Flat segments are tolerated but disqualify the strict classes.
    """
    slopes = profile.segment_slopes
    flat = False
    for k, sl in enumerate(slopes):
        if math.isnan(sl):
            continue
        want_up = k % 2 == 0
        if (want_up and sl < 0) or (not want_up and sl > 0):
            raise ProfileError(
                f"segment {k} on ({profile.breakpoints[k]}, {profile.breakpoints[k + 1]}) "
                f"must be {'increasing' if want_up else 'decreasing'}, slope {sl}"
            )
        if sl == 0:
            flat = True
    v = profile.values
    m = profile.m
    violations = []
    strict_order = True
    relaxed_order = True
    for i in range(m):
        lo, hi = v[2 * i], v[2 * i + 2]
        if not lo > hi:
            strict_order = False
            violations.append(f"phi(s_{2 * i}) = {lo} > phi(s_{2 * i + 2}) = {hi}")
        if not lo >= hi:
            relaxed_order = False
    for i in range(m - 1):
        lo, hi = v[2 * i + 1], v[2 * i + 3]
        if not lo < hi:
            strict_order = False
            violations.append(f"phi(s_{2 * i + 1}) = {lo} < phi(s_{2 * i + 3}) = {hi}")
        if not lo <= hi:
            relaxed_order = False
    h7 = not flat
    h8 = (m == 1 and not flat and profile.breakpoints[1] > 0
          and v[0] == 0.0 and 0.0 < v[2] < v[1])
    return HypothesisReport(
        m=m,
        strict_h6=strict_order and not flat,
        relaxed_h6=relaxed_order,
        h7=h7,
        h8=h8,
        violations=violations,
    )


# --------------------------------------------------------------------------
# decomposition


@dataclass(frozen=True)
class Piece:
    function: PiecewiseLinear
    orientation: str  # "increasing" | "decreasing"
    native: tuple  # (start, end) where the piece equals phi; end may be inf

    def hamiltonian(self, dimension: int) -> HamiltonianSpec:
        return HamiltonianSpec("piece", dimension, profile=self.function, orientation=self.orientation)


@dataclass(frozen=True)
class DecompositionPlan:
    """Pieces ``phi_0 .. phi_2m`` plus the energy constants they are glued with.

    ``constants_min[i-1] = phi(s_2i) - min V`` and
    ``constants_max[i-1] = phi(s_2i-1) - max V`` for i = 1..m; they are
    filled by :meth:`with_potential`.
    """

    profile: RadialProfile
    pieces: tuple
    extension_slopes: tuple = ()
    constants_min: tuple = ()
    constants_max: tuple = ()

    @property
    def m(self) -> int:
        return self.profile.m

    def with_potential(self, v_min: float, v_max: float) -> "DecompositionPlan":
        v = self.profile.values
        cmin = tuple(v[2 * i] - v_min for i in range(1, self.m + 1))
        cmax = tuple(v[2 * i - 1] - v_max for i in range(1, self.m + 1))
        return DecompositionPlan(self.profile, self.pieces, self.extension_slopes, cmin, cmax)

    def metadata(self) -> dict:
        return {
            "m": self.m,
            "extension_slopes": list(self.extension_slopes),
            "pieces": [
                {"orientation": pc.orientation, "knots": list(pc.function.knots),
                 "values": list(pc.function.values), "tail_slope": pc.function.tail_slope}
                for pc in self.pieces
            ],
        }


def verification_grid(profile: RadialProfile, samples: int = 1000) -> np.ndarray:
    s = profile.breakpoints
    top = s[-1] + 2.0 * max(s[-1] - s[0], 1.0)
    return np.linspace(0.0, top, samples)


def _build_piece(profile: RadialProfile, j: int, below: float, above: float) -> Piece:
    """Piece ``phi_j``: equal to phi on ``[s_j, s_j+1]``, linear beyond.

    ``below``/``above`` are the magnitudes of the extension slopes; the sign
    follows the piece's orientation.
    """
    s = profile.breakpoints
    v = profile.values
    m = profile.m
    up = j % 2 == 0
    sign = 1.0 if up else -1.0
    lo = s[j]
    if j == 2 * m:
        # last rising piece keeps phi's own tail
        knots = [0.0] if lo == 0 else [0.0, lo]
        vals = [v[j]] if lo == 0 else [v[j] - sign * below * lo, v[j]]
        return Piece(PiecewiseLinear(tuple(knots), tuple(vals), profile.tail_slope),
                     "increasing", (lo, math.inf))
    hi = s[j + 1]
    if hi == lo:
        # degenerate first segment: the piece only has to pass through phi(0)
        return Piece(PiecewiseLinear((0.0,), (v[j],), sign * above), "increasing", (lo, hi))
    knots = [lo, hi]
    vals = [v[j], v[j + 1]]
    if lo > 0:
        knots.insert(0, 0.0)
        vals.insert(0, v[j] - sign * below * lo)
    return Piece(PiecewiseLinear(tuple(knots), tuple(vals), sign * above),
                 "increasing" if up else "decreasing", (lo, hi))


def _ordering_violation(pieces, grid):
    """First ``(j, r_bad)`` with phi_j >= phi_j+2 (j even) or <= (j odd) broken.

    ``r_bad`` holds the offending radii; ``inf`` flags a tail-slope clash.
    """
    for j in range(len(pieces) - 2):
        fa, fb = pieces[j].function, pieces[j + 2].function
        gap = fa(grid) - fb(grid)
        tail_gap = fa.tail_slope - fb.tail_slope
        if j % 2 == 1:
            gap, tail_gap = -gap, -tail_gap
        bad = grid[gap < 0]
        if tail_gap < 0:
            bad = np.append(bad, math.inf)
        if bad.size:
            return j, bad
    return None


def decompose_profile(profile: RadialProfile, relaxed: bool = False, samples: int = 1000,
                      max_doublings: int = 10, require_ordering: bool = True) -> DecompositionPlan:
    """Split ``profile`` into monotone pieces ordered as the gluing requires.

    Extension slopes start at the adjacent native segment's slope and are
    doubled until ``phi_2i >= phi_2i+2`` and ``phi_2i+1 <= phi_2i+3`` hold on
    the verification grid and in the tails.  ``require_ordering=False``
    builds pieces for any alternating profile even when the valley/peak
    ordering fails; the glued formula is then not guaranteed to hold.
    """
    rep = validate_hypotheses(profile)
    if require_ordering and not (rep.relaxed_h6 if relaxed else rep.strict_h6):
        which = "relaxed" if relaxed else "strict"
        raise ProfileError(f"profile fails {which} ordering hypothesis: {rep.violations}")
    m = profile.m
    if m == 0:
        pc = Piece(profile.function, "increasing", (0.0, math.inf))
        return DecompositionPlan(profile, (pc,), ())
    slopes = profile.segment_slopes
    base = []
    for j in range(2 * m + 1):
        native = profile.tail_slope if j == 2 * m else slopes[j]
        if math.isnan(native) or native == 0:
            native = slopes[j + 1] if j + 1 < len(slopes) else profile.tail_slope
        base.append(abs(native) if native else 1.0)
    below = list(base)
    above = list(base)
    doublings = [0] * (2 * m + 1)
    grid = verification_grid(profile, samples)
    while True:
        pieces = tuple(_build_piece(profile, j, below[j], above[j]) for j in range(2 * m + 1))
        found = _ordering_violation(pieces, grid)
        if found is None:
            return DecompositionPlan(profile, pieces, tuple(zip(below, above)))
        bad, radii = found
        if doublings[bad] >= max_doublings:
            raise ConstructionError(
                f"pieces phi_{bad} and phi_{bad + 2} stay unordered after {max_doublings} doublings"
            )
        doublings[bad] += 1
        # steepen phi_bad past its native interval, phi_bad+2 before its own
        if np.any(radii >= profile.breakpoints[bad + 1]):
            above[bad] *= 2.0
        if np.any(radii <= profile.breakpoints[bad + 2]):
            below[bad + 2] *= 2.0


def reconstruct(plan: DecompositionPlan, r) -> np.ndarray:
    """Glue the pieces back with the same max/min recursion used on tables."""
    r = np.asarray(r, dtype=float)
    v = plan.profile.values
    out = plan.pieces[0].function(r)
    for k in range(1, plan.m + 1):
        inner = np.minimum(np.minimum(out, plan.pieces[2 * k - 1].function(r)), v[2 * k - 1])
        out = np.maximum(np.maximum(inner, plan.pieces[2 * k].function(r)), v[2 * k])
    return out


def clip_below(f: PiecewiseLinear, level: float, start: float = 0.0) -> PiecewiseLinear:
    """``f`` on ``[0, start]`` and ``max(f, level)`` beyond ``start``."""
    f = f.function if isinstance(f, RadialProfile) else f
    k = np.asarray(f.knots)
    v = np.asarray(f.values)
    pts = set(k.tolist()) | {float(start)}
    ext = np.append(k, k[-1] + 1.0)
    vals = np.append(v, v[-1] + f.tail_slope)
    for a, b, fa, fb in zip(ext[:-1], ext[1:], vals[:-1], vals[1:]):
        if (fa - level) * (fb - level) < 0:
            r = a + (level - fa) * (b - a) / (fb - fa)
            if b != ext[-1] or r > a:
                pts.add(float(r))
    if f.tail_slope != 0 and (level - v[-1]) / f.tail_slope > 0:
        pts.add(float(k[-1] + (level - v[-1]) / f.tail_slope))
    knots = np.array(sorted(x for x in pts if x >= 0))
    raw = np.asarray(f(knots))
    out = np.where(knots >= start, np.maximum(raw, level), raw)
    tail = f.tail_slope if f(knots[-1] + 1.0) >= level or knots[-1] < start else 0.0
    return PiecewiseLinear(tuple(knots), tuple(out), tail)


def plateau_split(profile: RadialProfile) -> tuple:
    """``(max(phi, m1), plateau)`` for a one-well profile.

    The second function equals ``phi`` up to ``s1`` and ``max(phi, M1)``
    after it; it is quasiconvex when ``phi`` increases on ``[0, s1]``.
    """
    if profile.m != 1:
        raise HamlibError("plateau_split needs a profile with a single well (m = 1)")
    s = profile.breakpoints
    M1, m1 = profile.values[1], profile.values[2]
    return clip_below(profile.function, m1), clip_below(profile.function, M1, s[1])


# --------------------------------------------------------------------------
# catalog


def example1_profile() -> RadialProfile:
    """``min(4r, 2|r - 1| + 1)``: rise to 2 at 0.5, fall to 1 at 1, then slope 2."""
    return RadialProfile((0.0, 0.5, 1.0), (0.0, 2.0, 1.0), 2.0)


def figure1_profile() -> RadialProfile:
    """``|r - 1|``: falls from 1 at the origin to 0 at r = 1, then rises."""
    return RadialProfile((0.0, 0.0, 1.0), (1.0, 1.0, 0.0), 1.0)


def figure4_profile() -> RadialProfile:
    """Three-well profile with strictly ordered valleys and peaks."""
    return RadialProfile((0.0, 1.0, 2.0, 3.0, 4.0), (1.5, 2.0, 1.0, 2.5, 0.5), 2.0)


def eikonal_profile() -> RadialProfile:
    return RadialProfile((0.0,), (0.0,), 1.0)


def radial(profile, dimension: int, name: str = "") -> HamiltonianSpec:
    return HamiltonianSpec("radial", dimension, profile=profile, name=name)


def double_well(offset: Sequence[float] = (1.0, 0.0), name: str = "double_well") -> HamiltonianSpec:
    return HamiltonianSpec("double_well", len(offset), offset=tuple(offset), name=name)


def sine_product(S: float) -> PotentialSpec:
    return PotentialSpec("sine_product", 2, S)


def sine_squares(S: float) -> PotentialSpec:
    return PotentialSpec("sine_squares", 2, S)


def asym_sine(S: float) -> PotentialSpec:
    return PotentialSpec("asym_sine", 2, S)


def triangle(S: float, c0: float = 1.0, s: float = 1.0 / 3.0) -> PotentialSpec:
    return PotentialSpec("triangle_1d", 1, S, {"c0": c0, "s": s})


def zero_potential(dimension: int) -> PotentialSpec:
    return PotentialSpec("zero", dimension, 0.0)


def constant_potential(dimension: int, c: float) -> PotentialSpec:
    return PotentialSpec("constant", dimension, 1.0, {"c": c})
