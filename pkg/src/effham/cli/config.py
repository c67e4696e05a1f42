"""Run configuration files.

Configs are TOML.  Every section and key is optional except
``[hamiltonian]`` and ``[potential]``; unknown keys are rejected.

.. code-block:: toml

    [hamiltonian]
    kind = "radial"          # radial | double_well
    profile = "example1"     # example1 | figure1 | figure4 | eikonal
    # or: breakpoints = [...], values = [...], tail = 2.0
    dimension = 2
    offset = [1.0, 0.0]      # double_well only

    [potential]
    kind = "sine_product"    # zero | constant | sine_product | sine_squares | asym_sine | triangle_1d
    scales = [0.125, 0.25]
    c0 = 1.0                 # triangle_1d
    s = 0.3333333333333333   # triangle_1d
    c = 0.0                  # constant

    [grid]
    n = 32

    [pgrid]
    samples = 21
    ranges = [1.0, 1.0]

    [solver]                 # any SolverConfig field
    window = 1.0

    [diagnostics]
    checks = ["evenness", "quasiconvexity"]
    level_tolerance = 0.02
    levels = [1.0, 1.5]

    [discount]
    lambdas = [0.1, 0.05, 0.025]
    points = [[0.5, 0.0]]
    tolerance = 0.05

    [run]
    pipelines = ["direct"]   # direct | composed | duality | diagnostics | discount
    output = "out"
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field, fields
from typing import Optional

import tomli

from .. import hamlib as hl
from ..effective import PGrid
from ..hjsolver import SolverConfig, TorusGrid

PIPELINES = ("direct", "composed", "duality", "diagnostics", "discount")
CHECKS = ("evenness", "quasiconvexity", "levelset", "flatpart", "flimit")
PROFILES = {
    "example1": hl.example1_profile,
    "figure1": hl.figure1_profile,
    "figure4": hl.figure4_profile,
    "eikonal": hl.eikonal_profile,
}


class ConfigError(ValueError):
    """Bad configuration; the message names the key and, when known, its line."""


def _line_of(text: str, section: str, key: Optional[str]) -> Optional[int]:
    current = ""
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        head = re.match(r"^\[\s*([^\]]+?)\s*\]", line)
        if head:
            current = head.group(1)
            if key is None and current == section:
                return no
            continue
        if key is not None and current == section and re.match(rf"^{re.escape(key)}\s*=", line):
            return no
    return None


class _Reader:
    def __init__(self, text, data):
        self.text = text
        self.data = data

    def fail(self, section, key, msg):
        where = f"{section}.{key}" if key else f"[{section}]"
        line = _line_of(self.text, section, key)
        suffix = f" (line {line})" if line else ""
        raise ConfigError(f"{where}: {msg}{suffix}")

    def section(self, name, allowed, required=False):
        sec = self.data.get(name)
        if sec is None:
            if required:
                raise ConfigError(f"missing required section [{name}]")
            return {}
        if not isinstance(sec, dict):
            self.fail(name, None, "expected a table")
        for key in sec:
            if key not in allowed:
                self.fail(name, key, f"unknown key; expected one of {sorted(allowed)}")
        return sec

    def get(self, sec, section, key, kind, default=None):
        if key not in sec:
            return default
        val = sec[key]
        ok = {
            "float": lambda v: isinstance(v, (int, float)) and not isinstance(v, bool),
            "int": lambda v: isinstance(v, int) and not isinstance(v, bool),
            "str": lambda v: isinstance(v, str),
            "floats": lambda v: isinstance(v, list) and all(
                isinstance(x, (int, float)) and not isinstance(x, bool) for x in v),
            "strs": lambda v: isinstance(v, list) and all(isinstance(x, str) for x in v),
            "points": lambda v: isinstance(v, list) and all(
                isinstance(x, list) and all(isinstance(y, (int, float)) for y in x) for x in v),
        }[kind]
        if not ok(val):
            names = {"float": "a number", "int": "an integer", "str": "a string",
                     "floats": "a list of numbers", "strs": "a list of strings",
                     "points": "a list of coordinate lists"}
            self.fail(section, key, f"expected {names[kind]}, got {type(val).__name__}")
        if kind == "float":
            return float(val)
        if kind == "floats":
            return [float(x) for x in val]
        if kind == "points":
            return [[float(y) for y in x] for x in val]
        return val


@dataclass
class DiagnosticsConfig:
    checks: tuple = ("evenness", "quasiconvexity")
    level_tolerance: float = 2e-2
    levels: Optional[tuple] = None


@dataclass
class DiscountConfig:
    lambdas: tuple = (0.1, 0.05, 0.025)
    points: tuple = ()
    tolerance: float = 5e-2


@dataclass
class RunConfig:
    hamiltonian: hl.HamiltonianSpec
    potential: hl.PotentialSpec
    scales: tuple
    grid: TorusGrid
    pgrid: PGrid
    solver: SolverConfig
    pipelines: tuple = ("direct",)
    output: str = "out"
    diagnostics: DiagnosticsConfig = field(default_factory=DiagnosticsConfig)
    discount: DiscountConfig = field(default_factory=DiscountConfig)
    profile: Optional[hl.RadialProfile] = None
    source: str = ""

    @property
    def dimension(self) -> int:
        return self.hamiltonian.dimension

    def potentials(self) -> list:
        return [self.potential.with_scale(S) for S in self.scales]

    def digest(self) -> str:
        """SHA-256 of the config text, embedded in every output file."""
        return hashlib.sha256(self.source.encode()).hexdigest()[:16]


def _hamiltonian(r: _Reader):
    allowed = {"kind", "profile", "breakpoints", "values", "tail", "dimension", "offset", "name"}
    sec = r.section("hamiltonian", allowed, required=True)
    kind = r.get(sec, "hamiltonian", "kind", "str", "radial")
    name = r.get(sec, "hamiltonian", "name", "str", "")
    if kind == "double_well":
        offset = r.get(sec, "hamiltonian", "offset", "floats", [1.0, 0.0])
        dim = r.get(sec, "hamiltonian", "dimension", "int", len(offset))
        if dim != len(offset):
            r.fail("hamiltonian", "offset", f"needs {dim} components")
        return hl.double_well(offset, name or "double_well"), None
    if kind != "radial":
        r.fail("hamiltonian", "kind", f"expected 'radial' or 'double_well', got {kind!r}")
    dim = r.get(sec, "hamiltonian", "dimension", "int", 2)
    if dim not in (1, 2):
        r.fail("hamiltonian", "dimension", "must be 1 or 2")
    named = r.get(sec, "hamiltonian", "profile", "str")
    if named is not None:
        if named not in PROFILES:
            r.fail("hamiltonian", "profile", f"unknown profile; expected one of {sorted(PROFILES)}")
        for key in ("breakpoints", "values", "tail"):
            if key in sec:
                r.fail("hamiltonian", key, "cannot be combined with a named profile")
        profile = PROFILES[named]()
    else:
        s = r.get(sec, "hamiltonian", "breakpoints", "floats")
        v = r.get(sec, "hamiltonian", "values", "floats")
        tail = r.get(sec, "hamiltonian", "tail", "float")
        if s is None or v is None or tail is None:
            r.fail("hamiltonian", None, "needs either profile or breakpoints, values and tail")
        try:
            profile = hl.RadialProfile(tuple(s), tuple(v), tail)
        except hl.HamlibError as exc:
            r.fail("hamiltonian", "breakpoints", str(exc))
    return hl.radial(profile, dim, name or (named or "radial")), profile


def _potential(r: _Reader, dim):
    sec = r.section("potential", {"kind", "scales", "c0", "s", "c"}, required=True)
    kind = r.get(sec, "potential", "kind", "str", "zero")
    scales = r.get(sec, "potential", "scales", "floats", [1.0])
    if not scales or any(S < 0 for S in scales):
        r.fail("potential", "scales", "needs one or more nonnegative values")
    params = {}
    if kind == "triangle_1d":
        params = {"c0": r.get(sec, "potential", "c0", "float", 1.0),
                  "s": r.get(sec, "potential", "s", "float", 1.0 / 3.0)}
    elif kind == "constant":
        params = {"c": r.get(sec, "potential", "c", "float", 0.0)}
    for key in ("c0", "s", "c"):
        if key in sec and key not in params:
            r.fail("potential", key, f"does not apply to kind {kind!r}")
    try:
        V = hl.PotentialSpec(kind, dim, 1.0, params)
    except hl.HamlibError as exc:
        r.fail("potential", "kind", str(exc))
    return V, tuple(scales)


def _solver(r: _Reader):
    names = {f.name: f.type for f in fields(SolverConfig)}
    sec = r.section("solver", set(names))
    kw = {}
    for key in sec:
        kind = {"init": "str", "backend": "str", "scheme": "str", "confirm": "int"}.get(key, "float")
        kw[key] = r.get(sec, "solver", key, kind)
    try:
        return SolverConfig(**kw)
    except ValueError as exc:
        key = next((k for k in kw if k in str(exc)), None)
        r.fail("solver", key, str(exc))


def parse_config(text: str) -> RunConfig:
    """Parse and validate a TOML run configuration."""
    try:
        data = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"parse error: {exc}") from None
    r = _Reader(text, data)
    known = {"hamiltonian", "potential", "grid", "pgrid", "solver", "diagnostics", "discount", "run"}
    for key in data:
        if key not in known:
            line = _line_of(text, key, None)
            raise ConfigError(f"[{key}]: unknown section; expected one of {sorted(known)}"
                              + (f" (line {line})" if line else ""))
    H, profile = _hamiltonian(r)
    V, scales = _potential(r, H.dimension)

    sec = r.section("grid", {"n"})
    n = r.get(sec, "grid", "n", "int", 401 if H.dimension == 1 else 32)
    if n < 5:
        r.fail("grid", "n", "needs at least 5 points")
    grid = TorusGrid(H.dimension, n)

    sec = r.section("pgrid", {"samples", "ranges"})
    samples = r.get(sec, "pgrid", "samples", "int", 41 if H.dimension == 1 else 21)
    ranges = r.get(sec, "pgrid", "ranges", "floats", [1.0] * H.dimension)
    try:
        pgrid = PGrid(H.dimension, tuple(ranges), samples)
    except ValueError as exc:
        r.fail("pgrid", "samples" if "odd" in str(exc) else "ranges", str(exc))

    solver = _solver(r)

    sec = r.section("diagnostics", {"checks", "level_tolerance", "levels"})
    checks = r.get(sec, "diagnostics", "checks", "strs", list(DiagnosticsConfig.checks))
    for c in checks:
        if c not in CHECKS:
            r.fail("diagnostics", "checks", f"unknown check {c!r}; expected one of {list(CHECKS)}")
    levels = r.get(sec, "diagnostics", "levels", "floats")
    diag = DiagnosticsConfig(tuple(checks), r.get(sec, "diagnostics", "level_tolerance", "float", 2e-2),
                             tuple(levels) if levels is not None else None)

    sec = r.section("discount", {"lambdas", "points", "tolerance"})
    lambdas = r.get(sec, "discount", "lambdas", "floats", list(DiscountConfig.lambdas))
    if not lambdas or any(x <= 0 for x in lambdas) or any(b >= a for a, b in zip(lambdas, lambdas[1:])):
        r.fail("discount", "lambdas", "must be a decreasing list of positive numbers")
    points = r.get(sec, "discount", "points", "points", [])
    for pt in points:
        if len(pt) != H.dimension:
            r.fail("discount", "points", f"each point needs {H.dimension} coordinates")
    disc = DiscountConfig(tuple(lambdas), tuple(tuple(p) for p in points),
                          r.get(sec, "discount", "tolerance", "float", 5e-2))

    sec = r.section("run", {"pipelines", "output"})
    pipelines = r.get(sec, "run", "pipelines", "strs", ["direct"])
    for p in pipelines:
        if p not in PIPELINES:
            r.fail("run", "pipelines", f"unknown pipeline {p!r}; expected one of {list(PIPELINES)}")
    if ("composed" in pipelines or "duality" in pipelines) and profile is None:
        r.fail("run", "pipelines", "composed and duality pipelines need a radial profile")
    output = r.get(sec, "run", "output", "str", "out")
    return RunConfig(H, V, scales, grid, pgrid, solver, tuple(pipelines), output, diag, disc,
                     profile, text)


def load_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def describe(cfg: RunConfig) -> dict:
    """JSON-friendly summary used as output metadata."""
    return json.loads(json.dumps({
        "hamiltonian": cfg.hamiltonian.name,
        "potential": cfg.potential.kind,
        "scales": list(cfg.scales),
        "n": cfg.grid.n,
        "samples": cfg.pgrid.samples,
        "scheme": cfg.solver.scheme,
    }))
