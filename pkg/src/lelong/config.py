"""Scenario configuration files.

A config is an INI file with one section per scenario.  Values in
``[DEFAULT]`` apply to every section.  Grammar::

    [name]
    current = T2                 catalog current (omit for kernel-only checks)
    current.split = 2 0          optional catalog options (split for T0/H0, n for TS)
    current.ddc = yes            study dd^c of the current instead of the current
    weight = euclid              euclid | anisotropic | scaled | power
    weight.params = c=3 R=3      key=value pairs; lists are comma separated: lams=1,2
    ball = 0:1                   centre:radius, parts joined by '|'; 'none' when m = 0
    grid = 0.25 0.5 8            r_max ratio count (geometric, weight units)
    grid.values = 0.16 0.04      explicit decreasing grid instead of the above
    grid.units = euclid          'euclid' squares the grid values (phi = |z|^2)
    tol = 1e-6
    seed = 0
    checks = profile, limit      see CHECKS

Check parameters use ``<check>.<key>`` keys; see the README for the list.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .currents import catalog
from .errors import ConfigError, LelongError
from .weights import DirectionalBall, weight_from_spec

CHECKS = ("nu_at", "profile", "limit", "condition_c", "g_monotone", "lelong_jensen", "scaling",
          "comparison", "k0", "additivity", "wedge_oracle", "calibration")
KERNEL_ONLY = {"wedge_oracle", "calibration"}
GRID_CHECKS = {"profile", "limit", "condition_c", "g_monotone", "scaling", "comparison", "k0", "additivity"}
LIMIT_CHECKS = {"limit", "condition_c", "scaling", "comparison", "k0", "additivity"}
MIN_LIMIT_POINTS = 6


@dataclass(frozen=True)
class Scenario:
    name: str
    checks: tuple
    current: str | None = None
    current_options: dict = field(default_factory=dict)
    use_ddc: bool = False
    weight: str = "euclid"
    weight_params: dict = field(default_factory=dict)
    ball: str = "none"
    grid: tuple = ()
    tol: float = 1e-6
    seed: int = 0
    params: dict = field(default_factory=dict)  # "<check>.<key>" -> raw string

    def param(self, key: str, default=None):
        return self.params.get(key, default)

    def float_param(self, key: str, default=None):
        raw = self.params.get(key)
        return default if raw is None else float(raw)

    def build_current(self):
        T = catalog(self.current, **self.current_options)
        if self.use_ddc:
            from .currents import ddc
            T = ddc(T)
        return T

    def build_weight(self):
        return weight_from_spec(self.weight, **dict(self.weight_params))

    def build_psi(self):
        return weight_from_spec(self.params["comparison.psi"],
                                **parse_kv(self.params.get("comparison.psi_params", "")))

    def build_ball(self, spec: str | None = None) -> DirectionalBall:
        return parse_ball(self.ball if spec is None else spec)


def _number(text: str):
    text = text.strip()
    if "," in text:
        return [_number(t) for t in text.split(",") if t.strip()]
    try:
        v = float(text)
    except ValueError:
        return text
    return int(v) if v.is_integer() and "." not in text and "e" not in text.lower() else v


def parse_kv(text: str) -> dict:
    out = {}
    for item in text.split():
        if "=" not in item:
            raise ConfigError(f"expected key=value, got {item!r}")
        k, v = item.split("=", 1)
        out[k] = _number(v)
    return out


def parse_ball(spec: str) -> DirectionalBall:
    spec = spec.strip()
    if spec.lower() in ("none", "point", ""):
        return DirectionalBall.whole()
    parts = []
    for piece in spec.split("|"):
        if ":" not in piece:
            raise ConfigError(f"ball part {piece!r} must be centre:radius")
        c, r = piece.split(":", 1)
        try:
            parts.append(((complex(c.strip().replace(" ", "")),), float(r)))
        except ValueError as exc:
            raise ConfigError(f"bad ball part {piece!r}: {exc}") from None
    try:
        return DirectionalBall(tuple(parts))
    except LelongError as exc:
        raise ConfigError(f"bad ball {spec!r}: {exc}") from None


def _floats(text: str, what: str) -> list:
    try:
        return [float(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise ConfigError(f"{what}: expected numbers, got {text!r}") from None


def _grid(sec) -> tuple:
    units = sec.get("grid.units", "weight").strip().lower()
    if "grid.values" in sec:
        g = _floats(sec["grid.values"], "grid.values")
    elif "grid" in sec:
        vals = _floats(sec["grid"], "grid")
        if len(vals) != 3:
            raise ConfigError("grid needs r_max ratio count")
        r_max, ratio, count = vals
        if not (0 < ratio < 1 and count >= 1 and r_max > 0):
            raise ConfigError("grid needs r_max > 0, 0 < ratio < 1, count >= 1")
        g = list(r_max * ratio ** np.arange(int(count)))
    else:
        return ()
    if units == "euclid":
        g = [x * x for x in g]
    elif units != "weight":
        raise ConfigError(f"grid.units must be 'weight' or 'euclid', got {units!r}")
    if any(b >= a for a, b in zip(g, g[1:])) or any(x <= 0 for x in g):
        raise ConfigError("grid must be positive and strictly decreasing")
    return tuple(float(x) for x in g)


def _scenario(name: str, sec) -> Scenario:
    checks = tuple(c.strip() for c in sec.get("checks", "").replace(",", " ").split())
    if not checks:
        raise ConfigError(f"[{name}] lists no checks")
    unknown = [c for c in checks if c not in CHECKS]
    if unknown:
        raise ConfigError(f"[{name}] unknown checks {unknown}; available: {', '.join(CHECKS)}")
    opts = {}
    if "current.split" in sec:
        opts["split"] = tuple(int(x) for x in _floats(sec["current.split"], "current.split"))
    if "current.n" in sec:
        opts["n"] = int(sec["current.n"])
    params = {k: v for k, v in sec.items() if "." in k and not k.startswith(("current.", "grid", "weight."))}
    try:
        sc = Scenario(
            name=name, checks=checks, current=sec.get("current"), current_options=opts,
            use_ddc=sec.getboolean("current.ddc", False),
            weight=sec.get("weight", "euclid"), weight_params=parse_kv(sec.get("weight.params", "")),
            ball=sec.get("ball", "none"), grid=_grid(sec), tol=float(sec.get("tol", "1e-6")),
            seed=int(sec.get("seed", "0")), params=params,
        )
    except ValueError as exc:
        raise ConfigError(f"[{name}] {exc}") from None
    validate(sc)
    return sc


def validate(sc: Scenario) -> None:
    """Resolve every name and check ranges without integrating anything."""
    where = f"[{sc.name}]"
    needs_current = [c for c in sc.checks if c not in KERNEL_ONLY]
    if needs_current and not sc.current:
        raise ConfigError(f"{where} checks {needs_current} need a current")
    if sc.tol <= 0:
        raise ConfigError(f"{where} tol must be positive")
    try:
        phi = sc.build_weight()
        if sc.current:
            T = sc.build_current()
            B = sc.build_ball()
            if T.split[1] and B.m != T.split[1]:
                raise ConfigError(f"{where} ball lives in C^{B.m}, current has m = {T.split[1]}")
            if not T.split[1] and sc.ball.strip().lower() not in ("none", "point", ""):
                raise ConfigError(f"{where} current has m = 0; use ball = none")
        if "comparison" in sc.checks:
            if "comparison.psi" not in sc.params:
                raise ConfigError(f"{where} comparison needs comparison.psi")
            psi_R = sc.build_psi().R
        if "additivity" in sc.checks:
            B2 = parse_ball(sc.params.get("additivity.balls", ""))
            if len(B2.parts) != 2:
                raise ConfigError(f"{where} additivity.balls needs exactly two parts")
    except ConfigError:
        raise
    except (LelongError, KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"{where} {exc}") from None

    points = _floats(sc.params.get("nu_at.points", ""), "nu_at.points") if "nu_at" in sc.checks else []
    if "nu_at" in sc.checks and not points:
        raise ConfigError(f"{where} nu_at needs nu_at.points")
    grid_checks = GRID_CHECKS.intersection(sc.checks)
    if grid_checks and not sc.grid:
        raise ConfigError(f"{where} checks {sorted(grid_checks)} need a grid")
    if LIMIT_CHECKS.intersection(sc.checks) and len(sc.grid) < MIN_LIMIT_POINTS:
        raise ConfigError(f"{where} limit checks need at least {MIN_LIMIT_POINTS} grid points")
    top = max([*sc.grid, *points], default=0.0)
    if top >= phi.R:
        raise ConfigError(f"{where} r_max = {top:g} is not below R({phi.name}) = {phi.R:g}")
    if "comparison" in sc.checks and top >= psi_R:
        raise ConfigError(f"{where} r_max = {top:g} is not below R(psi) = {psi_R:g}")
    if "scaling" in sc.checks and float(sc.params.get("scaling.p", "2")) < 2:
        raise ConfigError(f"{where} scaling.p must be >= 2")
    if "lelong_jensen" in sc.checks:
        r1, r2 = _floats(sc.params.get("lelong_jensen.radii", "0.04 0.25"), "lelong_jensen.radii")
        if not 0 < r1 < r2 < phi.R:
            raise ConfigError(f"{where} lelong_jensen.radii need 0 < r1 < r2 < R")


def load(path) -> list:
    """Parse and validate a config file, or every ``*.ini`` file in a directory (sorted)."""
    path = Path(path)
    if path.is_dir():
        files = sorted(path.glob("*.ini"))
        if not files:
            raise ConfigError(f"no .ini files in {path}")
        prefix = True
    elif path.is_file():
        files, prefix = [path], False
    else:
        raise ConfigError(f"config {path} not found")
    scenarios = []
    for f in files:
        cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
        try:
            cp.read(f)
        except configparser.Error as exc:
            raise ConfigError(f"{f.name}: {exc}") from None
        if not cp.sections():
            raise ConfigError(f"{f.name}: no scenario sections")
        for name in cp.sections():
            label = f"{f.stem}/{name}" if prefix else name
            scenarios.append(_scenario(label, cp[name]))
    return scenarios


def override(scenarios, *, seed: int | None = None, tol: float | None = None) -> list:
    if tol is not None and tol <= 0:
        raise ConfigError("--tol must be positive")
    return [replace(s, seed=s.seed if seed is None else seed, tol=s.tol if tol is None else tol)
            for s in scenarios]
