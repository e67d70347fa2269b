"""Run configuration: plain-text `key = value` files and initial data.

The format is deliberately line oriented with `#` comments, a fixed key
set, and hard validation errors carrying line numbers, so that a config
is bit-exactly documented by `dispflow run --help`.  Initial conditions
are named curves/fields with their own `name k=v ...` parameter lists;
every random choice is drawn from a seeded generator and is independent
of the grid size, so refinement studies sample one underlying function.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .geometry import renormalize
from .grid import SCHEMES, DiscreteCurve

MODES = ("geometric", "complex", "compare-frame", "check-identities", "convergence")
CURVE_ICS = ("great_circle", "perturbed_great_circle", "random_smooth")
COMPLEX_ICS = ("plane_wave", "gaussian", "sech")

_INT_KEYS = {"N", "seed", "sample_every"}
_FLOAT_KEYS = {"a", "b", "K", "dt", "cfl_safety", "t_end"}
_STR_KEYS = {"mode", "scheme", "output_dir", "ic"}
_ALL_KEYS = _INT_KEYS | _FLOAT_KEYS | _STR_KEYS
_REQUIRED = ("mode", "N", "t_end")


class ConfigError(ValueError):
    """Invalid configuration text; `line` is 1-based when applicable."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        prefix = "line %d: " % line if line is not None else ""
        super().__init__(prefix + message)


@dataclass
class RunConfig:
    mode: str
    n: int
    t_end: float
    a: float = 0.0
    b: float = 0.0
    K: float = 1.0
    dt: Optional[float] = None
    cfl_safety: float = 0.5
    scheme: str = "spectral"
    ic_name: str = ""
    ic_params: dict = field(default_factory=dict)
    seed: int = 0
    output_dir: str = "."
    sample_every: int = 100

    def validate(self):
        if self.mode not in MODES:
            raise ConfigError("unknown mode %r (want one of %s)" % (self.mode, (MODES,)))
        if self.n < 8 or self.n > 4096 or self.n & (self.n - 1):
            raise ConfigError("N must be a power of two between 8 and 4096, got %d" % self.n)
        if not np.isfinite(self.t_end) or self.t_end < 0.0:
            raise ConfigError("t_end must be finite and >= 0")
        for name in ("a", "b", "K", "cfl_safety"):
            if not np.isfinite(getattr(self, name)):
                raise ConfigError("%s must be finite" % name)
        if self.dt is not None and (not np.isfinite(self.dt) or self.dt <= 0.0):
            raise ConfigError("dt must be finite and positive")
        if not (0.0 < self.cfl_safety <= 1.0):
            raise ConfigError("cfl_safety must lie in (0, 1]")
        if self.scheme not in SCHEMES:
            raise ConfigError("unknown scheme %r" % self.scheme)
        if self.sample_every < 1:
            raise ConfigError("sample_every must be >= 1")
        if self.mode in ("geometric", "compare-frame", "convergence") and self.K <= 0.0:
            raise ConfigError("geometric target needs K > 0")
        if not self.ic_name:
            self.ic_name = "plane_wave" if self.mode == "complex" else "great_circle"
        wanted = COMPLEX_ICS if self.mode == "complex" else CURVE_ICS
        if self.mode != "check-identities" and self.ic_name not in wanted:
            raise ConfigError(
                "initial condition %r not usable in mode %s (want one of %s)"
                % (self.ic_name, self.mode, (wanted,))
            )
        _validate_ic_params(self.ic_name, self.ic_params, self.n)
        return self


def _parse_scalar(key: str, raw: str, line: int):
    try:
        if key in _INT_KEYS:
            return int(raw)
        return float(raw)
    except ValueError:
        kind = "integer" if key in _INT_KEYS else "number"
        raise ConfigError("cannot parse %s value %r for key %r" % (kind, raw, key), line)


def parse_config(text: str) -> RunConfig:
    """Parse and fully validate config text; raises ConfigError otherwise."""
    seen = {}
    values = {}
    ic_name, ic_params = "", {}
    for lineno, rawline in enumerate(text.splitlines(), start=1):
        stripped = rawline.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError("expected `key = value`, got %r" % stripped, lineno)
        key, raw = (part.strip() for part in stripped.split("=", 1))
        if key not in _ALL_KEYS:
            raise ConfigError("unknown key %r" % key, lineno)
        if key in seen:
            raise ConfigError("duplicate key %r (first on line %d)" % (key, seen[key]), lineno)
        seen[key] = lineno
        if key == "ic":
            ic_name, ic_params = _parse_ic_value(raw, lineno)
        elif key in _STR_KEYS:
            values[key] = raw
        else:
            values[key] = _parse_scalar(key, raw, lineno)
    missing = [k for k in _REQUIRED if k not in seen]
    if missing:
        raise ConfigError("missing required keys: %s" % ", ".join(missing))
    cfg = RunConfig(
        mode=values.get("mode", ""),
        n=values["N"],
        t_end=values["t_end"],
        a=values.get("a", 0.0),
        b=values.get("b", 0.0),
        K=values.get("K", 1.0),
        dt=values.get("dt"),
        cfl_safety=values.get("cfl_safety", 0.5),
        scheme=values.get("scheme", "spectral"),
        ic_name=ic_name,
        ic_params=ic_params,
        seed=values.get("seed", 0),
        output_dir=values.get("output_dir", "."),
        sample_every=values.get("sample_every", 100),
    )
    return cfg.validate()


def _parse_ic_value(raw: str, lineno: int):
    parts = raw.split()
    if not parts:
        raise ConfigError("empty ic specification", lineno)
    name, params = parts[0], {}
    for tok in parts[1:]:
        if "=" not in tok:
            raise ConfigError("ic parameter %r is not k=v" % tok, lineno)
        k, v = tok.split("=", 1)
        try:
            params[k] = int(v) if k == "mode_k" else float(v)
        except ValueError:
            raise ConfigError("cannot parse ic parameter %r" % tok, lineno)
    return name, params


_IC_DEFAULTS = {
    "great_circle": {"eps": 0.0, "mode_k": 2},
    "perturbed_great_circle": {"eps": 0.05, "mode_k": 3},
    "random_smooth": {"decay": 0.7},
    "plane_wave": {"amp": 0.5, "k": 1.0},
    "gaussian": {"amp": 1.0, "width": 0.1},
    "sech": {"amp": 1.0, "width": 0.1},
}


def _validate_ic_params(name: str, params: dict, n: int):
    if name not in _IC_DEFAULTS:
        raise ConfigError("unknown initial condition %r" % name)
    unknown = set(params) - set(_IC_DEFAULTS[name])
    if unknown:
        raise ConfigError("ic %r does not take parameters %s" % (name, sorted(unknown)))
    full = {**_IC_DEFAULTS[name], **params}
    if name in ("great_circle", "perturbed_great_circle"):
        if not (0.0 <= full["eps"] < 1.0):
            raise ConfigError("eps must lie in [0, 1), got %g" % full["eps"])
        if not (1 <= full["mode_k"] <= n // 2 - 1):
            raise ConfigError("mode_k must lie in [1, N/2-1], got %s" % full["mode_k"])
    if name == "random_smooth" and full["decay"] <= 0.0:
        raise ConfigError("decay must be positive")
    if name in ("gaussian", "sech") and full["width"] <= 0.0:
        raise ConfigError("width must be positive")
    return full


def make_initial(name: str, params: dict, n: int, radius: float = 1.0,
                 seed: int = 0):
    """Build the named initial condition on an N-point grid.

    Curve names return a DiscreteCurve (pointwise renormalized, so the
    sphere constraint holds exactly); field names return a complex array.
    """
    full = _validate_ic_params(name, params, n)
    x = np.arange(n) / n
    if name == "great_circle":
        # in-plane reparametrized equator; eps = 0 is the plain circle.
        # The image is exactly the equator, so the closed-curve transport
        # defect vanishes and the frame field is exactly periodic.
        phi = 2.0 * np.pi * (x + full["eps"] * np.sin(2.0 * np.pi * full["mode_k"] * x))
        pts = radius * np.stack([np.cos(phi), np.sin(phi), np.zeros(n)], axis=1)
        return DiscreteCurve(pts, radius)
    if name == "perturbed_great_circle":
        pts = np.stack([
            np.cos(2.0 * np.pi * x),
            np.sin(2.0 * np.pi * x),
            full["eps"] * np.sin(2.0 * np.pi * full["mode_k"] * x),
        ], axis=1)
        return DiscreteCurve(renormalize(pts, radius), radius)
    if name == "random_smooth":
        # fixed 8-mode band so the same seed gives the same smooth map on
        # every grid; amplitude tapers as exp(-decay*m)
        rng = np.random.default_rng(seed)
        pts = np.stack([np.cos(2.0 * np.pi * x),
                        np.sin(2.0 * np.pi * x),
                        np.zeros(n)], axis=1)
        for m in range(1, 9):
            amp = 0.25 * np.exp(-full["decay"] * m)
            coeff_c = rng.standard_normal(3)
            coeff_s = rng.standard_normal(3)
            pts += amp * (np.cos(2.0 * np.pi * m * x)[:, None] * coeff_c
                          + np.sin(2.0 * np.pi * m * x)[:, None] * coeff_s)
        return DiscreteCurve(renormalize(pts, radius), radius)
    if name == "plane_wave":
        return full["amp"] * np.exp(2j * np.pi * full["k"] * x)
    if name == "gaussian":
        return (full["amp"] * np.exp(-0.5 * ((x - 0.5) / full["width"]) ** 2)
                ).astype(complex)
    if name == "sech":
        return (full["amp"] / np.cosh((x - 0.5) / full["width"])).astype(complex)
    raise ConfigError("unknown initial condition %r" % name)


def serialize_config(cfg: RunConfig) -> str:
    """Canonical text form; parse(serialize(parse(text))) is idempotent."""
    lines = [
        "mode = %s" % cfg.mode,
        "N = %d" % cfg.n,
        "t_end = %.17g" % cfg.t_end,
        "a = %.17g" % cfg.a,
        "b = %.17g" % cfg.b,
        "K = %.17g" % cfg.K,
    ]
    if cfg.dt is not None:
        lines.append("dt = %.17g" % cfg.dt)
    lines.append("cfl_safety = %.17g" % cfg.cfl_safety)
    lines.append("scheme = %s" % cfg.scheme)
    ic = cfg.ic_name
    for k in sorted(cfg.ic_params):
        v = cfg.ic_params[k]
        ic += " %s=%s" % (k, ("%d" % v) if isinstance(v, int) else "%.17g" % v)
    lines.append("ic = %s" % ic)
    lines.append("seed = %d" % cfg.seed)
    lines.append("output_dir = %s" % cfg.output_dir)
    lines.append("sample_every = %d" % cfg.sample_every)
    return "\n".join(lines) + "\n"
