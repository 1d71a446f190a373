"""Command-line front end.

    dfstele fidelity --input coherent --alpha 1+0i --n1 0 --n2 0 --ideal
    dfstele sweep --input squeezed --axis input.r=0:2:101 --R 0.8 --tau 0.02
    dfstele figure --id fig5 -o fig5.csv
    dfstele optimize --free noise.R=0:1 --alpha1 1 --alpha2 1 --R 0.8 --tau 0.8
    dfstele validate --n1 1 --n2 1

Settings can also come from a flat ``key = value`` file (``--config``);
flags override file values.  Output is CSV preceded by a ``#`` preamble
recording the full configuration.  Exit codes: 0 success, 2 configuration
error, 3 I/O error, 4 integration failure.
"""

import argparse
from dataclasses import dataclass, field
import io
import itertools
import math
import re
import sys

import numpy as np

from . import __version__
from .protocol import ROUTES, NoiseParams, fidelity
from .quad import IntegrationError, QuadConfig
from .states import CoherentState, DFSChannel, SqueezedState
from .sweep import OptSpec, SweepSpec, assign, maximize_fidelity, run_sweep

COMMANDS = ("fidelity", "sweep", "figure", "optimize", "validate")

PHYSICAL_KEYS = ("input", "alpha", "r", "phi", "alpha1", "alpha2", "n1", "n2", "g", "R", "tau", "n_th")
QUAD_KEYS = {
    "abs_tol": float,
    "rel_tol": float,
    "max_refinements": int,
    "gh_order": int,
    "mc_samples": int,
}
OPTION_KEYS = ("ideal", "route", "seed", "output", "workers", "axis", "free", "id",
               "density", "tol", "points", "surface_points")
LIST_KEYS = ("axis", "free")
KNOWN_KEYS = ("command",) + PHYSICAL_KEYS + tuple(QUAD_KEYS) + OPTION_KEYS

EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_INTEGRATION = 0, 2, 3, 4

CURVE_POINTS = 101
SURFACE_POINTS = 41


class ConfigError(ValueError):
    """Invalid command-line or config-file setting."""


def parse_complex(text):
    """Parse ``a+bi`` style complex literals (``i`` or ``j`` as imaginary unit)."""
    s = str(text).strip().replace(" ", "").replace("j", "i").replace("I", "i")
    if not s:
        raise ValueError("empty complex literal")
    s = re.sub(r"(^|[+-])i", r"\g<1>1i", s)
    return complex(s.replace("i", "j"))


def format_complex(z):
    z = complex(z)
    return f"{z.real:.12g}{z.imag:+.12g}i"


def _format_value(v):
    if isinstance(v, (complex, np.complexfloating)):
        return format_complex(v)
    if isinstance(v, (float, np.floating)):
        return f"{v:.12g}"
    return str(v)


@dataclass
class RunConfig:
    command: str
    params: dict = field(default_factory=dict)      # physical parameters, parsed
    output: str = "-"
    route: str = "closed-form"
    quad: dict = field(default_factory=dict)        # QuadConfig overrides
    seed: int = None
    options: dict = field(default_factory=dict)     # command-specific settings

    def quad_config(self):
        kw = dict(self.quad)
        if self.seed is not None:
            kw["mc_seed"] = self.seed
        return QuadConfig(**kw)

    def point(self):
        return build_point(self.params)

    def items(self):
        """Flat (key, text) pairs, the inverse of parsing."""
        out = [("command", self.command)]
        for k in PHYSICAL_KEYS:
            if k in self.params:
                out.append((k, _format_value(self.params[k])))
        out.append(("route", self.route))
        for k in QUAD_KEYS:
            if k in self.quad:
                out.append((k, _format_value(self.quad[k])))
        if self.seed is not None:
            out.append(("seed", str(self.seed)))
        out.append(("output", self.output))
        for k in OPTION_KEYS:
            if k in self.options:
                v = self.options[k]
                if k in LIST_KEYS:
                    out.extend((k, item) for item in v)
                else:
                    out.append((k, _format_value(v)))
        return out


def read_config_text(text, source="config"):
    """Parse flat ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        if key not in KNOWN_KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in LIST_KEYS:
            values.setdefault(key, []).append(value)
        else:
            values[key] = value
    return values


def preamble_to_config_text(text):
    """Recover config-file text from a CSV metadata preamble."""
    lines = []
    for raw in text.splitlines():
        if not raw.startswith("#"):
            break
        body = raw[1:].strip()
        if "=" in body:
            lines.append(body)
    return "\n".join(lines)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _argparser():
    p = _Parser(prog="dfstele", description=__doc__.split("\n\n")[0],
                argument_default=argparse.SUPPRESS)
    p.add_argument("command", nargs="?", choices=COMMANDS, default=None)
    p.add_argument("--config", help="flat key = value settings file")
    p.add_argument("--input", choices=("coherent", "squeezed"))
    for key in ("alpha", "alpha1", "alpha2"):
        p.add_argument(f"--{key}", help="complex, written a+bi")
    for key in ("r", "phi", "g", "R", "tau"):
        p.add_argument(f"--{key}")
    p.add_argument("--n-th", "--n_th", dest="n_th")
    p.add_argument("--n1")
    p.add_argument("--n2")
    p.add_argument("--ideal", action="store_const", const="true",
                   help="ideal protocol: g=1, R=0, tau=0, n_th=0")
    p.add_argument("--route", choices=ROUTES)
    for key in QUAD_KEYS:
        p.add_argument(f"--{key.replace('_', '-')}", dest=key)
    p.add_argument("--seed", help="Monte Carlo seed")
    p.add_argument("-o", "--output", help="output CSV path, '-' for stdout")
    p.add_argument("--workers", help="sweep worker threads (default $DFSTELE_WORKERS or 1)")
    p.add_argument("--axis", action="append", help="PATH=start:stop:num or PATH=v1,v2,...")
    p.add_argument("--free", action="append", help="PATH=lo:hi (optimize)")
    p.add_argument("--id", help="figure id, e.g. fig5")
    p.add_argument("--density", help="coarse grid points per free axis (optimize)")
    p.add_argument("--tol", help="simplex diameter tolerance (optimize)")
    p.add_argument("--points", help="points per continuous figure axis")
    p.add_argument("--surface-points", dest="surface_points", help="points per surface axis")
    return p


def _parse_real(key, text):
    try:
        v = float(text)
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: expected a real number, got {text!r}") from None
    if not math.isfinite(v):
        raise ConfigError(f"{key}: must be finite, got {text!r}")
    return v


def _parse_int(key, text):
    try:
        v = float(text)
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: expected an integer, got {text!r}") from None
    if v != int(v):
        raise ConfigError(f"{key}: expected an integer, got {text!r}")
    return int(v)


def build_point(params):
    """(input, channel, noise) from parsed physical parameters."""
    kind = params.get("input", "coherent")
    if kind == "coherent":
        inp = CoherentState(params.get("alpha", 0j))
    else:
        inp = SqueezedState(params.get("r", 0.0), params.get("phi", 0.0))
    ch = DFSChannel(params.get("alpha1", 0j), params.get("alpha2", 0j),
                    params.get("n1", 0), params.get("n2", 0))
    noise = NoiseParams(g=params.get("g", 1.0), R=params.get("R", 0.0),
                        tau=params.get("tau", 0.0), n_th=params.get("n_th", 0.0))
    return inp, ch, noise


def _validate_physical(raw):
    params = {}
    for key in PHYSICAL_KEYS:
        if key not in raw:
            continue
        text = raw[key]
        if key == "input":
            if text not in ("coherent", "squeezed"):
                raise ConfigError(f"input: expected 'coherent' or 'squeezed', got {text!r}")
            params[key] = text
        elif key in ("alpha", "alpha1", "alpha2"):
            try:
                params[key] = parse_complex(text)
            except ValueError:
                raise ConfigError(f"{key}: expected a complex number a+bi, got {text!r}") from None
        elif key in ("n1", "n2"):
            params[key] = _parse_int(key, text)
        else:
            params[key] = _parse_real(key, text)

    kind = params.get("input", "coherent")
    if kind == "coherent" and ("r" in params or "phi" in params):
        raise ConfigError("r/phi: only valid with --input squeezed")
    if kind == "squeezed" and "alpha" in params:
        raise ConfigError("alpha: only valid with --input coherent")
    checks = [
        ("R", lambda v: 0.0 <= v <= 1.0, "R must lie in [0,1]"),
        ("r", lambda v: v >= 0, "r must be >= 0"),
        ("g", lambda v: v >= 0, "g must be >= 0"),
        ("tau", lambda v: v >= 0, "tau must be >= 0"),
        ("n_th", lambda v: v >= 0, "n_th must be >= 0"),
        ("n1", lambda v: v >= 0, "n1 must be a non-negative integer"),
        ("n2", lambda v: v >= 0, "n2 must be a non-negative integer"),
    ]
    for key, ok, msg in checks:
        if key in params and not ok(params[key]):
            raise ConfigError(f"{msg}, got {key}={raw[key]}")
    if raw.get("ideal", "false").lower() in ("1", "true", "yes"):
        clash = [k for k in ("g", "R", "tau", "n_th") if k in params]
        if clash:
            raise ConfigError(f"ideal: conflicts with {', '.join(clash)}")
    return params


def _parse_axis_values(key, spec):
    spec = spec.strip()
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise ConfigError(f"{key}: range must be start:stop:num, got {spec!r}")
        start, stop = _parse_real(key, parts[0]), _parse_real(key, parts[1])
        num = _parse_int(key, parts[2])
        if num < 1:
            raise ConfigError(f"{key}: need at least one point")
        return tuple(float(v) for v in np.linspace(start, stop, num))
    vals = []
    for item in spec.split(";" if ";" in spec else ","):
        try:
            z = parse_complex(item)
        except ValueError:
            raise ConfigError(f"{key}: bad value {item!r}") from None
        vals.append(z.real if z.imag == 0 else z)
    return tuple(vals)


def parse_axis(text):
    """``PATH=SPEC`` into (path, values)."""
    path, sep, spec = text.partition("=")
    if not sep or not path.strip():
        raise ConfigError(f"axis: expected PATH=values, got {text!r}")
    return path.strip(), _parse_axis_values(f"axis {path.strip()}", spec)


def parse_free(text):
    path, sep, spec = text.partition("=")
    parts = spec.split(":")
    if not sep or len(parts) != 2:
        raise ConfigError(f"free: expected PATH=lo:hi, got {text!r}")
    return path.strip(), _parse_real("free", parts[0]), _parse_real("free", parts[1])


def parse_config(argv, config_text=None):
    """Build a validated :class:`RunConfig` from argv and optional config text.

    Flags override file values.  Raises :class:`ConfigError` naming the
    offending key on any problem.
    """
    ns = vars(_argparser().parse_args(list(argv)))
    raw = {}
    if "config" in ns:
        path = ns.pop("config")
        try:
            with open(path, encoding="utf-8") as fh:
                raw.update(read_config_text(fh.read(), source=path))
        except OSError as exc:
            raise ConfigError(f"config: cannot read {path}: {exc.strerror}") from None
    if config_text is not None:
        raw.update(read_config_text(config_text))
    for key, value in ns.items():
        if value is not None:
            raw[key] = value

    command = raw.pop("command", None)
    if command not in COMMANDS:
        raise ConfigError(f"command: expected one of {', '.join(COMMANDS)}, got {command!r}")

    params = _validate_physical(raw)
    route = raw.get("route", "closed-form")
    if route not in ROUTES:
        raise ConfigError(f"route: expected one of {', '.join(ROUTES)}, got {route!r}")

    quad = {}
    for key, kind in QUAD_KEYS.items():
        if key in raw:
            quad[key] = _parse_int(key, raw[key]) if kind is int else _parse_real(key, raw[key])
    seed = _parse_int("seed", raw["seed"]) if "seed" in raw else None
    cfg = RunConfig(command=command, params=params, output=raw.get("output", "-"),
                    route=route, quad=quad, seed=seed)
    try:
        cfg.quad_config()
    except ValueError as exc:
        raise ConfigError(f"quadrature settings: {exc}") from None

    opts = {}
    if raw.get("ideal", "false").lower() in ("1", "true", "yes"):
        opts["ideal"] = "true"
    for key in ("axis", "free"):
        if key in raw:
            items = raw[key] if isinstance(raw[key], list) else [raw[key]]
            opts[key] = list(items)
    for item in opts.get("axis", []):
        parse_axis(item)
    for item in opts.get("free", []):
        parse_free(item)
    for key in ("workers", "density", "points", "surface_points"):
        if key in raw:
            v = _parse_int(key, raw[key])
            if v < 1:
                raise ConfigError(f"{key}: must be >= 1, got {raw[key]}")
            opts[key] = v
    if "tol" in raw:
        opts["tol"] = _parse_real("tol", raw["tol"])
        if opts["tol"] <= 0:
            raise ConfigError("tol: must be > 0")
    if "id" in raw:
        if raw["id"] not in FIGURES:
            raise ConfigError(f"id: unknown figure {raw['id']!r}; valid ids: {', '.join(FIGURES)}")
        opts["id"] = raw["id"]
    cfg.options = opts

    if command == "sweep" and not opts.get("axis"):
        raise ConfigError("axis: sweep needs at least one --axis")
    if command == "optimize" and not opts.get("free"):
        raise ConfigError("free: optimize needs at least one --free")
    if command == "figure" and "id" not in opts:
        raise ConfigError(f"id: figure needs --id (one of {', '.join(FIGURES)})")
    try:
        cfg.point()
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return cfg


# ---------------------------------------------------------------- figures

_N_CASES = ((0, 0), (1, 1), (5, 5), (3, 7))
_PANELS = ((0.0, 0.0), (0.0, 0.5), (1.0, 0.0))
_TAUS = (0.02, 0.8)
_PHIS = (0.0, math.pi)
_R_FIG = 0.8


def _lossy(tau, **kw):
    base = dict(g=1.0, R=_R_FIG, tau=tau, n_th=0.0)
    base.update(kw)
    return NoiseParams(**base)


def _surface_axes(n):
    grid = tuple(float(v) for v in np.linspace(-3.0, 3.0, n))
    return (("channel.alpha1", grid), ("channel.alpha2", grid))


def _fig2(points, surface):
    axis = (("channel.alpha1,channel.alpha2", tuple(np.linspace(-3.0, 3.0, points))),)
    return [SweepSpec(CoherentState(), DFSChannel(0, 0, n1, n2), NoiseParams.ideal(), axis,
                      label=f"n1={n1} n2={n2}") for n1, n2 in _N_CASES]


def _fig3(points, surface):
    axis = (("input.r", tuple(np.linspace(0.0, 2.0, points))),)
    return [SweepSpec(SqueezedState(0.0, phi), DFSChannel(a1, a2, n1, n2), NoiseParams.ideal(),
                      axis, label=f"alpha1={a1:g} alpha2={a2:g} phi={phi:.4g} n1={n1} n2={n2}")
            for phi in _PHIS for a1, a2 in _PANELS for n1, n2 in _N_CASES]


def _fig4(points, surface):
    return [SweepSpec(SqueezedState(r, phi), DFSChannel(), NoiseParams.ideal(),
                      _surface_axes(surface), label=f"r={r:g} phi={phi:.4g}")
            for phi in _PHIS for r in (0.0, 1.0, 2.0)]


def _fig5(points, surface):
    axis = (("input.alpha", tuple(np.linspace(0.0, 6.0, points))),)
    return [SweepSpec(CoherentState(), DFSChannel(a1, a2, n1, n2), _lossy(tau), axis,
                      label=f"alpha1={a1:g} alpha2={a2:g} tau={tau:g} n1={n1} n2={n2}")
            for a1, a2 in _PANELS for tau in _TAUS for n1, n2 in _N_CASES]


def _fig6(points, surface):
    return [SweepSpec(CoherentState(alpha), DFSChannel(), _lossy(tau), _surface_axes(surface),
                      label=f"alpha={alpha:g} tau={tau:g}")
            for alpha in (0.0, 2.0, 4.0) for tau in _TAUS]


def _realistic_axes(points, include_phi=False):
    axes = [
        ("noise.R", np.linspace(0.0, 1.0, points)),
        ("noise.tau", np.linspace(0.0, 3.0, points)),
        ("noise.n_th", np.linspace(0.0, 10.0, points)),
        ("noise.g", np.linspace(0.0, 2.0, points)),
    ]
    if include_phi:
        axes.append(("input.phi", np.linspace(0.0, 2 * math.pi, points, endpoint=False)))
    return [(path, tuple(float(v) for v in vals)) for path, vals in axes]


def _fig6_1(points, surface):
    return [SweepSpec(CoherentState(0.0), DFSChannel(1.0, 1.0), _lossy(0.8), (axis,),
                      label=f"vs {axis[0]}") for axis in _realistic_axes(points)]


def _fig7(points, surface):
    axis = (("input.r", tuple(np.linspace(0.0, 2.0, points))),)
    return [SweepSpec(SqueezedState(0.0, phi), DFSChannel(a1, a2), _lossy(tau), axis,
                      label=f"alpha1={a1:g} alpha2={a2:g} phi={phi:.4g} tau={tau:g}")
            for phi in _PHIS for a1, a2 in _PANELS for tau in _TAUS]


def _fig8(points, surface):
    return [SweepSpec(SqueezedState(r, phi), DFSChannel(), _lossy(tau), _surface_axes(surface),
                      label=f"r={r:g} phi={phi:.4g} tau={tau:g}")
            for phi in _PHIS for r in (0.0, 1.0, 2.0) for tau in _TAUS]


def _fig8_1(points, surface):
    specs = [SweepSpec(SqueezedState(0.0, 0.0), DFSChannel(1.0, 1.0), _lossy(0.8), (axis,),
                       label=f"vs {axis[0]}") for axis in _realistic_axes(points, include_phi=True)]
    r_axis = (("noise.R", tuple(float(v) for v in np.linspace(0.0, 1.0, points))),)
    specs += [SweepSpec(SqueezedState(0.0, 0.0), DFSChannel(1.0, 1.0), _lossy(0.8, n_th=nth),
                        r_axis, label=f"vs noise.R n_th={nth:g}")
              for nth in (0.0, 2.0, 4.0, 6.0, 8.0, 10.0)]
    return specs


FIGURES = {
    "fig2": _fig2,
    "fig3": _fig3,
    "fig4": _fig4,
    "fig5": _fig5,
    "fig6": _fig6,
    "fig6_1": _fig6_1,
    "fig7": _fig7,
    "fig8": _fig8,
    "fig8_1": _fig8_1,
}


def figure_recipe(fig_id, points=CURVE_POINTS, surface_points=SURFACE_POINTS):
    """Sweep specifications reproducing the named figure's grids."""
    try:
        make = FIGURES[fig_id]
    except KeyError:
        raise ValueError(f"unknown figure {fig_id!r}; valid ids: {', '.join(FIGURES)}") from None
    return make(points, surface_points)


# ----------------------------------------------------------------- output

def format_preamble(config=None, extra=()):
    lines = [f"# engine: dfstele {__version__}"]
    if config is not None:
        lines += [f"# {k} = {v}" for k, v in config.items()]
    lines += [f"# {k}: {v}" for k, v in extra]
    return "\n".join(lines) + "\n"


def emit_table(rows, columns, path="-", config=None, extra=(), blocks=None):
    """Write ``rows`` as CSV with a ``#`` metadata preamble.

    Floats get 12 significant digits, complex numbers ``a+bi``.  With
    ``blocks`` (a list of (label, rows)), each block is introduced by a
    ``# curve: label`` line.

    Raises
    ------
    OSError
        If ``path`` cannot be written.
    """
    buf = io.StringIO()
    buf.write(format_preamble(config, extra))
    buf.write(",".join(columns) + "\n")
    groups = blocks if blocks is not None else [(None, rows)]
    for label, group in groups:
        if label is not None:
            buf.write(f"# curve: {label}\n")
        for row in group:
            buf.write(",".join(_csv_cell(row.get(c, "")) for c in columns) + "\n")
    text = buf.getvalue()
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _csv_cell(v):
    s = _format_value(v)
    return f'"{s}"' if ("," in s or '"' in s) else s


# ----------------------------------------------------------------- commands

_POINT_COLUMNS = ["input", "alpha", "r", "phi", "alpha1", "alpha2", "n1", "n2", "g", "R", "tau", "n_th"]


def _point_row(point):
    inp, ch, noise = point
    row = {"input": "coherent" if isinstance(inp, CoherentState) else "squeezed"}
    if isinstance(inp, CoherentState):
        row["alpha"] = inp.alpha
    else:
        row.update(r=inp.r, phi=inp.phi)
    row.update(alpha1=ch.alpha1, alpha2=ch.alpha2, n1=ch.n1, n2=ch.n2,
               g=noise.g, R=noise.R, tau=noise.tau, n_th=noise.n_th)
    return row


def _cmd_fidelity(cfg):
    point = cfg.point()
    res = fidelity(*point, route=cfg.route, cfg=cfg.quad_config())
    row = _point_row(point)
    row.update(fidelity=res.value, error=res.error, route=res.route)
    emit_table([row], _POINT_COLUMNS + ["fidelity", "error", "route"], cfg.output, cfg)
    return EXIT_OK


def _cmd_sweep(cfg):
    inp, ch, noise = cfg.point()
    axes = tuple(parse_axis(a) for a in cfg.options["axis"])
    try:
        spec = SweepSpec(inp, ch, noise, axes, route=cfg.route, config=cfg.quad_config())
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"axis: {exc}") from None
    rows = run_sweep(spec, cfg.options.get("workers"))
    _warn_failures(rows)
    emit_table(rows, spec.paths + ["fidelity", "error", "route", "status"], cfg.output, cfg)
    return EXIT_OK


def _cmd_figure(cfg):
    points = cfg.options.get("points", CURVE_POINTS)
    surface = cfg.options.get("surface_points", SURFACE_POINTS)
    specs = figure_recipe(cfg.options["id"], points, surface)
    blocks, columns = [], []
    for spec in specs:
        spec = SweepSpec(spec.input, spec.channel, spec.noise, spec.axes, route=cfg.route,
                         label=spec.label, config=cfg.quad_config())
        rows = run_sweep(spec, cfg.options.get("workers"))
        _warn_failures(rows)
        blocks.append((spec.label, rows))
        columns += [p for p in spec.paths if p not in columns]
    extra = [("figure", cfg.options["id"]), ("curve_points", points), ("surface_points", surface)]
    emit_table(None, ["label"] + columns + ["fidelity", "error", "route", "status"],
               cfg.output, cfg, extra=extra, blocks=blocks)
    return EXIT_OK


def _cmd_optimize(cfg):
    inp, ch, noise = cfg.point()
    free = tuple(parse_free(f) for f in cfg.options["free"])
    try:
        spec = OptSpec(inp, ch, noise, free, density=cfg.options.get("density", 11),
                       tol=cfg.options.get("tol", 1e-6), route=cfg.route, config=cfg.quad_config())
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"free: {exc}") from None
    argmax, value = maximize_fidelity(spec)
    row = dict(argmax)
    row.update(fidelity=value, route=cfg.route)
    emit_table([row], list(argmax) + ["fidelity", "route"], cfg.output, cfg)
    return EXIT_OK


def _cmd_validate(cfg):
    base = cfg.point()
    qc = cfg.quad_config()
    axes = [parse_axis(a) for a in cfg.options.get("axis", [])]
    points = [((), base)]
    if axes:
        points = []
        for combo in itertools.product(*(v for _, v in axes)):
            pt = base
            for (path, _), value in zip(axes, combo):
                try:
                    pt = assign(pt, path, value)
                except (ValueError, TypeError) as exc:
                    raise ConfigError(f"axis: {exc}") from None
            points.append((combo, pt))
    rows = []
    for combo, pt in points:
        row = _point_row(pt)
        vals = {}
        for route in ROUTES:
            res = fidelity(*pt, route=route, cfg=qc)
            row[route] = vals[route] = res.value
            row[f"{route}_error"] = res.error
        row["max_pairwise_gap"] = max(abs(a - b) for a, b in itertools.combinations(vals.values(), 2))
        rows.append(row)
    columns = _POINT_COLUMNS + [c for r in ROUTES for c in (r, f"{r}_error")] + ["max_pairwise_gap"]
    emit_table(rows, columns, cfg.output, cfg)
    return EXIT_OK


def _warn_failures(rows):
    bad = sum(1 for r in rows if r["status"] != "ok")
    if bad:
        print(f"dfstele: warning: {bad} grid point(s) failed to integrate", file=sys.stderr)


_HANDLERS = {
    "fidelity": _cmd_fidelity,
    "sweep": _cmd_sweep,
    "figure": _cmd_figure,
    "optimize": _cmd_optimize,
    "validate": _cmd_validate,
}


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_config(argv)
        return _HANDLERS[cfg.command](cfg)
    except ConfigError as exc:
        print(f"dfstele: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"dfstele: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except IntegrationError as exc:
        print(f"dfstele: integration failure: {exc}", file=sys.stderr)
        return EXIT_INTEGRATION


if __name__ == "__main__":
    sys.exit(main())
