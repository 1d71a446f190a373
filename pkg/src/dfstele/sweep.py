"""Parameter grids, fidelity maximisation and curve-crossing search.

Parameters are addressed by dotted paths into the (input, channel, noise)
triple, e.g. ``"noise.R"`` or ``"channel.n1"``.  A comma joins paths that
move together: ``"channel.alpha1,channel.alpha2"`` sets both amplitudes to
the same value.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields, replace
import itertools
import math
import os

import numpy as np
from scipy.optimize import minimize

from .protocol import NoiseParams, fidelity
from .quad import IntegrationError
from .states import CoherentState, DFSChannel

WORKERS_ENV = "DFSTELE_WORKERS"

_INTEGER_FIELDS = {"channel.n1", "channel.n2"}
_SLOTS = {"input": 0, "channel": 1, "noise": 2}


def default_workers():
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def split_path(path):
    return [p.strip() for p in path.split(",") if p.strip()]


def _check_path(point, path):
    for part in split_path(path):
        slot, _, name = part.partition(".")
        if slot not in _SLOTS:
            raise ValueError(f"unknown parameter path {part!r}")
        obj = point[_SLOTS[slot]]
        if name not in {f.name for f in fields(obj)}:
            raise ValueError(f"{part!r} does not name a field of {type(obj).__name__}")


def assign(point, path, value):
    """Return a new (input, channel, noise) triple with ``path`` set to ``value``."""
    point = list(point)
    for part in split_path(path):
        slot, _, name = part.partition(".")
        i = _SLOTS[slot]
        if part in _INTEGER_FIELDS:
            if int(value) != value:
                raise ValueError(f"{part} takes integer values, got {value}")
            value = int(value)
        point[i] = replace(point[i], **{name: value})
    return tuple(point)


def _evaluate(point, route, cfg):
    try:
        res = fidelity(*point, route=route, cfg=cfg)
        return res.value, res.error, "ok"
    except IntegrationError as exc:
        return math.nan, math.nan, f"integration-failure: {exc}"


@dataclass(frozen=True)
class SweepSpec:
    """Cartesian grid over up to three parameter axes around a base point."""

    input: object = field(default_factory=CoherentState)
    channel: DFSChannel = field(default_factory=DFSChannel)
    noise: NoiseParams = field(default_factory=NoiseParams.ideal)
    axes: tuple = ()
    route: str = "closed-form"
    label: str = ""
    config: object = None

    def __post_init__(self):
        axes = tuple((str(p), tuple(v)) for p, v in self.axes)
        if not 1 <= len(axes) <= 3:
            raise ValueError("a sweep needs between one and three axes")
        for path, values in axes:
            _check_path(self.base, path)
            if not values:
                raise ValueError(f"axis {path!r} has no values")
        object.__setattr__(self, "axes", axes)

    @property
    def base(self):
        return (self.input, self.channel, self.noise)

    @property
    def paths(self):
        return [p for p, _ in self.axes]

    def points(self):
        """(assignment tuple, parameter triple) in lexicographic axis order."""
        for combo in itertools.product(*(v for _, v in self.axes)):
            point = self.base
            for (path, _), value in zip(self.axes, combo):
                point = assign(point, path, value)
            yield combo, point


def run_sweep(s, workers=None):
    """Evaluate every grid point of ``s``.

    Returns a list of row dicts keyed by axis path plus ``fidelity``,
    ``error``, ``route`` and ``status``.  Integration failures are recorded
    in ``status`` and do not stop the sweep.  Row order is the lexicographic
    axis order whatever the worker count.
    """
    workers = workers or default_workers()
    grid = list(s.points())

    def work(item):
        return _evaluate(item[1], s.route, s.config)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(work, grid))
    else:
        results = [work(item) for item in grid]

    rows = []
    for (combo, _), (value, err, status) in zip(grid, results):
        row = {"label": s.label}
        row.update(zip(s.paths, combo))
        row.update(fidelity=value, error=err, route=s.route, status=status)
        rows.append(row)
    return rows


@dataclass(frozen=True)
class OptSpec:
    """Box-bounded maximisation of the fidelity over continuous parameters."""

    input: object = field(default_factory=CoherentState)
    channel: DFSChannel = field(default_factory=DFSChannel)
    noise: NoiseParams = field(default_factory=NoiseParams.ideal)
    free: tuple = ()          # ((path, lo, hi), ...)
    density: int = 11
    tol: float = 1e-6
    route: str = "closed-form"
    config: object = None

    def __post_init__(self):
        free = tuple((str(p), float(lo), float(hi)) for p, lo, hi in self.free)
        if not free:
            raise ValueError("nothing to optimise: no free parameters")
        for path, lo, hi in free:
            _check_path((self.input, self.channel, self.noise), path)
            if any(part in _INTEGER_FIELDS for part in split_path(path)):
                raise ValueError(f"{path} is discrete; sweep it instead of optimising")
            if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                raise ValueError(f"bad bounds for {path}: [{lo}, {hi}]")
        if self.density < 5:
            raise ValueError("coarse grid density must be >= 5 per axis")
        object.__setattr__(self, "free", free)


def maximize_fidelity(o):
    """Coarse grid scan, then Nelder-Mead on -F from the best grid point.

    Returns
    -------
    (dict, float)
        Best parameter assignment keyed by path, and its fidelity.  The
        value is never below the coarse-grid maximum.
    """
    base = (o.input, o.channel, o.noise)
    paths = [p for p, _, _ in o.free]
    bounds = [(lo, hi) for _, lo, hi in o.free]

    def f(x):
        point = base
        for path, value in zip(paths, x):
            point = assign(point, path, float(value))
        value, _, status = _evaluate(point, o.route, o.config)
        if status != "ok":
            raise IntegrationError(status)
        return value

    axes = [np.linspace(lo, hi, o.density) for lo, hi in bounds]
    best_x, best_f = None, -math.inf
    for combo in itertools.product(*axes):
        v = f(combo)
        if v > best_f:
            best_x, best_f = np.array(combo), v

    steps = np.array([(hi - lo) / (o.density - 1) for lo, hi in bounds])
    simplex = [best_x]
    for i, step in enumerate(steps):
        vertex = best_x.copy()
        lo, hi = bounds[i]
        vertex[i] = vertex[i] + step if vertex[i] + step <= hi else vertex[i] - step
        simplex.append(vertex)
    res = minimize(
        lambda x: -f(x),
        best_x,
        method="Nelder-Mead",
        bounds=bounds,
        options={"initial_simplex": np.array(simplex), "xatol": o.tol, "fatol": 1e-14,
                 "maxiter": 2000},
    )
    if -res.fun > best_f:
        best_x, best_f = res.x, float(-res.fun)
    return dict(zip(paths, (float(v) for v in best_x))), best_f


def _single_axis(s, axis):
    if len(s.axes) != 1 or s.axes[0][0] != axis:
        raise ValueError(f"crossover curves must sweep exactly the axis {axis!r}")
    return np.asarray(s.axes[0][1], dtype=float)


def find_crossover(curve_a, curve_b, axis, xtol=1e-3):
    """Axis value where F_a - F_b changes sign, or None.

    The first sign change on the shared grid is bracketed and refined by
    bisection until the bracket is narrower than ``xtol``.
    """
    xs = _single_axis(curve_a, axis)
    if not np.array_equal(xs, _single_axis(curve_b, axis)):
        raise ValueError("both curves must share the same axis values")

    def diff(x):
        fa, _, sa = _evaluate(assign(curve_a.base, axis, float(x)), curve_a.route, curve_a.config)
        fb, _, sb = _evaluate(assign(curve_b.base, axis, float(x)), curve_b.route, curve_b.config)
        if sa != "ok" or sb != "ok":
            raise IntegrationError(sa if sa != "ok" else sb)
        d = fa - fb
        return 0.0 if abs(d) <= 1e-12 else d

    ds = [diff(x) for x in xs]
    for i in range(len(xs) - 1):
        lo, hi, dlo, dhi = xs[i], xs[i + 1], ds[i], ds[i + 1]
        if dlo == 0.0 and dhi == 0.0:
            continue
        if dlo == 0.0:
            if i > 0 and ds[i - 1] * dhi < 0:
                return float(lo)
            continue
        if dlo * dhi >= 0:
            continue
        while hi - lo > xtol:
            mid = 0.5 * (lo + hi)
            dm = diff(mid)
            if dm == 0.0:
                return float(mid)
            if dm * dlo < 0:
                hi = mid
            else:
                lo, dlo = mid, dm
        return float(0.5 * (lo + hi))
    return None
