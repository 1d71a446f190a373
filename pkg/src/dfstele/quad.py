"""Numerical integration of Gaussian-Laguerre integrands over the complex plane.

All three routes work in a whitened frame: with gamma = x + i y and
``E(x, y)`` the integrand exponent, the real quadratic part of ``E`` is
diagonalised and rescaled so that ``Re E(x0 + L z) = c0 - |z|^2``.  The
affine map (x0, L) depends on the integrand only; everything after that is
route specific.

Integrands are duck-typed: anything with ``real_form()``, ``exponent()``
and ``laguerre_factor()`` (see :class:`dfstele.protocol.IntegrandSpec`).
Returned values are integrals against d^2 gamma = dx dy, without any
fidelity prefactor.
"""

from dataclasses import dataclass
import math

import numpy as np

_EPS = np.finfo(float).eps
GH_MAX_ORDER = 320        # numpy's Hermite nodes lose finiteness near 400
_CHUNK = 1 << 18          # grid points evaluated per block


class IntegrationError(RuntimeError):
    """Raised when a route cannot reach the requested tolerance.

    ``estimate`` holds the last value computed and ``gap`` the disagreement
    that caused the failure.
    """

    def __init__(self, message, estimate=None, gap=None):
        super().__init__(message)
        self.estimate = estimate
        self.gap = gap


@dataclass(frozen=True)
class QuadConfig:
    abs_tol: float = 1e-9
    rel_tol: float = 1e-8
    max_refinements: int = 6
    gh_order: int = 64
    mc_samples: int = 1_000_000
    mc_seed: int = 20240601

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("tolerances must be positive")
        if not 2 <= self.gh_order <= GH_MAX_ORDER:
            raise ValueError(f"gh_order must lie in [2, {GH_MAX_ORDER}]")
        if self.mc_samples < 1000:
            raise ValueError("mc_samples must be >= 1000")
        if self.max_refinements < 1:
            raise ValueError("max_refinements must be >= 1")
        if not 0 <= self.mc_seed < 2**64:
            raise ValueError("mc_seed must be a 64-bit unsigned integer")

    def tolerance(self, value):
        return max(self.abs_tol, self.rel_tol * abs(value))


@dataclass(frozen=True)
class IntegralEstimate:
    """Integral value (complex; the imaginary part is kept as a diagnostic)."""

    value: complex
    error: float
    evaluations: int = 0


@dataclass(frozen=True)
class _Frame:
    x0: np.ndarray      # centre of the real Gaussian envelope, (x, y)
    L: np.ndarray       # 2x2 whitening map, (x, y) = x0 + L z
    det: float          # |det L|
    c0: float           # Re E at the centre


def whiten(f):
    """Affine frame in which the real Gaussian envelope of ``f`` is exp(c0 - |z|^2)."""
    a1, a2, a3, a4, a5 = f.real_form()
    A = np.array([[a1.real, a3.real / 2], [a3.real / 2, a2.real]])
    lam, V = np.linalg.eigh(-A)
    if lam.min() <= 0:
        raise ValueError("integrand is not integrable: real quadratic form is not negative definite")
    b = np.array([a4.real, a5.real])
    x0 = np.linalg.solve(-2.0 * A, b)
    L = V / np.sqrt(lam)
    c0 = float(np.real(f.exponent(complex(x0[0], x0[1]))))
    return _Frame(x0=x0, L=L, det=float(1.0 / math.sqrt(lam[0] * lam[1])), c0=c0)


def _values(f, frame, z1, z2, weighted=True):
    """f(x0 + L z) |det L|, times exp(w |z|^2) for a weight power w.

    ``weighted=True`` (w = 1) gives the integrand against exp(-|z|^2) dz;
    a float sets w directly.  The factor is folded into the exponent so
    large nodes cannot overflow.
    """
    x = frame.x0[0] + frame.L[0, 0] * z1 + frame.L[0, 1] * z2
    y = frame.x0[1] + frame.L[1, 0] * z1 + frame.L[1, 1] * z2
    gamma = x + 1j * y
    expo = f.exponent(gamma)
    if weighted:
        expo = expo + float(weighted) * (z1 * z1 + z2 * z2)
    return np.exp(expo) * f.laguerre_factor(gamma) * frame.det


def _laguerre_bound(f, frame, radius):
    """Upper bound of prod |L_n(s |gamma|^2)| on the disc |z| <= radius."""
    rho = np.linalg.norm(frame.x0) + np.linalg.norm(frame.L, 2) * radius
    out = 1.0
    for n, s in f.laguerre:
        out *= (1.0 + abs(s) * rho * rho) ** n
    return out


def truncation_radius(f, frame, abs_tol):
    """Half-width of the whitened box beyond which the integrand is negligible.

    Uses |L_n(t)| <= (1 + |t|)^n; the envelope times the box perimeter must
    fall below abs_tol / 100.
    """
    target = abs_tol / 100.0
    radius = 2.0
    while radius < 60.0:
        env = math.exp(frame.c0 - radius * radius) * frame.det * _laguerre_bound(f, frame, radius)
        if env * 8.0 * radius < target:
            return radius
        radius += 0.25
    return radius


def _gl_panels(n_panels, radius, order):
    nodes, weights = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(-radius, radius, n_panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    z = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    w = (half[:, None] * weights[None, :]).ravel()
    return z, w


def integrate_adaptive(f, cfg=None, *, panel_order=10, start_panels=4):
    """Nested composite Gauss-Legendre over the truncated whitened box.

    The number of panels per axis doubles each level until two successive
    levels agree within ``cfg.tolerance``.

    Raises
    ------
    IntegrationError
        If ``cfg.max_refinements`` levels do not converge.
    """
    cfg = cfg or QuadConfig()
    frame = whiten(f)
    radius = truncation_radius(f, frame, cfg.abs_tol)
    prev = None
    n_panels = start_panels
    evaluations = 0
    for _ in range(cfg.max_refinements + 1):
        z, w = _gl_panels(n_panels, radius, panel_order)
        cur, mag = _tensor_sum(f, frame, z, w, weighted=False)
        evaluations += z.size * z.size
        if prev is not None:
            gap = abs(cur - prev)
            floor = 8 * _EPS * mag
            if gap <= cfg.tolerance(cur):
                return IntegralEstimate(cur, max(gap, floor), evaluations)
        prev = cur
        n_panels *= 2
    raise IntegrationError(
        f"adaptive quadrature did not converge after {cfg.max_refinements} refinements",
        estimate=prev,
        gap=gap,
    )


def _tensor_sum(f, frame, z, w, weighted):
    """Sum of w_i w_j f(z_i, z_j) and of its magnitudes, in row blocks."""
    rows = max(1, _CHUNK // z.size)
    total, mag = 0j, 0.0
    for i in range(0, z.size, rows):
        Z1, Z2 = np.meshgrid(z[i:i + rows], z, indexing="ij")
        vals = _values(f, frame, Z1, Z2, weighted) * np.outer(w[i:i + rows], w)
        total += complex(vals.sum())
        mag += float(np.abs(vals).sum())
    return total, mag


def _gh_sum(f, frame, order):
    z, w = np.polynomial.hermite.hermgauss(order)
    return _tensor_sum(f, frame, z, w, weighted=True)


def integrate_gauss_hermite(f, cfg=None):
    """Tensor Gauss-Hermite rule in the whitened frame.

    The error estimate is the gap between orders n and n + 8; the order is
    doubled (up to ``GH_MAX_ORDER``) until that gap is within tolerance.
    """
    cfg = cfg or QuadConfig()
    frame = whiten(f)
    order = min(cfg.gh_order, GH_MAX_ORDER)
    for _ in range(cfg.max_refinements):
        lo, _ = _gh_sum(f, frame, order)
        hi, mag = _gh_sum(f, frame, order + 8)
        gap = abs(hi - lo)
        if gap <= cfg.tolerance(hi):
            return IntegralEstimate(hi, max(gap, 8 * _EPS * mag), 2 * order * order)
        if order >= GH_MAX_ORDER:
            break
        order = min(2 * order, GH_MAX_ORDER)
    raise IntegrationError(
        f"Gauss-Hermite rule did not converge up to order {order + 8}",
        estimate=hi,
        gap=gap,
    )


def integrate_monte_carlo(f, cfg=None, *, chunk=1 << 16):
    """Importance sampling from a normal law centred on the Gaussian envelope.

    The proposal is the whitened envelope widened to variance s^2 / 2 per
    axis with s^2 = 1 + D / 2, D the total Laguerre degree, so that the
    polynomial's outward shift of the mass stays covered and the sample
    variance is a reliable error estimate.  Samples are drawn in fixed-size
    chunks, each from its own child of ``SeedSequence(cfg.mc_seed)``, so the
    result depends only on the seed.  The reported error is three standard
    errors.
    """
    cfg = cfg or QuadConfig()
    frame = whiten(f)
    s2 = 1.0 + 0.5 * sum(n for n, _ in f.laguerre)
    n_chunks = -(-cfg.mc_samples // chunk)
    children = np.random.SeedSequence(cfg.mc_seed).spawn(n_chunks)
    total = 0j
    total_sq = 0.0
    remaining = cfg.mc_samples
    for child in children:
        m = min(chunk, remaining)
        remaining -= m
        rng = np.random.Generator(np.random.Philox(child))
        z = rng.standard_normal((2, m)) * math.sqrt(0.5 * s2)
        g = _values(f, frame, z[0], z[1], weighted=1.0 / s2) * (math.pi * s2)
        total += g.sum()
        total_sq += float(np.sum(g.real**2 + g.imag**2))
    n = cfg.mc_samples
    mean = total / n
    var = max(total_sq / n - abs(mean) ** 2, 0.0)
    return IntegralEstimate(complex(mean), 3.0 * math.sqrt(var / n), n)
