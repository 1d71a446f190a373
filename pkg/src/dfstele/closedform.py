"""Exact evaluation of Gaussian integrals carrying two Laguerre factors.

    I = Int dx dy exp(a1 x^2 + a2 y^2 + a3 xy + a4 x + a5 y) L_m[a(x^2+y^2)] L_n[b(x^2+y^2)]

Both Laguerre polynomials are expanded in powers of x^2 + y^2, the powers
binomially split into x^{2r} y^{2k}, and each monomial integrated against
the Gaussian after the substitution

    x = sigma_x z1 + mu_x,   y = sigma_y (rho z1 + sqrt(1 - rho^2) z2) + mu_y,

which turns the exponent into a6 - (z1^2 + z2^2) / 2.  The remaining
standard-normal moments are closed-form Gamma values.

Coefficients may be complex (imaginary linear terms are the normal case
for fidelity integrands); the same algebra is used, continued analytically.
"""

from dataclasses import dataclass
import cmath
import math

import numpy as np

from .quad import IntegralEstimate
from .special import log_binomial, log_half_gamma

MAX_DEGREE = 32
_EPS = np.finfo(float).eps
_LN2 = math.log(2.0)


@dataclass(frozen=True)
class GaussCoeffs:
    a1: complex
    a2: complex
    a3: complex = 0j
    a4: complex = 0j
    a5: complex = 0j
    lag: tuple = ()   # up to two (degree, scale) pairs

    def __post_init__(self):
        for name in ("a1", "a2", "a3", "a4", "a5"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        lag = tuple((int(m), complex(s)) for m, s in self.lag)
        if len(lag) > 2:
            raise ValueError("at most two Laguerre factors are supported")
        object.__setattr__(self, "lag", lag)

    def exponent(self, x, y):
        return self.a1 * x * x + self.a2 * y * y + self.a3 * x * y + self.a4 * x + self.a5 * y


@dataclass(frozen=True)
class StandardizedParams:
    mu_x: complex
    mu_y: complex
    rho: complex
    sigma_x: complex
    sigma_y: complex
    a6: complex

    def substitute(self, z1, z2):
        """(x, y) for standard-normal coordinates (z1, z2)."""
        root = _principal_sqrt(1 - self.rho * self.rho)
        x = self.sigma_x * z1 + self.mu_x
        y = self.sigma_y * (self.rho * z1 + root * z2) + self.mu_y
        return x, y


def _principal_sqrt(z, sqrt=cmath.sqrt):
    return sqrt(z)


def _standardize(a1, a2, a3, a4, a5, sqrt):
    det = 4 * a1 * a2 - a3 * a3
    if det == 0:
        raise ValueError("degenerate quadratic form: 4 a1 a2 - a3^2 = 0")
    mu_x = (a3 * a5 - 2 * a2 * a4) / det
    mu_y = (a3 * a4 - 2 * a1 * a5) / det
    sigma_x = sqrt(-2 * a2 / det)
    sigma_y = sqrt(-2 * a1 / det)
    # covariance a3/det split over the chosen root branches
    rho = (a3 / det) / (sigma_x * sigma_y) if a3 != 0 else 0 * a3
    a6 = -(a2 * a4 * a4 + a1 * a5 * a5 - a3 * a4 * a5) / det
    return mu_x, mu_y, rho, sigma_x, sigma_y, a6


def standardize(c):
    """Means, scales, correlation and exponent shift of the Gaussian in ``c``.

    Square roots take the principal branch (Re sigma >= 0).

    Raises
    ------
    ValueError
        If 4 a1 a2 - a3^2 vanishes.
    """
    vals = _standardize(c.a1, c.a2, c.a3, c.a4, c.a5, cmath.sqrt)
    return StandardizedParams(*(complex(v) for v in vals))


def gaussian_moment(n, b, a):
    """Int_R exp(-a x^b) x^n dx = 2 Gamma((n+1)/b) / (b a^{(n+1)/b}) for even n, else 0."""
    if n < 0:
        raise ValueError("moment order must be >= 0")
    if n % 2:
        return 0.0
    e = (n + 1) / b
    return 2.0 * math.exp(math.lgamma(e)) / (b * a**e)


def _log_normal_moment(k):
    # ln Int exp(-z^2/2) z^k dz for even k: lgamma((k+1)/2) + (k+1)/2 ln 2
    return log_half_gamma(k) + 0.5 * (k + 1) * _LN2


def _log_pow(base, e):
    """Complex e*log(base), with 0^0 = 1 and 0^e = 0 for e > 0."""
    if base == 0:
        return np.where(e == 0, 0.0, -np.inf).astype(complex)
    return e * cmath.log(base)


def _index_grid(i, j):
    """(s, t, u) with s <= i, t <= j, u <= t, s + t even and u even.

    Odd combinations have vanishing normal moments and are never generated.
    """
    s, t, u = np.meshgrid(np.arange(i + 1), np.arange(j + 1), np.arange(j + 1), indexing="ij")
    keep = (u <= t) & ((s + t) % 2 == 0) & (u % 2 == 0)
    return s[keep], t[keep], u[keep]


def _moment_terms(st, i, j):
    """Terms of E[x^i y^j] (unnormalised) in the standard-normal expansion."""
    s, t, u = _index_grid(i, j)
    logt = (
        log_binomial(i, s) + log_binomial(j, t) + log_binomial(t, u)
        + _log_normal_moment(s + t - u) + _log_normal_moment(u)
        + _log_pow(st.mu_x, i - s) + _log_pow(st.mu_y, j - t)
        + _log_pow(st.sigma_x, s) + _log_pow(st.sigma_y, t)
        + _log_pow(st.rho, t - u) + _log_pow(1 - st.rho * st.rho, u // 2)
    )
    return logt


def _fsum_complex(z):
    return complex(math.fsum(z.real.tolist()), math.fsum(z.imag.tolist()))


def _outer_weights(m, a, n, b):
    """Yield (p, q, r, weight) for the Laguerre and binomial expansions."""
    lf = math.lgamma
    for p in range(m + 1):
        for q in range(n + 1):
            base = (-a) ** p * (-b) ** q if (p or q) else 1.0
            if base == 0:
                continue
            lw = (lf(m + 1) + lf(n + 1) - 2 * lf(p + 1) - 2 * lf(q + 1)
                  - lf(m - p + 1) - lf(n - q + 1))
            for r in range(p + q + 1):
                yield p, q, r, base * math.exp(lw + log_binomial(p + q, r))


def _pad_lag(lag):
    lag = list(lag) + [(0, 0j)] * (2 - len(lag))
    (m, a), (n, b) = lag
    if m > MAX_DEGREE or n > MAX_DEGREE:
        raise ValueError(f"Laguerre degree above {MAX_DEGREE}; use a quadrature route")
    return m, complex(a), n, complex(b)


def _sum_double(c, st):
    m, a, n, b = _pad_lag(c.lag)
    moments = {}
    terms = []
    bound = 0.0
    for p, q, r, w in _outer_weights(m, a, n, b):
        key = (2 * r, 2 * (p + q - r))
        if key not in moments:
            logt = _moment_terms(st, *key)
            vals = np.exp(logt)
            # exp of a complex log carries ~|log| eps relative error per term
            live = np.isfinite(logt.real)
            mag = float(np.sum(np.abs(vals[live]) * (np.abs(logt[live]) + 10.0)))
            moments[key] = (_fsum_complex(vals), mag)
        mom, mag = moments[key]
        terms.append(w * mom)
        bound += abs(w) * mag
    total = _fsum_complex(np.array(terms, dtype=complex))
    scale = cmath.exp(st.a6) * st.sigma_x * st.sigma_y * cmath.sqrt(1 - st.rho * st.rho)
    return scale * total, 4 * _EPS * bound * abs(scale)


def _sum_mp(c, dps):
    import mpmath as mp

    m, a, n, b = _pad_lag(c.lag)
    with mp.workdps(dps):
        coeffs = [mp.mpc(v.real, v.imag) for v in (c.a1, c.a2, c.a3, c.a4, c.a5)]
        mu_x, mu_y, rho, sx, sy, a6 = _standardize(*coeffs, mp.sqrt)
        one_m_rho2 = 1 - rho * rho
        a = mp.mpc(a.real, a.imag)
        b = mp.mpc(b.real, b.imag)
        top = 2 * (m + n)
        binom = [[mp.binomial(k, j) for j in range(k + 1)] for k in range(top + 1)]
        nm = [mp.gamma(mp.mpf(k + 1) / 2) * mp.power(2, mp.mpf(k + 1) / 2) for k in range(top + 1)]

        def powers(z):
            out = [mp.mpc(1)]
            for _ in range(top):
                out.append(out[-1] * z)
            return out

        pmx, pmy, psx, psy, prho, pq = (powers(z) for z in (mu_x, mu_y, sx, sy, rho, one_m_rho2))
        moments = {}

        def moment(i, j):
            if (i, j) not in moments:
                acc = mp.mpc(0)
                for s in range(i + 1):
                    cs = binom[i][s] * pmx[i - s] * psx[s]
                    for t in range(s % 2, j + 1, 2):
                        ct = cs * binom[j][t] * pmy[j - t] * psy[t]
                        inner = mp.fsum(binom[t][u] * prho[t - u] * pq[u // 2] * nm[s + t - u] * nm[u]
                                        for u in range(0, t + 1, 2))
                        acc += ct * inner
                moments[(i, j)] = acc
            return moments[(i, j)]

        total = mp.mpc(0)
        for p in range(m + 1):
            for q in range(n + 1):
                w = (mp.power(-a, p) * mp.power(-b, q) * mp.factorial(m) * mp.factorial(n)
                     / (mp.factorial(p) ** 2 * mp.factorial(q) ** 2
                        * mp.factorial(m - p) * mp.factorial(n - q)))
                for r in range(p + q + 1):
                    total += w * mp.binomial(p + q, r) * moment(2 * r, 2 * (p + q - r))
        out = mp.exp(a6) * sx * sy * mp.sqrt(one_m_rho2) * total
        return complex(out)


def laguerre_gauss_integral(c, *, with_error=False):
    """Closed-form value of the integral described by ``c``.

    The term sum runs in double precision in log-magnitude/phase form with
    exact (fsum) accumulation.  When the rounding bound shows the alternating
    sum kept fewer than ~9 significant digits, it is redone with mpmath at a
    working precision sized from that bound.

    Returns
    -------
    complex, or (complex, float) when ``with_error`` is set.
    """
    st = standardize(c)
    value, err = _sum_double(c, st)
    if err > 1e-9 * abs(value) and err > 1e-14:
        lost = math.log10(err / max(abs(value), 1e-300) / _EPS)
        dps = int(min(400, 20 + max(lost, 0)))
        value = _sum_mp(c, dps)
        err = 4 * _EPS * abs(value)
    return (value, err) if with_error else value


def gauss_coeffs_from_spec(spec):
    """Real-coordinate coefficients of an :class:`~dfstele.protocol.IntegrandSpec`."""
    lag = tuple((n, s) for n, s in spec.laguerre if n > 0)
    if len(lag) > 2:
        raise ValueError("closed form supports at most two non-trivial Laguerre factors")
    return GaussCoeffs(*spec.real_form(), lag=lag)


def spec_from_gauss_coeffs(c):
    """Inverse of :func:`gauss_coeffs_from_spec`, with unit prefactor."""
    from .protocol import IntegrandSpec

    gg_plus_cc = 0.5 * (c.a1 - c.a2)
    gg_minus_cc = c.a3 / 2j
    return IntegrandSpec(
        quad=0.5 * (c.a1 + c.a2),
        quad_gg=0.5 * (gg_plus_cc + gg_minus_cc),
        quad_cc=0.5 * (gg_plus_cc - gg_minus_cc),
        lin=0.5 * (c.a4 - 1j * c.a5),
        lin_conj=0.5 * (c.a4 + 1j * c.a5),
        laguerre=c.lag,
        prefactor=1.0,
    )


def integrate_closed(spec):
    value, err = laguerre_gauss_integral(gauss_coeffs_from_spec(spec), with_error=True)
    return IntegralEstimate(complex(value), float(err), 0)


def fidelity_closed(spec):
    """Fidelity prefactor times the closed-form integral of ``spec``."""
    return spec.prefactor * laguerre_gauss_integral(gauss_coeffs_from_spec(spec))
