from fractions import Fraction
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate as si

from dfstele.protocol import (
    ROUTES,
    IntegrandSpec,
    NoiseParams,
    chi_out_ideal,
    chi_out_realistic,
    fidelity,
    fidelity_integrand,
    gamma_thermal,
    integrate,
)
from dfstele.quad import IntegrationError, QuadConfig
from dfstele.states import CoherentState, DFSChannel, SqueezedState, chi_input


def laguerre_coeffs(n):
    return [Fraction((-1) ** i * math.comb(n, i), math.factorial(i)) for i in range(n + 1)]


def exact_vacuum_overlap(n1, n2):
    """Int_0^inf e^{-2t} L_n1(t) L_n2(t) dt in exact rationals."""
    total = Fraction(0)
    for i, a in enumerate(laguerre_coeffs(n1)):
        for j, b in enumerate(laguerre_coeffs(n2)):
            k = i + j
            total += a * b * Fraction(math.factorial(k), 2 ** (k + 1))
    return total


# frozen: exact_vacuum_overlap for the four channel occupations used throughout
FROZEN_IDEAL = {(0, 0): 0.5, (1, 1): 0.25, (5, 5): 0.123046875, (3, 7): 0.05859375}

LOSSY = NoiseParams(g=1.0, R=0.8, tau=0.8, n_th=0.0)


def brute_force_fidelity(inp, ch, noise):
    """(1/pi) Int chi_in(gamma) chi_out(-gamma) d^2gamma by scipy on the literal output chi."""
    def f(y, x):
        g = complex(x, y)
        return (chi_input(inp, g) * chi_out_realistic(inp, ch, noise, -g)).real

    val, _ = si.dblquad(f, -7, 7, -7, 7, epsabs=1e-11, epsrel=1e-11)
    return val / math.pi


class TestNoiseParams:
    def test_ideal(self):
        n = NoiseParams.ideal()
        assert (n.g, n.R, n.tau, n.n_th) == (1.0, 0.0, 0.0, 0.0)
        assert n.is_ideal and n.T == 1.0

    def test_transmissivity_derived(self):
        assert NoiseParams(R=0.6).T == pytest.approx(0.8)

    @pytest.mark.parametrize("kw,msg", [
        ({"R": 1.3}, "R must lie in \\[0,1\\]"),
        ({"R": -0.1}, "R must lie"),
        ({"g": -1}, "g must"),
        ({"tau": -1}, "tau must"),
        ({"n_th": -0.5}, "n_th must"),
    ])
    def test_rejects(self, kw, msg):
        with pytest.raises(ValueError, match=msg):
            NoiseParams(**kw)


class TestGammaThermal:
    @pytest.mark.parametrize("nth", [0.0, 3.0, 10.0])
    def test_ideal_limit(self, nth):
        assert gamma_thermal(NoiseParams(1, 0, 0, nth)) == 0.0

    def test_pure_reflection(self):
        assert gamma_thermal(NoiseParams(1, 0.8, 0, 0)) == pytest.approx(0.64)

    def test_long_damping_limit(self):
        assert gamma_thermal(NoiseParams(0, 0, 60.0, 2.0)) == pytest.approx(2.5, abs=1e-14)


class TestOutputChi:
    def test_normalised(self):
        inp, ch = SqueezedState(0.7, 1.0), DFSChannel(0.5, -0.2j, 2, 1)
        assert chi_out_ideal(inp, ch, 0) == pytest.approx(1.0)
        assert chi_out_realistic(inp, ch, LOSSY, 0) == pytest.approx(1.0)

    def test_three_vacuum_gaussians(self):
        g = 0.6 + 0.2j
        assert chi_out_ideal(CoherentState(0), DFSChannel(), g) == pytest.approx(
            math.exp(-1.5 * abs(g) ** 2))

    @given(g=st.complex_numbers(max_magnitude=2), a=st.complex_numbers(max_magnitude=2),
           n1=st.integers(0, 4), n2=st.integers(0, 4), r=st.floats(0, 1.5))
    @settings(max_examples=60, deadline=None)
    def test_realistic_reduces_to_ideal(self, g, a, n1, n2, r):
        ch = DFSChannel(a, 0.3 - a, n1, n2)
        for inp in (CoherentState(a), SqueezedState(r, 0.4)):
            got = chi_out_realistic(inp, ch, NoiseParams.ideal(), g)
            assert abs(got - chi_out_ideal(inp, ch, g)) <= 1e-12

    def test_total_loss_limit(self):
        noise = NoiseParams(g=0.0, R=0.0, tau=80.0, n_th=0.0)
        g = 0.9 - 0.4j
        x, p = math.sqrt(2) * g.real, math.sqrt(2) * g.imag
        got = chi_out_realistic(SqueezedState(1.0, 0.3), DFSChannel(1, 1j, 3, 2), noise, g)
        assert got == pytest.approx(math.exp(-0.25 * (x * x + p * p)), abs=1e-14)


class TestIntegrandSpec:
    def test_vacuum_coherent(self):
        spec = fidelity_integrand(CoherentState(0.7), DFSChannel())
        assert spec.quad == pytest.approx(-2.0)
        assert spec.lin == 0 and spec.lin_conj == 0
        assert [n for n, _ in spec.laguerre] == [0, 0]
        assert spec.prefactor == pytest.approx(1 / math.pi)

    def test_first_fock_channel(self):
        spec = fidelity_integrand(CoherentState(0), DFSChannel(0, 0, 1, 1))
        assert spec.quad == pytest.approx(-2.0)
        assert spec.laguerre == ((1, 1.0), (1, 1.0))

    @given(a=st.complex_numbers(max_magnitude=2), a1=st.complex_numbers(max_magnitude=2),
           a2=st.complex_numbers(max_magnitude=2), n1=st.integers(0, 5), n2=st.integers(0, 5),
           r=st.floats(0, 2), phi=st.floats(0, 2 * math.pi), g=st.floats(0, 2),
           R=st.floats(0, 1), tau=st.floats(0, 3), nth=st.floats(0, 5),
           z=st.complex_numbers(max_magnitude=1.5))
    @settings(max_examples=200, deadline=None)
    def test_pointwise_product_oracle(self, a, a1, a2, n1, n2, r, phi, g, R, tau, nth, z):
        noise = NoiseParams(g, R, tau, nth)
        ch = DFSChannel(a1, a2, n1, n2)
        for inp in (CoherentState(a), SqueezedState(r, phi)):
            spec = fidelity_integrand(inp, ch, noise)
            direct = chi_input(inp, z) * chi_out_realistic(inp, ch, noise, -z)
            assert abs(spec(z) - direct) <= 1e-11 * max(1.0, abs(direct))
            assert spec.is_physical()

    def test_non_integrable_rejected(self):
        with pytest.raises(ValueError, match="not integrable"):
            IntegrandSpec(quad=0.5)
        with pytest.raises(ValueError):
            IntegrandSpec(quad=-1.0, quad_gg=0.8, quad_cc=0.8)

    def test_physical_flag(self):
        assert IntegrandSpec(quad=-1, lin=1j, lin_conj=1j).is_physical()
        assert not IntegrandSpec(quad=-1, lin=1, lin_conj=1).is_physical()

    def test_unknown_input_type(self):
        with pytest.raises(TypeError):
            fidelity_integrand(object(), DFSChannel())


class TestFidelity:
    @pytest.mark.parametrize("route", ROUTES)
    def test_vacuum_is_one_half(self, route):
        res = fidelity(CoherentState(0), DFSChannel(), route=route)
        tol = 1e-6 if route != "monte-carlo" else max(res.error, 1e-6)
        assert res.value == pytest.approx(0.5, abs=tol)
        assert res.route == route

    @pytest.mark.parametrize("n", sorted(FROZEN_IDEAL))
    def test_exact_rational_oracle(self, n):
        assert float(exact_vacuum_overlap(*n)) == FROZEN_IDEAL[n]
        f = fidelity(CoherentState(1.3 - 0.2j), DFSChannel(0.4, 0.4, *n)).value
        assert f == pytest.approx(FROZEN_IDEAL[n], abs=1e-12)

    @pytest.mark.parametrize("n", [(0, 0), (1, 1)])
    def test_routes_agree_at_fig2_point(self, n):
        cf = fidelity(CoherentState(0), DFSChannel(0, 0, *n)).value
        ad = fidelity(CoherentState(0), DFSChannel(0, 0, *n), route="adaptive").value
        assert abs(cf - ad) <= 1e-8

    @pytest.mark.parametrize("r", [0.0, 0.5, 1.0, 2.0])
    @pytest.mark.parametrize("phi", [0.0, 1.1, math.pi])
    def test_squeezed_vacuum_channel_analytic(self, r, phi):
        # (1/pi) Int exp(-|xi|^2 - |gamma|^2) = 1 / (2 cosh r), any phase
        f = fidelity(SqueezedState(r, phi), DFSChannel()).value
        assert f == pytest.approx(1 / (2 * math.cosh(r)), rel=1e-12)

    def test_squeezed_r2_near_0132(self):
        assert fidelity(SqueezedState(2.0, 0.0), DFSChannel()).value == pytest.approx(0.132, abs=0.005)

    @pytest.mark.parametrize("inp,ch,noise", [
        (CoherentState(0.5 + 0.3j), DFSChannel(1, 1, 1, 1), LOSSY),
        (CoherentState(2.0), DFSChannel(0, 0.5, 1, 0), NoiseParams(1.2, 0.5, 0.3, 1.0)),
        (SqueezedState(0.6, math.pi), DFSChannel(1, 0, 0, 2), LOSSY),
        (SqueezedState(1.0, 0.7), DFSChannel(0.2j, 0.1, 2, 1), NoiseParams(0.8, 0.3, 0.02, 0.5)),
    ])
    def test_brute_force_on_literal_output(self, inp, ch, noise):
        assert fidelity(inp, ch, noise).value == pytest.approx(
            brute_force_fidelity(inp, ch, noise), abs=1e-9)

    def test_lossy_vacuum_formula(self):
        noise = NoiseParams(1.3, 0.4, 0.5, 2.0)
        u, v = noise.g * noise.T, math.exp(-noise.tau / 2)
        expected = 1 / (0.5 * (1 + u * u) + 0.5 * (u * u + v * v) + gamma_thermal(noise))
        assert fidelity(CoherentState(), DFSChannel(), noise).value == pytest.approx(expected, rel=1e-13)

    def test_imaginary_residue_small(self):
        res = fidelity(SqueezedState(1.0, 0.3), DFSChannel(0.3 + 0.2j, -0.5j, 2, 3), LOSSY)
        assert abs(res.imag) <= 10 * res.error + 1e-15

    def test_unknown_route(self):
        with pytest.raises(ValueError, match="unknown route"):
            fidelity(CoherentState(), DFSChannel(), route="simpson")

    def test_budget_exhaustion_raises(self):
        cfg = QuadConfig(abs_tol=1e-15, rel_tol=1e-15, gh_order=2, max_refinements=1)
        spec = fidelity_integrand(CoherentState(), DFSChannel(0, 0, 5, 5))
        with pytest.raises(IntegrationError) as exc:
            integrate(spec, "gauss-hermite", cfg)
        assert exc.value.gap > 0


def test_alpha_independence_of_ideal_coherent():
    ch = DFSChannel(0.3, -0.8j, 2, 1)
    vals = [fidelity(CoherentState(a), ch).value for a in (0, 1, -2.5j, 3 + 4j)]
    assert np.ptp(vals) <= 1e-8
