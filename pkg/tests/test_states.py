import cmath
import math

import numpy as np
import pytest
import scipy.linalg as sl
from hypothesis import given, settings, strategies as st

from dfstele.states import (
    CoherentState,
    DFSChannel,
    PhasePoint,
    SqueezedState,
    chi_coherent,
    chi_dfs,
    chi_input,
    chi_squeezed,
)

# Truncated Fock-space operators: an oracle independent of the closed-form
# characteristic functions, chi(gamma) = Tr[D(gamma) rho].
FOCK_DIM = 90
_A = np.diag(np.sqrt(np.arange(1, FOCK_DIM)), 1)
_AD = _A.T
_VAC = np.eye(FOCK_DIM)[0]


def displacement(g):
    return sl.expm(g * _AD - np.conj(g) * _A)


def squeeze(eps):
    return sl.expm(0.5 * (np.conj(eps) * _A @ _A - eps * _AD @ _AD))


def fock(n):
    return np.eye(FOCK_DIM)[n]


def chi_fock(psi, g):
    return np.vdot(psi, displacement(g) @ psi)


amplitudes = st.complex_numbers(max_magnitude=1.5, allow_nan=False, allow_infinity=False)
small = st.complex_numbers(max_magnitude=1.2, allow_nan=False, allow_infinity=False)


class TestPhasePoint:
    @given(x=st.floats(-5, 5), p=st.floats(-5, 5))
    def test_xp_round_trip(self, x, p):
        pt = PhasePoint.from_xp(x, p)
        assert pt.x == pytest.approx(x, abs=1e-12)
        assert pt.p == pytest.approx(p, abs=1e-12)

    def test_sqrt2_convention(self):
        assert PhasePoint.from_xp(1.0, 0.0).gamma == pytest.approx(1 / math.sqrt(2))

    def test_conj_and_scale(self):
        pt = PhasePoint(1 + 2j)
        assert pt.conj().gamma == 1 - 2j
        assert pt.scale(0.5).gamma == 0.5 + 1j

    def test_accepted_by_chi(self):
        s = CoherentState(0.3j)
        assert chi_coherent(s, PhasePoint(0.2)) == chi_coherent(s, 0.2)


class TestValidation:
    def test_negative_squeezing(self):
        with pytest.raises(ValueError):
            SqueezedState(-0.1, 0.0)

    def test_phase_reduced(self):
        assert SqueezedState(1.0, 2 * math.pi + 0.5).phi == pytest.approx(0.5)
        assert SqueezedState(1.0, -0.5).phi == pytest.approx(2 * math.pi - 0.5)

    @pytest.mark.parametrize("n", [-1, 1.5])
    def test_channel_occupations(self, n):
        with pytest.raises(ValueError):
            DFSChannel(0, 0, n, 0)

    def test_nonfinite_amplitude(self):
        with pytest.raises(ValueError):
            CoherentState(complex(math.inf, 0))


class TestCoherent:
    def test_vacuum(self):
        g = 0.8 - 0.4j
        assert chi_coherent(CoherentState(0), g) == pytest.approx(math.exp(-abs(g) ** 2 / 2))

    def test_normalised(self):
        assert chi_coherent(CoherentState(2 - 1j), 0) == pytest.approx(1.0)

    def test_hand_value(self):
        # alpha* gamma - alpha gamma* = i - (-i) = 2i
        expected = math.exp(-0.5) * cmath.exp(2j)
        assert chi_coherent(CoherentState(1), 1j) == pytest.approx(expected, abs=1e-15)

    @given(alpha=small, g=small)
    @settings(max_examples=15, deadline=None)
    def test_fock_oracle(self, alpha, g):
        psi = displacement(alpha) @ _VAC
        assert abs(chi_coherent(CoherentState(alpha), g) - chi_fock(psi, g)) < 1e-9


class TestSqueezed:
    def test_zero_squeezing_is_vacuum(self):
        g = 0.3 + 1.1j
        assert chi_squeezed(SqueezedState(0, 1.3), g) == pytest.approx(math.exp(-abs(g) ** 2 / 2))

    def test_normalised(self):
        assert chi_squeezed(SqueezedState(1.7, 0.4), 0) == pytest.approx(1.0)

    def test_real_axis_value(self):
        # xi = cosh 1 + sinh 1 = e for gamma = 1
        assert chi_squeezed(SqueezedState(1.0, 0.0), 1.0) == pytest.approx(math.exp(-math.e**2 / 2))

    @given(r=st.floats(0, 0.8), phi=st.floats(0, 2 * math.pi), g=small)
    @settings(max_examples=15, deadline=None)
    def test_fock_oracle(self, r, phi, g):
        psi = squeeze(r * cmath.exp(1j * phi)) @ _VAC
        assert abs(chi_squeezed(SqueezedState(r, phi), g) - chi_fock(psi, g)) < 1e-9

    def test_input_dispatch(self):
        s = SqueezedState(0.5, 0.1)
        assert chi_input(s, 0.3) == chi_squeezed(s, 0.3)
        with pytest.raises(TypeError):
            chi_input(object(), 0.3)


class TestDFS:
    def test_vacuum_occupations_factorise(self):
        ch = DFSChannel(0.4 + 0.1j, -0.7j, 0, 0)
        g1, g2 = 0.5 - 0.2j, -0.3 + 0.9j
        expected = chi_coherent(CoherentState(ch.alpha1), g1) * chi_coherent(CoherentState(ch.alpha2), g2)
        assert chi_dfs(ch, g1, g2) == pytest.approx(expected, abs=1e-15)

    def test_normalised(self):
        assert chi_dfs(DFSChannel(1, 2j, 3, 4), 0, 0) == pytest.approx(1.0)

    def test_node_of_first_laguerre(self):
        assert chi_dfs(DFSChannel(0, 0, 1, 0), 1.0, 0.0) == pytest.approx(0.0, abs=1e-16)

    @given(alpha=small, g=small, n=st.integers(0, 4))
    @settings(max_examples=15, deadline=None)
    def test_single_mode_fock_oracle(self, alpha, g, n):
        psi = displacement(alpha) @ fock(n)
        got = chi_dfs(DFSChannel(alpha, 0, n, 0), g, 0)
        assert abs(got - chi_fock(psi, g)) < 1e-9

    def test_vectorised(self):
        g = np.linspace(-1, 1, 7) + 0.3j
        ch = DFSChannel(0.2, 0.1, 2, 1)
        out = chi_dfs(ch, g, np.conj(g))
        assert out.shape == (7,)
        np.testing.assert_allclose(out, [chi_dfs(ch, z, np.conj(z)) for z in g], rtol=1e-14)


# Hermitian symmetry chi(-gamma) = conj chi(gamma), and |chi| <= 1
@given(alpha=amplitudes, r=st.floats(0, 2), phi=st.floats(0, 2 * math.pi),
       n1=st.integers(0, 7), n2=st.integers(0, 7), g=amplitudes, h=amplitudes)
@settings(max_examples=200, deadline=None)
def test_hermitian_symmetry_and_bound(alpha, r, phi, n1, n2, g, h):
    for s in (CoherentState(alpha), SqueezedState(r, phi)):
        assert abs(chi_input(s, -g) - np.conj(chi_input(s, g))) <= 1e-12
        assert abs(chi_input(s, g)) <= 1 + 1e-12
    ch = DFSChannel(alpha, -alpha.conjugate(), n1, n2)
    assert abs(chi_dfs(ch, -g, -h) - np.conj(chi_dfs(ch, g, h))) <= 1e-12
