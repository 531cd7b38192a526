import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.integrate import quad, quad_vec

from chiralcmm.constants import hz
from chiralcmm.linear_model import build_model
from chiralcmm.lyapunov import solve_lyapunov
from chiralcmm.measures import log_negativity, symplectic_eigenvalues
from chiralcmm.output_mode import (
    MAGNON_INSTANT,
    MAGNON_WINDOWED,
    FilterSpec,
    filter_transform,
    filtered_pair_cm,
    noise_channels,
    spectral_matrix,
    susceptibility,
)
from chiralcmm.params import Detunings, SystemParams
from chiralcmm.steady_state import resolve_drive


def fig2d_point():
    p = SystemParams()
    det = Detunings.effective(-0.72 * p.omega_b, 0.76 * p.omega_b)
    sf = resolve_drive(p, det, variant_imperfect=False)
    model = build_model(p, det, sf.g_m_eff, "ideal")
    spec = FilterSpec(omega_center=-p.omega_b, tau=10.0 / p.omega_b)
    return p, model, spec


class TestFilterTransform:
    def setup_method(self):
        self.spec = FilterSpec(omega_center=-hz(10e6), tau=1e-7)

    def test_peak_value(self):
        g0 = filter_transform(self.spec, self.spec.omega_center)
        assert abs(g0) == pytest.approx(math.sqrt(self.spec.tau / (2 * math.pi)),
                                        rel=1e-12)

    def test_sinc_zeros(self):
        peak = math.sqrt(self.spec.tau / (2 * math.pi))
        for k in (1, -1, 2, 5):
            w = self.spec.omega_center + 2 * math.pi * k / self.spec.tau
            assert abs(filter_transform(self.spec, w)) < 1e-10 * peak

    def test_unit_norm_within_slow_tail(self):
        spec = self.spec
        lo = spec.omega_center - 200.0 / spec.tau
        hi = spec.omega_center + 200.0 / spec.tau
        norm, _ = quad(lambda w: abs(filter_transform(spec, w)) ** 2, lo, hi,
                       limit=400)
        # |g|^2 has a sin^2/x^2 tail: the mass beyond x = (w-Omega)*tau/2 = 100
        # is 1/(100*pi), which bounds how close this window can get to 1
        assert norm == pytest.approx(1.0 - 1.0 / (100.0 * math.pi), abs=2e-4)
        assert norm == pytest.approx(1.0, abs=5e-3)

    def test_rejects_bad_tau(self):
        with pytest.raises(ValueError):
            FilterSpec(omega_center=0.0, tau=0.0)


class TestSpectralMatrix:
    def test_cold_decoupled_output_is_vacuum_flat(self):
        p = SystemParams(g_cw=0.0, temperature=0.0)
        det = Detunings.effective(-0.3 * p.omega_b, 0.5 * p.omega_b)
        model = build_model(p, det, 0.0, "ideal")
        chans = noise_channels(p)
        for w in (0.0, 0.7 * p.omega_b, -2.3 * p.omega_b, 10 * p.omega_b):
            sb = spectral_matrix(model.A, chans, w, p.kappa_a_e)
            assert_allclose(sb.s_out, 0.5 * np.eye(2), atol=1e-12)

    def test_vanishing_external_coupling_kills_cross_block(self):
        p = SystemParams(kappa_a_e=0.0, kappa_a_i=hz(3e6))
        det = Detunings.effective(-0.72 * p.omega_b, 0.76 * p.omega_b)
        model = build_model(p, det, hz(4e6), "ideal")
        chans = noise_channels(p)
        sb = spectral_matrix(model.A, chans, 0.9 * p.omega_b, p.kappa_a_e)
        assert_allclose(sb.s_out_mag, 0.0, atol=1e-15)

    def test_wiener_khinchin_reproduces_lyapunov_cm(self):
        p, model, _ = fig2d_point()
        chans = noise_channels(p)
        v_ref = solve_lyapunov(model.A, model.D).V

        def f(w):
            return np.real(spectral_matrix(model.A, chans, w, p.kappa_a_e).s_uu)

        val, _ = quad_vec(f, -np.inf, np.inf, epsabs=1e-10, epsrel=1e-8,
                          points=[-p.omega_b, 0.0, p.omega_b])
        assert np.linalg.norm(val / (2 * math.pi) - v_ref) \
            <= 1e-4 * np.linalg.norm(v_ref)

    def test_susceptibility_definition(self):
        A = np.diag([-1.0, -2.0])
        M = susceptibility(A, 3.0)
        assert_allclose(M @ (-3j * np.eye(2) - A), np.eye(2), atol=1e-14)


class TestTimeDomainOracle:
    """Independent check of the filtered-pair CM in the time domain.

    The filtered output quadratures are f = tau^{-1/2} Int_{-tau}^0
    R(Omega s) v_out(s) ds with R the rotation by Omega*s, so augmenting the
    state with the two accumulators f and propagating the differential
    Lyapunov equation of the 10-dimensional system across the window yields
    the (filtered output, instant magnon) covariance matrix without ever
    touching the frequency domain.
    """

    def oracle(self, A, params, spec, port_rows=(0, 1)):
        from scipy.integrate import solve_ivp

        from chiralcmm.output_mode import noise_channels

        chans = noise_channels(params)
        B, sig = chans.B, chans.sigma
        n_port = chans.n_port + 0.5
        V_stat = solve_lyapunov(A, np.diag([0.0] * 8) + (B * sig) @ B.T,
                                mode_order=("a_cw", "a_ccw", "m", "b")).V
        T_e = np.zeros((2, 11))
        T_e[0, chans.port_channels["cw"][0]] = 1.0
        T_e[1, chans.port_channels["cw"][1]] = 1.0
        P = np.zeros((2, 8))
        P[0, port_rows[0]] = P[1, port_rows[1]] = 1.0
        root = math.sqrt(2.0 * params.kappa_a_e)
        inv_rt = 1.0 / math.sqrt(spec.tau)
        omega = spec.omega_center

        def rot(t):
            c, s = math.cos(omega * t), math.sin(omega * t)
            return np.array([[c, -s], [s, c]])

        def rhs(t, y):
            S = y.reshape(10, 10)
            R = rot(t)
            At = np.zeros((10, 10))
            At[:8, :8] = A
            At[8:, :8] = inv_rt * root * (R @ P)
            Bt = np.vstack([B, -inv_rt * (R @ T_e)])
            N = (Bt * sig) @ Bt.T
            dS = At @ S + S @ At.T + N
            return dS.ravel()

        S0 = np.zeros((10, 10))
        S0[:8, :8] = V_stat
        sol = solve_ivp(rhs, (-spec.tau, 0.0), S0.ravel(), method="DOP853",
                        rtol=1e-10, atol=1e-12)
        assert sol.success
        S = sol.y[:, -1].reshape(10, 10)
        idx = [8, 9, 4, 5]  # filtered output pair, then magnon quadratures
        return S[np.ix_(idx, idx)]

    def test_matches_frequency_domain_route(self):
        p, model, spec = fig2d_point()
        freq = filtered_pair_cm(model.A, model.D, p, spec, MAGNON_INSTANT).V
        time_dom = self.oracle(model.A, p, spec)
        assert np.max(np.abs(freq - time_dom)) < 2e-4

    def test_matches_at_nonzero_temperature_and_imperfections(self):
        from chiralcmm.linear_model import build_model as build
        from chiralcmm.steady_state import resolve_drive as rd

        p = SystemParams(kappa_a_e=hz(4.8e6), g_cw=hz(8e6), g_ccw=hz(0.8e6),
                         J=hz(0.5e6), temperature=0.05)
        det = Detunings.effective(-0.76 * p.omega_b, 0.65 * p.omega_b)
        model = build(p, det, rd(p, det, variant_imperfect=True).g_m_eff,
                      "imperfect")
        spec = FilterSpec(omega_center=-p.omega_b, tau=8.0 / p.omega_b)
        freq = filtered_pair_cm(model.A, model.D, p, spec, MAGNON_INSTANT).V
        time_dom = self.oracle(model.A, p, spec)
        assert np.max(np.abs(freq - time_dom)) < 2e-4


class TestFilteredPairCM:
    def test_vacuum_identity_both_conventions(self):
        p = SystemParams(g_cw=0.0, temperature=0.0)
        det = Detunings.effective(-0.4 * p.omega_b, 0.6 * p.omega_b)
        model = build_model(p, det, 0.0, "ideal")
        spec = FilterSpec(omega_center=-p.omega_b, tau=10.0 / p.omega_b)
        for conv in (MAGNON_WINDOWED, MAGNON_INSTANT):
            out = filtered_pair_cm(model.A, model.D, p, spec, conv)
            assert_allclose(out.V, 0.5 * np.eye(4), atol=1e-6)

    def test_decoupled_pair_is_product_state(self):
        # G_m = 0: no magnomechanical link, filtered output x magnon separable
        p = SystemParams(temperature=0.0)
        det = Detunings.effective(-0.72 * p.omega_b, 0.76 * p.omega_b)
        model = build_model(p, det, 0.0, "ideal")
        spec = FilterSpec(omega_center=-p.omega_b, tau=10.0 / p.omega_b)
        out = filtered_pair_cm(model.A, model.D, p, spec, MAGNON_INSTANT)
        assert_allclose(out.V[:2, 2:], 0.0, atol=1e-5)
        assert log_negativity(out.V) < 1e-9

    def test_reproduces_output_magnon_entanglement_and_fidelity(self):
        from chiralcmm.measures import teleportation_fidelity

        p, model, spec = fig2d_point()
        out = filtered_pair_cm(model.A, model.D, p, spec, MAGNON_INSTANT)
        assert log_negativity(out.V) == pytest.approx(0.23, abs=0.02)
        assert teleportation_fidelity(out.V) == pytest.approx(0.55, abs=0.02)
        assert out.meta["magnon_convention"] == MAGNON_INSTANT

    def test_physicality_of_filtered_cm(self):
        p, model, spec = fig2d_point()
        for conv in (MAGNON_WINDOWED, MAGNON_INSTANT):
            out = filtered_pair_cm(model.A, model.D, p, spec, conv)
            assert np.all(symplectic_eigenvalues(out.V) >= 0.5 - 1e-6)

    def test_entanglement_washes_out_at_large_bandwidth(self):
        p, model, spec = fig2d_point()
        values = []
        for ratio in (0.1, 0.3, 1.0, 3.0, 10.0):
            wide = FilterSpec(spec.omega_center, tau=1.0 / (ratio * p.omega_b))
            out = filtered_pair_cm(model.A, model.D, p, wide, MAGNON_INSTANT)
            values.append(log_negativity(out.V))
        assert values[0] > 0.1
        # monotone decrease over the last decade of the bandwidth sweep
        assert values[-3] >= values[-2] >= values[-1]
        assert values[-1] < 0.02

    def test_deterministic(self):
        p, model, spec = fig2d_point()
        v1 = filtered_pair_cm(model.A, model.D, p, spec, MAGNON_INSTANT).V
        v2 = filtered_pair_cm(model.A, model.D, p, spec, MAGNON_INSTANT).V
        assert np.array_equal(v1, v2)

    def test_windowed_commutator_reported(self):
        p, model, spec = fig2d_point()
        out = filtered_pair_cm(model.A, model.D, p, spec, MAGNON_WINDOWED)
        assert out.meta["magnon_commutator"] > 0
