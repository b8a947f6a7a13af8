"""Transform-layer oracles: brute-force DFT sums, kernel identities, rotations."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ddchan.grid import TFGrid
from ddchan.transforms import (
    derotate_dd,
    diric,
    isfft,
    periodic_window,
    phase_derotate_tf,
    phase_rotate_tf,
    rotate_dd,
    sfft,
    window_w,
)


def sfft_brute(a, out_n, out_m):
    """Direct double-loop evaluation of the defining sum (the oracle)."""
    a = np.asarray(a, complex)
    out = np.zeros((out_m, out_n), complex)
    for mt in range(out_m):
        for nt in range(out_n):
            acc = 0.0 + 0.0j
            for n in range(a.shape[0]):
                for m in range(a.shape[1]):
                    acc += a[n, m] * np.exp(-2j * np.pi * (n * nt / out_n - m * mt / out_m))
            out[mt, nt] = acc
    return out


def random_complex(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def rel_err(a, b):
    return np.linalg.norm(a - b) / np.linalg.norm(b)


class TestSfft:
    def test_single_coefficient_is_constant(self):
        out = sfft(np.array([[2.0 - 1.0j]]), 4, 4)
        assert out.shape == (4, 4)
        assert np.allclose(out, 2.0 - 1.0j)

    def test_constant_transforms_to_delta(self):
        out = sfft(np.ones((2, 2)), 2, 2)
        expected = np.zeros((2, 2), complex)
        expected[0, 0] = 4.0
        assert np.allclose(out, expected, atol=1e-12)

    def test_matches_brute_force_with_padding(self):
        rng = np.random.default_rng(42)
        a = random_complex(rng, (4, 6))
        assert rel_err(sfft(a, 8, 8), sfft_brute(a, 8, 8)) < 1e-12

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_brute_force_various_sizes(self, seed):
        rng = np.random.default_rng(seed)
        n, m = rng.integers(2, 17, size=2)
        a = random_complex(rng, (n, m))
        assert rel_err(sfft(a, n, m), sfft_brute(a, n, m)) < 1e-12

    def test_rejects_oversized_input(self):
        with pytest.raises(ValueError):
            sfft(np.ones((4, 4)), 2, 8)

    @given(st.integers(2, 32), st.integers(2, 32), st.integers(0, 2**32 - 1))
    @settings(max_examples=30, deadline=None)
    def test_parseval(self, n, m, seed):
        rng = np.random.default_rng(seed)
        a = random_complex(rng, (n, m))
        lhs = np.linalg.norm(sfft(a, n, m)) ** 2
        assert lhs == pytest.approx(n * m * np.linalg.norm(a) ** 2, rel=1e-10)


class TestIsfft:
    @given(st.integers(2, 64), st.integers(2, 64), st.integers(0, 2**32 - 1))
    @settings(max_examples=30, deadline=None)
    def test_round_trip(self, n, m, seed):
        rng = np.random.default_rng(seed)
        a = random_complex(rng, (n, m))
        back = isfft(sfft(a, n, m), n, m)
        assert rel_err(back, a) < 1e-12

    def test_constant_to_scaled_delta(self):
        out = isfft(np.ones((2, 2)), 2, 2)
        expected = np.zeros((2, 2), complex)
        expected[0, 0] = 1.0
        assert np.allclose(out, expected, atol=1e-12)

    def test_matches_brute_force_inverse(self):
        rng = np.random.default_rng(7)
        a = random_complex(rng, (8, 8))
        # inverse = conjugate-exponent sum with 1/(n*m); reuse the forward oracle
        expected = sfft_brute(a, 8, 8) / 64.0
        assert rel_err(isfft(a, 8, 8), expected) < 1e-12

    def test_rejects_wrong_shape(self):
        with pytest.raises(ValueError):
            isfft(np.ones((3, 4)), 4, 4)


class TestDiric:
    @pytest.mark.parametrize("order", [1, 2, 3, 4, 7, 16])
    def test_unity_at_zero(self, order):
        assert diric(order, 0.0) == pytest.approx(1.0)

    def test_zero_at_pi_half_for_order_four(self):
        assert diric(4, np.pi / 2) == pytest.approx(0.0, abs=1e-12)

    def test_periodicity_parity(self):
        omega = np.linspace(-3.0, 3.0, 100)
        assert np.allclose(diric(3, omega + 2 * np.pi), diric(3, omega), atol=1e-10)
        assert np.allclose(diric(4, omega + 2 * np.pi), -diric(4, omega), atol=1e-10)

    def test_continuity_across_singularity(self):
        for order in (3, 4, 9):
            left, mid, right = diric(order, -1e-8), diric(order, 0.0), diric(order, 1e-8)
            assert abs(left - mid) < 1e-9
            assert abs(right - mid) < 1e-9

    def test_matches_formula_away_from_singularity(self):
        omega = np.linspace(0.1, 6.0, 57)
        expected = np.sin(5 * omega / 2) / (5 * np.sin(omega / 2))
        assert np.allclose(diric(5, omega), expected, atol=1e-12)

    def test_rejects_bad_order(self):
        with pytest.raises(ValueError):
            diric(0, 1.0)


@pytest.fixture
def grid88():
    return TFGrid.from_subcarrier_spacing(200e3, 8, 8)


class TestWindow:
    def test_peak_value_is_span_product(self, grid88):
        val = window_w(grid88, 0.0, 0.0)
        assert val == pytest.approx(grid88.S * grid88.B)
        assert abs(np.angle(val)) < 1e-12

    def test_zero_at_first_delay_null(self, grid88):
        assert abs(window_w(grid88, 1.0 / grid88.B, 0.0)) < 1e-9 * grid88.S * grid88.B

    def test_magnitude_even_symmetry(self, grid88):
        rng = np.random.default_rng(3)
        tau = rng.uniform(-2 / grid88.B, 2 / grid88.B, 50)
        nu = rng.uniform(-2 / grid88.S, 2 / grid88.S, 50)
        assert np.allclose(
            np.abs(window_w(grid88, tau, nu)),
            np.abs(window_w(grid88, -tau, -nu)),
            rtol=1e-10,
        )


class TestPeriodicWindow:
    def test_unity_at_origin(self, grid88):
        assert periodic_window(grid88, 0.0, 0.0) == pytest.approx(1.0)

    def test_zeros_on_nonzero_grid_points(self, grid88):
        for k in range(1, grid88.M):
            for l in range(1, grid88.N):
                val = periodic_window(grid88, k / grid88.B, l / grid88.S)
                assert abs(val) < 1e-12, (k, l)

    def test_truncated_sinc_sum_converges(self, grid88):
        """Periodized 2D sinc sum approaches the Dirichlet product as the
        truncation grows, monotonically at every probe point."""
        rng = np.random.default_rng(11)
        probes = []
        while len(probes) < 20:
            tau = rng.uniform(0, grid88.T)
            nu = rng.uniform(0, grid88.F)
            if abs(periodic_window(grid88, tau, nu)) > 0.05:
                probes.append((tau, nu))
        for tau, nu in probes:
            target = periodic_window(grid88, tau, nu)
            errs = []
            for trunc in (10, 50, 200):
                shifts = np.arange(-trunc, trunc + 1)
                kk, ll = np.meshgrid(shifts, shifts, indexing="ij")
                total = np.sum(
                    window_w(grid88, tau - kk * grid88.T, nu - ll * grid88.F)
                ) / (grid88.M * grid88.N)
                errs.append(abs(total - target) / abs(target))
            assert errs[-1] < 1e-2
            assert errs[0] > errs[1] > errs[2]


class TestRotations:
    def test_delta_moves_to_origin(self):
        m, n, npil = 8, 8, 4
        a = np.zeros((m, n), complex)
        a[m - 1, n - npil // 2] = 1.0
        out = rotate_dd(a, npil)
        assert out[0, 0] == 1.0
        assert np.count_nonzero(out) == 1

    def test_round_trip_and_permutation(self):
        rng = np.random.default_rng(0)
        a = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
        back = derotate_dd(rotate_dd(a, 4), 4)
        assert np.array_equal(back, a)
        assert sorted(np.abs(rotate_dd(a, 4)).ravel()) == pytest.approx(
            sorted(np.abs(a).ravel())
        )

    def test_odd_pilot_count_rejected(self):
        with pytest.raises(ValueError):
            rotate_dd(np.ones((8, 8), complex), 3)

    def test_phase_rotation_formula(self):
        h = np.ones((4, 4), complex)
        out = phase_rotate_tf(h, 2)
        n = np.arange(4)
        expected = np.exp(1j * n[:, None] * np.pi / 2) * np.exp(-1j * n[None, :] * np.pi / 2)
        assert np.allclose(out, expected, atol=1e-12)

    def test_magnitudes_preserved(self):
        rng = np.random.default_rng(5)
        a = rng.standard_normal((6, 10)) + 1j * rng.standard_normal((6, 10))
        assert np.allclose(np.abs(phase_rotate_tf(a, 2)), np.abs(a), rtol=1e-12)
        assert np.allclose(phase_derotate_tf(phase_rotate_tf(a, 4), 4), a, atol=1e-12)

    @given(st.integers(0, 2**32 - 1), st.sampled_from([2, 4]), st.sampled_from([1, 2, 3]))
    @settings(max_examples=20, deadline=None)
    def test_shift_theorem(self, seed, npil, delay_shift):
        """Phase rotation in T-F is the circular D-D shift, through the transform."""
        rng = np.random.default_rng(seed)
        a = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
        lhs = sfft(phase_rotate_tf(a, npil, delay_shift), 8, 8)
        rhs = rotate_dd(sfft(a, 8, 8), npil, delay_shift)
        assert np.linalg.norm(lhs - rhs) / np.linalg.norm(rhs) < 1e-10


class TestTFGrid:
    def test_invariants(self):
        grid = TFGrid.from_symbol_duration(5e-6, 4, 6)
        assert grid.F == pytest.approx(200e3)
        assert grid.S == pytest.approx(2e-5)
        assert grid.B == pytest.approx(1.2e6)

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(T=5e-6, F=100e3, N=4, M=4),  # T*F != 1
            dict(T=-5e-6, F=-200e3, N=4, M=4),
            dict(T=5e-6, F=200e3, N=1, M=4),
            dict(T=5e-6, F=200e3, N=4, M=1),
        ],
    )
    def test_rejects_bad_grids(self, kwargs):
        with pytest.raises(ValueError):
            TFGrid(**kwargs)
