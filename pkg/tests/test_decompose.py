"""Conditional expectations, pinchings and the normal + nilpotent split."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from specnest.decompose import (
    convergence_report,
    decompose,
    expectation_dyadic,
    expectation_full,
    pinch_commutant,
)
from specnest.hsnest import build_nest, default_curve
from specnest.matrices import normalized_trace, operator_norm

SHEAR = np.array([[1, 1], [0, 2]], dtype=complex)


def random_matrix(seed: int, n: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2 * n)


class TestShearExample:
    def test_normal_part_spectrum(self):
        res = decompose(SHEAR)
        eigs = np.sort(np.linalg.eigvals(res.N).real)
        assert eigs == pytest.approx([1.0, 2.0], abs=1e-10)

    def test_nilpotent_part(self):
        # [DERIVED] Q is unitarily equivalent to [[0,1],[0,0]]: rank one,
        # square zero, norm one.
        res = decompose(SHEAR)
        Q = res.Q
        assert np.linalg.norm(Q @ Q, 2) < 1e-10
        assert operator_norm(Q) == pytest.approx(1.0, abs=1e-10)

    def test_diagnostics_are_tight(self):
        d = decompose(SHEAR).diagnostics
        assert d["reconstruction_error"] < 1e-12
        assert d["normality_defect"] < 1e-10
        assert d["spectrum_gap"] < 1e-10
        assert d["q_spectral_radius"] < 1e-10

    def test_ordering_follows_curve(self):
        res = decompose(SHEAR)
        ts = [t for t, _, _ in res.ordering]
        assert ts == sorted(ts)
        values = [z for _, _, z in res.ordering]
        assert sorted(v.real for v in values) == pytest.approx([1.0, 2.0], abs=1e-10)


class TestExpectations:
    def test_trace_preserved_at_every_level(self):
        T = random_matrix(31, 6)
        nest = build_nest(T, default_curve(T))
        for n in range(0, 8):
            En = expectation_dyadic(T, nest, n)
            assert normalized_trace(En) == pytest.approx(normalized_trace(T), abs=1e-12)
        assert normalized_trace(expectation_full(T, nest)) == pytest.approx(
            normalized_trace(T), abs=1e-12
        )

    def test_full_expectation_fixes_its_own_output(self):
        T = random_matrix(32, 5)
        nest = build_nest(T, default_curve(T))
        N = expectation_full(T, nest)
        assert np.allclose(expectation_full(N, nest), N, atol=1e-10)

    def test_dyadic_saturates_to_full(self):
        T = random_matrix(33, 5)
        nest = build_nest(T, default_curve(T))
        N = expectation_full(T, nest)
        deep = expectation_dyadic(T, nest, 40)
        assert np.allclose(deep, N, atol=1e-10)

    def test_expectation_output_is_normal(self):
        T = random_matrix(34, 6)
        nest = build_nest(T, default_curve(T))
        E = expectation_dyadic(T, nest, 3)
        defect = np.linalg.norm(E @ E.conj().T - E.conj().T @ E, 2)
        assert defect < 1e-10 * max(1.0, operator_norm(E) ** 2)

    def test_rejects_negative_level(self):
        T = random_matrix(35, 4)
        nest = build_nest(T, default_curve(T))
        with pytest.raises(ValueError):
            expectation_dyadic(T, nest, -1)

    def test_rejects_non_invariant_nest(self):
        T = random_matrix(36, 4)
        other = random_matrix(37, 4)
        nest = build_nest(other, default_curve(other))
        with pytest.raises(ValueError):
            expectation_full(T, nest)


class TestPinching:
    def test_level_zero_pinch_is_identity_map(self):
        T = random_matrix(41, 5)
        nest = build_nest(T, default_curve(T))
        assert np.allclose(pinch_commutant(T, nest, 0), T, atol=1e-12)

    def test_full_pinch_keeps_diagonal_blocks_only(self):
        T = random_matrix(42, 5)
        nest = build_nest(T, default_curve(T))
        P = pinch_commutant(T, nest, None)
        B = nest.basis.conj().T @ P @ nest.basis
        # With 5 distinct eigenvalues every increment is 1-dimensional.
        assert np.linalg.norm(B - np.diag(np.diag(B)), 2) < 1e-10

    def test_pinch_preserves_trace(self):
        T = random_matrix(43, 6)
        nest = build_nest(T, default_curve(T))
        for n in (1, 3, None):
            P = pinch_commutant(T, nest, n)
            assert normalized_trace(P) == pytest.approx(normalized_trace(T), abs=1e-12)

    def test_pinch_is_norm_contraction(self):
        T = random_matrix(44, 6)
        nest = build_nest(T, default_curve(T))
        for n in (1, 2, None):
            assert operator_norm(pinch_commutant(T, nest, n)) <= operator_norm(T) + 1e-10


class TestDecomposeInvariants:
    @settings(deadline=None, max_examples=25)
    @given(st.integers(0, 5000), st.integers(3, 8))
    def test_soundness_on_random_matrices(self, seed, n):
        T = random_matrix(seed, n)
        res = decompose(T)
        d = res.diagnostics
        normT = d["operator_norm"]
        assert d["reconstruction_error"] <= 1e-12 * normT
        assert d["normality_defect"] <= 1e-10 * max(operator_norm(res.N), 1e-30) ** 2
        assert d["spectrum_gap"] <= 1e-8
        assert d["strict_upper_defect"] <= 1e-8 * normT
        assert d["q_spectral_radius"] <= 1e-8 * normT

    def test_normal_input_has_zero_nilpotent_part(self):
        rng = np.random.default_rng(51)
        d = rng.standard_normal(5) + 1j * rng.standard_normal(5)
        U, _ = np.linalg.qr(rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5)))
        T = U @ np.diag(d) @ U.conj().T
        res = decompose(T)
        assert operator_norm(res.Q) < 1e-9


class TestConvergenceReport:
    def test_all_checks_pass_on_random_matrix(self):
        report = convergence_report(random_matrix(61, 8))
        assert report.all_ok, report.failures()[:5]

    def test_row_families_present(self):
        report = convergence_report(random_matrix(62, 6), n_range=range(0, 5))
        checks = {r.check for r in report.rows}
        assert checks == {"norm_gap", "remainder_radius", "det_gap", "pinch_det_monotone"}

    def test_det_gap_binds_only_at_finest_level(self):
        report = convergence_report(random_matrix(63, 6), n_range=range(0, 5))
        rows = [r for r in report.rows if r.check == "det_gap"]
        assert all(np.isinf(r.bound) for r in rows if r.n < 4)
        assert all(np.isfinite(r.bound) for r in rows if r.n == 4)
