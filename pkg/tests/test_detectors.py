import math

import numpy as np
import pytest

from qmultitest import (
    Detector,
    Ensemble,
    build_split_detector,
    check_detector,
    compose_with_binary,
    density_from_matrix,
    holevo_helstrom,
    pgm,
    pure_state,
    random_density,
    recursive_detector,
    tensor_power,
    validate_detector,
    wedge,
)
from qmultitest import linalg
from qmultitest.errors import (
    DimensionCapExceeded,
    PartialsEqualIdentity,
    PartialsExceedIdentity,
    PSDViolation,
    SplitTooSmall,
)
from qmultitest.selfcheck import random_feasible_partials


def binary_sum_error(rho1, rho2, det):
    return linalg.real_scalar(
        linalg.trace_product(rho1.matrix, det.elements[1])
        + linalg.trace_product(rho2.matrix, det.elements[0])
    )


def embed_qubit_in_qutrit(rho):
    out = np.zeros((3, 3), dtype=complex)
    out[:2, :2] = rho.matrix
    return density_from_matrix(out)


class TestHolevoHelstrom:
    def test_orthogonal_diagonal(self):
        det = holevo_helstrom(
            density_from_matrix(np.diag([1.0, 0.0])),
            density_from_matrix(np.diag([0.0, 1.0])),
        )
        np.testing.assert_allclose(det.elements[0], np.diag([1.0, 0.0]), atol=1e-12)
        np.testing.assert_allclose(det.elements[1], np.diag([0.0, 1.0]), atol=1e-12)

    def test_equal_states(self):
        rho = random_density(2, 2, 1)
        det = holevo_helstrom(rho, rho)
        np.testing.assert_allclose(det.elements[0], np.zeros((2, 2)), atol=1e-12)
        np.testing.assert_allclose(det.elements[1], np.eye(2), atol=1e-12)

    def test_elements_are_projections(self):
        for seed in range(10):
            det = holevo_helstrom(
                random_density(3, 3, seed), random_density(3, 3, 100 + seed)
            )
            for e in det.elements:
                assert np.max(np.abs(e @ e - e)) <= 1e-9

    def test_sum_error_matches_trace_norm(self):
        # optimal summed error is 1 - ||rho1 - rho2||_1 / 2
        rng = np.random.default_rng(5)
        for _ in range(20):
            d = int(rng.integers(2, 4))
            s1, s2 = int(rng.integers(0, 1 << 30)), int(rng.integers(0, 1 << 30))
            rho1, rho2 = random_density(d, d, s1), random_density(d, d, s2)
            det = holevo_helstrom(rho1, rho2)
            expected = 1.0 - 0.5 * np.sum(
                np.abs(np.linalg.eigvalsh(rho1.matrix - rho2.matrix))
            )
            assert binary_sum_error(rho1, rho2, det) == pytest.approx(
                expected, abs=1e-10
            )


class TestWedge:
    def test_orthogonal_pures_vanish(self):
        out = wedge(pure_state([1.0, 0.0]), pure_state([0.0, 1.0]))
        assert np.max(np.abs(out)) <= 1e-12

    def test_same_state_returns_it(self):
        rho = random_density(2, 2, 9)
        out = wedge(rho, rho)
        np.testing.assert_allclose(out, rho.matrix, atol=1e-12)
        assert np.trace(out).real == pytest.approx(1.0, abs=1e-12)

    def test_trace_identity_on_seeded_pairs(self):
        for seed in range(100):
            d = 2 if seed % 2 == 0 else 3
            rho1 = random_density(d, d, 1000 + seed)
            rho2 = random_density(d, d, 2000 + seed)
            got = np.trace(wedge(rho1, rho2)).real
            expected = 1.0 - 0.5 * linalg.trace_norm(rho1.matrix - rho2.matrix)
            assert abs(got - expected) <= 1e-10


class TestPgm:
    def test_orthogonal_pures_discriminate_exactly(self):
        states = [pure_state(v) for v in np.eye(3)]
        det = pgm(states)
        for k, rho in enumerate(states):
            hit = linalg.real_scalar(
                linalg.trace_product(rho.matrix, det.elements[k])
            )
            assert hit == pytest.approx(1.0, abs=1e-10)

    def test_copies_of_same_state(self):
        rho = random_density(2, 2, 3)
        det = pgm([rho, rho, rho])
        for e in det.elements:
            np.testing.assert_allclose(e, np.eye(2) / 3, atol=1e-9)

    def test_kernel_share_keeps_povm_valid(self):
        # two pure states in d=3 leave a one-dimensional kernel
        det = pgm([pure_state([1, 0, 0]), pure_state([0, 1, 0])])
        assert check_detector(det) == []

    def test_factor_two_suboptimality(self):
        for seed in range(50):
            rho1 = random_density(2, 2, 3000 + seed)
            rho2 = random_density(2, 2, 4000 + seed)
            sqm = pgm([rho1, rho2])
            opt = holevo_helstrom(rho1, rho2)
            assert binary_sum_error(rho1, rho2, sqm) <= (
                2.0 * binary_sum_error(rho1, rho2, opt) + 1e-9
            )

    def test_ill_conditioned_average_stays_valid(self):
        # a nearly-pure state against a pure state at several copies
        rho = random_density(2, 2, 77)
        peak = pure_state([0.3, 0.9])
        for n in (3, 5):
            det = pgm([tensor_power(rho, n), tensor_power(peak, n)])
            assert check_detector(det) == []


class TestComposeWithBinary:
    def test_zero_partials_reduce_to_binary(self):
        rho1, rho2 = random_density(2, 2, 11), random_density(2, 2, 12)
        binary = holevo_helstrom(rho1, rho2)
        det, trace = compose_with_binary([np.zeros((2, 2))], binary)
        np.testing.assert_allclose(det.elements[0], binary.elements[0], atol=1e-12)
        np.testing.assert_allclose(det.elements[1], binary.elements[1], atol=1e-12)
        np.testing.assert_allclose(trace.residual, np.eye(2), atol=1e-12)

    def test_scalar_partials_scale_binary(self):
        rho1, rho2 = random_density(2, 2, 13), random_density(2, 2, 14)
        binary = holevo_helstrom(rho1, rho2)
        det, _ = compose_with_binary([np.eye(2) * 0.5], binary)
        np.testing.assert_allclose(
            det.elements[0], binary.elements[0] / 2, atol=1e-10
        )
        np.testing.assert_allclose(
            det.elements[1], binary.elements[1] / 2, atol=1e-10
        )

    def test_random_partials_yield_valid_povm(self):
        for seed in range(20):
            rho1 = random_density(2, 2, 5000 + seed)
            rho2 = random_density(2, 2, 6000 + seed)
            partials = random_feasible_partials(2, 1, 7000 + seed)
            det, trace = compose_with_binary(
                partials, holevo_helstrom(rho1, rho2)
            )
            assert check_detector(det) == []
            np.testing.assert_allclose(
                trace.residual, np.eye(2) - trace.partial_sum, atol=1e-10
            )
            w_defect = np.linalg.eigvalsh(trace.sqrt_defect)
            assert w_defect[0] >= -1e-10 and w_defect[-1] <= 1.0 + 1e-10
            gap = np.linalg.eigvalsh(
                trace.partial_sum - trace.sqrt_defect @ trace.sqrt_defect
            )
            assert gap[0] >= -1e-9

    def test_rejects_oversized_partials(self):
        binary = holevo_helstrom(random_density(2, 2, 1), random_density(2, 2, 2))
        with pytest.raises(PartialsExceedIdentity):
            compose_with_binary([np.eye(2) * 1.5], binary)

    def test_rejects_exhausted_identity(self):
        binary = holevo_helstrom(random_density(2, 2, 1), random_density(2, 2, 2))
        with pytest.raises(PartialsEqualIdentity):
            compose_with_binary([np.eye(2)], binary)

    def test_rejects_negative_partials(self):
        binary = holevo_helstrom(random_density(2, 2, 1), random_density(2, 2, 2))
        with pytest.raises(PSDViolation):
            compose_with_binary([np.diag([0.5, -0.1])], binary)

    def test_rejects_empty_partials_and_bad_shapes(self):
        binary = holevo_helstrom(random_density(2, 2, 1), random_density(2, 2, 2))
        with pytest.raises(ValueError):
            compose_with_binary([], binary)
        with pytest.raises(DimensionMismatch):
            compose_with_binary([np.eye(3) * 0.1], binary)
        with pytest.raises(ValueError):
            compose_with_binary(
                [np.eye(2) * 0.1],
                binary,
                states=(
                    random_density(2, 2, 1),
                    random_density(2, 2, 2),
                    [],  # one state per partial is required
                ),
            )

    def test_rejects_non_binary_detector(self):
        triple = pgm([random_density(2, 2, k) for k in range(3)])
        with pytest.raises(ValueError):
            compose_with_binary([np.eye(2) * 0.1], triple)


def orthogonal_triple():
    return Ensemble(tuple(pure_state(v) for v in np.eye(3)))


class TestBuildSplitDetector:
    def test_orthogonal_triple_is_exact(self):
        det, _, report = build_split_detector(orthogonal_triple(), 2, 0.5)
        total = 0.0
        for k, state in enumerate(orthogonal_triple().states):
            power = tensor_power(state, 2)
            total += linalg.real_scalar(
                1.0 - linalg.trace_product(power.matrix, det.elements[k])
            )
        assert abs(total) <= 1e-9
        assert report.n1 == 1 and report.n2 == 1

    def test_orthogonal_tail_leaves_binary_error(self):
        # third state orthogonal to the first pair's block: only the
        # binary overlap term survives
        rho1 = embed_qubit_in_qutrit(random_density(2, 2, 21))
        rho2 = embed_qubit_in_qutrit(random_density(2, 2, 22))
        rho3 = pure_state([0.0, 0.0, 1.0])
        ens = Ensemble((rho1, rho2, rho3))
        det, trace, _ = build_split_detector(ens, 2, 0.5)
        total = 0.0
        for k, state in enumerate(ens.states):
            power = tensor_power(state, 2)
            total += linalg.real_scalar(
                1.0 - linalg.trace_product(power.matrix, det.elements[k])
            )
        expected = np.trace(
            wedge(tensor_power(rho1, 2), tensor_power(rho2, 2))
        ).real
        assert abs(total - expected) <= 1e-9
        assert trace.wedge_trace == pytest.approx(expected, abs=1e-10)

    @pytest.mark.parametrize("sub", ["pgm", "recursive"])
    def test_seeded_build_is_valid(self, sub):
        ens = Ensemble(tuple(random_density(2, 2, 30 + k) for k in range(3)))
        det, trace, report = build_split_detector(ens, 4, 0.5, sub)
        assert check_detector(det) == []
        assert report.n1 == 2 and report.n2 == 2
        assert trace.term_wedge == pytest.approx(2 * trace.wedge_trace)
        assert trace.term_partials is not None and trace.term_rest is not None

    def test_weight_moves_the_split(self):
        ens = Ensemble(tuple(random_density(2, 2, 40 + k) for k in range(3)))
        _, _, report = build_split_detector(ens, 5, 0.4)
        assert (report.n1, report.n2) == (2, 3)

    def test_too_few_copies(self):
        ens = Ensemble(tuple(random_density(2, 2, 50 + k) for k in range(3)))
        with pytest.raises(SplitTooSmall):
            build_split_detector(ens, 1, 0.5)
        with pytest.raises(SplitTooSmall):
            build_split_detector(ens, 2, 0.2)

    def test_dimension_cap(self):
        ens = Ensemble(tuple(random_density(2, 2, 60 + k) for k in range(3)))
        with pytest.raises(DimensionCapExceeded):
            build_split_detector(ens, 4, 0.5, dim_cap=8)


class TestRecursiveDetector:
    def test_two_states_is_binary_test(self):
        rho1, rho2 = random_density(2, 2, 71), random_density(2, 2, 72)
        ens = Ensemble((rho1, rho2))
        rec = recursive_detector(ens, 3)
        direct = holevo_helstrom(tensor_power(rho1, 3), tensor_power(rho2, 3))
        for a, b in zip(rec.elements, direct.elements):
            np.testing.assert_allclose(a, b, atol=1e-12)

    def test_three_states_use_binary_sub_tests(self):
        # with r = 3 the two sub-problems are pairs, so the tail element
        # is the tensor product of two binary-test projections
        ens = Ensemble(tuple(random_density(2, 2, 80 + k) for k in range(3)))
        rho1, rho2, rho3 = ens.states
        det = recursive_detector(ens, 4, 0.5)
        sub1 = holevo_helstrom(tensor_power(rho1, 2), tensor_power(rho3, 2))
        sub2 = holevo_helstrom(tensor_power(rho2, 2), tensor_power(rho3, 2))
        expected_tail = np.kron(sub1.elements[1], sub2.elements[1])
        np.testing.assert_allclose(det.elements[2], expected_tail, atol=1e-10)

    def test_four_states(self):
        ens = Ensemble(tuple(random_density(2, 2, 90 + k) for k in range(4)))
        det = recursive_detector(ens, 4, 0.5)
        assert len(det.elements) == 4
        assert check_detector(det) == []
        total = 0.0
        for k, state in enumerate(ens.states):
            power = tensor_power(state, 4)
            total += linalg.real_scalar(
                1.0 - linalg.trace_product(power.matrix, det.elements[k])
            )
        assert 0.0 <= total <= 4.0 + 1e-9

    def test_exhausted_budget_falls_back_to_pgm(self):
        # r = 4 at n = 2 gives one-copy sub-problems with three states,
        # which cannot split further and must use the square-root detector
        ens = Ensemble(tuple(random_density(2, 2, 95 + k) for k in range(4)))
        det = recursive_detector(ens, 2, 0.5)
        assert check_detector(det) == []
        sub1 = pgm([ens.states[0], ens.states[2], ens.states[3]])
        sub2 = pgm([ens.states[1], ens.states[2], ens.states[3]])
        expected_tail = np.kron(sub1.elements[1], sub2.elements[1])
        np.testing.assert_allclose(det.elements[2], expected_tail, atol=1e-10)


class TestDetectorChecks:
    def test_corrupted_element_is_flagged(self):
        det = pgm([random_density(2, 2, 1), random_density(2, 2, 2)])
        bad = Detector(det.dim, (det.elements[0] * 1.1, det.elements[1]))
        assert check_detector(bad) != []
        with pytest.raises(PSDViolation):
            validate_detector(bad)

    def test_product_elements_factorize_traces(self):
        # tr[rho^(x)2 (A (x) B)] = tr[rho A] tr[rho B]
        rng = np.random.default_rng(31)
        rho = random_density(2, 2, 31)
        for _ in range(10):
            a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            a = (a + a.conj().T) / 2
            b = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            b = (b + b.conj().T) / 2
            lhs = np.trace(tensor_power(rho, 2).matrix @ np.kron(a, b))
            rhs = np.trace(rho.matrix @ a) * np.trace(rho.matrix @ b)
            assert abs(lhs - rhs) <= 1e-12
