import itertools
import math
from fractions import Fraction
from functools import reduce

import numpy as np
import pytest

from pauli_fourier.dense import DenseState, apply_circuit, circuit_unitary
from pauli_fourier.errors import CapacityError, DomainError, ValidationError
from pauli_fourier.iqp import (
    IqpCircuit,
    all_iqp_circuits,
    exhaustive_average_second_moment,
    format_iqp,
    fourier_transform,
    gowers_u2_bruteforce,
    gowers_u2_increment,
    iqp_approx_distribution,
    iqp_approx_probability,
    iqp_dense_distribution,
    iqp_fourier_coefficient,
    ensemble_moment_target_exact,
    output_distribution,
    parse_iqp,
    phase_function,
    push_result_matrix,
    push_x_through_diagonal,
    random_iqp,
    second_moment_bound,
    second_moment_bruteforce,
    second_moment_exact_no_T,
    second_moment_exact_rational,
)

X = np.array([[0, 1], [1, 0]], dtype=complex)
SQRT2 = math.sqrt(2)


def t_circuit():
    return IqpCircuit(np.zeros((1, 1)), [0], [1])


def single_cz():
    return IqpCircuit([[0, 1], [1, 0]], [0, 0], [0, 0])


def diagonal_matrix(c):
    return circuit_unitary(c.gates(), c.n) if c.gates() else np.eye(2**c.n)


def test_phase_function_examples(rng):
    assert phase_function(random_iqp(4, rng), [0, 0, 0, 0]) == 1
    assert phase_function(single_cz(), [1, 1]) == pytest.approx(-1)
    c = IqpCircuit(np.diag([1]), [1], [1])
    assert phase_function(c, [1]) == pytest.approx(np.exp(1j * math.pi * 7 / 4))


def test_phase_function_is_the_gate_diagonal(rng):
    for _ in range(20):
        c = random_iqp(int(rng.integers(1, 5)), rng)
        diag = np.diag(diagonal_matrix(c))
        for idx, x in enumerate(itertools.product([0, 1], repeat=c.n)):
            assert abs(phase_function(c, x) - diag[idx]) < 1e-14


def test_output_distribution_matches_statevector(rng):
    for _ in range(10):
        c = random_iqp(3, rng)
        state = apply_circuit(DenseState.zero(3), c.full_gates())
        np.testing.assert_allclose(output_distribution(c), np.abs(state.data) ** 2, atol=1e-12)


def test_parseval(rng):
    for n in range(1, 9):
        c = random_iqp(n, rng)
        assert math.fsum(np.abs(fourier_transform(c)) ** 2) == pytest.approx(1, abs=1e-12)


def test_push_examples():
    r = push_x_through_diagonal(random_iqp(3, np.random.default_rng(0)), [0, 0, 0])
    assert r.phase == 0 and r.s_exponents == (0, 0, 0) and r.z_mask == (0, 0, 0)
    r = push_x_through_diagonal(t_circuit(), [1])
    assert (r.phase, r.s_exponents, r.x_mask, r.z_mask) == (7, (1,), (1,), (0,))


def _check_push(c, s):
    x_s = reduce(np.kron, [X if v else np.eye(2) for v in s])
    d = diagonal_matrix(c)
    got = push_result_matrix(push_x_through_diagonal(c, s))
    assert np.max(np.abs(d @ x_s @ d.conj().T - got)) < 1e-14


def test_push_exhaustive_small():
    for n in (1, 2, 3):
        for c in all_iqp_circuits(n) if n < 3 else itertools.islice(all_iqp_circuits(n), 0, None, 7):
            for s in itertools.product([0, 1], repeat=n):
                _check_push(c, s)


def test_push_random(rng):
    for _ in range(50):
        n = int(rng.integers(4, 7))
        _check_push(random_iqp(n, rng), rng.integers(0, 2, size=n).tolist())


def test_coefficient_examples(rng):
    c = random_iqp(4, rng)
    assert iqp_fourier_coefficient(c, [0, 1, 1, 0], [0] * 4, 0.3) == pytest.approx(2**-4)
    for eps in (0, 0.2, 0.7):
        got = iqp_fourier_coefficient(t_circuit(), [0], [1], eps)
        assert got == pytest.approx((1 - eps) / (2 * SQRT2), abs=1e-15)


def test_coefficients_match_dense(rng):
    zs = np.diag([1.0, -1.0])
    for _ in range(20):
        c = random_iqp(5, rng)
        h = reduce(np.kron, [np.array([[1, 1], [1, -1]]) / SQRT2] * 5)
        v = h @ diagonal_matrix(c) @ h
        eps = float(rng.uniform())
        s = rng.integers(0, 2, size=5).tolist()
        y = rng.integers(0, 2, size=5).tolist()
        z_s = reduce(np.kron, [zs if b else np.eye(2) for b in s])
        idx = int("".join(map(str, y)), 2)
        want = (v @ z_s @ v.conj().T)[idx, idx].real * np.prod([(1 - eps) / 2 if b else 0.5 for b in s])
        assert abs(iqp_fourier_coefficient(c, y, s, eps) - want) < 1e-12


def test_approx_examples(rng):
    c = random_iqp(4, rng)
    for l in range(5):
        np.testing.assert_allclose(iqp_approx_distribution(c, 1.0, l), 2**-4, atol=1e-15)
    got = iqp_approx_probability(t_circuit(), 0.2, [0], 1)
    assert got == pytest.approx(0.5 + 0.8 / (2 * SQRT2), abs=1e-15)
    assert got == pytest.approx(0.782843, abs=1e-6)


def test_full_level_matches_density_matrix(rng):
    for n in range(1, 9):
        c = random_iqp(n, rng)
        eps = float(rng.uniform())
        approx = iqp_approx_distribution(c, eps, n)
        np.testing.assert_allclose(approx, iqp_dense_distribution(c, eps), atol=1e-10)
        y = rng.integers(0, 2, size=n).tolist()
        assert iqp_approx_probability(c, eps, y, n) == pytest.approx(approx[int("".join(map(str, y)), 2)], abs=1e-14)


def test_noiseless_full_level_is_output_distribution(rng):
    for n in range(1, 7):
        c = random_iqp(n, rng)
        np.testing.assert_allclose(iqp_approx_distribution(c, 0.0, n), output_distribution(c), atol=1e-12)


def test_approx_domain():
    with pytest.raises(DomainError):
        iqp_approx_probability(t_circuit(), 1.5, [0], 1)
    with pytest.raises(DomainError):
        iqp_approx_probability(t_circuit(), 0.5, [0], 2)


def test_second_moment_examples():
    assert second_moment_exact_no_T(IqpCircuit.empty(3)) == 1
    assert second_moment_exact_no_T(single_cz()) == 0.25
    assert second_moment_bruteforce(single_cz()) == pytest.approx(0.25, abs=1e-15)
    with pytest.raises(DomainError):
        second_moment_exact_no_T(t_circuit())


def test_second_moment_exact_matches_brute_force(rng):
    for _ in range(60):
        c = random_iqp(int(rng.integers(1, 9)), rng, with_t=False)
        assert abs(second_moment_exact_no_T(c) - second_moment_bruteforce(c)) < 1e-12
        assert second_moment_bound(c) == second_moment_exact_no_T(c)


def test_second_moment_bound_examples():
    assert second_moment_bound(t_circuit()) == 0.75
    # p0 = (2 + sqrt2)/4, p1 = (2 - sqrt2)/4: p0^2 + p1^2 = 3/4
    assert second_moment_bruteforce(t_circuit()) == pytest.approx(0.75, abs=1e-15)
    assert second_moment_exact_rational(t_circuit()) == Fraction(3, 4)


def test_second_moment_bound_holds(rng):
    for _ in range(100):
        c = random_iqp(int(rng.integers(1, 9)), rng)
        assert second_moment_bruteforce(c) <= second_moment_bound(c) + 1e-12


def test_gowers_examples(rng):
    assert gowers_u2_bruteforce(IqpCircuit.empty(3)) == pytest.approx(1)
    assert gowers_u2_bruteforce(single_cz()) == pytest.approx(0.25)
    for _ in range(50):
        c = random_iqp(int(rng.integers(1, 7)), rng)
        increment = gowers_u2_increment(c)
        assert increment == pytest.approx(second_moment_bruteforce(c), abs=1e-12)
        assert gowers_u2_bruteforce(c) == pytest.approx(increment, abs=1e-12)


def test_gowers_capacity():
    with pytest.raises(CapacityError):
        gowers_u2_bruteforce(IqpCircuit.empty(11))


def test_rational_second_moment_matches_float(rng):
    for _ in range(20):
        c = random_iqp(int(rng.integers(1, 5)), rng)
        assert float(second_moment_exact_rational(c)) == pytest.approx(second_moment_bruteforce(c), abs=1e-14)


def test_exhaustive_averages():
    assert sum(1 for _ in all_iqp_circuits(1)) == 8
    assert exhaustive_average_second_moment(1) == Fraction(3, 4) == ensemble_moment_target_exact(1)
    assert exhaustive_average_second_moment(2) == Fraction(7, 16) == ensemble_moment_target_exact(2)


def test_file_round_trip(rng):
    for _ in range(20):
        c = random_iqp(int(rng.integers(1, 7)), rng)
        text = format_iqp(c)
        assert parse_iqp(text) == c
        assert format_iqp(parse_iqp(text)) == text


def test_file_folding():
    c = parse_iqp("iqp 2\n# comment\nT 0\nT 0\nT 1\nS 1\nZ 1\nCZ 0 1\nCZ 1 0\nCZ 0 1\n")
    assert c.gamma.tolist() == [1, 1]
    assert c.t.tolist() == [0, 1]
    assert c.beta.tolist() == [0, 1]
    assert c.A[0, 1] == 1
    assert format_iqp(c) == "iqp 2\nCZ 0 1\nZ 1\nS 0\nS 1\nT 1\n"
    assert parse_iqp("iqp 1\nT 0\n" * 1 + "T 0\n" * 7) == IqpCircuit.empty(1)


@pytest.mark.parametrize("text", ["", "CZ 0 1", "iqp 2\nCZ 0 0", "iqp 2\nT 2", "iqp 2\nH 0",
                                  "iqp 2\nCZ 0"])
def test_file_errors(text):
    with pytest.raises(ValidationError):
        parse_iqp(text)


def test_circuit_validation():
    with pytest.raises(ValidationError):
        IqpCircuit([[0, 1], [0, 0]], [0, 0], [0, 0])
