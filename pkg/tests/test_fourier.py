import itertools
import json
import math
import random
from functools import reduce

import numpy as np
import pytest

from pauli_fourier.clifford import Circuit, from_gates, gate, random_clifford, synthesize
from pauli_fourier.dense import circuit_unitary, dense_distribution, twirl_identity_check
from pauli_fourier.errors import CapacityError, DimensionError, DomainError, ValidationError
from pauli_fourier.fourier import (
    CoefficientEvaluator,
    SimInstance,
    approx_distribution,
    approx_probability,
    coefficient_budget,
    dump_instance,
    enumerate_terms,
    fourier_coefficient,
    load_instance,
    measured_cap,
    normalized,
    pattern_weight,
    pbc_probability,
    probability_records,
    random_instance,
    truncation_level,
)
from pauli_fourier.inputs import (
    QubitInput,
    magic_mu,
    mixedness,
    parse_input,
    random_pure_input,
    reference_operator,
)
from pauli_fourier.pauli import SignedPauli

T = parse_input("T")
X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.diag([1.0, -1.0]).astype(complex)


def measurement_operator(n, measured, y):
    proj = {0: np.diag([1.0, 0.0]), 1: np.diag([0.0, 1.0])}
    lookup = dict(zip(measured, y))
    return reduce(np.kron, [proj[lookup[q]] if q in lookup else np.eye(2) for q in range(n)])


def dense_coefficient(inst, y, s, t):
    """Tr[U (|0><0|^n (x) X^s Z^t) U^dag (|y><y|_K (x) I)] * prod rho/2, all dense."""
    u = circuit_unitary(synthesize(inst.tableau), inst.n_qubits)
    factors = [np.diag([1.0, 0.0])] * inst.n
    weight = 1.0 + 0j
    for q, a, b in zip(inst.inputs, s, t):
        factors.append(np.linalg.matrix_power(X, a) @ np.linalg.matrix_power(Z, b))
        weight *= q.coefficient(a, b) / 2
    op = u @ reduce(np.kron, factors) @ u.conj().T
    val = np.trace(op @ measurement_operator(inst.n_qubits, inst.measured, y)) * weight
    return val


def single_qubit(inp, gates=(), measured=(0,)):
    return SimInstance.from_circuit(0, [inp], Circuit(1, [gate(*g) for g in gates]), measured)


# truncation level and budget -------------------------------------------------


def test_truncation_level_examples():
    assert truncation_level(math.sqrt(8), 8, 0.3) == 0
    assert truncation_level(0.1, 4, 0.2) == 15
    assert truncation_level(0.05, 8, 0.292893) == 14
    assert truncation_level(0.1, 4, 0.2, m=6) == 6


def test_truncation_level_domain():
    with pytest.raises(DomainError, match="vacuous"):
        truncation_level(0.1, 8, 0)
    for args in [(0.1, 8, 1.5), (0, 8, 0.3), (0.1, 2, 0.3)]:
        with pytest.raises(DomainError):
            truncation_level(*args)


def test_coefficient_budget_examples():
    assert coefficient_budget(7, 0) == 1
    assert coefficient_budget(5, 1) == 16
    assert coefficient_budget(20, 3) == 32551
    with pytest.raises(DomainError):
        coefficient_budget(3, 4)
    with pytest.raises(CapacityError):
        coefficient_budget(60, 60)


def test_enumeration_order():
    terms = list(enumerate_terms(2, 2))
    assert terms[:4] == [((0, 0), (0, 0)), ((0, 0), (1, 0)), ((1, 0), (0, 0)), ((1, 0), (1, 0))]
    weights = [pattern_weight(s, t) for s, t in terms]
    assert weights == sorted(weights)
    assert len(set(terms)) == len(terms) == 16


@pytest.mark.parametrize("m,l", [(0, 0), (1, 1), (4, 2), (6, 3), (8, 8)])
def test_enumeration_count_equals_budget(m, l):
    assert sum(1 for _ in enumerate_terms(m, l)) == coefficient_budget(m, l)


# coefficients -----------------------------------------------------------------


def test_coefficient_examples():
    inst = single_qubit(T)
    assert fourier_coefficient(inst, [0], ((0,), (0,))) == 0.5
    assert fourier_coefficient(inst, [0], ((1,), (0,))) == 0


def test_hadamard_t_example():
    inst = single_qubit(T, [("H", 0)])
    expect = 0.5 + math.sqrt(0.5) / 2
    assert approx_probability(inst, [0], 1) == pytest.approx(expect, abs=1e-15)
    assert dense_distribution(inst)[(0,)] == pytest.approx(expect, abs=1e-12)


def test_coefficients_match_dense(rng):
    for _ in range(40):
        N = int(rng.integers(1, 7))
        m = int(rng.integers(0, N + 1))
        inst = random_instance(rng, N - m, m, int(rng.integers(0, N + 1)))
        ev = CoefficientEvaluator(inst)
        y = rng.integers(0, 2, size=inst.k).tolist()
        for s, t in itertools.islice(enumerate_terms(m, m), 12):
            want = dense_coefficient(inst, y, s, t)
            assert abs(want.imag) < 1e-12
            assert abs(ev.coefficient(y, s, t) - want.real) < 1e-12


def test_full_level_is_exact(rng):
    for _ in range(60):
        N = int(rng.integers(1, 8))
        m = int(rng.integers(0, min(N, 5) + 1))
        inst = random_instance(rng, N - m, m, int(rng.integers(0, N + 1)))
        exact = dense_distribution(inst)
        approx = approx_distribution(inst, m)
        for y, p in exact.items():
            assert abs(approx[y] - p) < 1e-10


def test_distribution_agrees_with_single_outcome(rng):
    inst = random_instance(rng, 2, 3, 4)
    dist = approx_distribution(inst, 2)
    for y, v in dist.items():
        assert approx_probability(inst, y, 2) == v


def test_maximally_mixed_inputs_do_not_depend_on_level(rng):
    inst = SimInstance(2, (QubitInput((0, 0, 0)),) * 3, random_clifford(5, rng), range(5))
    y = [0, 1, 1, 0, 1]
    values = {approx_probability(inst, y, l) for l in range(4)}
    assert len(values) == 1


def test_stabilizer_only_instance(rng):
    tab = random_clifford(4, rng)
    inst = SimInstance(4, (), tab, (0, 2))
    exact = dense_distribution(inst)
    for y, p in approx_distribution(inst, 0).items():
        assert abs(p - exact[y]) < 1e-12
        assert p in (0.0, 0.25, 0.5, 1.0)


def test_refinement_bounded_by_dropped_terms(rng):
    for _ in range(15):
        inst = random_instance(rng, 1, 4, 3)
        ev = CoefficientEvaluator(inst)
        y = rng.integers(0, 2, size=inst.k).tolist()
        full = ev.probability(y, inst.m)
        for level in range(inst.m + 1):
            dropped = math.fsum(abs(ev.coefficient(y, s, t)) for s, t in enumerate_terms(inst.m, inst.m)
                                if pattern_weight(s, t) > level)
            assert abs(full - ev.probability(y, level)) <= dropped + 1e-12


def test_raw_values_are_not_clamped():
    # |11> through the identity: q'_1(00) = 1/4 - 1/4 - 1/4
    one = parse_input("one")
    inst = SimInstance.from_circuit(0, [one, one], Circuit(2, []))
    dist = approx_distribution(inst, 1)
    assert dist[(0, 0)] == -0.25
    assert dist[(1, 1)] == 0.75
    shown = normalized(dist)
    assert min(shown.values()) >= 0
    assert math.fsum(shown.values()) == pytest.approx(1)


def test_summation_order_does_not_matter(rng):
    inst = random_instance(rng, 1, 5, 6)
    ev = CoefficientEvaluator(inst)
    y = rng.integers(0, 2, size=6).tolist()
    vals = [ev.coefficient(y, s, t) for s, t in enumerate_terms(5, 3)]
    shuffled = vals[:]
    random.Random(0).shuffle(shuffled)
    assert math.fsum(vals) == math.fsum(shuffled)


def test_mixed_decay(rng):
    for _ in range(25):
        N = int(rng.integers(1, 7))
        m = int(rng.integers(1, N + 1))
        pure = random_instance(rng, N - m, m, int(rng.integers(0, N + 1)), pure=True)
        lams = rng.uniform(0, 0.9, size=m)
        mixed = SimInstance(pure.n, tuple(q.depolarize(l) for q, l in zip(pure.inputs, lams)),
                            pure.tableau, pure.measured)
        lam = min(mixedness(q) for q in mixed.inputs)
        ev_q, ev_p = CoefficientEvaluator(mixed), CoefficientEvaluator(pure)
        y = rng.integers(0, 2, size=pure.k).tolist()
        for s, t in enumerate_terms(m, m):
            w = pattern_weight(s, t)
            assert abs(ev_q.coefficient(y, s, t)) <= (1 - lam) ** w * abs(ev_p.coefficient(y, s, t)) + 1e-12


def test_pure_decay(rng):
    for _ in range(25):
        N = int(rng.integers(1, 7))
        m = int(rng.integers(1, N + 1))
        inputs = tuple(random_pure_input(rng) if rng.random() < 0.5 else T for _ in range(m))
        inst = SimInstance(N - m, inputs, random_clifford(N, rng),
                           tuple(range(int(rng.integers(0, N + 1)))))
        mu = min(magic_mu(q) for q in inputs)
        ev = CoefficientEvaluator(inst)
        ev_o = CoefficientEvaluator(inst, [reference_operator(q).coefficients for q in inputs])
        y = rng.integers(0, 2, size=inst.k).tolist()
        for s, t in enumerate_terms(m, m):
            w = pattern_weight(s, t)
            assert abs(ev.coefficient(y, s, t)) <= (1 - mu) ** w * abs(ev_o.coefficient(y, s, t)) + 1e-12


@pytest.mark.parametrize("m", [1, 2, 3])
def test_twirl_identity_exhaustive(rng, m):
    inst = random_instance(rng, 5 - m if m < 3 else 2, m)
    for a in itertools.product([0, 1], repeat=m):
        for b in itertools.product([0, 1], repeat=m):
            ok, dev = twirl_identity_check(inst, a, b)
            assert ok, (a, b, dev)


def test_twirl_multiplies_coefficients_by_signs(rng):
    inst = random_instance(rng, 1, 2, 3)
    y = [1, 0, 1]
    ev = CoefficientEvaluator(inst)
    n, m = inst.n, inst.m
    for a in itertools.product([0, 1], repeat=m):
        for b in itertools.product([0, 1], repeat=m):
            prefix = [gate("Z", n + i) for i in range(m) if a[i]] + [gate("X", n + i) for i in range(m) if b[i]]
            twisted = inst.with_tableau(from_gates(prefix, n + m).then(inst.tableau))
            ev2 = CoefficientEvaluator(twisted)
            for s, t in enumerate_terms(m, m):
                sign = (-1) ** (np.dot(s, a) + np.dot(t, b))
                assert ev2.coefficient(y, s, t) == pytest.approx(sign * ev.coefficient(y, s, t), abs=1e-15)


def test_instance_validation(rng):
    with pytest.raises(DimensionError):
        SimInstance(1, (T,), random_clifford(3, rng), (0,))
    with pytest.raises(ValidationError):
        SimInstance(1, (T,), random_clifford(2, rng), (0, 5))
    inst = random_instance(rng, 1, 1)
    with pytest.raises(DimensionError):
        approx_probability(inst, [0], 1)
    with pytest.raises(DomainError):
        approx_probability(inst, [0, 0], 2)


def test_truncation_rate_kinds(rng):
    tab = random_clifford(3, rng)
    assert SimInstance(1, (T, T), tab, ()).truncation_rate() == ("mu", pytest.approx(1 - math.sqrt(0.5)))
    mixed = T.depolarize(0.3)
    assert SimInstance(1, (mixed, mixed), tab, ()).truncation_rate() == ("lambda", pytest.approx(0.3))
    kind, rate = SimInstance(1, (mixed, T), tab, ()).truncation_rate()
    assert kind == "epsilon" and rate == pytest.approx(min(0.3, 1 - math.sqrt(0.5)))


# measured cap --------------------------------------------------------------


def test_measured_cap_examples():
    assert measured_cap([T] * 100, 0) == 41
    assert measured_cap([parse_input("zero")] * 5, 3) == 8
    generic = QubitInput.from_angles(1.0, 0.4)
    assert measured_cap([generic] * 4, 2) == 2
    with pytest.raises(DomainError):
        measured_cap([T.depolarize(0.1)], 0)


# PBC ------------------------------------------------------------------------


def test_pbc_single_qubit_example():
    assert pbc_probability([SignedPauli.from_label("Z")], [0], T, 1) == pytest.approx(0.5, abs=1e-15)


def test_pbc_zero_input_matches_stabilizer_simulation(rng):
    zero = parse_input("zero")
    for _ in range(20):
        n = int(rng.integers(1, 7))
        k = int(rng.integers(0, n + 1))
        u = random_clifford(n, rng)
        from pauli_fourier.clifford import conjugate

        gens = [conjugate(u, SignedPauli.single(n, i, "Z")) for i in range(k)]
        signs = rng.integers(0, 2, size=k).tolist()
        # |0^n> is the stabilizer state of Z_i; Pi is a product of projectors
        proj = np.eye(2**n, dtype=complex)
        from pauli_fourier.dense import pauli_matrix

        for g, b in zip(gens, signs):
            proj = proj @ (np.eye(2**n) + (-1) ** b * pauli_matrix(g)) / 2
        want = proj[0, 0].real
        assert pbc_probability(gens, signs, zero, n, n) == pytest.approx(want, abs=1e-12)


def test_pbc_contract_checks():
    with pytest.raises(Exception) as err:
        pbc_probability([SignedPauli.from_label("X"), SignedPauli.from_label("Z")], [0, 0], T, 1)
    assert type(err.value).__name__ == "ContractViolation"
    with pytest.raises(DimensionError):
        pbc_probability([SignedPauli.from_label("Z")], [0, 1], T, 1)
    with pytest.raises(DomainError):
        pbc_probability([SignedPauli.from_label("Z")], [0], T, 2)


# files and records -----------------------------------------------------------


def test_instance_file_round_trip(rng):
    inst = random_instance(rng, 2, 2, 3)
    text = dump_instance(inst)
    back = load_instance(text)
    assert back.tableau == inst.tableau
    assert back.inputs == inst.inputs and back.measured == inst.measured and back.n == inst.n
    assert dump_instance(back) == text


def test_instance_file_parsing():
    text = "# demo\nn 1\nm 1\ninput magicT(0.2)\nmeasured 0 1\nqubits 2\nH 1\nCNOT 1 0\n"
    inst = load_instance(text)
    assert inst.inputs == (parse_input("magicT(0.2)"),)
    assert inst.circuit.gates == (gate("H", 1), gate("CNOT", 1, 0))
    for bad in ["n 1\nm 2\ninput T\nmeasured 0\nqubits 3\n", "n 1\nm 1\ninput T\nqubits 2\n",
                "n 1\nm 1\ninput T\nmeasured 0\n", "n 1\nfoo 2\n"]:
        with pytest.raises(ValidationError):
            load_instance(bad)


def test_probability_records(rng):
    inst = random_instance(rng, 1, 2, 2)
    recs = probability_records(inst, 1)
    assert len(recs) == 4
    assert list(recs[0]) == ["y", "l", "q_approx", "coeff_count", "wall_ms"]
    assert recs[0]["coeff_count"] == 7
    json.dumps(recs)
    assert recs[3]["y"] == "11"
    assert recs[3]["q_approx"] == approx_probability(inst, (1, 1), 1)
