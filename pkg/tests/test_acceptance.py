"""End-to-end acceptance checks.

Every test carries an ``acceptance`` mark; ``conftest.py`` prints one
PASS/FAIL line per label at the end of the run.
"""

import math
from collections import Counter
from fractions import Fraction
from functools import reduce

import numpy as np
import pytest
from scipy import stats

from pauli_fourier.clifford import conjugate, random_clifford, synthesize
from pauli_fourier.dense import (
    DenseState,
    all_outcomes,
    apply_circuit,
    dense_distribution,
    pauli_matrix,
)
from pauli_fourier.experiments import ExperimentConfig, random_commuting_paulis, run
from pauli_fourier.fourier import (
    CoefficientEvaluator,
    SimInstance,
    approx_probability,
    coefficient_budget,
    enumerate_terms,
    measured_cap,
    pattern_weight,
    pbc_probability,
    random_instance,
)
from pauli_fourier.inputs import (
    magic_mu,
    mixedness,
    parse_input,
    pauli_rank_n,
    pauli_rank_single,
    random_pure_input,
    reference_operator,
)
from pauli_fourier.iqp import (
    exhaustive_average_second_moment,
    iqp_approx_distribution,
    iqp_dense_distribution,
    average_second_moment_mc,
    random_iqp,
    second_moment_bound,
    second_moment_bruteforce,
    second_moment_exact_no_T,
)
from pauli_fourier.pauli import SignedPauli
from pauli_fourier.projector import ProjectorEvaluator, projector_expectation

pytestmark = pytest.mark.slow

T = parse_input("T")


def acceptance(label):
    return pytest.mark.acceptance(label)


@acceptance("1 exactness at full truncation")
def test_exact_at_full_level():
    rng = np.random.default_rng(101)
    worst = 0.0
    for _ in range(200):
        N = int(rng.integers(1, 9))
        m = int(rng.integers(0, N + 1))
        k = int(rng.integers(0, N + 1))
        inst = random_instance(rng, N - m, m, k)
        exact = dense_distribution(inst)
        y = list(all_outcomes(inst.k)[int(rng.integers(2**inst.k))])
        got = approx_probability(inst, y, m)
        worst = max(worst, abs(got - exact[tuple(y)]))
    assert worst < 1e-10


@acceptance("2 projector evaluator vs dense traces")
def test_projector_matches_dense():
    rng = np.random.default_rng(102)
    for _ in range(200):
        n = int(rng.integers(1, 7))
        r = int(rng.integers(0, n + 1))
        u = random_clifford(n, rng)
        gens = [conjugate(u, SignedPauli.single(n, i, "Z")) for i in range(r)]
        # commuting probe: image of a Pauli with no X part on the first r qubits
        x = int(rng.integers(2**n)) & ~((1 << r) - 1)
        q = conjugate(u, SignedPauli(n, x, int(rng.integers(2**n)), int(rng.integers(4))))
        measured = sorted(rng.choice(n, size=int(rng.integers(0, n + 1)), replace=False).tolist())
        y = rng.integers(0, 2, size=len(measured)).tolist()
        proj = np.eye(2**n, dtype=complex)
        for g in gens:
            proj = proj @ (np.eye(2**n) + pauli_matrix(g)) / 2
        lookup = dict(zip(measured, y))
        meas = reduce(np.kron, [np.diag([1.0 - lookup[j], float(lookup[j])]) if j in lookup
                                else np.eye(2) for j in range(n)])
        want = np.trace(proj @ pauli_matrix(q) @ meas)
        assert abs(projector_expectation(gens, q, measured, y) - want) < 1e-12


@acceptance("3 noisy Clifford fraction within bound")
def test_noisy_clifford_fraction():
    rep = run(ExperimentConfig("noisy-clifford", qubits=2, magic_count=4, epsilon=0.3,
                               alpha=8.0, delta=0.1, trials=200, seed=3))
    assert rep.summary["threshold"] == pytest.approx(0.70)
    assert rep.summary["fraction_within_bound"] >= 0.70


@acceptance("4 decay inequalities")
def test_decay_inequalities():
    rng = np.random.default_rng(104)
    violations = 0
    for _ in range(40):
        N = int(rng.integers(1, 7))
        m = int(rng.integers(1, N + 1))
        k = int(rng.integers(0, N + 1))
        # mixed route: depolarize a pure instance and compare coefficientwise
        pure = random_instance(rng, N - m, m, k, pure=True)
        mixed = SimInstance(pure.n, tuple(q.depolarize(float(rng.uniform(0.01, 0.9)))
                                          for q in pure.inputs), pure.tableau, pure.measured)
        lam = min(mixedness(q) for q in mixed.inputs)
        mu = min(magic_mu(q) for q in pure.inputs)
        ev_q, ev_p = CoefficientEvaluator(mixed), CoefficientEvaluator(pure)
        ev_o = CoefficientEvaluator(pure, [reference_operator(q).coefficients for q in pure.inputs])
        for y in all_outcomes(pure.k):
            for s, t in enumerate_terms(m, m):
                w = pattern_weight(s, t)
                q_mixed = abs(ev_q.coefficient(y, s, t))
                q_pure = abs(ev_p.coefficient(y, s, t))
                if q_mixed > (1 - lam) ** w * q_pure + 1e-12:
                    violations += 1
                if q_pure > (1 - mu) ** w * abs(ev_o.coefficient(y, s, t)) + 1e-12:
                    violations += 1
    assert violations == 0


@acceptance("5 measured-qubit cap arithmetic")
def test_cap_arithmetic():
    assert measured_cap([T] * 100, 0) == 41
    assert pauli_rank_single(T) == 3
    assert abs(magic_mu(T) - (1 - 1 / math.sqrt(2))) <= 1e-15


@acceptance("6 IQP exact second moment and bound")
def test_iqp_second_moment():
    rng = np.random.default_rng(106)
    for _ in range(200):
        c = random_iqp(int(rng.integers(1, 9)), rng, with_t=False)
        assert abs(second_moment_exact_no_T(c) - second_moment_bruteforce(c)) < 1e-12
    violations = 0
    for _ in range(500):
        c = random_iqp(int(rng.integers(1, 9)), rng)
        if second_moment_bruteforce(c) > second_moment_bound(c) + 1e-12:
            violations += 1
    assert violations == 0


@acceptance("7 average second moment")
def test_average_second_moment():
    assert exhaustive_average_second_moment(1) == Fraction(3, 4)
    for n, trials, target in ((2, 4000, 0.4375), (6, 2000, 2**-5 - 2**-12)):
        mean, se = average_second_moment_mc(n, trials, 700 + n)
        assert abs(mean - target) <= 4 * se, (n, mean, se)
    assert 2**-5 - 2**-12 == pytest.approx(0.031006, abs=1e-6)


@acceptance("8 noisy IQP simulation")
def test_noisy_iqp():
    rng = np.random.default_rng(108)
    for n in range(1, 9):
        for _ in range(3):
            c = random_iqp(n, rng)
            eps = float(rng.uniform())
            np.testing.assert_allclose(iqp_approx_distribution(c, eps, n),
                                       iqp_dense_distribution(c, eps), rtol=0, atol=1e-10)
    rep = run(ExperimentConfig("iqp", qubits=6, epsilon=0.25, alpha=8.0, trials=100, seed=8))
    assert rep.summary["fraction_within_bound"] >= 0.70


@acceptance("9 random Clifford sampler uniformity")
def test_clifford_sampler():
    rng = np.random.default_rng(109)
    counts = Counter(random_clifford(1, rng).canonical_key() for _ in range(24000))
    assert len(counts) == 24
    chi2 = stats.chisquare(list(counts.values()))
    assert chi2.pvalue > 1e-3

    zz = [SignedPauli.single(2, i, "Z") for i in range(2)]
    vals = []
    for _ in range(20000):
        u = random_clifford(2, rng)
        ev = ProjectorEvaluator([conjugate(u, g) for g in zz], [0, 1], 2)
        p = ev.expectation(SignedPauli.identity(2), [0, 0]).real
        vals.append(p * p)
    vals = np.array(vals)
    se = vals.std(ddof=1) / math.sqrt(len(vals))
    assert abs(vals.mean() - 0.1) <= 3 * se


@acceptance("10 Pauli rank properties")
def test_pauli_rank():
    rng = np.random.default_rng(110)
    for _ in range(50):
        a = DenseState.product([random_pure_input(rng).state_vector()
                                for _ in range(int(rng.integers(1, 3)))]).data
        b = DenseState.product([T.state_vector() if rng.random() < 0.5
                                else random_pure_input(rng).state_vector()
                                for _ in range(int(rng.integers(1, 3)))]).data
        assert pauli_rank_n(np.kron(a, b)) == pauli_rank_n(a) * pauli_rank_n(b)
    for _ in range(50):
        n = int(rng.integers(1, 6))
        state = apply_circuit(DenseState.zero(n), synthesize(random_clifford(n, rng)))
        assert pauli_rank_n(state.data) == 2**n
    assert pauli_rank_n(np.kron(T.state_vector(), T.state_vector())) == 9


@acceptance("11 PBC exact at full level")
def test_pbc_exact():
    rng = np.random.default_rng(111)
    psi = T.state_vector()
    for n in range(1, 7):
        for _ in range(5):
            k = int(rng.integers(1, n + 1))
            gens = random_commuting_paulis(n, k, rng)
            signs = rng.integers(0, 2, size=k).tolist()
            proj = np.eye(2**n, dtype=complex)
            for g, b in zip(gens, signs):
                proj = proj @ (np.eye(2**n) + (-1) ** b * pauli_matrix(g)) / 2
            state = reduce(np.kron, [psi] * n)
            want = np.vdot(state, proj @ state).real
            assert abs(pbc_probability(gens, signs, T, n, n) - want) < 1e-10


@acceptance("note: enumerated term count equals coefficient budget")
def test_term_count_equals_budget():
    for m in range(0, 9):
        for level in range(m + 1):
            want = sum(3**i * math.comb(m, i) for i in range(level + 1))
            assert coefficient_budget(m, level) == want
            assert sum(1 for _ in enumerate_terms(m, level)) == want
