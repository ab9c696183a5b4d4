"""
Running seeded experiments from Python
======================================

The ``pauli-fourier`` command line wraps the same ``run`` function. Reports
carry a determinism hash that ignores timings and output routing.
"""

from pauli_fourier.experiments import ExperimentConfig, run

cfg = ExperimentConfig("noisy-clifford", qubits=2, magic_count=3, epsilon=0.3,
                       trials=20, seed=42, sweep=True)
report = run(cfg)
print(report.summary)
print("hash:", report.determinism_hash())

# same seed, two worker processes: identical hash
again = run(ExperimentConfig("noisy-clifford", qubits=2, magic_count=3, epsilon=0.3,
                             trials=20, seed=42, sweep=True, jobs=2))
print("reproduced:", again.determinism_hash() == report.determinism_hash())

print(run(ExperimentConfig("oracle-check", trials=3, seed=1)).to_csv())
