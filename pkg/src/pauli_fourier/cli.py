"""Command-line entry point: ``pauli-fourier <subcommand> [flags]``.

Exit codes: 0 success, 2 configuration error, 3 capacity error,
4 failed ``oracle-check``.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .errors import CapacityError, ConfigError, DomainError, ValidationError
from .experiments import SUBCOMMANDS, ExperimentConfig, run

EXIT_OK, EXIT_CONFIG, EXIT_CAPACITY, EXIT_ORACLE = 0, 2, 3, 4

log = logging.getLogger("pauli_fourier")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--qubits", type=int, default=2,
                   help="stabilizer |0> inputs (IQP/PBC: total qubits)")
    p.add_argument("--magic-count", type=int, default=4, help="nonstabilizer inputs m")
    p.add_argument("--input", action="append", default=[], dest="inputs",
                   help="state spec; give once for all inputs or once per input")
    p.add_argument("--epsilon", type=float, help="depolarizing strength")
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--alpha", type=float, default=8.0)
    p.add_argument("--level", type=int, help="override the truncation level")
    p.add_argument("--measured", default="all",
                   help="'all', a count k, or a comma list of qubits (PBC: number of Paulis)")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", default="-", help="output path, '-' for stdout")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--force", action="store_true", help="run outside the measured-qubit cap")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pauli-fourier", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    helps = {
        "noisy-clifford": "truncation error of random Cliffords with mixed inputs",
        "pure-magic": "truncation error with pure magic inputs and few measured qubits",
        "iqp": "noisy IQP truncation, or second-moment checks with --moments",
        "pbc": "Pauli-based computation outcome probabilities",
        "oracle-check": "compare the simulators with the dense oracle",
    }
    for name in SUBCOMMANDS:
        p = sub.add_parser(name, help=helps[name])
        _add_common(p)
        if name in ("noisy-clifford", "pure-magic"):
            p.add_argument("--sweep", action="store_true", help="report every level 0..m")
        if name == "iqp":
            p.add_argument("--moments", action="store_true")
        if name == "oracle-check":
            p.add_argument("--instance", help="instance file to evaluate instead of random ones")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    fields = set(ExperimentConfig.__dataclass_fields__)
    kwargs = {k: v for k, v in vars(args).items() if k in fields}
    kwargs["inputs"] = tuple(kwargs.get("inputs", ()))
    try:
        report = run(ExperimentConfig(**kwargs))
    except (ConfigError, ValidationError, DomainError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    text = report.render(args.format)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text)
    if args.subcommand == "oracle-check" and not report.passed:
        print("oracle-check failed", file=sys.stderr)
        return EXIT_ORACLE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
