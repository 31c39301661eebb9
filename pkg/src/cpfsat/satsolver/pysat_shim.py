"""Minimal SAT-competition style front-end over python-sat's CaDiCaL.

Usage: ``python -m cpfsat.satsolver.pysat_shim FILE.cnf``.  Prints an ``s``
line and, when satisfiable, ``v`` lines; exits 10 (SAT) or 20 (UNSAT).
"""
from __future__ import annotations

import sys


def main(argv: list[str] | None = None) -> int:
    from pysat.formula import CNF
    from pysat.solvers import Cadical195

    args = sys.argv[1:] if argv is None else argv
    if len(args) != 1:
        print("usage: pysat_shim FILE.cnf", file=sys.stderr)
        return 1
    formula = CNF(from_file=args[0])
    if any(len(c) == 0 for c in formula.clauses):
        print("s UNSATISFIABLE")
        return 20
    with Cadical195(bootstrap_with=formula.clauses) as solver:
        if not solver.solve():
            print("s UNSATISFIABLE")
            return 20
        model = solver.get_model() or []
    print("s SATISFIABLE")
    for i in range(0, len(model), 20):
        print("v " + " ".join(map(str, model[i:i + 20])))
    print("v 0")
    return 10


if __name__ == "__main__":
    sys.exit(main())
