#!/usr/bin/env python3
"""Competition-style front end for CaDiCaL via python-sat.

usage: pysat_solve.py [FILE]   (reads DIMACS from stdin without FILE)

Prints `s SATISFIABLE` + `v` lines and exits 10, or `s UNSATISFIABLE` and
exits 20.
"""
import sys

from pysat.formula import CNF
from pysat.solvers import Cadical195


def main():
    if len(sys.argv) > 1:
        cnf = CNF(from_file=sys.argv[1])
    else:
        cnf = CNF(from_fp=sys.stdin)
    with Cadical195(bootstrap_with=cnf.clauses) as s:
        if not s.solve():
            print("s UNSATISFIABLE")
            return 20
        model = s.get_model() or []
    seen = {abs(l) for l in model}
    lits = list(model) + [-v for v in range(1, cnf.nv + 1) if v not in seen]
    print("s SATISFIABLE")
    for i in range(0, len(lits), 20):
        print("v " + " ".join(map(str, lits[i:i + 20])))
    print("v 0")
    return 10


if __name__ == "__main__":
    sys.exit(main())
