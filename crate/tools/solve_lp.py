#!/usr/bin/env python3
"""Solve an LP file exported by `interleave export-lp` with scipy's MILP
solver (HiGHS) and print a solution file for `interleave import-solution`:
one `name value` line per variable plus an `objective <v>` line.

Usage: solve_lp.py MODEL.lp [OUTPUT]
"""

import re
import sys

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp
from scipy.sparse import csr_matrix


TERM = re.compile(r"([+-])?\s*(\d+(?:\.\d+)?)?\s*([A-Za-z_][A-Za-z0-9_]*)")


def parse_expr(text):
    """Linear expression -> {var: coef}."""
    coefs = {}
    for sign, coef, var in TERM.findall(text):
        c = float(coef) if coef else 1.0
        if sign == "-":
            c = -c
        coefs[var] = coefs.get(var, 0.0) + c
    return coefs


def parse_lp(path):
    section = None
    objective = {}
    constraints = []  # (coefs, lo, hi)
    integers = set()
    binaries = set()
    with open(path) as fh:
        for raw in fh:
            line = raw.split("\\")[0].strip()
            if not line:
                continue
            low = line.lower()
            if low in ("minimize", "maximize", "subject to", "st", "s.t.",
                       "generals", "general", "binaries", "binary", "bounds", "end"):
                section = low
                continue
            if section == "minimize":
                if ":" in line:
                    line = line.split(":", 1)[1]
                objective.update(parse_expr(line))
            elif section in ("subject to", "st", "s.t."):
                if ":" in line:
                    line = line.split(":", 1)[1]
                m = re.search(r"(<=|>=|=)", line)
                if not m:
                    raise ValueError(f"no relation in constraint: {raw!r}")
                lhs, op, rhs = line[: m.start()], m.group(1), float(line[m.end():])
                coefs = parse_expr(lhs)
                if op == "<=":
                    constraints.append((coefs, -np.inf, rhs))
                elif op == ">=":
                    constraints.append((coefs, rhs, np.inf))
                else:
                    constraints.append((coefs, rhs, rhs))
            elif section in ("generals", "general"):
                integers.update(line.split())
            elif section in ("binaries", "binary"):
                binaries.update(line.split())
    return objective, constraints, integers, binaries


def main():
    if len(sys.argv) not in (2, 3):
        sys.exit(__doc__)
    objective, constraints, integers, binaries = parse_lp(sys.argv[1])

    names = sorted(
        set(objective)
        | {v for coefs, _, _ in constraints for v in coefs}
        | integers
        | binaries
    )
    index = {name: i for i, name in enumerate(names)}
    n = len(names)

    c = np.zeros(n)
    for var, coef in objective.items():
        c[index[var]] = coef

    rows, cols, data, lo, hi = [], [], [], [], []
    for r, (coefs, rlo, rhi) in enumerate(constraints):
        for var, coef in coefs.items():
            rows.append(r)
            cols.append(index[var])
            data.append(coef)
        lo.append(rlo)
        hi.append(rhi)
    a = csr_matrix((data, (rows, cols)), shape=(len(constraints), n))

    integrality = np.ones(n)
    lb = np.zeros(n)
    ub = np.full(n, np.inf)
    for var in binaries:
        ub[index[var]] = 1.0

    res = milp(
        c=c,
        constraints=LinearConstraint(a, np.array(lo), np.array(hi)),
        integrality=integrality,
        bounds=Bounds(lb, ub),
    )
    if not res.success:
        sys.exit(f"solver failed: {res.message}")

    lines = [f"{name} {round(x)}" for name, x in zip(names, res.x)]
    lines.append(f"objective {round(res.fun)}")
    text = "\n".join(lines) + "\n"
    if len(sys.argv) == 3:
        with open(sys.argv[2], "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


if __name__ == "__main__":
    main()
