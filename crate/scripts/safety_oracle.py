#!/usr/bin/env python3
"""Grade single-rule programs with clingo's grounder and write a TSV fixture.

Usage: safety_oracle.py INPUT.lp OUTPUT.tsv

Each non-comment line of INPUT is grounded on its own. Output columns are
`verdict` (safe|unsafe), the comma-separated unsafe variables reported by
clingo (anonymous variables shown as `_`,
grounder-internal auxiliaries dropped) and the program text.
"""

import re
import sys

import clingo

UNSAFE = re.compile(r"'([^']+)' is unsafe")


def grade(program):
    messages = []
    ctl = clingo.Control(logger=lambda _code, msg: messages.append(msg))
    try:
        ctl.add("base", [], program)
        ctl.ground([("base", [])])
    except RuntimeError:
        names = set()
        for msg in messages:
            for name in UNSAFE.findall(msg):
                if name.startswith("#Anon"):
                    names.add("_")
                elif not name.startswith("#"):
                    names.add(name)
        if not names:
            raise SystemExit(f"clingo rejected {program!r} for a reason other than safety:\n"
                             + "\n".join(messages))
        return "unsafe", sorted(names)
    return "safe", []


def main():
    source, target = sys.argv[1:3]
    rows = []
    with open(source, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith("%"):
                continue
            verdict, names = grade(line)
            rows.append(f"{verdict}\t{','.join(names)}\t{line}\n")
    with open(target, "w", encoding="utf-8") as f:
        f.write(f"# clingo {clingo.__version__}\n")
        f.writelines(rows)


if __name__ == "__main__":
    main()
