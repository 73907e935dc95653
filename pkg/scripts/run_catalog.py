#!/usr/bin/env python3
"""Run every built-in junction preset and print its certification verdict.

This is the one-command reproduction of the worked catalog: each preset is
certified end to end and compared against its expected discrete-eigenvalue
count (the plain crossing is expected to stay inconclusive until the
symmetry decomposition is used).
"""

import sys

from starspec.cli import run


def main() -> int:
    return run(["repro", "--all"])


if __name__ == "__main__":
    sys.exit(main())
