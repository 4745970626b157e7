"""Run every config under reproduce/ and write CSV + SVG into an output directory.

    python3 scripts/reproduce_all.py [OUT_DIR]
"""

import os
import sys

from deltaqed import cli


def main(out_dir="figures"):
    worst = 0
    for path in cli._reproduce_configs():
        name = os.path.splitext(os.path.basename(path))[0]
        status = cli.main(["reproduce", name, "--out-dir", out_dir])
        print(f"{name}: exit {status}", file=sys.stderr)
        worst = max(worst, status)
    return worst


if __name__ == "__main__":
    sys.exit(main(*sys.argv[1:2]))
