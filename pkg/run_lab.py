"""
Run one ripslab command from the repository root, e.g.

    python run_lab.py sweep --dim 2 --n 500 2000 --c 1 2 3 4 --trials 50 --out results.csv
"""

import sys

from ripslab.cli import main

if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
