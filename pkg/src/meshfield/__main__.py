"""Run the command-line interface via ``python -m meshfield``."""

import sys

from .cli import main

if __name__ == "__main__":
    sys.exit(main())
