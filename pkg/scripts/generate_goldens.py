#!/usr/bin/env python3
"""Regenerate the committed golden CSVs under tests/golden/.

Run from the repository root after an intentional change to the emission
format or the underlying numerics, then review the diff before committing.
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

from golden_defs import GOLDEN_BUILDERS, GOLDEN_DIR  # noqa: E402


def main():
    GOLDEN_DIR.mkdir(exist_ok=True)
    for name, builder in GOLDEN_BUILDERS.items():
        path = GOLDEN_DIR / name
        path.write_bytes(builder())
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
