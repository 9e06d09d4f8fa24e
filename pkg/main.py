# File: main.py
"""
Reconfigurable End-Effector Cable Robot - command-line entry point.
Run `python main.py --help` for the list of subcommands.
"""

import sys
from pathlib import Path

# Add src to path for imports
current_dir = Path(__file__).parent
src_path = current_dir / "src"
sys.path.insert(0, str(src_path))

from harness.cli import run  # noqa: E402

if __name__ == "__main__":
    sys.exit(run())
