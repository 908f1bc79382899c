#!/usr/bin/env python3
"""
Matryoshka - nested-simplex SU(k+1) toolkit

Usage:
    python matryoshka.py lattice --k 2 --layers 2 --alpha 0.04 --embed
    python matryoshka.py spectrum --k 3 --simplex
    python matryoshka.py sdrg --k 2 --layers 3 --alpha 0.01
    python matryoshka.py entropy --k 2 --layers 2 --alpha 0.01,0.003,0.001 --cut even-odd
"""

import sys
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent / 'src'))

from cli.commands import main


if __name__ == '__main__':
    sys.exit(main())
