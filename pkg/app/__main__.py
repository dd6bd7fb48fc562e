# -*- coding: utf-8 -*-
"""``python -m app <comando>``: same as ``python -m app.main``."""
from __future__ import annotations

import sys

from app.main import main

if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
