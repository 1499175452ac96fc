"""Start the HTTP service with environment-driven configuration.

Run from the repository root:

    python3 scripts/serve.py

Equivalent to `python3 -m fieldseek.api`. Honors BIND_ADDR (default
127.0.0.1:8080), LLM_MODE / FIXTURE_DIR for the completion provider,
SCHOLAR_MODE / SCHOLAR_CORPUS_PATH for retrieval, DATA_DIR for session
persistence, and FRONTEND_DIST to also serve a built web client.
"""
from __future__ import annotations

import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from fieldseek.api import main

if __name__ == "__main__":
    main()
