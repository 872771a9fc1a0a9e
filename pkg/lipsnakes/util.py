from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path
from typing import Any, Dict

def dump_json(obj: Dict[str, Any]) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"

def safe_write_text(path: Path, text: str) -> None:
    # sibling temp file, then rename
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise
