"""Content-addressed JSON cache for per-arity results.

Layout: ``DIR/<digest>/<module>/<m>x<n>.json``, each file holding

    {"schema": 1, "convention": <CONVENTION_VERSION>, "module": ..., "arity": [m, n],
     "digest": ..., "value": ...}

Files whose schema, convention or digest do not match are ignored and
overwritten.  Writes go to a temporary file in the same directory and are
renamed into place, so readers never see a partial file.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path
from typing import Any, Optional, Tuple

from .. import CONVENTION_VERSION

SCHEMA = 1


class Cache:
    def __init__(self, root: Optional[str]):
        self.root = Path(root) if root else None
        self.hits = 0
        self.misses = 0

    def _path(self, digest: str, module: str, arity: Tuple[int, ...]) -> Path:
        return self.root / digest / module / ("x".join(map(str, arity)) + ".json")

    def get(self, digest: str, module: str, arity: Tuple[int, ...]) -> Any:
        if self.root is None:
            self.misses += 1
            return None
        path = self._path(digest, module, arity)
        try:
            with open(path, encoding="utf-8") as fh:
                rec = json.load(fh)
        except (OSError, ValueError):
            self.misses += 1
            return None
        if (rec.get("schema") != SCHEMA or rec.get("convention") != CONVENTION_VERSION
                or rec.get("digest") != digest or rec.get("module") != module):
            self.misses += 1
            return None
        self.hits += 1
        return rec["value"]

    def put(self, digest: str, module: str, arity: Tuple[int, ...], value: Any) -> None:
        if self.root is None:
            return
        path = self._path(digest, module, arity)
        path.parent.mkdir(parents=True, exist_ok=True)
        rec = {"schema": SCHEMA, "convention": CONVENTION_VERSION, "module": module,
               "arity": list(arity), "digest": digest, "value": value}
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=".json")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                json.dump(rec, fh, sort_keys=True, indent=1)
                fh.write("\n")
            os.replace(tmp, path)
        except BaseException:
            try:
                os.unlink(tmp)
            except OSError:
                pass
            raise
