"""
Run Manifest Module
===================

``manifest.json`` lists every artifact a command wrote, together with the
hash of its canonicalized configuration, the seeds used and timestamps.
Timestamps live only here, so the data artifacts stay byte-identical across
repeated runs.
"""

import hashlib
import json
from dataclasses import dataclass, field, asdict
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional

MANIFEST_FILE = 'manifest.json'


def canonical_json(payload: Any) -> str:
    return json.dumps(payload, sort_keys=True, separators=(',', ':'), ensure_ascii=True)


def config_hash(payload: Any) -> str:
    """sha256 over the canonical JSON form of ``payload``."""
    return hashlib.sha256(canonical_json(payload).encode('utf-8')).hexdigest()


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


@dataclass
class RunManifest:
    command: str
    config_hash: str
    seeds: Dict[str, int]
    version: str
    started_at: str = field(default_factory=_now)
    finished_at: Optional[str] = None
    artifacts: List[str] = field(default_factory=list)

    @classmethod
    def begin(cls, command: str, config: Any, seeds: Dict[str, int]) -> 'RunManifest':
        # imported lazily so the package banner stays the single version source
        from .. import __version__
        return cls(command=command, config_hash=config_hash(config), seeds=dict(seeds),
                   version=__version__)

    def add(self, *paths: str) -> None:
        for path in paths:
            if path not in self.artifacts:
                self.artifacts.append(path)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data['artifacts'] = sorted(self.artifacts)
        return data

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)

    def save(self, out_dir: str) -> str:
        """Stamp the finish time and write ``manifest.json`` into ``out_dir``."""
        self.finished_at = _now()
        path = Path(out_dir) / MANIFEST_FILE
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_json(), encoding='utf-8')
        return str(path)

    @classmethod
    def load(cls, out_dir: str) -> 'RunManifest':
        data = json.loads((Path(out_dir) / MANIFEST_FILE).read_text(encoding='utf-8'))
        return cls(**data)
