import os
import json
import hashlib
import logging
import tempfile
from dataclasses import dataclass, field, asdict
from datetime import datetime, timezone
from typing import Dict, Any, List, Optional

from .graph import DirectedGraph
from .io import graph_to_json, graph_from_json

logger = logging.getLogger('egomap.cache')

AUDIT_LOG_NAME = 'audit.json'


def _utc_now_iso() -> str:
    return datetime.now(timezone.utc).isoformat()


def hash_file(path: str) -> str:
    sha256 = hashlib.sha256()
    with open(path, 'rb') as f:
        for block in iter(lambda: f.read(8192), b''):
            sha256.update(block)
    return sha256.hexdigest()


def hash_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def hash_inputs(paths: List[str]) -> str:
    """Content hash over several files; only bytes and order matter, never timestamps."""
    sha256 = hashlib.sha256()
    for path in paths:
        sha256.update(hash_file(path).encode('ascii'))
    return sha256.hexdigest()


def atomic_write(path: str, data: bytes) -> None:
    """Write to a temp file in the target directory, then rename over ``path``."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix='.tmp-')
    try:
        with os.fdopen(fd, 'wb') as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise


class GraphCache:
    """Validated graphs stored as canonical JSON, keyed by input content hash."""

    def __init__(self, cache_dir: str, enabled: bool = True):
        self.cache_dir = cache_dir
        self.enabled = enabled

    def path_for(self, key: str) -> str:
        return os.path.join(self.cache_dir, f"{key}.json")

    def get(self, key: str) -> Optional[DirectedGraph]:
        if not self.enabled:
            return None
        path = self.path_for(key)
        if not os.path.exists(path):
            logger.debug("cache miss %s", key[:12])
            return None
        with open(path, 'rb') as f:
            graph = graph_from_json(f.read())
        logger.debug("cache hit %s", key[:12])
        return graph

    def put(self, key: str, graph: DirectedGraph) -> Optional[str]:
        if not self.enabled:
            return None
        path = self.path_for(key)
        atomic_write(path, graph_to_json(graph))
        return path


@dataclass
class RunManifest:
    input_paths: List[str]
    config: Dict[str, Any]
    tool_version: str
    input_hash: str
    output_hash: Optional[str] = None
    timestamp: str = field(default_factory=_utc_now_iso)

    def to_json(self) -> bytes:
        return (json.dumps(asdict(self), indent=2) + '\n').encode('utf-8')


def log_audit_event(logs_dir: str, event: Dict[str, Any]) -> None:
    """Append an audit event to <logs_dir>/audit.json (array of objects)."""
    os.makedirs(logs_dir, exist_ok=True)
    path = os.path.join(logs_dir, AUDIT_LOG_NAME)
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
        if not isinstance(data, list):
            data = []
    except (FileNotFoundError, json.JSONDecodeError):
        data = []
    event.setdefault('timestamp', _utc_now_iso())
    data.append(event)
    atomic_write(path, json.dumps(data, indent=2).encode('utf-8'))
