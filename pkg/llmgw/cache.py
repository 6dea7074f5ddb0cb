"""
Content-addressed store of recorded model responses.

Layout under the cache root:

    index.json                      digest -> {"model", "sample_index", "object", "response_sha256"}
    objects/<d[:2]>/<digest>.json   {"request": {...}, "raw_text", "backend_id"}

Writes go through one lock so concurrent workers can share the cache.
"""

import hashlib
import json
import logging
import os
import threading
from pathlib import Path

logger = logging.getLogger(__name__)


def _write_json(path, payload):
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + '.tmp')
    with open(tmp, 'w', encoding='utf-8', newline='\n') as f:
        json.dump(payload, f, indent=2, sort_keys=True, ensure_ascii=False)
        f.write('\n')
    os.replace(tmp, path)


class ReplayCache:

    def __init__(self, root):
        self.root = Path(root)
        self._lock = threading.Lock()
        self._index = self._read_index()

    @property
    def index_path(self):
        return self.root / 'index.json'

    def exists(self):
        return self.index_path.exists()

    def _read_index(self):
        if not self.index_path.exists():
            return {}
        with open(self.index_path, 'r', encoding='utf-8') as f:
            return json.load(f)

    def __len__(self):
        return len(self._index)

    def __contains__(self, digest):
        return digest in self._index

    def get(self, digest):
        """Return the stored entry for a digest, or None."""
        entry = self._index.get(digest)
        if entry is None:
            return None
        with open(self.root / entry['object'], 'r', encoding='utf-8') as f:
            return json.load(f)

    def put(self, request, raw_text, backend_id):
        digest = request.digest
        relative = f'objects/{digest[:2]}/{digest}.json'
        with self._lock:
            _write_json(self.root / relative, {
                'request': request.as_dict(),
                'raw_text': raw_text,
                'backend_id': backend_id,
            })
            self._index[digest] = {
                'model': request.model,
                'sample_index': request.sample_index,
                'object': relative,
                'response_sha256': hashlib.sha256(raw_text.encode('utf-8')).hexdigest(),
            }
            _write_json(self.index_path, self._index)
        logger.debug('Recorded response %s for model %s', digest[:12], request.model)

    def digest(self):
        """Digest over the whole index; goes into every run's provenance."""
        payload = json.dumps(self._index, sort_keys=True).encode('utf-8')
        return hashlib.sha256(payload).hexdigest()
