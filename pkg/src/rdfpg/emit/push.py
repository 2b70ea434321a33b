"""Sending Cypher commit blocks to a Neo4j-style HTTP transactional endpoint."""
import logging
from dataclasses import dataclass, field
from typing import List, Optional

import requests

log = logging.getLogger(__name__)


@dataclass
class BlockResult:
    index: int
    status: Optional[int]
    errors: list = field(default_factory=list)

    @property
    def ok(self):
        return self.status is not None and 200 <= self.status < 300 and not self.errors


@dataclass
class PushReport:
    blocks_total: int
    results: List[BlockResult] = field(default_factory=list)
    error: Optional[str] = None

    @property
    def blocks_sent(self):
        """Blocks the server answered, successfully or not."""
        return sum(1 for r in self.results if r.status is not None)

    @property
    def blocks_ok(self):
        return sum(1 for r in self.results if r.ok)

    @property
    def ok(self):
        return self.error is None and self.blocks_ok == self.blocks_total

    @property
    def failed_block(self):
        """1-based index of the block that stopped the push, if any."""
        for r in self.results:
            if not r.ok:
                return r.index
        return None

    def as_dict(self):
        return {
            "ok": self.ok,
            "blocks_total": self.blocks_total,
            "blocks_sent": self.blocks_sent,
            "blocks_ok": self.blocks_ok,
            "failed_block": self.failed_block,
            "error": self.error,
            "results": [{"block": r.index, "status": r.status, "errors": r.errors} for r in self.results],
        }


def commit_url(endpoint_url, db="neo4j"):
    return f"{endpoint_url.rstrip('/')}/db/{db}/tx/commit"


def push_script(blocks, endpoint_url, credentials=None, db="neo4j", timeout=30.0, session=None):
    """POST each block as one transaction, in order, stopping at the first failure.

    ``blocks`` is a list of statement lists (see ``script_blocks``).
    """
    url = commit_url(endpoint_url, db)
    report = PushReport(blocks_total=len(blocks))
    http = session or requests.Session()
    for k, block in enumerate(blocks, 1):
        payload = {"statements": [{"statement": s} for s in block]}
        try:
            resp = http.post(url, json=payload, auth=credentials, timeout=timeout,
                             headers={"Accept": "application/json"})
        except requests.RequestException as e:
            report.results.append(BlockResult(k, None, [{"message": str(e)}]))
            report.error = f"connection to {url} failed at block {k}: {e}"
            return report
        errors = []
        try:
            body = resp.json()
            errors = list(body.get("errors") or [])
        except ValueError:
            if 200 <= resp.status_code < 300:
                errors = [{"message": "response is not JSON"}]
        result = BlockResult(k, resp.status_code, errors)
        report.results.append(result)
        if not result.ok:
            detail = "; ".join(
                f"{e.get('code', '')}: {e.get('message', '')}".strip(": ") for e in errors
            ) or f"HTTP {resp.status_code}"
            report.error = f"block {k} of {len(blocks)} failed: {detail}"
            return report
        log.debug("block %d/%d committed", k, len(blocks))
    return report
