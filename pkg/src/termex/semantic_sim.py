"""Embedding-based retrieval: cosine scoring, HTTP fetch, on-disk cache.

Embedding models are external; vectors arrive either from an HTTP endpoint
speaking the common ``/v1/embeddings`` wire contract or from a cache file,
so experiments are reproducible offline.
"""

from __future__ import annotations

import base64
import hashlib
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import requests

__all__ = [
    "EmbeddingStore",
    "ZeroVector",
    "DimensionMismatch",
    "HttpError",
    "CorruptCache",
    "cosine",
    "fetch_embeddings",
    "save_store",
    "load_store",
]


class ZeroVector(ValueError):
    pass


class DimensionMismatch(ValueError):
    pass


class HttpError(RuntimeError):
    def __init__(self, status: int, body: str):
        super().__init__(f"HTTP {status}: {body[:200]}")
        self.status = status
        self.body = body


class CorruptCache(ValueError):
    """Embedding cache failed its checksum or is truncated."""


@dataclass
class EmbeddingStore:
    """Immutable id -> vector mapping for one model and instruction."""

    dim: int
    vectors: dict[str, np.ndarray]
    model_tag: str
    instruction_used: Optional[str] = None

    def __post_init__(self):
        if self.dim <= 0:
            raise ValueError(f"dim must be positive, got {self.dim}")
        clean = {}
        for key, vec in self.vectors.items():
            arr = np.asarray(vec, dtype=np.float64)
            if arr.shape != (self.dim,):
                raise DimensionMismatch(
                    f"vector for {key!r} has shape {arr.shape}, expected ({self.dim},)"
                )
            if not np.isfinite(arr).all():
                raise ValueError(f"vector for {key!r} has NaN or Inf components")
            clean[key] = arr
        self.vectors = clean

    def __len__(self) -> int:
        return len(self.vectors)


def cosine(u: Sequence[float], v: Sequence[float]) -> float:
    """dot(u, v) / (|u| * |v|).  Raises on unequal lengths or zero norms."""
    a = np.asarray(u, dtype=np.float64)
    b = np.asarray(v, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes {a.shape} vs {b.shape}")
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        raise ZeroVector("cosine undefined for zero-norm vectors")
    return float(np.dot(a, b) / (na * nb))


_RETRYABLE = {429, 500, 502, 503, 504}


def _post_with_retries(
    url: str,
    payload: dict,
    *,
    timeout: float,
    max_retries: int,
    backoff: float,
) -> dict:
    attempt = 0
    while True:
        try:
            response = requests.post(url, json=payload, timeout=timeout)
        except requests.Timeout as exc:
            raise TimeoutError(f"request to {url} timed out") from exc
        if response.status_code == 200:
            return response.json()
        if response.status_code in _RETRYABLE and attempt < max_retries:
            time.sleep(backoff * (2**attempt))
            attempt += 1
            continue
        raise HttpError(response.status_code, response.text)


def fetch_embeddings(
    texts: Sequence[str],
    endpoint: str,
    model: str,
    instruction: Optional[str] = None,
    *,
    ids: Optional[Sequence[str]] = None,
    batch_size: int = 32,
    parallelism: int = 4,
    timeout: float = 60.0,
    max_retries: int = 3,
    backoff: float = 0.25,
) -> EmbeddingStore:
    """Embed ``texts`` through an ``/v1/embeddings``-style endpoint.

    When ``instruction`` is given it is prepended to every text in this
    call (callers embed queries and demonstrations separately, so only
    query texts pick it up).  Batches run concurrently up to
    ``parallelism`` and results are reassembled in input order.
    """
    if ids is None:
        ids = [str(i) for i in range(len(texts))]
    if len(ids) != len(texts):
        raise ValueError("ids and texts must be the same length")
    prefixed = [instruction + t if instruction else t for t in texts]
    batches = [
        (start, prefixed[start : start + batch_size])
        for start in range(0, len(prefixed), batch_size)
    ]

    def fetch_batch(batch: list[str]) -> list[np.ndarray]:
        payload = {"model": model, "input": batch}
        data = _post_with_retries(
            endpoint, payload, timeout=timeout,
            max_retries=max_retries, backoff=backoff,
        )
        rows = sorted(data["data"], key=lambda item: item["index"])
        if len(rows) != len(batch):
            raise HttpError(200, f"expected {len(batch)} vectors, got {len(rows)}")
        return [np.asarray(row["embedding"], dtype=np.float64) for row in rows]

    results: list[Optional[list[np.ndarray]]] = [None] * len(batches)
    if batches:
        with ThreadPoolExecutor(max_workers=max(1, parallelism)) as pool:
            futures = {
                pool.submit(fetch_batch, batch): slot
                for slot, (_, batch) in enumerate(batches)
            }
            for future, slot in futures.items():
                results[slot] = future.result()

    vectors: dict[str, np.ndarray] = {}
    dim: Optional[int] = None
    cursor = 0
    for batch_vectors in results:
        for vec in batch_vectors or []:
            if dim is None:
                dim = int(vec.shape[0])
            elif vec.shape[0] != dim:
                raise DimensionMismatch(
                    f"mixed vector lengths in response: {vec.shape[0]} vs {dim}"
                )
            vectors[ids[cursor]] = vec
            cursor += 1
    if dim is None:
        raise ValueError("no texts to embed")
    return EmbeddingStore(
        dim=dim, vectors=vectors, model_tag=model, instruction_used=instruction
    )


# ---------------------------------------------------------------------------
# Cache file: header, one row per sentence, trailing checksum
# ---------------------------------------------------------------------------


def _header_line(store: EmbeddingStore) -> str:
    header = f"dim={store.dim} model={store.model_tag}"
    if store.instruction_used is not None:
        encoded = base64.b64encode(store.instruction_used.encode("utf-8")).decode()
        header += f" instruction={encoded}"
    return header


def save_store(path, store: EmbeddingStore) -> None:
    lines = [_header_line(store)]
    for key in store.vectors:
        row = " ".join(repr(float(x)) for x in store.vectors[key])
        lines.append(f"{key}\t{row}")
    body = "".join(line + "\n" for line in lines)
    digest = hashlib.sha256(body.encode("utf-8")).hexdigest()
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(body)
        fh.write(f"checksum={digest}\n")


def load_store(path) -> EmbeddingStore:
    """Inverse of save_store; raises CorruptCache on damage or truncation."""
    with open(path, encoding="utf-8") as fh:
        content = fh.read()
    lines = content.splitlines()
    if not lines or not lines[-1].startswith("checksum="):
        raise CorruptCache("missing checksum line")
    expected = lines[-1][len("checksum=") :]
    body = "".join(line + "\n" for line in lines[:-1])
    digest = hashlib.sha256(body.encode("utf-8")).hexdigest()
    if digest != expected:
        raise CorruptCache("checksum mismatch")

    header = lines[0]
    fields = dict(part.split("=", 1) for part in header.split(" ") if "=" in part)
    if "dim" not in fields or "model" not in fields:
        raise CorruptCache(f"bad header: {header!r}")
    dim = int(fields["dim"])
    instruction = None
    if "instruction" in fields:
        instruction = base64.b64decode(fields["instruction"]).decode("utf-8")
    vectors: dict[str, np.ndarray] = {}
    for line in lines[1:-1]:
        key, _, row = line.partition("\t")
        vectors[key] = np.array([float(x) for x in row.split()], dtype=np.float64)
    return EmbeddingStore(
        dim=dim, vectors=vectors, model_tag=fields["model"],
        instruction_used=instruction,
    )
