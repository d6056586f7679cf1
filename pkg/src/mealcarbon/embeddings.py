"""Unit-normalized text embeddings and exhaustive top-k cosine search.

Two providers: a remote HTTP endpoint (POST a list of texts, get a list
of vectors) and a deterministic lexical fallback that hashes character
trigrams of the lowercased string into a fixed 256-dim bag.  Catalogs
are small (couple thousand names per source) so search is an exact
exhaustive scan.
"""

from __future__ import annotations

import json
import os
import struct
import zlib
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import httpx
import numpy as np

from .catalog import DatabaseSource, ProductStore

LEXICAL_DIM = 256
LEXICAL_FINGERPRINT = f"lexical-trigram-{LEXICAL_DIM}"

INDEX_MAGIC = b"MCIX1\n"


class EmbeddingError(Exception):
    pass


class RemoteProviderError(EmbeddingError):
    pass


class DimMismatchError(EmbeddingError):
    pass


@dataclass
class SearchHit:
    product_id: str
    name: str
    similarity: float


def _trigrams(text: str) -> list[str]:
    s = " " + text.lower().strip() + " "
    if len(s) < 3:
        s = s + "  "
    return [s[i:i + 3] for i in range(len(s) - 2)]


def lexical_embed(text: str) -> np.ndarray:
    """Hashed-trigram bag, L2-normalized. Deterministic across runs."""
    if not text.strip():
        raise EmbeddingError("cannot embed empty text")
    vec = np.zeros(LEXICAL_DIM, dtype=np.float64)
    for tri in _trigrams(text):
        vec[zlib.crc32(tri.encode("utf-8")) % LEXICAL_DIM] += 1.0
    norm = np.linalg.norm(vec)
    return vec / norm


class LexicalProvider:
    fingerprint = LEXICAL_FINGERPRINT
    dim = LEXICAL_DIM

    def embed_batch(self, texts: list[str]) -> np.ndarray:
        return np.stack([lexical_embed(t) for t in texts])


class RemoteProvider:
    """HTTP embedding endpoint: POST {"texts": [...]} -> {"vectors": [[...]]}."""

    def __init__(self, endpoint: Optional[str] = None, dim: int = 384,
                 timeout: float = 10.0, client: Optional[httpx.Client] = None):
        self.endpoint = endpoint or os.environ.get("MEALCARBON_EMBED_ENDPOINT")
        if not self.endpoint:
            raise RemoteProviderError("no embedding endpoint configured "
                                      "(set MEALCARBON_EMBED_ENDPOINT)")
        self.dim = dim
        self.fingerprint = f"remote-{dim}-{zlib.crc32(self.endpoint.encode()):08x}"
        self._client = client or httpx.Client(timeout=timeout)

    def embed_batch(self, texts: list[str]) -> np.ndarray:
        try:
            resp = self._client.post(self.endpoint, json={"texts": texts})
            resp.raise_for_status()
        except httpx.HTTPError as exc:
            raise RemoteProviderError(f"embedding endpoint failed: {exc}") from exc
        vectors = np.asarray(resp.json()["vectors"], dtype=np.float64)
        if vectors.shape != (len(texts), self.dim):
            raise RemoteProviderError(f"endpoint returned shape {vectors.shape}, "
                                      f"expected {(len(texts), self.dim)}")
        norms = np.linalg.norm(vectors, axis=1, keepdims=True)
        if np.any(norms == 0):
            raise RemoteProviderError("endpoint returned a zero vector")
        return vectors / norms


def get_provider(name: str, **kwargs):
    if name.upper() == "LEXICAL":
        return LexicalProvider()
    if name.upper() == "REMOTE":
        return RemoteProvider(**kwargs)
    raise EmbeddingError(f"unknown provider {name!r}")


def embed(text: str, provider) -> np.ndarray:
    vec = provider.embed_batch([text])[0]
    return vec


@dataclass
class ProductIndex:
    source: DatabaseSource
    ids: list[str]            # region-collapsed ids
    names: list[str]
    vectors: np.ndarray       # (n, dim), unit rows
    dim: int
    fingerprint: str

    def __len__(self) -> int:
        return len(self.ids)


def build_index(store: ProductStore, source: DatabaseSource, provider) -> ProductIndex:
    entries = store.names(source)
    if not entries:
        raise EmbeddingError(f"no products for source {source.value}")
    ids = [e[0] for e in entries]
    names = [e[1] for e in entries]
    vectors = provider.embed_batch(names)
    return ProductIndex(source=source, ids=ids, names=names,
                        vectors=vectors.astype(np.float32).astype(np.float64),
                        dim=provider.dim, fingerprint=provider.fingerprint)


def save_index(index: ProductIndex, path: str | Path) -> None:
    """Header JSON + little-endian float32 matrix + id/name table."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = json.dumps({"source": index.source.value, "dim": index.dim,
                         "fingerprint": index.fingerprint,
                         "count": len(index.ids)}, sort_keys=True).encode("utf-8")
    table = json.dumps({"ids": index.ids, "names": index.names},
                       sort_keys=True).encode("utf-8")
    mat = index.vectors.astype("<f4").tobytes()
    with path.open("wb") as fh:
        fh.write(INDEX_MAGIC)
        fh.write(struct.pack("<I", len(header)))
        fh.write(header)
        fh.write(struct.pack("<I", len(mat)))
        fh.write(mat)
        fh.write(struct.pack("<I", len(table)))
        fh.write(table)


def load_index(path: str | Path) -> ProductIndex:
    path = Path(path)
    with path.open("rb") as fh:
        if fh.read(len(INDEX_MAGIC)) != INDEX_MAGIC:
            raise EmbeddingError(f"not an index file: {path}")
        (hlen,) = struct.unpack("<I", fh.read(4))
        header = json.loads(fh.read(hlen))
        (mlen,) = struct.unpack("<I", fh.read(4))
        mat = np.frombuffer(fh.read(mlen), dtype="<f4").astype(np.float64)
        (tlen,) = struct.unpack("<I", fh.read(4))
        table = json.loads(fh.read(tlen))
    vectors = mat.reshape(header["count"], header["dim"])
    return ProductIndex(source=DatabaseSource(header["source"]), ids=table["ids"],
                        names=table["names"], vectors=vectors,
                        dim=header["dim"], fingerprint=header["fingerprint"])


def search(query: str, index: ProductIndex, provider, k: int = 3) -> list[SearchHit]:
    """Top-k by cosine similarity, ties broken by ascending product id."""
    if k <= 0:
        return []
    if provider.fingerprint != index.fingerprint:
        raise EmbeddingError(f"index fingerprint {index.fingerprint!r} does not match "
                             f"provider {provider.fingerprint!r}")
    qvec = embed(query, provider)
    if qvec.shape[0] != index.dim:
        raise DimMismatchError(f"query dim {qvec.shape[0]} != index dim {index.dim}")
    sims = index.vectors @ qvec
    order = sorted(range(len(index.ids)), key=lambda i: (-sims[i], index.ids[i]))
    return [SearchHit(index.ids[i], index.names[i], float(sims[i]))
            for i in order[:k]]
