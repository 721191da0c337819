import threading

import numpy as np
import pytest

from termex.mock_llm import MockLlmServer
from termex.semantic_sim import (
    CorruptCache,
    DimensionMismatch,
    EmbeddingStore,
    HttpError,
    ZeroVector,
    cosine,
    fetch_embeddings,
    load_store,
    save_store,
)


class TestCosine:
    def test_identical(self):
        assert cosine([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]) == pytest.approx(1.0)

    def test_orthogonal(self):
        assert cosine([1.0, 0.0], [0.0, 1.0]) == 0.0

    def test_antipodal(self):
        assert cosine([1.0, -2.0], [-1.0, 2.0]) == pytest.approx(-1.0)

    def test_zero_vector(self):
        with pytest.raises(ZeroVector):
            cosine([0.0, 0.0], [1.0, 0.0])

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            cosine([1.0], [1.0, 2.0])

    def test_symmetry_and_scale_invariance(self):
        rng = np.random.default_rng(5)
        for _ in range(200):
            u = rng.standard_normal(8)
            v = rng.standard_normal(8)
            alpha = float(rng.uniform(0.1, 10.0))
            assert cosine(u, v) == pytest.approx(cosine(v, u), abs=1e-12)
            assert cosine(alpha * u, v) == pytest.approx(cosine(u, v), abs=1e-9)

    def test_ranking_invariant_under_rescaling(self):
        rng = np.random.default_rng(6)
        query = rng.standard_normal(8)
        demos = [rng.standard_normal(8) for _ in range(10)]
        base = np.argsort([-cosine(query, d) for d in demos])
        scales = rng.uniform(0.5, 5.0, size=10)
        scaled = np.argsort([-cosine(query, s * d) for s, d in zip(scales, demos)])
        assert list(base) == list(scaled)


class TestEmbeddingStore:
    def test_mixed_dim_rejected(self):
        with pytest.raises(DimensionMismatch):
            EmbeddingStore(dim=2, vectors={"a": np.ones(2), "b": np.ones(3)},
                           model_tag="m")

    def test_nan_rejected(self):
        with pytest.raises(ValueError):
            EmbeddingStore(dim=2, vectors={"a": np.array([1.0, np.nan])},
                           model_tag="m")


class TestFetchEmbeddings:
    def test_fetch_order_and_dim(self):
        with MockLlmServer(embedding_dim=12) as server:
            store = fetch_embeddings(
                ["alpha", "beta", "gamma"], server.embeddings_url, "mock-model",
                ids=["a", "b", "c"],
            )
        assert store.dim == 12
        assert set(store.vectors) == {"a", "b", "c"}
        assert store.model_tag == "mock-model"
        # the mock embeds by text hash, so identical text embeds identically
        with MockLlmServer(embedding_dim=12) as server:
            again = fetch_embeddings(
                ["alpha"], server.embeddings_url, "mock-model", ids=["a"]
            )
        np.testing.assert_allclose(store.vectors["a"], again.vectors["a"])

    def test_instruction_prefix_reaches_the_wire(self):
        server = MockLlmServer(embedding_dim=4)
        with server:
            # embed with and without the instruction; the mock hashes the
            # text it receives, so a prefix changes the vector iff it was
            # actually prepended in the request payload.
            plain = fetch_embeddings(
                ["alpha"], server.embeddings_url, "m", ids=["x"]
            )
            prefixed = fetch_embeddings(
                ["alpha"], server.embeddings_url, "m",
                instruction="Retrieve structurally similar sentences: ",
                ids=["x"],
            )
            reference = fetch_embeddings(
                ["Retrieve structurally similar sentences: alpha"],
                server.embeddings_url, "m", ids=["x"],
            )
        assert not np.allclose(plain.vectors["x"], prefixed.vectors["x"])
        np.testing.assert_allclose(
            prefixed.vectors["x"], reference.vectors["x"]
        )
        assert prefixed.instruction_used is not None

    def test_batching_preserves_order(self):
        texts = [f"sentence {i}" for i in range(23)]
        with MockLlmServer(embedding_dim=6) as server:
            batched = fetch_embeddings(
                texts, server.embeddings_url, "m", batch_size=4, parallelism=3
            )
            single = fetch_embeddings(
                texts, server.embeddings_url, "m", batch_size=100, parallelism=1
            )
        for key in batched.vectors:
            np.testing.assert_allclose(batched.vectors[key], single.vectors[key])

    def test_retry_then_success(self):
        with MockLlmServer(embedding_dim=4) as server:
            server.script_statuses([429, 503])
            store = fetch_embeddings(
                ["alpha"], server.embeddings_url, "m", backoff=0.01
            )
        assert len(store) == 1

    def test_hard_error_raises(self):
        with MockLlmServer(embedding_dim=4) as server:
            server.script_statuses([404])
            with pytest.raises(HttpError) as excinfo:
                fetch_embeddings(["alpha"], server.embeddings_url, "m")
        assert excinfo.value.status == 404


class TestCacheRoundTrip:
    def _store(self):
        rng = np.random.default_rng(7)
        return EmbeddingStore(
            dim=5,
            vectors={"a": rng.standard_normal(5), "b": rng.standard_normal(5)},
            model_tag="bge-like",
            instruction_used="Domain: medical Sentence: ",
        )

    def test_round_trip(self, tmp_path):
        store = self._store()
        path = tmp_path / "cache.emb"
        save_store(path, store)
        loaded = load_store(path)
        assert loaded.dim == store.dim
        assert loaded.model_tag == store.model_tag
        assert loaded.instruction_used == store.instruction_used
        for key in store.vectors:
            np.testing.assert_allclose(
                loaded.vectors[key], store.vectors[key], atol=1e-7
            )

    def test_round_trip_without_instruction(self, tmp_path):
        store = EmbeddingStore(dim=2, vectors={"a": np.ones(2)}, model_tag="m")
        path = tmp_path / "cache.emb"
        save_store(path, store)
        assert load_store(path).instruction_used is None

    def test_truncated_file(self, tmp_path):
        path = tmp_path / "cache.emb"
        save_store(path, self._store())
        content = path.read_text(encoding="utf-8")
        path.write_text(content[: len(content) // 2], encoding="utf-8")
        with pytest.raises(CorruptCache):
            load_store(path)

    def test_tampered_payload(self, tmp_path):
        path = tmp_path / "cache.emb"
        save_store(path, self._store())
        lines = path.read_text(encoding="utf-8").splitlines()
        lines[1] = lines[1].replace("0.", "9.", 1)
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        with pytest.raises(CorruptCache):
            load_store(path)

    def test_empty_store(self, tmp_path):
        store = EmbeddingStore(dim=3, vectors={}, model_tag="m")
        path = tmp_path / "cache.emb"
        save_store(path, store)
        loaded = load_store(path)
        assert loaded.dim == 3 and len(loaded) == 0
