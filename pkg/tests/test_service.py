"""HTTP service: readiness, metadata, batch payloads, override validation."""

import json

import pytest
from fastapi.testclient import TestClient

from csaug.augment import AugmentationConfig
from csaug.cli import main
from csaug.dictionary import build_pack
from csaug.service import ServiceState, StateHolder, create_app
from csaug.subword import load_vocab_file

from helpers import full_coverage_pack, uniform_corpus

CORPUS = uniform_corpus(5, tokens_per_sentence=4)
PACK = full_coverage_pack(langs=("de", "fr"))
CONFIG = AugmentationConfig(alpha=1.0, beta=0.9, languages=("de", "fr"), seed=11)

VOCAB_LINES = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "cold", "warm", "rain", "snow"]


def ready_client(batch_size=2, vocab=None):
    holder = StateHolder()
    holder.set_ready(
        ServiceState(
            corpus=CORPUS, pack=PACK, config=CONFIG, batch_size=batch_size, vocab=vocab
        )
    )
    return TestClient(create_app(holder))


class TestHealth:
    def test_loading_returns_503(self):
        client = TestClient(create_app(StateHolder()))
        response = client.get("/healthz")
        assert response.status_code == 503
        assert response.json()["status"] == "loading"

    def test_failed_returns_500_with_reason(self):
        holder = StateHolder()
        holder.set_failed("dictionary file vanished")
        response = TestClient(create_app(holder)).get("/healthz")
        assert response.status_code == 500
        assert response.json() == {"status": "error", "reason": "dictionary file vanished"}

    def test_ready_returns_ok(self):
        response = ready_client().get("/healthz")
        assert response.status_code == 200
        assert response.json() == {"status": "ok"}

    def test_batches_meta_unavailable_while_loading(self):
        client = TestClient(create_app(StateHolder()))
        assert client.get("/meta").status_code == 503
        assert client.get("/epochs/0/batches/0").status_code == 503


class TestMeta:
    def test_fields(self):
        meta = ready_client(batch_size=2).get("/meta").json()
        assert meta["n_instances"] == 5
        assert meta["batch_size"] == 2
        assert meta["batches_per_epoch"] == 3
        assert meta["source_lang"] == "en"
        assert meta["languages"] == ["de", "fr"]
        assert meta["encodings"] is False
        assert meta["config"]["alpha"] == 1.0
        assert meta["config"]["beta"] == 0.9
        assert meta["config"]["seed"] == 11
        assert isinstance(meta["version"], str) and meta["version"]


class TestBatches:
    def test_payload_shape(self):
        response = ready_client(batch_size=2).get("/epochs/0/batches/0")
        assert response.status_code == 200
        batch = response.json()
        assert isinstance(batch, list) and len(batch) == 2
        for element in batch:
            assert set(element) >= {"id", "task", "tokens", "trace"}

    def test_last_batch_is_short(self):
        batch = ready_client(batch_size=2).get("/epochs/0/batches/2").json()
        assert len(batch) == 1

    def test_repeated_requests_are_byte_identical(self):
        client = ready_client()
        first = client.get("/epochs/3/batches/1").content
        second = client.get("/epochs/3/batches/1").content
        assert first == second

    def test_epochs_differ(self):
        client = ready_client()
        assert client.get("/epochs/0/batches/0").content != client.get(
            "/epochs/1/batches/0"
        ).content

    def test_out_of_range_is_404(self):
        client = ready_client(batch_size=2)
        assert client.get("/epochs/0/batches/3").status_code == 404
        assert client.get("/epochs/0/batches/-1").status_code == 404
        assert client.get("/epochs/-1/batches/0").status_code == 404

    def test_alpha_override_disables_selection(self):
        batch = ready_client().get("/epochs/0/batches/0", params={"alpha": "0"}).json()
        for element in batch:
            assert element["trace"]["selected"] is False

    def test_languages_override_restricts_targets(self):
        client = ready_client()
        batch = client.get("/epochs/0/batches/0", params={"languages": "fr"}).json()
        records = [r for element in batch for r in element["trace"]["records"]]
        assert records and all(r["lang"] == "fr" for r in records)

    def test_static_mode_override_repeats_across_epochs(self):
        # batch composition reshuffles per epoch, so compare whole epochs
        client = ready_client(batch_size=2)

        def epoch_tokens(epoch):
            out = {}
            for index in range(3):
                params = {"mode": "static"}
                for e in client.get(f"/epochs/{epoch}/batches/{index}", params=params).json():
                    out[e["id"]] = e["tokens"]
            return out

        assert epoch_tokens(0) == epoch_tokens(5)


class TestOverrideValidation:
    @pytest.mark.parametrize(
        "params",
        [
            {"alpha": "2.0"},
            {"alpha": "-0.1"},
            {"alpha": "abc"},
            {"beta": "1.5"},
            {"languages": "zz"},
            {"languages": "de,de"},
            {"languages": ""},
            {"mode": "chaotic"},
        ],
    )
    def test_invalid_override_is_422(self, params):
        response = ready_client().get("/epochs/0/batches/0", params=params)
        assert response.status_code == 422

    def test_error_body_names_the_problem(self):
        response = ready_client().get("/epochs/0/batches/0", params={"alpha": "2.0"})
        assert "alpha" in response.json()["error"]


class TestEncodings:
    def test_embedded_when_vocab_loaded(self, tmp_path):
        path = tmp_path / "vocab.txt"
        path.write_text("\n".join(VOCAB_LINES) + "\n")
        client = ready_client(vocab=load_vocab_file(path))
        meta = client.get("/meta").json()
        assert meta["encodings"] is True
        batch = client.get("/epochs/0/batches/0").json()
        for element in batch:
            encoding = element["encoding"]
            assert encoding["pieces"][0] == "[CLS]"
            assert "id" not in encoding


class TestCliParity:
    def test_first_batch_matches_cli_lines(self, tmp_path):
        corpus_path = tmp_path / "corpus.jsonl"
        with corpus_path.open("w", encoding="utf-8") as fh:
            for inst in CORPUS.instances:
                surfaces = [token.surface for token in inst.segments[0]]
                fh.write(json.dumps(
                    {"id": inst.id, "task": "classify", "tokens": surfaces,
                     "label": inst.label},
                    ensure_ascii=False, separators=(",", ":")) + "\n")
        dict_dir = tmp_path / "dicts"
        dict_dir.mkdir()
        for lang, dictionary in PACK.dictionaries.items():
            with (dict_dir / f"en-{lang}.txt").open("w", encoding="utf-8") as fh:
                for source, entry in dictionary.entries.items():
                    for translation in entry.translations:
                        fh.write(f"{source} {translation}\n")
        out = tmp_path / "aug.jsonl"
        argv = [
            "augment",
            "--corpus", str(corpus_path),
            "--dict", f"de={dict_dir / 'en-de.txt'}",
            "--dict", f"fr={dict_dir / 'en-fr.txt'}",
            "--alpha", "1.0", "--beta", "0.9", "--seed", "11",
            "--batch-size", "2",
            "--out", str(out),
        ]
        assert main(argv) == 0
        cli_lines = out.read_text(encoding="utf-8").splitlines()

        response = ready_client(batch_size=2).get("/epochs/0/batches/0")
        expected = "[" + ",".join(cli_lines[:2]) + "]"
        assert response.content.decode("utf-8") == expected
