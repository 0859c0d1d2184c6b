import json

import pytest

from socialsem.cli import run
from socialsem.corpus import write_conll
from socialsem.synthetic import capitalization_sentences, nested_corpus, profiling_corpus


def _results(out: str) -> dict:
    line = [ln for ln in out.splitlines() if ln.startswith("RESULT ")][-1]
    return {k: v for k, v in (kv.split("=", 1) for kv in line.split()[1:])}


@pytest.fixture(scope="module")
def manifest(tmp_path_factory):
    from socialsem.corpus import write_profiling_corpus
    return write_profiling_corpus(profiling_corpus(40, seed=3), tmp_path_factory.mktemp("corpus"))


FAST = ["--trees", "8", "--max-depth", "6"]


def test_no_arguments(capsys):
    assert run([]) == 2
    assert "usage" in capsys.readouterr().err


def test_bad_option(capsys):
    assert run(["kfold", "--n", "5", "--k", "1", "--output", "x"]) == 2


def test_missing_file_one_line_error(tmp_path, capsys):
    code = run(["ner-train", "--train", str(tmp_path / "absent.conll"), "--model", str(tmp_path / "m")])
    err = capsys.readouterr().err
    assert code != 0
    assert len(err.strip().splitlines()) == 1 and err.startswith("socialsem ner-train: error:")


def test_malformed_conll(tmp_path, capsys):
    bad = tmp_path / "bad.conll"
    bad.write_text("word\tNNP\tB-NP\tB-PER\nword\tNNP\n", encoding="utf-8")
    assert run(["ner-train", "--train", str(bad), "--model", str(tmp_path / "m")]) == 1
    assert len(capsys.readouterr().err.strip().splitlines()) == 1


def test_ner_round_trip(tmp_path, capsys):
    train, test = tmp_path / "train.conll", tmp_path / "test.conll"
    write_conll(capitalization_sentences(50, seed=1), train)
    write_conll(capitalization_sentences(20, seed=2), test)
    model, pred = tmp_path / "ner.model", tmp_path / "pred.conll"
    assert run(["ner-train", "--train", str(train), "--model", str(model)]) == 0
    assert (tmp_path / "ner.model.meta").exists()
    assert run(["ner-tag", "--model", str(model), "--input", str(test), "--output", str(pred)]) == 0
    capsys.readouterr()
    assert run(["ner-eval", "--gold", str(test), "--pred", str(pred), "--report", str(tmp_path / "r.tsv")]) == 0
    res = _results(capsys.readouterr().out)
    assert float(res["f1"]) >= 0.99
    assert (tmp_path / "r.tsv").read_text().startswith("level\t")


def test_nested_train_tag(tmp_path, capsys):
    train = tmp_path / "nested.conll"
    write_conll(nested_corpus(30, seed=0), train)
    model, pred = tmp_path / "n.model", tmp_path / "n.pred"
    assert run(["ner-train", "--train", str(train), "--model", str(model), "--levels", "3"]) == 0
    assert run(["ner-tag", "--model", str(model), "--input", str(train), "--output", str(pred), "--replace"]) == 0
    capsys.readouterr()
    assert run(["ner-eval", "--gold", str(train), "--pred", str(pred)]) == 0
    res = _results(capsys.readouterr().out)
    assert {"f1_level1", "f1_level2", "f1_level3"} <= set(res)


def test_levels_exceed_columns(tmp_path, capsys):
    train = tmp_path / "t.conll"
    write_conll(capitalization_sentences(5), train)
    assert run(["ner-train", "--train", str(train), "--model", str(tmp_path / "m"), "--levels", "2"]) == 1
    assert "levels" in capsys.readouterr().err


def test_ltlm_one_batch_matches_plain(tmp_path, manifest):
    a, b = tmp_path / "a.model", tmp_path / "b.model"
    assert run(["profile-train", "--corpus", str(manifest), "--model", str(a), *FAST]) == 0
    assert run(["ltlm-train", "--corpus", str(manifest), "--model", str(b), "--batches", "1", *FAST]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_profile_outputs_reproducible(tmp_path, manifest, capsys):
    feats = []
    for tag in ("x", "y"):
        m, f, p = tmp_path / f"{tag}.model", tmp_path / f"{tag}.tsv", tmp_path / f"{tag}.pred"
        assert run(["ltlm-train", "--corpus", str(manifest), "--model", str(m), "--batches", "4",
                    "--features-out", str(f), *FAST]) == 0
        assert run(["profile-predict", "--model", str(m), "--corpus", str(manifest), "--output", str(p)]) == 0
        meta = json.loads((tmp_path / f"{tag}.model.meta").read_text())
        for key in ("model", "features_out"):
            meta["config"].pop(key)
        feats.append((m.read_bytes(), f.read_bytes(), p.read_bytes(), meta))
    assert feats[0] == feats[1]
    rows = feats[0][1].decode().splitlines()
    assert len(rows) == 40 and len(rows[0].split("\t")) == 10
    pred = feats[0][2].decode().splitlines()
    assert pred[0] == "doc_id\tgender\tage_group" and len(pred) == 41
    meta = feats[0][3]
    assert meta["subcommand"] == "ltlm-train" and meta["seed"] == 42


def test_profile_eval_cv(manifest, capsys):
    assert run(["profile-eval", "--corpus", str(manifest), "--folds", "4", *FAST]) == 0
    res = _results(capsys.readouterr().out)
    assert {"gender_f1", "gender_acc", "age_f1", "age_acc"} <= set(res)
    assert 0.0 <= float(res["gender_f1"]) <= 1.0


def test_kfold(tmp_path):
    out = tmp_path / "folds.tsv"
    assert run(["kfold", "--n", "10", "--k", "3", "--output", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "index\tfold"
    folds = [int(ln.split("\t")[1]) for ln in lines[1:]]
    assert sorted(folds.count(f) for f in range(3)) == [3, 3, 4]
    again = tmp_path / "again.tsv"
    run(["kfold", "--n", "10", "--k", "3", "--output", str(again)])
    assert again.read_bytes() == out.read_bytes()


def test_link(tmp_path):
    kb = tmp_path / "kb.tsv"
    kb.write_text("Ravi\tRavi_Shankar\tsitar Delhi\nRavi\tRavi_river\triver Punjab\n", encoding="utf-8")
    tagged = tmp_path / "in.conll"
    tagged.write_text("# tweet_id = 7\nRavi\tNNP\tB-NP\tB-PER\nin\tIN\tB-PP\tO\nDelhi\tNNP\tB-NP\tB-LOC\n",
                      encoding="utf-8")
    out = tmp_path / "links.tsv"
    assert run(["link", "--kb", str(kb), "--input", str(tagged), "--output", str(out)]) == 0
    assert out.read_text().splitlines()[1:] == ["7\tRavi\tRavi_Shankar\t1", "7\tDelhi\tNIL\t0"]
