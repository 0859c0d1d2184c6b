import pytest
from hypothesis import given
from hypothesis import strategies as st

from socialsem import synthetic
from socialsem.corpus import (
    CorpusError,
    bio_error,
    clean_text,
    format_conll,
    load_conll_corpus,
    load_profiling_corpus,
    make_document,
    parse_conll,
    read_manifest,
    repair_bio,
    tokenize,
    write_conll,
    write_profiling_corpus,
)


class TestCleanText:
    def test_whitespace_collapse(self):
        assert clean_text("hello   world") == "hello world"

    def test_empty(self):
        assert clean_text("") == ""

    def test_url_removed(self):
        assert clean_text("see http://x.y/z now") == "see now"

    def test_mentions_html_controls(self):
        raw = "@bob <b>Bold</b> move\x07 by ftp://host/f and a@b.c\tok"
        assert clean_text(raw) == "Bold move by and a@b.c ok"

    def test_casing_preserved(self):
        assert clean_text("MiXeD Case") == "MiXeD Case"

    @given(st.text())
    def test_idempotent(self, s):
        once = clean_text(s)
        assert clean_text(once) == once


class TestTokenize:
    def test_plain(self):
        assert tokenize("a b") == ["a", "b"]

    def test_trailing_punct(self):
        assert tokenize("end.") == ["end", "."]

    def test_emoticons_and_brackets(self):
        assert tokenize("(hi!) :)") == ["(", "hi", "!", ")", ":)"]

    def test_hashtag_kept(self):
        assert tokenize("#tag, @you") == ["#tag", ",", "@you"]

    def test_inner_punct_kept(self):
        assert tokenize("don't e-mail") == ["don't", "e-mail"]

    @given(st.text(alphabet=st.characters(blacklist_categories=("Cs",)), max_size=60))
    def test_idempotent_on_own_output(self, s):
        toks = tokenize(s)
        assert tokenize(" ".join(toks)) == toks


def _manifest(tmp_path, rows, header="doc_id\tpath\tgender\tage_group", decl="# label_set: 10s,20s,30s"):
    (tmp_path / "docs").mkdir(exist_ok=True)
    lines = [decl, header] if decl else [header]
    for doc_id, text, g, a in rows:
        if text is not None:
            (tmp_path / "docs" / f"{doc_id}.txt").write_text(text, encoding="utf-8")
        lines.append(f"{doc_id}\tdocs/{doc_id}.txt\t{g}\t{a}")
    p = tmp_path / "manifest.tsv"
    p.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return p


class TestProfilingCorpus:
    def test_counts(self, tmp_path):
        rows = [("a", "x y", "Male", "10s"), ("b", "y z", "Female", "20s"),
                ("c", "z", "Male", "30s"), ("d", "w", "Female", "10s")]
        corpus = load_profiling_corpus(_manifest(tmp_path, rows))
        assert corpus.gender_counts() == {"Male": 2, "Female": 2}
        assert corpus.age_labels == ("10s", "20s", "30s")
        assert all(len(d.tokens) >= 1 for d in corpus)

    def test_missing_file_names_path(self, tmp_path):
        rows = [("a", "x", "Male", "10s"), ("gone", None, "Female", "10s")]
        with pytest.raises(CorpusError, match="gone.txt"):
            load_profiling_corpus(_manifest(tmp_path, rows))

    def test_unknown_age_label(self, tmp_path):
        rows = [("a", "x", "Male", "40s")]
        with pytest.raises(CorpusError, match="40s"):
            load_profiling_corpus(_manifest(tmp_path, rows))

    def test_duplicate_id(self, tmp_path):
        rows = [("a", "x", "Male", "10s"), ("a", "y", "Female", "10s")]
        with pytest.raises(CorpusError, match="duplicate"):
            read_manifest(_manifest(tmp_path, rows))

    def test_bad_header(self, tmp_path):
        with pytest.raises(CorpusError, match="header"):
            read_manifest(_manifest(tmp_path, [], header="id\tfile"))

    def test_empty_after_cleaning_rejected(self):
        with pytest.raises(CorpusError, match="empty"):
            make_document("x", "@only http://a.b", "Male", "10s")

    def test_label_set_inferred(self, tmp_path):
        rows = [("a", "x", "Male", "old"), ("b", "y", "Female", "young")]
        corpus = load_profiling_corpus(_manifest(tmp_path, rows, decl=None))
        assert corpus.age_labels == ("old", "young")

    def test_write_load_round_trip(self, tmp_path):
        corpus = synthetic.profiling_corpus(12, seed=1, female_vocab=30)
        again = load_profiling_corpus(write_profiling_corpus(corpus, tmp_path))
        assert again == corpus

    def test_threads_same_result(self, tmp_path):
        manifest = write_profiling_corpus(synthetic.profiling_corpus(20, seed=2), tmp_path)
        assert load_profiling_corpus(manifest, threads=4) == load_profiling_corpus(manifest)


NESTED_TEXT = (
    "Chicago\tNNP\tB-NP\tB-Person\tB-Association\tB-Location\n"
    "Bears\tNNPS\tI-NP\tI-Person\tI-Association\tB-Nonhuman\n"
    "Football\tNN\tI-NP\tI-Person\tI-Association\tB-Sports\n"
    "Fan\tNN\tI-NP\tI-Person\tO\tO\n"
)


class TestConll:
    def test_two_sentences(self):
        text = "a\tDT\tB-NP\tO\n\nb\tNN\tB-NP\tB-X\n"
        assert len(parse_conll(text.splitlines(), 1)) == 2

    def test_orphan_inside_tag_reports_line(self):
        text = "x\tNN\tO\tO\ny\tNN\tO\tI-PER\n"
        with pytest.raises(CorpusError, match=":2:.*I-PER"):
            parse_conll(text.splitlines(), 1)

    def test_wrong_column_count(self):
        with pytest.raises(CorpusError, match=":2: expected 4 columns"):
            parse_conll(["a\tDT\tO\tO", "b\tNN\tO"], 1)

    def test_nested_fragment_round_trip(self, tmp_path):
        path = tmp_path / "t.conll"
        path.write_text(NESTED_TEXT, encoding="utf-8")
        sents = load_conll_corpus(path, 3)
        assert sents == [synthetic.nested_example()]
        out = tmp_path / "out.conll"
        write_conll(sents, out)
        assert out.read_bytes() == path.read_bytes()

    def test_comments_round_trip(self):
        text = "# tweet_id = 17\na\tDT\tO\tO\n\n# tweet_id = 18\nb\tNN\tO\tB-X\n"
        sents = parse_conll(text.splitlines())
        assert [s.sentence_id("?") for s in sents] == ["17", "18"]
        assert format_conll(sents) == text

    def test_untagged_input(self):
        sents = parse_conll(["a\tDT\tO", "b\tNN\tO"])
        assert sents[0].tokens[0].tags == ()

    @pytest.mark.parametrize("seed", range(5))
    def test_synthetic_round_trip(self, seed):
        sents = synthetic.nested_corpus(15, seed)
        text = format_conll(sents)
        assert format_conll(parse_conll(text.splitlines(), 3)) == text


class TestBio:
    def test_valid(self):
        assert bio_error(["B-A", "I-A", "O", "B-B"]) is None

    def test_type_switch(self):
        assert bio_error(["B-A", "I-B"]) == 1

    def test_repair_start(self):
        assert repair_bio(["I-LOC", "I-LOC", "O"]) == ["B-LOC", "I-LOC", "O"]

    @given(st.lists(st.sampled_from(["O", "B-A", "I-A", "B-B", "I-B"]), max_size=20))
    def test_repair_always_valid(self, tags):
        fixed = repair_bio(tags)
        assert bio_error(fixed) is None
        if bio_error(tags) is None:
            assert fixed == tags
