import math

import pytest
from hypothesis import given, strategies as st

from movielayers import textkit
from movielayers.errors import ConfigurationError
from movielayers.textkit import (
    Stoplist,
    TokenStream,
    cosine,
    normalize,
    porter_stem,
    remove_stopwords,
    tfidf_vectors,
)


class TestPorterStemmer:
    # expected values hand-derived by walking the published algorithm's steps
    VOCABULARY = {
        "caresses": "caress",
        "ponies": "poni",
        "ties": "ti",
        "caress": "caress",
        "cats": "cat",
        "feed": "feed",
        "plastered": "plaster",
        "bled": "bled",
        "motoring": "motor",
        "sing": "sing",
        "sized": "size",
        "hopping": "hop",
        "tanned": "tan",
        "falling": "fall",
        "hissing": "hiss",
        "failing": "fail",
        "filing": "file",
        "happy": "happi",
        "sky": "sky",
        "relational": "relat",
        "generalization": "gener",
        "oscillators": "oscil",
        "troubled": "troubl",
    }

    def test_known_vocabulary(self):
        for word, want in self.VOCABULARY.items():
            assert porter_stem(word) == want, word

    def test_short_words_untouched(self):
        assert porter_stem("as") == "as"
        assert porter_stem("s") == "s"


class TestNormalize:
    def test_empty_input(self):
        assert normalize("").tokens == ()

    def test_running_runs(self):
        assert normalize("Running, runs!").tokens == ("run", "run")

    def test_title(self):
        assert normalize("The Empire Strikes Back").tokens == ("the", "empir", "strike", "back")

    def test_tokens_nonempty_no_whitespace(self):
        ts = normalize("  A long-winded, oddly  spaced   SENTENCE! ")
        assert all(t and " " not in t for t in ts.tokens)

    def test_spans_map_into_source(self):
        text = "Hello there, General Kenobi!"
        ts = normalize(text)
        assert len(ts.source_span) == len(ts.tokens)
        for token, (start, end) in zip(ts.tokens, ts.source_span):
            assert 0 <= start < end <= len(text)
            raw = text[start:end].lower().strip("'")
            assert textkit.stem(raw) == token

    @given(st.text(alphabet=st.characters(whitelist_categories=("Lu", "Ll", "Zs", "Po")), max_size=80))
    def test_idempotent_on_own_output(self, text):
        once = normalize(text)
        twice = normalize(" ".join(once.tokens))
        assert twice.tokens == once.tokens


class TestRemoveStopwords:
    def test_basic_filter(self):
        ts = TokenStream(("the", "force"))
        assert remove_stopwords(ts, {"the"}).tokens == ("force",)

    def test_empty_stream(self):
        assert remove_stopwords(TokenStream(()), {"a"}).tokens == ()

    def test_order_preserving(self):
        ts = TokenStream(("a", "man", "in", "a", "hat"))
        assert remove_stopwords(ts, {"a", "in"}).tokens == ("man", "hat")

    def test_spans_kept_aligned(self):
        ts = normalize("the blue droid")
        out = remove_stopwords(ts, Stoplist(["the"]))
        assert out.tokens == ("blue", "droid")
        assert len(out.source_span) == 2


class TestStoplist:
    def test_missing_file_is_configuration_error(self, tmp_path):
        with pytest.raises(ConfigurationError):
            Stoplist.load(tmp_path / "nope.txt")

    def test_load_and_default(self, tmp_path):
        p = tmp_path / "stop.txt"
        p.write_text("the\nand\n", encoding="utf-8")
        sl = Stoplist.load(p)
        assert "the" in sl and "and" in sl and "force" not in sl
        default = Stoplist.default()
        assert "the" in default and "on" in default and "a" in default

    def test_matches_stemmed_forms(self):
        # "was" stems to "wa"; the stoplist must still catch it
        sl = Stoplist(["was", "this"])
        assert "wa" in sl and "thi" in sl


class TestTfidf:
    def test_single_doc_all_zero(self):
        vecs = tfidf_vectors([normalize("the force awakens")])
        assert vecs == [{}]

    def test_disjoint_two_docs(self):
        d1 = TokenStream(("alpha", "beta"))
        d2 = TokenStream(("gamma",))
        v1, v2 = tfidf_vectors([d1, d2])
        ln2 = math.log(2)
        assert v1 == pytest.approx({"alpha": 0.5 * ln2, "beta": 0.5 * ln2})
        assert v2 == pytest.approx({"gamma": 1.0 * ln2})

    def test_identical_docs_empty(self):
        d = TokenStream(("luke", "leia"))
        v1, v2 = tfidf_vectors([d, d])
        assert v1 == {} and v2 == {}

    def test_requires_documents(self):
        with pytest.raises(ValueError):
            tfidf_vectors([])

    @given(
        st.lists(
            st.lists(st.sampled_from("abcdefg"), min_size=0, max_size=6),
            min_size=1,
            max_size=6,
        )
    )
    def test_ubiquitous_term_never_appears(self, docs):
        vectors = tfidf_vectors([TokenStream(tuple(d)) for d in docs])
        everywhere = set(docs[0])
        for d in docs[1:]:
            everywhere &= set(d)
        for vec in vectors:
            assert not (everywhere & set(vec))
            assert all(w > 0 for w in vec.values())


class TestCosine:
    def test_identical(self):
        v = {"a": 0.3, "b": 1.1}
        assert cosine(v, v) == pytest.approx(1.0)

    def test_disjoint(self):
        assert cosine({"a": 1.0}, {"b": 2.0}) == 0.0

    def test_hand_computed(self):
        assert cosine({"a": 1.0, "b": 1.0}, {"a": 1.0}) == pytest.approx(1 / math.sqrt(2))

    def test_empty_vector(self):
        assert cosine({}, {"a": 1.0}) == 0.0
        assert cosine({}, {}) == 0.0

    @given(
        st.dictionaries(st.sampled_from("abcdef"), st.floats(0.01, 10), max_size=6),
        st.dictionaries(st.sampled_from("abcdef"), st.floats(0.01, 10), max_size=6),
    )
    def test_symmetric_and_bounded(self, a, b):
        s1, s2 = cosine(a, b), cosine(b, a)
        assert s1 == pytest.approx(s2)
        assert 0.0 <= s1 <= 1.0
