import pytest

from forestjudge import data_path
from forestjudge.chart import load_grammar, parse_all, tag_sentence
from forestjudge.extraction import ClassMap, build_incidence
from forestjudge.model import (
    Incidence,
    Span,
    constituent_property,
    sense_property,
    sentence_type_property,
    triple_property,
)
from forestjudge.store import Corpus, CorpusFile, SentenceRecord

B6_TEXT = "Show me the flights to Boston serving a meal"
W14_TEXT = "Show me the flights serving meals on Wednesday"

# Keys of the six discriminants the Boston sentence is judged through.
D_NP = "c:NP:2-9"
D_ADVP = "c:ADVP:6-9"
D_FLIGHT_TO = "t:3:to:+:5:flight:boston"
D_SHOW_TO = "t:0:to:-:5:show:boston"
D_PROVIDE = "s:6:serve_provide"
D_FLYTO = "s:6:serve_flyto"


@pytest.fixture(scope="session")
def grammar():
    return load_grammar(data_path("atis.grammar"))


@pytest.fixture(scope="session")
def classes():
    return ClassMap.load(data_path("classes.tsv"))


@pytest.fixture(scope="session")
def b6(grammar):
    """Parsed Boston sentence: (sentence, analyses, incidence, collapsed)."""
    sentence = tag_sentence("b6", B6_TEXT, grammar)
    analyses = parse_all(sentence, grammar)
    incidence, collapsed = build_incidence(analyses, sentence)
    return sentence, analyses, incidence, collapsed


@pytest.fixture(scope="session")
def w14(grammar):
    sentence = tag_sentence("w14", W14_TEXT, grammar)
    analyses = parse_all(sentence, grammar)
    incidence, collapsed = build_incidence(analyses, sentence)
    return sentence, analyses, incidence, collapsed


@pytest.fixture()
def hand_b6():
    """Minimal hand-built incidence for the Boston sentence.

    Six analyses, the six discriminants named in the judging narrative, plus
    the universal sentence-type property.  Analyses 0/1 are the relative
    readings, 2/3 adverbial with low PP attachment, 4/5 adverbial with high
    attachment; even ids use the "provide" sense.
    """
    props = (
        constituent_property("NP", Span(2, 9), "the flights to Boston serving a meal"),
        constituent_property("ADVP", Span(6, 9), "serving a meal"),
        triple_property(3, "flight", "to", True, 5, "Boston"),
        triple_property(0, "show", "to", False, 5, "Boston"),
        sense_property(6, "serve", "serve_provide", "provide"),
        sense_property(6, "serve", "serve_flyto", "fly to"),
        sentence_type_property("imperative", 9),
    )
    holds = {
        D_NP: frozenset({0, 1}),
        D_ADVP: frozenset({2, 3, 4, 5}),
        D_FLIGHT_TO: frozenset({0, 1, 2, 3}),
        D_SHOW_TO: frozenset({4, 5}),
        D_PROVIDE: frozenset({0, 2, 4}),
        D_FLYTO: frozenset({1, 3, 5}),
        "st:imperative": frozenset(range(6)),
    }
    return Incidence(analysis_count=6, properties=props, holds=holds)


F154_NP = "c:NP:2-16"
F154_REL = "c:REL:5-9"
F154_CHAIN = "t:8:from:+:10:stop:washington"


@pytest.fixture()
def f154():
    """Constructed 154-analysis incidence for the long flight question.

    Approving the full NP keeps analyses 0..19; approving the relative
    clause keeps {0, 1}, which differ only in an attachment-chain detail
    (the two survivors are equally acceptable).
    """
    props = (
        constituent_property(
            "NP",
            Span(2, 16),
            "the earliest flight that has no stops from Washington "
            "to San Francisco on Friday",
        ),
        constituent_property("REL", Span(5, 9), "that has no stops"),
        constituent_property("NP", Span(2, 5), "the earliest flight"),
        triple_property(8, "stop", "from", True, 10, "Washington"),
        sense_property(8, "stop", "stop_n1", "stopover"),
        sense_property(8, "stop", "stop_n2", "halt"),
        sentence_type_property("wh-question", 16),
    )
    holds = {
        F154_NP: frozenset(range(20)),
        F154_REL: frozenset({0, 1} | set(range(20, 118))),
        "c:NP:2-5": frozenset(range(20, 154)),
        F154_CHAIN: frozenset({0} | set(range(118, 136))),
        "s:8:stop_n1": frozenset(range(0, 87)),
        "s:8:stop_n2": frozenset(range(87, 154)),
        "st:wh-question": frozenset(range(154)),
    }
    return Incidence(analysis_count=154, properties=props, holds=holds)


def make_record(grammar, sentence_id: str, text: str) -> SentenceRecord:
    sentence = tag_sentence(sentence_id, text, grammar)
    analyses = parse_all(sentence, grammar)
    _incidence, collapsed = build_incidence(analyses, sentence)
    return SentenceRecord(sentence=sentence, analyses=tuple(collapsed))


def make_corpus(grammar, texts, directory=None, per_file=50) -> Corpus:
    """Corpus of parsed sentences, optionally persisted to a directory."""
    corpus = Corpus(directory)
    records = [
        make_record(grammar, f"s{n:04d}", text) for n, text in enumerate(texts, 1)
    ]
    for chunk_no, start in enumerate(range(0, len(records), per_file), 1):
        corpus.add_file(
            CorpusFile(
                file_id=f"f{chunk_no:04d}",
                records=tuple(records[start:start + per_file]),
            )
        )
    return corpus
