import pytest

from forestjudge.chart import parse_all, tag_sentence
from forestjudge.extraction import (
    ClassMap,
    ExtractionError,
    HeadTable,
    abstract_property,
    build_incidence,
    extract_properties,
    prior_key,
)
from forestjudge.model import (
    KIND_SENSE,
    KIND_SENTENCE_TYPE,
    Span,
    TreeNode,
    sense_property,
    triple_property,
)

from conftest import (
    D_ADVP,
    D_FLIGHT_TO,
    D_FLYTO,
    D_NP,
    D_PROVIDE,
    D_SHOW_TO,
)


class TestExtractProperties:
    def test_a1_contains_the_big_np_constituent(self, b6):
        sentence, analyses, _inc, _c = b6
        props = extract_properties(analyses[0], sentence)
        displays = {p.display for p in props}
        assert "NP: the flights to Boston serving a meal" in displays

    def test_a5_contains_non_low_show_to_boston(self, b6):
        sentence, analyses, _inc, _c = b6
        props = extract_properties(analyses[4], sentence)
        by_key = {p.key: p for p in props}
        assert D_SHOW_TO in by_key
        assert by_key[D_SHOW_TO].display == "show -to Boston"

    def test_a2_contains_serve_fly_to_sense(self, b6):
        sentence, analyses, _inc, _c = b6
        props = extract_properties(analyses[1], sentence)
        senses = {p.display for p in props if p.kind == KIND_SENSE}
        assert "serve = fly to" in senses

    def test_single_token_elliptical_np(self, grammar):
        sentence = tag_sentence("frag", "Boston", grammar)
        analyses = parse_all(sentence, grammar)
        assert len(analyses) == 1
        props = extract_properties(analyses[0], sentence)
        types = [p for p in props if p.kind == KIND_SENTENCE_TYPE]
        assert [p.display for p in types] == ["elliptical NP"]

    def test_deterministic(self, b6):
        sentence, analyses, _inc, _c = b6
        for analysis in analyses:
            first = extract_properties(analysis, sentence)
            second = extract_properties(analysis, sentence)
            assert first == second

    def test_one_constituent_per_internal_node(self, b6, w14):
        for sentence, analyses, _inc, _c in (b6, w14):
            for analysis in analyses:
                props = extract_properties(analysis, sentence)
                constituents = [p for p in props if p.kind == "constituent"]
                assert len(constituents) == len(analysis.tree.internal_nodes())

    def test_missing_head_entry_error_names_the_rule(self):
        from forestjudge.model import Analysis, Sentence, Token

        tokens = (Token(0, "blue", "JJ"), Token(1, "bird", "NN"))
        sentence = Sentence("x", tokens)
        tree = TreeNode(
            category="XBAR",
            span=Span(0, 2),
            rule="mystery_rule",
            head=None,
            children=(
                TreeNode("JJ", Span(0, 1)),
                TreeNode("NN", Span(1, 2)),
            ),
        )
        analysis = Analysis(id=0, tree=tree, senses=(), sentence_type="other")
        with pytest.raises(ExtractionError, match="mystery_rule"):
            extract_properties(analysis, sentence, HeadTable())
        # an explicit entry fixes it
        table = HeadTable(entries={("XBAR", "mystery_rule"): 1})
        props = extract_properties(analysis, sentence, table)
        assert any(p.key == "c:XBAR:0-2" for p in props)


class TestBuildIncidence:
    def test_b6_holds_sets_match_the_narrative(self, b6):
        _s, _a, incidence, _c = b6
        assert incidence.analysis_count == 6
        assert incidence.holds[D_NP] == frozenset({0, 1})
        assert incidence.holds[D_ADVP] == frozenset({2, 3, 4, 5})
        assert incidence.holds[D_FLIGHT_TO] == frozenset({0, 1, 2, 3})
        assert incidence.holds[D_SHOW_TO] == frozenset({4, 5})
        assert incidence.holds[D_PROVIDE] == frozenset({0, 2, 4})
        assert incidence.holds[D_FLYTO] == frozenset({1, 3, 5})

    def test_b6_holds_verified_by_reextraction(self, b6):
        sentence, _a, incidence, collapsed = b6
        for prop in incidence.properties:
            for i, analysis in enumerate(collapsed):
                keys = {p.key for p in extract_properties(analysis, sentence)}
                assert (i in incidence.holds[prop.key]) == (prop.key in keys)

    def test_single_analysis_has_zero_discriminants(self, grammar):
        sentence = tag_sentence("one", "Show me flights", grammar)
        analyses = parse_all(sentence, grammar)
        incidence, _c = build_incidence(analyses, sentence)
        assert incidence.analysis_count == 1
        assert incidence.discriminants() == ()
        for prop in incidence.properties:
            assert not incidence.is_discriminant(prop.key)

    def test_w14_wednesday_attachment_is_four_way(self, w14):
        _s, _a, incidence, _c = w14
        on_triples = sorted(
            k for k in incidence.holds if k.startswith("t:") and ":on:" in k
        )
        assert on_triples == [
            "t:0:on:-:7:show:wednesday",
            "t:3:on:-:7:flight:wednesday",
            "t:4:on:-:7:serve:wednesday",
            "t:5:on:+:7:meal:wednesday",
        ]
        for key in on_triples:
            assert incidence.is_discriminant(key)
        # "serving" itself attaches two ways (to the noun or to the verb)
        serving = {k for k in incidence.holds if k.startswith("a:") and ":serve" in k}
        assert incidence.holds["a:3:nmod:+:4:flight:serve"] | incidence.holds[
            "a:0:vmod:-:4:show:serve"
        ] == frozenset(range(14))
        assert serving >= {"a:3:nmod:+:4:flight:serve", "a:0:vmod:-:4:show:serve"}

    def test_collapse_duplicates_records_multiplicity(self, b6):
        sentence, analyses, _inc, _c = b6
        incidence, collapsed = build_incidence([analyses[0], analyses[0], analyses[1]], sentence)
        assert incidence.analysis_count == 2
        assert incidence.multiplicity == (2, 1)
        assert [a.id for a in collapsed] == [0, 1]


class TestAbstraction:
    def test_show_to_boston_abstracts_to_city_class(self, b6, classes):
        _s, _a, incidence, _c = b6
        prop = incidence.lookup(D_SHOW_TO)
        abstracted = abstract_property(prop, classes)
        assert abstracted.display == "show -to cc_city"
        assert abstracted.key == "t:0:to:-:5:show:cc_city"

    def test_non_triple_kinds_pass_through(self, classes):
        prop = sense_property(6, "serve", "serve_provide", "provide")
        assert abstract_property(prop, classes) is prop

    def test_idempotent(self, b6, classes):
        _s, _a, incidence, _c = b6
        for prop in incidence.properties:
            once = abstract_property(prop, classes)
            twice = abstract_property(once, classes)
            assert once == twice

    def test_never_changes_kind_or_span(self, b6, w14, classes):
        for _s, _a, incidence, _c in (b6, w14):
            for prop in incidence.properties:
                abstracted = abstract_property(prop, classes)
                assert abstracted.kind == prop.kind
                assert abstracted.span == prop.span

    def test_unknown_words_map_to_themselves(self):
        prop = triple_property(0, "show", "to", False, 5, "Gotham")
        abstracted = abstract_property(prop, ClassMap({"boston": "cc_city"}))
        assert abstracted.display == "show -to gotham"

    def test_prior_key_is_position_free(self, classes):
        near = triple_property(0, "show", "to", False, 4, "Boston")
        far = triple_property(2, "show", "to", False, 7, "Denver")
        assert prior_key(near, classes) == prior_key(far, classes) == "t:to:-:show:cc_city"

    def test_classmap_file_parsing(self, tmp_path):
        path = tmp_path / "classes.tsv"
        path.write_text("# comment\nboston\tcc_city\n\nparis\tcc_city  # eol\n")
        cmap = ClassMap.load(path)
        assert cmap.resolve("Boston") == "cc_city"
        assert cmap.resolve("paris") == "cc_city"
        assert cmap.resolve("tokyo") == "tokyo"
        bad = tmp_path / "bad.tsv"
        bad.write_text("only-one-column\n")
        with pytest.raises(ExtractionError, match="bad.tsv:1"):
            ClassMap.load(bad)
