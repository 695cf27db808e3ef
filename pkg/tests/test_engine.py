import pytest
from hypothesis import given, settings, strategies as st

from forestjudge import engine
from forestjudge.chart import parse_all, tag_sentence
from forestjudge.engine import (
    PriorTable,
    auto_resolve,
    judge,
    new_session,
    propagate,
    reset,
    status,
    suggest_next,
)
from forestjudge.extraction import ClassMap, build_incidence
from forestjudge.model import (
    BAD,
    GOOD,
    Incidence,
    ModelError,
    UnknownPropertyError,
    rule_property,
)

from conftest import (
    D_ADVP,
    D_FLIGHT_TO,
    D_FLYTO,
    D_NP,
    D_PROVIDE,
    D_SHOW_TO,
    F154_CHAIN,
    F154_NP,
    F154_REL,
)
from oracles import closure_oracle


class TestNewSession:
    def test_b6_six_candidates_six_undecided(self, hand_b6):
        session = new_session(hand_b6)
        assert session.candidates == frozenset(range(6))
        assert len(session.undecided_discriminants()) == 6
        assert session.state == "consistent"

    def test_singleton_is_trivially_decided(self):
        prop = rule_property("only")
        inc = Incidence(1, (prop,), {prop.key: frozenset({0})})
        session = new_session(inc)
        assert session.candidates == frozenset({0})
        assert session.undecided_discriminants() == ()
        assert session.derived[prop.key] == GOOD

    def test_f154_opens_with_154_candidates(self, f154):
        session = new_session(f154)
        assert len(session.candidates) == 154


class TestJudge:
    def test_np_good_narrows_to_two_and_resolves_structure(self, hand_b6):
        session = judge(new_session(hand_b6), D_NP, GOOD)
        assert session.candidates == frozenset({0, 1})
        assert session.derived[D_ADVP] == BAD
        assert session.derived[D_FLIGHT_TO] == GOOD
        assert session.derived[D_SHOW_TO] == BAD
        assert session.value_of(D_PROVIDE) is None
        assert session.value_of(D_FLYTO) is None

    def test_then_provide_good_leaves_one(self, hand_b6):
        session = judge(new_session(hand_b6), D_NP, GOOD)
        session = judge(session, D_PROVIDE, GOOD)
        assert session.candidates == frozenset({0})
        assert session.derived[D_FLYTO] == BAD

    def test_supersession_equals_single_judgment(self, hand_b6):
        flip = judge(judge(new_session(hand_b6), D_ADVP, GOOD), D_ADVP, BAD)
        direct = judge(new_session(hand_b6), D_ADVP, BAD)
        assert flip == direct

    def test_unknown_key_rejected_session_unchanged(self, hand_b6):
        session = new_session(hand_b6)
        with pytest.raises(UnknownPropertyError):
            judge(session, "c:ZZ:0-1", GOOD)
        assert session == new_session(hand_b6)

    def test_bad_value_rejected(self, hand_b6):
        with pytest.raises(ModelError):
            judge(new_session(hand_b6), D_NP, "maybe")

    def test_judging_universal_property_bad_is_a_conflict(self, hand_b6):
        session = judge(new_session(hand_b6), "st:imperative", BAD)
        assert session.state == "conflict"


class TestPropagate:
    def test_f154_two_judgments_154_20_2(self, f154):
        c1, _d, s1 = propagate({F154_NP: GOOD}, f154)
        assert (len(c1), s1) == (20, "consistent")
        c2, _d, s2 = propagate({F154_NP: GOOD, F154_REL: GOOD}, f154)
        assert (len(c2), s2) == (2, "consistent")

    def test_empty_assertions_derive_good_for_universals(self, hand_b6):
        candidates, derived, state = propagate({}, hand_b6)
        assert candidates == frozenset(range(6))
        assert state == "consistent"
        assert derived == {"st:imperative": GOOD}

    def test_incompatible_constituents_conflict(self, hand_b6):
        candidates, derived, state = propagate({D_NP: GOOD, D_ADVP: GOOD}, hand_b6)
        assert candidates == frozenset()
        assert state == "conflict"
        assert derived == {}


class TestReset:
    def test_reset_restores_fresh_session(self, hand_b6):
        session = judge(judge(new_session(hand_b6), D_NP, GOOD), D_PROVIDE, GOOD)
        assert reset(session) == new_session(hand_b6)

    def test_reset_clears_conflict(self, hand_b6):
        session = judge(judge(new_session(hand_b6), D_NP, GOOD), D_ADVP, GOOD)
        assert session.state == "conflict"
        assert reset(session).state == "consistent"

    def test_reset_is_idempotent(self, hand_b6):
        session = judge(new_session(hand_b6), D_NP, BAD)
        assert reset(reset(session)) == reset(session)

    def test_reset_keeps_auto_assertions(self, hand_b6):
        base = new_session(hand_b6)
        priors = PriorTable({"t:to:-:show:cc_city": (0, 40)})
        classes = ClassMap({"boston": "cc_city"})
        auto = auto_resolve(base, priors, classes)
        assert auto.auto == {D_SHOW_TO: BAD}
        assert reset(judge(auto, D_PROVIDE, GOOD)).auto == {D_SHOW_TO: BAD}


class TestStatus:
    def test_fresh_b6(self, hand_b6):
        assert status(new_session(hand_b6)) == engine.SessionStatus(6, 6, "consistent")

    def test_after_np_good(self, hand_b6):
        session = judge(new_session(hand_b6), D_NP, GOOD)
        assert status(session) == engine.SessionStatus(2, 2, "consistent")

    def test_conflict_reports_zero_possibly_good(self, hand_b6):
        session = judge(judge(new_session(hand_b6), D_NP, GOOD), D_ADVP, GOOD)
        report = status(session)
        assert report.possibly_good == 0
        assert report.state == "conflict"


class TestAutoResolve:
    def fresh_new_york(self, grammar):
        sentence = tag_sentence("ny", "Show me flights to New York", grammar)
        analyses = parse_all(sentence, grammar)
        incidence, _c = build_incidence(analyses, sentence)
        return incidence

    def test_strong_prior_pre_judges_show_to_city(self, grammar, classes):
        incidence = self.fresh_new_york(grammar)
        priors = PriorTable({"t:to:-:show:cc_city": (0, 40)})
        session = auto_resolve(new_session(incidence), priors, classes, 10, 0.99)
        key = "t:0:to:-:5:show:york"
        assert session.auto[key] == BAD
        assert session.value_of(key) == BAD
        # closure consequences applied: the low attachment is forced
        assert len(session.candidates) == 1
        assert session.value_of("t:2:to:+:5:flight:york") == GOOD

    def test_even_split_prior_asserts_nothing(self, grammar, classes):
        incidence = self.fresh_new_york(grammar)
        priors = PriorTable({"t:to:-:show:cc_city": (5, 5)})
        session = auto_resolve(new_session(incidence), priors, classes, 10, 0.99)
        assert session.auto == {}

    def test_user_override_wins(self, grammar, classes):
        incidence = self.fresh_new_york(grammar)
        priors = PriorTable({"t:to:-:show:cc_city": (0, 40)})
        session = auto_resolve(new_session(incidence), priors, classes, 10, 0.99)
        key = "t:0:to:-:5:show:york"
        overridden = judge(session, key, GOOD)
        assert overridden.value_of(key) == GOOD
        # the whole closure is recomputed around the user's value
        oracle = closure_oracle({key: GOOD}, incidence)
        assert (overridden.candidates, overridden.derived) == oracle[:2]

    def test_conflicting_autos_roll_back(self, hand_b6):
        priors = PriorTable({"c:NP:7": (40, 0), "c:ADVP:3": (40, 0)})
        session = auto_resolve(new_session(hand_b6), priors, ClassMap(), 10, 0.99)
        assert session.auto == {}
        assert session.auto_conflict
        assert session.state == "consistent"

    def test_threshold_validation(self, hand_b6):
        with pytest.raises(ModelError):
            auto_resolve(new_session(hand_b6), PriorTable(), ClassMap(), 0, 0.99)
        with pytest.raises(ModelError):
            auto_resolve(new_session(hand_b6), PriorTable(), ClassMap(), 10, 0.5)


class TestSuggestNext:
    def test_fresh_b6_suggests_a_sense(self, hand_b6):
        # senses split 3/3 (worst case 3); every structural discriminant
        # splits 2/4 (worst case 4)
        assert suggest_next(new_session(hand_b6)) == D_FLYTO

    def test_decided_session_suggests_nothing(self, hand_b6):
        session = judge(judge(new_session(hand_b6), D_NP, GOOD), D_PROVIDE, GOOD)
        assert len(session.candidates) == 1
        assert suggest_next(session) is None

    def test_f154_after_np_suggests_the_relative_clause(self, f154):
        session = judge(new_session(f154), F154_NP, GOOD)
        assert suggest_next(session) == F154_REL
        # and the alternative splits strictly worse (1/19 vs 2/18)
        inside = len(session.candidates & f154.holds[F154_CHAIN])
        assert max(inside, 20 - inside) == 19

    def test_conflicted_session_cannot_suggest(self, hand_b6):
        session = judge(judge(new_session(hand_b6), D_NP, GOOD), D_ADVP, GOOD)
        with pytest.raises(ModelError):
            suggest_next(session)


# ---------------------------------------------------------------------------
# Property-based checks against the brute-force oracle.

@st.composite
def incidences(draw):
    n = draw(st.integers(min_value=1, max_value=12))
    p = draw(st.integers(min_value=1, max_value=20))
    props = tuple(rule_property(f"r{i}") for i in range(p))
    holds = {
        prop.key: draw(
            st.frozensets(st.integers(min_value=0, max_value=n - 1))
        )
        for prop in props
    }
    return Incidence(analysis_count=n, properties=props, holds=holds)


@st.composite
def incidences_with_assertions(draw):
    incidence = draw(incidences())
    keys = draw(st.lists(st.sampled_from([p.key for p in incidence.properties]),
                         unique=True, max_size=8))
    values = {k: draw(st.sampled_from([GOOD, BAD])) for k in keys}
    return incidence, values


@settings(max_examples=300, deadline=None)
@given(incidences_with_assertions())
def test_propagate_matches_oracle(case):
    incidence, assertions = case
    assert propagate(assertions, incidence) == closure_oracle(assertions, incidence)


@settings(max_examples=200, deadline=None)
@given(incidences_with_assertions(), st.randoms())
def test_order_independence(case, rng):
    incidence, assertions = case
    items = list(assertions.items())
    sessions = []
    for _ in range(3):
        rng.shuffle(items)
        session = new_session(incidence)
        for key, value in items:
            session = judge(session, key, value)
        sessions.append(session)
    assert sessions[0] == sessions[1] == sessions[2]


@settings(max_examples=200, deadline=None)
@given(incidences_with_assertions(), st.data())
def test_monotonicity_adding_assertions_never_grows_candidates(case, data):
    incidence, assertions = case
    session = new_session(incidence)
    before = session.candidates
    for key, value in assertions.items():
        session = judge(session, key, value)
        assert session.candidates <= before
        before = session.candidates


@settings(max_examples=200, deadline=None)
@given(incidences_with_assertions())
def test_conflict_iff_no_analysis_is_compatible(case):
    incidence, assertions = case
    _c, _d, state = propagate(assertions, incidence)
    oracle_candidates, _od, oracle_state = closure_oracle(assertions, incidence)
    assert state == oracle_state
    assert (state == "conflict") == (not oracle_candidates)


@settings(max_examples=200, deadline=None)
@given(incidences_with_assertions())
def test_closure_completeness_at_single_candidate(case):
    incidence, assertions = case
    candidates, derived, state = propagate(assertions, incidence)
    if state == "consistent" and len(candidates) == 1:
        for prop in incidence.properties:
            assert prop.key in assertions or prop.key in derived


def test_r3_r4_sound_for_the_designated_correct_analysis(hand_b6):
    # analysis 0 (relative reading, "provide" sense) is the intended one;
    # as long as it survives, derived values must agree with it
    import itertools

    keys = [p.key for p in hand_b6.discriminants()]
    for subset in itertools.chain.from_iterable(
        itertools.combinations(keys, k) for k in range(3)
    ):
        for values in itertools.product([GOOD, BAD], repeat=len(subset)):
            assertions = dict(zip(subset, values))
            candidates, derived, state = propagate(assertions, hand_b6)
            if state != "consistent" or 0 not in candidates:
                continue
            for key, value in derived.items():
                held = 0 in hand_b6.holds[key]
                assert held == (value == GOOD)
