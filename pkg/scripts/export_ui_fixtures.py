#!/usr/bin/env python3
"""Regenerate the recorded sentence views used by the frontend tests.

The frontend is tested against a mock service replaying these files, so they
are produced by the real view builder to keep both sides on the same wire
format.  Run from the repository root:

    python3 scripts/export_ui_fixtures.py
"""

import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

from conftest import D_FLYTO, D_NP  # noqa: E402

from forestjudge import engine  # noqa: E402
from forestjudge.chart import load_grammar, tag_sentence  # noqa: E402
from forestjudge import data_path  # noqa: E402
from forestjudge.model import (  # noqa: E402
    Incidence,
    Span,
    constituent_property,
    sense_property,
    sentence_type_property,
    triple_property,
)
from forestjudge.service import view_payload  # noqa: E402


def hand_b6() -> Incidence:
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
        "c:NP:2-9": frozenset({0, 1}),
        "c:ADVP:6-9": frozenset({2, 3, 4, 5}),
        "t:3:to:+:5:flight:boston": frozenset({0, 1, 2, 3}),
        "t:0:to:-:5:show:boston": frozenset({4, 5}),
        "s:6:serve_provide": frozenset({0, 2, 4}),
        "s:6:serve_flyto": frozenset({1, 3, 5}),
        "st:imperative": frozenset(range(6)),
    }
    return Incidence(analysis_count=6, properties=props, holds=holds)


def main() -> None:
    out_dir = Path(__file__).resolve().parent.parent / "frontend" / "tests" / "fixtures"
    out_dir.mkdir(parents=True, exist_ok=True)
    grammar = load_grammar(data_path("atis.grammar"))
    sentence = tag_sentence("b6", "Show me the flights to Boston serving a meal", grammar)
    incidence = hand_b6()

    views = {}
    initial = engine.new_session(incidence)
    views["b6_initial"] = (initial, 0)
    after_np = engine.judge(initial, D_NP, "good")
    views["b6_after_np"] = (after_np, 1)
    after_flyto = engine.judge(after_np, D_FLYTO, "bad")
    views["b6_after_flyto_bad"] = (after_flyto, 2)
    views["b6_reset"] = (engine.reset(after_flyto), 3)

    for name, (session, seq) in views.items():
        payload = view_payload(
            sentence=sentence,
            session=session,
            status="undecided",
            provenance_of=session.provenance_of,
            seq=seq,
        )
        path = out_dir / f"{name}.json"
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
