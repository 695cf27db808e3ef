"""HTTP annotation service.

The service owns all judging state; the browser client is stateless across
reloads.  Endpoints (bodies and responses are JSON; the canonical view shape
is documented in the README):

    GET  /files                                corpus files and their counts
    GET  /sentences/{id}?expert=bool           sentence view
    POST /sentences/{id}/judgments             {key, value, seq?} -> new view
    POST /sentences/{id}/reset                 {seq?} -> new view
    POST /sentences/{id}/status                {status, failureType?, comment?}
    GET  /suspects                             likely judging errors
    POST /merge                                {id} re-parse and merge
    POST /parse                                {text} type-in mode

Writes to one sentence are serialized and persisted before the response is
sent; writes to distinct sentences proceed in parallel and reads never
block.  A judgment request may carry the ``seq`` token from the view it was
based on: a stale token yields 409 unless the request is an exact re-send of
the last applied action, which is answered idempotently with the current
view.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

from fastapi import FastAPI, HTTPException, Query
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import engine, store
from .chart import Grammar, ParseError, parse_all, tag_sentence
from .engine import PriorTable, Session
from .extraction import ClassMap, build_incidence
from .model import Sentence, UnknownPropertyError
from .store import Corpus, SentenceRecord, StoreError

UNDECIDED = "undecided"


def view_payload(
    sentence: Sentence,
    session: Session,
    status: str,
    provenance_of,
    seq: int,
    expert: bool = False,
    failure_type: str | None = None,
    comment: str | None = None,
    forest: list[str] | None = None,
) -> dict:
    """The canonical sentence view: everything the client needs, no trees
    unless expert mode asks for them."""

    def item(prop) -> dict:
        value = session.value_of(prop.key)
        return {
            "key": prop.key,
            "display": prop.display,
            "kind": prop.kind,
            "friendliness": prop.friendliness,
            "value": value if value is not None else UNDECIDED,
            "provenance": provenance_of(prop.key),
        }

    displayed = session.incidence.displayed_discriminants()
    payload = {
        "id": sentence.id,
        "text": sentence.text,
        "tokens": [{"surface": t.surface, "pos": t.pos} for t in sentence.tokens],
        "possiblyGood": len(session.candidates)
        if session.state == engine.STATE_CONSISTENT
        else 0,
        "state": session.state,
        "status": status,
        "failureType": failure_type,
        "comment": comment,
        "seq": seq,
        "discriminants": [item(p) for p in displayed],
        "undecidedCount": sum(
            1 for p in displayed if session.value_of(p.key) is None
        ),
        "hiddenCount": len(session.incidence.properties) - len(displayed),
        "autoConflict": session.auto_conflict,
    }
    if expert:
        shown = {p.key for p in displayed}
        payload["properties"] = [
            dict(item(p), discriminant=session.incidence.is_discriminant(p.key))
            for p in session.incidence.properties
            if p.key not in shown
        ]
        payload["forest"] = forest or []
    return payload


def record_view(record: SentenceRecord, expert: bool = False) -> dict:
    forest = None
    if expert:
        forest = [store.tree_to_text(a.tree, record.sentence) for a in record.analyses]
    return view_payload(
        sentence=record.sentence,
        session=record.session,
        status=record.status,
        provenance_of=record.provenance_of,
        seq=len(record.log),
        expert=expert,
        failure_type=record.failure_type,
        comment=record.comment,
        forest=forest,
    )


class JudgmentBody(BaseModel):
    key: str
    value: str
    seq: int | None = None


class ResetBody(BaseModel):
    seq: int | None = None


class StatusBody(BaseModel):
    status: str
    failureType: str | None = None
    comment: str | None = None


class MergeBody(BaseModel):
    id: str


class ParseBody(BaseModel):
    text: str


@dataclass
class ServiceState:
    corpus: Corpus
    grammar: Grammar | None = None
    classes: ClassMap | None = None
    auto: bool = False
    priors: PriorTable | None = None

    def __post_init__(self):
        self.scratch: dict[str, SentenceRecord] = {}
        self._scratch_count = 0
        self._scratch_lock = threading.Lock()

    def get_record(self, sentence_id: str) -> SentenceRecord:
        if sentence_id in self.scratch:
            return self.scratch[sentence_id]
        try:
            return self.corpus.get(sentence_id)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown sentence {sentence_id!r}")

    def put_record(self, record: SentenceRecord) -> None:
        if record.id in self.scratch:
            self.scratch[record.id] = record
        else:
            self.corpus.update(record)

    def new_scratch_id(self) -> str:
        with self._scratch_lock:
            self._scratch_count += 1
            return f"typein-{self._scratch_count}"


def apply_auto(state: ServiceState, record: SentenceRecord) -> SentenceRecord:
    """Log auto assertions for a record that has none yet (auto mode)."""
    if not state.auto or record.log:
        return record
    priors = state.priors or store.update_priors(state.corpus, state.classes)
    session = engine.auto_resolve(
        record.session, priors, state.classes or ClassMap()
    )
    if session.auto_conflict:
        return record
    for key, value in sorted(session.auto.items()):
        record = store.apply_judgment(record, key, value, engine.PROV_AUTO)
    return record


def create_app(
    corpus: Corpus,
    grammar: Grammar | None = None,
    classes: ClassMap | None = None,
    auto: bool = False,
) -> FastAPI:
    app = FastAPI(title="forestjudge", version="0.1.0")
    state = ServiceState(corpus=corpus, grammar=grammar, classes=classes, auto=auto)
    app.state.service = state

    @app.exception_handler(UnknownPropertyError)
    def _unknown_key(_request, exc):
        return JSONResponse(status_code=404, content={"detail": f"unknown property {exc}"})

    @app.exception_handler(StoreError)
    def _store_error(_request, exc):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/files")
    def files():
        out = []
        for file_id in sorted(state.corpus.files):
            records = state.corpus.files[file_id].records
            out.append(
                {
                    "id": file_id,
                    "sentences": len(records),
                    "byStatus": {
                        s: sum(1 for r in records if r.status == s)
                        for s in (store.STATUS_UNDECIDED, store.STATUS_OK, store.STATUS_NOT_OK)
                    },
                }
            )
        return out

    @app.get("/sentences/{sentence_id}")
    def get_sentence(sentence_id: str, expert: bool = Query(default=False)):
        record = state.get_record(sentence_id)
        if state.auto and not record.log:
            with state.corpus.lock_for(sentence_id):
                record = apply_auto(state, state.get_record(sentence_id))
                state.put_record(record)
        return record_view(record, expert=expert)

    def _check_seq(record: SentenceRecord, seq: int | None, repeat_of) -> bool:
        """True when the request is an idempotent re-send; raises 409 when stale."""
        if seq is None or seq == len(record.log):
            return False
        if seq == len(record.log) - 1 and record.log and repeat_of(record.log[-1]):
            return True
        raise HTTPException(
            status_code=409,
            detail=f"sentence changed (log at {len(record.log)}, request at {seq})",
        )

    @app.post("/sentences/{sentence_id}/judgments")
    def post_judgment(sentence_id: str, body: JudgmentBody, expert: bool = False):
        with state.corpus.lock_for(sentence_id):
            record = state.get_record(sentence_id)
            if _check_seq(
                record,
                body.seq,
                lambda e: e.action == "judge"
                and e.key == body.key
                and e.value == body.value
                and e.provenance == engine.PROV_USER,
            ):
                return record_view(record, expert=expert)
            record = store.apply_judgment(record, body.key, body.value, engine.PROV_USER)
            state.put_record(record)
        return record_view(record, expert=expert)

    @app.post("/sentences/{sentence_id}/reset")
    def post_reset(sentence_id: str, body: ResetBody | None = None, expert: bool = False):
        seq = body.seq if body else None
        with state.corpus.lock_for(sentence_id):
            record = state.get_record(sentence_id)
            if _check_seq(record, seq, lambda e: e.action == "reset"):
                return record_view(record, expert=expert)
            record = store.apply_reset(record)
            if state.auto:
                priors = state.priors or store.update_priors(state.corpus, state.classes)
                session = engine.auto_resolve(
                    engine.new_session(record.incidence), priors, state.classes or ClassMap()
                )
                if not session.auto_conflict:
                    for key, value in sorted(session.auto.items()):
                        record = store.apply_judgment(record, key, value, engine.PROV_AUTO)
            state.put_record(record)
        return record_view(record, expert=expert)

    @app.post("/sentences/{sentence_id}/status")
    def post_status(sentence_id: str, body: StatusBody, expert: bool = False):
        with state.corpus.lock_for(sentence_id):
            record = state.get_record(sentence_id)
            if body.status == store.STATUS_OK:
                record = store.mark_ok(record)
            elif body.status == store.STATUS_NOT_OK:
                if not body.failureType:
                    raise HTTPException(status_code=400, detail="not-ok needs a failureType")
                record = store.mark_not_ok(record, body.failureType, body.comment)
            elif body.status == store.STATUS_UNDECIDED:
                record = store.mark_undecided(record)
            else:
                raise HTTPException(status_code=400, detail=f"unknown status {body.status!r}")
            state.put_record(record)
        return record_view(record, expert=expert)

    @app.get("/suspects")
    def suspects():
        priors = store.update_priors(state.corpus, state.classes)
        found = store.find_suspects(state.corpus, priors, state.classes)
        return [
            {
                "id": s.record.id,
                "key": s.key,
                "userValue": s.user_value,
                "majority": s.majority,
                "agreement": round(s.agreement, 4),
                "support": s.support,
            }
            for s in found
        ]

    @app.post("/merge")
    def post_merge(body: MergeBody):
        if state.grammar is None:
            raise HTTPException(status_code=400, detail="service started without a grammar")
        with state.corpus.lock_for(body.id):
            record = state.get_record(body.id)
            try:
                analyses = parse_all(record.sentence, state.grammar)
            except ParseError as exc:
                raise HTTPException(status_code=400, detail=str(exc))
            merged, report = store.merge(record, analyses)
            state.put_record(merged)
        return {
            "view": record_view(merged),
            "transferred": len(report.transferred),
            "vanished": [e.key for e in report.vanished],
            "statusBefore": report.status_before,
            "statusAfter": report.status_after,
        }

    @app.post("/parse")
    def post_parse(body: ParseBody):
        if state.grammar is None:
            raise HTTPException(status_code=400, detail="service started without a grammar")
        scratch_id = state.new_scratch_id()
        try:
            sentence = tag_sentence(scratch_id, body.text, state.grammar)
            analyses = parse_all(sentence, state.grammar)
        except ParseError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        _incidence, collapsed = build_incidence(analyses, sentence)
        record = SentenceRecord(sentence=sentence, analyses=tuple(collapsed))
        state.scratch[scratch_id] = record
        return record_view(record)

    return app
