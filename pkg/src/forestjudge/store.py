"""Corpus persistence, judgment logging and cross-sentence tooling.

A corpus is a directory of UTF-8 line-delimited files, each holding up to
fifty sentence records: a header line with the format version, then one
self-describing JSON object per sentence.  Parse trees are serialized as
labelled bracketings with rule and head annotations, for example
``(VP/vp_ditrans^0 (V show) (NP/np_pron^0 (PRON me)) ...)``.

The judgment log of a record is append-only; the effective state is derived
by latest-wins per property key, with the extra rule that a user judgment
always outranks an automatic or propagated one on the same key.  A reset
marker cuts the log: only entries after the last reset count.  Serialization
is canonical (sorted keys, no timestamps), so identical corpus states yield
byte-identical files.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass, replace
from functools import cached_property
from pathlib import Path

from . import engine
from .engine import PriorTable, Session, PROV_DERIVED, PROV_POS, PROV_USER
from .extraction import ClassMap, build_incidence, prior_key
from .model import (
    Analysis,
    BAD,
    GOOD,
    Incidence,
    Sentence,
    SenseTag,
    Span,
    Token,
    TreeNode,
    UnknownPropertyError,
    structural_signature,
)

FORMAT_NAME = "forestjudge-corpus"
FORMAT_VERSION = 1
MAX_RECORDS_PER_FILE = 50

STATUS_UNDECIDED = "undecided"
STATUS_OK = "ok"
STATUS_NOT_OK = "not-ok"

DEFAULT_FAILURE_TYPES = (
    "missing-lexicon",
    "missing-construction",
    "wrong-tree-only",
    "extraction-gap",
    "other",
)


class StoreError(ValueError):
    """Corpus file or corpus state problem."""


@dataclass(frozen=True)
class LogEntry:
    seq: int
    action: str  # "judge" or "reset"
    key: str | None = None
    value: str | None = None
    provenance: str | None = None


@dataclass(frozen=True)
class SentenceRecord:
    sentence: Sentence
    analyses: tuple[Analysis, ...]
    log: tuple[LogEntry, ...] = ()
    status: str = STATUS_UNDECIDED
    failure_type: str | None = None
    comment: str | None = None

    @property
    def id(self) -> str:
        return self.sentence.id

    @cached_property
    def incidence(self) -> Incidence:
        inc, _collapsed = build_incidence(list(self.analyses), self.sentence)
        return inc

    def tail_log(self) -> tuple[LogEntry, ...]:
        """Entries after the last reset marker."""
        cut = 0
        for i, entry in enumerate(self.log):
            if entry.action == "reset":
                cut = i + 1
        return self.log[cut:]

    def effective_entries(self) -> dict[str, LogEntry]:
        """Latest entry per key; user judgments outrank auto/propagated ones."""
        chosen: dict[str, LogEntry] = {}
        for entry in self.tail_log():
            if entry.action != "judge":
                continue
            current = chosen.get(entry.key)
            if (
                current is not None
                and current.provenance == PROV_USER
                and entry.provenance != PROV_USER
            ):
                continue
            chosen[entry.key] = entry
        return chosen

    @cached_property
    def session(self) -> Session:
        user: dict[str, str] = {}
        auto: dict[str, str] = {}
        for key, entry in self.effective_entries().items():
            if entry.provenance == PROV_USER:
                user[key] = entry.value
            else:
                auto[key] = entry.value
        return engine._rebuild(self.incidence, user, auto)

    def provenance_of(self, key: str) -> str | None:
        entry = self.effective_entries().get(key)
        if entry is not None:
            return entry.provenance
        if key in self.session.derived:
            return PROV_DERIVED
        return None

    def user_judgment_count(self) -> int:
        return sum(
            1 for e in self.tail_log() if e.action == "judge" and e.provenance == PROV_USER
        )


@dataclass(frozen=True)
class CorpusFile:
    file_id: str
    records: tuple[SentenceRecord, ...]

    def __post_init__(self):
        if not 1 <= len(self.records) <= MAX_RECORDS_PER_FILE:
            raise StoreError(
                f"file {self.file_id!r} has {len(self.records)} records, "
                f"allowed range is 1..{MAX_RECORDS_PER_FILE}"
            )
        ids = [r.id for r in self.records]
        if len(ids) != len(set(ids)):
            raise StoreError(f"file {self.file_id!r} has duplicate sentence ids")


# --------------------------------------------------------------------------
# Tree and record serialization.

def tree_to_text(node: TreeNode, sentence: Sentence) -> str:
    if node.is_leaf:
        surface = sentence.tokens[node.span.start].surface
        if "(" in surface or ")" in surface or " " in surface:
            raise StoreError(f"cannot serialize token surface {surface!r}")
        return f"({node.category} {surface})"
    label = node.category
    if node.rule is not None:
        label += f"/{node.rule}"
    if node.head is not None:
        label += f"^{node.head}"
    inner = " ".join(tree_to_text(c, sentence) for c in node.children)
    return f"({label} {inner})"


def tree_from_text(text: str) -> TreeNode:
    pos = 0
    leaf_index = 0

    def error(msg: str):
        return StoreError(f"bad tree at offset {pos}: {msg} in {text!r}")

    def skip_ws():
        nonlocal pos
        while pos < len(text) and text[pos] == " ":
            pos += 1

    def parse_node() -> TreeNode:
        nonlocal pos, leaf_index
        skip_ws()
        if pos >= len(text) or text[pos] != "(":
            raise error("expected '('")
        pos += 1
        skip_ws()
        start_label = pos
        while pos < len(text) and text[pos] not in " ()":
            pos += 1
        label = text[start_label:pos]
        if not label:
            raise error("missing node label")
        category, rule, head = label, None, None
        if "/" in label:
            category, rest = label.split("/", 1)
            rule = rest
        if rule is not None and "^" in rule:
            rule, head_text = rule.rsplit("^", 1)
            head = int(head_text)
        elif "^" in category:
            category, head_text = category.rsplit("^", 1)
            head = int(head_text)
        skip_ws()
        if pos < len(text) and text[pos] == "(":
            children = []
            while pos < len(text) and text[pos] == "(":
                children.append(parse_node())
                skip_ws()
            if pos >= len(text) or text[pos] != ")":
                raise error("expected ')'")
            pos += 1
            span = Span(children[0].span.start, children[-1].span.end)
            return TreeNode(
                category=category, span=span, children=tuple(children), rule=rule, head=head
            )
        start_word = pos
        while pos < len(text) and text[pos] not in " ()":
            pos += 1
        word = text[start_word:pos]
        if not word:
            raise error("leaf without a word")
        skip_ws()
        if pos >= len(text) or text[pos] != ")":
            raise error("expected ')'")
        pos += 1
        node = TreeNode(category=category, span=Span(leaf_index, leaf_index + 1))
        leaf_index += 1
        return node

    node = parse_node()
    skip_ws()
    if pos != len(text):
        raise error("trailing text")
    return node


def _analysis_to_json(analysis: Analysis, sentence: Sentence) -> dict:
    return {
        "mult": analysis.multiplicity,
        "senses": {
            str(i): [t.root, t.label, t.gloss, t.ambiguous] for i, t in analysis.senses
        },
        "tree": tree_to_text(analysis.tree, sentence),
        "type": analysis.sentence_type,
    }


def _analysis_from_json(obj: dict, index: int) -> Analysis:
    senses = tuple(
        (int(i), SenseTag(root=v[0], label=v[1], gloss=v[2], ambiguous=bool(v[3])))
        for i, v in sorted(obj["senses"].items(), key=lambda kv: int(kv[0]))
    )
    return Analysis(
        id=index,
        tree=tree_from_text(obj["tree"]),
        senses=senses,
        sentence_type=obj["type"],
        multiplicity=obj.get("mult", 1),
    )


def _entry_to_json(entry: LogEntry) -> list:
    if entry.action == "reset":
        return ["reset", entry.seq]
    return ["judge", entry.seq, entry.key, entry.value, entry.provenance]


def _entry_from_json(obj: list) -> LogEntry:
    if obj[0] == "reset":
        return LogEntry(seq=obj[1], action="reset")
    if obj[0] == "judge":
        return LogEntry(seq=obj[1], action="judge", key=obj[2], value=obj[3], provenance=obj[4])
    raise StoreError(f"unknown log action {obj[0]!r}")


def record_to_json(record: SentenceRecord) -> dict:
    return {
        "analyses": [_analysis_to_json(a, record.sentence) for a in record.analyses],
        "comment": record.comment,
        "failure_type": record.failure_type,
        "id": record.id,
        "log": [_entry_to_json(e) for e in record.log],
        "status": record.status,
        "tokens": [[t.surface, t.pos] for t in record.sentence.tokens],
    }


def record_from_json(obj: dict) -> SentenceRecord:
    tokens = tuple(
        Token(index=i, surface=s, pos=p) for i, (s, p) in enumerate(obj["tokens"])
    )
    sentence = Sentence(id=obj["id"], tokens=tokens)
    analyses = tuple(
        _analysis_from_json(a, i) for i, a in enumerate(obj["analyses"])
    )
    return SentenceRecord(
        sentence=sentence,
        analyses=analyses,
        log=tuple(_entry_from_json(e) for e in obj["log"]),
        status=obj["status"],
        failure_type=obj["failure_type"],
        comment=obj["comment"],
    )


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def validate_record(record: SentenceRecord) -> None:
    if record.status == STATUS_OK:
        session = record.session
        if session.state != engine.STATE_CONSISTENT or not session.candidates:
            raise StoreError(
                f"record {record.id!r} is marked ok but its session is not consistent"
            )
    if record.status == STATUS_NOT_OK and not record.failure_type:
        raise StoreError(f"record {record.id!r} is marked not-ok without a failure type")


def save_file(corpus_file: CorpusFile, path: str | Path) -> None:
    for record in corpus_file.records:
        validate_record(record)
    lines = [
        _dumps({"format": FORMAT_NAME, "id": corpus_file.file_id, "version": FORMAT_VERSION})
    ]
    lines.extend(_dumps(record_to_json(r)) for r in corpus_file.records)
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text("\n".join(lines) + "\n", encoding="utf-8")
    os.replace(tmp, path)


def load_file(path: str | Path) -> CorpusFile:
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines:
        raise StoreError(f"{path.name}:1: empty corpus file")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise StoreError(f"{path.name}:1: malformed header: {exc}") from None
    if not isinstance(header, dict) or header.get("format") != FORMAT_NAME:
        raise StoreError(f"{path.name}:1: not a {FORMAT_NAME} file")
    if header.get("version") != FORMAT_VERSION:
        raise StoreError(
            f"{path.name}:1: version {header.get('version')!r} not supported "
            f"(expected {FORMAT_VERSION})"
        )
    records = []
    for lineno, line in enumerate(lines[1:], 2):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            records.append(record_from_json(obj))
        except (json.JSONDecodeError, KeyError, IndexError, ValueError) as exc:
            which = f" (record {len(records) + 1})"
            raise StoreError(f"{path.name}:{lineno}: malformed record{which}: {exc}") from None
    return CorpusFile(file_id=header["id"], records=tuple(records))


# --------------------------------------------------------------------------
# Record mutation helpers.  Records are immutable; each helper returns the
# new record.

def _next_seq(record: SentenceRecord) -> int:
    return record.log[-1].seq + 1 if record.log else 0


def _with_status_transitions(record: SentenceRecord) -> SentenceRecord:
    """Automatic status moves driven by the closure.

    A record becomes ok when its closure pins a single candidate, and an ok
    record falls back to undecided when a judgment creates a conflict.
    """
    session = record.session
    if session.state == engine.STATE_CONFLICT:
        if record.status == STATUS_OK:
            return replace(record, status=STATUS_UNDECIDED)
        return record
    if len(session.candidates) == 1 and record.status == STATUS_UNDECIDED:
        return replace(record, status=STATUS_OK)
    return record


def apply_judgment(
    record: SentenceRecord, key: str, value: str, provenance: str = PROV_USER
) -> SentenceRecord:
    if key not in record.incidence:
        raise UnknownPropertyError(key)
    if value not in (GOOD, BAD):
        raise StoreError(f"judgment value must be good or bad, got {value!r}")
    entry = LogEntry(
        seq=_next_seq(record), action="judge", key=key, value=value, provenance=provenance
    )
    return _with_status_transitions(replace(record, log=record.log + (entry,)))


def apply_reset(record: SentenceRecord) -> SentenceRecord:
    entry = LogEntry(seq=_next_seq(record), action="reset")
    updated = replace(record, log=record.log + (entry,))
    if updated.status == STATUS_OK:
        updated = replace(updated, status=STATUS_UNDECIDED)
    return updated


def mark_ok(record: SentenceRecord) -> SentenceRecord:
    session = record.session
    if session.state != engine.STATE_CONSISTENT or not session.candidates:
        raise StoreError(f"cannot mark {record.id!r} ok: session is conflicted")
    return replace(record, status=STATUS_OK, failure_type=None)


def mark_undecided(record: SentenceRecord) -> SentenceRecord:
    return replace(record, status=STATUS_UNDECIDED, failure_type=None)


def mark_not_ok(
    record: SentenceRecord,
    failure_type: str,
    comment: str | None = None,
    allowed_types: tuple[str, ...] = DEFAULT_FAILURE_TYPES,
) -> SentenceRecord:
    """Coverage-failure triage; re-marking replaces the previous type."""
    if failure_type not in allowed_types:
        raise StoreError(
            f"unknown failure type {failure_type!r}; allowed: {', '.join(allowed_types)}"
        )
    return replace(
        record, status=STATUS_NOT_OK, failure_type=failure_type, comment=comment
    )


# --------------------------------------------------------------------------
# Corpus: a directory of corpus files with per-sentence write serialization.

class Corpus:
    """In-memory view of a corpus directory.

    Reads are lock-free (records are immutable values); writes to the same
    sentence are serialized by a per-file lock and persisted before the call
    returns.  A Corpus may also live purely in memory (no directory).
    """

    def __init__(self, directory: str | Path | None = None):
        self.directory = Path(directory) if directory is not None else None
        self.files: dict[str, CorpusFile] = {}
        self._file_of: dict[str, str] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._file_locks: dict[str, threading.Lock] = {}
        self._global_lock = threading.Lock()

    @classmethod
    def load(cls, directory: str | Path) -> "Corpus":
        corpus = cls(directory)
        for path in sorted(Path(directory).glob("*.fjc")):
            corpus._attach(load_file(path))
        return corpus

    def _attach(self, corpus_file: CorpusFile) -> None:
        if corpus_file.file_id in self.files:
            raise StoreError(f"duplicate corpus file id {corpus_file.file_id!r}")
        for record in corpus_file.records:
            if record.id in self._file_of:
                raise StoreError(f"duplicate sentence id {record.id!r} in corpus")
            self._file_of[record.id] = corpus_file.file_id
        self.files[corpus_file.file_id] = corpus_file

    def add_file(self, corpus_file: CorpusFile, save: bool = True) -> None:
        self._attach(corpus_file)
        if save:
            self._save(corpus_file.file_id)

    def _save(self, file_id: str) -> None:
        if self.directory is None:
            return
        self.directory.mkdir(parents=True, exist_ok=True)
        save_file(self.files[file_id], self.directory / f"{file_id}.fjc")

    def save_all(self) -> None:
        for file_id in self.files:
            self._save(file_id)

    def lock_for(self, sentence_id: str) -> threading.Lock:
        with self._global_lock:
            return self._locks.setdefault(sentence_id, threading.Lock())

    def _lock_for_file(self, file_id: str) -> threading.Lock:
        with self._global_lock:
            return self._file_locks.setdefault(file_id, threading.Lock())

    def records(self):
        for file_id in sorted(self.files):
            yield from self.files[file_id].records

    def get(self, sentence_id: str) -> SentenceRecord:
        file_id = self._file_of.get(sentence_id)
        if file_id is None:
            raise KeyError(sentence_id)
        for record in self.files[file_id].records:
            if record.id == sentence_id:
                return record
        raise KeyError(sentence_id)

    def __contains__(self, sentence_id: str) -> bool:
        return sentence_id in self._file_of

    def update(self, new_record: SentenceRecord) -> None:
        """Replace the stored record with the same id and persist its file.

        The read-modify-write of the containing file is serialized per file,
        so concurrent updates to different sentences of one file cannot lose
        each other.
        """
        file_id = self._file_of.get(new_record.id)
        if file_id is None:
            raise KeyError(new_record.id)
        with self._lock_for_file(file_id):
            old = self.files[file_id]
            records = tuple(
                new_record if r.id == new_record.id else r for r in old.records
            )
            self.files[file_id] = CorpusFile(file_id=file_id, records=records)
            self._save(file_id)


def list_failures(corpus: Corpus, failure_type: str) -> list[SentenceRecord]:
    return [
        r
        for r in corpus.records()
        if r.status == STATUS_NOT_OK and r.failure_type == failure_type
    ]


# --------------------------------------------------------------------------
# Merge across coverage changes.

@dataclass(frozen=True)
class MergeReport:
    transferred: tuple[LogEntry, ...]
    vanished: tuple[LogEntry, ...]
    status_before: str
    status_after: str


def merge(
    old: SentenceRecord,
    new_analyses: list[Analysis],
    new_sentence: Sentence | None = None,
) -> tuple[SentenceRecord, MergeReport]:
    """Transfer judgments from an old analysis set to a new one.

    Judgments are replayed in original order when their canonical key still
    names a property of the new incidence; the rest are archived in the
    report.  Tokens must be unchanged (a merge across retokenization is
    refused).  An ok record whose closure no longer pins a unique candidate
    drops back to undecided.
    """
    if new_sentence is not None:
        old_toks = [(t.surface, t.pos) for t in old.sentence.tokens]
        new_toks = [(t.surface, t.pos) for t in new_sentence.tokens]
        if old_toks != new_toks:
            raise StoreError(
                f"cannot merge {old.id!r}: tokenization changed "
                f"({len(old_toks)} vs {len(new_toks)} tokens)"
            )
    _incidence, collapsed = build_incidence(list(new_analyses), old.sentence)
    fresh = SentenceRecord(sentence=old.sentence, analyses=tuple(collapsed))

    transferred: list[LogEntry] = []
    vanished: list[LogEntry] = []
    record = fresh
    for entry in old.tail_log():
        if entry.action != "judge":
            continue
        if entry.key in record.incidence:
            record = apply_judgment(record, entry.key, entry.value, entry.provenance)
            transferred.append(entry)
        else:
            vanished.append(entry)

    status = old.status
    session = record.session
    if status == STATUS_OK and (
        session.state != engine.STATE_CONSISTENT or len(session.candidates) > 1
    ):
        status = STATUS_UNDECIDED
    record = replace(record, status=status, failure_type=old.failure_type, comment=old.comment)
    report = MergeReport(
        transferred=tuple(transferred),
        vanished=tuple(vanished),
        status_before=old.status,
        status_after=record.status,
    )
    return record, report


# --------------------------------------------------------------------------
# POS-sequence propagation.

@dataclass(frozen=True)
class PropagationReport:
    applied: dict[str, int]
    conflicts: tuple[str, ...]


def pos_propagate(source: SentenceRecord, corpus: Corpus) -> PropagationReport:
    """Copy the source's user judgments to POS-identical sentences.

    Judgments are mapped by structural key (word forms ignored) and inserted
    with pos-propagated provenance where the mapped key exists in the
    target.  A target whose closure would conflict receives nothing and is
    listed in the report (all-or-nothing per target).
    """
    if source.status != STATUS_OK:
        raise StoreError(f"source {source.id!r} must be ok before propagating")
    source_pos = source.sentence.pos_sequence()
    user_entries = [
        entry
        for entry in sorted(source.effective_entries().values(), key=lambda e: e.seq)
        if entry.provenance == PROV_USER
    ]
    applied: dict[str, int] = {}
    conflicts: list[str] = []
    for target in list(corpus.records()):
        if target.id == source.id or target.sentence.pos_sequence() != source_pos:
            continue
        sig_map = {
            structural_signature(p.key): p.key for p in target.incidence.properties
        }
        mapped = [
            (sig_map[structural_signature(e.key)], e.value)
            for e in user_entries
            if structural_signature(e.key) in sig_map
        ]
        if not mapped:
            continue
        candidate = target
        for key, value in mapped:
            candidate = apply_judgment(candidate, key, value, PROV_POS)
        if candidate.session.state != engine.STATE_CONSISTENT:
            conflicts.append(target.id)
            continue
        corpus.update(candidate)
        applied[target.id] = len(mapped)
    return PropagationReport(applied=applied, conflicts=tuple(conflicts))


# --------------------------------------------------------------------------
# Priors, suspects, exports.

def decided_discriminants(record: SentenceRecord) -> list[tuple[str, str, str]]:
    """(key, value, provenance) for every discriminant with a decided value."""
    session = record.session
    effective = record.effective_entries()
    out = []
    for prop in record.incidence.discriminants():
        if prop.key in effective:
            entry = effective[prop.key]
            out.append((prop.key, entry.value, entry.provenance))
        elif prop.key in session.derived:
            out.append((prop.key, session.derived[prop.key], PROV_DERIVED))
    return out


def update_priors(corpus: Corpus, classes: ClassMap | None = None) -> PriorTable:
    """Accumulate good/bad counts per abstracted discriminant over ok records.

    Both user and derived judgments count; each discriminant contributes at
    most one outcome per record, so propagated judgments count once.  The
    fold is order-independent.
    """
    classes = classes or ClassMap()
    priors = PriorTable()
    for record in corpus.records():
        if record.status != STATUS_OK:
            continue
        for key, value, _prov in decided_discriminants(record):
            priors.add(prior_key(record.incidence.lookup(key), classes), value)
    return priors


DEFAULT_SUSPECT_MIN_SUPPORT = 10
DEFAULT_SUSPECT_MIN_AGREEMENT = 0.9


@dataclass(frozen=True)
class Suspect:
    record: SentenceRecord
    key: str
    user_value: str
    majority: str
    agreement: float
    support: int


def find_suspects(
    corpus: Corpus,
    priors: PriorTable,
    classes: ClassMap | None = None,
    min_support: int = DEFAULT_SUSPECT_MIN_SUPPORT,
    min_agreement: float = DEFAULT_SUSPECT_MIN_AGREEMENT,
) -> list[Suspect]:
    """Records whose user judgments disagree with a strong corpus prior.

    Sorted by descending prior agreement, so the most likely errors come
    first.
    """
    classes = classes or ClassMap()
    suspects: list[Suspect] = []
    for record in corpus.records():
        for key, entry in sorted(record.effective_entries().items()):
            if entry.provenance != PROV_USER:
                continue
            if key not in record.incidence:
                continue
            pk = prior_key(record.incidence.lookup(key), classes)
            majority, support, agreement = priors.majority(pk)
            if majority is None or support < min_support or agreement < min_agreement:
                continue
            if entry.value != majority:
                suspects.append(
                    Suspect(
                        record=record,
                        key=key,
                        user_value=entry.value,
                        majority=majority,
                        agreement=agreement,
                        support=support,
                    )
                )
    suspects.sort(key=lambda s: (-s.agreement, -s.support, s.record.id, s.key))
    return suspects


def export_training(
    corpus: Corpus, classes: ClassMap | None = None, path: str | Path | None = None
) -> str:
    """Tab-separated training lines: sentence id, abstracted key, polarity, provenance."""
    classes = classes or ClassMap()
    lines = []
    for record in corpus.records():
        if record.status != STATUS_OK:
            continue
        for key, value, provenance in decided_discriminants(record):
            abstracted = prior_key(record.incidence.lookup(key), classes)
            lines.append(f"{record.id}\t{abstracted}\t{value}\t{provenance}")
    text = "\n".join(lines) + ("\n" if lines else "")
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def export_script(corpus: Corpus) -> str:
    """Replayable judgment script: one (sentence id, key, value) line per judgment.

    Replaying the script on a freshly ingested corpus reproduces the exact
    final state when the original judgments were all plain user judgments;
    resets and auto/propagated provenances are not representable in the
    script format.
    """
    lines = []
    for record in corpus.records():
        for entry in record.log:
            if entry.action == "judge":
                lines.append(f"{record.id}\t{entry.key}\t{entry.value}")
    return "\n".join(lines) + ("\n" if lines else "")


def replay_script(corpus: Corpus, script: str) -> int:
    """Apply a judgment script; returns the number of judgments applied."""
    count = 0
    for lineno, raw in enumerate(script.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise StoreError(f"script line {lineno}: expected sentenceId<TAB>key<TAB>value")
        sentence_id, key, value = parts
        try:
            record = corpus.get(sentence_id)
        except KeyError:
            raise StoreError(f"script line {lineno}: unknown sentence {sentence_id!r}")
        try:
            corpus.update(apply_judgment(record, key, value))
        except UnknownPropertyError:
            raise StoreError(f"script line {lineno}: unknown property {key!r}")
        count += 1
    return count
