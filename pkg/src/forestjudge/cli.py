"""Command-line interface: ingestion, serving, batch replay, reporting.

The corpus directory defaults to the FORESTJUDGE_DB environment variable so
interactive sessions do not need to repeat --db.
"""

from __future__ import annotations

import sys
from collections import Counter
from pathlib import Path

import click

from . import BUNDLED_CLASSES, BUNDLED_GRAMMAR, data_path
from . import store
from .chart import GrammarError, ParseError, load_grammar, parse_all, tag_sentence
from .extraction import ClassMap, build_incidence
from .model import UnknownPropertyError
from .store import Corpus, CorpusFile, SentenceRecord, StoreError

DB_OPTION = click.option(
    "--db",
    "db_dir",
    envvar="FORESTJUDGE_DB",
    required=True,
    type=click.Path(file_okay=False),
    help="Corpus directory (or set FORESTJUDGE_DB).",
)


def _fail(message: str) -> None:
    raise click.ClickException(message)


def _load_corpus(db_dir: str) -> Corpus:
    try:
        return Corpus.load(db_dir)
    except (StoreError, OSError) as exc:
        _fail(str(exc))


def _load_grammar(path: str | None):
    try:
        return load_grammar(path if path else data_path(BUNDLED_GRAMMAR))
    except (GrammarError, OSError) as exc:
        _fail(str(exc))


def _load_classes(path: str | None) -> ClassMap:
    try:
        return ClassMap.load(path if path else data_path(BUNDLED_CLASSES))
    except (ValueError, OSError) as exc:
        _fail(str(exc))


@click.group()
def main():
    """Judge ambiguous parse forests by deciding a few discriminants."""


@main.command()
@click.option("--grammar", "grammar_path", type=click.Path(exists=True, dir_okay=False),
              help="Grammar file (defaults to the bundled demo grammar).")
@click.option("--text", "text_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Sentence file, one sentence per line.")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False),
              help="Corpus directory to create.")
@click.option("--file-size", default=store.MAX_RECORDS_PER_FILE, show_default=True,
              help="Sentences per corpus file.")
def ingest(grammar_path, text_path, out_dir, file_size):
    """Parse sentences and build corpus files."""
    grammar = _load_grammar(grammar_path)
    for warning in grammar.warnings:
        click.echo(f"warning: {warning}", err=True)
    if not 1 <= file_size <= store.MAX_RECORDS_PER_FILE:
        _fail(f"--file-size must be within 1..{store.MAX_RECORDS_PER_FILE}")
    lines = [
        line.strip()
        for line in Path(text_path).read_text(encoding="utf-8").splitlines()
        if line.strip() and not line.startswith("#")
    ]
    if not lines:
        _fail(f"no sentences in {text_path}")
    records = []
    total_analyses = 0
    for n, text in enumerate(lines, 1):
        sentence_id = f"s{n:04d}"
        try:
            sentence = tag_sentence(sentence_id, text, grammar)
            analyses = parse_all(sentence, grammar)
        except ParseError as exc:
            _fail(f"sentence {n} ({text!r}): {exc}")
        _incidence, collapsed = build_incidence(analyses, sentence)
        records.append(SentenceRecord(sentence=sentence, analyses=tuple(collapsed)))
        total_analyses += len(analyses)
    corpus = Corpus(out_dir)
    for chunk_no, start in enumerate(range(0, len(records), file_size), 1):
        corpus.add_file(
            CorpusFile(
                file_id=f"f{chunk_no:04d}",
                records=tuple(records[start:start + file_size]),
            )
        )
    click.echo(
        f"ingested {len(records)} sentences ({total_analyses} analyses) "
        f"into {len(corpus.files)} file(s) under {out_dir}"
    )


@main.command()
@DB_OPTION
@click.option("--port", default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--grammar", "grammar_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--classes", "classes_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--auto", is_flag=True, help="Pre-judge discriminants from corpus priors.")
def serve(db_dir, port, host, grammar_path, classes_path, auto):
    """Run the HTTP annotation service over a corpus directory."""
    import uvicorn

    from .service import create_app

    corpus = _load_corpus(db_dir)
    app = create_app(
        corpus,
        grammar=_load_grammar(grammar_path),
        classes=_load_classes(classes_path),
        auto=auto,
    )
    uvicorn.run(app, host=host, port=port)


@main.command()
@DB_OPTION
@click.option("--script", "script_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Tab-separated lines: sentenceId, property key, good|bad.")
def replay(db_dir, script_path):
    """Apply a judgment script to the corpus."""
    corpus = _load_corpus(db_dir)
    try:
        count = store.replay_script(
            corpus, Path(script_path).read_text(encoding="utf-8")
        )
    except (StoreError, UnknownPropertyError) as exc:
        _fail(str(exc))
    click.echo(f"applied {count} judgments")


@main.command()
@DB_OPTION
@click.option("--classes", "classes_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--min-support", default=store.DEFAULT_SUSPECT_MIN_SUPPORT, show_default=True)
@click.option("--min-agreement", default=store.DEFAULT_SUSPECT_MIN_AGREEMENT, show_default=True)
@click.option("--priors-out", type=click.Path(dir_okay=False),
              help="Also write the prior table (tab-separated key, good, bad).")
def check(db_dir, classes_path, min_support, min_agreement, priors_out):
    """Report sentences whose judgments disagree with strong corpus priors."""
    corpus = _load_corpus(db_dir)
    classes = _load_classes(classes_path)
    priors = store.update_priors(corpus, classes)
    if priors_out:
        priors.save(priors_out)
    suspects = store.find_suspects(
        corpus, priors, classes, min_support=min_support, min_agreement=min_agreement
    )
    if not suspects:
        click.echo("no suspects")
        return
    for s in suspects:
        click.echo(
            f"{s.record.id}\t{s.key}\tuser={s.user_value}\tcorpus={s.majority} "
            f"({s.support} seen, {s.agreement:.0%} agreement)"
        )


@main.command()
@DB_OPTION
@click.option("--grammar", "grammar_path", type=click.Path(exists=True, dir_okay=False))
def merge(db_dir, grammar_path):
    """Re-parse every sentence with the grammar and merge old judgments."""
    corpus = _load_corpus(db_dir)
    grammar = _load_grammar(grammar_path)
    transferred = vanished = 0
    for record in list(corpus.records()):
        try:
            analyses = parse_all(record.sentence, grammar)
        except ParseError as exc:
            _fail(f"{record.id}: {exc}")
        merged, report = store.merge(record, analyses)
        corpus.update(merged)
        transferred += len(report.transferred)
        vanished += len(report.vanished)
    click.echo(f"merged {sum(1 for _ in corpus.records())} sentences: "
               f"{transferred} judgments transferred, {vanished} archived")


@main.command()
@DB_OPTION
@click.option("--classes", "classes_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def export(db_dir, classes_path, out_path):
    """Write training data: sentenceId, abstracted key, polarity, provenance."""
    corpus = _load_corpus(db_dir)
    try:
        store.export_training(corpus, _load_classes(classes_path), out_path)
    except OSError as exc:
        _fail(str(exc))
    click.echo(f"wrote {out_path}")


@main.command()
@DB_OPTION
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def script(db_dir, out_path):
    """Write a replayable judgment script for the whole corpus."""
    corpus = _load_corpus(db_dir)
    try:
        Path(out_path).write_text(store.export_script(corpus), encoding="utf-8")
    except OSError as exc:
        _fail(str(exc))
    click.echo(f"wrote {out_path}")


@main.command()
@DB_OPTION
@click.option("--type", "failure_type", required=True)
def failures(db_dir, failure_type):
    """List sentences marked not-ok with the given failure type."""
    corpus = _load_corpus(db_dir)
    for record in store.list_failures(corpus, failure_type):
        comment = f"\t# {record.comment}" if record.comment else ""
        click.echo(f"{record.id}\t{record.sentence.text}{comment}")


@main.command()
@DB_OPTION
def stats(db_dir):
    """Sentence counts by status and a judgments-per-sentence histogram."""
    corpus = _load_corpus(db_dir)
    by_status = Counter()
    histogram = Counter()
    for record in corpus.records():
        by_status[record.status] += 1
        histogram[record.user_judgment_count()] += 1
    for status in (store.STATUS_UNDECIDED, store.STATUS_OK, store.STATUS_NOT_OK):
        click.echo(f"{status}\t{by_status.get(status, 0)}")
    click.echo("judgments per sentence:")
    for count in sorted(histogram):
        click.echo(f"  {count}\t{histogram[count]}")


if __name__ == "__main__":
    sys.exit(main())
