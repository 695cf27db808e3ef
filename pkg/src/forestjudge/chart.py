"""A small chart parser over an ambiguous CFG with a sense lexicon.

This is deliberately plain context-free parsing: attachment, gerund
relative/adverbial and word-sense ambiguity are all we need to produce
realistically ambiguous analysis sets for fixtures and for the interactive
type-in mode.  Sense ambiguity is realized as multiple lexical entries for
the same word and category, so analyses differing only in senses share a
tree skeleton.

Grammar file format (UTF-8, '#' comments):

    start S imperative              # start category and its sentence type
    vp_pp: VP -> VP PP [head=0]     # one rule per line
    show  VB  V  show_v1  display   # word POS category sense gloss...

Sense labels follow the convention ``Root_tag`` (e.g. ``serve_flyto``); the
root word form used in triples is the label up to its last underscore.  A
"-" sense marks a word with no lexical sense (function words).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from .model import Analysis, SenseTag, Sentence, Span, Token, TreeNode


class GrammarError(ValueError):
    """Malformed grammar file or invalid rule set."""


class ParseError(ValueError):
    """Input that cannot be analysed (unknown word, too many analyses)."""


@dataclass(frozen=True)
class Rule:
    name: str
    parent: str
    children: tuple[str, ...]
    head: int

    def __post_init__(self):
        if not self.children:
            raise GrammarError(f"rule {self.name!r} has an empty right-hand side")
        if not 0 <= self.head < len(self.children):
            raise GrammarError(f"rule {self.name!r}: head index {self.head} out of range")


@dataclass(frozen=True)
class LexEntry:
    word: str
    pos: str
    category: str
    sense: str | None
    gloss: str | None

    @property
    def root(self) -> str:
        if self.sense is None:
            return self.word
        return self.sense.rsplit("_", 1)[0]


@dataclass(frozen=True)
class Grammar:
    rules: tuple[Rule, ...]
    lexicon: dict[str, tuple[LexEntry, ...]]
    starts: tuple[tuple[str, str], ...]  # (category, sentence type)
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        names = [r.name for r in self.rules]
        dupes = {n for n in names if names.count(n) > 1}
        if dupes:
            raise GrammarError(f"duplicate rule names: {', '.join(sorted(dupes))}")
        if not self.starts:
            raise GrammarError("grammar needs at least one start category")
        for word, entries in self.lexicon.items():
            if len({e.pos for e in entries}) > 1:
                raise GrammarError(f"word {word!r} has entries with conflicting POS tags")
        self._check_unary_cycles()

    def _check_unary_cycles(self) -> None:
        # a unary cycle (A -> B, B -> A) would make the number of parse
        # trees for a span infinite
        edges: dict[str, set[str]] = {}
        for r in self.rules:
            if len(r.children) == 1:
                edges.setdefault(r.parent, set()).add(r.children[0])
        seen: set[str] = set()

        def visit(cat: str, trail: tuple[str, ...]) -> None:
            if cat in trail:
                cycle = " -> ".join(trail[trail.index(cat):] + (cat,))
                raise GrammarError(f"unary rule cycle: {cycle}")
            if cat in seen:
                return
            seen.add(cat)
            for nxt in edges.get(cat, ()):
                visit(nxt, trail + (cat,))

        for cat in list(edges):
            visit(cat, ())

    def entries(self, word: str) -> tuple[LexEntry, ...]:
        return self.lexicon.get(word.lower(), ())


_RULE_RE = re.compile(
    r"^(?P<name>[\w-]+)\s*:\s*(?P<parent>\S+)\s*->\s*(?P<rhs>[^\[\]]+?)"
    r"\s*(?:\[\s*head\s*=\s*(?P<head>\d+)\s*\])?$"
)
_START_RE = re.compile(r"^start\s+(?P<cat>\S+)\s+(?P<stype>\S+)$")


def load_grammar(path: str | Path) -> Grammar:
    """Parse and validate a grammar file.

    Syntax errors carry the line number.  Categories that appear on a
    right-hand side but have neither a rule nor a lexical entry are reported
    as warnings (the grammar still loads).
    """
    rules: list[Rule] = []
    lexicon: dict[str, list[LexEntry]] = {}
    starts: list[tuple[str, str]] = []
    path = Path(path)
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _START_RE.match(line)
        if m:
            starts.append((m.group("cat"), m.group("stype")))
            continue
        if "->" in line:
            m = _RULE_RE.match(line)
            if not m:
                raise GrammarError(f"{path.name}:{lineno}: cannot parse rule line {line!r}")
            children = tuple(m.group("rhs").split())
            head = int(m.group("head") or 0)
            try:
                rules.append(Rule(m.group("name"), m.group("parent"), children, head))
            except GrammarError as exc:
                raise GrammarError(f"{path.name}:{lineno}: {exc}") from None
            continue
        parts = line.split(None, 4)
        if len(parts) < 4:
            raise GrammarError(
                f"{path.name}:{lineno}: lexicon line needs word, POS, category, sense"
            )
        word, pos, category, sense = parts[:4]
        gloss = parts[4] if len(parts) > 4 else "-"
        entry = LexEntry(
            word=word.lower(),
            pos=pos,
            category=category,
            sense=None if sense == "-" else sense,
            gloss=None if gloss == "-" else gloss,
        )
        lexicon.setdefault(entry.word, []).append(entry)

    defined = {r.parent for r in rules} | {
        e.category for entries in lexicon.values() for e in entries
    }
    used = {c for r in rules for c in r.children}
    unreachable = sorted(used - defined)
    warnings = tuple(
        f"category {cat!r} is used in a rule but has no rule or lexical entry"
        for cat in unreachable
    )
    grammar = Grammar(
        rules=tuple(rules),
        lexicon={w: tuple(es) for w, es in sorted(lexicon.items())},
        starts=tuple(starts),
        warnings=warnings,
    )
    return grammar


@dataclass
class _Alt:
    """One way to build (category, span): a rule plus chosen child cells."""

    rule: Rule
    child_cells: tuple[tuple[str, int, int], ...]


@dataclass
class _Cell:
    alts: list[_Alt] = field(default_factory=list)
    lexical: list[LexEntry] = field(default_factory=list)


DEFAULT_MAX_ANALYSES = 10_000


def _build_chart(words: list[str], grammar: Grammar) -> dict[tuple[str, int, int], _Cell]:
    n = len(words)
    chart: dict[tuple[str, int, int], _Cell] = {}

    def cell(cat: str, i: int, j: int) -> _Cell:
        return chart.setdefault((cat, i, j), _Cell())

    for i, word in enumerate(words):
        entries = grammar.entries(word)
        if not entries:
            raise ParseError(f"unknown word {word!r}")
        by_cat: dict[str, list[LexEntry]] = {}
        for e in entries:
            by_cat.setdefault(e.category, []).append(e)
        for cat, es in by_cat.items():
            cell(cat, i, i + 1).lexical = es

    def matches(rhs: tuple[str, ...], i: int, j: int) -> list[tuple[tuple[str, int, int], ...]]:
        """All ways to split [i,j) into consecutive cells matching rhs."""
        if len(rhs) == 1:
            key = (rhs[0], i, j)
            found = chart.get(key)
            if found and (found.alts or found.lexical):
                return [(key,)]
            return []
        out = []
        for k in range(i + 1, j):
            key = (rhs[0], i, k)
            first = chart.get(key)
            if not first or not (first.alts or first.lexical):
                continue
            for rest in matches(rhs[1:], k, j):
                out.append((key,) + rest)
        return out

    for width in range(1, n + 1):
        for i in range(0, n - width + 1):
            j = i + width
            # unary chains can feed each other; iterate until no new alt appears
            changed = True
            while changed:
                changed = False
                for rule in grammar.rules:
                    for combo in matches(rule.children, i, j):
                        alt = _Alt(rule=rule, child_cells=combo)
                        existing = chart.get((rule.parent, i, j))
                        if existing and any(
                            a.rule is rule and a.child_cells == combo for a in existing.alts
                        ):
                            continue
                        cell(rule.parent, i, j).alts.append(alt)
                        changed = True
    return chart


def _count_trees(
    chart: dict[tuple[str, int, int], _Cell], key: tuple[str, int, int], memo: dict
) -> int:
    if key in memo:
        return memo[key]
    found = chart.get(key)
    if found is None:
        memo[key] = 0
        return 0
    memo[key] = 0  # guard against unary cycles
    total = len(found.lexical)
    for alt in found.alts:
        product = 1
        for child in alt.child_cells:
            product *= _count_trees(chart, child, memo)
        total += product
    memo[key] = total
    return total


def _enumerate(
    chart: dict[tuple[str, int, int], _Cell], key: tuple[str, int, int]
) -> list[tuple[TreeNode, tuple[tuple[int, LexEntry], ...]]]:
    """All (tree, lexical choices) for a cell, in canonical order.

    Canonical order: lexical senses in lexicon order, then rule alternatives
    in declaration order with split points ascending; child combinations
    enumerate with the rightmost child varying fastest, which makes sense
    choices vary fastest overall.
    """
    found = chart.get(key)
    if found is None:
        return []
    cat, i, j = key
    out: list[tuple[TreeNode, tuple[tuple[int, LexEntry], ...]]] = []
    for entry in found.lexical:
        out.append((TreeNode(category=cat, span=Span(i, j)), ((i, entry),)))
    for alt in found.alts:
        child_lists = [_enumerate(chart, child) for child in alt.child_cells]
        stack: list[tuple[list[TreeNode], tuple[tuple[int, LexEntry], ...]]] = [([], ())]
        for options in child_lists:
            stack = [
                (trees + [t], choices + c) for trees, choices in stack for t, c in options
            ]
        for trees, choices in stack:
            node = TreeNode(
                category=cat,
                span=Span(i, j),
                children=tuple(trees),
                rule=alt.rule.name,
                head=alt.rule.head,
            )
            out.append((node, choices))
    return out


def parse_all(
    tokens: list[str] | Sentence,
    grammar: Grammar,
    max_analyses: int = DEFAULT_MAX_ANALYSES,
) -> list[Analysis]:
    """Every complete parse rooted in a start category, crossed with senses.

    The result order is deterministic (see _enumerate); duplicates cannot
    occur because every analysis corresponds to a distinct derivation.
    Raises ParseError when a word is missing from the lexicon or when the
    analysis count exceeds ``max_analyses``.
    """
    if max_analyses < 1:
        raise ParseError("max_analyses must be >= 1")
    if isinstance(tokens, Sentence):
        words = [t.surface.lower() for t in tokens.tokens]
    else:
        words = [w.lower() for w in tokens]
    if not words:
        raise ParseError("cannot parse an empty sentence")
    chart = _build_chart(words, grammar)
    n = len(words)

    total = 0
    for cat, _stype in grammar.starts:
        total += _count_trees(chart, (cat, 0, n), {})
        if total > max_analyses:
            raise ParseError(
                f"analysis count {total} exceeds the limit of {max_analyses}"
            )

    analyses: list[Analysis] = []
    for cat, stype in grammar.starts:
        for tree, choices in _enumerate(chart, (cat, 0, n)):
            senses = tuple(
                (
                    idx,
                    SenseTag(
                        root=entry.root,
                        label=entry.sense,
                        gloss=entry.gloss or entry.root,
                        ambiguous=sum(
                            1
                            for e in grammar.entries(words[idx])
                            if e.category == entry.category
                        )
                        > 1,
                    ),
                )
                for idx, entry in sorted(choices)
                if entry.sense is not None
            )
            analyses.append(
                Analysis(
                    id=len(analyses),
                    tree=tree,
                    senses=senses,
                    sentence_type=stype,
                )
            )
    return analyses


def tag_sentence(sentence_id: str, text: str, grammar: Grammar) -> Sentence:
    """Tokenize on whitespace and assign POS tags from the lexicon."""
    surfaces = text.split()
    if not surfaces:
        raise ParseError("empty sentence text")
    tokens = []
    for i, surface in enumerate(surfaces):
        entries = grammar.entries(surface)
        if not entries:
            raise ParseError(f"unknown word {surface!r}")
        tokens.append(Token(index=i, surface=surface, pos=entries[0].pos))
    return Sentence(id=sentence_id, tokens=tuple(tokens))
