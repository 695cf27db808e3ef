"""Turning analyses into property sets and property sets into incidences.

Five kinds of property are extracted from a parse tree:

  * one constituent per internal node (category plus the covered phrase),
  * one semantic triple per preposition or conjunction attachment,
  * one argument-position triple per remaining modifier/argument attachment
    (these are kept but hidden from non-expert users),
  * one word sense per sense-ambiguous token,
  * the sentence type, and one property per distinct grammar rule used.

Triples are rendered with root word forms rather than sense symbols, and a
"-" before the relation marks a non-low attachment ("show -to Boston" vs
"flight to Boston").  An attachment counts as low when the modified head is
the rightmost available head adjacent to the modifier.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .model import (
    Analysis,
    Incidence,
    Property,
    Sentence,
    TreeNode,
    constituent_property,
    rule_property,
    sense_property,
    sentence_type_property,
    triple_property,
    validate_analysis,
    KIND_ARG_TRIPLE,
    KIND_TRIPLE,
)

# Categories treated as verbal/sentential (default head = leftmost child)
# and nominal (default head = rightmost nominal child).
VERBAL_CATEGORIES = frozenset({"S", "SQ", "SBAR", "VP", "ADVP", "PP"})
NOMINAL_CATEGORIES = frozenset({"NP", "NOM", "PNP", "N", "PN", "PRON"})

PREPOSITION_CATEGORIES = frozenset({"P", "PREP", "IN"})
CONJUNCTION_CATEGORIES = frozenset({"CONJ", "CC"})


class ExtractionError(ValueError):
    """Raised when a tree cannot be interpreted (usually a missing head)."""


@dataclass(frozen=True)
class HeadTable:
    """Fallback head-child assignments for trees that carry no head marks.

    Explicit entries map (category, rule name) to a child index.  Without an
    entry, verbal and sentential categories default to the leftmost child and
    nominal categories to the rightmost nominal (pre-modifier) child.
    """

    entries: dict[tuple[str, str], int] = field(default_factory=dict)

    def head_child(self, node: TreeNode) -> int:
        if node.head is not None:
            return node.head
        entry = self.entries.get((node.category, node.rule or ""))
        if entry is not None:
            return entry
        if node.category in VERBAL_CATEGORIES:
            return 0
        if node.category in NOMINAL_CATEGORIES:
            for i in range(len(node.children) - 1, -1, -1):
                if node.children[i].category in NOMINAL_CATEGORIES:
                    return i
            return len(node.children) - 1
        raise ExtractionError(
            f"no head entry for rule {node.rule!r} (category {node.category})"
        )


@dataclass(frozen=True)
class ClassMap:
    """One-level abstraction from word forms/senses to semantic classes.

    Unknown entries map to themselves, so the map is total.  The file format
    is two tab-separated columns (sense, class), one per line, '#' comments.
    """

    classes: dict[str, str] = field(default_factory=dict)

    def resolve(self, form: str) -> str:
        return self.classes.get(form.lower(), form)

    @classmethod
    def load(cls, path: str | Path) -> "ClassMap":
        classes: dict[str, str] = {}
        for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ExtractionError(f"{path}:{lineno}: expected two tab-separated columns")
            sense, cls_name = (p.strip() for p in parts)
            classes[sense.lower()] = cls_name
        return cls(classes)


@dataclass(frozen=True)
class Triple:
    head_index: int
    head_form: str
    relation: str
    low: bool
    dep_index: int
    dep_form: str
    argument_position: bool

    def to_property(self) -> Property:
        return triple_property(
            self.head_index,
            self.head_form,
            self.relation,
            self.low,
            self.dep_index,
            self.dep_form,
            argument_position=self.argument_position,
        )


def _root_form(token_index: int, sentence: Sentence, senses: dict) -> str:
    tag = senses.get(token_index)
    if tag is not None:
        return tag.root
    return sentence.tokens[token_index].surface.lower()


class _TreeReader:
    """Per-analysis helper: head percolation and attachment interpretation."""

    def __init__(self, analysis: Analysis, sentence: Sentence, heads: HeadTable):
        self.analysis = analysis
        self.sentence = sentence
        self.heads = heads
        self.senses = analysis.sense_map()
        self._lexical_head: dict[int, int] = {}

    def lexical_head(self, node: TreeNode) -> int:
        """Token index of the node's lexical head, by head-child percolation."""
        cached = self._lexical_head.get(id(node))
        if cached is not None:
            return cached
        if node.is_leaf:
            head = node.span.start
        else:
            head = self.lexical_head(node.children[self.heads.head_child(node)])
        self._lexical_head[id(node)] = head
        return head

    def form(self, token_index: int) -> str:
        return _root_form(token_index, self.sentence, self.senses)

    def eligible_heads_ending_at(self, boundary: int) -> set[int]:
        """Lexical heads of all constituents whose span ends at ``boundary``."""
        return {
            self.lexical_head(n)
            for n in self.analysis.tree.iter_nodes()
            if n.span.end == boundary
        }

    def eligible_heads_starting_at(self, boundary: int) -> set[int]:
        return {
            self.lexical_head(n)
            for n in self.analysis.tree.iter_nodes()
            if n.span.start == boundary
        }

    def is_low(self, head_token: int, modifier: TreeNode) -> bool:
        """Low attachment: the head is the nearest available head.

        For a post-modifier that means the rightmost lexical head among
        constituents touching its left edge; for a pre-modifier, the leftmost
        among those touching its right edge.
        """
        if head_token < modifier.span.start:
            eligible = self.eligible_heads_ending_at(modifier.span.start)
            return bool(eligible) and head_token == max(eligible)
        eligible = self.eligible_heads_starting_at(modifier.span.end)
        return bool(eligible) and head_token == min(eligible)

    def attachment_triples(self, node: TreeNode) -> list[Triple]:
        """Triples for every non-head child of ``node``.

        A PP child contributes a preposition-mediated semantic triple whose
        dependent is the head of the PP's complement; other children
        contribute argument-position triples labelled by their syntactic
        role.  PP-internal structure is folded into the attachment triple, so
        a PP parent yields nothing itself.
        """
        if node.category == "PP":
            return []
        head_child_idx = self.heads.head_child(node)
        head_token = self.lexical_head(node)
        triples = []
        post_head_nps = 0
        for i, child in enumerate(node.children):
            if i == head_child_idx:
                continue
            if child.category == "PP":
                prep_token = self.lexical_head(child)
                pp_head = self.heads.head_child(child)
                complement = next(
                    (c for j, c in enumerate(child.children) if j != pp_head), None
                )
                if complement is None:
                    continue
                dep_token = self.lexical_head(complement)
                triples.append(
                    Triple(
                        head_index=head_token,
                        head_form=self.form(head_token),
                        relation=self.form(prep_token),
                        low=self.is_low(head_token, child),
                        dep_index=dep_token,
                        dep_form=self.form(dep_token),
                        argument_position=False,
                    )
                )
                continue
            dep_token = self.lexical_head(child)
            if child.category in CONJUNCTION_CATEGORIES:
                continue
            relation = self._argument_relation(node, child, i, head_child_idx, post_head_nps)
            if child.category in NOMINAL_CATEGORIES and i > head_child_idx:
                post_head_nps += 1
            if relation is None:
                continue
            triples.append(
                Triple(
                    head_index=head_token,
                    head_form=self.form(head_token),
                    relation=relation,
                    low=self.is_low(head_token, child),
                    dep_index=dep_token,
                    dep_form=self.form(dep_token),
                    argument_position=True,
                )
            )
        return triples

    def _argument_relation(
        self,
        node: TreeNode,
        child: TreeNode,
        child_idx: int,
        head_child_idx: int,
        post_head_nps: int,
    ) -> str | None:
        if child.category == "DET":
            return "det"
        if child.category in NOMINAL_CATEGORIES:
            if node.category in NOMINAL_CATEGORIES:
                return "nmod"
            if child_idx < head_child_idx:
                return "subj"
            return "obj" if post_head_nps == 0 else f"obj{post_head_nps + 1}"
        if child.category == "ADVP":
            return "vmod"
        if child.category == "VP" and node.category in NOMINAL_CATEGORIES:
            # gerund or reduced relative modifying a noun
            return "nmod"
        if child.category == "VP":
            return "vmod"
        return "mod"


def extract_properties(
    analysis: Analysis, sentence: Sentence, heads: HeadTable | None = None
) -> list[Property]:
    """All properties of one analysis, in deterministic order.

    Order: constituents in pre-order, semantic triples, word senses by token,
    sentence type, rule names sorted, argument-position triples.  The same
    input always yields the identical list.
    """
    heads = heads or HeadTable()
    validate_analysis(analysis, sentence)
    reader = _TreeReader(analysis, sentence, heads)

    constituents: list[Property] = []
    semantic: list[Property] = []
    argument: list[Property] = []
    rules: set[str] = set()

    for node in analysis.tree.iter_nodes():
        if node.is_leaf:
            continue
        constituents.append(
            constituent_property(
                node.category, node.span, sentence.phrase(node.span.start, node.span.end)
            )
        )
        if node.rule:
            rules.add(node.rule)
        for triple in reader.attachment_triples(node):
            prop = triple.to_property()
            if triple.argument_position:
                argument.append(prop)
            else:
                semantic.append(prop)

    senses = [
        sense_property(index, tag.root, tag.label, tag.gloss)
        for index, tag in sorted(analysis.senses)
        if tag.ambiguous
    ]

    ordered: list[Property] = []
    ordered.extend(constituents)
    ordered.extend(_dedupe(semantic))
    ordered.extend(senses)
    ordered.append(sentence_type_property(analysis.sentence_type, len(sentence)))
    ordered.extend(rule_property(name) for name in sorted(rules))
    ordered.extend(_dedupe(argument))
    return ordered


def _dedupe(props: list[Property]) -> list[Property]:
    seen: set[str] = set()
    out = []
    for p in props:
        if p.key not in seen:
            seen.add(p.key)
            out.append(p)
    return out


def collapse_duplicates(
    analyses: list[Analysis], property_sets: list[frozenset[str]]
) -> tuple[list[Analysis], list[frozenset[str]]]:
    """Merge analyses that share their full property set.

    The first occurrence is kept as representative, re-numbered, with the
    duplicate count recorded as its multiplicity.
    """
    kept: list[Analysis] = []
    kept_sets: list[frozenset[str]] = []
    index_of: dict[frozenset[str], int] = {}
    for analysis, props in zip(analyses, property_sets):
        slot = index_of.get(props)
        if slot is None:
            index_of[props] = len(kept)
            kept.append(analysis)
            kept_sets.append(props)
        else:
            old = kept[slot]
            kept[slot] = Analysis(
                id=old.id,
                tree=old.tree,
                senses=old.senses,
                sentence_type=old.sentence_type,
                multiplicity=old.multiplicity + analysis.multiplicity,
            )
    renumbered = [
        Analysis(
            id=i,
            tree=a.tree,
            senses=a.senses,
            sentence_type=a.sentence_type,
            multiplicity=a.multiplicity,
        )
        for i, a in enumerate(kept)
    ]
    return renumbered, kept_sets


def build_incidence(
    analyses: list[Analysis],
    sentence: Sentence,
    heads: HeadTable | None = None,
) -> tuple[Incidence, list[Analysis]]:
    """Union the property sets of all analyses into an Incidence.

    Analyses with identical property sets are collapsed first (keeping
    multiplicity); returns the incidence together with the collapsed,
    re-numbered analysis list.
    """
    if not analyses:
        raise ExtractionError("need at least one analysis")
    heads = heads or HeadTable()
    extracted = [extract_properties(a, sentence, heads) for a in analyses]
    sets = [frozenset(p.key for p in props) for props in extracted]
    collapsed, collapsed_sets = collapse_duplicates(list(analyses), sets)

    by_key: dict[str, Property] = {}
    order: list[str] = []
    for props in extracted:
        for p in props:
            if p.key not in by_key:
                by_key[p.key] = p
                order.append(p.key)
    holds = {
        key: frozenset(i for i, s in enumerate(collapsed_sets) if key in s)
        for key in order
    }
    incidence = Incidence(
        analysis_count=len(collapsed),
        properties=tuple(by_key[k] for k in order),
        holds=holds,
        multiplicity=tuple(a.multiplicity for a in collapsed),
    )
    return incidence, collapsed


def abstract_property(prop: Property, classes: ClassMap) -> Property:
    """Replace a triple's word forms by their semantic classes.

    Non-triple kinds pass through unchanged; the operation is idempotent and
    never changes a property's kind or span.
    """
    if prop.kind not in (KIND_TRIPLE, KIND_ARG_TRIPLE):
        return prop
    prefix, head_idx, relation, flag, dep_idx, head_form, dep_form = prop.key.split(":")
    return triple_property(
        int(head_idx),
        classes.resolve(head_form),
        relation,
        flag == "+",
        int(dep_idx),
        classes.resolve(dep_form),
        argument_position=(prefix == "a"),
    )


def prior_key(prop: Property, classes: ClassMap) -> str:
    """Position-free identity used to accumulate judgments across sentences.

    Token indices are sentence-specific, so they are stripped; triples keep
    relation, attachment level and the semantic classes of both ends,
    constituents keep category and width, senses keep their label.
    """
    abstracted = abstract_property(prop, classes)
    kind = abstracted.kind
    parts = abstracted.key.split(":")
    if kind in (KIND_TRIPLE, KIND_ARG_TRIPLE):
        prefix, _h, relation, flag, _d, head_form, dep_form = parts
        return f"{prefix}:{relation}:{flag}:{head_form}:{dep_form}"
    if kind == "constituent":
        _c, category, span = parts
        start, end = span.split("-")
        return f"c:{category}:{int(end) - int(start)}"
    if kind == "word-sense":
        return f"s:{parts[2]}"
    return abstracted.key
