"""Shared data model: sentences, analyses, properties and the incidence structure.

An *analysis* is one candidate parse of a sentence (a tree plus a sense
assignment and a sentence type).  Everything downstream works on *properties*
extracted from analyses: small human-readable facts with a canonical string
key.  A property that holds for some but not all analyses of a sentence is a
*discriminant*; those are what an annotator judges.

All types here are immutable values; they can be shared freely across
threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

GOOD = "good"
BAD = "bad"

KIND_CONSTITUENT = "constituent"
KIND_TRIPLE = "semantic-triple"
KIND_SENSE = "word-sense"
KIND_SENTENCE_TYPE = "sentence-type"
KIND_RULE = "rule-name"
KIND_ARG_TRIPLE = "arg-triple"

# Lower rank = easier for a non-expert to judge.  Ranks 1..4 are shown by
# default; 5 and 6 only in expert mode.
FRIENDLINESS = {
    KIND_CONSTITUENT: 1,
    KIND_TRIPLE: 2,
    KIND_SENSE: 3,
    KIND_SENTENCE_TYPE: 4,
    KIND_RULE: 5,
    KIND_ARG_TRIPLE: 6,
}
MAX_DISPLAYED_FRIENDLINESS = 4

SENTENCE_TYPES = (
    "imperative",
    "wh-question",
    "yn-question",
    "declarative",
    "elliptical-NP",
    "elliptical-PP",
    "other",
)

_TYPE_DISPLAY = {t: t.replace("elliptical-", "elliptical ") for t in SENTENCE_TYPES}


class ModelError(ValueError):
    """Invalid model value (bad span, malformed tree, unknown kind...)."""


class UnknownPropertyError(KeyError):
    """A property key that is not part of the incidence being queried."""


@dataclass(frozen=True)
class Token:
    index: int
    surface: str
    pos: str

    def __post_init__(self):
        if not self.surface:
            raise ModelError("token surface must be non-empty")
        if self.index < 0:
            raise ModelError("token index must be >= 0")


@dataclass(frozen=True)
class Sentence:
    id: str
    tokens: tuple[Token, ...]

    def __post_init__(self):
        if not self.tokens:
            raise ModelError(f"sentence {self.id!r} has no tokens")
        for i, tok in enumerate(self.tokens):
            if tok.index != i:
                raise ModelError(
                    f"sentence {self.id!r}: token index {tok.index} at position {i}"
                )

    def __len__(self) -> int:
        return len(self.tokens)

    def phrase(self, start: int, end: int) -> str:
        return " ".join(t.surface for t in self.tokens[start:end])

    def pos_sequence(self) -> tuple[str, ...]:
        return tuple(t.pos for t in self.tokens)

    @property
    def text(self) -> str:
        return self.phrase(0, len(self.tokens))


@dataclass(frozen=True, order=True)
class Span:
    start: int
    end: int

    def __post_init__(self):
        if not 0 <= self.start < self.end:
            raise ModelError(f"invalid span [{self.start},{self.end})")

    @property
    def width(self) -> int:
        return self.end - self.start


@dataclass(frozen=True)
class TreeNode:
    """One node of a parse tree.

    A leaf covers a single token and has no children; its ``category`` is the
    lexical category.  Internal nodes carry the grammar rule that built them
    and the index of their head child (``head`` may be None when the tree
    source did not mark heads; extraction then falls back to a head table).
    """

    category: str
    span: Span
    children: tuple[TreeNode, ...] = ()
    rule: str | None = None
    head: int | None = None

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def iter_nodes(self):
        """Pre-order traversal."""
        yield self
        for child in self.children:
            yield from child.iter_nodes()

    def internal_nodes(self):
        return [n for n in self.iter_nodes() if not n.is_leaf]


@dataclass(frozen=True)
class SenseTag:
    """Lexical information an analysis carries for one token.

    ``root`` is the root word form ("flights" -> "flight") used when
    rendering triples; ``ambiguous`` is true when the lexicon offered more
    than one sense for the token, which is what makes the sense worth
    displaying as a property.
    """

    root: str
    label: str
    gloss: str
    ambiguous: bool = False


@dataclass(frozen=True)
class Analysis:
    id: int
    tree: TreeNode
    senses: tuple[tuple[int, SenseTag], ...]
    sentence_type: str
    multiplicity: int = 1

    def __post_init__(self):
        if self.sentence_type not in SENTENCE_TYPES:
            raise ModelError(f"unknown sentence type {self.sentence_type!r}")

    def sense_map(self) -> dict[int, SenseTag]:
        return dict(self.senses)


def validate_analysis(analysis: Analysis, sentence: Sentence) -> None:
    """Check the tree invariants: full coverage, span composition, heads.

    Raises ModelError naming the offending node on the first violation.
    """
    root = analysis.tree
    if (root.span.start, root.span.end) != (0, len(sentence)):
        raise ModelError(
            f"analysis {analysis.id}: root spans [{root.span.start},{root.span.end}), "
            f"sentence has {len(sentence)} tokens"
        )
    for node in root.iter_nodes():
        if node.is_leaf:
            if node.span.width != 1:
                raise ModelError(f"leaf {node.category} spans {node.span}")
            continue
        pos = node.span.start
        for child in node.children:
            if child.span.start != pos:
                raise ModelError(
                    f"node {node.category}{node.span}: child {child.category} "
                    f"starts at {child.span.start}, expected {pos}"
                )
            pos = child.span.end
        if pos != node.span.end:
            raise ModelError(
                f"node {node.category}{node.span}: children end at {pos}"
            )
        if node.head is not None and not 0 <= node.head < len(node.children):
            raise ModelError(
                f"node {node.category}{node.span}: head index {node.head} out of range"
            )
    for index, _tag in analysis.senses:
        if not 0 <= index < len(sentence):
            raise ModelError(f"sense tag on out-of-range token {index}")


# --------------------------------------------------------------------------
# Properties and canonical keys.
#
# The key is the identity used for judging, merging across coverage changes
# and POS propagation, so it must be a pure function of the property content
# and never mention which analysis it came from.  Word forms inside keys are
# lowercased; the display string keeps the original casing.

@dataclass(frozen=True)
class Property:
    kind: str
    key: str
    display: str
    span: Span | None = None

    @property
    def friendliness(self) -> int:
        return FRIENDLINESS[self.kind]

    @property
    def displayed(self) -> bool:
        return self.friendliness <= MAX_DISPLAYED_FRIENDLINESS

    @property
    def width(self) -> int:
        return self.span.width if self.span else 0


def constituent_property(category: str, span: Span, phrase: str) -> Property:
    return Property(
        kind=KIND_CONSTITUENT,
        key=f"c:{category}:{span.start}-{span.end}",
        display=f"{category}: {phrase}",
        span=span,
    )


def triple_property(
    head_index: int,
    head_form: str,
    relation: str,
    low: bool,
    dep_index: int,
    dep_form: str,
    argument_position: bool = False,
) -> Property:
    """A head-relation-dependent fact.

    ``low`` marks a low attachment; non-low triples are rendered with "-"
    before the relation ("show -to Boston").  Argument-position relations
    (subject, object...) use a separate kind so they can stay hidden from
    non-expert annotators.
    """
    if head_index == dep_index:
        raise ModelError("triple head and dependent must differ")
    if not relation:
        raise ModelError("triple relation must be non-empty")
    kind = KIND_ARG_TRIPLE if argument_position else KIND_TRIPLE
    prefix = "a" if argument_position else "t"
    flag = "+" if low else "-"
    rel_display = relation if low else f"-{relation}"
    lo = min(head_index, dep_index)
    hi = max(head_index, dep_index)
    return Property(
        kind=kind,
        key=f"{prefix}:{head_index}:{relation}:{flag}:{dep_index}"
        f":{head_form.lower()}:{dep_form.lower()}",
        display=f"{head_form} {rel_display} {dep_form}",
        span=Span(lo, hi + 1),
    )


def sense_property(token_index: int, root: str, label: str, gloss: str) -> Property:
    return Property(
        kind=KIND_SENSE,
        key=f"s:{token_index}:{label}",
        display=f"{root} = {gloss}",
        span=Span(token_index, token_index + 1),
    )


def sentence_type_property(sentence_type: str, sentence_length: int) -> Property:
    if sentence_type not in SENTENCE_TYPES:
        raise ModelError(f"unknown sentence type {sentence_type!r}")
    return Property(
        kind=KIND_SENTENCE_TYPE,
        key=f"st:{sentence_type}",
        display=_TYPE_DISPLAY[sentence_type],
        span=Span(0, sentence_length),
    )


def rule_property(rule_name: str) -> Property:
    return Property(kind=KIND_RULE, key=f"r:{rule_name}", display=rule_name, span=None)


def canonical_key(kind: str, **content) -> str:
    """Build the canonical key for a property given its structured content.

    Dispatches on ``kind``; rejects unknown kinds.  Equal content always maps
    to equal keys.
    """
    if kind == KIND_CONSTITUENT:
        return constituent_property(
            content["category"], content["span"], content.get("phrase", "")
        ).key
    if kind in (KIND_TRIPLE, KIND_ARG_TRIPLE):
        return triple_property(
            content["head_index"],
            content["head_form"],
            content["relation"],
            content["low"],
            content["dep_index"],
            content["dep_form"],
            argument_position=(kind == KIND_ARG_TRIPLE),
        ).key
    if kind == KIND_SENSE:
        return sense_property(
            content["token_index"],
            content.get("root", ""),
            content["label"],
            content.get("gloss", ""),
        ).key
    if kind == KIND_SENTENCE_TYPE:
        return sentence_type_property(
            content["sentence_type"], content.get("sentence_length", 1)
        ).key
    if kind == KIND_RULE:
        return rule_property(content["rule_name"]).key
    raise ModelError(f"unknown property kind {kind!r}")


def structural_signature(key: str) -> str:
    """The key with word forms stripped, for POS-sequence propagation.

    Two sentences with the same POS sequence carry structurally matching
    properties at the same token positions even though the words differ;
    triples drop their head/dependent forms, every other kind already has no
    word forms in its key.
    """
    if key.startswith(("t:", "a:")):
        parts = key.split(":")
        return ":".join(parts[:5])
    return key


# --------------------------------------------------------------------------
# Incidence: which property holds for which analysis.

@dataclass(frozen=True)
class Incidence:
    """Property-by-analysis incidence for one sentence.

    ``holds`` maps each property key to the set of analysis ids (0-based,
    after duplicate collapsing) for which the property was extracted.
    ``multiplicity[i]`` counts how many raw analyses were collapsed into
    analysis ``i``.
    """

    analysis_count: int
    properties: tuple[Property, ...]
    holds: dict[str, frozenset[int]]
    multiplicity: tuple[int, ...] = ()

    def __post_init__(self):
        if self.analysis_count < 1:
            raise ModelError("incidence needs at least one analysis")
        universe = range(self.analysis_count)
        for key, held in self.holds.items():
            if not held <= frozenset(universe):
                raise ModelError(f"holds-set of {key!r} outside 0..{self.analysis_count - 1}")
        keys = [p.key for p in self.properties]
        if len(keys) != len(set(keys)):
            raise ModelError("duplicate property keys in incidence")
        if set(keys) != set(self.holds):
            raise ModelError("properties and holds-sets out of sync")
        if not self.multiplicity:
            object.__setattr__(self, "multiplicity", (1,) * self.analysis_count)

    def lookup(self, key: str) -> Property:
        try:
            return self._by_key[key]
        except KeyError:
            raise UnknownPropertyError(key) from None

    def __contains__(self, key: str) -> bool:
        return key in self._by_key

    @cached_property
    def _by_key(self) -> dict[str, Property]:
        return {p.key: p for p in self.properties}

    @property
    def all_analyses(self) -> frozenset[int]:
        return frozenset(range(self.analysis_count))

    def discriminants(self) -> tuple[Property, ...]:
        return tuple(p for p in self.properties if self.is_discriminant(p.key))

    def is_discriminant(self, key: str) -> bool:
        if key not in self._by_key:
            raise UnknownPropertyError(key)
        return 0 < len(self.holds[key]) < self.analysis_count

    def displayed_discriminants(self) -> tuple[Property, ...]:
        """Discriminants shown to non-expert users, friendliest and widest first."""
        shown = [p for p in self.discriminants() if p.displayed]
        shown.sort(key=lambda p: (p.friendliness, -p.width, p.key))
        return tuple(shown)


def is_discriminant(incidence: Incidence, key: str) -> bool:
    return incidence.is_discriminant(key)
