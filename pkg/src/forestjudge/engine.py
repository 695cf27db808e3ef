"""The judging session: assertions, closure, conflict, auto-resolution.

Judgments propagate under the assumption that exactly one analysis of the
sentence is good:

  R1  an analysis with a bad property is bad;
  R2  if a property is good, only analyses holding it can be good;
  R3  a property true only of bad analyses is bad;
  R4  a property true of all surviving analyses is good.

The closure of these rules has a closed form: R1/R2 shrink the candidate set
C to the analyses compatible with every assertion, and then R3/R4 label each
unasserted property bad when it misses all of C and good when it covers all
of C.  No labelled property can prune further, because its pattern over C is
already uniform, so one pass is the fixpoint.  The closure is recomputed
from scratch from the latest-wins assertion maps on every change, which
makes supersession and order independence trivially correct; sentences have
at most a few hundred properties so the cost is negligible.

An empty candidate set is a *conflict* (no analysis is consistent with the
user's judgments), reported as a state rather than an error: it is how
coverage failures usually become visible.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping

from .extraction import ClassMap, prior_key
from .model import BAD, GOOD, Incidence, ModelError, Property

STATE_CONSISTENT = "consistent"
STATE_CONFLICT = "conflict"

PROV_USER = "user"
PROV_AUTO = "auto"
PROV_POS = "pos-propagated"
PROV_DERIVED = "derived"

DEFAULT_AUTO_MIN_SUPPORT = 10
DEFAULT_AUTO_MIN_AGREEMENT = 0.99


@dataclass(frozen=True)
class Session:
    """Immutable snapshot of the judging state for one sentence.

    ``user`` and ``auto`` are latest-wins assertion maps (property key to
    good/bad); a user assertion always outranks an auto assertion on the
    same key.  ``derived`` holds the values forced by the closure for all
    other properties.  ``candidates`` is the paper's "N good QLFs" set.
    """

    incidence: Incidence
    user: dict[str, str] = field(default_factory=dict)
    auto: dict[str, str] = field(default_factory=dict)
    derived: dict[str, str] = field(default_factory=dict)
    candidates: frozenset[int] = frozenset()
    state: str = STATE_CONSISTENT
    auto_conflict: bool = False

    def effective_assertions(self) -> dict[str, str]:
        merged = dict(self.auto)
        merged.update(self.user)
        return merged

    def value_of(self, key: str) -> str | None:
        """Current value of a property: asserted, derived, or None (undecided)."""
        self.incidence.lookup(key)
        effective = self.effective_assertions()
        if key in effective:
            return effective[key]
        return self.derived.get(key)

    def provenance_of(self, key: str) -> str | None:
        if key in self.user:
            return PROV_USER
        if key in self.auto:
            return PROV_AUTO
        if key in self.derived:
            return PROV_DERIVED
        return None

    def undecided_discriminants(self) -> tuple[Property, ...]:
        effective = self.effective_assertions()
        return tuple(
            p
            for p in self.incidence.discriminants()
            if p.key not in effective and p.key not in self.derived
        )


@dataclass(frozen=True)
class SessionStatus:
    possibly_good: int
    undecided_discriminants: int
    state: str


def propagate(
    assertions: Mapping[str, str], incidence: Incidence
) -> tuple[frozenset[int], dict[str, str], str]:
    """Closure of rules R1-R4 over an effective assertion map.

    Returns (candidates, derived values, state).  In conflict the derived
    map is empty; otherwise every property not in ``assertions`` gets good
    when all candidates hold it, bad when none does, and stays undecided
    when the candidates disagree.
    """
    candidates = set(incidence.all_analyses)
    for key, value in assertions.items():
        held = incidence.holds[key]
        if value == GOOD:
            candidates &= held
        elif value == BAD:
            candidates -= held
        else:
            raise ModelError(f"judgment value must be good or bad, got {value!r}")
    candidates = frozenset(candidates)
    if not candidates:
        return candidates, {}, STATE_CONFLICT
    derived: dict[str, str] = {}
    for prop in incidence.properties:
        if prop.key in assertions:
            continue
        overlap = candidates & incidence.holds[prop.key]
        if overlap == candidates:
            derived[prop.key] = GOOD
        elif not overlap:
            derived[prop.key] = BAD
    return candidates, derived, STATE_CONSISTENT


def _rebuild(
    incidence: Incidence,
    user: dict[str, str],
    auto: dict[str, str],
    auto_conflict: bool = False,
) -> Session:
    effective = dict(auto)
    effective.update(user)
    candidates, derived, state = propagate(effective, incidence)
    return Session(
        incidence=incidence,
        user=dict(user),
        auto=dict(auto),
        derived=derived,
        candidates=candidates,
        state=state,
        auto_conflict=auto_conflict,
    )


def new_session(incidence: Incidence) -> Session:
    if incidence.analysis_count < 1:
        raise ModelError("cannot open a session over zero analyses")
    return _rebuild(incidence, {}, {})


def judge(session: Session, key: str, value: str) -> Session:
    """Record a user judgment and recompute the closure.

    Unknown keys are rejected and leave the session unchanged.  Judging the
    same key again supersedes the earlier judgment.  Judging a
    non-discriminant is permitted; judging a universal property bad yields a
    conflict by definition.
    """
    session.incidence.lookup(key)
    if value not in (GOOD, BAD):
        raise ModelError(f"judgment value must be good or bad, got {value!r}")
    user = dict(session.user)
    user[key] = value
    return _rebuild(session.incidence, user, session.auto)


def reset(session: Session) -> Session:
    """Undo all user judgments; auto assertions, if any, are re-applied."""
    return _rebuild(session.incidence, {}, session.auto)


def status(session: Session) -> SessionStatus:
    possibly_good = len(session.candidates) if session.state == STATE_CONSISTENT else 0
    return SessionStatus(
        possibly_good=possibly_good,
        undecided_discriminants=len(session.undecided_discriminants()),
        state=session.state,
    )


@dataclass
class PriorTable:
    """Good/bad counts per position-free abstracted property key."""

    counts: dict[str, tuple[int, int]] = field(default_factory=dict)

    def add(self, key: str, value: str) -> None:
        good, bad = self.counts.get(key, (0, 0))
        if value == GOOD:
            good += 1
        elif value == BAD:
            bad += 1
        else:
            raise ModelError(f"prior value must be good or bad, got {value!r}")
        self.counts[key] = (good, bad)

    def get(self, key: str) -> tuple[int, int]:
        return self.counts.get(key, (0, 0))

    def majority(self, key: str) -> tuple[str | None, int, float]:
        """(majority polarity, support, agreement share) for one key."""
        good, bad = self.get(key)
        total = good + bad
        if total == 0:
            return None, 0, 0.0
        if good == bad:
            return None, total, 0.5
        polarity = GOOD if good > bad else BAD
        return polarity, total, max(good, bad) / total

    def save(self, path: str | Path) -> None:
        lines = [f"{k}\t{g}\t{b}" for k, (g, b) in sorted(self.counts.items())]
        Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "PriorTable":
        counts: dict[str, tuple[int, int]] = {}
        for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
            if not raw.strip():
                continue
            try:
                key, good, bad = raw.split("\t")
                counts[key] = (int(good), int(bad))
            except ValueError as exc:
                raise ModelError(f"{path}:{lineno}: bad prior line") from exc
        return cls(counts)


def auto_resolve(
    session: Session,
    priors: PriorTable,
    classes: ClassMap,
    min_support: int = DEFAULT_AUTO_MIN_SUPPORT,
    min_agreement: float = DEFAULT_AUTO_MIN_AGREEMENT,
) -> Session:
    """Pre-judge discriminants whose corpus-wide polarity is near-unanimous.

    Inserts an auto assertion for every discriminant whose abstracted prior
    reaches the support and agreement thresholds.  A user assertion on the
    same key always wins.  If the added assertions make the closure
    conflict, all of them are dropped and the unassisted session is returned
    flagged ``auto_conflict``.
    """
    if min_support < 1:
        raise ModelError("min_support must be >= 1")
    if not 0.5 < min_agreement <= 1.0:
        raise ModelError("min_agreement must be in (0.5, 1.0]")
    auto = dict(session.auto)
    for prop in session.incidence.discriminants():
        polarity, support, agreement = priors.majority(prior_key(prop, classes))
        if polarity is None or support < min_support or agreement < min_agreement:
            continue
        auto[prop.key] = polarity
    resolved = _rebuild(session.incidence, session.user, auto)
    if resolved.state == STATE_CONFLICT and session.state != STATE_CONFLICT:
        return replace(_rebuild(session.incidence, session.user, {}), auto_conflict=True)
    return resolved


def suggest_next(session: Session) -> str | None:
    """Pick the undecided displayed discriminant with the best worst case.

    The worst case of judging a property is the larger of the two candidate
    sets it splits the survivors into; minimizing it guarantees progress no
    matter which way the user decides.  Ties break toward friendlier kinds,
    then key order.  Returns None when everything is decided.
    """
    if session.state != STATE_CONSISTENT:
        raise ModelError("cannot suggest on a conflicted session")
    effective = session.effective_assertions()
    best: tuple[int, int, str] | None = None
    for prop in session.incidence.displayed_discriminants():
        if prop.key in effective or prop.key in session.derived:
            continue
        inside = len(session.candidates & session.incidence.holds[prop.key])
        worst = max(inside, len(session.candidates) - inside)
        rank = (worst, prop.friendliness, prop.key)
        if best is None or rank < best:
            best = rank
    return best[2] if best else None
