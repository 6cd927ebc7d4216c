"""Projective detection, post-selection and feed-forward bookkeeping.

Detectors here are non-photon-number-resolving: a click is the projector
``I - |vac><vac|`` over the watched modes.  Branches carry their own
probability both in ``Outcome.probability`` (relative to the input state)
and multiplied into ``born_weight`` of the renormalized branch state.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .fock import (
    FockTerm,
    InvalidInput,
    Mode,
    PhotonicState,
    WiringError,
    build_state,
    fidelity,
    norm_sq,
    normalized,
    scaled,
)

PROB_EPS = 1e-15


@dataclass(frozen=True)
class Outcome:
    label: str
    value: float | None
    probability: float
    state: PhotonicState


@dataclass(frozen=True)
class BranchDistribution:
    outcomes: tuple[Outcome, ...]

    @property
    def total_probability(self) -> float:
        return sum(o.probability for o in self.outcomes)

    def labels(self) -> tuple[str, ...]:
        return tuple(o.label for o in self.outcomes)

    def get(self, label: str) -> Outcome:
        for o in self.outcomes:
            if o.label == label:
                return o
        raise InvalidInput(f"no outcome labelled {label!r}")

    def closest(self, value: float) -> Outcome:
        numbered = [o for o in self.outcomes if o.value is not None]
        if not numbered:
            raise InvalidInput("distribution has no numeric outcomes")
        return min(numbered, key=lambda o: abs(o.value - value))


def path_modes(path: str) -> tuple[Mode, Mode]:
    return (Mode(path, "H"), Mode(path, "V"))


def _photons_in(term: FockTerm, watched: frozenset[Mode]) -> int:
    return sum(n for m, n in term.occ if m in watched)


def _branch(state: PhotonicState, terms, norm_in: float) -> tuple[float, PhotonicState]:
    kept = build_state(state.registers, terms, state.born_weight)
    p = norm_sq(kept) / norm_in
    if p <= PROB_EPS:
        empty = build_state(state.registers, (), 0.0)
        return 0.0, empty
    out = scaled(kept, 1.0 / (norm_sq(kept) ** 0.5))
    return p, dataclasses.replace(out, born_weight=state.born_weight * p)


def detect_non_resolving(state: PhotonicState, modes: Iterable[Mode]) -> BranchDistribution:
    """Split a state into click / no-click branches over the watched modes."""
    watched = frozenset(modes)
    norm_in = norm_sq(state)
    if norm_in <= PROB_EPS:
        raise InvalidInput("cannot measure a zero state")
    click_terms = [t for t in state.terms if _photons_in(t, watched) > 0]
    quiet_terms = [t for t in state.terms if _photons_in(t, watched) == 0]
    outcomes = []
    for label, terms in (("click", click_terms), ("no-click", quiet_terms)):
        p, branch = _branch(state, terms, norm_in)
        if p > 0.0:
            outcomes.append(Outcome(label, None, p, branch))
    return BranchDistribution(tuple(outcomes))


def post_select_coincidence(
    state: PhotonicState,
    pattern: Sequence[tuple[Iterable[Mode], str]],
) -> tuple[float, PhotonicState]:
    """Keep the branch matching every (modes, "click"|"no-click") requirement.

    Returns ``(probability, renormalized branch)``; a zero-probability
    pattern returns the empty state with born weight 0.
    """
    sets = []
    for modes, want in pattern:
        if want not in ("click", "no-click"):
            raise InvalidInput(f"unknown requirement {want!r}")
        sets.append((frozenset(modes), want))
    for i in range(len(sets)):
        for j in range(i + 1, len(sets)):
            if sets[i][0] & sets[j][0]:
                raise WiringError("post-selection mode groups overlap")
    norm_in = norm_sq(state)
    if norm_in <= PROB_EPS:
        raise InvalidInput("cannot post-select a zero state")

    def matches(term):
        for watched, want in sets:
            n = _photons_in(term, watched)
            if want == "click" and n == 0:
                return False
            if want == "no-click" and n > 0:
                return False
        return True

    kept = [t for t in state.terms if matches(t)]
    return _branch(state, kept, norm_in)


def project_total_photons(
    state: PhotonicState, modes: Iterable[Mode], n: int
) -> tuple[float, PhotonicState]:
    """Project onto exactly ``n`` photons in the watched modes."""
    watched = frozenset(modes)
    norm_in = norm_sq(state)
    if norm_in <= PROB_EPS:
        raise InvalidInput("cannot project a zero state")
    kept = [t for t in state.terms if _photons_in(t, watched) == n]
    return _branch(state, kept, norm_in)


def strip_modes(state: PhotonicState, modes: Iterable[Mode]) -> PhotonicState:
    """Remove watched modes whose content factors out of the state.

    Writes the state as ``sum_ij c_ij |d_i>|r_j>`` over detector signatures
    ``d_i`` (occupation restricted to the watched modes) and rest signatures
    ``r_j``; requires the coefficient matrix to be rank one, then returns the
    rest factor with the original norm.  Raises WiringError when the watched
    modes are still entangled with the rest.
    """
    watched = frozenset(modes)
    coeffs: dict[tuple, dict[tuple, complex]] = {}
    for t in state.terms:
        det = tuple((m, n) for m, n in t.occ if m in watched)
        rest_key = (tuple((m, n) for m, n in t.occ if m not in watched), t.coherent)
        row = coeffs.setdefault(det, {})
        row[rest_key] = row.get(rest_key, 0j) + t.amplitude
    if not coeffs:
        raise InvalidInput("cannot strip modes from a zero state")
    if len(coeffs) == 1:
        row = next(iter(coeffs.values()))
        raw = [FockTerm(k[0], k[1], amp) for k, amp in row.items()]
    else:
        # rank-1 check: every row must be proportional to the heaviest row
        rows = list(coeffs.items())
        scale = max(abs(a) for _, row in rows for a in row.values())
        i0 = max(
            range(len(rows)), key=lambda i: sum(abs(a) ** 2 for a in rows[i][1].values())
        )
        ref = rows[i0][1]
        j0 = max(ref, key=lambda k: abs(ref[k]))
        for _, row in rows:
            rj0 = row.get(j0, 0j)
            for key in set(ref) | set(row):
                lhs = row.get(key, 0j) * ref[j0]
                rhs = rj0 * ref.get(key, 0j)
                if abs(lhs - rhs) > 1e-9 * max(1.0, scale**2):
                    raise WiringError(
                        "watched modes are entangled with the rest; cannot strip"
                    )
        raw = [FockTerm(k[0], k[1], amp) for k, amp in ref.items()]
    stripped = build_state(state.registers, raw, state.born_weight)
    n2 = norm_sq(stripped)
    if n2 <= PROB_EPS:
        raise InvalidInput("stripped state vanished")
    return scaled(stripped, (norm_sq(state) / n2) ** 0.5)


@dataclass(frozen=True)
class Correction:
    kind: str  # "phase" | "sigma_x"
    target: str | Mode
    value: float = 0.0

    def __post_init__(self):
        if self.kind not in ("phase", "sigma_x"):
            raise InvalidInput(f"unknown correction kind {self.kind!r}")


@dataclass(frozen=True)
class FeedForwardRule:
    """Outcome label -> correction chain; every observed label needs an entry."""

    corrections: Mapping[str, tuple[Correction, ...]]


def apply_feed_forward(
    dist: BranchDistribution, rule: FeedForwardRule
) -> BranchDistribution:
    from .elements import apply_phase_shift, apply_sigma_x

    out = []
    for o in dist.outcomes:
        if o.label not in rule.corrections:
            raise WiringError(f"no feed-forward entry for outcome {o.label!r}")
        s = o.state
        for corr in rule.corrections[o.label]:
            if corr.kind == "phase":
                s = apply_phase_shift(s, corr.target, corr.value)
            else:
                s = apply_sigma_x(s, corr.target)
        out.append(dataclasses.replace(o, state=s))
    return BranchDistribution(tuple(out))


def merge_branches(
    branches: Sequence[tuple[float, PhotonicState]], tol: float = 1e-9
) -> tuple[float, PhotonicState, float]:
    """Incoherently combine branches that hold the same physical state.

    Probabilities add; the states must match up to a global phase (their
    pairwise fidelity is returned so callers can assert on it).  This is a
    classical mixture record, not an amplitude sum.
    """
    live = [(p, s) for p, s in branches if p > PROB_EPS]
    if not live:
        raise InvalidInput("all branches have zero probability")
    total = sum(p for p, _ in live)
    first = live[0][1]
    min_fid = 1.0
    for _, s in live[1:]:
        f = fidelity(s, first)
        min_fid = min(min_fid, f)
        if f < 1.0 - tol:
            raise WiringError(f"branches disagree: fidelity {f} below 1 - {tol}")
    merged = dataclasses.replace(
        first, born_weight=sum(s.born_weight for _, s in live)
    )
    return total, merged, min_fid
