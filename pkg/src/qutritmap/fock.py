"""Sparse symbolic Fock states for few-photon interferometry.

A state is a sum of creation-operator monomials acting on the vacuum,
optionally tensored with labelled coherent-state registers.  Each term
keeps an exact complex amplitude, an occupation signature over
``Mode(path, pol)`` slots and one complex label per register, so overlaps
and measurement statistics come out in closed form instead of from a
truncated numeric Hilbert space.

Conventions:

* a term with occupation ``{m: n}`` represents ``amplitude * (a_m^dag)^n``
  applied to vacuum, i.e. an *unnormalized* monomial whose squared norm is
  ``|amplitude|^2 * prod(n!)``;
* coherent registers are pure labels: elements act on them by rewriting
  the complex amplitude, never by expanding in number states.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable, Mapping

H = "H"
V = "V"
POLS = (H, V)

PRUNE_EPS = 1e-12
COHERENT_MERGE_EPS = 1e-9
NORM_EPS = 1e-9
PHOTON_CAP = 4


class SimulationError(Exception):
    """Base class for everything raised by this package on purpose."""


class InvalidInput(SimulationError):
    pass


class WiringError(SimulationError):
    """Raised when circuit plumbing is inconsistent (reused paths, bad maps)."""


class PhotonCapExceeded(SimulationError):
    pass


class UnsupportedMode(SimulationError):
    """Requested behaviour exists physically but is not modelled."""


@dataclass(frozen=True, order=True)
class Mode:
    """A single bosonic slot: spatial path label plus polarization."""

    path: str
    pol: str

    def __post_init__(self):
        if self.pol not in POLS:
            raise InvalidInput(f"unknown polarization {self.pol!r}")


@dataclass(frozen=True)
class FockTerm:
    """One monomial: amplitude * prod (a_m^dag)^n |vac>, times register labels."""

    occ: tuple[tuple[Mode, int], ...]
    coherent: tuple[complex, ...]
    amplitude: complex

    @classmethod
    def from_occupations(
        cls,
        occupations: Mapping[Mode, int],
        coherent: Iterable[complex] = (),
        amplitude: complex = 1.0,
    ) -> "FockTerm":
        occ = []
        total = 0
        for mode, n in occupations.items():
            if n < 0 or int(n) != n:
                raise InvalidInput(f"occupation must be a non-negative int, got {n!r}")
            if n == 0:
                continue
            occ.append((mode, int(n)))
            total += int(n)
        if total > PHOTON_CAP:
            raise PhotonCapExceeded(
                f"term holds {total} photons, cap is {PHOTON_CAP}"
            )
        occ.sort()
        return cls(tuple(occ), tuple(complex(c) for c in coherent), complex(amplitude))

    @property
    def total_photons(self) -> int:
        return sum(n for _, n in self.occ)

    def occupations(self) -> dict[Mode, int]:
        return dict(self.occ)

    def count(self, mode: Mode) -> int:
        for m, n in self.occ:
            if m == mode:
                return n
        return 0


@dataclass(frozen=True)
class PhotonicState:
    """Canonical term list plus register labels and a Born bookkeeping weight.

    ``born_weight`` tracks the probability of the measurement record that led
    to this (renormalized) branch; it never enters overlaps.
    """

    registers: tuple[str, ...]
    terms: tuple[FockTerm, ...]
    born_weight: float = 1.0


def _coherent_close(a: tuple[complex, ...], b: tuple[complex, ...]) -> bool:
    return all(abs(x - y) <= COHERENT_MERGE_EPS for x, y in zip(a, b))


def _term_sort_key(term: FockTerm):
    coh = tuple((round(c.real, 9), round(c.imag, 9)) for c in term.coherent)
    return (term.occ, coh)


def _canonical_terms(terms: Iterable[FockTerm]) -> tuple[FockTerm, ...]:
    # Merge equal monomials; coherent labels are clustered within
    # COHERENT_MERGE_EPS so float jitter cannot split a branch in two.
    groups: dict[tuple, list[list]] = {}
    for t in terms:
        bucket = groups.setdefault(t.occ, [])
        for entry in bucket:
            if _coherent_close(entry[0], t.coherent):
                entry[1] += t.amplitude
                break
        else:
            bucket.append([t.coherent, t.amplitude])
    out = []
    for occ, bucket in groups.items():
        for coh, amp in bucket:
            if abs(amp) > PRUNE_EPS:
                out.append(FockTerm(occ, coh, amp))
    out.sort(key=_term_sort_key)
    return tuple(out)


def build_state(
    registers: Iterable[str],
    terms: Iterable[FockTerm],
    born_weight: float = 1.0,
) -> PhotonicState:
    regs = tuple(registers)
    terms = tuple(terms)
    for t in terms:
        if len(t.coherent) != len(regs):
            raise InvalidInput(
                f"term carries {len(t.coherent)} coherent labels, "
                f"state declares {len(regs)} registers"
            )
    return PhotonicState(regs, _canonical_terms(terms), float(born_weight))


def coherent_overlap(beta: complex, gamma: complex) -> complex:
    """<beta|gamma> for coherent states, exact closed form."""
    return cmath.exp(
        -0.5 * abs(beta) ** 2 - 0.5 * abs(gamma) ** 2 + beta.conjugate() * gamma
    )


def _occ_norm(occ: tuple[tuple[Mode, int], ...]) -> float:
    fac = 1.0
    for _, n in occ:
        fac *= math.factorial(n)
    return fac


def inner_product(bra: PhotonicState, ket: PhotonicState) -> complex:
    """<bra|ket> including register overlaps; born weights are ignored."""
    if bra.registers != ket.registers:
        raise InvalidInput(
            f"register mismatch: {bra.registers} vs {ket.registers}"
        )
    by_occ: dict[tuple, list[FockTerm]] = {}
    for t in ket.terms:
        by_occ.setdefault(t.occ, []).append(t)
    total = 0j
    for tb in bra.terms:
        group = by_occ.get(tb.occ)
        if not group:
            continue
        fac = _occ_norm(tb.occ)
        for tk in group:
            val = tb.amplitude.conjugate() * tk.amplitude * fac
            for cb, ck in zip(tb.coherent, tk.coherent):
                val *= coherent_overlap(cb, ck)
            total += val
    return total


def norm_sq(state: PhotonicState) -> float:
    return inner_product(state, state).real


def scaled(state: PhotonicState, factor: complex) -> PhotonicState:
    terms = tuple(
        FockTerm(t.occ, t.coherent, t.amplitude * factor) for t in state.terms
    )
    return PhotonicState(state.registers, terms, state.born_weight)


def normalized(state: PhotonicState) -> PhotonicState:
    n2 = norm_sq(state)
    if n2 <= NORM_EPS**2:
        raise InvalidInput("cannot normalize a (near-)zero state")
    return scaled(state, 1.0 / math.sqrt(n2))


def fidelity(state: PhotonicState, target: PhotonicState) -> float:
    """|<target|state>|^2 for normalized views of both arguments."""
    denom = norm_sq(state) * norm_sq(target)
    if denom <= 0.0:
        raise InvalidInput("fidelity of a zero state is undefined")
    val = abs(inner_product(target, state)) ** 2 / denom
    return min(max(val, 0.0), 1.0)


def traced_fidelity(state: PhotonicState, target: PhotonicState) -> float:
    """Fidelity against a register-free target after tracing out registers.

    Computes <T| Tr_regs(|s><s|) |T> / (norm(s)^2 norm(T)^2).  Coincides with
    :func:`fidelity` when ``state`` has no registers attached.
    """
    if target.registers:
        raise InvalidInput("target must not carry coherent registers")
    if not state.registers:
        return fidelity(state, target)
    t_by_occ: dict[tuple, complex] = {}
    for t in target.terms:
        t_by_occ[t.occ] = t_by_occ.get(t.occ, 0j) + t.amplitude
    weights = []
    labels = []
    for term in state.terms:
        amp_t = t_by_occ.get(term.occ)
        if amp_t is None:
            continue
        weights.append(amp_t.conjugate() * term.amplitude * _occ_norm(term.occ))
        labels.append(term.coherent)
    num = 0j
    for i, wi in enumerate(weights):
        for j, wj in enumerate(weights):
            gram = 1.0 + 0j
            for ck, ci in zip(labels[j], labels[i]):
                gram *= coherent_overlap(ck, ci)
            num += wi * wj.conjugate() * gram
    denom = norm_sq(state) * norm_sq(target)
    if denom <= 0.0:
        raise InvalidInput("fidelity of a zero state is undefined")
    val = num.real / denom
    return min(max(val, 0.0), 1.0)


def amplitude_of(state: PhotonicState, occupations: Mapping[Mode, int]) -> complex:
    """Summed amplitude of all terms with the given occupation signature."""
    key = FockTerm.from_occupations(occupations).occ
    return sum((t.amplitude for t in state.terms if t.occ == key), 0j)


def state_paths(state: PhotonicState) -> set[str]:
    return {m.path for t in state.terms for m, _ in t.occ}


@dataclass(frozen=True)
class QutritCoefficients:
    """Normalized (alpha, beta, gamma) for the three logical qutrit levels."""

    alpha: complex
    beta: complex
    gamma: complex

    def __post_init__(self):
        n = abs(self.alpha) ** 2 + abs(self.beta) ** 2 + abs(self.gamma) ** 2
        if abs(n - 1.0) > NORM_EPS:
            raise InvalidInput(f"coefficients are not normalized: |c|^2 = {n}")

    @classmethod
    def normalize(cls, alpha: complex, beta: complex, gamma: complex) -> "QutritCoefficients":
        n = math.sqrt(abs(alpha) ** 2 + abs(beta) ** 2 + abs(gamma) ** 2)
        if n == 0.0:
            raise InvalidInput("cannot normalize the zero vector")
        return cls(complex(alpha) / n, complex(beta) / n, complex(gamma) / n)

    def as_tuple(self) -> tuple[complex, complex, complex]:
        return (complex(self.alpha), complex(self.beta), complex(self.gamma))


def make_biphotonic_qutrit(coeffs: QutritCoefficients, path: str = "in") -> PhotonicState:
    """Two photons in one path: levels |HH>, |HV>, |VV> with unit norm.

    The double-occupation levels carry 1/sqrt(2) so that the monomial norm
    (2! per doubly occupied slot) works out to |alpha|^2+|beta|^2+|gamma|^2.
    """
    h = Mode(path, H)
    v = Mode(path, V)
    a, b, g = coeffs.as_tuple()
    terms = [
        FockTerm.from_occupations({h: 2}, (), a / math.sqrt(2)),
        FockTerm.from_occupations({h: 1, v: 1}, (), b),
        FockTerm.from_occupations({v: 2}, (), g / math.sqrt(2)),
    ]
    return build_state((), terms)


def make_spatial_qutrit(
    coeffs: QutritCoefficients,
    paths: tuple[str, str, str],
    pol: str = H,
) -> PhotonicState:
    """One photon spread over three paths with a fixed polarization."""
    if len(set(paths)) != 3:
        raise WiringError(f"spatial qutrit needs three distinct paths, got {paths}")
    terms = [
        FockTerm.from_occupations({Mode(p, pol): 1}, (), c)
        for p, c in zip(paths, coeffs.as_tuple())
    ]
    return build_state((), terms)


def single_photon(path: str, pol: str = H) -> PhotonicState:
    return build_state((), [FockTerm.from_occupations({Mode(path, pol): 1})])


def ancilla_plus(path: str) -> PhotonicState:
    """One photon in (|H> + |V>)/sqrt(2) on the given path."""
    s = 1.0 / math.sqrt(2)
    terms = [
        FockTerm.from_occupations({Mode(path, H): 1}, (), s),
        FockTerm.from_occupations({Mode(path, V): 1}, (), s),
    ]
    return build_state((), terms)


def vacuum_state() -> PhotonicState:
    return build_state((), [FockTerm.from_occupations({})])


def tensor(a: PhotonicState, b: PhotonicState) -> PhotonicState:
    """Tensor product of states living on disjoint paths and registers."""
    shared = state_paths(a) & state_paths(b)
    if shared:
        raise WiringError(f"tensor factors share paths {sorted(shared)}")
    if set(a.registers) & set(b.registers):
        raise WiringError("tensor factors share register labels")
    terms = []
    for ta in a.terms:
        for tb in b.terms:
            occ = ta.occupations()
            occ.update(tb.occupations())
            terms.append(
                FockTerm.from_occupations(
                    occ, ta.coherent + tb.coherent, ta.amplitude * tb.amplitude
                )
            )
    return build_state(
        a.registers + b.registers, terms, a.born_weight * b.born_weight
    )


def relabel_paths(state: PhotonicState, mapping: Mapping[str, str]) -> PhotonicState:
    """Rename spatial paths; refuses renames that would merge distinct paths."""
    present = state_paths(state)
    image: dict[str, str] = {}
    for p in sorted(present):
        q = mapping.get(p, p)
        if q in image:
            raise WiringError(f"paths {image[q]!r} and {p!r} both map to {q!r}")
        image[q] = p
    terms = []
    for t in state.terms:
        occ = {
            Mode(mapping.get(m.path, m.path), m.pol): n for m, n in t.occ
        }
        terms.append(FockTerm.from_occupations(occ, t.coherent, t.amplitude))
    return build_state(state.registers, terms, state.born_weight)
