"""Coherent probe registers: cross phase modulation and bus measurements.

Registers ride along as pure coherent labels.  Cross phase modulation with
``n`` photons maps ``|alpha> -> |alpha e^{i n theta}>`` exactly; probe-side
linear optics rewrite the labels, and the two destructive readouts
(photon counting and an x-quadrature homodyne) turn label structure into
measurement branches.
"""

from __future__ import annotations

import cmath
import dataclasses
import math
from dataclasses import dataclass
from typing import Sequence

from .fock import (
    COHERENT_MERGE_EPS,
    FockTerm,
    InvalidInput,
    Mode,
    PhotonicState,
    UnsupportedMode,
    WiringError,
    build_state,
    norm_sq,
    scaled,
)
from .measurement import PROB_EPS, BranchDistribution, Outcome

NUMBER_CAP = 25


def add_register(state: PhotonicState, register: str, alpha0: complex) -> PhotonicState:
    if register in state.registers:
        raise WiringError(f"register {register!r} already attached")
    terms = [
        FockTerm(t.occ, t.coherent + (complex(alpha0),), t.amplitude)
        for t in state.terms
    ]
    return build_state(state.registers + (register,), terms, state.born_weight)


def _register_index(state: PhotonicState, register: str) -> int:
    try:
        return state.registers.index(register)
    except ValueError:
        raise InvalidInput(f"no register {register!r} attached") from None


def _without_register(state, idx, rewrite):
    """Rebuild terms with register ``idx`` removed and amplitudes rewritten."""
    regs = state.registers[:idx] + state.registers[idx + 1 :]
    terms = []
    for t in state.terms:
        amp = rewrite(t)
        if amp is None:
            continue
        coh = t.coherent[:idx] + t.coherent[idx + 1 :]
        terms.append(FockTerm(t.occ, coh, amp))
    return regs, terms


@dataclass(frozen=True)
class XpmCoupling:
    """One cross-Kerr interaction: photons in ``modes`` kick ``register``."""

    register: str
    modes: tuple[Mode, ...]
    theta: float


def apply_xpm(state: PhotonicState, coupling: XpmCoupling) -> PhotonicState:
    idx = _register_index(state, coupling.register)
    watched = frozenset(coupling.modes)
    terms = []
    for t in state.terms:
        n = sum(k for m, k in t.occ if m in watched)
        coh = list(t.coherent)
        coh[idx] = coh[idx] * cmath.exp(1j * n * coupling.theta)
        terms.append(FockTerm(t.occ, tuple(coh), t.amplitude))
    return build_state(state.registers, terms, state.born_weight)


def coherent_phase(state: PhotonicState, register: str, phi: float) -> PhotonicState:
    idx = _register_index(state, register)
    terms = []
    for t in state.terms:
        coh = list(t.coherent)
        coh[idx] = coh[idx] * cmath.exp(1j * phi)
        terms.append(FockTerm(t.occ, tuple(coh), t.amplitude))
    return build_state(state.registers, terms, state.born_weight)


def coherent_bs50(state: PhotonicState, reg_a: str, reg_b: str) -> PhotonicState:
    """Interfere two probe beams: (a, b) -> ((a-b)/sqrt2, (a+b)/sqrt2)."""
    ia = _register_index(state, reg_a)
    ib = _register_index(state, reg_b)
    if ia == ib:
        raise WiringError("cannot interfere a register with itself")
    s = 1.0 / math.sqrt(2)
    terms = []
    for t in state.terms:
        coh = list(t.coherent)
        a, b = coh[ia], coh[ib]
        coh[ia] = (a - b) * s
        coh[ib] = (a + b) * s
        terms.append(FockTerm(t.occ, tuple(coh), t.amplitude))
    return build_state(state.registers, terms, state.born_weight)


def coherent_number_overlap(beta: complex, n: int) -> complex:
    """<n|beta> = e^{-|beta|^2/2} beta^n / sqrt(n!)."""
    return cmath.exp(-0.5 * abs(beta) ** 2) * beta**n / math.sqrt(math.factorial(n))


def project_photon_number(
    state: PhotonicState,
    register: str,
    mode: str = "ideal",
    cap: int = NUMBER_CAP,
) -> BranchDistribution:
    """Count photons in a probe register, destroying it.

    ``physical`` uses the exact Poissonian overlaps ``<n|beta>`` for every
    outcome 0..cap, so a displaced register leaks weight into n=0.  ``ideal``
    treats any register with |beta| above the merge tolerance as reliably
    flagged: its vacuum overlap is dropped and the n>=1 weights are rescaled
    by 1/sqrt(1 - e^{-|beta|^2}), while only genuinely undisplaced registers
    feed the n=0 branch.
    """
    if mode not in ("ideal", "physical"):
        raise InvalidInput(f"unknown measurement mode {mode!r}")
    idx = _register_index(state, register)
    norm_in = norm_sq(state)
    if norm_in <= PROB_EPS:
        raise InvalidInput("cannot measure a zero state")
    outcomes = []
    for n in range(cap + 1):
        def weight(term, n=n):
            beta = term.coherent[idx]
            if mode == "ideal":
                if abs(beta) <= COHERENT_MERGE_EPS:
                    return term.amplitude if n == 0 else None
                if n == 0:
                    return None
                excess = 1.0 - math.exp(-abs(beta) ** 2)
                return term.amplitude * coherent_number_overlap(beta, n) / math.sqrt(excess)
            return term.amplitude * coherent_number_overlap(beta, n)

        regs, terms = _without_register(state, idx, weight)
        branch = build_state(regs, terms, state.born_weight)
        p = norm_sq(branch) / norm_in
        if p <= PROB_EPS:
            continue
        branch = scaled(branch, 1.0 / math.sqrt(norm_sq(branch)))
        branch = dataclasses.replace(branch, born_weight=state.born_weight * p)
        outcomes.append(Outcome(str(n), float(n), p, branch))
    return BranchDistribution(tuple(outcomes))


def project_quadrature_x(
    state: PhotonicState, register: str, mode: str = "ideal"
) -> BranchDistribution:
    """Homodyne the x quadrature of a register, destroying it.

    Ideal readout assumes the distinct Re(beta) values present are spaced
    far enough to be resolved with certainty: terms are grouped by Re(beta)
    within the merge tolerance and each group keeps its amplitudes verbatim.
    A finite-resolution model is not implemented.
    """
    if mode == "physical":
        raise UnsupportedMode("finite-resolution homodyne is not modelled")
    if mode != "ideal":
        raise InvalidInput(f"unknown measurement mode {mode!r}")
    idx = _register_index(state, register)
    norm_in = norm_sq(state)
    if norm_in <= PROB_EPS:
        raise InvalidInput("cannot measure a zero state")
    centers: list[float] = []
    for t in state.terms:
        x = t.coherent[idx].real
        if not any(abs(x - c) <= COHERENT_MERGE_EPS for c in centers):
            centers.append(x)
    outcomes = []
    for x0 in sorted(centers):
        def keep(term, x0=x0):
            if abs(term.coherent[idx].real - x0) <= COHERENT_MERGE_EPS:
                return term.amplitude
            return None

        regs, terms = _without_register(state, idx, keep)
        branch = build_state(regs, terms, state.born_weight)
        p = norm_sq(branch) / norm_in
        if p <= PROB_EPS:
            continue
        branch = scaled(branch, 1.0 / math.sqrt(norm_sq(branch)))
        branch = dataclasses.replace(branch, born_weight=state.born_weight * p)
        outcomes.append(Outcome(f"x={x0:.9g}", float(x0), p, branch))
    return BranchDistribution(tuple(outcomes))


def drop_register(
    state: PhotonicState, register: str, tol: float = COHERENT_MERGE_EPS
) -> PhotonicState:
    """Detach a register that is in a product with the photonic part."""
    idx = _register_index(state, register)
    values = [t.coherent[idx] for t in state.terms]
    if not values:
        raise InvalidInput("cannot drop a register from a zero state")
    ref = values[0]
    if any(abs(v - ref) > tol for v in values):
        raise WiringError(
            f"register {register!r} is correlated with the photons; measure it instead"
        )
    regs, terms = _without_register(state, idx, lambda t: t.amplitude)
    return build_state(regs, terms, state.born_weight)
