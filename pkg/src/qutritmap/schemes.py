"""End-to-end conversion circuits between the two qutrit encodings.

Five circuits are wired here, entirely from the element layer:

- ``scheme_linear_forward``: two-photon polarization qutrit to single-photon
  spatial qutrit using beam splitters, two ancilla photons, a heralding
  coincidence, and a three-path eraser with feed-forward phase corrections.
- ``scheme_linear_inverse``: spatial qutrit back to the two-photon encoding
  using three variable splitters, two ancilla photons, and a two-path eraser.
- ``scheme_kerr_forward``: near-deterministic forward map built on qubus
  probe beams with cross-phase couplings; two measurement variants.
- ``scheme_kerr_inverse``: near-deterministic inverse map built from two
  entangling blocks, a four-port path eraser, amplitude rebalancing, and a
  probe-heralded mode merge.
- ``u3_biphotonic``: arbitrary 3x3 unitary on the two-photon encoding by
  converting forward, applying a path interferometer, and converting back.

Every scheme returns a :class:`SchemeReport`.  Reports keep a branch log of
(step, outcome, probability) entries whose product equals the quoted success
probability; extra scalar diagnostics go into ``checks``.  Working-point
constants below are computed from their defining constraints rather than
typed in as decimals.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .fock import (
    H,
    V,
    InvalidInput,
    Mode,
    PhotonicState,
    QutritCoefficients,
    WiringError,
    ancilla_plus,
    build_state,
    fidelity,
    make_biphotonic_qutrit,
    make_spatial_qutrit,
    relabel_paths,
    single_photon,
    tensor,
    traced_fidelity,
)
from .elements import (
    BeamSplitterSpec,
    apply_beam_splitter,
    apply_lomi,
    apply_phase_shift,
    apply_qft,
    apply_sigma_x,
    assert_unitary,
    reck_decompose,
    route_pbs,
)
from .measurement import (
    BranchDistribution,
    Correction,
    FeedForwardRule,
    Outcome,
    apply_feed_forward,
    merge_branches,
    path_modes,
    post_select_coincidence,
    project_total_photons,
    strip_modes,
)
from .qubus import (
    NUMBER_CAP,
    XpmCoupling,
    add_register,
    apply_xpm,
    coherent_bs50,
    coherent_phase,
    drop_register,
    project_photon_number,
    project_quadrature_x,
)

# Forward map: the doubly-occupied route is suppressed by t^2/4 relative to
# the singly-occupied ones, so balance demands t^2/(4 sqrt 2) = r^2/2 sqrt 2,
# i.e. t^2 = 2 sqrt(2) (1 - t^2).
T2_LINEAR_FORWARD = 2.0 * math.sqrt(2.0) / (1.0 + 2.0 * math.sqrt(2.0))
P_LINEAR_FORWARD = 1.0 / (2.0 + 4.0 * math.sqrt(2.0)) ** 2

# Inverse map: matching the three output amplitudes pins r2 = t1 t2 (1 + r1)
# with t2 = r1 / t1, which closes to u^2 + 3u - 2 = 0 for u = t1^2.
T1_SQ_LINEAR_INVERSE = (math.sqrt(17.0) - 3.0) / 2.0
R1_SQ_LINEAR_INVERSE = 1.0 - T1_SQ_LINEAR_INVERSE
T3_SQ_LINEAR_INVERSE = R1_SQ_LINEAR_INVERSE / 2.0
P_LINEAR_INVERSE = R1_SQ_LINEAR_INVERSE / 64.0

# Kerr forward map: the tapped splitter halves the reflected route, so
# r/2 = t/sqrt(2) balances all three components at t^2 = 1/3.
T_KERR_FORWARD = 1.0 / math.sqrt(3.0)
P_KERR_FORWARD = 1.0 / 6.0
P_KERR_INVERSE = 1.0 / 2.0

DEFAULT_QUBUS_ALPHA = 2.0
DEFAULT_THETA = 0.3

_FIFTY = BeamSplitterSpec.fifty_fifty()
_LOG_TOL = 1e-12
_PHASE_RESOLUTION = 1e-6


@dataclass(frozen=True)
class BranchLogEntry:
    """One conditioning step: which outcome was kept and with what probability."""

    step: str
    outcome: str
    probability: float


@dataclass(frozen=True)
class SchemeReport:
    """Outcome summary of one scheme run.

    ``success_probability`` always equals the product of the branch-log
    probabilities; ``checks`` carries auxiliary scalars (branch fidelities,
    discarded-outcome bookkeeping, the output Born weight).
    """

    scheme: str
    success_probability: float
    output_fidelity: float
    output_state: PhotonicState
    branch_log: tuple[BranchLogEntry, ...]
    parameters: Mapping[str, float]
    checks: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        prod = 1.0
        for entry in self.branch_log:
            prod *= entry.probability
        if abs(prod - self.success_probability) > _LOG_TOL * max(1.0, prod):
            raise WiringError(
                "branch log probabilities do not multiply to the quoted "
                f"success probability: {prod!r} vs {self.success_probability!r}"
            )


def _log_product(entries: Sequence[BranchLogEntry]) -> float:
    prod = 1.0
    for entry in entries:
        prod *= entry.probability
    return prod


def _coeffs(c) -> QutritCoefficients:
    if isinstance(c, QutritCoefficients):
        return c
    return QutritCoefficients(*c)


def _check_unit_interval(name: str, value: float):
    if not 0.0 < value < 1.0:
        raise InvalidInput(f"{name} must lie strictly between 0 and 1, got {value!r}")


def _check_probe(alpha: float, theta: float):
    if alpha <= 0.0:
        raise InvalidInput(f"qubus amplitude must be positive, got {alpha!r}")
    if theta <= 0.0:
        raise InvalidInput(f"cross-phase angle must be positive, got {theta!r}")
    if alpha * (1.0 - math.cos(theta)) < _PHASE_RESOLUTION:
        raise InvalidInput(
            "qubus amplitude times (1 - cos theta) is too small to resolve "
            "the probe outcome groups"
        )


def _check_meas_mode(meas_mode: str):
    if meas_mode not in ("ideal", "physical"):
        raise InvalidInput(f"unknown measurement mode {meas_mode!r}")


def _output_fidelity(state: PhotonicState, target: PhotonicState) -> float:
    if state.registers:
        return traced_fidelity(state, target)
    return fidelity(state, target)


# ---------------------------------------------------------------------------
# linear forward map


def _linear_forward_premeasure(c: QutritCoefficients, t: float) -> PhotonicState:
    """State after the full passive network, before phase fixing and the QFT.

    Populated paths: 3/6/7 (prospective outputs), P1/P2/P3 (eraser inputs),
    D1/D2 (heralding detectors).
    """
    spec = BeamSplitterSpec.from_t(t)
    s = make_biphotonic_qutrit(c, "in")
    s = tensor(s, single_photon("ancH", H))
    s = tensor(s, single_photon("ancV", V))
    s = apply_beam_splitter(s, "in", None, "2", "1", spec)
    s = route_pbs(s, ("1", None), ("3", "P1"))
    s = route_pbs(s, ("2", None), ("2h", "2v"))
    s = apply_beam_splitter(s, "2h", "ancH", "4", "D1", _FIFTY)
    s = apply_beam_splitter(s, "2v", "ancV", "5", "D2", _FIFTY)
    s = apply_beam_splitter(s, "4", None, "6", "P2", _FIFTY)
    s = apply_sigma_x(s, "P2")
    s = apply_beam_splitter(s, "5", None, "7", "P3", _FIFTY)
    s = apply_sigma_x(s, "7")
    return s


# Eraser corrections, keyed by which QFT output fires.  QFT order is
# (P1, P3, P2), so detector k imprints exp(2 pi i j k / 3) on input j.
_FORWARD_ERASER_TABLE = {
    "D3": (),
    "D4": (("6", 2.0 * math.pi / 3.0), ("7", 4.0 * math.pi / 3.0)),
    "D5": (("6", 4.0 * math.pi / 3.0), ("7", 8.0 * math.pi / 3.0)),
}
_FORWARD_ERASER_PATHS = {"D3": "P1", "D4": "P3", "D5": "P2"}


def scheme_linear_forward(c, t: float | None = None) -> SchemeReport:
    """Convert a two-photon polarization qutrit to a spatial qutrit.

    The input rides on path ``in``; the output photon leaves in superposition
    of paths 6/3/7 (all H after the sigma-x stage), in that coefficient
    order.  ``t`` is the first splitter's transmissivity; the default is the
    balanced working point.
    """
    c = _coeffs(c)
    t = math.sqrt(T2_LINEAR_FORWARD) if t is None else float(t)
    _check_unit_interval("t", t)

    s = _linear_forward_premeasure(c, t)
    s = apply_phase_shift(s, "6", math.pi)
    s = apply_phase_shift(s, "7", math.pi)
    p_herald, s = post_select_coincidence(
        s, [(path_modes("D1"), "click"), (path_modes("D2"), "click")]
    )
    if p_herald == 0.0:
        raise WiringError("heralding coincidence has zero probability")
    s = apply_qft(s, ("P1", "P3", "P2"))

    outcomes = []
    for label in ("D3", "D4", "D5"):
        fired = _FORWARD_ERASER_PATHS[label]
        quiet = [p for k, p in _FORWARD_ERASER_PATHS.items() if k != label]
        pattern = [(path_modes(fired), "click")]
        pattern += [(path_modes(p), "no-click") for p in quiet]
        p_k, st = post_select_coincidence(s, pattern)
        outcomes.append(Outcome(label, None, p_k, st))
    dist = BranchDistribution(tuple(outcomes))
    rule = FeedForwardRule(
        {
            label: tuple(Correction("phase", path, phi) for path, phi in fixes)
            for label, fixes in _FORWARD_ERASER_TABLE.items()
        }
    )
    dist = apply_feed_forward(dist, rule)

    out_modes = path_modes("6") + path_modes("3") + path_modes("7")
    branches = []
    checks: dict[str, float] = {}
    for o in dist.outcomes:
        q_k, st = project_total_photons(o.state, out_modes, 1)
        checks[f"eraser_{o.label}_probability"] = o.probability * q_k
        if o.probability * q_k == 0.0:
            continue
        detectors = (
            path_modes("D1")
            + path_modes("D2")
            + path_modes(_FORWARD_ERASER_PATHS[o.label])
        )
        st = strip_modes(st, detectors)
        branches.append((o.probability * q_k, st))
    p_eraser, merged, min_fid = merge_branches(branches)

    target = make_spatial_qutrit(c, ("6", "3", "7"))
    log = (
        BranchLogEntry("heralding-coincidence", "D1&D2", p_herald),
        BranchLogEntry("which-path-eraser", "D3|D4|D5", p_eraser),
    )
    checks["eraser_min_branch_fidelity"] = min_fid
    checks["output_born_weight"] = merged.born_weight
    return SchemeReport(
        scheme="linear-forward",
        success_probability=_log_product(log),
        output_fidelity=fidelity(merged, target),
        output_state=merged,
        branch_log=log,
        parameters={"t": t, "t_squared": t * t},
        checks=checks,
    )


# ---------------------------------------------------------------------------
# linear inverse map


def _linear_inverse_premeasure(
    state: PhotonicState,
    paths: tuple[str, str, str],
    t1: float,
    t2: float,
    t3: float,
) -> PhotonicState:
    """State after the full passive network, through the two-path eraser.

    Populated paths: 4/6/7 (prospective outputs), eD1/eD2 (eraser detectors),
    disc1/disc3 (unmonitored vacuum-biased ports).
    """
    p0, p1, p2 = paths
    s = tensor(state, single_photon("ancH", H))
    s = tensor(s, single_photon("ancV", V))
    s = apply_beam_splitter(s, p1, None, "arm", "2", BeamSplitterSpec.from_t(t1))
    s = apply_beam_splitter(s, p0, "arm", "disc1", "1", BeamSplitterSpec.from_t(t2))
    s = apply_beam_splitter(s, p2, None, "3", "disc3", BeamSplitterSpec.from_t(t3))
    s = apply_sigma_x(s, "3")
    s = apply_beam_splitter(s, "1", "ancH", "4", "P1", _FIFTY)
    s = route_pbs(s, ("2", "3"), ("5", "junk"))
    s = apply_beam_splitter(s, "5", "ancV", "7", "6", _FIFTY)
    s = route_pbs(s, ("6", None), ("6", "P2"))
    # Without this flip the eraser detector would record H for one branch
    # and V for the others, i.e. keep which-route information.
    s = apply_sigma_x(s, "P1")
    s = apply_beam_splitter(s, "P1", "P2", "eD1", "eD2", _FIFTY)
    return s


def _linear_inverse_downstream(state: PhotonicState):
    s = apply_beam_splitter(state, "4", "7", "out1", "out2", _FIFTY)
    p_two, s = project_total_photons(s, path_modes("out1"), 2)
    return p_two, s


def _linear_inverse_run(
    state: PhotonicState,
    paths: tuple[str, str, str],
    t1: float,
    t2: float,
    t3: float,
):
    pre = _linear_inverse_premeasure(state, paths, t1, t2, t3)
    p_eraser, s = post_select_coincidence(
        pre, [(path_modes("eD1"), "click"), (path_modes("eD2"), "no-click")]
    )
    p_two, s = _linear_inverse_downstream(s)
    s = strip_modes(s, path_modes("eD1"))
    s = relabel_paths(s, {"out1": "out"})
    log = (
        BranchLogEntry("two-path-eraser", "D1&not-D2", p_eraser),
        BranchLogEntry("output-coincidence", "2 photons on out", p_two),
    )
    return pre, log, s


def default_linear_inverse_params() -> dict[str, float]:
    t1 = math.sqrt(T1_SQ_LINEAR_INVERSE)
    r1 = math.sqrt(R1_SQ_LINEAR_INVERSE)
    return {
        "t1": t1,
        "t2": r1 / t1,
        "t3": math.sqrt(T3_SQ_LINEAR_INVERSE),
    }


def scheme_linear_inverse(
    c,
    t1: float | None = None,
    t2: float | None = None,
    t3: float | None = None,
) -> SchemeReport:
    """Convert a spatial qutrit back to the two-photon polarization encoding.

    The spatial photon enters on paths s0/s1/s2 in coefficient order; the
    output pair leaves on path ``out``.  Defaults are the balanced working
    point.  The discarded second eraser outcome is quantified in ``checks``:
    it occurs with the same probability but carries an uncorrectable sign
    pattern, hence its lower output fidelity.
    """
    c = _coeffs(c)
    defaults = default_linear_inverse_params()
    t1 = defaults["t1"] if t1 is None else float(t1)
    t2 = defaults["t2"] if t2 is None else float(t2)
    t3 = defaults["t3"] if t3 is None else float(t3)
    for name, val in (("t1", t1), ("t2", t2), ("t3", t3)):
        _check_unit_interval(name, val)

    paths = ("s0", "s1", "s2")
    state = make_spatial_qutrit(c, paths)
    pre, log, s = _linear_inverse_run(state, paths, t1, t2, t3)
    target = make_biphotonic_qutrit(c, "out")

    p_d2, s_d2 = post_select_coincidence(
        pre, [(path_modes("eD2"), "click"), (path_modes("eD1"), "no-click")]
    )
    checks = {"output_born_weight": s.born_weight}
    if p_d2 > 0.0:
        q_d2, s_d2 = _linear_inverse_downstream(s_d2)
        checks["discarded_d2_probability"] = p_d2 * q_d2
        if p_d2 * q_d2 > 0.0:
            s_d2 = strip_modes(s_d2, path_modes("eD2"))
            s_d2 = relabel_paths(s_d2, {"out1": "out"})
            checks["discarded_d2_fidelity"] = fidelity(s_d2, target)

    return SchemeReport(
        scheme="linear-inverse",
        success_probability=_log_product(log),
        output_fidelity=fidelity(s, target),
        output_state=s,
        branch_log=log,
        parameters={"t1": t1, "t2": t2, "t3": t3},
        checks=checks,
    )


# ---------------------------------------------------------------------------
# Kerr forward map


def _kerr_forward_routed(c: QutritCoefficients, t: float) -> PhotonicState:
    """Photonic part of the Kerr forward map, before any probe couples.

    Populated modes: (1,H), (1l,V), (4h,H), (5,H), (6,V), (7,V).
    """
    s = make_biphotonic_qutrit(c, "in")
    s = apply_beam_splitter(s, "in", None, "1", "2", _FIFTY)
    s = apply_beam_splitter(s, "2", None, "4", "3", BeamSplitterSpec.from_t(t))
    s = route_pbs(s, ("1", None), ("1", "1l"))
    s = route_pbs(s, ("3", None), ("5", "6"))
    s = route_pbs(s, ("4", None), ("4h", "7"))
    return s


def _kerr_forward_coupled(
    c: QutritCoefficients, t: float, alpha: float, theta: float
) -> PhotonicState:
    """Routed state with both probes coupled, interfered, and phase-fixed.

    This is the double-XPM variant right before the photon-number projection
    on ``probe-1``: every wanted component leaves probe-1 in vacuum, while
    single-route components imprint +/- theta on it.
    """
    s = _kerr_forward_routed(c, t)
    s = add_register(s, "probe-1", alpha)
    s = add_register(s, "probe-2", alpha)
    s = apply_xpm(s, XpmCoupling("probe-1", (Mode("1", H), Mode("7", V)), theta))
    s = apply_xpm(
        s, XpmCoupling("probe-2", (Mode("1l", V), Mode("5", H), Mode("6", V)), theta)
    )
    s = coherent_phase(s, "probe-1", -theta)
    s = coherent_phase(s, "probe-2", -theta)
    s = coherent_bs50(s, "probe-1", "probe-2")
    return s


def _kerr_forward_postselect(s: PhotonicState, tol: float):
    """Shared tail: rebalance path 5, erase the left-arm pair, post-select."""
    s = apply_beam_splitter(s, "5", None, "5", "tap5", _FIFTY)
    s = route_pbs(s, ("1", "1l"), ("m", "mjunk"))
    s = route_pbs(s, ("m", None), ("dp", "dm"), basis="diag")
    out_modes = path_modes("5") + path_modes("6") + path_modes("7")
    branches = []
    detail = {}
    for fired, quiet, fixes in (
        ("dp", "dm", ()),
        ("dm", "dp", (("7", math.pi),)),
    ):
        p_b, st = post_select_coincidence(
            s, [(path_modes(fired), "click"), (path_modes(quiet), "no-click")]
        )
        q_b, st = project_total_photons(st, out_modes, 1)
        detail[f"eraser_{fired}_probability"] = p_b * q_b
        if p_b * q_b == 0.0:
            continue
        st = strip_modes(st, path_modes(fired))
        for path, phi in fixes:
            st = apply_phase_shift(st, path, phi)
        branches.append((p_b * q_b, st))
    p_det, merged, min_fid = merge_branches(branches, tol=tol)
    merged = apply_sigma_x(merged, "6")
    merged = apply_sigma_x(merged, "7")
    detail["eraser_min_branch_fidelity"] = min_fid
    return p_det, merged, detail


def scheme_kerr_forward(
    c,
    t: float | None = None,
    variant: str = "double-xpm",
    meas_mode: str = "ideal",
    qubus_alpha: float = DEFAULT_QUBUS_ALPHA,
    theta: float = DEFAULT_THETA,
    number_cap: int = NUMBER_CAP,
) -> SchemeReport:
    """Convert a two-photon polarization qutrit to a spatial one via probes.

    ``variant`` selects how the unwanted components are heralded away:

    - ``separate-qnd``: each probe is read out by quadrature; components that
      imprint any phase are discarded.
    - ``double-xpm``: the probes interfere on a 50:50 coupler first and a
      single photon-number readout keeps the n = 0 outcome.

    Both succeed with probability 1/6 at the default ``t``.  In
    ``meas_mode="physical"`` the number readout uses true vacuum overlaps,
    so phase-shifted components leak into n = 0 with weight exp(-mu^2/2),
    mu = sqrt(2) alpha sin(theta); the output fidelity then falls below one
    by the leaked weight and improves as alpha theta grows.
    """
    c = _coeffs(c)
    t = T_KERR_FORWARD if t is None else float(t)
    _check_unit_interval("t", t)
    alpha = float(qubus_alpha)
    theta = float(theta)
    _check_probe(alpha, theta)
    _check_meas_mode(meas_mode)
    if variant not in ("separate-qnd", "double-xpm"):
        raise InvalidInput(f"unknown variant {variant!r}")
    tol = 1e-9 if meas_mode == "ideal" else math.inf

    checks: dict[str, float] = {}
    if variant == "separate-qnd":
        s = _kerr_forward_routed(c, t)
        s = add_register(s, "probe-1", alpha)
        s = add_register(s, "probe-2", alpha)
        s = apply_xpm(s, XpmCoupling("probe-1", (Mode("1", H),), theta))
        s = apply_xpm(s, XpmCoupling("probe-1", (Mode("5", H), Mode("6", V)), -theta))
        s = apply_xpm(s, XpmCoupling("probe-2", (Mode("1l", V),), theta))
        s = apply_xpm(s, XpmCoupling("probe-2", (Mode("7", V),), -theta))
        log_entries = []
        for reg in ("probe-1", "probe-2"):
            dist = project_quadrature_x(s, reg, mode=meas_mode)
            kept = dist.closest(alpha)
            if abs(kept.value - alpha) > 1e-6:
                raise WiringError(
                    f"no unshifted quadrature group found for {reg}"
                )
            log_entries.append(
                BranchLogEntry(f"quadrature-{reg}", kept.label, kept.probability)
            )
            s = kept.state
        p_meas_log = tuple(log_entries)
    else:
        s = _kerr_forward_coupled(c, t, alpha, theta)
        dist = project_photon_number(s, "probe-1", mode=meas_mode, cap=number_cap)
        kept = dist.get("0")
        if kept is None or kept.probability == 0.0:
            raise WiringError("vacuum outcome of the probe readout is empty")
        checks["probe_total_probability"] = dist.total_probability
        s = kept.state
        p_meas_log = (BranchLogEntry("probe-number", "n=0", kept.probability),)

    p_det, merged, detail = _kerr_forward_postselect(s, tol)
    checks.update(detail)
    if merged.registers:
        try:
            merged = drop_register(merged, "probe-2")
        except WiringError:
            pass

    target = make_spatial_qutrit(c, ("5", "6", "7"))
    log = p_meas_log + (BranchLogEntry("pair-eraser", "dp|dm", p_det),)
    checks["output_born_weight"] = merged.born_weight
    return SchemeReport(
        scheme="kerr-forward",
        success_probability=_log_product(log),
        output_fidelity=_output_fidelity(merged, target),
        output_state=merged,
        branch_log=log,
        parameters={
            "t": t,
            "t_squared": t * t,
            "qubus_alpha": alpha,
            "theta": theta,
        },
        checks=checks,
    )


# ---------------------------------------------------------------------------
# entangling block (used standalone and inside the Kerr inverse map)


def _entangler_couplings(paths, ancilla, pattern):
    if pattern == "reflected":
        h_active = (paths[0],)
        v_active = (paths[1], paths[2])
    elif pattern == "transmitted":
        h_active = (paths[0], paths[1])
        v_active = (paths[2],)
    else:
        raise InvalidInput(f"unknown entangler pattern {pattern!r}")
    beam1 = tuple(Mode(p, V) for p in v_active) + (Mode(ancilla, H),)
    beam2 = tuple(Mode(p, H) for p in h_active) + (Mode(ancilla, V),)
    return h_active, beam1, beam2


def _entangler_reference(
    state: PhotonicState, paths, ancilla: str
) -> PhotonicState:
    """Ideal block output: ancilla polarization matching the path photon.

    Built directly from the input by keeping the matching-polarization half
    of the ancilla superposition and undoing its 1/sqrt(2) weight.
    """
    path_set = set(paths)
    terms = []
    for term in state.terms:
        qutrit_pol = None
        anc_pol = None
        for mode, n in term.occ:
            if mode.path in path_set:
                if n != 1 or qutrit_pol is not None:
                    raise WiringError(
                        "entangler input must hold exactly one photon "
                        "across the qutrit paths"
                    )
                qutrit_pol = mode.pol
            elif mode.path == ancilla:
                if n != 1 or anc_pol is not None:
                    raise WiringError(
                        "entangler ancilla must hold exactly one photon"
                    )
                anc_pol = mode.pol
        if qutrit_pol is None or anc_pol is None:
            raise WiringError("entangler input misses the photon or the ancilla")
        if anc_pol == qutrit_pol:
            terms.append(
                dataclasses.replace(
                    term, amplitude=term.amplitude * math.sqrt(2.0)
                )
            )
    return build_state(state.registers, terms, state.born_weight)


def entangler_branches(
    state: PhotonicState,
    paths,
    ancilla: str,
    pattern: str = "reflected",
    qubus_alpha: float = DEFAULT_QUBUS_ALPHA,
    theta: float = DEFAULT_THETA,
    meas_mode: str = "ideal",
    cap: int = NUMBER_CAP,
    register_prefix: str = "probe",
) -> list[tuple[int, float, PhotonicState]]:
    """All corrected outcomes of one entangling block, as (n, p, state).

    Two probe beams pick up conditional cross phases (which polarization
    couples to which beam depends on ``pattern``), interfere on a 50:50
    coupler, and the difference port is counted.  n = 0 needs no correction;
    every n > 0 is fixed by a phase of n pi on the H-coupled paths plus a
    polarization flip of the ancilla.  The undetected probe is dropped when
    its labels are uniform across every branch, otherwise kept on all.
    """
    alpha = float(qubus_alpha)
    theta = float(theta)
    _check_probe(alpha, theta)
    _check_meas_mode(meas_mode)
    h_active, beam1, beam2 = _entangler_couplings(paths, ancilla, pattern)
    reg1 = f"{register_prefix}-1"
    reg2 = f"{register_prefix}-2"

    s = add_register(state, reg1, alpha)
    s = add_register(s, reg2, alpha)
    s = apply_xpm(s, XpmCoupling(reg1, beam1, theta))
    s = apply_xpm(s, XpmCoupling(reg2, beam2, theta))
    s = coherent_phase(s, reg1, -theta)
    s = coherent_phase(s, reg2, -theta)
    s = coherent_bs50(s, reg1, reg2)
    dist = project_photon_number(s, reg1, mode=meas_mode, cap=cap)

    rule = {}
    for o in dist.outcomes:
        n = int(o.value)
        fixes: tuple[Correction, ...] = ()
        if n > 0:
            fixes = tuple(
                Correction("phase", Mode(p, H), n * math.pi) for p in h_active
            )
            fixes += (Correction("sigma_x", ancilla),)
        rule[o.label] = fixes
    dist = apply_feed_forward(dist, FeedForwardRule(rule))

    corrected = [(int(o.value), o.probability, o.state) for o in dist.outcomes]
    dropped = []
    for n, p, st in corrected:
        try:
            dropped.append((n, p, drop_register(st, reg2)))
        except WiringError:
            return corrected
    return dropped


def entangler(
    state: PhotonicState,
    paths,
    ancilla: str,
    pattern: str = "reflected",
    qubus_alpha: float = DEFAULT_QUBUS_ALPHA,
    theta: float = DEFAULT_THETA,
    meas_mode: str = "ideal",
    cap: int = NUMBER_CAP,
) -> SchemeReport:
    """Run one entangling block and merge all corrected outcomes.

    Deterministic: the branch probabilities sum to one (up to the probe
    readout's cap) and every corrected branch matches the ideal output, so
    the merged state is reported with a single full-probability log entry.
    Per-branch probabilities and fidelities land in ``checks``.
    """
    reference = _entangler_reference(state, paths, ancilla)
    branches = entangler_branches(
        state, paths, ancilla, pattern, qubus_alpha, theta, meas_mode, cap
    )
    checks: dict[str, float] = {}
    total = 0.0
    mean_fid = 0.0
    merged_input = []
    for n, p, st in branches:
        f = _output_fidelity(st, reference) if st.registers else fidelity(st, reference)
        checks[f"branch_n{n}_probability"] = p
        checks[f"branch_n{n}_fidelity"] = f
        total += p
        mean_fid += p * f
        merged_input.append((p, st))
    tol = 1e-9 if meas_mode == "ideal" else math.inf
    p_all, merged, min_fid = merge_branches(merged_input, tol=tol)
    checks["merge_min_fidelity"] = min_fid
    checks["output_born_weight"] = merged.born_weight
    log = (BranchLogEntry("probe-number", "all n merged", p_all),)
    return SchemeReport(
        scheme="entangler",
        success_probability=_log_product(log),
        output_fidelity=mean_fid / total if total > 0.0 else 0.0,
        output_state=merged,
        branch_log=log,
        parameters={"qubus_alpha": float(qubus_alpha), "theta": float(theta)},
        checks=checks,
    )


def scheme_entangler(
    c,
    pattern: str = "reflected",
    qubus_alpha: float = DEFAULT_QUBUS_ALPHA,
    theta: float = DEFAULT_THETA,
    meas_mode: str = "ideal",
    cap: int = NUMBER_CAP,
) -> SchemeReport:
    """Entangling block on a freshly prepared spatial qutrit and |+> ancilla.

    Prepares the polarization pattern the block expects: paths carrying H
    where the block couples H, V where it couples V.
    """
    c = _coeffs(c)
    paths = ("0", "1", "2")
    s = make_spatial_qutrit(c, paths)
    if pattern == "reflected":
        s = apply_sigma_x(s, "1")
        s = apply_sigma_x(s, "2")
    elif pattern == "transmitted":
        s = apply_sigma_x(s, "2")
    else:
        raise InvalidInput(f"unknown entangler pattern {pattern!r}")
    s = tensor(s, ancilla_plus("a"))
    return entangler(s, paths, "a", pattern, qubus_alpha, theta, meas_mode, cap)


# ---------------------------------------------------------------------------
# Kerr inverse map


def _attenuate_mode(
    state: PhotonicState, path: str, pol: str, tap_path: str
) -> PhotonicState:
    """Halve the amplitude of one polarization on a path, tapping the rest.

    Split the polarizations apart, pass the chosen one through a 50:50
    splitter whose second output is ``tap_path``, and recombine.  Vacuum on
    the tap heralds the attenuated component.
    """
    sh, sv = f"{path}-h", f"{path}-v"
    s = route_pbs(state, (path, None), (sh, sv))
    arm = sh if pol == H else sv
    s = apply_beam_splitter(s, arm, None, arm, tap_path, _FIFTY)
    return route_pbs(s, (sh, sv), (path, f"{path}-junk"))


_KERR_ERASER_RULES = {
    "5": (),
    "6": (("b", V),),
    "7": (("a", V),),
    "8": (("a", V), ("b", V)),
}


def _kerr_inverse_run(
    state: PhotonicState,
    paths: tuple[str, str, str],
    alpha: float,
    theta: float,
    meas_mode: str,
    cap: int,
):
    tol = 1e-9 if meas_mode == "ideal" else math.inf
    checks: dict[str, float] = {}

    s = tensor(state, ancilla_plus("a"))
    s = tensor(s, ancilla_plus("b"))
    s = apply_sigma_x(s, paths[1])
    s = apply_sigma_x(s, paths[2])
    branches = entangler_branches(
        s, paths, "a", "reflected", alpha, theta, meas_mode, cap, "ent1"
    )
    p_e1, s, fid_e1 = merge_branches([(p, st) for _, p, st in branches], tol=tol)
    checks["entangler1_merge_fidelity"] = fid_e1

    s = apply_sigma_x(s, paths[1])
    branches = entangler_branches(
        s, paths, "b", "transmitted", alpha, theta, meas_mode, cap, "ent2"
    )
    p_e2, s, fid_e2 = merge_branches([(p, st) for _, p, st in branches], tol=tol)
    checks["entangler2_merge_fidelity"] = fid_e2

    # Erase which-path information of the single photon.
    s = route_pbs(s, (paths[1], paths[2]), ("merge12", "junk12"))
    s = apply_beam_splitter(s, paths[0], "merge12", "e3", "e4", _FIFTY)
    s = route_pbs(s, ("e3", None), ("5", "6"), basis="diag")
    s = route_pbs(s, ("e4", None), ("7", "8"), basis="diag")
    eraser = []
    for fired, fixes in _KERR_ERASER_RULES.items():
        quiet = [p for p in _KERR_ERASER_RULES if p != fired]
        pattern = [(path_modes(fired), "click")]
        pattern += [(path_modes(q), "no-click") for q in quiet]
        p_b, st = post_select_coincidence(s, pattern)
        checks[f"eraser_{fired}_probability"] = p_b
        if p_b == 0.0:
            continue
        st = strip_modes(st, path_modes(fired))
        for anc, pol in fixes:
            st = apply_phase_shift(st, Mode(anc, pol), math.pi)
        eraser.append((p_b, st))
    p_eraser, s, fid_eraser = merge_branches(eraser, tol=tol)
    checks["eraser_merge_fidelity"] = fid_eraser

    # Rebalance the two-H and two-V components, then merge the ancilla pair
    # into one path, heralded by a probe that only sees the first output.
    s = _attenuate_mode(s, "a", H, "tapA")
    s = _attenuate_mode(s, "b", V, "tapB")
    p_tap, s = post_select_coincidence(
        s, [(path_modes("tapA"), "no-click"), (path_modes("tapB"), "no-click")]
    )
    s = apply_beam_splitter(s, "a", "b", "m1", "m2", _FIFTY)
    s = add_register(s, "merge-probe", alpha)
    s = apply_xpm(s, XpmCoupling("merge-probe", path_modes("m1"), theta))
    dist = project_quadrature_x(s, "merge-probe", mode="ideal")
    bunched = []
    seen = set()
    for value, out_path in ((alpha * math.cos(2.0 * theta), "m1"), (alpha, "m2")):
        kept = dist.closest(value)
        if abs(kept.value - value) > 1e-6:
            raise WiringError(
                f"no quadrature group near {value!r} for the merge probe"
            )
        if kept.label in seen:
            raise WiringError("merge-probe quadrature groups are unresolved")
        seen.add(kept.label)
        st = relabel_paths(kept.state, {out_path: "out"})
        q, st = project_total_photons(st, path_modes("out"), 2)
        checks[f"bunched_{out_path}_probability"] = kept.probability * q
        if kept.probability * q > 0.0:
            bunched.append((kept.probability * q, st))
    checks["split_discard_probability"] = dist.total_probability - sum(
        checks[f"bunched_{p}_probability"] for p in ("m1", "m2")
    )
    p_bunch, s, fid_bunch = merge_branches(bunched, tol=tol)
    checks["bunched_merge_fidelity"] = fid_bunch

    log = (
        BranchLogEntry("entangler-1", "all n merged", p_e1),
        BranchLogEntry("entangler-2", "all n merged", p_e2),
        BranchLogEntry("path-eraser", "5|6|7|8", p_eraser),
        BranchLogEntry("rebalance-taps", "vacuum", p_tap),
        BranchLogEntry("bunched-merge", "m1|m2", p_bunch),
    )
    return log, s, checks


def scheme_kerr_inverse(
    c,
    qubus_alpha: float = DEFAULT_QUBUS_ALPHA,
    theta: float = DEFAULT_THETA,
    meas_mode: str = "ideal",
    number_cap: int = NUMBER_CAP,
) -> SchemeReport:
    """Convert a spatial qutrit to the two-photon encoding via two
    entangling blocks.

    The blocks copy the path information onto two ancilla photons, a
    four-port eraser removes the original photon, tapped attenuators
    rebalance the outer components, and a probe-heralded 50:50 merge bunches
    the ancilla pair onto path ``out``.  Succeeds with probability 1/2.
    """
    c = _coeffs(c)
    alpha = float(qubus_alpha)
    theta = float(theta)
    _check_probe(alpha, theta)
    if alpha * (math.cos(theta) - math.cos(2.0 * theta)) < _PHASE_RESOLUTION:
        raise InvalidInput(
            "qubus amplitude cannot resolve the merge-probe groups"
        )
    _check_meas_mode(meas_mode)

    paths = ("s0", "s1", "s2")
    state = make_spatial_qutrit(c, paths)
    log, s, checks = _kerr_inverse_run(state, paths, alpha, theta, meas_mode, number_cap)
    target = make_biphotonic_qutrit(c, "out")
    checks["output_born_weight"] = s.born_weight
    return SchemeReport(
        scheme="kerr-inverse",
        success_probability=_log_product(log),
        output_fidelity=_output_fidelity(s, target),
        output_state=s,
        branch_log=log,
        parameters={"qubus_alpha": alpha, "theta": theta},
        checks=checks,
    )


# ---------------------------------------------------------------------------
# arbitrary unitary on the two-photon encoding


def u3_biphotonic(
    c,
    u,
    backend: str = "linear",
    t: float | None = None,
    t1: float | None = None,
    t2: float | None = None,
    t3: float | None = None,
    qubus_alpha: float = DEFAULT_QUBUS_ALPHA,
    theta: float = DEFAULT_THETA,
    meas_mode: str = "ideal",
    number_cap: int = NUMBER_CAP,
) -> SchemeReport:
    """Apply a 3x3 unitary to a two-photon qutrit by round-tripping through
    the spatial encoding.

    The forward map produces a single photon over three paths, a triangular
    mesh of two-path rotations realizes ``u`` on those paths, and the
    matching inverse map restores the two-photon encoding on path ``out``.
    ``backend`` picks the linear-optics pair (success 1.17e-4) or the
    probe-based pair (success 1/12).
    """
    c = _coeffs(c)
    u = np.asarray(u, dtype=complex)
    if u.shape != (3, 3):
        raise InvalidInput(f"expected a 3x3 matrix, got shape {u.shape}")
    assert_unitary(u)
    if backend not in ("linear", "kerr"):
        raise InvalidInput(f"unknown backend {backend!r}")

    spatial = ("s0", "s1", "s2")
    if backend == "linear":
        fwd = scheme_linear_forward(c, t)
        s = relabel_paths(fwd.output_state, {"6": "s0", "3": "s1", "7": "s2"})
    else:
        fwd = scheme_kerr_forward(
            c,
            t,
            variant="double-xpm",
            meas_mode=meas_mode,
            qubus_alpha=qubus_alpha,
            theta=theta,
            number_cap=number_cap,
        )
        s = relabel_paths(fwd.output_state, {"5": "s0", "6": "s1", "7": "s2"})

    s = apply_lomi(s, reck_decompose(u), spatial)

    checks = {f"forward_{k}": v for k, v in fwd.checks.items()}
    checks["forward_fidelity"] = fwd.output_fidelity
    if backend == "linear":
        defaults = default_linear_inverse_params()
        t1 = defaults["t1"] if t1 is None else float(t1)
        t2 = defaults["t2"] if t2 is None else float(t2)
        t3 = defaults["t3"] if t3 is None else float(t3)
        _, inv_log, s = _linear_inverse_run(s, spatial, t1, t2, t3)
        parameters = {"t": fwd.parameters["t"], "t1": t1, "t2": t2, "t3": t3}
    else:
        inv_log, s, inv_checks = _kerr_inverse_run(
            s, spatial, float(qubus_alpha), float(theta), meas_mode, number_cap
        )
        checks.update({f"inverse_{k}": v for k, v in inv_checks.items()})
        parameters = {
            "t": fwd.parameters["t"],
            "qubus_alpha": float(qubus_alpha),
            "theta": float(theta),
        }

    vec = u @ np.array(c.as_tuple())
    target = make_biphotonic_qutrit(QutritCoefficients.normalize(*vec), "out")
    log = fwd.branch_log + tuple(inv_log)
    checks["output_born_weight"] = s.born_weight
    return SchemeReport(
        scheme=f"u3-{backend}",
        success_probability=_log_product(log),
        output_fidelity=_output_fidelity(s, target),
        output_state=s,
        branch_log=log,
        parameters=parameters,
        checks=checks,
    )
