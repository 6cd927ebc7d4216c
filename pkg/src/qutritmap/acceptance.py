"""Executable acceptance suite: every headline claim re-measured.

Each criterion runs the shipped circuits (never closed-form shortcuts) and
compares against its pinned target and tolerance.  ``run_all`` returns one
:class:`CriterionResult` per criterion; the CLI ``verify`` command renders
them and sets the exit code.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .fock import (
    H,
    FockTerm,
    Mode,
    POLS,
    amplitude_of,
    build_state,
    make_biphotonic_qutrit,
    norm_sq,
    normalized,
    single_photon,
    tensor,
)
from .elements import (
    BeamSplitterSpec,
    apply_beam_splitter,
    apply_lomi,
    apply_phase_shift,
    apply_qft,
    apply_sigma_x,
    reck_decompose,
    route_pbs,
)
from .measurement import detect_non_resolving, path_modes
from .qubus import add_register, project_photon_number
from .sampling import haar_unitary, random_qutrit
from .schemes import (
    P_KERR_FORWARD,
    P_KERR_INVERSE,
    P_LINEAR_FORWARD,
    P_LINEAR_INVERSE,
    scheme_entangler,
    scheme_kerr_forward,
    scheme_kerr_inverse,
    scheme_linear_forward,
    scheme_linear_inverse,
    u3_biphotonic,
)

ROUNDED_P_LINEAR_FORWARD = 1.71e-2
ROUNDED_P_LINEAR_INVERSE = 6.85e-3
ROUNDED_P_U3_LINEAR = 1.17e-4


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    expected: str
    measured: str
    details: tuple[str, ...] = field(default=())


def _criterion_1(seed) -> CriterionResult:
    rng = np.random.default_rng([seed, 1])
    start = time.perf_counter()
    worst_rel = 0.0
    worst_fid = 1.0
    for _ in range(50):
        r = scheme_linear_forward(random_qutrit(rng))
        worst_rel = max(
            worst_rel,
            abs(r.success_probability - ROUNDED_P_LINEAR_FORWARD)
            / ROUNDED_P_LINEAR_FORWARD,
        )
        worst_fid = min(worst_fid, r.output_fidelity)
    elapsed = time.perf_counter() - start
    passed = worst_rel <= 0.02 and worst_fid >= 1 - 1e-10 and elapsed < 1.0
    return CriterionResult(
        1,
        "linear forward map",
        passed,
        f"P within 2% of {ROUNDED_P_LINEAR_FORWARD} (exact {P_LINEAR_FORWARD:.9g}), "
        "fidelity 1 within 1e-10, 50 random inputs, < 1 s",
        f"max rel. P error {worst_rel:.3e}, min fidelity {worst_fid:.12f}, "
        f"{elapsed:.2f} s",
    )


def _criterion_2(seed) -> CriterionResult:
    rng = np.random.default_rng([seed, 2])
    worst_rel = 0.0
    worst_fid = 1.0
    d2_p = d2_f = float("nan")
    for _ in range(10):
        r = scheme_linear_inverse(random_qutrit(rng))
        worst_rel = max(
            worst_rel,
            abs(r.success_probability - ROUNDED_P_LINEAR_INVERSE)
            / ROUNDED_P_LINEAR_INVERSE,
        )
        worst_fid = min(worst_fid, r.output_fidelity)
        d2_p = r.checks.get("discarded_d2_probability", float("nan"))
        d2_f = r.checks.get("discarded_d2_fidelity", float("nan"))
    passed = worst_rel <= 0.02 and worst_fid >= 1 - 1e-10
    return CriterionResult(
        2,
        "linear inverse map",
        passed,
        f"P within 2% of {ROUNDED_P_LINEAR_INVERSE} (exact {P_LINEAR_INVERSE:.9g}), "
        "fidelity 1 within 1e-10",
        f"max rel. P error {worst_rel:.3e}, min fidelity {worst_fid:.12f}",
        details=(
            "second eraser outcome (discarded): "
            f"p = {d2_p:.9g}, fidelity = {d2_f:.9g}",
        ),
    )


def _criterion_3(seed) -> CriterionResult:
    rng = np.random.default_rng([seed, 3])
    worst_rel = 0.0
    worst_fid = 1.0
    for _ in range(50):
        c = random_qutrit(rng)
        u = haar_unitary(rng)
        r = u3_biphotonic(c, u, backend="linear")
        worst_rel = max(
            worst_rel,
            abs(r.success_probability - ROUNDED_P_U3_LINEAR) / ROUNDED_P_U3_LINEAR,
        )
        worst_fid = min(worst_fid, r.output_fidelity)
    passed = worst_rel <= 0.02 and worst_fid >= 1 - 1e-9
    return CriterionResult(
        3,
        "end-to-end linear U(3)",
        passed,
        f"P within 2% of {ROUNDED_P_U3_LINEAR}, fidelity 1 within 1e-9, "
        "50 Haar pairs",
        f"max rel. P error {worst_rel:.3e}, min fidelity {worst_fid:.12f}",
    )


def _criterion_4(seed) -> CriterionResult:
    from .fock import fidelity

    rng = np.random.default_rng([seed, 4])
    worst_p = 0.0
    worst_fid = 1.0
    worst_cross = 1.0
    for _ in range(10):
        c = random_qutrit(rng)
        ra = scheme_kerr_forward(c, variant="separate-qnd")
        rb = scheme_kerr_forward(c, variant="double-xpm")
        worst_p = max(
            worst_p,
            abs(ra.success_probability - P_KERR_FORWARD),
            abs(rb.success_probability - P_KERR_FORWARD),
        )
        worst_fid = min(worst_fid, ra.output_fidelity, rb.output_fidelity)
        worst_cross = min(worst_cross, fidelity(ra.output_state, rb.output_state))
    passed = worst_p <= 1e-10 and worst_fid >= 1 - 1e-10 and worst_cross >= 1 - 1e-10
    return CriterionResult(
        4,
        "Kerr forward map, both variants",
        passed,
        "P = 1/6 within 1e-10, variants identical (fidelity 1 within 1e-10)",
        f"max |P - 1/6| = {worst_p:.3e}, min fidelity {worst_fid:.12f}, "
        f"min cross fidelity {worst_cross:.12f}",
    )


def _criterion_5(seed) -> CriterionResult:
    rng = np.random.default_rng([seed, 5])
    worst_rel = 0.0
    worst_fid = 1.0
    determinism = 1.0
    for _ in range(10):
        c = random_qutrit(rng)
        r = scheme_kerr_inverse(c)
        worst_rel = max(
            worst_rel, abs(r.success_probability - P_KERR_INVERSE) / P_KERR_INVERSE
        )
        worst_fid = min(worst_fid, r.output_fidelity)
    ent = scheme_entangler(
        random_qutrit(rng), qubus_alpha=2.0, theta=0.3, cap=25
    )
    mass = 0.0
    for k, p in ent.checks.items():
        if k.startswith("branch_n") and k.endswith("_probability"):
            f = ent.checks[k.replace("_probability", "_fidelity")]
            if f > 1 - 1e-9:
                mass += p
    determinism = mass
    passed = worst_rel <= 0.02 and determinism >= 1 - 1e-6 and worst_fid >= 1 - 1e-10
    return CriterionResult(
        5,
        "Kerr inverse map and entangler determinism",
        passed,
        "P = 1/2 within 2%; sum_n p(n) over perfectly corrected outcomes "
        ">= 1 - 1e-6 at |alpha| = 2, theta = 0.3, cap 25",
        f"max rel. P error {worst_rel:.3e}, min fidelity {worst_fid:.12f}, "
        f"corrected-outcome mass {determinism:.9f}",
    )


def _criterion_6(seed) -> CriterionResult:
    rng = np.random.default_rng([seed, 6])
    target = P_KERR_FORWARD * P_KERR_INVERSE
    worst_rel = 0.0
    worst_fid = 1.0
    for _ in range(50):
        c = random_qutrit(rng)
        u = haar_unitary(rng)
        r = u3_biphotonic(c, u, backend="kerr")
        worst_rel = max(worst_rel, abs(r.success_probability - target) / target)
        worst_fid = min(worst_fid, r.output_fidelity)
    passed = worst_rel <= 0.02 and worst_fid >= 1 - 1e-9
    return CriterionResult(
        6,
        "end-to-end Kerr U(3)",
        passed,
        "P = 1/12 within 2%, fidelity 1 within 1e-9, 50 random pairs",
        f"max rel. P error {worst_rel:.3e}, min fidelity {worst_fid:.12f}",
    )


def _random_small_state(rng):
    paths = ("p0", "p1", "p2")
    while True:
        terms = []
        for _ in range(int(rng.integers(1, 4))):
            occ = {}
            for _ in range(int(rng.integers(1, 3))):
                m = Mode(paths[int(rng.integers(0, 3))], POLS[int(rng.integers(0, 2))])
                occ[m] = occ.get(m, 0) + 1
            terms.append(
                FockTerm.from_occupations(
                    occ, (), complex(rng.normal(), rng.normal())
                )
            )
        s = build_state((), terms)
        if norm_sq(s) > 1e-6:
            return s


def _apply_random_element(s, rng):
    kind = int(rng.integers(0, 5))
    if kind == 0:
        t = math.sqrt(float(rng.uniform(0.05, 0.95)))
        return apply_beam_splitter(s, "p0", "p1", "p0", "p1", BeamSplitterSpec.from_t(t))
    if kind == 1:
        return apply_phase_shift(s, f"p{int(rng.integers(0, 3))}", float(rng.uniform(0, 2 * math.pi)))
    if kind == 2:
        return apply_sigma_x(s, f"p{int(rng.integers(0, 3))}")
    if kind == 3:
        basis = "HV" if rng.integers(0, 2) == 0 else "diag"
        return route_pbs(s, ("p0", "p1"), ("q0", "q1"), basis=basis)
    return apply_qft(s, ("p0", "p1", "p2"))


def _criterion_7(seed) -> CriterionResult:
    details = []
    ok = True

    # two indistinguishable photons on a 50:50 splitter never coincide
    s = tensor(single_photon("a"), single_photon("b"))
    s = apply_beam_splitter(s, "a", "b", "c", "d", BeamSplitterSpec.fifty_fifty())
    hom = amplitude_of(s, {Mode("c", H): 1, Mode("d", H): 1})
    ok &= hom == 0j
    details.append(f"two-photon coincidence amplitude = {hom}")

    rng = np.random.default_rng([seed, 7])
    worst_norm = 0.0
    for _ in range(1000):
        s = _random_small_state(rng)
        before = norm_sq(s)
        after = norm_sq(_apply_random_element(s, rng))
        worst_norm = max(worst_norm, abs(after - before) / before)
    ok &= worst_norm <= 1e-12
    details.append(f"max norm drift over 1000 element applications = {worst_norm:.3e}")

    worst_eraser = 1.0
    worst_spread = 0.0
    for _ in range(5):
        r = scheme_linear_forward(random_qutrit(rng))
        worst_eraser = min(
            worst_eraser, r.checks["eraser_min_branch_fidelity"], r.output_fidelity
        )
        ps = [r.checks[f"eraser_{k}_probability"] for k in ("D3", "D4", "D5")]
        worst_spread = max(worst_spread, max(ps) - min(ps))
    ok &= worst_eraser >= 1 - 1e-10 and worst_spread <= 1e-12
    details.append(
        "corrected eraser outcomes: min fidelity "
        f"{worst_eraser:.12f}, max probability spread {worst_spread:.3e}"
    )

    worst_total = 0.0
    for _ in range(200):
        s = normalized(_random_small_state(rng))
        modes = path_modes("p0") + path_modes("p1") + path_modes("p2")
        dist = detect_non_resolving(s, modes)
        worst_total = max(worst_total, abs(dist.total_probability - 1))
    for label in (0.6, 1.3):
        s = add_register(single_photon("a"), "r", label)
        for mode in ("ideal", "physical"):
            dist = project_photon_number(s, "r", mode=mode)
            worst_total = max(worst_total, abs(dist.total_probability - 1))
    ok &= worst_total <= 1e-10
    details.append(f"max measurement completeness defect = {worst_total:.3e}")

    paths = ("r0", "r1", "r2")
    worst_reck = 0.0
    for _ in range(100):
        u = haar_unitary(rng)
        dec = reck_decompose(u)
        cols = []
        for j in range(3):
            out = apply_lomi(single_photon(paths[j]), dec, paths)
            cols.append([amplitude_of(out, {Mode(p, H): 1}) for p in paths])
        rebuilt = np.array(cols).T
        worst_reck = max(worst_reck, float(np.max(np.abs(rebuilt - u))))
    ok &= worst_reck < 1e-10
    details.append(f"max mesh recomposition error over 100 Haar samples = {worst_reck:.3e}")

    return CriterionResult(
        7,
        "property suites",
        bool(ok),
        "coincidence exactly 0; norm drift <= 1e-12 (1000 circuits); corrected "
        "eraser outcomes equivalent (fidelity 1); measurement completeness "
        "within 1e-10; mesh recomposition < 1e-10 (100 Haar)",
        "all sub-checks listed below",
        details=tuple(details),
    )


def _criterion_8(seed) -> CriterionResult:
    rng = np.random.default_rng([seed, 8])
    c = random_qutrit(rng)
    theta = 0.1
    rows = []
    for alpha_theta in (0.5, 1.0, 2.0, 4.0):
        r = scheme_kerr_forward(
            c,
            meas_mode="physical",
            qubus_alpha=alpha_theta / theta,
            theta=theta,
        )
        rows.append(
            (
                alpha_theta,
                1 - r.output_fidelity,
                r.success_probability - P_KERR_FORWARD,
            )
        )
    leaks = [row[1] for row in rows]
    excesses = [row[2] for row in rows]
    decreasing = all(a > b for a, b in zip(leaks, leaks[1:]))
    converging = all(a > b for a, b in zip(excesses, excesses[1:]))
    passed = decreasing and converging and excesses[-1] < 1e-6
    details = tuple(
        f"|alpha| theta = {at:g}: leakage = {lk:.6e}, P - 1/6 = {ex:.6e}"
        for at, lk, ex in rows
    )
    return CriterionResult(
        8,
        "physical-mode convergence",
        passed,
        "leakage strictly decreases over |alpha| theta in {0.5, 1, 2, 4} "
        "and P approaches 1/6",
        f"leakage sequence {', '.join(f'{x:.3e}' for x in leaks)}",
        details=details,
    )


def run_all(seed: int = 2028) -> list[CriterionResult]:
    """Run all acceptance criteria with reproducible sub-seeds."""
    return [
        _criterion_1(seed),
        _criterion_2(seed),
        _criterion_3(seed),
        _criterion_4(seed),
        _criterion_5(seed),
        _criterion_6(seed),
        _criterion_7(seed),
        _criterion_8(seed),
    ]
