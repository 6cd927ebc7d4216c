"""Detection, post-selection, stripping and branch-merge behaviour."""

import math

import pytest

from qutritmap.elements import BeamSplitterSpec, apply_beam_splitter, apply_phase_shift
from qutritmap.fock import (
    FockTerm,
    InvalidInput,
    Mode,
    QutritCoefficients,
    WiringError,
    build_state,
    fidelity,
    make_spatial_qutrit,
    norm_sq,
    single_photon,
    tensor,
)
from qutritmap.measurement import (
    Correction,
    FeedForwardRule,
    apply_feed_forward,
    detect_non_resolving,
    merge_branches,
    path_modes,
    post_select_coincidence,
    project_total_photons,
    strip_modes,
)


def two_branch_state():
    r = 1 / math.sqrt(2)
    return build_state(
        (),
        [
            FockTerm.from_occupations({Mode("d", "H"): 1, Mode("a", "H"): 1}, (), r),
            FockTerm.from_occupations({Mode("b", "H"): 1}, (), r),
        ],
    )


def test_detect_non_resolving_splits_branches():
    dist = detect_non_resolving(two_branch_state(), path_modes("d"))
    click = dist.get("click")
    quiet = dist.get("no-click")
    assert click.probability == pytest.approx(0.5)
    assert quiet.probability == pytest.approx(0.5)
    assert norm_sq(click.state) == pytest.approx(1.0)
    assert click.state.born_weight == pytest.approx(0.5)
    assert quiet.state.terms[0].occ == (((Mode("b", "H")), 1),)
    assert dist.total_probability == pytest.approx(1.0)


def test_post_select_coincidence_on_hom_output():
    s = tensor(single_photon("a"), single_photon("b"))
    out = apply_beam_splitter(s, "a", "b", "c", "d", BeamSplitterSpec.fifty_fifty())
    p_cc, state_cc = post_select_coincidence(
        out, [(path_modes("c"), "click"), (path_modes("d"), "click")]
    )
    assert p_cc == 0.0
    assert state_cc.terms == ()
    assert state_cc.born_weight == 0.0
    p_c, state_c = post_select_coincidence(
        out, [(path_modes("c"), "click"), (path_modes("d"), "no-click")]
    )
    assert p_c == pytest.approx(0.5)
    assert norm_sq(state_c) == pytest.approx(1.0)


def test_post_select_rejects_overlapping_groups():
    with pytest.raises(WiringError):
        post_select_coincidence(
            two_branch_state(),
            [(path_modes("d"), "click"), ((Mode("d", "H"),), "no-click")],
        )


def test_project_total_photons():
    s = two_branch_state()
    p1, kept = project_total_photons(s, path_modes("d") + path_modes("a"), 2)
    assert p1 == pytest.approx(0.5)
    assert kept.terms[0].total_photons == 2
    p0, _ = project_total_photons(s, path_modes("d") + path_modes("a"), 1)
    assert p0 == 0.0


def test_strip_modes_product_state():
    c = QutritCoefficients.normalize(1.0, -2.0j, 0.5)
    q = make_spatial_qutrit(c, ("x", "y", "z"))
    from qutritmap.fock import ancilla_plus

    s = tensor(ancilla_plus("det"), q)
    stripped = strip_modes(s, path_modes("det"))
    assert fidelity(stripped, q) == pytest.approx(1.0)
    assert norm_sq(stripped) == pytest.approx(norm_sq(s))


def test_strip_modes_with_minus_polarized_detector():
    # detector factor (H - V)/sqrt2: the sign must fold into the kept factor
    r = 1 / math.sqrt(2)
    terms = []
    for sign, pol in ((1.0, "H"), (-1.0, "V")):
        terms.append(
            FockTerm.from_occupations(
                {Mode("det", pol): 1, Mode("a", "H"): 1}, (), sign * r * 0.6
            )
        )
        terms.append(
            FockTerm.from_occupations(
                {Mode("det", pol): 1, Mode("b", "H"): 1}, (), sign * r * 0.8
            )
        )
    s = build_state((), terms)
    stripped = strip_modes(s, path_modes("det"))
    want = build_state(
        (),
        [
            FockTerm.from_occupations({Mode("a", "H"): 1}, (), 0.6),
            FockTerm.from_occupations({Mode("b", "H"): 1}, (), 0.8),
        ],
    )
    assert fidelity(stripped, want) == pytest.approx(1.0)
    assert norm_sq(stripped) == pytest.approx(1.0)


def test_strip_modes_refuses_entangled_detector():
    r = 1 / math.sqrt(2)
    s = build_state(
        (),
        [
            FockTerm.from_occupations({Mode("det", "H"): 1, Mode("a", "H"): 1}, (), r),
            FockTerm.from_occupations({Mode("det", "V"): 1, Mode("b", "H"): 1}, (), r),
        ],
    )
    with pytest.raises(WiringError):
        strip_modes(s, path_modes("det"))


def test_feed_forward_applies_and_checks_labels():
    dist = detect_non_resolving(two_branch_state(), path_modes("d"))
    rule = FeedForwardRule(
        {
            "click": (Correction("phase", "a", math.pi),),
            "no-click": (),
        }
    )
    fixed = apply_feed_forward(dist, rule)
    before = dist.get("click").state.terms[0].amplitude
    after = fixed.get("click").state.terms[0].amplitude
    assert after == pytest.approx(-before)
    assert fixed.get("no-click").state == dist.get("no-click").state
    with pytest.raises(WiringError):
        apply_feed_forward(dist, FeedForwardRule({"click": ()}))


def test_feed_forward_sigma_x_correction():
    s = single_photon("a", "V")
    dist = detect_non_resolving(tensor(s, single_photon("d")), path_modes("d"))
    rule = FeedForwardRule({"click": (Correction("sigma_x", "a"),)})
    fixed = apply_feed_forward(dist, rule)
    occ = fixed.get("click").state.terms[0].occupations()
    assert occ[Mode("a", "H")] == 1
    assert occ[Mode("d", "H")] == 1


def test_merge_branches_sums_probabilities():
    s = single_photon("a")
    rotated = apply_phase_shift(s, "a", 1.234)  # same ray, different phase
    total, merged, min_fid = merge_branches([(0.25, s), (0.25, rotated)])
    assert total == pytest.approx(0.5)
    assert min_fid == pytest.approx(1.0)
    assert fidelity(merged, s) == pytest.approx(1.0)


def test_merge_branches_rejects_disagreement():
    with pytest.raises(WiringError):
        merge_branches([(0.5, single_photon("a")), (0.5, single_photon("a", "V"))])


def test_merge_branches_rejects_all_zero():
    with pytest.raises(InvalidInput):
        merge_branches([(0.0, single_photon("a"))])
