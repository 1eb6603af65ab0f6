"""Fixed points, stability classes, bifurcation loci, decay audit."""
import math

import numpy as np
import pytest

from thomaslab import (
    BifKind,
    DomainError,
    StabilityClass,
    all_bifurcations,
    circulant_eigenvalues,
    classify,
    find_fixed_points,
    hopf_points,
    lyapunov_function_check,
    pitchfork_estimate,
    saddle_node_points,
)

from oracles import dense_scan_roots

# root sets of sin(x) = b x computed with 50-digit bisection, rounded once
ROOTS_B0128 = (2.7780473405862447, 7.6490963805764798, 7.8019113004539436)
ROOTS_B007 = (2.9346912436795952, 6.7774956918222826, 8.7642922847462984,
              13.906127658281724, 14.227485911190375)
ROOTS_B01198 = (2.7995745097232463, 7.3636173497982337, 8.0986484574392106)
ROOT_B09 = 0.786683072049212

# (x*, b) pairs solving sin x + (x/2) cos x = 0 with cos x < 0, b = -cos(x)/2
HOPF_FROZEN = (
    (2.2889297281033967, 0.3289901022427388),
    (8.0961636032229248, 0.1199107442433364),
    (14.2763529183365, 0.0693685050425255),
    (20.5175229099417, 0.0485089086635518),
)

# (x*, b) pairs solving tan x = x with sin x > 0, b = sin(x)/x
SN_FROZEN = (
    (7.7252518369377068, 0.1283745535258986),
    (14.0661939128315, 0.0709134594504622),
)

EXPECTED_COUNTS = {1.2: 1, 0.9: 3, 0.33: 3, 0.128: 7, 0.07: 11}


def positive_roots(b):
    return [e.x_star for e in find_fixed_points(b) if e.x_star > 0.0]


def test_root_counts_match_dense_scan():
    for b, want in EXPECTED_COUNTS.items():
        eqs = find_fixed_points(b)
        oracle = dense_scan_roots(b, x_max=max(math.pi, 1.2 / b))
        assert len(eqs) == want == oracle.size


def test_root_values_match_dense_scan():
    for b in (0.9, 0.33, 0.128, 0.07):
        ours = np.array([e.x_star for e in find_fixed_points(b)])
        oracle = dense_scan_roots(b, x_max=max(math.pi, 1.2 / b))
        assert ours.size == oracle.size
        assert np.max(np.abs(np.sort(ours) - oracle)) < 1e-9


def test_frozen_root_values():
    assert positive_roots(0.128) == pytest.approx(ROOTS_B0128, abs=1e-10)
    assert positive_roots(0.07) == pytest.approx(ROOTS_B007, abs=1e-10)
    assert positive_roots(0.1198) == pytest.approx(ROOTS_B01198, abs=1e-10)
    assert positive_roots(0.9) == pytest.approx([ROOT_B09], abs=1e-10)


def test_root_set_is_odd_and_contains_origin():
    for b in (0.9, 0.128, 0.07):
        xs = np.array([e.x_star for e in find_fixed_points(b)])
        assert 0.0 in xs
        assert np.max(np.abs(np.sort(xs) + np.sort(xs)[::-1])) < 1e-12


def test_residuals_within_bound():
    rng = np.random.default_rng(21)
    for b in rng.uniform(0.05, 1.5, size=12):
        for e in find_fixed_points(float(b)):
            assert abs(e.residual) <= 1e-12 * max(1.0, abs(e.x_star))
            assert abs(math.sin(e.x_star) - b * e.x_star) <= 1e-11


def test_root_count_never_increases_with_b():
    counts = [len(find_fixed_points(float(b), x_max=40.0))
              for b in np.linspace(0.035, 1.5, 40)]
    assert all(c2 <= c1 for c1, c2 in zip(counts, counts[1:]))


def test_find_fixed_points_validation():
    with pytest.raises(DomainError):
        find_fixed_points(0.0)
    with pytest.raises(DomainError):
        find_fixed_points(0.5, scan_step=0.0)
    with pytest.raises(DomainError):
        find_fixed_points(0.5, x_max=1.0)


def test_classification_known_cases():
    # origin above/below the b = 1 threshold
    assert classify(0.0, 2.0).klass is StabilityClass.STABLE_SPIRAL
    assert classify(0.0, 0.9).klass is StabilityClass.SADDLE_FOCUS
    assert classify(0.0, 1.0).klass is StabilityClass.MARGINAL
    # the three positive branches at b = 0.128
    kinds = [classify(x, 0.128).klass for x in ROOTS_B0128]
    assert kinds == [StabilityClass.UNSTABLE_SPIRAL,
                     StabilityClass.SADDLE_FOCUS,
                     StabilityClass.STABLE_SPIRAL]
    # reflection partner gets the same class
    assert classify(-ROOTS_B0128[0], 0.128).klass is kinds[0]


def test_stable_node_when_cosine_vanishes():
    # x* = pi/2 is a root for b = 2/pi and cos(x*) is zero to rounding,
    # so the pair collapses onto the real axis
    e = classify(math.pi / 2.0, 2.0 / math.pi)
    assert e.klass is StabilityClass.STABLE_NODE
    assert abs(e.eigen.pair_im) < 1e-9


def test_classification_flips_across_hopf_locus():
    x_hopf, b_hopf = HOPF_FROZEN[0]
    lo = [e for e in find_fixed_points(b_hopf - 1e-3) if abs(e.x_star - x_hopf) < 0.1]
    hi = [e for e in find_fixed_points(b_hopf + 1e-3) if abs(e.x_star - x_hopf) < 0.1]
    assert lo[0].klass is StabilityClass.UNSTABLE_SPIRAL
    assert hi[0].klass is StabilityClass.STABLE_SPIRAL
    at = classify(x_hopf, -math.cos(x_hopf) / 2.0)
    assert at.klass is StabilityClass.MARGINAL


def test_classify_rejects_non_roots():
    with pytest.raises(DomainError):
        classify(1.0, 0.5)
    with pytest.raises(DomainError):
        classify(0.0, -0.2)


def test_classify_matches_circulant_eigenvalues():
    for x in ROOTS_B007:
        e = classify(x, 0.07)
        assert e.eigen == circulant_eigenvalues(math.cos(x), 0.07)
        assert e.c == math.cos(x)


def test_hopf_points_frozen_values():
    events = hopf_points(n_max=4)
    assert len(events) == 4
    assert all(ev.kind is BifKind.HOPF for ev in events)
    bs = [ev.b_critical for ev in events]
    assert bs == sorted(bs, reverse=True)
    for ev, (x_ref, b_ref) in zip(events, HOPF_FROZEN):
        assert ev.x_star == pytest.approx(x_ref, abs=1e-9)
        assert ev.b_critical == pytest.approx(b_ref, abs=1e-9)
        # defining relations hold to near machine precision
        assert abs(math.sin(ev.x_star) + 0.5 * ev.x_star * math.cos(ev.x_star)) < 1e-10
        assert ev.b_critical == pytest.approx(-math.cos(ev.x_star) / 2.0, abs=1e-12)
        assert math.cos(ev.x_star) < 0.0


def test_hopf_pair_real_part_changes_sign():
    x_c, b_c = HOPF_FROZEN[1]
    c = math.cos(x_c)
    assert circulant_eigenvalues(c, b_c + 1e-4).pair_re < 0.0
    assert circulant_eigenvalues(c, b_c - 1e-4).pair_re > 0.0
    assert abs(circulant_eigenvalues(c, b_c).pair_re) < 1e-12


def test_saddle_node_points_frozen_values():
    events = saddle_node_points(n_max=2)
    assert len(events) >= 2
    assert all(ev.kind is BifKind.DOUBLE_SADDLE_NODE for ev in events)
    for ev, (x_ref, b_ref) in zip(events, SN_FROZEN):
        assert ev.x_star == pytest.approx(x_ref, abs=1e-9)
        assert ev.b_critical == pytest.approx(b_ref, abs=1e-9)
    for ev in events:
        assert abs(math.tan(ev.x_star) - ev.x_star) < 1e-8
        assert math.sin(ev.x_star) > 0.0
        assert 0.0 < ev.b_critical < 1.0


def test_saddle_node_changes_root_count_by_four():
    b_c = SN_FROZEN[0][1]
    below = len(find_fixed_points(b_c - 2e-3))
    above = len(find_fixed_points(b_c + 2e-3))
    assert below - above == 4


def test_tangency_detected_at_critical_damping():
    b_c = SN_FROZEN[0][1]
    eqs = find_fixed_points(b_c)
    near = [e for e in eqs if abs(e.x_star - SN_FROZEN[0][0]) < 1e-4]
    assert len(near) == 1
    assert near[0].klass is StabilityClass.MARGINAL
    assert len(eqs) == 5


def test_all_bifurcations_sorted_with_pitchfork_first():
    events = all_bifurcations(n_max=2)
    assert events[0].kind is BifKind.PITCHFORK
    assert events[0].b_critical == 1.0
    assert events[0].x_star == 0.0
    bs = [ev.b_critical for ev in events]
    assert bs == sorted(bs, reverse=True)
    kinds = {ev.kind for ev in events}
    assert kinds == {BifKind.PITCHFORK, BifKind.HOPF, BifKind.DOUBLE_SADDLE_NODE}


def test_pitchfork_estimate_near_onset():
    for b in (0.99, 0.95, 0.9):
        est = pitchfork_estimate(b)
        root = max(e.x_star for e in find_fixed_points(b))
        assert est == pytest.approx(math.sqrt(6.0 * (1.0 - b)), abs=1e-12)
        assert abs(est - root) / root < 0.05
    with pytest.raises(DomainError):
        pitchfork_estimate(1.0)


def test_decay_audit_clean_above_threshold():
    audit = lyapunov_function_check(1.2, n_samples=20000, rng_seed=3)
    assert audit.violations == 0
    assert audit.n_samples == 20000
    # the drift margin is bounded below by b - 1 pointwise
    assert audit.min_margin >= 0.2 - 1e-9
    assert len(audit.worst_point) == 3


def test_decay_audit_margin_grows_with_b():
    a2 = lyapunov_function_check(2.0, n_samples=20000, rng_seed=3)
    assert a2.min_margin >= 1.0 - 1e-9


def test_decay_audit_flags_subcritical_damping():
    audit = lyapunov_function_check(0.5, n_samples=20000, rng_seed=3)
    assert audit.violations > 0


def test_decay_audit_deterministic_in_seed():
    a = lyapunov_function_check(1.2, n_samples=5000, rng_seed=11)
    b = lyapunov_function_check(1.2, n_samples=5000, rng_seed=11)
    assert a.min_margin == b.min_margin
    assert np.array_equal(a.worst_point, b.worst_point)


def test_decay_audit_validation():
    with pytest.raises(DomainError):
        lyapunov_function_check(0.5, n_samples=0)
    with pytest.raises(DomainError):
        lyapunov_function_check(0.5, box_half_width=0.0)
    with pytest.raises(DomainError):
        lyapunov_function_check(-0.1)
