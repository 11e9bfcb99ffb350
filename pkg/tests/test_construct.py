import numpy as np
import pytest

from cel.construct import (BitChannelProfile, CodeFamily, build_polar,
                           build_reed_muller_like, kronecker_power,
                           polar_z_profile, sample_random_full_rank)
from cel.erasure import sc_erasure_indicators
from cel.gf2 import Gf2Matrix, rank
from helpers import kron_f_power


def test_code_family_validation():
    CodeFamily("mds")
    CodeFamily("polar", design_epsilon=0.1)
    with pytest.raises(ValueError):
        CodeFamily("hamming")
    with pytest.raises(ValueError):
        CodeFamily("polar")
    with pytest.raises(ValueError):
        CodeFamily("polar", design_epsilon=1.0)
    with pytest.raises(ValueError):
        CodeFamily("mds", design_epsilon=0.1)


def test_kronecker_power_matches_independent_construction():
    for r in range(4):
        assert (kronecker_power(2 ** r) == kron_f_power(r)).all()
    with pytest.raises(ValueError):
        kronecker_power(12)


def test_sample_full_rank_one_by_one():
    m = sample_random_full_rank(1, 1, np.random.default_rng(0))
    assert (m.to_dense() == [[1]]).all()


def test_sample_full_rank_postcondition():
    m = sample_random_full_rank(4, 2, np.random.default_rng(123))
    assert (m.rows, m.cols) == (2, 4)
    assert rank(m) == 2


def test_sample_full_rank_acceptance_rate():
    # square case: acceptance probability prod_{i=1..4}(1 - 2^{i-5}) = 0.3076
    rng = np.random.default_rng(42)
    trials = 20_000
    hits = sum(rank(Gf2Matrix.from_dense(rng.integers(0, 2, size=(4, 4)))) == 4
               for _ in range(trials))
    expect = float(np.prod(1.0 - 2.0 ** (np.arange(1, 5) - 5)))
    assert abs(expect - 0.3076) < 5e-5
    se = np.sqrt(expect * (1 - expect) / trials)
    assert abs(hits / trials - expect) <= 3 * se


def test_z_profile_base_cases():
    assert polar_z_profile(1, 0.37) == pytest.approx([0.37])
    assert polar_z_profile(2, 0.5) == pytest.approx([0.75, 0.25])
    assert sorted(polar_z_profile(4, 0.5)) == pytest.approx(
        [0.0625, 0.4375, 0.5625, 0.9375])


def test_z_profile_conservation_and_boundaries():
    for n in (2, 8, 64, 256):
        for eps in (0.1, 0.3, 0.68):
            z = polar_z_profile(n, eps)
            assert abs(float(z.mean()) - eps) <= 1e-12
            assert ((z >= 0) & (z <= 1)).all()
        assert not polar_z_profile(n, 0.0).any()
        assert (polar_z_profile(n, 1.0) == 1.0).all()
    with pytest.raises(ValueError):
        polar_z_profile(6, 0.5)
    with pytest.raises(ValueError):
        polar_z_profile(8, 1.5)


def test_build_polar_two_by_one():
    gen, profile = build_polar(2, 1, 0.5)
    assert profile.info_set == (1,)
    assert profile.z[1] == pytest.approx(0.25)
    assert (gen.to_dense() == [[1, 1]]).all()


def test_build_polar_full_selection():
    gen, _ = build_polar(4, 4, 0.3)
    assert (gen.to_dense() == kronecker_power(4)).all()
    assert rank(gen) == 4


def test_build_polar_8_7_drops_worst_channel():
    gen, profile = build_polar(8, 7, 0.1)
    assert rank(gen) == 7
    dropped = set(range(8)) - set(profile.info_set)
    assert dropped == {int(np.argmax(profile.z))}


def test_build_polar_selects_smallest_z():
    _, profile = build_polar(4, 2, 0.5)
    z = profile.z
    assert sorted(z[list(profile.info_set)]) == pytest.approx([0.0625, 0.4375])


def test_build_polar_tie_break_low_index():
    # an exactly tied profile: every subset choice is a tie, low index wins
    _, profile = build_polar(4, 2, 1.0)
    assert profile.info_set == (0, 1)


def test_reed_muller_two_by_one():
    g = build_reed_muller_like(2, 1)
    assert (g.to_dense() == [[1, 1]]).all()


def test_reed_muller_classical_rm13():
    g = build_reed_muller_like(8, 4)
    full = kronecker_power(8)
    weights = full.sum(axis=1)
    assert sorted(weights.tolist()) == [1, 2, 2, 2, 4, 4, 4, 8]
    # the weight >= 4 rows are exactly the classical first-order set
    expect = full[[i for i in range(8) if weights[i] >= 4]]
    assert (g.to_dense() == expect).all()
    assert rank(g) == 4


def test_reed_muller_8_7_drops_weight_one_row():
    g = build_reed_muller_like(8, 7)
    full = kronecker_power(8)
    light = int(np.argmin(full.sum(axis=1)))
    expect = full[[i for i in range(8) if i != light]]
    assert (g.to_dense() == expect).all()


def test_constructed_generators_have_rank_k():
    for n, k in [(8, 3), (16, 9), (32, 20), (64, 44)]:
        gen, _ = build_polar(n, k, 0.1)
        assert rank(gen) == k
        assert rank(build_reed_muller_like(n, k)) == k


def test_index_consistency_small():
    # empirical per-index SC erasure rates must match the z profile
    n, eps, m = 4, 0.3, 30_000
    rng = np.random.default_rng(9)
    masks = rng.random((m, n)) < eps
    rates = sc_erasure_indicators(masks).mean(axis=0)
    z = polar_z_profile(n, eps)
    se = np.sqrt(z * (1 - z) / m)
    assert (np.abs(rates - z) <= 3 * se + 1e-12).all()


def test_profile_k_property():
    profile = BitChannelProfile(n=4, z=polar_z_profile(4, 0.2), info_set=(2, 3))
    assert profile.k == 2
