import itertools

import numpy as np
import pytest

from pufec import codes, gmd


def outcomes_equal(a, b):
    if a.kind != b.kind:
        return False
    if not a.is_unique:
        return True
    return (
        np.array_equal(a.codeword, b.codeword)
        and np.array_equal(a.info, b.info)
        and a.distance == b.distance
    )


def test_reliability_vector_validation():
    with pytest.raises(ValueError):
        gmd.ReliabilityVector(np.array([-1, 0]), np.zeros(2, dtype=bool))
    with pytest.raises(ValueError):
        gmd.ReliabilityVector(np.array([2, 0]), np.array([True, False]))
    rel = gmd.reliability_from_distance(8, [0, 3, 5], [False, False, False])
    assert rel.weights.tolist() == [8, 2, 0]


def test_codeword_scores_zero():
    c = codes.rm_code(1, 3)
    cb = c.codebook()
    rng = np.random.default_rng(0)
    for _ in range(50):
        w = cb.words[rng.integers(16)]
        rel = gmd.ReliabilityVector(rng.integers(0, 5, 8).astype(np.int64),
                                    np.zeros(8, dtype=bool))
        out = gmd.gmd_decode(c, w, rel)
        assert out.is_unique and out.distance == 0
        assert np.array_equal(out.codeword, w)


def test_uniform_reliability_matches_plain_bdd():
    c = codes.rm_code(1, 4)
    cb = c.codebook()
    rng = np.random.default_rng(1)
    rel = gmd.ReliabilityVector.uniform(16, 4)
    for _ in range(200):
        w = cb.words[rng.integers(32)].copy()
        nf = rng.integers(0, 4)  # below d/2
        w_orig = w.copy()
        w[rng.choice(16, nf, replace=False)] ^= 1
        out = gmd.gmd_decode(c, w, rel)
        plain = codes.error_erasure_decode(c, w, [])
        assert out.is_unique and plain.is_unique
        assert np.array_equal(out.codeword, plain.codeword)
        assert np.array_equal(out.codeword, w_orig)


def test_trial_ladder_bound():
    for r, m in [(1, 3), (1, 4), (1, 7), (4, 7)]:
        c = codes.rm_code(r, m)
        rel = gmd.ReliabilityVector.uniform(c.n, 1)
        _, _, sizes = gmd._erasure_schedule(c, rel)
        assert len(sizes) <= c.d // 2 + 1
        assert sizes == sorted(sizes)
        assert all(s < c.d for s in sizes)


def test_weight_two_beyond_bdd_recovered_when_errors_least_reliable():
    # d = 4: two errors exceed the bounded-distance radius, but erasing both
    # (the two least reliable positions) in trial 1 recovers the codeword
    c = codes.rm_code(1, 3)
    cb = c.codebook()
    recovered = 0
    total = 0
    for w in cb.words:
        for i, j in itertools.permutations(range(8), 2):
            r = w.copy()
            r[i] ^= 1
            r[j] ^= 1
            weights = np.full(8, 4, dtype=np.int64)
            weights[i] = 0
            weights[j] = 1
            out = gmd.gmd_decode(c, r, gmd.ReliabilityVector(weights, np.zeros(8, bool)))
            total += 1
            recovered += out.is_unique and np.array_equal(out.codeword, w)
    assert recovered == total == 16 * 56


def test_pre_erased_positions_only_declared_by_caller():
    c = codes.rm_code(1, 3)
    cb = c.codebook()
    w = cb.words[5].copy()
    erased = np.zeros(8, dtype=bool)
    erased[[2, 6]] = True
    weights = np.full(8, 4, dtype=np.int64)
    weights[erased] = 0
    w[2] ^= 1  # value at an erased position must not matter
    out = gmd.gmd_decode(c, w, gmd.ReliabilityVector(weights, erased))
    assert out.is_unique and np.array_equal(out.codeword, cb.words[5])
    assert out.distance == 0


def test_determinism():
    c = codes.rm_code(1, 4)
    rng = np.random.default_rng(2)
    for _ in range(100):
        hard = rng.integers(0, 2, 16, dtype=np.uint8)
        weights = rng.integers(0, 9, 16).astype(np.int64)
        rel = gmd.ReliabilityVector(weights, np.zeros(16, dtype=bool))
        a = gmd.gmd_decode(c, hard, rel)
        b = gmd.gmd_decode(c, hard, rel)
        assert outcomes_equal(a, b)


@pytest.mark.parametrize("r,m,n_cases", [(1, 3, 4000), (2, 3, 3000)])
def test_batched_equals_generic_reference_small(r, m, n_cases):
    c = codes.rm_code(r, m)
    rng = np.random.default_rng(3)
    for _ in range(n_cases):
        hard = rng.integers(0, 2, c.n, dtype=np.uint8)
        erased = rng.random(c.n) < 0.15
        weights = rng.integers(0, c.d + 1, c.n).astype(np.int64)
        weights[erased] = 0
        rel = gmd.ReliabilityVector(weights, erased)
        assert outcomes_equal(
            gmd._gmd_generic(c, hard, rel), gmd.gmd_decode(c, hard, rel)
        )


@pytest.mark.parametrize("r,m,n_cases", [(1, 7, 250), (4, 7, 250)])
def test_batched_equals_generic_reference_large(r, m, n_cases):
    c = codes.rm_code(r, m)
    rng = np.random.default_rng(4)
    for _ in range(n_cases):
        info = rng.integers(0, 2, c.k, dtype=np.uint8)
        hard = codes.encode(c, info)
        hard[rng.choice(c.n, rng.integers(0, c.d), replace=False)] ^= 1
        erased = rng.random(c.n) < 0.05
        weights = rng.integers(0, c.d + 1, c.n).astype(np.int64)
        weights[erased] = 0
        rel = gmd.ReliabilityVector(weights, erased)
        assert outcomes_equal(
            gmd._gmd_generic(c, hard, rel), gmd.gmd_decode(c, hard, rel)
        )


def test_gmd_decode_many_matches_single_calls():
    c = codes.rm_code(1, 7)
    rng = np.random.default_rng(5)
    for _ in range(50):
        hards = rng.integers(0, 2, (4, 128), dtype=np.uint8)
        erased = rng.random(128) < 0.05
        weights = rng.integers(0, 9, 128).astype(np.int64)
        weights[erased] = 0
        rel = gmd.ReliabilityVector(weights, erased)
        outs = gmd.gmd_decode_many(c, hards, rel)
        for l in range(4):
            assert outcomes_equal(outs[l], gmd.gmd_decode(c, hards[l], rel))


def test_dominance_over_plain_error_erasure():
    # whenever plain decoding with only the pre-erasures corrects, GMD must
    # also return that codeword
    c = codes.rm_code(1, 3)
    cb = c.codebook()
    rng = np.random.default_rng(6)
    checked = 0
    for w in cb.words:
        for ew in range(3):
            for ep in itertools.combinations(range(8), ew):
                r = w.copy()
                for i in ep:
                    r[i] ^= 1
                for _ in range(4):
                    weights = rng.integers(0, 5, 8).astype(np.int64)
                    rel = gmd.ReliabilityVector(weights, np.zeros(8, dtype=bool))
                    plain = codes.error_erasure_decode(c, r, [])
                    if plain.is_unique and np.array_equal(plain.codeword, w):
                        checked += 1
                        out = gmd.gmd_decode(c, r, rel)
                        assert out.is_unique
                        assert np.array_equal(out.codeword, w)
    assert checked > 500


def test_all_erased_fails():
    c = codes.rm_code(1, 3)
    rel = gmd.ReliabilityVector(np.zeros(8, dtype=np.int64), np.ones(8, dtype=bool))
    assert gmd.gmd_decode(c, np.zeros(8, dtype=np.uint8), rel).is_failure
