from __future__ import annotations

import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from streamcover import _fastmod
from streamcover.errors import InvalidArgument, InvalidKey
from streamcover.geometry import Shift, WindowId, window_id
from streamcover.hashing import (
    Action,
    HashBank,
    HashFamilyParams,
    MinWiseSampler,
    PolyHashFn,
    draw_hash,
    hash_eval,
    is_prime,
    minwise_degree,
    minwise_offer,
)

P = (1 << 61) - 1


def ref_eval(coeffs, x, p=P):
    return sum(a * pow(x, i, p) for i, a in enumerate(coeffs)) % p


def test_is_prime_small_and_mersenne():
    sieve = [n for n in range(2, 500) if all(n % d for d in range(2, int(n ** 0.5) + 1))]
    assert [n for n in range(500) if is_prime(n)] == sieve
    assert is_prime(P) and not is_prime(P - 2)


def test_minwise_degree():
    assert minwise_degree(0.25) == 16
    assert minwise_degree(0.2) == 19
    assert minwise_degree(0.9) == 2


def test_params_validation():
    with pytest.raises(InvalidArgument):
        HashFamilyParams(1)
    with pytest.raises(InvalidArgument):
        HashFamilyParams(2, universe=10, prime=9)
    with pytest.raises(InvalidArgument):
        HashFamilyParams(2, universe=6, prime=5)
    assert HashFamilyParams.for_minwise(0.25).degree == 16


def test_draw_hash_examples():
    params = HashFamilyParams(3)
    assert draw_hash(params, 7) == draw_hash(params, 7)
    assert len(draw_hash(params, 7).coefficients) == 3
    differing = sum(draw_hash(params, s).coefficients != draw_hash(params, s + 1000).coefficients for s in range(100))
    assert differing == 100


def test_eval_hand_example_and_range():
    h = PolyHashFn((3, 2), prime=5, universe=5)
    assert h(4) == 1
    assert h(4) == h(4)
    with pytest.raises(InvalidKey):
        h(5)
    with pytest.raises(InvalidKey):
        hash_eval(h, -1)


@pytest.mark.parametrize("p,r", [(5, 2), (5, 3), (7, 2)])
def test_exhaustive_r_wise_independence(p, r):
    fns = [PolyHashFn(c, prime=p, universe=p) for c in itertools.product(range(p), repeat=r)]
    for xs in itertools.combinations(range(p), r):
        counts: dict = {}
        for h in fns:
            key = tuple(h(x) for x in xs)
            counts[key] = counts.get(key, 0) + 1
        assert len(counts) == p ** r and set(counts.values()) == {1}


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 40), st.integers(0, 2 ** 32), st.lists(st.integers(0, P - 1), min_size=1, max_size=30))
def test_bank_matches_scalar_horner(degree, seed, keys):
    bank = HashBank(5, HashFamilyParams(degree), seed)
    got = bank.evaluate(np.array(keys, dtype=np.uint64))
    for j in range(5):
        h = bank.hash_fn(j)
        assert [int(v) for v in got[j]] == [ref_eval(h.coefficients, x) for x in keys]


def test_bank_extreme_values():
    coeffs = np.full((1, _fastmod.MAX_DEGREE), P - 1, dtype=np.uint64)
    keys = np.array([0, 1, P - 1, P - 2, (1 << 60) + 12345], dtype=np.uint64)
    vals = _fastmod.values_from_planes(_fastmod.planes(_fastmod.coefficient_limbs(coeffs),
                                                       _fastmod.key_operand(keys, _fastmod.MAX_DEGREE)))
    assert [int(v) for v in vals[0]] == [ref_eval([P - 1] * _fastmod.MAX_DEGREE, int(k)) for k in keys]


def test_bank_blocks_and_degree_limit():
    bank = HashBank(5000, HashFamilyParams(4), 3)
    assert bank.n_blocks == 2
    keys = np.arange(7, dtype=np.uint64)
    vals = bank.evaluate(keys)
    for j in (0, 4095, 4096, 4999):
        assert [int(v) for v in vals[j]] == [ref_eval(bank.hash_fn(j).coefficients, int(k)) for k in keys]
    assert np.array_equal(HashBank(5000, HashFamilyParams(4), 3, cache=False).evaluate(keys), vals)
    with pytest.raises(InvalidArgument):
        HashBank(1, HashFamilyParams(_fastmod.MAX_DEGREE + 1), 0)
    with pytest.raises(InvalidKey):
        HashBank(1, HashFamilyParams(2, universe=100), 0).evaluate([100])


def test_argmin_update_strict_and_first_wins():
    rng = random.Random(4)
    bank = HashBank(300, HashFamilyParams(8, universe=1 << 40), 11)
    keys = [rng.randrange(1 << 40) for _ in range(600)]
    keys = list(dict.fromkeys(keys))
    best_h = np.full(300, _fastmod.INFINITY, dtype=np.uint64)
    best_k = np.full(300, np.uint64(2 ** 64 - 1), dtype=np.uint64)
    for lo in range(0, len(keys), 97):
        bank.argmin_update(np.array(keys[lo:lo + 97], dtype=np.uint64), best_h, best_k, chunk=40)
    for j in range(300):
        h = bank.hash_fn(j)
        vals = [h(k) for k in keys]
        m = min(vals)
        assert int(best_h[j]) == m and int(best_k[j]) == keys[vals.index(m)]


def _sampler(coeffs, record=True):
    return MinWiseSampler(PolyHashFn(coeffs, prime=P, universe=1 << 40), record=record)


def test_minwise_offer_actions():
    shift = Shift((0, 0), 2)
    a, b = WindowId((0, 0), shift), WindowId((1, 0), shift)
    # h(x) = x: key order decides
    s = _sampler((0, 1))
    assert minwise_offer(s, b, (4.5, 0.5)) is Action.ADOPT_RESET
    assert s.offer(b, (5.0, 1.0)) is Action.FEED
    assert s.offer(a, (0.1, 0.1)) is Action.ADOPT_RESET  # smaller key, smaller hash
    assert s.offer(b, (6.0, 0.0)) is Action.IGNORE
    assert s.current_window == a and s.fed == [(0.1, 0.1)]
    assert s.current_hash_value == a.encode()


def test_sampler_substream_fidelity():
    rng = random.Random(2)
    shift = Shift((1, 0), 3)
    for trial in range(30):
        s = _sampler(tuple(rng.randrange(P) for _ in range(6)))
        stream = [(rng.uniform(0, 30), rng.uniform(0, 30)) for _ in range(80)]
        for p in stream:
            s.offer(window_id(p, shift), p)
        windows = {window_id(p, shift) for p in stream}
        best = min(windows, key=lambda w: s.hash(w.encode()))
        assert s.current_window == best
        assert s.fed == [p for p in stream if window_id(p, shift) == best]


def test_space_bits():
    h = draw_hash(HashFamilyParams(16), 0)
    assert h.space_bits() == 16 * 61
    assert HashBank(10, HashFamilyParams(16), 0).space_bits() == 10 * 16 * 61
