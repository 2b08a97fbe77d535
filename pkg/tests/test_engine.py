import random

import numpy as np
import pytest

from weyl_lab import _engine
from weyl_lab.exactangle import GOLDEN, MODULUS, Angle
from weyl_lab.weylsum import weyl_sum, weyl_sum_over_x

ZERO = Angle(0)


def _phase_error(a, b, c, n, mod_bits):
    mod = 1 << mod_bits
    worst = 0.0
    for k0, ph in _engine.phase_chunks(a, b, c, n, mod_bits):
        for j in (0, len(ph) // 2, len(ph) - 1):
            k = k0 + j
            exact = ((a * k * k + b * k + c) % mod) / mod
            diff = abs(ph[j] - exact)
            worst = max(worst, min(diff, 1.0 - diff))
    return worst


def test_phase_chunks_exact_at_256_bits():
    rng = random.Random(7)
    for _ in range(10):
        a, b, c = (rng.randrange(MODULUS) for _ in range(3))
        n = rng.randrange(1, 100_000)
        assert _phase_error(a, b, c, n, 256) <= 2.0 ** -63


def test_phase_chunks_exact_at_257_bits():
    rng = random.Random(8)
    mod = 1 << 257
    for _ in range(10):
        a, b, c = (rng.randrange(mod) for _ in range(3))
        n = rng.randrange(1, 100_000)
        assert _phase_error(a, b, c, n, 257) <= 2.0 ** -63


def test_phase_chunks_chunk_boundaries_continuous():
    # the second-difference recurrence must glue exactly across blocks
    rng = random.Random(9)
    a, b, c = (rng.randrange(MODULUS) for _ in range(3))
    n = _engine.CHUNK * 3 + 17
    phases = np.concatenate([ph for _, ph in _engine.phase_chunks(a, b, c, n)])
    ks = [_engine.CHUNK - 1, _engine.CHUNK, _engine.CHUNK + 1, 2 * _engine.CHUNK]
    for k in ks:
        exact = _engine.phase_at(a, b, c, k) / MODULUS
        diff = abs(phases[k] - exact)
        assert min(diff, 1.0 - diff) <= 2.0 ** -63


def test_phase_at_wraparound_top():
    # phases within one grid unit of 1 must not round into garbage
    a, b = 0, 0
    c = MODULUS - 1
    (k0, ph), = list(_engine.phase_chunks(a, b, c, 1))
    assert ph[0] == pytest.approx(1.0, abs=2.0 ** -63)


def test_qsum_empty_and_single():
    assert _engine.qsum(1, 2, 3, 0) == 0j
    z = _engine.qsum(0, 0, 0, 1)
    assert z == 1.0 + 0j


def test_qsum_partials_consistent_with_qsum():
    rng = random.Random(10)
    a, b, c = (rng.randrange(MODULUS) for _ in range(3))
    n = _engine.CHUNK + 123
    total = _engine.qsum(a, b, c, n)
    last = None
    count = 0
    for _, z in _engine.qsum_partials(a, b, c, n):
        last = z[-1]
        count += len(z)
    assert count == n
    assert abs(last - total) < 1e-9


def test_qsum_moments_order_zero_matches_qsum():
    rng = random.Random(11)
    a, b, c = (rng.randrange(MODULUS) for _ in range(3))
    n = 70_000
    moments = _engine.qsum_moments(a, b, c, n, 3)
    assert abs(moments[0] - _engine.qsum(a, b, c, n)) < 1e-9
    # first moment against a direct weighted oracle on a small case
    n_small = 500
    moments_small = _engine.qsum_moments(a, b, c, n_small, 2)
    ph = np.concatenate([p for _, p in _engine.phase_chunks(a, b, c, n_small)])
    z = np.exp(2j * np.pi * ph)
    w = np.arange(n_small) / n_small
    assert abs(moments_small[1] - np.sum(w * z)) < 1e-9
    assert abs(moments_small[2] - np.sum(w * w * z)) < 1e-9


def test_poly_eval_matches_direct_horner():
    rng = np.random.default_rng(3)
    q = 1003
    coeffs = np.exp(2j * np.pi * rng.random(q))
    xs = rng.random(5)
    rho = np.exp(2j * np.pi * xs)
    step = 32
    rho_big = np.exp(2j * np.pi * ((step * xs) % 1.0))
    fast = _engine.poly_eval_unit_circle(coeffs, rho, rho_big, step)
    direct = np.zeros(5, dtype=np.complex128)
    for s in range(5):
        acc = 0j
        for k in range(q - 1, -1, -1):
            acc = acc * rho[s] + coeffs[k]
        direct[s] = acc
    assert np.max(np.abs(fast - direct)) < 1e-10


def test_batch_matches_scalar_at_deep_level():
    rng = random.Random(12)
    xs = [Angle(rng.randrange(MODULUS)) for _ in range(12)]
    batch = weyl_sum_over_x(GOLDEN, xs, 83523)
    scalar = np.array([weyl_sum(GOLDEN, x, ZERO, 83523) for x in xs])
    # absolute tolerance: |a| is O(sqrt(q)), BSGS keeps ~1e-9 absolute
    assert np.max(np.abs(batch - scalar)) < 1e-7
