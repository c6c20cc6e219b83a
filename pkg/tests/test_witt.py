import itertools
import random

import pytest

from wittsums.errors import LengthMismatch, ZeroCoordinate
from wittsums.ff import build_field, extend_field
from wittsums.witt import (
    WittInput,
    WittVec,
    all_witt_vectors,
    eval_f_trace,
    iota,
    trace_table,
    trace_vector,
    witt_add,
    witt_mul,
    witt_trace,
    witt_vector_at,
)


def test_zero_is_identity(F9):
    x = WittVec((F9.gen, F9.one))
    assert x + WittVec.zero(F9, 2) == x


def test_one_plus_one_over_f2(F2):
    one = WittVec.teichmuller(F2.one, 2)
    assert (one + one).coords == (F2.zero, F2.one)
    assert iota(one + one).coeffs == (2,)


def test_iota_small_values(F9):
    ring_two = iota(WittVec((F9.zero, F9.one)))
    assert ring_two.coeffs == (3, 0)
    g = iota(WittVec.teichmuller(F9.gen, 2))
    assert g.coeffs == (0, 1)


@pytest.mark.parametrize("p,a", [(2, 2), (3, 2)])
def test_iota_ring_isomorphism(p, a):
    F = build_field(p, a)
    vecs = list(all_witt_vectors(F, 2))
    images = [iota(x) for x in vecs]
    assert len(set(images)) == len(vecs)  # bijective onto a set of size q^2
    for (x, ix), (y, iy) in itertools.product(zip(vecs, images), repeat=2):
        assert iota(witt_add(x, y)) == ix + iy
        assert iota(witt_mul(x, y)) == ix * iy


def test_frobenius_commutes_with_iota(F9):
    for x in list(all_witt_vectors(F9, 2))[:30]:
        assert iota(x.frobenius()) == iota(x).frob()


def test_length_mismatch(F9):
    with pytest.raises(LengthMismatch):
        WittVec((F9.one,)) + WittVec((F9.one, F9.one))


def test_traces(F2, F4):
    assert witt_trace(WittVec.teichmuller(F2.one, 2)) == 1
    assert witt_trace(WittVec.teichmuller(F4.gen, 2)) == 3


def test_trace_additive():
    F = build_field(3, 2)
    rng = random.Random(5)
    vecs = list(all_witt_vectors(F, 2))
    for _ in range(200):
        x, y = rng.choice(vecs), rng.choice(vecs)
        assert witt_trace(x + y) == (witt_trace(x) + witt_trace(y)) % 9


def test_f_trace_small(F2, F3):
    f = WittInput.build(F2, 1, [(0, (1,), 0)])
    assert eval_f_trace(f, [F2.one]) == 1
    f = WittInput.build(F3, 2, [(0, (1,), 0)])
    assert eval_f_trace(f, [F3.one]) == 1


@pytest.mark.parametrize("p,a,m,k", [(3, 1, 2, 1), (3, 1, 2, 2), (2, 2, 2, 1), (2, 1, 3, 2)])
def test_two_path_trace(p, a, m, k):
    F = build_field(p, a)
    f = WittInput.build(F, m, [(0, (1,), 0), (1, (1,), 1 % (F.q - 1)), (0, (2,), 0)])
    E = extend_field(F, k)
    for x in E.units():
        assert eval_f_trace(f, [x]) == witt_trace(witt_vector_at(f, [x]))


def test_gh_instance_at_two(F3):
    f = WittInput.build(F3, 2, [(0, (1,), 0), (1, (1,), 0)])
    x = F3.from_int(2)
    assert eval_f_trace(f, [x]) == witt_trace(witt_vector_at(f, [x]))


def test_trace_vector_matches_pointwise(F3):
    f = WittInput.build(F3, 2, [(0, (1, 0), 0), (0, (0, 1), 0), (1, (-1, -1), 1)])
    grids, t = trace_vector(f, 1)
    E = extend_field(F3, 1)
    for col in range(grids.shape[1]):
        x = [E.elem(int(grids[j, col])) for j in range(2)]
        assert t[col] == eval_f_trace(f, x)


def test_trace_table(F4):
    T = trace_table(F4, 2)
    assert T[0] == 2  # Tr(1) = 2
    assert T[1] == 3


def test_input_validation(F3):
    with pytest.raises(ValueError):
        WittInput.build(F3, 2, [(1, (1,), 0)])
    with pytest.raises(ValueError):
        WittInput.build(F3, 2, [(0, (1,), 0), (0, (1,), 1)])
    f = WittInput.build(F3, 1, [(0, (1,), 0)])
    with pytest.raises(ZeroCoordinate):
        eval_f_trace(f, [F3.zero])
