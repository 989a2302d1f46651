import numpy as np
import pytest
from hypothesis import given, strategies as st

from multiport.subspace import (
    AffineSpace, IndexSet, Kind, Label, Subspace, Void, adjoint, complex_from_json,
    complex_to_json, contraction, direct_sum, ilabel, intersection, lstsq_consistent,
    matched_composition, orthogonal_complement, relabel, restriction, rref, sign_flip,
    skewed_composition, subspace_from_json, subspace_sum, subspace_to_json, vlabel,
)
from multiport.testing import random_subspace, unit_disc

seeds = st.integers(0, 2**32 - 1)


def lab(*names):
    return [Label(n, Kind.V) for n in names]


def pair_index(*edges):
    return IndexSet.pairs(edges)


# -- index sets -----------------------------------------------------------------

def test_index_set_is_canonical():
    a = IndexSet([ilabel("b"), vlabel("a"), vlabel("b")])
    b = IndexSet([vlabel("b"), vlabel("a"), ilabel("b")])
    assert a == b
    assert a.labels == (vlabel("a"), vlabel("b"), ilabel("b"))


def test_index_set_rejects_duplicates():
    with pytest.raises(ValueError):
        IndexSet([vlabel("a"), vlabel("a")])


def test_label_text_round_trip():
    for label in (vlabel("e1"), ilabel("~p2")):
        assert Label.parse(str(label)) == label


# -- complement -------------------------------------------------------------------

def test_complement_axis():
    v = Subspace.span(lab("a", "b"), [[1, 0]])
    assert orthogonal_complement(v).equals(Subspace.span(lab("a", "b"), [[0, 1]]))


def test_complement_of_standard_representative():
    rng = np.random.default_rng(0)
    k = unit_disc(rng, (2, 3))
    labels = lab("a", "b", "c", "d", "e")
    v = Subspace.span(labels, np.hstack([np.eye(2), k]))
    expected = Subspace.span(labels, np.hstack([-k.conj().T, np.eye(3)]))
    assert orthogonal_complement(v).equals(expected)


def test_complement_full_and_zero():
    full = Subspace.full(lab("a", "b", "c"))
    assert orthogonal_complement(full).dim == 0
    assert orthogonal_complement(Subspace.zero(lab("a"))).dim == 1


@given(seeds)
def test_complement_dimension_and_involution(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 10))
    v = random_subspace(rng, lab(*[f"x{k}" for k in range(n)]))
    c = orthogonal_complement(v)
    assert v.dim + c.dim == n
    assert orthogonal_complement(c).equals(v)
    if v.dim and c.dim:
        assert np.abs(v.basis @ c.basis.conj().T).max() < 1e-10


# -- sum and intersection ---------------------------------------------------------

def test_sum_identities():
    v = Subspace.span(lab("a", "b"), [[1, 2]])
    assert subspace_sum(v, Subspace.zero(lab("a", "b"))).equals(v)
    s = subspace_sum(Subspace.span(lab("a", "b"), [[1, 1]]), Subspace.span(lab("a", "b"), [[1, -1]]))
    assert s.dim == 2


def test_sum_pads_with_zero():
    s = subspace_sum(Subspace.span(lab("a"), [[1]]), Subspace.span(lab("b"), [[1]]))
    assert s.equals(Subspace.full(lab("a", "b")))
    # overlapping index sets
    s = subspace_sum(Subspace.span(lab("a", "b"), [[1, 1]]), Subspace.span(lab("b", "c"), [[1, 1]]))
    expected = Subspace.span(lab("a", "b", "c"), [[1, 1, 0], [0, 1, 1]])
    assert s.equals(expected)


def test_intersection_identities():
    v = Subspace.span(lab("a", "b"), [[1, 1]])
    assert intersection(v, Subspace.full(lab("a", "b"))).equals(v)
    assert intersection(Subspace.full(lab("a", "b")), v).equals(v)


def test_intersection_pads_with_full():
    i = intersection(Subspace.span(lab("a", "b"), [[1, 1]]), Subspace.span(lab("b", "c"), [[1, 2]]))
    assert i.equals(Subspace.span(lab("a", "b", "c"), [[1, 1, 2]]))


@given(seeds)
def test_complementary_pair_intersects_in_zero(seed):
    rng = np.random.default_rng(seed)
    labels = lab(*"abcdef")
    v = random_subspace(rng, labels)
    assert intersection(v, orthogonal_complement(v)).dim == 0


@given(seeds)
def test_intersection_dual_of_sum(seed):
    rng = np.random.default_rng(seed)
    labels = lab(*"abcde")
    v1, v2 = random_subspace(rng, labels), random_subspace(rng, labels)
    lhs = orthogonal_complement(intersection(v1, v2))
    rhs = subspace_sum(orthogonal_complement(v1), orthogonal_complement(v2))
    assert lhs.equals(rhs)


# -- restriction / contraction ----------------------------------------------------

def test_restriction_and_contraction_examples():
    v = Subspace.span(lab("a", "b"), [[1, 2]])
    assert restriction(v, lab("a")).equals(Subspace.full(lab("a")))
    assert restriction(v, lab("a", "b")).equals(v)
    full = Subspace.full(lab("a", "b"))
    assert contraction(full, lab("a")).equals(Subspace.full(lab("a")))
    assert contraction(Subspace.span(lab("a", "b"), [[1, 1]]), lab("a")).dim == 0


def test_restriction_requires_subset():
    with pytest.raises(ValueError):
        restriction(Subspace.full(lab("a")), lab("z"))


@given(seeds)
def test_minor_rank_and_duality(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 10))
    labels = lab(*[f"x{k}" for k in range(n)])
    v = random_subspace(rng, labels)
    cut = int(rng.integers(1, n))
    s, p = labels[:cut], labels[cut:]
    assert restriction(v, s).dim + contraction(v, p).dim == v.dim
    vs = orthogonal_complement(v)
    assert restriction(vs, p).equals(orthogonal_complement(contraction(v, p)))
    assert contraction(vs, s).equals(orthogonal_complement(restriction(v, s)))


def test_affine_contraction_void_and_nonvoid():
    a = AffineSpace.from_constraints(lab("a", "b"), [[0, 1]], [1.0])
    assert isinstance(contraction(a, lab("a")), Void)
    b = AffineSpace.from_constraints(lab("a", "b"), [[1, 1]], [3.0])
    c = contraction(b, lab("a"))
    assert c.translate.dim == 0 and np.allclose(c.particular, [3.0])


# -- compositions -------------------------------------------------------------------

def test_composition_with_full_and_zero():
    rng = np.random.default_rng(4)
    labels = lab("s1", "s2", "t1")
    k = random_subspace(rng, labels, 2)
    t = lab("t1")
    assert matched_composition(k, Subspace.full(t)).equals(restriction(k, lab("s1", "s2")))
    assert matched_composition(k, Subspace.zero(t)).equals(contraction(k, lab("s1", "s2")))


def _graph_of(m, xs, ys):
    return Subspace.span(xs + ys, np.hstack([np.eye(m.shape[1]), m.T]))


def test_composition_of_matrix_graphs_is_product():
    rng = np.random.default_rng(5)
    a, b = unit_disc(rng, (3, 3)), unit_disc(rng, (3, 3))
    x, y, z = lab("x1", "x2", "x3"), lab("y1", "y2", "y3"), lab("z1", "z2", "z3")
    ga = _graph_of(a, x, y)   # {(x, a x)}
    gb = _graph_of(b, y, z)   # {(y, b y)}
    assert matched_composition(ga, gb).equals(_graph_of(b @ a, x, z))


def test_skewed_composition_examples():
    rng = np.random.default_rng(6)
    v1 = random_subspace(rng, lab("a", "b"))
    v2 = random_subspace(rng, lab("c"))
    assert skewed_composition(v1, v2).equals(direct_sum(v1, v2))
    v = random_subspace(rng, lab("a", "b", "c"))
    assert skewed_composition(v, v).equals(matched_composition(v, v))


@given(seeds)
def test_implicit_duality(seed):
    rng = np.random.default_rng(seed)
    ns, np_, nq = (int(x) for x in rng.integers(0, 5, size=3))
    s = lab(*[f"s{k}" for k in range(ns)])
    p = lab(*[f"p{k}" for k in range(np_)])
    q = lab(*[f"q{k}" for k in range(nq)])
    v_sp = random_subspace(rng, IndexSet(s + p))
    v_pq = random_subspace(rng, IndexSet(p + q))
    lhs = orthogonal_complement(matched_composition(v_sp, v_pq))
    rhs = skewed_composition(orthogonal_complement(v_sp), orthogonal_complement(v_pq))
    assert lhs.equals(rhs)


@given(seeds)
def test_affine_translate_law(seed):
    rng = np.random.default_rng(seed)
    sp, pq = IndexSet(lab("s0", "s1", "p0", "p1")), IndexSet(lab("p0", "p1", "q0"))
    v1, v2 = random_subspace(rng, sp), random_subspace(rng, pq)
    a1 = AffineSpace(unit_disc(rng, len(sp)), v1)
    a2 = AffineSpace(unit_disc(rng, len(pq)), v2)
    out = matched_composition(a1, a2)
    if not isinstance(out, Void):
        assert out.translate.equals(matched_composition(v1, v2))


# -- sign flip and relabel ------------------------------------------------------------

def test_sign_flip_examples():
    v = Subspace.span(lab("a", "b"), [[1, 2]])
    assert sign_flip(v, lab("b")).equals(Subspace.span(lab("a", "b"), [[1, -2]]))
    assert sign_flip(v, []).equals(v)
    assert sign_flip(sign_flip(v, lab("a")), lab("a")).equals(v)


def test_relabel_examples():
    v = Subspace.span([vlabel("e"), ilabel("e")], [[1, 2]])
    assert relabel(v, {}).equals(v)
    swapped = relabel(v, {vlabel("e"): ilabel("e"), ilabel("e"): vlabel("e")})
    assert swapped.equals(Subspace.span([vlabel("e"), ilabel("e")], [[2, 1]]))
    with pytest.raises(ValueError):
        relabel(v, {vlabel("e"): ilabel("e")})


# -- adjoint ------------------------------------------------------------------------

def test_adjoint_nullator_is_norator():
    idx = pair_index("e")
    assert adjoint(Subspace.zero(idx)).equals(Subspace.full(idx))


def test_adjoint_impedance_conjugates():
    z = 2 + 3j
    v = Subspace.from_constraints([vlabel("e"), ilabel("e")], [[1, -z]])
    expected = Subspace.from_constraints([vlabel("e"), ilabel("e")], [[1, -np.conj(z)]])
    assert adjoint(v).equals(expected)


def test_adjoint_needs_pair_index():
    with pytest.raises(ValueError):
        adjoint(Subspace.full([vlabel("a")]))


@given(seeds)
def test_adjoint_involution_and_direct_sum(seed):
    rng = np.random.default_rng(seed)
    i1, i2 = pair_index("a", "b"), pair_index("c")
    v1, v2 = random_subspace(rng, i1), random_subspace(rng, i2)
    assert adjoint(adjoint(v1)).equals(v1)
    assert adjoint(direct_sum(v1, v2)).equals(direct_sum(adjoint(v1), adjoint(v2)))


# -- affine and numerics --------------------------------------------------------------

def test_affine_representation_independence():
    v = Subspace.span(lab("a", "b"), [[1, 1]])
    a1 = AffineSpace(np.array([1.0, 0.0]), v)
    a2 = AffineSpace(np.array([3.0, 2.0]), v)
    assert a1.equals(a2)
    assert not a1.equals(AffineSpace(np.array([0.0, 0.0]), v))


def test_affine_intersection_void():
    a = AffineSpace.from_constraints(lab("a"), [[1]], [1.0])
    b = AffineSpace.from_constraints(lab("a"), [[1]], [2.0])
    assert isinstance(intersection(a, b), Void)


def test_lstsq_consistent():
    a = np.array([[1.0, 1.0], [2.0, 2.0]])
    _, ok, r = lstsq_consistent(a, np.array([1.0, 2.0]))
    assert ok and r == 1
    _, ok, _ = lstsq_consistent(a, np.array([1.0, 3.0]))
    assert not ok


def test_rref_canonical():
    m = np.array([[2.0, 4.0, 2.0], [1.0, 1.0, 0.0]])
    r = rref(m)
    assert np.allclose(r, [[1, 0, -1], [0, 1, 1]])


def test_json_round_trip():
    rng = np.random.default_rng(7)
    v = random_subspace(rng, pair_index("a", "b"), 2)
    d = subspace_to_json(v)
    assert subspace_from_json(d).equals(v)
    assert complex_from_json(complex_to_json(1.5 - 2j)) == 1.5 - 2j
    assert complex_to_json(-0.0) == {"re": 0.0, "im": 0.0}
