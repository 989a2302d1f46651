import numpy as np
import pytest
from hypothesis import given, strategies as st

from multiport.graph import (
    Digraph, current_space, ports_contain_loop_or_cutset, topological_space, topology_rows,
    voltage_space,
)
from multiport.subspace import Kind, Label, Subspace, adjoint, orthogonal_complement, relabel
from multiport.testing import random_digraph

seeds = st.integers(0, 2**32 - 1)


def loop2():
    return Digraph.from_edges([("a", "n1", "n2"), ("b", "n2", "n1")])


def test_single_edge():
    g = Digraph.from_edges([("a", "n1", "n2")])
    assert voltage_space(g).dim == 1
    assert current_space(g).dim == 0


def test_two_edge_loop():
    g = loop2()
    v = voltage_space(g)
    assert v.equals(Subspace.span([Label("a", Kind.V), Label("b", Kind.V)], [[1, -1]]))
    i = current_space(g)
    assert i.equals(Subspace.span([Label("a", Kind.I), Label("b", Kind.I)], [[1, 1]]))


def test_self_loop_voltage_is_zero():
    g = Digraph.from_edges([("s", "n1", "n1"), ("a", "n1", "n2")])
    v = voltage_space(g)
    assert v.dim == 1
    assert v.contains(np.array([1.0, 0.0]))   # columns (v_a, v_s)
    assert not v.contains(np.array([0.0, 1.0]))


def test_validation():
    with pytest.raises(ValueError):
        Digraph(("n1",), (("a", "n1", "n2"),))
    with pytest.raises(ValueError):
        Digraph.from_edges([("a", "n1", "n2"), ("a", "n2", "n1")])


def test_loop_cutset_examples():
    g = loop2()
    assert ports_contain_loop_or_cutset(g, ["a"]) == "no"
    assert ports_contain_loop_or_cutset(g, ["a", "b"]) == "loop"
    star = Digraph.from_edges([("a", "n1", "n2"), ("b", "n2", "n3"), ("c", "n3", "n1"),
                               ("d", "n3", "n4")])
    assert ports_contain_loop_or_cutset(star, ["d"]) == "cutset"
    with pytest.raises(ValueError):
        ports_contain_loop_or_cutset(star, ["zz"])


@given(seeds)
def test_tellegen(seed):
    g = random_digraph(np.random.default_rng(seed))
    v, i = voltage_space(g), current_space(g)
    assert v.dim + i.dim == len(g.edges)
    assert v.dim == len(g.nodes) - g.n_components()
    swap = {Label(e, Kind.V): Label(e, Kind.I) for e in g.edge_names}
    assert relabel(orthogonal_complement(v), swap).residual(i) <= 1e-10


@given(seeds)
def test_topological_space_self_adjoint(seed):
    g = random_digraph(np.random.default_rng(seed), max_nodes=6, max_edges=8)
    t = topological_space(g)
    assert t.dim == len(g.edges)
    assert adjoint(t).equals(t)


@given(seeds)
def test_topology_rows_match_spaces(seed):
    g = random_digraph(np.random.default_rng(seed), max_nodes=6, max_edges=10)
    index, rows = topology_rows(g)
    assert rows.shape == (len(g.edges), 2 * len(g.edges))
    space = Subspace.from_constraints(index, rows)
    assert space.equals(topological_space(g))


def test_disjoint_union_and_rename():
    g = loop2()
    h = g.disjoint_union(g.renamed("~"))
    assert h.n_components() == 2
    assert "~a" in h.edge_names
