"""Multiport network analysis through subspace arithmetic on edge variables."""

from .subspace import (
    TOL, AffineSpace, IndexSet, Kind, Label, Subspace, Void, adjoint, contraction, direct_sum,
    ilabel, intersection, matched_composition, orthogonal_complement, relabel, restriction,
    sign_flip, skewed_composition, subspace_sum, vlabel,
)
from .graph import Digraph, current_space, ports_contain_loop_or_cutset, topological_space, voltage_space
from .devices import Device, DeviceKind, assemble_characteristic, device_adjoint

__version__ = "0.1.0"
