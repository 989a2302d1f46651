import json
from importlib import resources

import jsonschema
import numpy as np
import pytest
from hypothesis import given, strategies as st

from multiport.behaviour import PortBehaviour, extract_port_behaviour
from multiport.network import adjoint_multiport
from multiport.power import (
    Maximality, Passivity, Stationarity, analyze_power, delivered_power, device_passivity,
    hermitian_form, maximality_upgrade, passivity_class, stationarity_by_termination,
    stationarity_from_behaviour, stationary_membership,
)
from multiport.testing import (
    random_passive_multiport, random_rigid_multiport, replace_device, lossless_like,
    source_impedance_1port, unit_disc,
)

seeds = st.integers(0, 2**32 - 1)


def thevenin(z, e):
    return PortBehaviour.from_matrices(["p"], [[1.0]], [[z]], [e])


def scan(z, e, lo=-3.0, hi=1.0, step=1e-3):
    """Delivered power on v = z i + e over a grid of real currents."""
    i = np.arange(lo, hi + step / 2, step)
    v = z * i + e
    p = -2 * np.real(v * np.conj(i))
    return i, p


def test_fixture_values():
    r = stationarity_from_behaviour(thevenin(5.0, 10.0))
    assert r.classification is Stationarity.UNIQUE
    assert np.allclose(r.i, [-1.0]) and np.allclose(r.v, [5.0])
    assert r.power_delivered == pytest.approx(10.0) and r.power_delivered_half == pytest.approx(5.0)
    i, p = scan(5.0, 10.0)
    assert i[np.argmax(p)] == pytest.approx(-1.0, abs=1e-9)
    assert p.max() == pytest.approx(10.0)


def test_thevenin_reduction_scalar():
    for z, e in [(2 + 1j, 1 - 1j), (0.3, 4.0)]:
        r = stationarity_from_behaviour(thevenin(z, e))
        assert np.allclose((z + np.conj(z)) * (-r.i), e)


def test_degenerate_classes():
    assert stationarity_from_behaviour(thevenin(0.0, 1.0)).classification is Stationarity.NONE
    assert stationarity_from_behaviour(thevenin(1j, 0.0)).classification is Stationarity.INFINITE


def test_passivity_examples():
    assert passivity_class(thevenin(5.0, 0.0))[0] is Passivity.STRICT
    assert passivity_class(thevenin(1j, 0.0))[0] is Passivity.PASSIVE
    assert passivity_class(thevenin(-1.0, 0.0))[0] is Passivity.NONE
    free = PortBehaviour.from_matrices(["p"], np.zeros((0, 1)), np.zeros((0, 1)), [])
    assert passivity_class(free)[0] is Passivity.NONE
    point = PortBehaviour.from_matrices(["p"], [[1.0], [0.0]], [[0.0], [-1.0]], [1.0, 2.0])
    assert passivity_class(point)[0] is Passivity.STRICT


def test_negative_resistor_is_a_minimum():
    b = thevenin(-1.0, 1.0)
    r = maximality_upgrade(stationarity_from_behaviour(b), b, *passivity_class(b))
    assert r.maximal is Maximality.MIN
    i, p = scan(-1.0, 1.0)
    assert i[np.argmin(p)] == pytest.approx(r.i[0].real, abs=1e-9)


def test_lossless_is_flat():
    b = thevenin(1j, 0.0)
    h = hermitian_form(b)
    assert np.allclose(h, 0)
    w = b.translate_basis()
    for row in w:
        assert delivered_power(row[:1], row[1:]) == pytest.approx(0.0, abs=1e-12)


def test_saddle_detected():
    # two decoupled ports, one absorbing and one generating
    b = PortBehaviour.from_matrices(["p", "q"], np.eye(2), np.diag([1.0, -1.0]), [0.0, 0.0])
    r = maximality_upgrade(stationarity_from_behaviour(b), b, *passivity_class(b))
    assert r.maximal is Maximality.SADDLE


def test_termination_on_fixtures():
    r = stationarity_by_termination(source_impedance_1port(10.0, 5.0))
    assert r.classification is Stationarity.UNIQUE
    assert np.allclose(r.v, [5.0]) and np.allclose(r.i, [-1.0])
    assert stationarity_by_termination(source_impedance_1port(1.0, 0.0)).classification \
        is Stationarity.NONE
    assert stationarity_by_termination(source_impedance_1port(0.0, 1j)).classification \
        is Stationarity.INFINITE


@given(seeds)
def test_paths_agree_on_rigid_multiports(seed):
    m = random_rigid_multiport(np.random.default_rng(seed))
    b = extract_port_behaviour(m)
    r1, r2 = stationarity_from_behaviour(b), stationarity_by_termination(m)
    assert r1.agrees(r2, 1e-6)
    if r1.classification is Stationarity.UNIQUE:
        ab = extract_port_behaviour(adjoint_multiport(m))
        assert stationary_membership(r1, b, ab) <= 1e-7


@given(seeds)
def test_thevenin_reduction_random(seed):
    m = random_rigid_multiport(np.random.default_rng(seed))
    b = extract_port_behaviour(m)
    th = b.thevenin()
    r = stationarity_from_behaviour(b)
    if th is None or r.classification is not Stationarity.UNIQUE:
        return
    z, e = th
    assert np.allclose((z + z.conj().T) @ (-r.i), e, atol=1e-8 * max(1, np.abs(e).max()))


@given(seeds)
def test_strictly_passive_stationary_is_maximum(seed):
    rng = np.random.default_rng(seed)
    m = random_passive_multiport(rng)
    r, _ = analyze_power(m, seed=seed)
    assert r.classification is Stationarity.UNIQUE and r.passivity is Passivity.STRICT
    assert r.maximal is Maximality.MAX and r.unique_maximizer
    b = extract_port_behaviour(m)
    n = b.n_ports
    w = b.translate_basis()
    x0 = r.stationary_vector()
    for _ in range(20):
        x = x0 + unit_disc(rng, w.shape[0]) @ w * 3
        assert delivered_power(x[:n], x[n:]) <= r.power_delivered + 1e-9


@given(seeds)
def test_load_is_conjugate_impedance(seed):
    m = random_passive_multiport(np.random.default_rng(seed))
    b = extract_port_behaviour(m)
    z, _ = b.thevenin()
    za, _ = extract_port_behaviour(adjoint_multiport(m)).thevenin()
    assert np.allclose(za, z.conj().T, atol=1e-9)
    r = stationarity_by_termination(m)
    # the adjoint load carries the current -i into its own ports
    assert np.allclose(r.v, za @ (-r.i), atol=1e-8)


@given(seeds)
def test_lemma_passivity_propagation(seed):
    rng = np.random.default_rng(seed)
    m = random_passive_multiport(rng)
    assert device_passivity(m) is Passivity.STRICT
    assert passivity_class(extract_port_behaviour(m))[0] is Passivity.STRICT
    k = int(rng.integers(len(m.devices)))
    m2 = replace_device(m, k, lossless_like(rng, m.devices[k]))
    assert device_passivity(m2) is Passivity.PASSIVE
    assert passivity_class(extract_port_behaviour(m2))[0] in (Passivity.PASSIVE, Passivity.STRICT)


def _schema(name):
    text = resources.files("multiport").joinpath("schemas", name).read_text()
    return json.loads(text)


def test_report_matches_schema():
    schema = _schema("power_report.schema.json")
    for e, z in [(10.0, 5.0), (1.0, 0.0), (0.0, 1j), (1.0, -1.0)]:
        r, cross = analyze_power(source_impedance_1port(e, z), via="both")
        jsonschema.validate(r.to_json(), schema)
        jsonschema.validate(cross.to_json(), schema)


def test_behaviour_matches_schema():
    schema = _schema("port_behaviour.schema.json")
    rng = np.random.default_rng(3)
    for _ in range(10):
        jsonschema.validate(extract_port_behaviour(random_rigid_multiport(rng)).to_json(), schema)
