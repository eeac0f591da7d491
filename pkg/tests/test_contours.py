import cmath
import itertools
import json
import math

import pytest

from conftest import all_configs, random_z, sparse_torus_config
from pszeros.contours import (
    ContourSumEngine,
    contour_classes,
    contour_from_json,
    contour_graph,
    contour_partition_function,
    contour_to_json,
    contour_weight,
    contours_in_region,
    exterior_interior,
    extract,
    is_matching,
    nesting_order,
    reconstruct,
    torus_contour_identity_check,
    torus_region_partition_function,
)
from pszeros.lattice import chebyshev_ball, torus
from pszeros.models import (
    TorusConfiguration,
    ZdConfiguration,
    blume_capel,
    excitation_energy_pair,
    ground_state_energy,
    hamiltonian_torus,
    ising,
    pair_weight,
    r_boundary,
    theta,
)


def flip_config(L, sites, background=1, value=-1):
    spins = [background] * (L * L)
    for s in sites:
        spins[s] = value
    return TorusConfiguration(L, 2, tuple(spins))


# -- contour graph ---------------------------------------------------------------


def test_contour_graph_single_flip():
    geom, small, large = contour_graph(flip_config(7, [24]), 1)
    assert large == [] and len(small) == 1
    comp = small[0]
    assert len(comp) == 9
    # all pairs share a non-constant box: the box around the flip holds all 9
    assert comp == frozenset(geom.boxes[24])


def test_contour_graph_two_far_flips():
    # Chebyshev distance 4 on T_9: no shared box, two components
    geom, small, large = contour_graph(flip_config(9, [0, 4]), 1)
    assert len(small) == 2 and not large


def test_contour_graph_constant():
    _, small, large = contour_graph(flip_config(5, []), 1)
    assert small == [] and large == []


# -- exterior / interior -----------------------------------------------------------


def test_exterior_interior_full_block():
    geom = torus(7, 2, 1)
    block = frozenset(geom.index((r, c)) for r in range(3) for c in range(3))
    ext, inte = exterior_interior(geom, block)
    assert inte == frozenset()
    assert len(ext) == 40


def test_exterior_interior_ring():
    geom = torus(9, 2, 1)
    ring = frozenset(
        geom.index((r, c)) for r in range(3) for c in range(3) if (r, c) != (1, 1)
    )
    ext, inte = exterior_interior(geom, ring)
    assert inte == frozenset([geom.index((1, 1))])
    assert len(ext) == 81 - 9


def test_exterior_interior_network_support():
    geom = torus(5, 2, 1)
    column = frozenset(geom.index((r, 0)) for r in range(5))
    ext, inte = exterior_interior(geom, column)
    assert ext == frozenset()
    assert len(inte) == 20


# -- extraction and the bijection ----------------------------------------------------


def test_extract_constant_vacuum():
    coll = extract(flip_config(5, [], background=-1), 1)
    assert coll.contours == () and coll.network is None
    assert coll.vacuum_label == -1


def test_extract_single_flip_contour():
    coll = extract(flip_config(7, [24]), 1)
    assert coll.network is None and len(coll.contours) == 1
    y = coll.contours[0]
    assert len(y.support) == 9
    assert y.ext_label == 1 and y.interiors == ()
    assert y.spins[24] == -1


def test_extract_wrapping_network():
    # a full column on T_5 wraps: it must come out as the network
    coll = extract(flip_config(5, [0, 5, 10, 15, 20]), 1)
    assert coll.contours == () and coll.network is not None


def test_roundtrip_exhaustive_t3_ising():
    m = ising(1.0)
    count = 0
    for cfg in all_configs(m, 3):
        coll = extract(cfg, 1)
        assert reconstruct(coll).spins == cfg.spins
        count += 1
    assert count == 512


def test_roundtrip_random_bc_t5(rng):
    m = blume_capel(1.0, 0.1)
    for _ in range(150):
        cfg = sparse_torus_config(rng, m, 5, rng.randint(0, 6))
        coll = extract(cfg, 1)
        assert reconstruct(coll).spins == cfg.spins
        ok, diag = is_matching(coll)
        assert ok, diag


def test_reconstruct_two_mutually_external(rng):
    cfg = flip_config(9, [0, 4])
    coll = extract(cfg, 1)
    assert len(coll.contours) == 2
    assert reconstruct(coll).spins == cfg.spins


def test_is_matching_label_clash():
    # two one-flip contours whose exterior labels disagree cannot match
    cfg_plus = flip_config(9, [20])
    cfg_minus = flip_config(9, [60], background=-1, value=1)
    y1 = extract(cfg_plus, 1).contours[0]
    y2 = extract(cfg_minus, 1).contours[0]
    from pszeros.contours import MatchingCollection

    coll = MatchingCollection(y1.geom, (y1, y2), None, None)
    ok, diag = is_matching(coll)
    assert not ok and diag
    with pytest.raises(ValueError, match="label mismatch"):
        reconstruct(coll)


def test_is_matching_on_extracted(rng):
    m = blume_capel(1.0, 0.0)
    for _ in range(40):
        coll = extract(sparse_torus_config(rng, m, 5, rng.randint(0, 5)), 1)
        ok, diag = is_matching(coll)
        assert ok, diag


# -- nesting ----------------------------------------------------------------------


def test_nesting_two_external():
    coll = extract(flip_config(9, [0, 4]), 1)
    forest = nesting_order(coll)
    # both contours are children of the (empty) root
    assert forest.parent == (-1, 0, 0)


def test_nesting_chain_depth_two():
    # a ring of flips at Chebyshev radius 4 encloses a separate center flip
    L = 23
    geom = torus(L, 2, 1)
    c = 11
    ring = [
        geom.index((c + dr, c + dc))
        for dr in range(-4, 5)
        for dc in range(-4, 5)
        if max(abs(dr), abs(dc)) == 4
    ]
    cfg = flip_config(L, ring + [geom.index((c, c))])
    coll = extract(cfg, 1)
    assert len(coll.contours) == 2 and coll.network is None
    forest = nesting_order(coll)
    depths = sorted(forest.depth(i) for i in range(len(forest.elements)))
    assert depths == [0, 1, 2]
    assert reconstruct(coll).spins == cfg.spins
    inner = min(coll.contours, key=lambda y: len(y.support))
    outer = max(coll.contours, key=lambda y: len(y.support))
    assert len(inner.support) == 9
    assert dict(outer.interiors)[
        next(comp for comp, _ in outer.interiors)
    ] == 1  # interior label stays the background


def test_nesting_empty_boundary_root():
    coll = extract(flip_config(7, []), 1)
    forest = nesting_order(coll)
    assert forest.elements == (frozenset(),)
    assert forest.parent == (-1,)


# -- weights ------------------------------------------------------------------------


def test_contour_weight_matches_energy_decomposition(rng):
    m = ising(1.3)
    cfg = flip_config(7, [24])
    coll = extract(cfg, 1)
    y = coll.contours[0]
    z = random_z(rng)
    rho = contour_weight(m, y, z)
    bh = hamiltonian_torus(m, cfg, z)
    e_plus = ground_state_energy(m, 1, z)
    assert rho == pytest.approx(cmath.exp(-(bh - 40 * e_plus)), rel=1e-11)


def test_contour_weight_orbit_symmetry(rng):
    # Potts spins 2,3 are interchangeable: permuted contours weigh the same
    from pszeros.models import potts

    m = potts(3, 2.0)
    y2 = extract(flip_config(7, [24], background=1, value=2), 1).contours[0]
    y3 = extract(flip_config(7, [24], background=1, value=3), 1).contours[0]
    z = random_z(rng)
    assert contour_weight(m, y2, z) == pytest.approx(
        contour_weight(m, y3, z), rel=1e-12
    )


def test_contour_weight_flip_relation(rng):
    # the spin flip maps the normalized weight K(z) = rho theta^{-|Y|} to K(1/z)
    m = ising(1.0)
    y_plus = extract(flip_config(7, [24]), 1).contours[0]
    y_minus = extract(flip_config(7, [24], background=-1, value=1), 1).contours[0]
    z = random_z(rng)
    k_plus = contour_weight(m, y_plus, 1 / z) * theta(m, 1, 1 / z) ** -9
    k_minus = contour_weight(m, y_minus, z) * theta(m, -1, z) ** -9
    assert k_minus == pytest.approx(k_plus, rel=1e-11)


def test_energy_additivity_random(rng):
    # betaH = sum_m e_m |Lambda_m| + sum E(Y) + E(N), exactly
    m = blume_capel(1.2, 0.1)
    for _ in range(25):
        cfg = sparse_torus_config(rng, m, 5, rng.randint(1, 8))
        z = random_z(rng)
        coll = extract(cfg, 1)
        total = 0j
        for lab, cnt in coll.region_sizes().items():
            total += cnt * ground_state_energy(m, lab, z)
        for obj in coll.objects():
            c, p = obj.energy_pair(m)
            total += c - p * cmath.log(z)
        bh = hamiltonian_torus(m, cfg, z)
        assert total == pytest.approx(bh, rel=1e-10, abs=1e-10)


# -- contour partition functions -------------------------------------------------------


def test_zq_single_site():
    m = blume_capel(1.5, 0.1)
    z = 0.9 + 0.2j
    val = contour_partition_function(m, [(0, 0)], 0, z)
    assert val == pytest.approx(theta(m, 0, z), rel=1e-12)


def test_zq_region_too_small_for_contours():
    m = ising(1.2)
    region = [(i, j) for i in range(2) for j in range(4)]
    z = 1.1 + 0.3j
    assert contour_partition_function(m, region, 1, z) == pytest.approx(
        theta(m, 1, z) ** 8, rel=1e-12
    )


def _zq_spin_oracle(model, region, q, z):
    """Restricted spin sum: configurations equal to q outside the region with
    every contour volume inside it."""
    region = [tuple(r) for r in region]
    rset = set(region)
    core = [
        x for x in region if all(tuple(y) in rset for y in chebyshev_ball(x, model.range))
    ]
    logz = cmath.log(z)
    total = 0j
    for assign in itertools.product(model.spins, repeat=len(core)):
        dev = {core[i]: s for i, s in enumerate(assign) if s != q}
        cfg = ZdConfiguration.make(q, dev)
        b = r_boundary(cfg, model.range)
        if not set(b) <= rset:
            continue
        c, p = excitation_energy_pair(model, cfg)
        look = cfg.lookup()
        for x in region:
            if x in b:
                continue
            gc, gp = model.ground_pair(look(x))
            c += gc
            p += gp
        total += cmath.exp(-c + p * logz)
    return total


@pytest.mark.parametrize("builder,q", [(lambda: ising(1.1), 1), (lambda: blume_capel(1.2, 0.08), 0)])
def test_zq_matches_spin_sum_4x4(builder, q, rng):
    model = builder()
    region = [(i, j) for i in range(4) for j in range(4)]
    for _ in range(3):
        z = random_z(rng)
        oracle = _zq_spin_oracle(model, region, q, z)
        val = contour_partition_function(model, region, q, z)
        assert abs(val - oracle) / abs(oracle) < 1e-11


def test_zq_with_interior_recursion(rng):
    # a 5x5 region admits contours with a one-site interior
    model = blume_capel(1.4, 0.05)
    region = [(i, j) for i in range(5) for j in range(5)]
    z = random_z(rng)
    oracle = _zq_spin_oracle(model, region, 1, z)
    val = contour_partition_function(model, region, 1, z)
    assert abs(val - oracle) / abs(oracle) < 1e-10


def test_small_torus_regions_have_no_contours():
    m = ising(1.0)
    geom = torus(5, 2, 1)
    region = frozenset(range(12))
    z = 0.8 + 0.1j
    assert torus_region_partition_function(m, geom, region, 1, z) == pytest.approx(
        theta(m, 1, z) ** 12, rel=1e-12
    )


# -- torus identity ---------------------------------------------------------------------


def test_torus_identity_trivial_model(rng):
    from conftest import free_field_model

    m = free_field_model(spins=(-1, 1), site_energy=lambda s: 0.4 * s)
    zs = [random_z(rng)]
    rep = torus_contour_identity_check(m, 3, zs)
    assert rep["collection_max_rel"] < 1e-12 and rep["resummed_max_rel"] < 1e-12


def test_torus_identity_ising(rng):
    zs = [random_z(rng) for _ in range(3)]
    rep = torus_contour_identity_check(ising(1.2), 3, zs)
    assert rep["collection_max_rel"] < 1e-10
    assert rep["resummed_max_rel"] < 1e-10


# -- contour classes and serialization ------------------------------------------------


def test_contour_classes_sizes():
    cls = contour_classes(ising(1.0), 1, 12)
    assert [y.size for y in cls] == [9, 12, 12]
    cls16 = contour_classes(ising(1.0), 1, 16)
    assert {y.size for y in cls16} == {9, 12, 14, 15, 16}


def test_contours_in_region_count():
    assert len(contours_in_region(ising(1.0), 1, [(i, j) for i in range(4) for j in range(4)])) == 15


def test_contour_json_roundtrip():
    y = extract(flip_config(7, [24]), 1).contours[0]
    text = contour_to_json(y)
    data = json.loads(text)
    assert data["ext_label"] == 1
    y2 = contour_from_json(text)
    assert y2.support == y.support and y2.spins == y.spins
    assert y2.key() == y.key()
