"""Contours: extraction from configurations, matching, and contour sums.

A configuration on the torus decomposes into connected pieces of its
R-boundary.  Pieces whose vertex set has (wrapped) diameter below L/2 become
contours, each carrying a standardized configuration that keeps only that
piece's deviation; the remaining pieces merge into a single contour network.
Extraction and reconstruction are mutually inverse bijections between
configurations and matching collections, and the induced rewriting of the
Boltzmann weight turns the spin sum into contour sums that this module also
evaluates directly (by recursion over external contours) for cross-checks.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

from .errors import BudgetError
from .lattice import (
    Torus,
    chebyshev_ball,
    torus,
    zd_components,
    zd_diameter,
    zd_holes,
)
from .models import (
    SpinModel,
    TorusConfiguration,
    ZdConfiguration,
    excitation_energy_pair,
    pair_weight,
)

ENUM_CORE_BUDGET = 2**21


# -- objects -------------------------------------------------------------------


class TorusContour:
    """A contour on the torus: connected support of wrapped diameter < L/2
    with its standardized configuration (support spins plus one label per
    complement component)."""

    __slots__ = ("geom", "support", "spins", "ext_component", "ext_label",
                 "interiors", "_key", "_pair")

    def __init__(self, geom, support, spins, ext_component, ext_label, interiors):
        self.geom = geom
        self.support = support            # frozenset of site indices
        self.spins = spins                # dict site -> spin on the support
        self.ext_component = ext_component
        self.ext_label = ext_label
        self.interiors = interiors        # tuple of (frozenset, label)
        self._key = None
        self._pair = None

    @property
    def size(self) -> int:
        return len(self.support)

    def key(self):
        if self._key is None:
            sup = tuple(sorted(self.support))
            self._key = (
                sup,
                tuple(self.spins[s] for s in sup),
                self.ext_label,
                tuple(sorted((min(c), lab) for c, lab in self.interiors)),
            )
        return self._key

    def value_at(self, x) -> object:
        if x in self.support:
            return self.spins[x]
        if x in self.ext_component:
            return self.ext_label
        for comp, lab in self.interiors:
            if x in comp:
                return lab
        raise KeyError(x)

    def full_config(self) -> TorusConfiguration:
        arr = [None] * self.geom.n_sites
        for s in self.support:
            arr[s] = self.spins[s]
        for s in self.ext_component:
            arr[s] = self.ext_label
        for comp, lab in self.interiors:
            for s in comp:
                arr[s] = lab
        return TorusConfiguration(self.geom.L, self.geom.d, tuple(arr))

    def energy_pair(self, model: SpinModel):
        if self._pair is None:
            self._pair = excitation_energy_pair(model, self.full_config())
        return self._pair

    def to_json_dict(self):
        return {
            "kind": "contour",
            "L": self.geom.L,
            "d": self.geom.d,
            "R": self.geom.R,
            "support": sorted(self.geom.coords[s] for s in self.support),
            "spins": [self.spins[s] for s in sorted(self.support)],
            "ext_label": self.ext_label,
            "interiors": [
                {"sites": sorted(self.geom.coords[s] for s in comp), "label": lab}
                for comp, lab in sorted(self.interiors, key=lambda cl: min(cl[0]))
            ],
        }


class TorusNetwork:
    """The union of the large R-boundary pieces, with its configuration."""

    __slots__ = ("geom", "support", "spins", "labels", "_key", "_pair")

    def __init__(self, geom, support, spins, labels):
        self.geom = geom
        self.support = support
        self.spins = spins
        self.labels = labels  # tuple of (frozenset component, label)
        self._key = None
        self._pair = None

    @property
    def size(self) -> int:
        return len(self.support)

    def key(self):
        if self._key is None:
            sup = tuple(sorted(self.support))
            self._key = (
                sup,
                tuple(self.spins[s] for s in sup),
                tuple(sorted((min(c), lab) for c, lab in self.labels)),
            )
        return self._key

    def value_at(self, x):
        if x in self.support:
            return self.spins[x]
        for comp, lab in self.labels:
            if x in comp:
                return lab
        raise KeyError(x)

    def full_config(self) -> TorusConfiguration:
        arr = [None] * self.geom.n_sites
        for s in self.support:
            arr[s] = self.spins[s]
        for comp, lab in self.labels:
            for s in comp:
                arr[s] = lab
        return TorusConfiguration(self.geom.L, self.geom.d, tuple(arr))

    def energy_pair(self, model: SpinModel):
        if self._pair is None:
            self._pair = excitation_energy_pair(model, self.full_config())
        return self._pair


@dataclass(frozen=True, eq=False)
class MatchingCollection:
    geom: Torus
    contours: tuple
    network: object  # TorusNetwork or None
    vacuum_label: object  # used only when contours and network are both empty

    def objects(self):
        out = list(self.contours)
        if self.network is not None:
            out.append(self.network)
        return out

    def region_sizes(self) -> dict:
        """|Lambda_m|: number of sites outside all supports carrying label m."""
        counts = {}
        occupied = set()
        for o in self.objects():
            occupied.update(o.support)
        for x in range(self.geom.n_sites):
            if x in occupied:
                continue
            if not self.objects():
                lab = self.vacuum_label
            else:
                lab = self.objects()[0].value_at(x)
            counts[lab] = counts.get(lab, 0) + 1
        return counts


# -- extraction ----------------------------------------------------------------


def contour_graph(config: TorusConfiguration, R: int):
    """Components of the shared-bad-box graph on the R-boundary, classified
    by wrapped diameter: two boundary sites are linked whenever one box of
    diameter 2R+1 contains both and is non-constant.  Returns (geometry,
    small components, large components)."""
    geom = config.torus(R)
    spins = config.spins
    bad = set()
    for c, box in enumerate(geom.boxes):
        v0 = spins[box[0]]
        if any(spins[i] != v0 for i in box[1:]):
            bad.add(c)
    parent = {x: x for x in bad}

    def find(x):
        r = x
        while parent[r] != r:
            r = parent[r]
        while parent[x] != r:
            parent[x], x = r, parent[x]
        return r

    for c in bad:
        ra = find(c)
        for s in geom.boxes[c]:
            if s in parent:
                rb = find(s)
                if rb != ra:
                    parent[rb] = ra
    comps = {}
    for x in parent:
        comps.setdefault(find(x), []).append(x)
    small, large = [], []
    for sites in comps.values():
        c = frozenset(sites)
        if 2 * geom.diameter(c) < geom.L:
            small.append(c)
        else:
            large.append(c)
    small.sort(key=min)
    large.sort(key=min)
    return geom, small, large


def _component_labels(geom: Torus, support: frozenset, spins):
    """Label every component of the complement of ``support`` by the common
    spin value on its outer boundary ring (which lies inside the support)."""
    complement = [x for x in range(geom.n_sites) if x not in support]
    out = []
    for comp in sorted(geom.components(complement), key=min):
        values = {
            spins[y]
            for x in comp
            for y in geom.neighbors[x]
            if y in support
        }
        if len(values) != 1:
            raise AssertionError(
                "boundary of a complement component is not constant; "
                "extraction invariant violated"
            )
        out.append((comp, values.pop()))
    return out


def exterior_interior(geom: Torus, support: frozenset):
    """Split the complement of a support into exterior and interior.

    For a connected support of diameter < L/2 the exterior is the unique
    complement component with more than half of all sites; for a union of
    large components the exterior is empty by convention.
    """
    if 2 * geom.diameter(support) >= geom.L:
        return frozenset(), frozenset(range(geom.n_sites)) - support
    comps = geom.components([x for x in range(geom.n_sites) if x not in support])
    big = [c for c in comps if 2 * len(c) > geom.n_sites]
    assert len(big) == 1, "no unique exterior; support violates the diameter bound"
    ext = big[0]
    interior = frozenset(
        x for x in range(geom.n_sites) if x not in support and x not in ext
    )
    return ext, interior


def extract(config: TorusConfiguration, R: int) -> MatchingCollection:
    """Decompose a configuration into its unique matching collection."""
    geom, small, large = contour_graph(config, R)
    spins = config.spins
    if not small and not large:
        return MatchingCollection(geom, (), None, spins[0])
    contours = []
    for sup in small:
        labels = _component_labels(geom, sup, spins)
        ext, _ = exterior_interior(geom, sup)
        ext_label = None
        interiors = []
        for comp, lab in labels:
            if comp == ext:
                ext_label = lab
            else:
                interiors.append((comp, lab))
        contours.append(
            TorusContour(
                geom, sup, {s: spins[s] for s in sup}, ext, ext_label,
                tuple(interiors),
            )
        )
    network = None
    if large:
        sup = frozenset().union(*large)
        labels = _component_labels(geom, sup, spins)
        network = TorusNetwork(geom, sup, {s: spins[s] for s in sup}, tuple(labels))
    contours.sort(key=lambda y: min(y.support))
    return MatchingCollection(geom, tuple(contours), network, None)


def reconstruct(collection: MatchingCollection, side: int | None = None) -> TorusConfiguration:
    """The unique configuration whose extraction is ``collection``."""
    geom = collection.geom
    if side is not None and side != geom.L:
        raise ValueError("side disagrees with the collection's torus")
    objects = collection.objects()
    if not objects:
        if collection.vacuum_label is None:
            raise ValueError("label mismatch: empty collection needs a vacuum label")
        return TorusConfiguration(
            geom.L, geom.d, (collection.vacuum_label,) * geom.n_sites
        )
    arr = [None] * geom.n_sites
    union = set()
    for o in objects:
        if union & o.support:
            raise ValueError("label mismatch: supports overlap")
        union.update(o.support)
        for s in o.support:
            arr[s] = o.spins[s]
    complement = [x for x in range(geom.n_sites) if x not in union]
    for comp in sorted(geom.components(complement), key=min):
        ring = {
            y for x in comp for y in geom.neighbors[x] if y in union
        }
        values = set()
        for o in objects:
            if ring & o.support:
                values.add(o.value_at(min(comp)))
        if len(values) != 1:
            raise ValueError(
                f"label mismatch on the complement component at site {min(comp)}: "
                f"adjacent objects induce {sorted(map(repr, values))}"
            )
        lab = values.pop()
        for x in comp:
            arr[x] = lab
    return TorusConfiguration(geom.L, geom.d, tuple(arr))


def is_matching(collection: MatchingCollection):
    """Check the matching conditions; returns (ok, diagnostics)."""
    geom = collection.geom
    objects = collection.objects()
    diagnostics = []
    if not objects:
        ok = collection.vacuum_label is not None
        if not ok:
            diagnostics.append("empty collection without a vacuum label")
        return ok, diagnostics
    union = set()
    for o in objects:
        overlap = union & o.support
        if overlap:
            diagnostics.append(f"supports overlap at sites {sorted(overlap)[:4]}")
        union.update(o.support)
    shrunk = set()
    for o in objects:
        shrunk.update(geom.shrink(o.support))
    complement = [x for x in range(geom.n_sites) if x not in shrunk]
    for comp in sorted(geom.components(complement), key=min):
        touching = [o for o in objects if o.support & comp]
        if len(touching) < 2:
            continue
        base = touching[0]
        for other in touching[1:]:
            for x in comp:
                if base.value_at(x) != other.value_at(x):
                    diagnostics.append(
                        f"objects disagree at site {x}: "
                        f"{base.value_at(x)!r} vs {other.value_at(x)!r}"
                    )
                    break
    return not diagnostics, diagnostics


# -- nesting ---------------------------------------------------------------------


@dataclass(frozen=True)
class NestingForest:
    elements: tuple      # frozensets; elements[0] is the root
    parent: tuple        # parent[i] = index of parent, -1 for the root

    def children(self, i: int):
        return [j for j, p in enumerate(self.parent) if p == i]

    def depth(self, i: int) -> int:
        d = 0
        while self.parent[i] >= 0:
            i = self.parent[i]
            d += 1
        return d


def nesting_order(collection: MatchingCollection) -> NestingForest:
    """Organize supports into the ancestor forest.

    The root is the union of large components (possibly empty, in which case
    its interior is the whole torus).  For every pair of elements exactly one
    holds: one contains the other in its interior, or they are mutually
    external; a violation indicates a bug and raises.
    """
    geom = collection.geom
    root = collection.network.support if collection.network is not None else frozenset()
    elems = [root] + [y.support for y in collection.contours]
    full = frozenset(range(geom.n_sites))
    vol, inte, exte = [], [], []
    for i, e in enumerate(elems):
        if i == 0:
            ext, inner = frozenset(), full - e
        else:
            ext, inner = exterior_interior(geom, e)
        vol.append(e | inner)
        inte.append(inner)
        exte.append(ext)
    n = len(elems)
    below = [[False] * n for _ in range(n)]
    for i in range(1, n):
        for j in range(n):
            if i == j:
                continue
            a_in_b = vol[i] <= inte[j]
            b_in_a = vol[j] <= inte[i]
            mutual = vol[i] <= exte[j] and vol[j] <= exte[i] if j else False
            if sum((a_in_b, b_in_a, mutual)) != 1:
                raise RuntimeError(
                    "nesting trichotomy violated; contour bookkeeping is broken"
                )
            below[i][j] = a_in_b
    parent = [-1] * n
    for i in range(1, n):
        ancestors = [j for j in range(n) if below[i][j]]
        parent[i] = min(ancestors, key=lambda j: len(vol[j]))
    return NestingForest(tuple(elems), tuple(parent))


# -- weights ---------------------------------------------------------------------


def contour_weight(model: SpinModel, obj, z: complex) -> complex:
    """rho_z = exp(-E) for a contour or network (torus or embedded)."""
    return pair_weight(obj.energy_pair(model), z)


# -- contours embedded in Z^d -----------------------------------------------------


class ZdContour:
    """A contour on Z^d with exterior label q, stored up to translation."""

    __slots__ = ("q", "support", "spins", "interiors", "_pair", "_key")

    def __init__(self, q, support, spins, interiors):
        self.q = q
        self.support = support          # frozenset of coords
        self.spins = spins              # dict coord -> spin
        self.interiors = interiors      # tuple of (frozenset coords, label)
        self._pair = None
        self._key = None

    @property
    def size(self) -> int:
        return len(self.support)

    @property
    def volume(self) -> frozenset:
        v = set(self.support)
        for comp, _ in self.interiors:
            v.update(comp)
        return frozenset(v)

    def key(self):
        if self._key is None:
            sup = tuple(sorted(self.support))
            self._key = (
                self.q,
                sup,
                tuple(self.spins[s] for s in sup),
                tuple(sorted((min(c), lab) for c, lab in self.interiors)),
            )
        return self._key

    def config(self) -> ZdConfiguration:
        dev = {}
        for s, v in self.spins.items():
            if v != self.q:
                dev[s] = v
        for comp, lab in self.interiors:
            if lab != self.q:
                for s in comp:
                    dev[s] = lab
        return ZdConfiguration.make(self.q, dev)

    def energy_pair(self, model: SpinModel):
        if self._pair is None:
            self._pair = excitation_energy_pair(model, self.config())
        return self._pair

    def translate(self, shift):
        d = len(shift)

        def mv(c):
            return tuple(c[a] + shift[a] for a in range(d))

        return ZdContour(
            self.q,
            frozenset(mv(c) for c in self.support),
            {mv(c): v for c, v in self.spins.items()},
            tuple((frozenset(mv(c) for c in comp), lab) for comp, lab in self.interiors),
        )


def _zd_contour_from_deviations(model, q, deviations):
    """Build the contour of a background-q configuration with the given
    deviations, or None if its bad region is not a single component."""
    from .models import r_boundary

    cfg = ZdConfiguration.make(q, deviations)
    support = r_boundary(cfg, model.range)
    if not support:
        return None
    look = cfg.lookup()
    # two boundary sites are linked when one non-constant box contains both
    parent = {x: x for x in support}

    def find(x):
        r = x
        while parent[r] != r:
            r = parent[r]
        while parent[x] != r:
            parent[x], x = r, parent[x]
        return r

    for c in support:
        ra = find(c)
        for s in chebyshev_ball(c, model.range):
            if s in parent and s != c:
                rb = find(s)
                if rb != ra:
                    parent[rb] = ra
    roots = {find(x) for x in support}
    if len(roots) != 1:
        return None
    holes = zd_holes(support)
    interiors = []
    for comp in sorted(holes, key=min):
        vals = {look(x) for x in comp}
        assert len(vals) == 1, "hole of a contour support is not constant"
        interiors.append((comp, vals.pop()))
    spins = {x: look(x) for x in support}
    return ZdContour(q, support, spins, tuple(interiors))


def contours_in_region(model: SpinModel, q, region, budget: int = ENUM_CORE_BUDGET):
    """All q-contours whose support and interior fit inside ``region``
    (a finite set of Z^d coordinates)."""
    region = frozenset(tuple(x) for x in region)
    core = sorted(
        x for x in region if all(tuple(y) in region for y in chebyshev_ball(x, model.range))
    )
    others = [s for s in model.spins if s != q]
    total = (len(others) + 1) ** len(core)
    if total > budget:
        raise BudgetError(
            f"contour enumeration over a {len(core)}-site core exceeds budget"
        )
    out = []
    for assignment in itertools.product([None] + others, repeat=len(core)):
        dev = {core[i]: s for i, s in enumerate(assignment) if s is not None}
        if not dev:
            continue
        y = _zd_contour_from_deviations(model, q, dev)
        if y is None:
            continue
        if not (y.support <= region and y.volume <= region):
            continue
        out.append(y)
    out.sort(key=lambda y: y.key())
    return out


def contour_classes(model: SpinModel, q, max_support: int, linkage: int | None = None):
    """Translation classes of q-contours with support size <= max_support.

    Deviation patterns are grown under a Chebyshev linkage radius; for the
    support caps used here (a few boxes) this enumerates every class.
    """
    R = model.range
    d = model.dimension
    if max_support > 2 * (2 * R + 1) ** d:
        raise BudgetError("size cap too large for pattern enumeration")
    # deviations further apart than 2R+1 cannot share a non-constant box, and
    # each extra deviation enlarges the boundary by at least one box face
    link = linkage if linkage is not None else 2 * R + 1
    max_dev = 1 + max(
        0, (max_support - (2 * R + 1) ** d) // ((2 * R + 1) ** (d - 1))
    )
    others = [s for s in model.spins if s != q]

    patterns = {frozenset([(0,) * d])}
    frontier = list(patterns)
    while frontier:
        new = []
        for pat in frontier:
            if len(pat) >= max_dev:
                continue
            for x in pat:
                for off in itertools.product(range(-link, link + 1), repeat=d):
                    y = tuple(x[a] + off[a] for a in range(d))
                    if y in pat:
                        continue
                    cand = frozenset(pat | {y})
                    canon = _canon_sites(cand)
                    if canon not in patterns:
                        patterns.add(canon)
                        new.append(canon)
        frontier = new

    classes = []
    seen = set()
    for pat in sorted(patterns, key=sorted):
        for labs in itertools.product(others, repeat=len(pat)):
            dev = dict(zip(sorted(pat), labs))
            y = _zd_contour_from_deviations(model, q, dev)
            if y is None or y.size > max_support:
                continue
            yc = _canon_contour(y)
            if yc.key() in seen:
                continue
            seen.add(yc.key())
            classes.append(yc)
    classes.sort(key=lambda y: (y.size, y.key()))
    return classes


def _canon_sites(sites: frozenset) -> frozenset:
    d = len(next(iter(sites)))
    lo = [min(p[a] for p in sites) for a in range(d)]
    return frozenset(tuple(p[a] - lo[a] for a in range(d)) for p in sites)


def _canon_contour(y: ZdContour) -> ZdContour:
    d = len(next(iter(y.support)))
    lo = [min(p[a] for p in y.support) for a in range(d)]
    return y.translate(tuple(-v for v in lo))


# -- contour partition functions ---------------------------------------------


def _canon_region(region: frozenset):
    if not region:
        return (), (0,)
    d = len(next(iter(region)))
    lo = tuple(min(p[a] for p in region) for a in range(d))
    return tuple(sorted(tuple(p[a] - lo[a] for a in range(d)) for p in region)), lo


class ContourSumEngine:
    """Evaluates Z_q(region) = sum over matching collections with external
    q-contours, by recursion over mutually external contours and their
    interiors, memoized on the translation-canonical region."""

    def __init__(self, model: SpinModel, z: complex, budget: int = ENUM_CORE_BUDGET):
        self.model = model
        self.z = z
        self.budget = budget
        self.theta = {
            m: pair_weight(model.ground_pair(m), z) for m in model.spins
        }
        self._memo = {}

    def partition_function(self, region, q) -> complex:
        region = frozenset(tuple(x) for x in region)
        key_sites, _ = _canon_region(region)
        key = (key_sites, q)
        if key in self._memo:
            return self._memo[key]
        contours = contours_in_region(self.model, q, region, self.budget)
        vols = [y.volume for y in contours]
        weights = []
        for y in contours:
            w = pair_weight(y.energy_pair(self.model), self.z)
            for comp, lab in y.interiors:
                w *= self.partition_function(comp, lab)
            weights.append(w)
        thq = self.theta[q]
        total = 0j

        def rec(i, free, acc):
            nonlocal total
            total += acc * thq ** len(free)
            for j in range(i, len(contours)):
                if vols[j] <= free:
                    rec(j + 1, free - vols[j], acc * weights[j])

        rec(0, region, 1.0 + 0j)
        self._memo[key] = total
        return total


def contour_partition_function(
    model: SpinModel, region, q, z: complex, budget: int = ENUM_CORE_BUDGET
) -> complex:
    """Z_q over a finite Z^d region (iterable of coordinate tuples)."""
    return ContourSumEngine(model, z, budget).partition_function(region, q)


def torus_region_partition_function(
    model: SpinModel, geom: Torus, region, q, z: complex,
    budget: int = ENUM_CORE_BUDGET,
) -> complex:
    """Z_q over a subset of the torus.  Tori with L <= 4R+2 admit no
    contours at all (any bad region has diameter at least 2R+1 >= L/2), so
    the sum collapses to the pure ground-state weight."""
    region = frozenset(region)
    if geom.L <= 4 * geom.R + 2:
        return pair_weight(model.ground_pair(q), z) ** len(region)
    # larger tori: embed each component into Z^d (diameter < L/2 fits)
    total = 1.0 + 0j
    engine = ContourSumEngine(model, z, budget)
    for comp in geom.components(region):
        if 2 * geom.diameter(comp) >= geom.L:
            raise BudgetError(
                "torus region component too large to embed into Z^d"
            )
        coords = _embed_component(geom, comp)
        total *= engine.partition_function(coords, q)
    return total


def _embed_component(geom: Torus, comp: frozenset):
    """Unwrap a small-diameter torus component to Z^d coordinates."""
    L = geom.L
    out = {}
    seed = min(comp)
    out[seed] = geom.coords[seed]
    stack = [seed]
    comp = set(comp)
    while stack:
        x = stack.pop()
        cx = out[x]
        for y in geom.neighbors[x]:
            if y in comp and y not in out:
                cy = geom.coords[y]
                lifted = []
                for a in range(geom.d):
                    delta = (cy[a] - geom.coords[x][a]) % L
                    if delta == L - 1:
                        delta = -1
                    lifted.append(cx[a] + delta)
                out[y] = tuple(lifted)
                stack.append(y)
    return frozenset(out.values())


# -- the torus identity --------------------------------------------------------


def torus_contour_identity_check(
    model: SpinModel, L: int, zs, budget: int = 2**22
) -> dict:
    """Evaluate the two contour representations of the torus partition sum
    and compare both with direct enumeration.

    The first form sums over all matching collections the product of ground
    state weights and standardized contour/network weights; the second sums
    over contour networks alone, with every label region resummed into a
    contour partition function.  Both must reproduce the configuration sum
    exactly.
    """
    from .models import hamiltonian_torus_pair

    q = len(model.spins)
    n = L**model.dimension
    if q**n > budget:
        raise BudgetError("torus identity check exceeds enumeration budget")
    geom = torus(L, model.dimension, model.range)

    weight_pairs = {}

    def object_pair(o):
        k = o.key()
        if k not in weight_pairs:
            weight_pairs[k] = o.energy_pair(model)
        return weight_pairs[k]

    ground = {m: model.ground_pair(m) for m in model.spins}

    config_terms = []   # (c, p) for the direct Boltzmann factor
    collection_sum_terms = []      # (c, p) for the matching-collection product
    networks = []       # (network pair, component regions+labels) for ZL2
    vacuum_seen = set()

    for assignment in itertools.product(model.spins, repeat=n):
        cfg = TorusConfiguration(L, model.dimension, assignment)
        config_terms.append(hamiltonian_torus_pair(model, cfg))
        coll = extract(cfg, model.range)
        c, p = 0j, 0.0
        for m, cnt in coll.region_sizes().items():
            gc, gp = ground[m]
            c += gc * cnt
            p += gp * cnt
        for o in coll.objects():
            oc, op = object_pair(o)
            c += oc
            p += op
        collection_sum_terms.append((c, p))
        if not coll.contours:
            if coll.network is None:
                vacuum_seen.add(coll.vacuum_label)
            else:
                regions = [
                    (comp, lab) for comp, lab in coll.network.labels
                ]
                networks.append((object_pair(coll.network), regions))

    assert vacuum_seen == set(model.spins)

    import cmath

    report = {"collection_max_rel": 0.0, "resummed_max_rel": 0.0,
              "n_configs": q**n, "n_networks": len(networks), "per_z": []}
    for z in zs:
        logz = cmath.log(z)
        exact = sum(cmath.exp(-c + p * logz) for c, p in config_terms)
        collection_sum = sum(cmath.exp(-c + p * logz) for c, p in collection_sum_terms)
        engine_cache = {}

        def zq(region, lab):
            key = (tuple(sorted(region)), lab)
            if key not in engine_cache:
                engine_cache[key] = torus_region_partition_function(
                    model, geom, region, lab, z
                )
            return engine_cache[key]

        resummed_sum = sum(
            pair_weight(model.ground_pair(m), z) ** n for m in model.spins
        )
        for pair, regions in networks:
            term = cmath.exp(-pair[0] + pair[1] * logz)
            for comp, lab in regions:
                term *= zq(comp, lab)
            resummed_sum += term
        r1 = abs(collection_sum - exact) / abs(exact)
        r2 = abs(resummed_sum - exact) / abs(exact)
        report["per_z"].append(
            {"z": [z.real, z.imag], "collection_rel": r1, "resummed_rel": r2}
        )
        report["collection_max_rel"] = max(report["collection_max_rel"], r1)
        report["resummed_max_rel"] = max(report["resummed_max_rel"], r2)
    return report


# -- serialization --------------------------------------------------------------


def contour_to_json(obj) -> str:
    return json.dumps(obj.to_json_dict(), sort_keys=True)


def contour_from_json(text: str) -> TorusContour:
    data = json.loads(text)
    geom = torus(data["L"], data["d"], data["R"])
    support = frozenset(geom.index(tuple(c)) for c in data["support"])
    spins = dict(zip((geom.index(tuple(c)) for c in data["support"]), data["spins"]))
    ext, _ = exterior_interior(geom, support)
    interiors = tuple(
        (frozenset(geom.index(tuple(c)) for c in item["sites"]), item["label"])
        for item in data["interiors"]
    )
    return TorusContour(geom, support, spins, ext, data["ext_label"], interiors)
