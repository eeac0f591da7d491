"""Exact torus partition functions, their coefficient polynomials and zeros.

Everything here is ground truth for the contour machinery: full enumeration
over spin configurations (Gray-code order, incremental energy updates), an
independent transfer-matrix evaluation for range-1 models, and companion
matrix root finding for the partition polynomial in z.
"""

from __future__ import annotations

import cmath
import itertools
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetError
from .models import SpinModel, _torus_placements

ENUM_BUDGET = 2**27
MATRIX_BUDGET = 1024
_RESYNC = 4096  # recompute the running energy from scratch this often


# -- Gray-code enumeration ----------------------------------------------------


def _gray_steps(radix: int, n: int):
    """Reflected mixed-radix Gray sequence: yields (digit, old, new) steps.

    Every state of {0..radix-1}^n is visited exactly once, each step changing
    one digit by +-1.
    """
    a = [0] * n
    d = [1] * n
    while True:
        i = 0
        while i < n:
            b = a[i] + d[i]
            if 0 <= b < radix:
                yield i, a[i], b
                a[i] = b
                break
            d[i] = -d[i]
            i += 1
        if i == n:
            return


def _block_assignments(radix: int, n: int, max_blocks: int = 64):
    """Fixed partition of the configuration space into contiguous blocks by
    pinning the trailing digits.  The partition depends only on the model and
    torus, never on the worker count, so reductions are reproducible."""
    k = 0
    while radix**k < max_blocks and k < n:
        k += 1
    free = n - k
    return [tuple(p) for p in itertools.product(range(radix), repeat=k)], free


def _enumerate_blocks(model: SpinModel, L: int, visit_block, workers: int = 1):
    """Run ``visit_block(pinned_digits, free_digits)`` over all blocks and
    return the per-block results combined in fixed block order."""
    q = len(model.spins)
    n = L**model.dimension
    blocks, free = _block_assignments(q, n)
    if workers <= 1:
        return [visit_block(b, free) for b in blocks]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(lambda b: visit_block(b, free), blocks))


class _RunningEnergy:
    """Total torus energy pair maintained under single-site spin flips."""

    def __init__(self, model: SpinModel, L: int):
        self.model = model
        geom, anchored, _ = _torus_placements(model, L)
        self.geom = geom
        self.anchored = anchored
        # placements covering each site, with full weight (not 1/|shape|)
        cover = [[] for _ in range(geom.n_sites)]
        for x in range(geom.n_sites):
            for ti, sites in anchored[x]:
                for s in set(sites):
                    cover[s].append((model.terms[ti], sites))
        self.cover = cover

    def full(self, spins) -> tuple[complex, float]:
        c, p = 0j, 0.0
        for x in range(self.geom.n_sites):
            for ti, sites in self.anchored[x]:
                tc, tp = self.model.terms[ti].pair(tuple(spins[s] for s in sites))
                c += tc
                p += tp
        return c, p

    def delta(self, spins, site, new_spin) -> tuple[complex, float]:
        dc, dp = 0j, 0.0
        old = spins[site]
        for term, sites in self.cover[site]:
            before = tuple(spins[s] for s in sites)
            after = tuple(
                new_spin if s == site else spins[s] for s in sites
            )
            # a placement may cover `site` several times only if it wrapped,
            # which L >= 2R+1 forbids; patterns therefore differ in one slot
            c1, p1 = term.pair(after)
            c0, p0 = term.pair(before)
            dc += c1 - c0
            dp += p1 - p0
        return dc, dp


def _scan(model: SpinModel, L: int, accumulate, workers: int = 1):
    """Drive ``accumulate(c, p)`` over every configuration's energy pair."""
    q = len(model.spins)
    n = L**model.dimension
    run = _RunningEnergy(model, L)
    spin_of = model.spins

    def visit_block(pinned, free):
        spins = [spin_of[0]] * free + [spin_of[dig] for dig in pinned]
        c, p = run.full(spins)
        acc = accumulate()
        acc.add(c, p)
        count = 0
        for site, _, new in _gray_steps(q, free):
            dc, dp = run.delta(spins, site, spin_of[new])
            spins[site] = spin_of[new]
            c += dc
            p += dp
            count += 1
            if count % _RESYNC == 0:
                c, p = run.full(spins)
            acc.add(c, p)
        return acc

    return _enumerate_blocks(model, L, visit_block, workers)


def partition_function_exact(
    model: SpinModel, L: int, z: complex, budget: int = ENUM_BUDGET, workers: int = 1
) -> complex:
    """Z_L^per(z) by full enumeration of |S|^{L^d} configurations."""
    q = len(model.spins)
    n = L**model.dimension
    if q**n > budget:
        raise BudgetError(
            f"enumeration of {q}^{n} states exceeds budget {budget}; "
            "use transfer_matrix_pf for range-1 models"
        )
    logz = cmath.log(z)

    class Acc:
        __slots__ = ("total",)

        def __init__(self):
            self.total = 0j

        def add(self, c, p):
            self.total += cmath.exp(-c + p * logz)

    parts = _scan(model, L, Acc, workers)
    total = 0j
    for a in parts:
        total += a.total
    return total


# -- transfer matrix ----------------------------------------------------------


def transfer_matrix_pf(
    model: SpinModel, L: int, z: complex, budget: int = MATRIX_BUDGET
) -> complex:
    """Z_L^per(z) as the trace of the L-fold product of the layer-to-layer
    transfer matrix.  Supports range-1 interactions only."""
    if model.range != 1:
        raise BudgetError("transfer matrix supports range R=1 only")
    d = model.dimension
    q = len(model.spins)
    layer_sites = L ** (d - 1)
    n = q**layer_sites
    if n > budget:
        raise BudgetError(f"transfer matrix dimension {n} exceeds budget {budget}")

    layer_coords = [tuple(p) for p in itertools.product(range(L), repeat=d - 1)]
    layer_index = {c: i for i, c in enumerate(layer_coords)}
    states = [tuple(p) for p in itertools.product(range(q), repeat=layer_sites)]
    spins = model.spins
    logz = cmath.log(z)

    intra, inter = [], []
    for t in model.terms:
        firsts = {off[0] for off in t.shape}
        if firsts == {0}:
            intra.append(t)
        else:
            inter.append(t)

    def wrap(coord):
        return tuple(c % L for c in coord)

    # energies within one layer (site terms and in-layer bonds), per state
    ec = np.zeros(n, dtype=complex)
    ep = np.zeros(n, dtype=float)
    for si, st in enumerate(states):
        c, p = 0j, 0.0
        for t in intra:
            for anchor in layer_coords:
                pat = tuple(
                    spins[st[layer_index[wrap(tuple(anchor[a] + off[a + 1] for a in range(d - 1)))]]]
                    for off in t.shape
                )
                tc, tp = t.pair(pat)
                c += tc
                p += tp
        ec[si] = c
        ep[si] = p

    # layer-to-layer coupling
    cc = np.zeros((n, n), dtype=complex)
    cp = np.zeros((n, n), dtype=float)
    pair_terms = [t for t in inter if len(t.shape) == 2]
    other_terms = [t for t in inter if len(t.shape) != 2]
    st_arr = np.array(states, dtype=np.intp)
    for t in pair_terms:
        (o0, o1) = t.shape if t.shape[0][0] == 0 else (t.shape[1], t.shape[0])
        tc = np.array(
            [[t.energy[(spins[a], spins[b])] for b in range(q)] for a in range(q)],
            dtype=complex,
        )
        tp = np.array(
            [[t.zpower.get((spins[a], spins[b]), 0.0) for b in range(q)] for a in range(q)],
            dtype=float,
        )
        for k, coord in enumerate(layer_coords):
            tgt = layer_index[wrap(tuple(coord[a] + o1[a + 1] - o0[a + 1] for a in range(d - 1)))]
            ia = st_arr[:, k]
            jb = st_arr[:, tgt]
            cc += tc[ia[:, None], jb[None, :]]
            cp += tp[ia[:, None], jb[None, :]]
    for t in other_terms:  # rare multi-site cross-layer shapes
        for i, si in enumerate(states):
            for j, sj in enumerate(states):
                c, p = 0j, 0.0
                for anchor in layer_coords:
                    pat = []
                    for off in t.shape:
                        rest = wrap(tuple(anchor[a] + off[a + 1] for a in range(d - 1)))
                        src = si if off[0] == 0 else sj
                        pat.append(spins[src[layer_index[rest]]])
                    tc, tp = t.pair(tuple(pat))
                    c += tc
                    p += tp
                cc[i, j] += c
                cp[i, j] += p

    T = np.exp(-(ec[:, None] + cc) + (ep[:, None] + cp) * logz)
    return complex(np.trace(np.linalg.matrix_power(T, L)))


# -- partition polynomial -----------------------------------------------------


@dataclass(frozen=True)
class PartitionPolynomial:
    """Z_L^per as a polynomial in z: coefficients c_0..c_D by power of z."""

    coefficients: tuple
    side: int
    tag: str = ""

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, z: complex) -> complex:
        acc = 0j
        for c in reversed(self.coefficients):
            acc = acc * z + c
        return acc

    def to_json(self) -> str:
        return json.dumps(
            {
                "tag": self.tag,
                "L": self.side,
                "degree": self.degree,
                "coefficients": [[c.real, c.imag] for c in self.coefficients],
            },
            indent=1,
        )


def partition_polynomial(
    model: SpinModel, L: int, budget: int = ENUM_BUDGET, workers: int = 1
) -> PartitionPolynomial:
    """Exact coefficients of Z_L^per in z.

    Requires the normalization in which the z dependence sits entirely in
    single-site weights with nonnegative integer powers, so each
    configuration contributes a monomial z^k with k the total site power.
    """
    max_site_power = 0
    for t in model.terms:
        powers = set(t.zpower.values()) | {0.0}
        if len(t.shape) > 1:
            if powers != {0.0}:
                raise BudgetError("not polynomial in z: multi-site z powers")
        else:
            if any(p < 0 or p != int(p) for p in powers):
                raise BudgetError("not polynomial in z: fractional or negative powers")
            max_site_power = max(max_site_power, int(max(powers)))
    q = len(model.spins)
    n = L**model.dimension
    if q**n > budget:
        raise BudgetError(f"enumeration of {q}^{n} states exceeds budget {budget}")
    D = n * max_site_power

    class Acc:
        __slots__ = ("co",)

        def __init__(self):
            self.co = np.zeros(D + 1, dtype=complex)

        def add(self, c, p):
            self.co[int(round(p))] += cmath.exp(-c)

    parts = _scan(model, L, Acc, workers)
    co = np.zeros(D + 1, dtype=complex)
    for a in parts:
        co += a.co
    return PartitionPolynomial(tuple(co.tolist()), L, tag=f"{model.name} L={L}")


# -- zeros ---------------------------------------------------------------------


@dataclass(frozen=True)
class ExactZeroSet:
    roots: tuple
    residual: float
    degree: int
    notes: tuple = field(default=())

    def to_csv_rows(self):
        rows = [("re", "im", "abs", "arg")]
        for r in sorted(self.roots, key=lambda w: (round(cmath.phase(w), 12), abs(w))):
            rows.append(
                (
                    format(r.real, ".17g"),
                    format(r.imag, ".17g"),
                    format(abs(r), ".17g"),
                    format(cmath.phase(r), ".17g"),
                )
            )
        return rows

    def to_json(self) -> str:
        return json.dumps(
            {
                "degree": self.degree,
                "residual": self.residual,
                "roots": [[r.real, r.imag] for r in self.roots],
                "notes": list(self.notes),
            },
            indent=1,
        )


def exact_zeros(poly: PartitionPolynomial, newton_steps: int = 5) -> ExactZeroSet:
    """All roots of the partition polynomial: companion-matrix eigenvalues
    (with balancing, as in numpy's root finder) followed by Newton polish."""
    co = np.asarray(poly.coefficients, dtype=complex)
    if len(co) < 2:
        raise BudgetError("polynomial degree must be at least 1")
    notes = []
    scale = float(np.max(np.abs(co)))
    lead = len(co) - 1
    while lead > 0 and abs(co[lead]) <= 1e-14 * scale:
        lead -= 1
    if lead < len(co) - 1:
        notes.append(f"deflated {len(co) - 1 - lead} near-zero leading coefficients")
    trail = 0
    while trail < lead and abs(co[trail]) <= 1e-14 * scale:
        trail += 1
    roots = [0j] * trail
    if trail:
        notes.append(f"{trail} roots at z=0 from vanishing low-order coefficients")
    work = co[trail : lead + 1]
    r = np.roots(work[::-1])
    dwork = work[1:] * np.arange(1, len(work))
    for _ in range(newton_steps):
        pv = np.polyval(work[::-1], r)
        dv = np.polyval(dwork[::-1], r)
        ok = np.abs(dv) > 1e-30
        r = np.where(ok, r - pv / np.where(ok, dv, 1), r)
    roots.extend(complex(x) for x in r)
    # residual scaled by the coefficient mass at each root
    res = 0.0
    for x in roots:
        mass = float(np.sum(np.abs(co) * np.abs(x) ** np.arange(len(co))))
        res = max(res, abs(poly(x)) / max(mass, 1e-300))
    return ExactZeroSet(tuple(roots), res, poly.degree, tuple(notes))
