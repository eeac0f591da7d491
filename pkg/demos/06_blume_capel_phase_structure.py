"""Blume-Capel phase structure: two zero curves, multiple points, the sweep.

At weakly negative single-site weight the zeros concentrate on two curves
related by circle inversion; as the weight grows a shared unit-circle arc
develops, pinned by two multiple points, until everything collapses onto
the circle.  This script locates the multiple points, traces the curves,
sweeps the exact zero sets, and writes a two-curve overlay plot.
"""

import cmath
import math
import pathlib

from pszeros import (
    PhaseEvaluator,
    blume_capel,
    exact_zeros,
    find_multiple_points,
    partition_polynomial,
    trace_coexistence,
)
from pszeros.cli import emit_plot

J = 1.5

# multiple points at small positive lambda
model = blume_capel(J, 0.001)
mp = find_multiple_points(model, [cmath.exp(1.1j), cmath.exp(-1.1j)])
print("multiple points (three phases tied):")
for q in mp:
    print(f"  z = {q.z:.6f}   |z| = {abs(q.z):.6f}   phases {q.phases}")

# the two off-circle curves at negative lambda, mirrored by inversion
split = blume_capel(J, -0.05)
ev = PhaseEvaluator(split)
up = trace_coexistence(split, 1, 0, seed=math.exp(0.05), step=0.05,
                       max_points=120, evaluator=ev)
dn = trace_coexistence(split, 0, -1, seed=math.exp(-0.05), step=0.05,
                       max_points=120, evaluator=ev)
print(f"\nlambda = -0.05: plus/zero curve radius about "
      f"{sum(abs(z) for z in up.points) / len(up):.4f}, "
      f"zero/minus about {sum(abs(z) for z in dn.points) / len(dn):.4f}")

zs = exact_zeros(partition_polynomial(split, 3))
out = pathlib.Path(__file__).parent / "output"
out.mkdir(exist_ok=True)
svg = emit_plot(
    filled=list(zs.roots),
    curves=[up.points, dn.points],
    title=f"blume_capel(J={J}, lam=-0.05): two curves, exact zeros",
)
(out / "blume_capel_curves.svg").write_text(svg)
print(f"wrote {out / 'blume_capel_curves.svg'}")

# the sweep: fraction of exact zeros on the unit circle grows with lambda
print("\nlambda sweep at J=1.3 (3x3 torus, 18 zeros each):")
print("  lambda   on-circle fraction")
for lam in (-0.3, -0.15, -0.05, 0.0, 0.1, 0.4):
    roots = exact_zeros(partition_polynomial(blume_capel(1.3, lam), 3)).roots
    frac = sum(1 for r in roots if abs(abs(r) - 1) < 1e-6) / len(roots)
    print(f"  {lam:+.2f}    {frac:.3f}")
