"""Brute-force colour sums: the Fourier kernel H, the discrete Fourier
transform of the squared 6j-symbol and the relative Turaev-Viro state sum.

Both sums enumerate colourings lexicographically, reject a branch as soon as
one face triple fails, and accumulate terms in scaled arithmetic.  The outer
loop is cut into chunks keyed by the value of the first free colour, so the
partial sums are combined in a fixed order whatever the thread count.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .geometry import Partition
from .qkernel import (FACES, QContext, ScaledComplex, is_admissible_triple, scaled_sum,
                      sixj_scaled)

DEFAULT_BUDGET = 10 ** 9


class BudgetError(RuntimeError):
    """The enumeration would exceed its 6j-evaluation budget."""


def thread_count() -> int:
    """Worker count from QTET_THREADS (default 1)."""
    raw = os.environ.get("QTET_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"QTET_THREADS must be an integer, got {raw!r}") from None
    return max(1, n)


def h_kernel(a: int, b: int, ctx: QContext) -> float:
    """H(a, b) = (-1)^(a+b) [(a+1)(b+1)]; real at q = exp(2 pi i / r)."""
    n = (a + 1) * (b + 1)
    sign = -1.0 if (a + b) % 2 else 1.0
    return sign * math.sin(ctx.step * n) / math.sin(ctx.step)


@dataclass(frozen=True)
class ColoringSpec:
    """Six colours: b_i on the deep slots and a_j on the regular ones."""

    colors: tuple
    mu: tuple = (1, 1, 1, 1, 1, 1)

    def __post_init__(self):
        c = tuple(int(x) for x in self.colors)
        m = tuple(int(x) for x in self.mu)
        if len(c) != 6 or len(m) != 6:
            raise ValueError("colors and mu need six entries")
        if any(x not in (1, -1) for x in m):
            raise ValueError("mu entries must be +1 or -1")
        object.__setattr__(self, "colors", c)
        object.__setattr__(self, "mu", m)

    def check(self, ctx: QContext):
        if any(not 0 <= c <= ctx.r - 2 for c in self.colors):
            raise ValueError(f"colours {self.colors} outside 0..{ctx.r - 2}")
        half = ctx.r / 2
        for c, m in zip(self.colors, self.mu):
            if (c > half) != (m == 1):
                raise ValueError(f"colour {c} is on the wrong side of r/2 for mu={m}")

    def b_I(self, partition: Partition):
        return tuple(self.colors[i] for i in partition.deep)

    def a_J(self, partition: Partition):
        return tuple(self.colors[j] for j in partition.regular)

    def angles(self, ctx: QContext):
        """Realized angles mu_k (2 pi c_k / r - pi)."""
        return np.array([m * (ctx.step * c - math.pi) for c, m in zip(self.colors, self.mu)])


def n_parity(a_J, partition: Partition) -> int:
    """Number of 3-admissible {0,1}-colourings with the parities of a_J."""
    ctx = QContext(3)
    a_J = tuple(a_J)
    if len(a_J) != len(partition.J):
        raise ValueError("a_J does not match the partition")
    count = 0
    for bits in range(64):
        c = [(bits >> k) & 1 for k in range(6)]
        if any(c[j] != a % 2 for j, a in zip(partition.regular, a_J)):
            continue
        if all(is_admissible_triple(c[i], c[j], c[k], ctx) for i, j, k in FACES):
            count += 1
    return count


# ----------------------------------------------------------------------------
# Enumeration

def _schedule(n_free, triples):
    """Group the triples by the deepest free variable they involve."""
    at = [[] for _ in range(n_free)]
    ready = []
    for t in triples:
        free = [p for p in t if p < n_free]
        (at[max(free)] if free else ready).append(t)
    return ready, at


def _walk(vals, depth, n_free, top, at, visit):
    """Depth-first lexicographic enumeration of vals[depth:n_free]."""
    if depth == n_free:
        visit(vals)
        return
    checks = at[depth]
    for v in range(top + 1):
        vals[depth] = v
        ok = True
        for i, j, k in checks:
            x, y, z = vals[i], vals[j], vals[k]
            s = x + y + z
            if s % 2 or s > 2 * top or x + y < z or y + z < x or z + x < y:
                ok = False
                break
        if ok:
            _walk(vals, depth + 1, n_free, top, at, visit)


def _enumerate_scaled(ctx, n_free, fixed, triples, term, budget):
    """Sum ``term(vals)`` over admissible assignments of the free slots.

    ``vals`` holds the free variables first and the fixed values after them;
    ``triples`` index into that layout.
    """
    top = ctx.r - 2
    if (top + 1) ** n_free > budget:
        raise BudgetError(f"{(top + 1) ** n_free} colourings exceed the budget {budget}")
    ready, at = _schedule(n_free, triples)
    base = [0] * n_free + list(fixed)
    for i, j, k in ready:
        if not is_admissible_triple(base[i], base[j], base[k], ctx):
            return ScaledComplex.zero()
    if n_free == 0:
        return term(base)

    def chunk(v0):
        logs, phases = [], []

        def visit(vals):
            t = term(vals)
            if not t.is_zero:
                logs.append(t.log_mag)
                phases.append(t.phase)

        vals = list(base)
        vals[0] = v0
        if all(is_admissible_triple(vals[i], vals[j], vals[k], ctx) for i, j, k in at[0]):
            _walk(vals, 1, n_free, top, at, visit)
        return scaled_sum(logs, np.exp(1j * np.array(phases)))

    workers = thread_count()
    if workers == 1:
        parts = [chunk(v) for v in range(top + 1)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(chunk, range(top + 1)))
    # fixed reduction order: by value of the first free colour
    return scaled_sum([p.log_mag for p in parts], [np.exp(1j * p.phase) for p in parts])


def _log_abs_phase(x):
    if x == 0:
        return ScaledComplex.zero()
    return ScaledComplex(math.log(abs(x)), 0.0 if x > 0 else math.pi)


def yhat_scaled(spec: ColoringSpec, partition: Partition, ctx: QContext,
                kernel=h_kernel, budget: int = DEFAULT_BUDGET) -> ScaledComplex:
    """Discrete Fourier transform of the squared 6j-symbol, scaled.

    Sums prod_{i in I} H(a_i, b_i) * 6j(a)^2 over all a_I with the regular
    colours a_J held fixed.
    """
    if any(not 0 <= c <= ctx.r - 2 for c in spec.colors):
        raise ValueError(f"colours {spec.colors} outside 0..{ctx.r - 2}")
    deep, regular = partition.deep, partition.regular
    # layout: deep slots first (free), then regular slots (fixed)
    pos = {s: n for n, s in enumerate(deep + regular)}
    triples = [tuple(pos[s] for s in f) for f in FACES]
    b = [spec.colors[i] for i in deep]
    nI = len(deep)

    def term(vals):
        a = [0] * 6
        for s, n in pos.items():
            a[s] = vals[n]
        out = sixj_scaled(a, ctx) ** 2
        for n in range(nI):
            out = out * _log_abs_phase(kernel(vals[n], b[n], ctx))
        return out

    return _enumerate_scaled(ctx, nI, [spec.colors[j] for j in regular], triples, term,
                             budget)


def yhat(spec: ColoringSpec, partition: Partition, ctx: QContext, kernel=h_kernel,
         budget: int = DEFAULT_BUDGET) -> complex:
    return yhat_scaled(spec, partition, ctx, kernel, budget).to_complex()


# ----------------------------------------------------------------------------
# Turaev-Viro state sum

@dataclass(frozen=True)
class Triangulation:
    """Edges 0..num_edges-1 and, per tetrahedron, the edges in slots a1..a6."""

    num_edges: int
    tets: tuple

    def __post_init__(self):
        tets = tuple(tuple(int(e) for e in t) for t in self.tets)
        if self.num_edges < 1:
            raise ValueError("a triangulation needs at least one edge")
        for t in tets:
            if len(t) != 6:
                raise ValueError(f"tetrahedron {t} must list six edges")
            if any(not 0 <= e < self.num_edges for e in t):
                raise ValueError(f"edge index out of range in {t}")
        used = {e for t in tets for e in t}
        missing = set(range(self.num_edges)) - used
        if missing:
            raise ValueError(f"edges {sorted(missing)} belong to no tetrahedron")
        object.__setattr__(self, "tets", tets)

    @classmethod
    def parse(cls, text: str) -> "Triangulation":
        """Read the plain-text format: ``edges N`` then ``tet e1 .. e6`` lines."""
        lines = [ln.split("#", 1)[0].split() for ln in text.splitlines()]
        lines = [ln for ln in lines if ln]
        if not lines or lines[0][0] != "edges" or len(lines[0]) != 2:
            raise ValueError("first line must read 'edges N'")
        n = int(lines[0][1])
        tets = []
        for ln in lines[1:]:
            if ln[0] != "tet" or len(ln) != 7:
                raise ValueError(f"bad tetrahedron line: {' '.join(ln)}")
            tets.append(tuple(int(x) for x in ln[1:]))
        return cls(n, tuple(tets))

    @classmethod
    def from_file(cls, path) -> "Triangulation":
        return cls.parse(Path(path).read_text())

    def dumps(self) -> str:
        out = [f"edges {self.num_edges}"]
        out += ["tet " + " ".join(str(e) for e in t) for t in self.tets]
        return "\n".join(out) + "\n"


def tv_r_scaled(tri: Triangulation, b, ctx: QContext,
                budget: int = DEFAULT_BUDGET) -> ScaledComplex:
    """Relative Turaev-Viro state sum with boundary colours b, scaled."""
    b = [int(x) for x in b]
    if len(b) != tri.num_edges:
        raise ValueError("need one colour b per edge")
    if any(not 0 <= x <= ctx.r - 2 for x in b):
        raise ValueError(f"colours b outside 0..{ctx.r - 2}")
    triples = sorted({tuple(t[s] for s in f) for t in tri.tets for f in FACES})
    n = tri.num_edges

    def term(vals):
        out = ScaledComplex(0.0)
        for e in range(n):
            out = out * _log_abs_phase(h_kernel(vals[e], b[e], ctx))
        for t in tri.tets:
            out = out * sixj_scaled([vals[e] for e in t], ctx)
        return out

    return _enumerate_scaled(ctx, n, [], triples, term, budget)


def tv_r(tri: Triangulation, b, ctx: QContext, budget: int = DEFAULT_BUDGET) -> complex:
    return tv_r_scaled(tri, b, ctx, budget).to_complex()
