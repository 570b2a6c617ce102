"""Towers of abelian p-covers of a mapping torus: mod-p homology ranks,
rank gradients, Cheeger constants of coset graphs, and a sampled check of
the linear-growth largeness criterion.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .covers import SchreierData, coset_table, cover_homology_action
from .errors import Degenerate, Disconnected, InvalidTower, NotPGroup
from .grouprings import AbelianQuotientSpec
from .linalg import identity, rank_mod_p
from .words import Endomorphism, is_torelli_for


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % q for q in range(2, math.isqrt(p) + 1))


def _is_p_power(n: int, p: int) -> bool:
    while n > 1 and n % p == 0:
        n //= p
    return n == 1


def mapping_torus_cover_rank(
    psi: Endomorphism, phi: AbelianQuotientSpec, p: int, S: SchreierData | None = None
) -> int:
    """dim H_1(M'; Z/p) for the cover of the mapping torus induced by phi.

    Equals 1 (the circle direction) plus the dimension of the mod-p
    coinvariants of the lifted action on the fibre.
    """
    if not _is_prime(p):
        raise NotPGroup(f"{p} is not prime")
    if not phi.is_finite or not _is_p_power(phi.order, p):
        raise NotPGroup(f"deck group of order {phi.order if phi.is_finite else 'infinity'} is not a {p}-group")
    S = S or coset_table(phi)
    M = cover_homology_action(psi, phi, S)
    return 1 + S.schreier_rank - rank_mod_p(M - identity(S.schreier_rank), p)


@dataclass(frozen=True)
class TowerSpec:
    psi: Endomorphism
    p: int
    levels: tuple[AbelianQuotientSpec, ...]

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(self.levels))

    def problems(self) -> list[str]:
        out = []
        if not self.levels:
            out.append("tower has no levels")
        if not _is_prime(self.p):
            out.append(f"p = {self.p} is not prime")
        for i, phi in enumerate(self.levels):
            if phi.rank != self.psi.rank:
                out.append(f"level {i}: rank {phi.rank} differs from {self.psi.rank}")
                continue
            if not phi.is_finite:
                out.append(f"level {i}: infinite deck group")
                continue
            if _is_prime(self.p) and not _is_p_power(phi.order, self.p):
                out.append(f"level {i}: order {phi.order} is not a power of {self.p}")
            if not phi.is_surjective():
                out.append(f"level {i}: images do not generate the deck group")
            elif not is_torelli_for(self.psi, phi):
                out.append(f"level {i}: monodromy does not preserve the kernel")
        for i in range(len(self.levels) - 1):
            a, b = self.levels[i], self.levels[i + 1]
            if a.is_finite and b.is_finite and a.rank == b.rank == self.psi.rank and b.is_surjective():
                if not refines(b, a):
                    out.append(f"level {i + 1} does not refine level {i}")
        return out

    def validate(self) -> None:
        probs = self.problems()
        if probs:
            raise InvalidTower("; ".join(probs))


def refines(fine: AbelianQuotientSpec, coarse: AbelianQuotientSpec) -> bool:
    """True when ker(fine) lies in ker(coarse), i.e. coarse factors through fine."""
    label = {fine.identity: coarse.identity}
    queue = [fine.identity]
    while queue:
        g = queue.pop()
        for a, b in zip(fine.images, coarse.images):
            h, lab = fine.add(g, a), coarse.add(label[g], b)
            if h in label:
                if label[h] != lab:
                    return False
            else:
                label[h] = lab
                queue.append(h)
    return True


@dataclass(frozen=True)
class CosetGraph:
    """Schreier coset graph: one undirected edge per (coset, generator), loops kept."""

    n_vertices: int
    edges: tuple[tuple[int, int], ...]

    @classmethod
    def from_quotient(cls, phi: AbelianQuotientSpec) -> "CosetGraph":
        els = phi.elements
        edges = tuple(
            (i, phi.index_of(phi.add(g, img))) for i, g in enumerate(els) for img in phi.images
        )
        return cls(len(els), edges)

    @classmethod
    def cycle(cls, m: int) -> "CosetGraph":
        return cls(m, tuple((i, (i + 1) % m) for i in range(m)))

    def is_connected(self) -> bool:
        adj = [[] for _ in range(self.n_vertices)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        seen = {0}
        stack = [0]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.n_vertices

    def laplacian(self) -> np.ndarray:
        L = np.zeros((self.n_vertices, self.n_vertices))
        for u, v in self.edges:
            if u != v:
                L[u, u] += 1
                L[v, v] += 1
                L[u, v] -= 1
                L[v, u] -= 1
        return L


@dataclass(frozen=True)
class Cheeger:
    exact: Fraction | None
    lower: float
    upper: float

    def to_json(self) -> dict:
        if self.exact is not None:
            return {"exact": str(self.exact), "value": float(self.exact)}
        return {"bounds": [self.lower, self.upper]}


def cheeger_constant(X: CosetGraph, exact_vertex_limit: int = 20) -> Cheeger:
    """Edge expansion min |dA|/|A| over 0 < |A| <= |V|/2.

    Exhaustive over vertex subsets when |V| <= exact_vertex_limit, else the
    spectral bounds lambda_1/2 <= h <= sqrt(2 Delta lambda_1).
    """
    n = X.n_vertices
    if n <= 1:
        raise Degenerate("a single vertex has no proper cut")
    if not X.is_connected():
        raise Disconnected("coset graph is not connected")
    L = X.laplacian()
    lam = float(np.linalg.eigvalsh(L)[1])
    delta = float(np.max(np.diag(L)))
    lower, upper = lam / 2, math.sqrt(2 * delta * lam)
    if n > exact_vertex_limit:
        return Cheeger(None, lower, upper)
    masks = np.arange(1, 1 << n, dtype=np.int64)
    size = np.zeros_like(masks)
    for v in range(n):
        size += (masks >> v) & 1
    keep = size <= n // 2
    masks, size = masks[keep], size[keep]
    boundary = np.zeros_like(masks)
    for u, v in X.edges:
        if u != v:
            boundary += ((masks >> u) ^ (masks >> v)) & 1
    best = min(Fraction(int(boundary[size == s].min()), s) for s in range(1, n // 2 + 1))
    return Cheeger(best, lower, upper)


@dataclass
class LevelRecord:
    index: int
    rank: int
    ratio: Fraction
    cheeger: Cheeger | None

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "rank": self.rank,
            "ratio": str(self.ratio),
            "ratio_value": float(self.ratio),
            "cheeger": self.cheeger.to_json() if self.cheeger else None,
        }


@dataclass
class GradientReport:
    p: int
    levels: list[LevelRecord]
    infimum: Fraction
    running_infimum: list[Fraction]
    threshold: float | None = None
    conditions: dict[str, bool] = field(default_factory=dict)
    verdict: str | None = None
    failing: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        doc = {
            "p": self.p,
            "levels": [lv.to_json() for lv in self.levels],
            "infimum_on_sample": str(self.infimum),
            "running_infimum": [str(x) for x in self.running_infimum],
        }
        if self.verdict is not None:
            doc.update(
                threshold=self.threshold,
                conditions=self.conditions,
                verdict=self.verdict,
                failing=self.failing,
                notes=self.notes,
            )
        return doc


def _level(args) -> LevelRecord:
    psi, phi, p, limit = args
    rank = mapping_torus_cover_rank(psi, phi, p)
    try:
        ch = cheeger_constant(CosetGraph.from_quotient(phi), limit)
    except Degenerate:
        ch = None
    return LevelRecord(phi.order, rank, Fraction(rank, phi.order), ch)


def homology_gradient(
    tower: TowerSpec, exact_vertex_limit: int = 20, threads: int | None = None
) -> GradientReport:
    tower.validate()
    jobs = [(tower.psi, phi, tower.p, exact_vertex_limit) for phi in tower.levels]
    if threads and threads > 1:
        with ProcessPoolExecutor(threads) as ex:
            levels = list(ex.map(_level, jobs))
    else:
        levels = [_level(j) for j in jobs]
    running, cur = [], None
    for lv in levels:
        cur = lv.ratio if cur is None else min(cur, lv.ratio)
        running.append(cur)
    return GradientReport(tower.p, levels, running[-1], running)


def _strictly_below(a: Cheeger, b: Cheeger) -> bool:
    """Certified a < b."""
    if a.exact is not None and b.exact is not None:
        return a.exact < b.exact
    hi = float(a.exact) if a.exact is not None else a.upper
    lo = float(b.exact) if b.exact is not None else b.lower
    return hi < lo


def largeness_report(
    tower: TowerSpec, threshold: float = 0.1, exact_vertex_limit: int = 20, threads: int | None = None
) -> GradientReport:
    """Check the three linear-growth conditions on the finite sample of the tower."""
    rep = homology_gradient(tower, exact_vertex_limit, threads)
    chs = [lv.cheeger for lv in rep.levels if lv.cheeger is not None]
    cond = {
        "p_power_indices": all(_is_p_power(lv.index, tower.p) for lv in rep.levels),
        "cheeger_decreasing": len(chs) >= 2 and all(_strictly_below(b, a) for a, b in zip(chs, chs[1:])),
        "ratio_bounded_below": float(rep.infimum) >= threshold,
    }
    rep.threshold = threshold
    rep.conditions = cond
    rep.failing = [k for k, ok in cond.items() if not ok]
    rep.verdict = "CriterionMetOnSample" if not rep.failing else "CriterionNotMet"
    rep.notes = [
        "finite sample only; the criterion concerns the whole infinite tower",
        "abelian levels, so the intersection of the tower contains the commutator subgroup",
    ]
    return rep
