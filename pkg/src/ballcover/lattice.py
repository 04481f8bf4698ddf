"""Lattice models with exact Delone simplex data.

A lattice is described by a rational Gram matrix together with its classes of
Delone simplices (one representative per translation class, first vertex at
the origin).  The main constructor builds the dual lattice of the root
lattice A_n, whose Delone decomposition consists of n! simplex classes
obtained by walking n+1 fixed generators in every cyclic order.

For n = 3 the model is realized on integer Euclidean coordinates (the
body-centered cubic lattice at scale 2, basis (2,0,0), (0,2,0), (1,1,1)), so
positions of Voronoi vertices are exact rational points of 3-space.  Other
dimensions use the standard basis with Gram matrix delta_ij - 1/(n+1), which
admits no rational Euclidean embedding.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional

from .linalg import (
    MatQ,
    Rat,
    VecQ,
    det,
    gram_dot,
    mat,
    mat_inv,
    mat_mul,
    mat_vec,
    solve_affine,
    solve_square,
    transpose,
    vec,
    vec_scale,
    vec_sub,
)


class DegenerateSimplexError(ValueError):
    """Raised when claimed simplex vertices are affinely dependent."""


@dataclass(frozen=True)
class DeloneSimplex:
    """One translation class of Delone simplices, vertices in lattice coords."""

    vertices: tuple[VecQ, ...]
    label: tuple[int, ...]


@dataclass(frozen=True)
class PrimitiveSimplex:
    """A Delone simplex recentered at its circumcenter.

    x[j] = circumcenter - vertex[j]; these points lie on the sphere of
    squared radius cr2 about the origin and are vertices of the Voronoi
    cell when the simplex is maximal.  alpha[j] are the barycentric
    coordinates of the circumcenter, so sum(alpha) = 1 and
    sum(alpha[j] * x[j]) = 0.
    """

    x: tuple[VecQ, ...]
    alpha: tuple[Rat, ...]
    cr2: Rat
    source: DeloneSimplex


@dataclass(frozen=True)
class LatticeModel:
    n: int
    gram: MatQ
    embedding: Optional[MatQ]
    delone_classes: tuple[DeloneSimplex, ...]


# bcc at scale 2: generators g with <g_i, g_j> = 4 delta_ij - 1, sum g = 0.
_BCC_EMBEDDING = ((2, 0, 1), (0, 2, 1), (0, 0, 1))
_BCC_GENERATORS = ((0, 0, 1), (1, 0, -1), (0, 1, -1), (-1, -1, 1))


def circumcenter(vertices: tuple[VecQ, ...], gram: MatQ) -> tuple[VecQ, VecQ, Rat]:
    """Exact circumcenter of a simplex under the given Gram form.

    Returns (center, alpha, cr2) with alpha the barycentric coordinates of
    the center.  Raises DegenerateSimplexError when the vertices are
    affinely dependent.
    """
    n = len(gram)
    assert len(vertices) == n + 1, "need n+1 vertices"
    v0 = vertices[0]
    rows = []
    rhs = []
    for v in vertices[1:]:
        d = vec_sub(v, v0)
        rows.append(tuple(2 * x for x in mat_vec(gram, d)))
        rhs.append(gram_dot(gram, v, v) - gram_dot(gram, v0, v0))
    try:
        center = solve_square(mat(rows), vec(rhs))
    except Exception as exc:
        raise DegenerateSimplexError("affinely dependent vertices") from exc
    bary_rows = [[vertices[j][i] for j in range(n + 1)] for i in range(n)]
    bary_rows.append([Fraction(1)] * (n + 1))
    res = solve_affine(mat(bary_rows), vec(list(center) + [Fraction(1)]))
    if not res.unique:
        raise DegenerateSimplexError("affinely dependent vertices")
    alpha = res.particular
    cr2 = gram_dot(gram, vec_sub(center, v0), vec_sub(center, v0))
    for v in vertices:
        assert gram_dot(gram, vec_sub(center, v), vec_sub(center, v)) == cr2
    return center, alpha, cr2


def primitive_simplex(simplex: DeloneSimplex, gram: MatQ) -> PrimitiveSimplex:
    center, alpha, cr2 = circumcenter(simplex.vertices, gram)
    x = tuple(vec_sub(center, v) for v in simplex.vertices)
    return PrimitiveSimplex(x=x, alpha=alpha, cr2=cr2, source=simplex)


def _anstar_generators(n: int) -> tuple[tuple[VecQ, ...], MatQ, Optional[MatQ]]:
    if n == 3:
        gens = tuple(vec(g) for g in _BCC_GENERATORS)
        e = mat(_BCC_EMBEDDING)
        gram = mat_mul(transpose(e), e)
        return gens, gram, e
    third = Fraction(1, n + 1)
    gram = mat(
        [[(1 if i == j else 0) - third for j in range(n)] for i in range(n)]
    )
    gens = [vec([1 if i == j else 0 for i in range(n)]) for j in range(n)]
    gens.append(vec([-1] * n))
    return tuple(gens), gram, None


def _translation_key(vertices: tuple[VecQ, ...]) -> tuple:
    base = min(vertices)
    return tuple(sorted(vec_sub(v, base) for v in vertices))


@lru_cache(maxsize=None)
def build_anstar(n: int, validate: bool = True) -> LatticeModel:
    """Dual lattice of A_n with its n! Delone simplex classes.

    Each class is the walk 0, g_{pi(1)}, g_{pi(1)}+g_{pi(2)}, ... over a
    permutation pi of n of the n+1 generators (the omitted generator closes
    the cycle, so cyclic rotations give the same class and are not
    repeated).  With validate=True every class is checked against the
    empty-sphere oracle.
    """
    assert 2 <= n <= 8, "dimension out of supported range"
    gens, gram, embedding = _anstar_generators(n)
    for i in range(n + 1):
        for j in range(n + 1):
            expect = (n if i == j else -1) * (
                Fraction(4, n + 1) if n == 3 else Fraction(1, n + 1)
            )
            assert gram_dot(gram, gens[i], gens[j]) == expect
    classes = []
    seen = set()
    for perm in itertools.permutations(range(n)):
        vertices = [vec([0] * n)]
        for k in perm:
            vertices.append(tuple(a + b for a, b in zip(vertices[-1], gens[k])))
        simplex = DeloneSimplex(vertices=tuple(vertices), label=perm + (n,))
        key = _translation_key(simplex.vertices)
        assert key not in seen, "duplicate simplex class"
        seen.add(key)
        classes.append(simplex)
    model = LatticeModel(
        n=n, gram=gram, embedding=embedding, delone_classes=tuple(classes)
    )
    if validate:
        assert genericity_check(model), "Delone classes fail the sphere oracle"
    return model


def covering_radius(lat: LatticeModel) -> tuple[Rat, tuple[PrimitiveSimplex, ...]]:
    """Squared covering radius and the maximal primitive simplices attaining it."""
    prims = [primitive_simplex(s, lat.gram) for s in lat.delone_classes]
    mu2 = max(p.cr2 for p in prims)
    return mu2, tuple(p for p in prims if p.cr2 == mu2)


def negative_pairs(simplices: tuple[PrimitiveSimplex, ...]) -> tuple[tuple[int, int], ...]:
    """Match each simplex with its negative (as a set of sphere points)."""
    keys = [tuple(sorted(p.x)) for p in simplices]
    neg = [tuple(sorted(vec_scale(Fraction(-1), x) for x in p.x)) for p in simplices]
    pairs = []
    used = set()
    for i, k in enumerate(keys):
        if i in used:
            continue
        j = next(j for j in range(len(simplices)) if j not in used and neg[i] == keys[j])
        assert j != i, "simplex equals its own negative"
        used.update((i, j))
        pairs.append((i, j))
    return tuple(pairs)


def voronoi_vertices(lat: LatticeModel) -> tuple[VecQ, ...]:
    """Vertices of the Voronoi cell at the origin, in lattice coordinates."""
    points = set()
    for s in lat.delone_classes:
        center, _, _ = circumcenter(s.vertices, lat.gram)
        for v in s.vertices:
            points.add(vec_sub(center, v))
    return tuple(sorted(points))


def to_euclidean(lat: LatticeModel, point: VecQ) -> VecQ:
    assert lat.embedding is not None, "model has no rational embedding"
    return mat_vec(lat.embedding, point)


def lattice_points_within(gram: MatQ, r2: Rat) -> tuple[tuple[int, ...], ...]:
    """All integer vectors u with u^T G u <= r2 (exact, inclusive)."""
    n = len(gram)
    ginv = mat_inv(gram)
    r2 = Fraction(r2)
    bounds = []
    for i in range(n):
        cap = r2 * ginv[i][i]
        bounds.append(math.isqrt(cap.numerator // cap.denominator))
    den = math.lcm(*(x.denominator for row in gram for x in row))
    gz = [[int(x * den) for x in row] for row in gram]
    limit_num, limit_den = r2.numerator * den, r2.denominator
    out = []
    for u in itertools.product(*(range(-b, b + 1) for b in bounds)):
        q = 0
        for i in range(n):
            ui = u[i]
            if ui:
                q += gz[i][i] * ui * ui
                for j in range(i + 1, n):
                    if u[j]:
                        q += 2 * gz[i][j] * ui * u[j]
        if q * limit_den <= limit_num:
            out.append(u)
    return tuple(out)


def _candidate_points(lat: LatticeModel, mu2: Rat) -> tuple[VecQ, ...]:
    # any point inside some circumsphere satisfies |u| <= |c| + cr <= 2 mu
    return tuple(
        vec(u) for u in lattice_points_within(lat.gram, 4 * Fraction(mu2))
    )


def verify_empty_sphere(lat: LatticeModel, simplex: DeloneSimplex) -> bool:
    """No lattice point lies strictly inside the circumsphere of the simplex."""
    center, _, cr2 = circumcenter(simplex.vertices, lat.gram)
    prims = [primitive_simplex(s, lat.gram) for s in lat.delone_classes]
    mu2 = max(p.cr2 for p in prims)
    for u in _candidate_points(lat, max(mu2, cr2)):
        d = vec_sub(u, center)
        if gram_dot(lat.gram, d, d) < cr2:
            return False
    return True


def genericity_check(lat: LatticeModel) -> bool:
    """Every class circumsphere is empty and touches exactly its n+1 vertices."""
    data = []
    mu2 = Fraction(0)
    for s in lat.delone_classes:
        center, _, cr2 = circumcenter(s.vertices, lat.gram)
        data.append((s, center, cr2))
        mu2 = max(mu2, cr2)
    candidates = _candidate_points(lat, mu2)
    for s, center, cr2 in data:
        on_sphere = set()
        for u in candidates:
            d = vec_sub(u, center)
            q = gram_dot(lat.gram, d, d)
            if q < cr2:
                return False
            if q == cr2:
                on_sphere.add(u)
        if on_sphere != set(s.vertices):
            return False
    return True


def change_basis(lat: LatticeModel, u: MatQ) -> LatticeModel:
    """Rewrite the model in the basis B' = B U for unimodular integer U."""
    u = mat(u)
    assert abs(det(u)) == 1, "basis change must be unimodular"
    uinv = mat_inv(u)
    assert all(x.denominator == 1 for row in uinv for x in row)
    gram = mat_mul(transpose(u), mat_mul(lat.gram, u))
    embedding = mat_mul(lat.embedding, u) if lat.embedding is not None else None
    classes = tuple(
        DeloneSimplex(
            vertices=tuple(mat_vec(uinv, v) for v in s.vertices), label=s.label
        )
        for s in lat.delone_classes
    )
    return LatticeModel(n=lat.n, gram=gram, embedding=embedding, delone_classes=classes)


def lattice_report(lat: LatticeModel) -> dict:
    """Plain-data summary used by the CLI export (values still exact)."""
    mu2, maximal = covering_radius(lat)
    classes = []
    for s in lat.delone_classes:
        center, alpha, cr2 = circumcenter(s.vertices, lat.gram)
        classes.append(
            {
                "label": list(s.label),
                "vertices": [list(v) for v in s.vertices],
                "circumcenter": list(center),
                "alpha": list(alpha),
                "cr2": cr2,
            }
        )
    return {
        "kind": "lattice-report",
        "dimension": lat.n,
        "gram": [list(row) for row in lat.gram],
        "embedding": None
        if lat.embedding is None
        else [list(row) for row in lat.embedding],
        "classes": classes,
        "mu2": mu2,
        "num_maximal": len(maximal),
        "voronoi_vertices": [list(p) for p in voronoi_vertices(lat)],
    }
