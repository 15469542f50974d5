"""Combinatorial polytopes described by vertex-facet incidence.

Everything here is coordinate-free: a polytope is its incidence data, the
face lattice is generated by intersecting facets, and the only numerics are
exact rational averages and the closed-form face-count bounds used by the
weighted-angle engine.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .core import binomial

VertexId = object  # JSON scalar: str or int


class PolytopeError(ValueError):
    """Incidence data does not describe a consistent polytope."""


@dataclass(frozen=True)
class FVector:
    """Face counts by dimension, alpha_0 ... alpha_n."""

    counts: tuple[int, ...]

    def __getitem__(self, k: int) -> int:
        return self.counts[k]

    @property
    def dim(self) -> int:
        return len(self.counts) - 1


def _sort_key(v: VertexId) -> tuple[str, str]:
    return (type(v).__name__, str(v))


@dataclass(frozen=True)
class CombinatorialPolytope:
    """An abstract polytope of dimension ``dim`` given by its facets.

    The face lattice (all nonempty intersections of facet subsets, plus the
    full vertex set as the unique top face) is computed eagerly and cached;
    instances are immutable afterwards.
    """

    dim: int
    vertices: tuple[VertexId, ...]
    facets: tuple[frozenset, ...]
    _lattice: dict = field(init=False, repr=False, compare=False)
    _dims: dict = field(init=False, repr=False, compare=False)

    @staticmethod
    def of(dim: int, vertices: Sequence[VertexId], facets: Iterable[Iterable[VertexId]]) -> "CombinatorialPolytope":
        return CombinatorialPolytope(
            int(dim), tuple(vertices), tuple(frozenset(f) for f in facets)
        )

    def __post_init__(self) -> None:
        self._validate_incidence()
        lattice, dims = self._build_lattice()
        object.__setattr__(self, "_lattice", lattice)
        object.__setattr__(self, "_dims", dims)
        self._check_consistency()

    # -- construction ------------------------------------------------------

    def _validate_incidence(self) -> None:
        if self.dim < 1:
            raise PolytopeError("dimension must be at least 1")
        if len(set(self.vertices)) != len(self.vertices):
            raise PolytopeError("duplicate vertex ids")
        vset = set(self.vertices)
        if not vset:
            raise PolytopeError("a polytope needs at least one vertex")
        if len(set(self.facets)) != len(self.facets):
            raise PolytopeError("duplicate facets")
        for f in self.facets:
            if not f <= vset:
                raise PolytopeError(f"facet {sorted(f, key=_sort_key)} uses unknown vertices")
            if f == vset:
                raise PolytopeError("a facet may not contain every vertex")
        for v in self.vertices:
            incident = sum(1 for f in self.facets if v in f)
            if incident < self.dim:
                raise PolytopeError(
                    f"vertex {v!r} lies in {incident} facets, fewer than dim {self.dim}"
                )

    def _build_lattice(self) -> tuple[dict, dict]:
        top = frozenset(self.vertices)
        faces = {top}
        frontier = [top]
        while frontier:
            nxt = []
            for face in frontier:
                for facet in self.facets:
                    cut = face & facet
                    if cut and cut not in faces:
                        faces.add(cut)
                        nxt.append(cut)
            frontier = nxt
        # Dimension = longest strictly increasing chain from a minimal face,
        # which is the grading of a genuine polytope lattice and stays
        # meaningful for non-simple inputs.
        by_size = sorted(faces, key=len)
        dims: dict = {}
        for face in by_size:
            below = [dims[g] for g in dims if g < face]
            if below:
                dims[face] = 1 + max(below)
            else:
                if len(face) != 1:
                    raise PolytopeError(
                        f"minimal face {sorted(face, key=_sort_key)} is not a single vertex"
                    )
                dims[face] = 0
        return {f: None for f in by_size}, dims

    def _check_consistency(self) -> None:
        top = frozenset(self.vertices)
        if self._dims[top] != self.dim:
            raise PolytopeError(
                f"face chains reach dimension {self._dims[top]}, declared dim is {self.dim}"
            )
        counts = [0] * (self.dim + 1)
        for face, d in self._dims.items():
            if d > self.dim:
                raise PolytopeError("face dimension exceeds the polytope dimension")
            counts[d] += 1
        if any(c == 0 for c in counts):
            missing = counts.index(0)
            raise PolytopeError(f"no faces of dimension {missing}")
        for v in self.vertices:
            if frozenset((v,)) not in self._dims:
                raise PolytopeError(f"vertex {v!r} is not separated by the facets")
        if self.is_simple:
            # For simple polytopes the chain grading must agree with the
            # facet-count grading (codim k faces lie in exactly k facets).
            for face, d in self._dims.items():
                through = sum(1 for f in self.facets if face <= f)
                if d != self.dim - through:
                    raise PolytopeError(
                        "simple polytope has a face whose facet count and chain "
                        f"length disagree: {sorted(face, key=_sort_key)}"
                    )

    # -- queries -----------------------------------------------------------

    @property
    def is_simple(self) -> bool:
        return all(
            sum(1 for f in self.facets if v in f) == self.dim for v in self.vertices
        )

    def faces(self, k: int | None = None) -> list[frozenset]:
        """All faces, or just the k-dimensional ones, deterministically ordered."""
        found = [
            face
            for face, d in self._dims.items()
            if k is None or d == k
        ]
        return sorted(found, key=lambda f: (self._dims[f], len(f), sorted(map(_sort_key, f))))

    def face_dim(self, face: frozenset) -> int:
        try:
            return self._dims[face]
        except KeyError:
            raise PolytopeError(f"{sorted(face, key=_sort_key)} is not a face") from None

    def facets_through(self, face: frozenset) -> list[int]:
        return [i for i, f in enumerate(self.facets) if face <= f]

    def fvector(self) -> FVector:
        counts = [0] * (self.dim + 1)
        for d in self._dims.values():
            counts[d] += 1
        return FVector(tuple(counts))


def face_lattice(p: CombinatorialPolytope) -> list[tuple[frozenset, int]]:
    """Every face paired with its dimension, sorted by (dim, size, ids)."""
    return [(face, p.face_dim(face)) for face in p.faces()]


def is_simple(p: CombinatorialPolytope) -> bool:
    return p.is_simple


def fvector(p: CombinatorialPolytope) -> FVector:
    return p.fvector()


def average_faces(p: CombinatorialPolytope, i: int, k: int) -> Fraction:
    """Average number of i-faces per k-face, exactly."""
    if not 0 <= i < k <= p.dim:
        raise ValueError(f"need 0 <= i < k <= dim, got i={i}, k={k}, dim={p.dim}")
    kfaces = p.faces(k)
    if not kfaces:
        raise ValueError(f"no {k}-dimensional faces")
    ifaces = p.faces(i)
    total = sum(1 for big in kfaces for small in ifaces if small <= big)
    return Fraction(total, len(kfaces))


def lemma13_bound(n: int, i: int, k: int) -> Fraction:
    """Closed-form strict upper bound for the average i-face count per k-face
    of a simple n-polytope."""
    if not (isinstance(n, int) and isinstance(i, int) and isinstance(k, int)):
        raise ValueError("arguments must be integers")
    if i < 0 or not i < k:
        raise ValueError(f"need 0 <= i < k, got i={i}, k={k}")
    if n < 2 * k - 1:
        raise ValueError(f"need n >= 2k-1, got n={n}, k={k}")
    half = n // 2
    numer = binomial(n - i, n - k) * (binomial(half, i) + binomial(n - half, i))
    denom = binomial(half, k) + binomial(n - half, k)
    return Fraction(numer, denom)


def a02_bound(n: int) -> Fraction:
    """Specialized strict bound for the average vertex count of 2-faces."""
    if not isinstance(n, int) or n < 3:
        raise ValueError(f"need an integer n >= 3, got {n!r}")
    if n % 2 == 0:
        return Fraction(4 * (n - 1), n - 2)
    return Fraction(4 * n, n - 1)


# ---------------------------------------------------------------------------
# Deterministic constructors (the generator family).
# ---------------------------------------------------------------------------


def simplex(n: int) -> CombinatorialPolytope:
    """The n-simplex: n+1 vertices, facets are the n-element subsets."""
    if n < 1:
        raise ValueError("simplex dimension must be >= 1")
    verts = list(range(n + 1))
    facets = [frozenset(verts) - {v} for v in verts]
    return CombinatorialPolytope.of(n, verts, facets)


def cube(n: int) -> CombinatorialPolytope:
    """The n-cube with bitstring vertex ids and 2n coordinate facets."""
    if n < 1:
        raise ValueError("cube dimension must be >= 1")
    verts = [format(x, f"0{n}b") for x in range(2**n)]
    facets = []
    for axis in range(n):
        for bit in "01":
            facets.append(frozenset(v for v in verts if v[axis] == bit))
    return CombinatorialPolytope.of(n, verts, facets)


def _gale_even(subset: frozenset, m: int) -> bool:
    outside = [x for x in range(m) if x not in subset]
    for a in range(len(outside)):
        for b in range(a + 1, len(outside)):
            i, j = outside[a], outside[b]
            if sum(1 for s in subset if i < s < j) % 2 == 1:
                return False
    return True


def cyclic_dual(d: int, m: int) -> CombinatorialPolytope:
    """The simple d-polytope dual to the cyclic polytope on m points.

    Vertices are the cyclic polytope's facets (selected by the evenness rule
    on the point line), and the i-th facet collects the vertices whose subset
    contains point i; hence the dual has exactly m facets.
    """
    if d < 1 or m < d + 1:
        raise ValueError(f"need m >= d+1 points, got d={d}, m={m}")
    subsets = sorted(
        (
            s
            for s in _subsets_of_size(range(m), d)
            if _gale_even(s, m)
        ),
        key=sorted,
    )
    verts = ["".join(str(x) for x in sorted(s)) if m <= 10 else repr(sorted(s)) for s in subsets]
    facets = [
        frozenset(verts[idx] for idx, s in enumerate(subsets) if point in s)
        for point in range(m)
    ]
    return CombinatorialPolytope.of(d, verts, facets)


def _subsets_of_size(items: Iterable[int], k: int) -> list[frozenset]:
    from itertools import combinations

    return [frozenset(c) for c in combinations(items, k)]


def product(p: CombinatorialPolytope, q: CombinatorialPolytope) -> CombinatorialPolytope:
    """Direct product; faces are products of faces, so dims and f-vectors add."""
    verts = [f"{a}|{b}" for a in p.vertices for b in q.vertices]
    facets = []
    for f in p.facets:
        facets.append(frozenset(f"{a}|{b}" for a in f for b in q.vertices))
    for g in q.facets:
        facets.append(frozenset(f"{a}|{b}" for a in p.vertices for b in g))
    return CombinatorialPolytope.of(p.dim + q.dim, verts, facets)


# ---------------------------------------------------------------------------
# JSON wire format: { "dim": n, "vertices": [ids], "facets": [[ids]] }.
# ---------------------------------------------------------------------------


def polytope_to_json(p: CombinatorialPolytope) -> dict:
    return {
        "dim": p.dim,
        "vertices": list(p.vertices),
        "facets": [sorted(f, key=_sort_key) for f in p.facets],
    }


def polytope_from_json(data: dict) -> CombinatorialPolytope:
    try:
        dim = data["dim"]
        vertices = data["vertices"]
        facets = data["facets"]
    except (KeyError, TypeError) as exc:
        raise PolytopeError(f"missing polytope field: {exc}") from exc
    if not isinstance(dim, int):
        raise PolytopeError("dim must be an integer")
    return CombinatorialPolytope.of(dim, vertices, facets)


def load_polytope(path: str) -> CombinatorialPolytope:
    with open(path, encoding="utf-8") as fh:
        return polytope_from_json(json.load(fh))


def save_polytope(p: CombinatorialPolytope, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(polytope_to_json(p), fh, indent=2, sort_keys=True)
        fh.write("\n")
