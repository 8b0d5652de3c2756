"""Combinatorial representation of central hyperplane arrangements.

A face is a sign vector over {+1, -1, 0} with one coordinate per hyperplane;
chambers are the faces with no zero coordinate.  Faces form a semigroup under
the coordinatewise "first nonzero wins" product, and the chamber walk moves
from C to F*C for a face F drawn from a weight measure.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

PLUS = 1
MINUS = -1
ZERO = 0

_CHAR_TO_SIGN = {"+": PLUS, "-": MINUS, "0": ZERO}
_SIGN_TO_CHAR = {PLUS: "+", MINUS: "-", ZERO: "0"}

# Default caps for exact enumeration; large instances stay implicit.
DEFAULT_FACE_LIMIT = 1_000_000
DEFAULT_CLOSURE_PRODUCT_LIMIT = 1_000_000


class DimensionError(ValueError):
    """Sign vectors of different lengths were combined."""


class CapacityError(RuntimeError):
    """An exact enumeration would exceed the configured size limit."""


def parse_sign_vector(s):
    """Parse a string like '+-0' into a sign tuple."""
    try:
        return tuple(_CHAR_TO_SIGN[ch] for ch in s.strip())
    except KeyError as exc:
        raise ValueError(f"invalid sign character in {s!r}") from exc


def format_sign_vector(f):
    return "".join(_SIGN_TO_CHAR[x] for x in f)


def face_product(f, g):
    """Semigroup product: coordinate i is f[i] unless it is zero, then g[i].

    Associative, idempotent (FF = F) and satisfies the deletion property
    FGF = FG.
    """
    if len(f) != len(g):
        raise DimensionError(f"length mismatch: {len(f)} vs {len(g)}")
    return tuple(a if a != ZERO else b for a, b in zip(f, g))


def is_chamber(f):
    """A face is a chamber iff no coordinate is zero."""
    return all(x != ZERO for x in f)


def support(f):
    """Indices of the nonzero coordinates (hyperplanes the face is not on)."""
    return tuple(i for i, x in enumerate(f) if x != ZERO)


@dataclass(frozen=True)
class Arrangement:
    """A central arrangement given combinatorially.

    ``faces`` may be None for families whose face universe is too large to
    enumerate; the chambers and the weighted faces are all that the walk and
    the exact analysis ever touch.
    """

    m: int
    chambers: tuple
    faces: tuple | None
    family_tag: str
    symmetry_certified: bool = False
    _chamber_index: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(
            self, "_chamber_index", {c: i for i, c in enumerate(self.chambers)}
        )

    @property
    def n_chambers(self):
        return len(self.chambers)

    def chamber_index(self, c):
        return self._chamber_index[c]

    def has_chamber(self, c):
        return c in self._chamber_index


@dataclass(frozen=True)
class WeightedFaceSet:
    """A probability measure on faces; only positive weights are listed."""

    faces: tuple
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "weights", w)
        if len(self.faces) != len(w):
            raise ValueError("faces and weights length mismatch")
        if len(w) and np.any(w <= 0):
            raise ValueError("all listed weights must be strictly positive")
        if len(w) and abs(w.sum() - 1.0) > 1e-12:
            raise ValueError(f"weights sum to {w.sum()!r}, expected 1 within 1e-12")
        lengths = {len(f) for f in self.faces}
        if len(lengths) > 1:
            raise DimensionError("faces have inconsistent lengths")

    @property
    def m(self):
        return len(self.faces[0]) if self.faces else 0

    def supports(self):
        return [support(f) for f in self.faces]

    def zero_masks(self):
        """Per-face bitmask of hyperplanes the face lies on (zero coords)."""
        masks = []
        for f in self.faces:
            mask = 0
            for i, x in enumerate(f):
                if x == ZERO:
                    mask |= 1 << i
            masks.append(mask)
        return masks


def weighted_faces(pairs):
    """Build a WeightedFaceSet from (face, weight) pairs, merging duplicates."""
    acc = {}
    for f, w in pairs:
        f = tuple(f)
        acc[f] = acc.get(f, 0.0) + w
    faces = tuple(acc)
    return WeightedFaceSet(faces, np.array([acc[f] for f in faces]))


def build_boolean(n, face_limit=DEFAULT_FACE_LIMIT):
    """Arrangement of the n coordinate hyperplanes: chambers are the 2^n
    orthants, faces are {+,-,0}^n."""
    if n < 1:
        raise ValueError("boolean arrangement needs n >= 1")
    if 2**n > face_limit:
        raise CapacityError(f"2^{n} chambers exceeds limit {face_limit}")
    chambers = tuple(itertools.product((PLUS, MINUS), repeat=n))
    faces = None
    if 3**n <= face_limit:
        faces = tuple(itertools.product((PLUS, MINUS, ZERO), repeat=n))
    return Arrangement(
        m=n,
        chambers=chambers,
        faces=faces,
        family_tag=f"boolean({n})",
        symmetry_certified=True,
    )


def braid_m(n):
    return n * (n - 1) // 2


def braid_pair_index(n):
    """Hyperplane ordering for the braid arrangement: pairs (i, j) with
    i < j over cards 0..n-1, in lexicographic order."""
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    return {p: k for k, p in enumerate(pairs)}


def partition_to_sign_vector(blocks, n):
    """Sign vector of an ordered set partition of {0, .., n-1}.

    Convention: the coordinate of pair (i, j), i < j, is + when i's block
    comes before j's block (reading blocks left to right), - when after,
    0 when they share a block.  Blocks earlier in the list sit lower in the
    coordinate order (x_i < x_j <=> +).
    """
    pos = {}
    for b_idx, block in enumerate(blocks):
        for x in block:
            if x in pos:
                raise ValueError(f"element {x} appears in two blocks")
            pos[x] = b_idx
    if sorted(pos) != list(range(n)):
        raise ValueError("blocks do not partition range(n)")
    coords = []
    for i in range(n):
        for j in range(i + 1, n):
            if pos[i] < pos[j]:
                coords.append(PLUS)
            elif pos[i] > pos[j]:
                coords.append(MINUS)
            else:
                coords.append(ZERO)
    return tuple(coords)


def ordered_set_partitions(items):
    """Yield all ordered partitions of ``items`` into nonempty blocks."""
    items = list(items)
    if not items:
        yield []
        return
    n = len(items)
    # choose the first block as any nonempty subset, recurse on the rest
    for r in range(1, n + 1):
        for block in itertools.combinations(items, r):
            rest = [x for x in items if x not in set(block)]
            for tail in ordered_set_partitions(rest):
                yield [set(block)] + tail


def fubini_number(n):
    """Number of ordered set partitions of an n-set."""
    # a(n) = sum_k C(n,k) a(n-k), a(0)=1
    import math

    a = [1] + [0] * n
    for i in range(1, n + 1):
        a[i] = sum(math.comb(i, k) * a[i - k] for k in range(1, i + 1))
    return a[n]


def build_braid(n, face_limit=DEFAULT_FACE_LIMIT):
    """Braid arrangement on n cards: hyperplanes x_i = x_j, chambers are the
    n! orderings, faces the ordered set partitions of {0, .., n-1}."""
    import math

    if n < 2:
        raise ValueError("braid arrangement needs n >= 2")
    if math.factorial(n) > face_limit:
        raise CapacityError(f"{n}! chambers exceeds limit {face_limit}")
    chambers = tuple(
        partition_to_sign_vector([{x} for x in perm], n)
        for perm in itertools.permutations(range(n))
    )
    faces = None
    if fubini_number(n) <= face_limit:
        faces = tuple(
            partition_to_sign_vector(blocks, n)
            for blocks in ordered_set_partitions(range(n))
        )
    return Arrangement(
        m=braid_m(n),
        chambers=chambers,
        faces=faces,
        family_tag=f"braid({n})",
        symmetry_certified=True,
    )


def permutation_to_chamber(perm):
    """Chamber of a deck order (perm[0] on top / smallest coordinate)."""
    n = len(perm)
    return partition_to_sign_vector([{x} for x in perm], n)


def chamber_to_permutation(c, n):
    """Inverse of permutation_to_chamber."""
    idx = braid_pair_index(n)
    # count how many elements precede each card
    before = [0] * n
    for (i, j), k in idx.items():
        if c[k] == PLUS:
            before[j] += 1
        elif c[k] == MINUS:
            before[i] += 1
        else:
            raise ValueError("not a braid chamber (zero coordinate)")
    perm = [None] * n
    for card, b in enumerate(before):
        perm[b] = card
    return tuple(perm)


def violated_hyperplanes(arr, w):
    """Hyperplanes not separated by the measure: indices i such that every
    positively weighted face has a zero coordinate at i."""
    covered = [False] * arr.m
    for f in w.faces:
        for i in support(f):
            covered[i] = True
    return [i for i, ok in enumerate(covered) if not ok]


def check_separating(arr, w):
    """True iff every hyperplane has a positively weighted face not on it.

    Separation is exactly the condition for a unique
    stationary distribution and for T to be almost surely finite.
    """
    return not violated_hyperplanes(arr, w)


def validate_closure(faces, product_limit=DEFAULT_CLOSURE_PRODUCT_LIMIT, seed=0):
    """Check a face list is closed under the product.

    Exhaustive when |faces|^2 <= product_limit, sampled beyond.  Returns the
    first violating pair, or None if closed.
    """
    face_set = set(faces)
    faces = list(faces)
    k = len(faces)
    if k * k <= product_limit:
        pairs = itertools.product(faces, faces)
    else:
        rng = np.random.default_rng(seed)
        idx = rng.integers(0, k, size=(product_limit, 2))
        pairs = ((faces[i], faces[j]) for i, j in idx)
    for f, g in pairs:
        if face_product(f, g) not in face_set:
            return (f, g)
    return None


def build_custom(m, chambers, faces, validate=True):
    """User-supplied arrangement from explicit sign-vector lists."""
    chambers = tuple(tuple(c) for c in chambers)
    faces = tuple(tuple(f) for f in faces)
    for c in chambers:
        if len(c) != m:
            raise DimensionError("chamber length != m")
        if not is_chamber(c):
            raise ValueError(f"{format_sign_vector(c)} listed as chamber has a zero")
    face_set = set(faces)
    for c in chambers:
        if c not in face_set:
            raise ValueError("chambers must be listed among the faces")
    for f in faces:
        if len(f) != m:
            raise DimensionError("face length != m")
    if validate:
        bad = validate_closure(faces)
        if bad is not None:
            raise ValueError(
                "faces not closed under product: "
                f"{format_sign_vector(bad[0])} * {format_sign_vector(bad[1])}"
            )
    return Arrangement(
        m=m,
        chambers=chambers,
        faces=faces,
        family_tag="custom",
        symmetry_certified=False,
    )


def load_arrangement_file(path):
    """Load a custom arrangement + weights from the text format.

    Format: header line ``m=<int>``, then sections ``[chambers]``, ``[faces]``
    (one sign vector per line over ``+ - 0``) and ``[weights]`` (lines of
    ``<face index> <decimal weight>``).  Returns (Arrangement, WeightedFaceSet).
    """
    chambers, faces, weight_lines = [], [], []
    section = None
    m = None
    with open(path) as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if line.startswith("m="):
                m = int(line[2:])
                continue
            if line.startswith("["):
                section = line.strip("[]").lower()
                continue
            if section == "chambers":
                chambers.append(parse_sign_vector(line))
            elif section == "faces":
                faces.append(parse_sign_vector(line))
            elif section == "weights":
                idx_s, w_s = line.split()
                weight_lines.append((int(idx_s), float(w_s)))
            else:
                raise ValueError(f"line outside any section: {line!r}")
    if m is None:
        raise ValueError("missing m=<int> header")
    arr = build_custom(m, chambers, faces)
    wfs = weighted_faces((faces[i], w) for i, w in weight_lines)
    return arr, wfs


def write_arrangement_file(path, arr, w):
    """Inverse of load_arrangement_file."""
    if arr.faces is None:
        raise CapacityError("cannot serialize an implicit face universe")
    face_idx = {f: i for i, f in enumerate(arr.faces)}
    with open(path, "w") as fh:
        fh.write(f"m={arr.m}\n")
        fh.write("[chambers]\n")
        for c in arr.chambers:
            fh.write(format_sign_vector(c) + "\n")
        fh.write("[faces]\n")
        for f in arr.faces:
            fh.write(format_sign_vector(f) + "\n")
        fh.write("[weights]\n")
        for f, wt in zip(w.faces, w.weights):
            fh.write(f"{face_idx[f]} {float(wt)!r}\n")
