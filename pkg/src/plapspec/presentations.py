"""Free-group words, random presentations, the Gromov lift and link graphs.

A letter is an integer code ``2*g + inv``: generator g uninverted is 2g, its inverse
is 2g+1, so ``code ^ 1`` inverts.  Words are tuples of codes and compare
lexicographically with generator index ascending and uninverted first.
Link-graph vertices use the same numbering.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ParameterError, SizeError
from .graph import Multigraph
from .models import RngSeed, _gen

ENUM_LIMIT = 5_000_000


# ---------------------------------------------------------------------------
# letters and words

def letter(g: int, inverted: bool = False) -> int:
    return 2 * g + int(inverted)


def inverse_letter(c: int) -> int:
    return c ^ 1


def invert_word(w) -> tuple:
    return tuple(c ^ 1 for c in reversed(w))


def is_reduced(w) -> bool:
    return all(w[i + 1] != w[i] ^ 1 for i in range(len(w) - 1))


def is_cyclically_reduced(w) -> bool:
    return is_reduced(w) and (len(w) < 2 or w[0] != w[-1] ^ 1)


def format_letter(c: int) -> str:
    return ("G" if c & 1 else "g") + str(c >> 1)


def parse_letter(tok: str) -> int:
    if len(tok) < 2 or tok[0] not in "gG" or not tok[1:].isdigit():
        raise ParameterError(f"bad letter token {tok!r}")
    return letter(int(tok[1:]), tok[0] == "G")


def format_word(w) -> str:
    return " ".join(format_letter(c) for c in w)


def reduced_word_total(k: int, length: int) -> int:
    """Number of reduced words of the given length over k generators."""
    if length == 0:
        return 1
    return 2 * k * (2 * k - 1) ** (length - 1)


def cyclically_reduced_total(k: int, length: int) -> int:
    """Number of cyclically reduced words: (2k-1)^l + 1 + (k-1)(1 + (-1)^l) for l >= 1."""
    if length < 1:
        raise ParameterError("length must be >= 1")
    return (2 * k - 1) ** length + 1 + (k - 1) * (1 + (-1) ** length)


def reduced_words(k: int, length: int):
    """All reduced words of the given length in lexicographic order (generator)."""
    if length == 0:
        yield ()
        return

    def extend(prefix):
        if len(prefix) == length:
            yield tuple(prefix)
            return
        for c in range(2 * k):
            if prefix and c == prefix[-1] ^ 1:
                continue
            prefix.append(c)
            yield from extend(prefix)
            prefix.pop()

    yield from extend([])


def enumerate_cyclically_reduced(m: int, length: int) -> list[tuple]:
    """All cyclically reduced words of length <= 3 over m generators, as distinct sequences."""
    if m < 1:
        raise ParameterError("m must be >= 1")
    if length > 3:
        raise SizeError("enumeration is limited to length <= 3; use sampling or counting")
    return [w for w in reduced_words(m, length) if is_cyclically_reduced(w)]


def rank_to_word(rank: int, k: int, length: int) -> tuple:
    """Decode the lexicographic rank of a reduced word (mixed radix 2k, 2k-1, ...)."""
    digits = []
    for _ in range(length - 1):
        rank, dgt = divmod(rank, 2 * k - 1)
        digits.append(dgt)
    first = rank
    if not 0 <= first < 2 * k:
        raise ParameterError("rank out of range")
    w = [first]
    for dgt in reversed(digits):
        bad = w[-1] ^ 1
        w.append(dgt if dgt < bad else dgt + 1)
    return tuple(w)


def word_to_rank(w, k: int) -> int:
    rank = w[0]
    for prev, c in zip(w, w[1:]):
        bad = prev ^ 1
        rank = rank * (2 * k - 1) + (c if c < bad else c - 1)
    return rank


# ---------------------------------------------------------------------------
# presentations

@dataclass(frozen=True)
class Presentation:
    m: int
    relators: tuple
    kind: str = "triangular"  # or "gromov:<l>"

    def __post_init__(self):
        rels = tuple(tuple(int(c) for c in r) for r in self.relators)
        object.__setattr__(self, "relators", rels)
        if self.m < 1:
            raise ParameterError("need at least one generator")
        length = self.relator_length
        for r in rels:
            if len(r) != length or not is_cyclically_reduced(r) or max(r) >= 2 * self.m:
                raise ParameterError(f"relator {format_word(r)} is not a cyclically reduced word of length {length}")

    @property
    def relator_length(self) -> int:
        if self.kind == "triangular":
            return 3
        if self.kind.startswith("gromov:"):
            return int(self.kind.split(":", 1)[1])
        raise ParameterError(f"unknown presentation kind {self.kind!r}")

    def to_text(self) -> str:
        lines = [f"m {self.m} kind {self.kind}"] + [format_word(r) for r in self.relators]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Presentation":
        header, rels = None, []
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if header is None:
                tok = line.split()
                if len(tok) != 4 or tok[0] != "m" or tok[2] != "kind":
                    raise ParameterError("expected header 'm <count> kind <triangular|gromov:l>'")
                header = (int(tok[1]), tok[3])
                continue
            rels.append(tuple(parse_letter(t) for t in line.split()))
        if header is None:
            raise ParameterError("missing header")
        return cls(header[0], tuple(rels), header[1])

    def write(self, path) -> None:
        Path(path).write_text(self.to_text())

    @classmethod
    def read(cls, path) -> "Presentation":
        return cls.from_text(Path(path).read_text())


def density_count(k: int, length: int, density: float) -> int:
    """round((2k-1)^{density * length}), ties to even."""
    return int(round((2 * k - 1) ** (density * length)))


def _binomial_sample(k: int, length: int, rho: float, gen: np.random.Generator) -> list[tuple]:
    """Each cyclically reduced word kept independently with probability rho.

    Walks the lexicographic rank space of reduced words with geometric jumps, so
    only the included words are generated; non-cyclically-reduced hits are dropped.
    """
    if rho <= 0:
        return []
    total = reduced_word_total(k, length)
    if rho >= 1:
        return [w for w in reduced_words(k, length) if is_cyclically_reduced(w)]
    out = []
    rank = -1
    while True:
        jumps = gen.geometric(rho, size=1024)
        for j in jumps.tolist():
            rank += j
            if rank >= total:
                return out
            w = rank_to_word(rank, k, length)
            if w[0] != w[-1] ^ 1:
                out.append(w)


def _uniform_reduced(k: int, length: int, gen: np.random.Generator, n: int) -> list[tuple]:
    first = gen.integers(0, 2 * k, size=n)
    rest = gen.integers(0, 2 * k - 1, size=(n, length - 1))
    words = []
    for f, row in zip(first.tolist(), rest.tolist()):
        w = [f]
        for dgt in row:
            bad = w[-1] ^ 1
            w.append(dgt if dgt < bad else dgt + 1)
        words.append(tuple(w))
    return words


def _density_sample(k: int, length: int, count: int, gen: np.random.Generator) -> list[tuple]:
    """Uniform subset of ``count`` distinct cyclically reduced words."""
    total = cyclically_reduced_total(k, length)
    if count > total:
        raise ParameterError(f"count {count} exceeds the {total} cyclically reduced words")
    if count < 0:
        raise ParameterError("count must be non-negative")
    if total <= ENUM_LIMIT or 2 * count > total:
        if total > ENUM_LIMIT:
            raise SizeError("requested more than half of a space too large to enumerate")
        pool = [w for w in reduced_words(k, length) if is_cyclically_reduced(w)]
        idx = gen.choice(len(pool), size=count, replace=False)
        return sorted(pool[i] for i in idx.tolist())
    chosen: set = set()
    while len(chosen) < count:
        for w in _uniform_reduced(k, length, gen, max(64, 2 * (count - len(chosen)))):
            if w[0] != w[-1] ^ 1:
                chosen.add(w)
                if len(chosen) == count:
                    break
    return sorted(chosen)


def _parse_mode(mode):
    if isinstance(mode, tuple) and len(mode) == 2 and mode[0] in ("binomial", "density"):
        return mode
    raise ParameterError("mode must be ('binomial', rho) or ('density', count)")


def sample_triangular(m: int, mode, rng) -> Presentation:
    """Random triangular presentation: mode ('binomial', rho) or ('density', count)."""
    kind, val = _parse_mode(mode)
    gen = _gen(rng)
    if kind == "binomial":
        if not 0 <= val <= 1:
            raise ParameterError("rho must lie in [0, 1]")
        rels = _binomial_sample(m, 3, float(val), gen)
    else:
        rels = _density_sample(m, 3, int(val), gen)
    return Presentation(m, tuple(rels), "triangular")


def sample_gromov(k: int, length: int, mode, rng) -> Presentation:
    """Random presentation with cyclically reduced relators of the given length."""
    if length < 3:
        raise ParameterError("relator length must be >= 3")
    kind, val = _parse_mode(mode)
    gen = _gen(rng)
    if kind == "binomial":
        if not 0 <= val <= 1:
            raise ParameterError("rho must lie in [0, 1]")
        rels = _binomial_sample(k, length, float(val), gen)
    else:
        rels = _density_sample(k, length, int(val), gen)
    return Presentation(k, tuple(rels), f"gromov:{length}")


# ---------------------------------------------------------------------------
# word counts

def reduced_word_count_qn(k: int, n: int) -> int:
    """q_n: reduced words of length n+2 with prescribed end letters number q_n or q_n + 1."""
    if k < 2 or n < 1:
        raise ParameterError("need k >= 2 and n >= 1")
    b = 2 * k - 1
    num = b ** (n + 1) - 1 if n % 2 else b ** (n + 1) - b
    assert num % (2 * k) == 0
    return num // (2 * k)


def count_completions(k: int, a: int, b: int, n: int) -> int:
    """Enumerate reduced words a w b with |w| = n and count them."""
    count = 0
    for mid in itertools.product(range(2 * k), repeat=n):
        if is_reduced((a,) + mid + (b,)):
            count += 1
    return count


# ---------------------------------------------------------------------------
# Gromov lift

@dataclass(frozen=True)
class GromovLift:
    presentation: Presentation
    block_length: int
    phi: tuple  # phi[s] = reduced word of length l/3 for generator s of the lift
    vertex_part: np.ndarray = field(repr=False)  # initial letter of phi(v) for each link vertex v
    part_size: int = 0

    def phi_letter(self, code: int) -> tuple:
        w = self.phi[code >> 1]
        return invert_word(w) if code & 1 else w

    def phi_word(self, word) -> tuple:
        return tuple(c for code in word for c in self.phi_letter(code))


def gromov_lift(P: Presentation) -> GromovLift:
    """Rewrite a length-l presentation (3 | l) as a triangular one over generators for W_{l/3} / inversion."""
    length = P.relator_length
    if length % 3:
        raise ParameterError("relator length must be divisible by 3")
    k, n = P.m, length // 3
    if reduced_word_total(k, n) > ENUM_LIMIT:
        raise SizeError("W_{l/3} too large to index")
    reps = sorted({min(w, invert_word(w)) for w in reduced_words(k, n)})
    index = {w: i for i, w in enumerate(reps)}

    def code_of(block):
        if block in index:
            return 2 * index[block]
        return 2 * index[invert_word(block)] + 1

    rels = tuple(tuple(code_of(r[i * n:(i + 1) * n]) for i in range(3)) for r in P.relators)
    lifted = Presentation(len(reps), rels, "triangular")
    vertex_part = np.empty(2 * len(reps), dtype=np.int64)
    for s, w in enumerate(reps):
        vertex_part[2 * s] = w[0]
        vertex_part[2 * s + 1] = invert_word(w)[0]
    return GromovLift(lifted, n, tuple(reps), vertex_part, (2 * k - 1) ** (n - 1))


# ---------------------------------------------------------------------------
# link graphs

@dataclass(frozen=True, eq=False)
class LinkGraph:
    base: Multigraph
    edge_class: np.ndarray  # 1, 2 or 3 per edge

    def link_class(self, i: int) -> Multigraph:
        if i not in (1, 2, 3):
            raise ParameterError("class must be 1, 2 or 3")
        return self.base.edge_subgraph(self.edge_class == i)


def build_link_graph(P: Presentation) -> LinkGraph:
    """Edges (x^-1, y) class 1, (y^-1, z) class 2, (z^-1, x) class 3 for each relator xyz."""
    if P.relator_length != 3:
        raise ParameterError("link graphs need a triangular presentation")
    r = np.array(P.relators, dtype=np.int64).reshape(-1, 3)
    x, y, z = r[:, 0], r[:, 1], r[:, 2]
    edges = np.vstack([np.column_stack([x ^ 1, y]), np.column_stack([y ^ 1, z]), np.column_stack([z ^ 1, x])])
    cls = np.repeat(np.array([1, 2, 3]), r.shape[0])
    return LinkGraph(Multigraph(2 * P.m, edges), cls)


def link_class(L: LinkGraph, i: int) -> Multigraph:
    return L.link_class(i)


@dataclass
class ClassStructure:
    edges: int
    distinct_pairs: int
    multi_pairs: int  # pairs joined by >= 2 edges
    duplicate_edges: int  # sum over pairs of (multiplicity - 1)
    max_multiplicity: int
    triple_pairs: int  # pairs joined by >= 3 edges
    duplicates_form_matching: bool
    within_part_edges: int | None = None


def class_structure(G: Multigraph, vertex_part=None) -> ClassStructure:
    mult = G.pair_multiplicities()
    multi = [pair for pair, c in mult.items() if c >= 2]
    touched = [v for pair in multi for v in pair]
    within = None
    if vertex_part is not None:
        vp = np.asarray(vertex_part)
        within = int(np.sum(vp[G.tails] == vp[G.heads]))
    return ClassStructure(
        edges=G.n_edges,
        distinct_pairs=len(mult),
        multi_pairs=len(multi),
        duplicate_edges=int(sum(c - 1 for c in mult.values())),
        max_multiplicity=max(mult.values(), default=0),
        triple_pairs=sum(1 for c in mult.values() if c >= 3),
        duplicates_form_matching=len(touched) == len(set(touched)),
        within_part_edges=within,
    )


def link_structure_report(L: LinkGraph, vertex_part=None) -> dict:
    """Per-class structure: simple part, duplicate set, whether duplicates form a matching."""
    return {i: class_structure(L.link_class(i), vertex_part) for i in (1, 2, 3)}


def link_structure_rho_prime(m: int, rho: float) -> float:
    """Edge probability 1 - (1 - rho)^{4m-4} of the simple part of a link class."""
    return 1.0 - (1.0 - rho) ** (4 * m - 4)
