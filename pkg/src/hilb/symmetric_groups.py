"""Permutations of [n] = {1, ..., n}, cycle types, orbits and the graph defect.

Composition convention, fixed once for the whole package:

    (sigma * tau)(i) = sigma(tau(i))

i.e. `compose(sigma, tau)` applies tau first.  Orbit partitions are always
presented canonically: each block sorted ascending, blocks ordered by their
minimal element.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations
from math import factorial

from .errors import InternalInvariantError, ResourceError, UsageError


class Perm:
    """A permutation of {1, ..., n}, stored as its image sequence."""

    __slots__ = ("images", "_hash")

    def __init__(self, images):
        images = tuple(images)
        if sorted(images) != list(range(1, len(images) + 1)):
            raise UsageError(f"not a permutation of [n]: {images}")
        self.images = images
        self._hash = hash(images)

    @property
    def n(self) -> int:
        return len(self.images)

    @classmethod
    def identity(cls, n: int) -> "Perm":
        return cls(range(1, n + 1))

    @classmethod
    def from_cycles(cls, cycles, n: int) -> "Perm":
        images = list(range(1, n + 1))
        seen: set[int] = set()
        for cycle in cycles:
            cycle = list(cycle)
            for x in cycle:
                if not 1 <= x <= n:
                    raise UsageError(f"cycle entry {x} outside [{n}]")
                if x in seen:
                    raise UsageError(f"cycles are not disjoint at {x}")
                seen.add(x)
            for a, b in zip(cycle, cycle[1:] + cycle[:1]):
                images[a - 1] = b
        return cls(images)

    def __call__(self, i: int) -> int:
        return self.images[i - 1]

    def __eq__(self, other) -> bool:
        return isinstance(other, Perm) and self.images == other.images

    def __lt__(self, other: "Perm") -> bool:
        return self.images < other.images

    def __hash__(self):
        return self._hash

    def __repr__(self) -> str:
        return f"Perm({self.images})"

    def compose(self, other: "Perm") -> "Perm":
        """self after other: (self.compose(other))(i) = self(other(i))."""
        if self.n != other.n:
            raise UsageError("composed permutations must act on the same [n]")
        return Perm(tuple(self.images[j - 1] for j in other.images))

    def inverse(self) -> "Perm":
        inv = [0] * self.n
        for i, j in enumerate(self.images, start=1):
            inv[j - 1] = i
        return Perm(inv)

    def cycles(self) -> tuple[tuple[int, ...], ...]:
        """Disjoint cycles (including fixed points), canonically ordered."""
        seen: set[int] = set()
        out = []
        for start in range(1, self.n + 1):
            if start in seen:
                continue
            cycle = [start]
            seen.add(start)
            nxt = self(start)
            while nxt != start:
                cycle.append(nxt)
                seen.add(nxt)
                nxt = self(nxt)
            out.append(tuple(cycle))
        return tuple(out)

    def cycle_string(self) -> str:
        """Cycle notation with fixed points suppressed; identity renders `id`."""
        parts = [c for c in self.cycles() if len(c) > 1]
        if not parts:
            return "id"
        return "".join("(" + " ".join(str(x) for x in c) + ")" for c in parts)


def parse_cycles(text: str, n: int) -> Perm:
    """Parse `(1 2)(3 4 5)` or `id` into a permutation of [n]."""
    text = text.strip()
    if text == "id" or text == "":
        return Perm.identity(n)
    if not text.startswith("("):
        raise UsageError(f"cannot parse cycle notation: {text!r}")
    cycles = []
    rest = text
    while rest:
        rest = rest.strip()
        if not rest.startswith("(") or ")" not in rest:
            raise UsageError(f"cannot parse cycle notation: {text!r}")
        body, rest = rest[1:].split(")", 1)
        entries = body.replace(",", " ").split()
        try:
            cycle = [int(x) for x in entries]
        except ValueError as exc:
            raise UsageError(f"cannot parse cycle notation: {text!r}") from exc
        if len(cycle) < 1:
            raise UsageError(f"empty cycle in {text!r}")
        cycles.append(cycle)
    return Perm.from_cycles(cycles, n)


@dataclass(frozen=True)
class Partition:
    """A partition of n stored by multiplicities: mults[i-1] = number of parts i."""

    mults: tuple[int, ...]

    def __post_init__(self):
        if any(a < 0 for a in self.mults):
            raise UsageError("partition multiplicities must be nonnegative")

    @property
    def n(self) -> int:
        return sum(i * a for i, a in enumerate(self.mults, start=1))

    @property
    def length(self) -> int:
        return sum(self.mults)

    def parts(self) -> tuple[int, ...]:
        out = []
        for i, a in enumerate(self.mults, start=1):
            out.extend([i] * a)
        return tuple(reversed(out))

    def render(self) -> str:
        return (
            "".join(f"{i}^{a}" for i, a in enumerate(self.mults, start=1) if a)
            or "()"
        )


@dataclass(frozen=True)
class OrbitPartition:
    """A set partition of a carrier set, canonically ordered."""

    blocks: tuple[tuple[int, ...], ...]

    def carrier(self) -> tuple[int, ...]:
        return tuple(sorted(x for block in self.blocks for x in block))

    def __len__(self) -> int:
        return len(self.blocks)

    def block_of(self, x: int) -> tuple[int, ...]:
        for block in self.blocks:
            if x in block:
                return block
        raise UsageError(f"{x} not in carrier")

    def refines(self, coarser: "OrbitPartition") -> bool:
        """True if every block of self lies inside a block of `coarser`."""
        location = {}
        for idx, block in enumerate(coarser.blocks):
            for x in block:
                location[x] = idx
        for block in self.blocks:
            targets = {location.get(x) for x in block}
            if len(targets) != 1 or None in targets:
                return False
        return True


class _UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[max(rx, ry)] = min(rx, ry)


def orbits(n: int, generators, carrier=None) -> OrbitPartition:
    """Orbit partition of the group generated by `generators` on the carrier.

    The carrier defaults to all of [n]; when a proper subset is given, every
    generator must fix it setwise.
    """
    if carrier is None:
        carrier = range(1, n + 1)
    carrier = sorted(set(carrier))
    if any(not 1 <= x <= n for x in carrier):
        raise UsageError(f"carrier must be a subset of [{n}]")
    carrier_set = set(carrier)
    uf = _UnionFind(carrier)
    for g in generators:
        if g.n != n:
            raise UsageError("generators must act on the same [n]")
        for x in carrier:
            y = g(x)
            if y not in carrier_set:
                raise UsageError(
                    f"generator {g.cycle_string()} does not preserve the carrier"
                )
            uf.union(x, y)
    groups: dict[int, list[int]] = {}
    for x in carrier:
        groups.setdefault(uf.find(x), []).append(x)
    blocks = tuple(tuple(sorted(g)) for g in sorted(groups.values(), key=min))
    return OrbitPartition(blocks)


def cycle_type(sigma: Perm) -> Partition:
    """The partition 1^{a_1} ... n^{a_n} where a_i counts the i-cycles."""
    mults = [0] * sigma.n
    for cycle in sigma.cycles():
        mults[len(cycle) - 1] += 1
    return Partition(tuple(mults))


@lru_cache(maxsize=None)
def _orbit_count(images: tuple[int, ...], carrier: tuple[int, ...]) -> int:
    seen: set[int] = set()
    count = 0
    for start in carrier:
        if start in seen:
            continue
        count += 1
        x = start
        while x not in seen:
            seen.add(x)
            x = images[x - 1]
    return count


def graph_defect(sigma: Perm, tau: Perm) -> dict[tuple[int, ...], int]:
    """The graph defect of a pair of permutations, one value per joint orbit.

    For each orbit E of the group generated by sigma and tau,

        g(E) = (|E| + 2 - |<sigma>\\E| - |<tau>\\E| - |<sigma tau>\\E|) / 2,

    which is a nonnegative integer; a half-integer or negative value would
    contradict the underlying combinatorics and aborts.
    """
    if sigma.n != tau.n:
        raise UsageError("graph defect needs permutations of the same [n]")
    st = sigma.compose(tau)
    out: dict[tuple[int, ...], int] = {}
    for block in orbits(sigma.n, [sigma, tau]).blocks:
        twice = (
            len(block)
            + 2
            - _orbit_count(sigma.images, block)
            - _orbit_count(tau.images, block)
            - _orbit_count(st.images, block)
        )
        if twice < 0 or twice % 2 != 0:
            raise InternalInvariantError(
                f"graph defect {twice}/2 on orbit {block} for "
                f"{sigma.cycle_string()}, {tau.cycle_string()}"
            )
        out[block] = twice // 2
    return out


def enumerate_sn(n: int, limit: int = 8):
    """All n! permutations, lexicographic in image sequences; id comes first."""
    if n < 0:
        raise UsageError("n must be nonnegative")
    if n > limit:
        raise ResourceError(f"refusing to enumerate S_{n} (limit {limit}); {factorial(n)} elements")
    for images in permutations(range(1, n + 1)):
        yield Perm(images)
