"""Monotone access structures over small player sets.

Players are numbered 1..n and subsets are bitmasks with player i at bit
i-1.  An access structure is stored as the antichain of its minimal
authorized sets; everything else (authorization tests, duality,
quantum-validity, purification, the Csirmaz staircase family) is derived
from that antichain.  All values are immutable and all operations are
pure functions, so structures can be shared freely between workers.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator

#: Hard cap on ground-set elements (players, purifier and reference system).
CAPACITY = 16


class StructureError(ValueError):
    """Invalid access-structure input (bad index, broken antichain, ...)."""


class CapacityError(ValueError):
    """An operation would exceed the supported number of elements."""


@dataclass(frozen=True)
class PlayerSet:
    """Subset of {1..n} encoded as a bitmask, player i at bit i-1."""

    bits: int
    n: int

    def __post_init__(self) -> None:
        if not 1 <= self.n <= CAPACITY:
            raise CapacityError(f"ground size {self.n} outside 1..{CAPACITY}")
        if self.bits < 0 or self.bits & ~((1 << self.n) - 1):
            raise StructureError(
                f"bitmask {self.bits:#x} sets bits outside ground {{1..{self.n}}}"
            )

    @classmethod
    def from_players(cls, n: int, players: Iterable[int]) -> "PlayerSet":
        bits = 0
        for p in players:
            if not 1 <= p <= n:
                raise StructureError(f"player {p} outside ground {{1..{n}}}")
            bits |= 1 << (p - 1)
        return cls(bits, n)

    @classmethod
    def empty(cls, n: int) -> "PlayerSet":
        return cls(0, n)

    @classmethod
    def full(cls, n: int) -> "PlayerSet":
        return cls((1 << n) - 1, n)

    def players(self) -> tuple[int, ...]:
        return tuple(i + 1 for i in range(self.n) if self.bits >> i & 1)

    def __iter__(self) -> Iterator[int]:
        return iter(self.players())

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __contains__(self, player: int) -> bool:
        return 1 <= player <= self.n and bool(self.bits >> (player - 1) & 1)

    def _check_same_ground(self, other: "PlayerSet") -> None:
        if self.n != other.n:
            raise StructureError("operands live on different ground sets")

    def union(self, other: "PlayerSet") -> "PlayerSet":
        self._check_same_ground(other)
        return PlayerSet(self.bits | other.bits, self.n)

    def intersection(self, other: "PlayerSet") -> "PlayerSet":
        self._check_same_ground(other)
        return PlayerSet(self.bits & other.bits, self.n)

    def difference(self, other: "PlayerSet") -> "PlayerSet":
        self._check_same_ground(other)
        return PlayerSet(self.bits & ~other.bits, self.n)

    def complement(self) -> "PlayerSet":
        """Complement within the declared ground set {1..n}."""
        return PlayerSet(~self.bits & ((1 << self.n) - 1), self.n)

    def issubset(self, other: "PlayerSet") -> bool:
        self._check_same_ground(other)
        return not self.bits & ~other.bits

    def isdisjoint(self, other: "PlayerSet") -> bool:
        self._check_same_ground(other)
        return not self.bits & other.bits

    def sort_key(self) -> tuple[int, int]:
        """Canonical order: cardinality ascending, bitmask value ascending."""
        return (self.bits.bit_count(), self.bits)

    def __str__(self) -> str:
        return "(" + ",".join(str(p) for p in self.players()) + ")"


@dataclass(frozen=True)
class AccessStructure:
    """Monotone access structure given by its antichain of minimal sets.

    The constructor validates the antichain and the canonical order; use
    :func:`from_minimal_sets` to build one from raw player lists.
    """

    n: int
    minimal_sets: tuple[PlayerSet, ...]

    def __post_init__(self) -> None:
        # Reserve one element for the reference system of the entropy model.
        if not 1 <= self.n <= CAPACITY - 1:
            raise CapacityError(f"player count {self.n} outside 1..{CAPACITY - 1}")
        if not self.minimal_sets:
            raise StructureError("an access structure needs at least one authorized set")
        for s in self.minimal_sets:
            if s.n != self.n:
                raise StructureError("minimal set declared on a different ground")
            if s.bits == 0:
                raise StructureError("minimal sets must be nonempty")
        for i, a in enumerate(self.minimal_sets):
            for b in self.minimal_sets[i + 1:]:
                if a.issubset(b) or b.issubset(a):
                    raise StructureError(
                        f"antichain violated: {a} and {b} are nested"
                    )
        if list(self.minimal_sets) != sorted(self.minimal_sets, key=PlayerSet.sort_key):
            raise StructureError("minimal sets not in canonical order")

    def is_authorized(self, subset: PlayerSet) -> bool:
        """True iff ``subset`` contains some minimal authorized set."""
        if subset.n != self.n:
            raise StructureError("subset declared on a different ground")
        return self.mask_authorized(subset.bits)

    def mask_authorized(self, mask: int) -> bool:
        """Authorization test on a raw bitmask (player i at bit i-1)."""
        return any(not m.bits & ~mask for m in self.minimal_sets)

    def subset(self, players: Iterable[int]) -> PlayerSet:
        return PlayerSet.from_players(self.n, players)

    def minimal_player_lists(self) -> list[list[int]]:
        return [list(m.players()) for m in self.minimal_sets]


def from_minimal_sets(n: int, sets: Iterable[Iterable[int]]) -> AccessStructure:
    """Build the canonical access structure from lists of player indices.

    Input order is irrelevant; the result stores the antichain sorted by
    (cardinality, bitmask).  Raises :class:`StructureError` on an empty
    collection, an empty member, an out-of-range index, or a violated
    antichain (one set containing another, duplicates included).
    """
    members = [PlayerSet.from_players(n, s) for s in sets]
    if not members:
        raise StructureError("no authorized sets given")
    for m in members:
        if m.bits == 0:
            raise StructureError("authorized sets must be nonempty")
    members.sort(key=PlayerSet.sort_key)
    return AccessStructure(n, tuple(members))


def is_authorized(structure: AccessStructure, subset: PlayerSet) -> bool:
    """True iff ``subset`` contains a minimal set of ``structure``."""
    return structure.is_authorized(subset)


def _minimal_members(n: int, member: Callable[[int], bool]) -> list[PlayerSet]:
    """Minimal elements of a monotone family given by a mask predicate."""
    out = []
    for mask in range(1, 1 << n):
        if not member(mask):
            continue
        m = mask
        lowered = False
        while m:
            low = m & -m
            if member(mask & ~low):
                lowered = True
                break
            m &= m - 1
        if not lowered:
            out.append(PlayerSet(mask, n))
    out.sort(key=PlayerSet.sort_key)
    return out


def dual(structure: AccessStructure) -> AccessStructure:
    """Dual structure: complements of the unauthorized sets.

    Computed by enumerating the 2^n subsets; n is small by design, so no
    sub-exponential transversal algorithm is attempted.
    """
    n = structure.n
    full = (1 << n) - 1

    def member(mask: int) -> bool:
        return not structure.mask_authorized(full & ~mask)

    return AccessStructure(n, tuple(_minimal_members(n, member)))


def is_quantum(structure: AccessStructure) -> bool:
    """True iff no two authorized sets are disjoint.

    Equivalent to requiring that pairwise intersections of minimal sets
    are nonempty, and to the absence of a set that is authorized together
    with its complement.
    """
    mins = structure.minimal_sets
    return all(
        mins[i].bits & mins[j].bits
        for i in range(len(mins))
        for j in range(i + 1, len(mins))
    )


def is_self_dual(structure: AccessStructure) -> bool:
    """True iff the structure equals its dual (canonical-form equality)."""
    return dual(structure) == structure


def purify(structure: AccessStructure) -> AccessStructure:
    """Self-dualize a quantum structure by adding one party.

    A self-dual input is returned unchanged (adding a party that sits in
    no minimal set would only distort rate reporting).  Otherwise party
    n+1 is added and, for every pair of complementary unauthorized sets,
    one side is promoted: the authorized sets of the result are those of
    the input plus ``{A + {n+1} : A and complement both unauthorized}``.
    Every subset of {1..n} keeps its authorized/unauthorized status.
    """
    if not is_quantum(structure):
        raise StructureError("purification requires a quantum access structure")
    if is_self_dual(structure):
        return structure
    n = structure.n
    if n + 1 > CAPACITY - 1:
        raise CapacityError(f"purification would exceed {CAPACITY - 1} players")
    full = (1 << n) - 1
    new_bit = 1 << n

    def member(mask: int) -> bool:
        inner = mask & full
        if structure.mask_authorized(inner):
            return True
        if not mask & new_bit:
            return False
        return not structure.mask_authorized(full & ~inner)

    return AccessStructure(n + 1, tuple(_minimal_members(n + 1, member)))


@dataclass(frozen=True)
class CsirmazParams:
    """Bookkeeping for a Csirmaz staircase structure.

    ``a_sets`` lists all 2^k subsets of A = {1..k} in decreasing
    cardinality (ties broken by ascending bitmask); ``b_sets`` is the
    chain B_0 = {} up to B_{2^k-2} = B = {k+1..n}.
    """

    n: int
    k: int
    a_sets: tuple[PlayerSet, ...]
    b_sets: tuple[PlayerSet, ...]


def csirmaz_k(n: int) -> int:
    """Largest k with n >= 2^k - 2 + k (defined for n >= 4)."""
    if n < 4:
        raise StructureError("the staircase family needs at least 4 players")
    k = 2
    while n >= 2 ** (k + 1) - 2 + (k + 1):
        k += 1
    return k


def csirmaz(n: int) -> tuple[AccessStructure, CsirmazParams]:
    """Csirmaz staircase structure on n players, with its parameters.

    A = {1..k} for the largest k with n >= 2^k - 2 + k and B = {k+1..n}.
    The minimal sets are A_i | B_i for 0 <= i < 2^k - 1 where the A_i
    run over subsets of A in decreasing cardinality and the B_i form a
    prefix chain of B ending with B itself.
    """
    k = csirmaz_k(n)
    a_mask = (1 << k) - 1
    a_subsets = sorted(
        range(a_mask + 1), key=lambda m: (-m.bit_count(), m)
    )
    a_sets = tuple(PlayerSet(m, n) for m in a_subsets)

    count = 2 ** k - 1  # minimal sets; b_sets has indices 0 .. 2^k - 2
    b_masks = [0]
    for i in range(1, count - 1):
        b_masks.append(((1 << i) - 1) << k)
    b_masks.append(((1 << (n - k)) - 1) << k)
    b_sets = tuple(PlayerSet(m, n) for m in b_masks)

    minimal = [a_sets[i].union(b_sets[i]) for i in range(count)]
    structure = from_minimal_sets(n, [m.players() for m in minimal])
    return structure, CsirmazParams(n=n, k=k, a_sets=a_sets, b_sets=b_sets)


def theorem3_reference_bound(k: int) -> Fraction:
    """Closed-form share-size bound (2^(k+1) - 1) / (2k + 1) for k >= 2."""
    if k < 2:
        raise StructureError("the reference bound is defined for k >= 2")
    return Fraction(2 ** (k + 1) - 1, 2 * k + 1)


def structure_to_dict(structure: AccessStructure) -> dict:
    """JSON-ready dict with 1-based player indices in canonical order."""
    return {"n": structure.n, "minimal_sets": structure.minimal_player_lists()}


def structure_from_dict(data: dict) -> AccessStructure:
    """Inverse of :func:`structure_to_dict`; extra keys are ignored."""
    try:
        n = data["n"]
        sets = data["minimal_sets"]
    except (TypeError, KeyError) as exc:
        raise StructureError(f"missing access-structure field: {exc}") from exc
    if not isinstance(n, int):
        raise StructureError("player count must be an integer")
    return from_minimal_sets(n, sets)
