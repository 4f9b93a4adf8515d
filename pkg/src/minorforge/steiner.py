"""(s,2)-Steiner systems: blocks of size s over [k] covering every pair exactly once.

Constructions, chosen by admissibility:

* s = 2: the set of all pairs.
* s = 3, k = 3 (mod 6): Bose construction over an idempotent commutative
  quasigroup on Z_(2t+1).
* s = 3, k = 1 (mod 6): Skolem construction over a half-idempotent commutative
  quasigroup on Z_(2t) plus an infinity point.
* s a prime power, k = s^2: line set of the affine plane AG(2, s).
* any k <= 30: exhaustive backtracking (always-complete-the-first-uncovered-pair).

Ground sets are 1-based ([k] = {1, ..., k}) to match the block file format.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from math import comb

from .errors import InfeasibleError, MinorforgeError, UnsupportedParametersError

BACKTRACK_LIMIT = 30


@dataclass(frozen=True)
class SteinerSystem:
    """Ground set [k], block size s, and the blocks themselves."""

    k: int
    s: int
    blocks: tuple[frozenset[int], ...]

    def __post_init__(self) -> None:
        for block in self.blocks:
            if len(block) != self.s:
                raise MinorforgeError(f"block {sorted(block)} has size != {self.s}")
            if not all(1 <= x <= self.k for x in block):
                raise MinorforgeError(f"block {sorted(block)} leaves ground set [{self.k}]")

    @property
    def r(self) -> int:
        return len(self.blocks)

    @cached_property
    def sorted_blocks(self) -> tuple[tuple[int, ...], ...]:
        return tuple(sorted(tuple(sorted(b)) for b in self.blocks))

    def replication(self, element: int) -> int:
        return sum(1 for b in self.blocks if element in b)


def validate_steiner(system: SteinerSystem) -> bool:
    """True iff every pair of [k] lies in exactly one block and the block count
    equals C(k,2)/C(s,2)."""
    expected, rem = divmod(comb(system.k, 2), comb(system.s, 2))
    if rem or system.r != expected:
        return False
    count: dict[tuple[int, int], int] = {}
    for block in system.blocks:
        for a, b in combinations(sorted(block), 2):
            count[(a, b)] = count.get((a, b), 0) + 1
            if count[(a, b)] > 1:
                return False
    return len(count) == comb(system.k, 2)


def admissible(k: int, s: int) -> bool:
    """Necessary divisibility conditions for an (s,2)-SS on [k]."""
    if k < s or s < 2:
        return False
    if k == s:
        return True
    return comb(k, 2) % comb(s, 2) == 0 and (k - 1) % (s - 1) == 0


def build_steiner(k: int, s: int) -> SteinerSystem:
    """Construct an (s,2)-Steiner system on [k].

    Raises InfeasibleError when no system exists (divisibility violation or an
    exhausted backtracking search) and UnsupportedParametersError when the
    parameters fall outside every implemented construction.
    """
    if s < 2 or k < s:
        raise UnsupportedParametersError(f"need 2 <= s <= k, got k={k}, s={s}")
    if not admissible(k, s):
        raise InfeasibleError(f"no ({s},2)-SS on [{k}]: divisibility conditions fail")
    if k == s:
        blocks: list[frozenset[int]] = [frozenset(range(1, k + 1))]
    elif s == 2:
        blocks = [frozenset(p) for p in combinations(range(1, k + 1), 2)]
    elif s == 3 and k % 6 == 3:
        blocks = _bose_triples(k)
    elif s == 3 and k % 6 == 1:
        blocks = _skolem_triples(k)
    elif _prime_power_base(s) is not None and k == s * s:
        blocks = _affine_plane(s)
    elif k <= BACKTRACK_LIMIT:
        found = _backtrack(k, s)
        if found is None:
            raise InfeasibleError(f"backtracking proved no ({s},2)-SS on [{k}] exists")
        blocks = found
    else:
        raise UnsupportedParametersError(
            f"no construction applies to k={k}, s={s} (backtracking capped at {BACKTRACK_LIMIT})"
        )
    system = SteinerSystem(k, s, tuple(blocks))
    if not validate_steiner(system):
        raise MinorforgeError(f"internal error: invalid system built for k={k}, s={s}")
    return system


def _bose_triples(k: int) -> list[frozenset[int]]:
    """k = 6t+3 via the idempotent quasigroup i*j = (t+1)(i+j) mod (2t+1)."""
    t = (k - 3) // 6
    n = 2 * t + 1
    half = t + 1  # multiplicative inverse of 2 mod n

    def elem(i: int, level: int) -> int:
        return 3 * i + level + 1

    blocks = [frozenset(elem(i, l) for l in range(3)) for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            q = (half * (i + j)) % n
            for l in range(3):
                blocks.append(
                    frozenset((elem(i, l), elem(j, l), elem(q, (l + 1) % 3)))
                )
    return blocks


def _skolem_triples(k: int) -> list[frozenset[int]]:
    """k = 6t+1 via a half-idempotent quasigroup on Z_(2t) plus a point at infinity."""
    t = (k - 1) // 6
    n = 2 * t

    def relabel(x: int) -> int:
        # even 2a -> a, odd 2a+1 -> t+a; turns the Z_(2t) addition table into
        # a commutative quasigroup with i*i = i exactly on 0..t-1
        return x // 2 if x % 2 == 0 else t + (x - 1) // 2

    def op(i: int, j: int) -> int:
        return relabel((i + j) % n)

    infinity = k  # highest label

    def elem(i: int, level: int) -> int:
        return 3 * i + level + 1

    blocks = [frozenset(elem(i, l) for l in range(3)) for i in range(t)]
    for i in range(t):
        for l in range(3):
            blocks.append(
                frozenset((infinity, elem(t + i, l), elem(i, (l + 1) % 3)))
            )
    for i in range(n):
        for j in range(i + 1, n):
            q = op(i, j)
            for l in range(3):
                blocks.append(
                    frozenset((elem(i, l), elem(j, l), elem(q, (l + 1) % 3)))
                )
    return blocks


def _prime_power_base(q: int) -> tuple[int, int] | None:
    """(p, e) with q = p^e and p prime, or None."""
    if q < 2:
        return None
    m = q
    p = None
    for d in range(2, q + 1):
        if d * d > m and p is None:
            p = m
            break
        if m % d == 0:
            p = d
            break
    e = 0
    while m % p == 0:
        m //= p
        e += 1
    return (p, e) if m == 1 else None


class _FiniteField:
    """GF(p^e) with elements 0..q-1 encoded as base-p coefficient vectors."""

    def __init__(self, q: int) -> None:
        base = _prime_power_base(q)
        if base is None:
            raise UnsupportedParametersError(f"{q} is not a prime power")
        self.q = q
        self.p, self.e = base
        self.modulus = self._find_irreducible() if self.e > 1 else None

    def _poly(self, x: int) -> tuple[int, ...]:
        out = []
        for _ in range(self.e):
            out.append(x % self.p)
            x //= self.p
        return tuple(out)

    def _index(self, coeffs) -> int:
        out = 0
        for c in reversed(coeffs):
            out = out * self.p + (c % self.p)
        return out

    def _poly_mul_mod(self, a: list[int], b: list[int], mod: list[int]) -> list[int]:
        prod = [0] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    prod[i + j] = (prod[i + j] + ai * bj) % self.p
        # reduce by the monic modulus
        for i in range(len(prod) - 1, len(mod) - 2, -1):
            c = prod[i]
            if c:
                shift = i - (len(mod) - 1)
                for j, mj in enumerate(mod):
                    prod[shift + j] = (prod[shift + j] - c * mj) % self.p
        return prod[: len(mod) - 1]

    def _find_irreducible(self) -> list[int]:
        # monic degree-e polynomials over Z_p, tested by trial division
        # against all monic polynomials of degree 1..e//2
        def monics(deg):
            for x in range(self.p**deg):
                yield list(self._poly_of_degree(x, deg)) + [1]

        def divides(d: list[int], f: list[int]) -> bool:
            rem = list(f)
            while len(rem) >= len(d) and any(rem):
                while rem and rem[-1] == 0:
                    rem.pop()
                if len(rem) < len(d):
                    break
                c = rem[-1]  # d is monic
                shift = len(rem) - len(d)
                for j, dj in enumerate(d):
                    rem[shift + j] = (rem[shift + j] - c * dj) % self.p
            while rem and rem[-1] == 0:
                rem.pop()
            return not rem

        for x in range(self.p**self.e):
            f = list(self._poly_of_degree(x, self.e)) + [1]
            if all(
                not divides(d, f)
                for deg in range(1, self.e // 2 + 1)
                for d in monics(deg)
            ):
                return f
        raise MinorforgeError("no irreducible polynomial found")  # unreachable

    def _poly_of_degree(self, x: int, deg: int) -> tuple[int, ...]:
        out = []
        for _ in range(deg):
            out.append(x % self.p)
            x //= self.p
        return tuple(out)

    def add(self, a: int, b: int) -> int:
        if self.e == 1:
            return (a + b) % self.p
        pa, pb = self._poly(a), self._poly(b)
        return self._index([(x + y) % self.p for x, y in zip(pa, pb)])

    def mul(self, a: int, b: int) -> int:
        if self.e == 1:
            return (a * b) % self.p
        prod = self._poly_mul_mod(list(self._poly(a)), list(self._poly(b)), self.modulus)
        return self._index(prod)


def _affine_plane(q: int) -> list[frozenset[int]]:
    """Lines of AG(2, q): k = q^2 points, q(q+1) lines of q points each."""
    field = _FiniteField(q)

    def point(x: int, y: int) -> int:
        return x * q + y + 1

    blocks = []
    for a in range(q):
        for b in range(q):
            blocks.append(
                frozenset(point(x, field.add(field.mul(a, x), b)) for x in range(q))
            )
    for c in range(q):
        blocks.append(frozenset(point(c, y) for y in range(q)))
    return blocks


def _backtrack(k: int, s: int) -> list[frozenset[int]] | None:
    """Exhaustive search: always complete the lexicographically first uncovered
    pair; the block's remaining elements are provably all larger than both."""
    covered = [[False] * (k + 1) for _ in range(k + 1)]
    blocks: list[tuple[int, ...]] = []
    total = comb(k, 2)
    done = 0

    def set_pairs(block: tuple[int, ...], value: bool) -> None:
        nonlocal done
        for a, b in combinations(block, 2):
            covered[a][b] = value
            done += 1 if value else -1

    def first_uncovered() -> tuple[int, int] | None:
        for a in range(1, k + 1):
            row = covered[a]
            for b in range(a + 1, k + 1):
                if not row[b]:
                    return a, b
        return None

    def search() -> bool:
        if done == total:
            return True
        a, b = first_uncovered()
        chosen = [a, b]

        def pick(start: int, need: int) -> bool:
            if need == 0:
                block = tuple(chosen)
                set_pairs(block, True)
                blocks.append(block)
                if search():
                    return True
                blocks.pop()
                set_pairs(block, False)
                return False
            for x in range(start, k + 2 - need):
                if all(not covered[y][x] for y in chosen):
                    chosen.append(x)
                    if pick(x + 1, need - 1):
                        return True
                    chosen.pop()
            return False

        return pick(b + 1, s - 2)

    if search():
        return [frozenset(b) for b in blocks]
    return None
