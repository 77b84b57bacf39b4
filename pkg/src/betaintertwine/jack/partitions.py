"""Integer partitions: conjugation, statistics, orderings and enumeration."""

from __future__ import annotations

from functools import lru_cache
from math import comb
from typing import Iterable, Iterator, Sequence

from .._validation import DomainError


class Partition(tuple):
    """Weakly decreasing tuple of positive integers.

    Trailing zeros are stripped on construction, so ``Partition((2, 1, 0))``
    equals ``Partition((2, 1))``. The empty tuple is the zero partition.
    """

    __slots__ = ()

    def __new__(cls, parts: Iterable[int] = ()):
        parts = tuple(int(p) for p in parts)
        while parts and parts[-1] == 0:
            parts = parts[:-1]
        for p, q in zip(parts, parts[1:]):
            if q > p:
                raise DomainError(f"parts must be weakly decreasing, got {parts}")
        if parts and parts[-1] < 0:
            raise DomainError(f"parts must be nonnegative, got {parts}")
        return super().__new__(cls, parts)

    @property
    def weight(self) -> int:
        return sum(self)

    @property
    def length(self) -> int:
        return len(self)

    def part(self, i: int) -> int:
        """1-based part access, zero beyond the length."""
        return self[i - 1] if 1 <= i <= len(self) else 0

    def __repr__(self) -> str:
        return f"Partition({tuple(self)})"


def as_partition(obj) -> Partition:
    return obj if isinstance(obj, Partition) else Partition(obj)


@lru_cache(maxsize=None)
def conjugate(lam: Sequence[int]) -> Partition:
    """Return the conjugate partition (column lengths of the Young diagram)."""
    lam = as_partition(lam)
    if not lam:
        return Partition()
    return Partition(sum(1 for p in lam if p >= i) for i in range(1, lam[0] + 1))


def b_stat(lam: Sequence[int]) -> int:
    """``sum_i (i - 1) * lam_i`` (1-based ``i``)."""
    return sum(i * p for i, p in enumerate(as_partition(lam)))


def b_stat_columns(lam: Sequence[int]) -> int:
    """Same statistic computed from columns: ``sum_i C(lam'_i, 2)``."""
    return sum(comb(c, 2) for c in conjugate(as_partition(lam)))


def dominates(lam: Sequence[int], mu: Sequence[int]) -> bool:
    """True when ``mu <= lam`` in dominance order (equal weights required)."""
    if sum(lam) != sum(mu):
        return False
    a = b = 0
    for i in range(max(len(lam), len(mu))):
        a += lam[i] if i < len(lam) else 0
        b += mu[i] if i < len(mu) else 0
        if b > a:
            return False
    return True


def remove_box(lam: Sequence[int], i: int) -> Partition | None:
    """The sequence ``lam_(i)``: lower the ``i``-th part (1-based) by one.

    Returns ``None`` when the result is not weakly decreasing. A trailing
    part equal to one is dropped.
    """
    lam = as_partition(lam)
    if not 1 <= i <= len(lam):
        raise DomainError(f"row index {i} outside 1..{len(lam)}")
    parts = list(lam)
    parts[i - 1] -= 1
    if i < len(parts) and parts[i] > parts[i - 1]:
        return None
    return Partition(parts)


def lowered(lam: Sequence[int]) -> list[tuple[int, Partition]]:
    """All valid ``(i, lam_(i))`` pairs."""
    lam = as_partition(lam)
    out = []
    for i in range(1, len(lam) + 1):
        rho = remove_box(lam, i)
        if rho is not None:
            out.append((i, rho))
    return out


def partitions_of(weight: int, max_length: int | None = None,
                  max_part: int | None = None) -> Iterator[Partition]:
    """Partitions of ``weight`` in decreasing lexicographic order."""
    if max_part is None:
        max_part = weight
    if max_length is None:
        max_length = weight

    def rec(rem, cap, slots):
        if rem == 0:
            yield ()
            return
        if slots == 0:
            return
        for p in range(min(rem, cap), 0, -1):
            for rest in rec(rem - p, p, slots - 1):
                yield (p,) + rest

    for parts in rec(weight, max_part, max_length):
        yield Partition(parts)


def partitions_up_to(max_weight: int, max_length: int | None = None) -> list[Partition]:
    """All partitions with weight ``<= max_weight``, in basis order."""
    out = []
    for w in range(max_weight + 1):
        out.extend(partitions_of(w, max_length))
    return sorted(out, key=basis_key)


def basis_key(lam: Sequence[int]):
    """Sort key: weight first, then reverse-lexicographic within a weight.

    Inside a fixed weight, lexicographically larger partitions come later,
    so a partition that dominates another is always placed after it.
    """
    return (sum(lam), tuple(lam))


def contained_in(top: Sequence[int], max_length: int | None = None) -> list[Partition]:
    """Down-set ``{kappa : kappa_i <= top_i}`` sorted by :func:`basis_key`."""
    top = as_partition(top)
    if max_length is not None:
        top_len = min(len(top), max_length)
    else:
        top_len = len(top)
    out = []

    def rec(i, cap, acc):
        if i == top_len:
            out.append(Partition(acc))
            return
        for p in range(min(cap, top[i]), -1, -1):
            if p == 0:
                out.append(Partition(acc))
                continue
            rec(i + 1, p, acc + (p,))

    rec(0, top[0] if top else 0, ())
    return sorted(set(out), key=basis_key)


def distinct_permutations_count(lam: Sequence[int], n: int) -> int:
    """Number of distinct exponent vectors obtained by permuting ``lam`` padded to ``n``."""
    from math import factorial
    lam = as_partition(lam)
    if len(lam) > n:
        return 0
    counts: dict[int, int] = {}
    for p in tuple(lam) + (0,) * (n - len(lam)):
        counts[p] = counts.get(p, 0) + 1
    denom = 1
    for c in counts.values():
        denom *= factorial(c)
    return factorial(n) // denom
