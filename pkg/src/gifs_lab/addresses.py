"""Arity profiles, finite addresses, indexing functions and the parity-sum
digit transformer that drives the witnessing maps.

Digits are 1-based throughout, matching the way cells are labelled.  An
address is a plain tuple of ints; a full infinite address is represented by a
finite prefix followed by an implicit tail of ones.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

Address = tuple


@dataclass(frozen=True)
class ArityProfile:
    arities: tuple

    def __post_init__(self):
        ar = tuple(int(a) for a in self.arities)
        object.__setattr__(self, "arities", ar)
        if len(ar) < 1:
            raise ValueError("profile needs depth N >= 1")
        if ar[0] < 2:
            raise ValueError(f"a_1 = {ar[0]} violates a_1 >= 2")
        for n in range(1, len(ar)):
            need = n * math.prod(ar[:n])
            if ar[n] < need:
                raise ValueError(
                    f"a_{n + 1} = {ar[n]} is below {n} times the product of the earlier arities ({need})")

    @classmethod
    def parse(cls, text: str) -> "ArityProfile":
        return cls(tuple(int(t) for t in text.split(",") if t.strip()))

    @property
    def depth(self) -> int:
        return len(self.arities)

    def arity(self, n: int) -> int:
        """a_n, 1-based."""
        return self.arities[n - 1]

    def count(self, k: int) -> int:
        return math.prod(self.arities[:k])

    def growth_margins(self) -> list:
        """a_{n+1} - n*a_1*...*a_n for each n < N (nonnegative for valid profiles)."""
        return [self.arities[n] - n * math.prod(self.arities[:n]) for n in range(1, self.depth)]

    def to_json(self) -> str:
        return json.dumps({"arities": list(self.arities)})

    @classmethod
    def from_json(cls, text: str) -> "ArityProfile":
        return cls(tuple(json.loads(text)["arities"]))


def is_address(profile: ArityProfile, addr: Sequence[int]) -> bool:
    return (0 < len(addr) <= profile.depth
            and all(1 <= d <= a for d, a in zip(addr, profile.arities)))


def enumerate_addresses(profile: ArityProfile, k: int) -> list:
    """All addresses of length k in lexicographic order."""
    if not 1 <= k <= profile.depth:
        raise ValueError(f"depth {k} outside 1..{profile.depth}")
    return list(itertools.product(*(range(1, a + 1) for a in profile.arities[:k])))


@dataclass(frozen=True)
class IndexingFunction:
    """Assignment of addresses to odd integers 1, 3, 5, ...

    Even arguments are left unassigned.
    """

    assignment: dict

    def __call__(self, n: int) -> Address:
        if n % 2 == 0:
            raise ValueError("the indexing function is defined on odd integers only")
        try:
            return self.assignment[n]
        except KeyError:
            raise ValueError(f"no address assigned to {n}") from None

    @property
    def max_index(self) -> int:
        return max(self.assignment)

    def is_valid(self, profile: ArityProfile) -> bool:
        image = set(self.assignment.values())
        every = {a for k in range(1, profile.depth + 1) for a in enumerate_addresses(profile, k)}
        return (image == every
                and all(n % 2 == 1 and len(a) <= n and is_address(profile, a)
                        for n, a in self.assignment.items()))

    def to_dict(self) -> dict:
        return {str(n): list(a) for n, a in sorted(self.assignment.items())}

    @classmethod
    def from_dict(cls, data: dict) -> "IndexingFunction":
        return cls({int(n): tuple(a) for n, a in data.items()})


def build_indexing_function(profile: ArityProfile) -> IndexingFunction:
    """Length-then-lex enumeration of all addresses up to depth N, the m-th
    (1-based) one assigned to 2m - 1."""
    ordered = [a for k in range(1, profile.depth + 1) for a in enumerate_addresses(profile, k)]
    assignment = {2 * m + 1: a for m, a in enumerate(ordered)}
    phi = IndexingFunction(assignment)
    for n, a in assignment.items():
        if len(a) > n:
            raise AssertionError(f"indexing constraint violated: Phi({n}) = {a}")
    if not phi.is_valid(profile):
        raise AssertionError("indexing function failed validation")
    return phi


def entries_needed(profile: ArityProfile, prefix_len: int, length: int | None = None) -> int:
    """Number of leading sequence entries read to produce an output of the
    given length from a prefix of ``prefix_len`` digits."""
    length = profile.depth if length is None else length
    return max((profile.arity(j + prefix_len) - 1 for j in range(1, length - prefix_len + 1)),
               default=0)


def read_window(profile: ArityProfile, prefix_len: int, length: int | None = None) -> list:
    """Digit positions (1-based) read from each input entry, entry by entry.

    Output digit ``prefix_len + j`` is a parity sum over digit j of the first
    a_{j + prefix_len} - 1 entries.
    """
    length = profile.depth if length is None else length
    window = [[] for _ in range(entries_needed(profile, prefix_len, length))]
    for j in range(1, length - prefix_len + 1):
        for m in range(profile.arity(j + prefix_len) - 1):
            window[m].append(j)
    return window


def digit_transform(i, inputs: Sequence[Sequence[int]], profile: ArityProfile,
                    length: int | None = None) -> Address:
    """Output address (i, beta_1, ..., beta_{L-p}) for a prefix i of length p.

    ``i`` is either a first digit or a tuple of leading digits.  Each
    beta_j = 1 + number of odd digit-j values among the first
    a_{j+p} - 1 inputs.  Default output length is the profile depth.
    """
    prefix = (i,) if isinstance(i, int) else tuple(i)
    p = len(prefix)
    length = profile.depth if length is None else length
    if not is_address(profile, prefix) or not p <= length <= profile.depth:
        raise ValueError(f"bad prefix {prefix} or output length {length}")
    out = list(prefix)
    for j in range(1, length - p + 1):
        used = profile.arity(j + p) - 1
        if len(inputs) < used:
            raise ValueError(f"digit {j + p} needs {used} inputs, got {len(inputs)}")
        parity = 0
        for m in range(used):
            if len(inputs[m]) < j:
                raise ValueError(f"input {m + 1} has depth {len(inputs[m])}, need {j}")
            parity += inputs[m][j - 1] % 2
        out.append(1 + parity)
    return tuple(out)


def preimage_witness(target: Sequence[int], profile: ArityProfile, prefix_len: int = 1):
    """Inputs that ``digit_transform`` maps onto ``target``.

    Returns (prefix, inputs), where input m has digit k equal to 1 if
    m <= target[p + k] - 1 and 2 otherwise.
    """
    target = tuple(target)
    if not is_address(profile, target) or len(target) < prefix_len:
        raise ValueError(f"malformed target {target}")
    p = prefix_len
    count = max(entries_needed(profile, p, len(target)), 1)
    depth = max(len(target) - p, 1)
    inputs = []
    for m in range(1, count + 1):
        digits = []
        for k in range(1, depth + 1):
            want = target[p + k - 1] if p + k - 1 < len(target) else 1
            digits.append(1 if m <= want - 1 else 2)
        inputs.append(tuple(digits))
    prefix = target[0] if p == 1 else target[:p]
    return prefix, inputs


def address_key(addr: Iterable[int]) -> str:
    return ".".join(str(d) for d in addr)


def parse_address_key(key: str) -> Address:
    return tuple(int(t) for t in key.split("."))
