"""Value types: two-cubes, sign-vector sets, integer distributions.

Sign vectors are bit-packed into unsigned integers.  Coordinate 0 is the
most significant bit and bit value 1 stands for +1, so sorting codes sorts
vectors lexicographically with '-' before '+'.  The length-d prefix of a
vector with code c is ``c >> (n - d)``.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import (
    BadEntry,
    DimensionMismatch,
    InvalidDimension,
    NotInSet,
    ZeroDifference,
)

MAX_PACKED_DIM = 63


# ---------------------------------------------------------------------------
# two-cubes

@dataclass(frozen=True)
class TwoCube:
    """Product set A_1 x ... x A_n with A_j = {u_j, v_j}, u_j != v_j."""

    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if not self.pairs:
            raise InvalidDimension("a two-cube needs at least one coordinate")
        for j, (u, v) in enumerate(self.pairs):
            if u == v:
                raise ZeroDifference(j)

    @property
    def n(self) -> int:
        return len(self.pairs)

    @property
    def differences(self) -> tuple[int, ...]:
        return tuple(u - v for u, v in self.pairs)

    @cached_property
    def u(self) -> np.ndarray:
        return np.array([p[0] for p in self.pairs], dtype=np.int64)

    @cached_property
    def v(self) -> np.ndarray:
        return np.array([p[1] for p in self.pairs], dtype=np.int64)

    def point(self, choice: int) -> np.ndarray:
        """Element selected by a packed choice code (bit 1 picks u_j)."""
        bits = unpack_code(choice, self.n)
        return np.where(bits == 1, self.u, self.v)

    def choice_of(self, x: Sequence[int]) -> int:
        x = list(x)
        if len(x) != self.n:
            raise DimensionMismatch(f"expected length {self.n}, got {len(x)}")
        code = 0
        for j, (xj, (u, v)) in enumerate(zip(x, self.pairs)):
            if xj == u:
                bit = 1
            elif xj == v:
                bit = 0
            else:
                raise NotInSet(f"coordinate {j} value {xj} not in {{{u}, {v}}}")
            code = (code << 1) | bit
        return code

    def max_abs(self) -> int:
        return int(sum(max(abs(u), abs(v)) for u, v in self.pairs))


def make_two_cube(pairs: Iterable[Sequence[int]]) -> TwoCube:
    return TwoCube(tuple((int(u), int(v)) for u, v in pairs))


def hypercube(n: int) -> TwoCube:
    if n < 1:
        raise InvalidDimension(f"n must be positive, got {n}")
    return TwoCube(((1, -1),) * n)


# ---------------------------------------------------------------------------
# packing helpers

def pack_signs(vector: Sequence[int]) -> int:
    code = 0
    for j, e in enumerate(vector):
        if e == 1:
            code = (code << 1) | 1
        elif e == -1:
            code <<= 1
        else:
            raise BadEntry(j, e)
    return code


def unpack_code(code: int, n: int) -> np.ndarray:
    """Bits of ``code`` as a 0/1 array, coordinate 0 first."""
    shifts = np.arange(n - 1, -1, -1, dtype=np.uint64)
    return ((np.uint64(code) >> shifts) & np.uint64(1)).astype(np.int8)


def codes_to_signs(codes: np.ndarray, n: int) -> np.ndarray:
    shifts = np.arange(n - 1, -1, -1, dtype=np.uint64)
    bits = (codes.astype(np.uint64)[:, None] >> shifts[None, :]) & np.uint64(1)
    return (2 * bits.astype(np.int8) - 1).astype(np.int8)


# ---------------------------------------------------------------------------
# sign-vector sets

class VectorSet:
    """Finite nonempty subset of {+-1}^n, stored as sorted packed codes.

    The full cube is kept symbolic until its codes are actually needed.
    """

    def __init__(self, n: int, codes: np.ndarray | None):
        if n < 1 or n > MAX_PACKED_DIM:
            raise InvalidDimension(f"dimension must be in [1, {MAX_PACKED_DIM}], got {n}")
        self.n = n
        if codes is None:
            self._codes = None
            self._size = 1 << n
        else:
            codes = np.unique(np.asarray(codes, dtype=np.uint64))
            if codes.size == 0:
                raise InvalidDimension("vector set must be nonempty")
            if int(codes[-1]) >> n:
                raise DimensionMismatch("code exceeds dimension")
            codes.setflags(write=False)
            self._codes = codes
            self._size = int(codes.size)

    @classmethod
    def full(cls, n: int) -> "VectorSet":
        return cls(n, None)

    @property
    def codes(self) -> np.ndarray:
        if self._codes is None:
            codes = np.arange(1 << self.n, dtype=np.uint64)
            codes.setflags(write=False)
            self._codes = codes
        return self._codes

    def __len__(self) -> int:
        return self._size

    @property
    def size(self) -> int:
        return self._size

    @property
    def is_full(self) -> bool:
        return self._size == 1 << self.n

    @property
    def beta(self) -> float:
        return math.log2(self._size) / self.n

    def beta_fraction(self) -> Fraction | None:
        """Exact beta when |B| is a power of two, else None."""
        k = self._size.bit_length() - 1
        if 1 << k == self._size:
            return Fraction(k, self.n)
        return None

    @cached_property
    def signs(self) -> np.ndarray:
        """|B| x n int8 matrix of the members in code order."""
        return codes_to_signs(self.codes, self.n)

    def index_of(self, vector: Sequence[int]) -> int:
        vector = list(vector)
        if len(vector) != self.n:
            raise DimensionMismatch(f"expected length {self.n}, got {len(vector)}")
        code = pack_signs(vector)
        if self._codes is None:
            return code
        i = int(np.searchsorted(self._codes, np.uint64(code)))
        if i == self._size or int(self._codes[i]) != code:
            raise NotInSet(f"{render_signs(vector)} is not a member")
        return i

    def __contains__(self, vector) -> bool:
        try:
            self.index_of(vector)
        except (NotInSet, BadEntry, DimensionMismatch):
            return False
        return True

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        for row in self.signs:
            yield tuple(int(e) for e in row)

    def __eq__(self, other) -> bool:
        if not isinstance(other, VectorSet):
            return NotImplemented
        if self.n != other.n or self._size != other._size:
            return False
        if self.is_full:
            return True
        return bool(np.array_equal(self.codes, other.codes))

    def __hash__(self) -> int:
        return hash((self.n, self._size, self.codes.tobytes() if not self.is_full else b""))

    def __repr__(self) -> str:
        return f"VectorSet(n={self.n}, size={self._size})"


def make_vector_set(n: int, vectors: Iterable[Sequence[int]]) -> VectorSet:
    codes = []
    for i, vec in enumerate(vectors):
        vec = list(vec)
        if len(vec) != n:
            raise DimensionMismatch(f"vector {i} has length {len(vec)}, expected {n}")
        for j, e in enumerate(vec):
            if e not in (1, -1):
                raise BadEntry((i, j), e)
        codes.append(pack_signs(vec))
    return VectorSet(n, np.array(codes, dtype=np.uint64))


@dataclass(frozen=True, eq=False)
class CubeSubset:
    """A subset of a two-cube, encoded as choice bits (1 picks u_j)."""

    cube: TwoCube
    choices: VectorSet

    def __post_init__(self):
        if self.cube.n != self.choices.n:
            raise DimensionMismatch("cube and choice set dimensions differ")

    @classmethod
    def full(cls, cube: TwoCube) -> "CubeSubset":
        return cls(cube, VectorSet.full(cube.n))

    @property
    def n(self) -> int:
        return self.cube.n

    def __len__(self) -> int:
        return len(self.choices)

    @cached_property
    def points(self) -> np.ndarray:
        bits = self.choices.signs > 0
        return np.where(bits, self.cube.u[None, :], self.cube.v[None, :])

    def index_of(self, x: Sequence[int]) -> int:
        code = self.cube.choice_of(x)
        bits = unpack_code(code, self.n)
        return self.choices.index_of(2 * bits.astype(int) - 1)


def as_direction(x: Sequence[int], n: int | None = None) -> np.ndarray:
    arr = np.asarray(x, dtype=np.int64).reshape(-1)
    if n is not None and arr.size != n:
        raise DimensionMismatch(f"direction has length {arr.size}, expected {n}")
    return arr


# ---------------------------------------------------------------------------
# exact distributions

@dataclass(frozen=True)
class IntegerDistribution:
    """Exact pmf on the integers: mass(k) = weights[i] / total.

    Stored in lowest terms so equal distributions compare equal.
    """

    support: tuple[int, ...]
    weights: tuple[int, ...]
    total: int

    def __post_init__(self):
        if len(self.support) != len(self.weights) or not self.support:
            raise ValueError("support and weights must be nonempty and aligned")
        if any(b <= a for a, b in zip(self.support, self.support[1:])):
            raise ValueError("support must be strictly increasing")
        if any(w <= 0 for w in self.weights):
            raise ValueError("masses must be strictly positive")
        if sum(self.weights) != self.total:
            raise ValueError("weights must sum to total")
        g = math.gcd(self.total, *self.weights)
        if g > 1:
            object.__setattr__(self, "weights", tuple(w // g for w in self.weights))
            object.__setattr__(self, "total", self.total // g)

    @classmethod
    def from_counts(cls, values, counts, total: int | None = None) -> "IntegerDistribution":
        pairs = sorted((int(k), int(c)) for k, c in zip(values, counts) if c)
        support = tuple(k for k, _ in pairs)
        weights = tuple(c for _, c in pairs)
        return cls(support, weights, sum(weights) if total is None else int(total))

    @classmethod
    def from_samples(cls, values: np.ndarray) -> "IntegerDistribution":
        ks, cs = np.unique(np.asarray(values, dtype=np.int64), return_counts=True)
        return cls.from_counts(ks.tolist(), cs.tolist())

    def mass(self, k: int) -> Fraction:
        i = _bisect(self.support, k)
        if i is None:
            return Fraction(0)
        return Fraction(self.weights[i], self.total)

    @property
    def masses(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(w, self.total) for w in self.weights)

    def as_dict(self) -> dict[int, Fraction]:
        return dict(zip(self.support, self.masses))

    def float_masses(self) -> np.ndarray:
        return np.array(self.weights, dtype=float) / self.total

    def max_mass(self) -> tuple[Fraction, int]:
        """Largest point mass and the smallest k attaining it."""
        best = max(self.weights)
        i = self.weights.index(best)
        return Fraction(best, self.total), self.support[i]

    def mirrored(self) -> "IntegerDistribution":
        return IntegerDistribution(
            tuple(-k for k in reversed(self.support)), tuple(reversed(self.weights)), self.total
        )


def _bisect(seq, k):
    i = bisect.bisect_left(seq, k)
    if i < len(seq) and seq[i] == k:
        return i
    return None


# ---------------------------------------------------------------------------
# text formats

_SIGN_CHARS = {"+": 1, "-": -1, "−": -1}


def render_signs(vector: Sequence[int]) -> str:
    return "".join("+" if e == 1 else "-" for e in vector)


def parse_signs(token: str) -> list[int]:
    out = []
    for j, ch in enumerate(token):
        if ch not in _SIGN_CHARS:
            raise BadEntry(j, ch)
        out.append(_SIGN_CHARS[ch])
    return out


def _content_lines(text: str) -> Iterator[str]:
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            yield line


def render_vector_set(B: VectorSet) -> str:
    return "".join(render_signs(row) + "\n" for row in B.signs)


def parse_vector_set(text: str, n: int | None = None) -> VectorSet:
    vectors = [parse_signs(line) for line in _content_lines(text)]
    if not vectors:
        raise InvalidDimension("no vectors in input")
    if n is None:
        n = len(vectors[0])
    return make_vector_set(n, vectors)


def render_two_cube(A: TwoCube) -> str:
    return "".join(f"{u} {v}\n" for u, v in A.pairs)


def parse_two_cube(text: str) -> TwoCube:
    pairs = []
    for line in _content_lines(text):
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"expected 'u v', got {line!r}")
        pairs.append((int(parts[0]), int(parts[1])))
    return make_two_cube(pairs)


def read_vector_set(path, n: int | None = None) -> VectorSet:
    return parse_vector_set(Path(path).read_text(encoding="utf-8"), n)


def read_two_cube(path) -> TwoCube:
    return parse_two_cube(Path(path).read_text(encoding="utf-8"))


def write_vector_set(path, B: VectorSet) -> None:
    Path(path).write_text(render_vector_set(B), encoding="utf-8")


def write_two_cube(path, A: TwoCube) -> None:
    Path(path).write_text(render_two_cube(A), encoding="utf-8")
