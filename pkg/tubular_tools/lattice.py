import re
from math import gcd
from typing import Annotated, Iterable, Iterator, NamedTuple

from pydantic import BaseModel, PlainSerializer, model_validator
from sympy.core.intfunc import igcdex

from .errors import DegenerateSublatticeError, InputError, NotLatticeMemberError


# arbitrary-precision integers travel as decimal strings in JSON
BigInt = Annotated[int, PlainSerializer(lambda n: str(n), return_type=str, when_used="json")]


class LatticeVector(NamedTuple):
    """An element of a Z^2 vertex group, written additively as exponents (i, j) of a^i b^j."""
    x: int
    y: int

    def __add__(self, other):  # type: ignore[override]
        return LatticeVector(self.x + other.x, self.y + other.y)

    def __neg__(self):
        return LatticeVector(-self.x, -self.y)

    def scale(self, n: int) -> "LatticeVector":
        return LatticeVector(n * self.x, n * self.y)

    def is_zero(self) -> bool:
        return self.x == 0 and self.y == 0


ZERO = LatticeVector(0, 0)


def as_vector(v: Iterable[int]) -> LatticeVector:
    x, y = v
    return LatticeVector(int(x), int(y))


def _require_nonzero(*vs: LatticeVector):
    for v in vs:
        if v.x == 0 and v.y == 0:
            raise InputError("zero inclusion vector")


def canonical(v: LatticeVector) -> LatticeVector:
    """Sign-normalize so the first nonzero coordinate is positive."""
    if v.x < 0 or (v.x == 0 and v.y < 0):
        return -v
    return v


def primitive_decompose(v: LatticeVector) -> tuple[LatticeVector, int]:
    """Split a nonzero vector into its canonical primitive direction and multiplicity.

    Args:
        v (LatticeVector): Nonzero vector.

    Raises:
        InputError: If v is the zero vector.

    Returns:
        LatticeVector: Primitive, sign-normalized representative of the parallelism class.
        int: Multiplicity n >= 1 with v = +-n * primitive.
    """
    _require_nonzero(v)
    n = gcd(v.x, v.y)
    return canonical(LatticeVector(v.x // n, v.y // n)), n


def is_primitive(v: LatticeVector) -> bool:
    return not v.is_zero() and gcd(v.x, v.y) == 1


def intersection_number(c: LatticeVector, z: LatticeVector) -> int:
    """Geometric intersection number of two closed curves on the torus, |det(c, z)|."""
    _require_nonzero(c, z)
    return abs(c.x * z.y - c.y * z.x)


def is_parallel(c: LatticeVector, z: LatticeVector) -> bool:
    return intersection_number(c, z) == 0


def cyclic_multiple(v: LatticeVector, z: LatticeVector) -> int | None:
    """Return n with v = n*z, or None if v is not in the cyclic subgroup generated by z."""
    _require_nonzero(z)
    if v.x * z.y - v.y * z.x != 0:
        return None
    if z.x != 0:
        if v.x % z.x:
            return None
        return v.x // z.x
    if v.y % z.y:
        return None
    return v.y // z.y


def primitive_sequence() -> Iterator[LatticeVector]:
    """Canonical primitive vectors in order of height: (1,0), (0,1), (1,1), (1,-1), (2,1), (1,2), ..."""
    yield LatticeVector(1, 0)
    yield LatticeVector(0, 1)
    yield LatticeVector(1, 1)
    yield LatticeVector(1, -1)
    h = 2
    while True:
        for k in range(1, h):
            if gcd(h, k) != 1:
                continue
            yield LatticeVector(h, k)
            yield LatticeVector(k, h)
            yield LatticeVector(h, -k)
            yield LatticeVector(k, -h)
        h += 1


class SublatticeBasis(BaseModel, frozen=True):
    """Hermite normal form basis {(a, 0), (c, d)} with a, d > 0 and 0 <= c < a."""
    first: LatticeVector
    second: LatticeVector
    index: BigInt

    @model_validator(mode="after")
    def _check_shape(self):
        a, zero = self.first
        c, d = self.second
        if zero != 0 or a <= 0 or d <= 0 or not 0 <= c < a:
            raise ValueError(f"basis {tuple(self.first)}, {tuple(self.second)} is not in Hermite normal form")
        if a * d != self.index:
            raise ValueError(f"index {self.index} does not match determinant {a * d}")
        return self


def sublattice_basis(generators: Iterable[LatticeVector]) -> SublatticeBasis:
    """Hermite normal form of the integer span of the generators.

    Args:
        generators (Iterable[LatticeVector]): Vectors spanning a finite-index sublattice of Z^2.

    Raises:
        DegenerateSublatticeError: If the span has rank < 2.

    Returns:
        SublatticeBasis: Canonical basis deciding membership and index.
    """
    gens = [as_vector(g) for g in generators]
    # w carries y(w) = gcd of all y coordinates seen so far
    w = ZERO
    for g in gens:
        u, v, _ = igcdex(w.y, g.y)
        w = w.scale(int(u)) + g.scale(int(v))
    d = w.y
    if d < 0:
        w, d = -w, -d
    if d == 0:
        raise DegenerateSublatticeError("degenerate sublattice")
    a = 0
    for g in gens:
        a = gcd(a, g.x - (g.y // d) * w.x)
    if a == 0:
        raise DegenerateSublatticeError("degenerate sublattice")
    return SublatticeBasis(
        first=LatticeVector(a, 0),
        second=LatticeVector(w.x % a, d),
        index=a * d,
    )


IDENTITY_LATTICE = SublatticeBasis(first=LatticeVector(1, 0), second=LatticeVector(0, 1), index=1)


def lattice_coordinates(v: LatticeVector, lattice: SublatticeBasis) -> tuple[int, int] | None:
    a = lattice.first.x
    c, d = lattice.second
    if v.y % d:
        return None
    beta = v.y // d
    if (v.x - beta * c) % a:
        return None
    return (v.x - beta * c) // a, beta


def contains(v: LatticeVector, lattice: SublatticeBasis) -> bool:
    return lattice_coordinates(v, lattice) is not None


def is_primitive_in(v: LatticeVector, lattice: SublatticeBasis) -> bool:
    coords = lattice_coordinates(v, lattice)
    if coords is None:
        raise NotLatticeMemberError(f"{tuple(v)}: not a lattice member")
    return gcd(*coords) == 1


_MONOMIAL_TOKEN = re.compile(r"\s*([A-Za-z_]\w*)(?:\^\(?(-?\d+)\)?)?")


def parse_monomial(text: str, names: tuple[str, str] = ("a", "b")) -> LatticeVector:
    """Exponent vector of a commuting monomial such as "a^2 b^-1"."""
    text = text.strip()
    if text in ("", "1"):
        return ZERO
    x = y = 0
    pos = 0
    while pos < len(text):
        m = _MONOMIAL_TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise InputError(f"cannot parse monomial {text!r} at position {pos}")
        name, exp = m.group(1), int(m.group(2) or 1)
        if name == names[0]:
            x += exp
        elif name == names[1]:
            y += exp
        else:
            raise InputError(f"unknown generator {name!r} in monomial {text!r}")
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    return LatticeVector(x, y)
