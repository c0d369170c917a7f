"""Words in single-vertex tubular groups and Britton reduction.

A word is a tuple of letters. Vertex letters carry an exponent vector of the
Z^2 vertex group; stable letters carry an edge id and an exponent of +1 or -1.
The identity is the empty word, printed "1".
"""
import re
from typing import Mapping, NamedTuple, Sequence, Union

from pydantic import BaseModel

from .errors import InputError
from .graph import TubularGraph
from .lattice import ZERO, LatticeVector, cyclic_multiple


class VertexElement(NamedTuple):
    vector: LatticeVector


class StableLetter(NamedTuple):
    edge: str
    exponent: int


Letter = Union[VertexElement, StableLetter]
GroupWord = tuple[Letter, ...]

IDENTITY: GroupWord = ()


class AssociatedPair(BaseModel, frozen=True):
    """Stable letter s with s^-1 (n*z_minus) s = n*z_plus."""
    name: str
    z_minus: LatticeVector
    z_plus: LatticeVector


class HnnPresentation(BaseModel, frozen=True):
    names: tuple[str, str] = ("a", "b")
    stable: tuple[AssociatedPair, ...] = ()

    def pair(self, name: str) -> AssociatedPair:
        for s in self.stable:
            if s.name == name:
                return s
        raise InputError(f"unknown stable letter {name!r}")

    def stable_names(self) -> list[str]:
        return [s.name for s in self.stable]


def presentation_from_graph(g: TubularGraph, names: tuple[str, str] = ("a", "b")) -> HnnPresentation:
    if len(g.vertices) != 1:
        raise InputError(f"word problems need a single-vertex graph, got {len(g.vertices)} vertices")
    for e in g.edges:
        if e.id in names or not re.fullmatch(r"[A-Za-z_]\w*", e.id):
            raise InputError(f"edge id {e.id!r} cannot be used as a stable letter name")
    return HnnPresentation(
        names=names,
        stable=tuple(AssociatedPair(name=e.id, z_minus=e.z_minus, z_plus=e.z_plus) for e in g.edges),
    )


def vertex(x: int, y: int) -> GroupWord:
    return normalize((VertexElement(LatticeVector(x, y)),))


def stable(name: str, exponent: int = 1) -> GroupWord:
    return power((StableLetter(name, 1),), exponent)


def _push_vertex(stack: list[Letter], v: LatticeVector):
    if stack and isinstance(stack[-1], VertexElement):
        v = stack.pop().vector + v
    if not v.is_zero():
        stack.append(VertexElement(v))


def normalize(w: Sequence[Letter]) -> GroupWord:
    out: list[Letter] = []
    for letter in w:
        if isinstance(letter, VertexElement):
            _push_vertex(out, LatticeVector(*letter.vector))
        else:
            out.append(letter)
    return tuple(out)


def inverse(w: Sequence[Letter]) -> GroupWord:
    return tuple(
        VertexElement(-letter.vector) if isinstance(letter, VertexElement) else StableLetter(letter.edge, -letter.exponent)
        for letter in reversed(w)
    )


def concat(*ws: Sequence[Letter]) -> GroupWord:
    return normalize([letter for w in ws for letter in w])


def power(w: Sequence[Letter], n: int) -> GroupWord:
    base = tuple(w) if n >= 0 else inverse(w)
    return normalize(base * abs(n))


def commutator(x: Sequence[Letter], y: Sequence[Letter]) -> GroupWord:
    return concat(x, y, inverse(x), inverse(y))


def _pinch(p: HnnPresentation, first: StableLetter, middle: LatticeVector, last: StableLetter) -> LatticeVector | None:
    if first.edge != last.edge or first.exponent != -last.exponent:
        return None
    pair = p.pair(first.edge)
    if first.exponent == -1:
        n = cyclic_multiple(middle, pair.z_minus)
        return None if n is None else pair.z_plus.scale(n)
    n = cyclic_multiple(middle, pair.z_plus)
    return None if n is None else pair.z_minus.scale(n)


def britton_reduce(w: Sequence[Letter], p: HnnPresentation) -> GroupWord:
    """Remove pinches until none remain.

    s^-1 v s with v = n*z_minus(s) becomes n*z_plus(s), and s v s^-1 with
    v = n*z_plus(s) becomes n*z_minus(s); an empty middle counts as n = 0.
    The stack stays pinch-free, so a single left-to-right pass suffices.

    Args:
        w (Sequence[Letter]): Word to reduce.
        p (HnnPresentation): Associated subgroups of the stable letters.

    Returns:
        GroupWord: Normalized pinch-free word equal to w in the group.
    """
    stack: list[Letter] = []
    for letter in w:
        if isinstance(letter, VertexElement):
            _push_vertex(stack, LatticeVector(*letter.vector))
            continue
        p.pair(letter.edge)
        if stack and isinstance(stack[-1], VertexElement):
            middle, below = stack[-1].vector, stack[-2] if len(stack) > 1 else None
        else:
            middle, below = ZERO, stack[-1] if stack else None
        if isinstance(below, StableLetter):
            replaced = _pinch(p, below, middle, letter)
            if replaced is not None:
                if not middle.is_zero():
                    stack.pop()
                stack.pop()
                _push_vertex(stack, replaced)
                continue
        stack.append(letter)
    return tuple(stack)


def has_pinch(w: Sequence[Letter], p: HnnPresentation) -> bool:
    w = normalize(w)
    for i, first in enumerate(w):
        if not isinstance(first, StableLetter):
            continue
        rest = w[i + 1:i + 3]
        if rest and isinstance(rest[0], StableLetter):
            middle, last = ZERO, rest[0]
        elif len(rest) == 2 and isinstance(rest[0], VertexElement) and isinstance(rest[1], StableLetter):
            middle, last = rest[0].vector, rest[1]
        else:
            continue
        if _pinch(p, first, middle, last) is not None:
            return True
    return False


def is_trivial(w: Sequence[Letter], p: HnnPresentation) -> bool:
    return britton_reduce(w, p) == IDENTITY


_TOKEN = re.compile(r"\s*(?:(?P<name>[A-Za-z_]\w*)|(?P<int>-?\d+)|(?P<sym>[\^()\[\],]))")


class _Parser:
    def __init__(self, text: str, p: HnnPresentation):
        self.text = text
        self.p = p
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            m = _TOKEN.match(text, pos)
            if m is None:
                raise InputError(f"cannot parse word {text!r} at position {pos}")
            kind = m.lastgroup
            assert kind is not None
            self.tokens.append((kind, m.group(kind), m.start(kind)))
            pos = m.end()
        self.i = 0

    def peek(self) -> tuple[str, str, int] | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def expect(self, sym: str):
        tok = self.peek()
        if tok is None or tok[1] != sym:
            where = f"position {tok[2]}" if tok else "end of input"
            raise InputError(f"expected {sym!r} at {where} in word {self.text!r}")
        self.i += 1

    def word(self) -> GroupWord:
        letters: list[Letter] = []
        while (tok := self.peek()) is not None and tok[1] not in (")", "]", ","):
            letters.extend(self.factor())
        return normalize(letters)

    def factor(self) -> GroupWord:
        w = self.atom()
        tok = self.peek()
        if tok is not None and tok[1] == "^":
            self.i += 1
            paren = self.peek() is not None and self.peek()[1] == "("
            if paren:
                self.i += 1
            tok = self.peek()
            if tok is None or tok[0] != "int":
                raise InputError(f"expected an integer exponent in word {self.text!r}")
            self.i += 1
            if paren:
                self.expect(")")
            w = power(w, int(tok[1]))
        return w

    def atom(self) -> GroupWord:
        tok = self.peek()
        if tok is None:
            raise InputError(f"unexpected end of word {self.text!r}")
        kind, value, pos = tok
        self.i += 1
        if kind == "int":
            if value != "1":
                raise InputError(f"unexpected integer {value!r} at position {pos} in word {self.text!r}")
            return IDENTITY
        if kind == "name":
            if value == self.p.names[0]:
                return vertex(1, 0)
            if value == self.p.names[1]:
                return vertex(0, 1)
            if value in self.p.stable_names():
                return (StableLetter(value, 1),)
            raise InputError(f"unknown generator {value!r} at position {pos} in word {self.text!r}")
        if value == "(":
            w = self.word()
            self.expect(")")
            return w
        if value == "[":
            x = self.word()
            self.expect(",")
            y = self.word()
            self.expect("]")
            return commutator(x, y)
        raise InputError(f"unexpected {value!r} at position {pos} in word {self.text!r}")


def parse_word(text: str, p: HnnPresentation) -> GroupWord:
    """Parse the text syntax, e.g. "s^-1 a^3 s b^-1" or "[s^-1 a s, a b^-1]"."""
    parser = _Parser(text, p)
    w = parser.word()
    tok = parser.peek()
    if tok is not None:
        raise InputError(f"unexpected {tok[1]!r} at position {tok[2]} in word {text!r}")
    return w


def _fmt_power(name: str, n: int) -> str:
    return name if n == 1 else f"{name}^{n}"


def format_word(w: Sequence[Letter], p: HnnPresentation) -> str:
    parts: list[str] = []
    i = 0
    w = normalize(w)
    while i < len(w):
        letter = w[i]
        if isinstance(letter, VertexElement):
            x, y = letter.vector
            if x:
                parts.append(_fmt_power(p.names[0], x))
            if y:
                parts.append(_fmt_power(p.names[1], y))
            i += 1
            continue
        j = i
        while j < len(w) and w[j] == letter:
            j += 1
        parts.append(_fmt_power(letter.edge, letter.exponent * (j - i)))
        i = j
    return " ".join(parts) if parts else "1"


Endomorphism = Mapping[str, GroupWord]


def parse_endomorphism(images: Mapping[str, str], p: HnnPresentation) -> dict[str, GroupWord]:
    """Generator images from text; generators not listed are fixed."""
    out = {name: parse_word(name, p) for name in (*p.names, *p.stable_names())}
    for name, text in images.items():
        if name not in out:
            raise InputError(f"unknown generator {name!r} in endomorphism")
        out[name] = parse_word(text, p)
    return out


def apply_endo(endo: Endomorphism, w: Sequence[Letter], p: HnnPresentation) -> GroupWord:
    a_name, b_name = p.names
    out: list[GroupWord] = []
    for letter in normalize(w):
        if isinstance(letter, VertexElement):
            for name, n in ((a_name, letter.vector.x), (b_name, letter.vector.y)):
                if n == 0:
                    continue
                if name not in endo:
                    raise InputError(f"endomorphism is undefined on generator {name!r}")
                out.append(power(endo[name], n))
        else:
            if letter.edge not in endo:
                raise InputError(f"endomorphism is undefined on generator {letter.edge!r}")
            out.append(power(endo[letter.edge], letter.exponent))
    return concat(*out)


def hnn_relations(p: HnnPresentation) -> list[GroupWord]:
    """[a, b] followed by s^-1 z_minus s z_plus^-1 for each stable letter."""
    rels = [commutator(vertex(1, 0), vertex(0, 1))]
    for s in p.stable:
        rels.append(concat(stable(s.name, -1), vertex(*s.z_minus), stable(s.name), vertex(*(-s.z_plus))))
    return rels


class RelationVerdict(BaseModel, frozen=True):
    relation: str
    image: str
    trivial: bool


class EndoReport(BaseModel, frozen=True):
    ok: bool
    relations: tuple[RelationVerdict, ...]


def check_endo_well_defined(endo: Endomorphism, p: HnnPresentation,
                            relations: Sequence[GroupWord] | None = None) -> EndoReport:
    if relations is None:
        relations = hnn_relations(p)
    verdicts = []
    for r in relations:
        image = britton_reduce(apply_endo(endo, r, p), p)
        verdicts.append(RelationVerdict(relation=format_word(r, p), image=format_word(image, p),
                                        trivial=image == IDENTITY))
    return EndoReport(ok=all(v.trivial for v in verdicts), relations=tuple(verdicts))
