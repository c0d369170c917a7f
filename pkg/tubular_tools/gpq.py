import logging
from enum import Enum
from math import gcd

from pydantic import BaseModel, ValidationError, field_validator
from sympy.combinatorics import Permutation
from sympy.combinatorics.named_groups import SymmetricGroup
from tqdm import tqdm

from .errors import CertificationError, InputError, WitnessUnavailableError
from .graph import GraphEdge, ScreenVerdict, TubularGraph, _input_error, class_counts, cubulation_screen
from .lattice import LatticeVector, SublatticeBasis, is_primitive_in, lattice_coordinates, sublattice_basis
from .utils import make_executor
from .words import (EndoReport, GroupWord, HnnPresentation, StableLetter, VertexElement, apply_endo,
                    check_endo_well_defined, commutator, concat, format_word, has_pinch, is_trivial,
                    presentation_from_graph, stable, vertex)

logger = logging.getLogger(__name__)


class GpqSpec(BaseModel, frozen=True):
    """Parameters of G_{p,q} = <a, b, s, t | [a, b], s^-1 a^q s = a^p b, t^-1 a^q t = a^p b^-1>."""
    p: int
    q: int

    @field_validator("p", "q")
    @classmethod
    def _nonzero(cls, v: int):
        if v == 0:
            raise ValueError("parameter must be a nonzero integer")
        return v

    @classmethod
    def of(cls, p: int, q: int) -> "GpqSpec":
        try:
            return cls(p=p, q=q)
        except ValidationError as err:
            raise _input_error(err, f"G_{{p,q}} parameters ({p}, {q})") from None


def make_gpq(spec: GpqSpec) -> tuple[TubularGraph, HnnPresentation]:
    g = TubularGraph(
        vertices=("v",),
        edges=(
            GraphEdge(id="s", minus="v", plus="v", z_minus=LatticeVector(spec.q, 0), z_plus=LatticeVector(spec.p, 1)),
            GraphEdge(id="t", minus="v", plus="v", z_minus=LatticeVector(spec.q, 0), z_plus=LatticeVector(spec.p, -1)),
        ),
    )
    return g, presentation_from_graph(g)


def gpq_relations(spec: GpqSpec) -> list[GroupWord]:
    a, b = vertex(1, 0), vertex(0, 1)
    return [
        commutator(a, b),
        concat(stable("s", -1), vertex(spec.q, 0), stable("s"), vertex(-spec.p, -1)),
        concat(stable("t", -1), vertex(spec.q, 0), stable("t"), vertex(-spec.p, 1)),
    ]


def is_residually_finite(spec: GpqSpec) -> bool:
    return (2 * abs(spec.p)) % abs(spec.q) == 0


def rf_obstruction_witness(spec: GpqSpec) -> GroupWord:
    """[s^-1 a^h s, a^p b^-1] with h = gcd(2p, q): nontrivial, yet trivial in every finite quotient.

    Raises:
        WitnessUnavailableError: If q divides 2p.
    """
    if is_residually_finite(spec):
        raise WitnessUnavailableError("group is residually finite; no witness")
    h = gcd(2 * spec.p, spec.q)
    x = commutator(concat(stable("s", -1), vertex(h, 0), stable("s")), vertex(spec.p, -1))
    _, pres = make_gpq(spec)
    if has_pinch(x, pres) or is_trivial(x, pres):
        raise CertificationError(f"witness for G_{{{spec.p},{spec.q}}} is not pinch-free")
    return x


class NonHopfWitness(BaseModel, frozen=True):
    endomorphism: dict[str, str]
    kernel_word: str
    well_defined: EndoReport
    kernel_nontrivial: bool
    image_trivial: bool
    surjective: str = "cited"


def non_hopf_endomorphism(spec: GpqSpec) -> dict[str, GroupWord]:
    return {"a": vertex(spec.q, 0), "b": vertex(0, spec.q), "s": stable("s"), "t": stable("t")}


def non_hopf_witness(spec: GpqSpec) -> NonHopfWitness:
    """Endomorphism a -> a^q, b -> b^q fixing s and t, with a nontrivial kernel element.

    Only for p = 1 and odd q >= 3. Surjectivity follows because q is odd and is
    recorded as cited rather than checked.
    """
    if spec.p != 1 or spec.q < 3 or spec.q % 2 == 0:
        raise WitnessUnavailableError(f"non-Hopfian witness needs p = 1 and odd q >= 3, got ({spec.p}, {spec.q})")
    _, pres = make_gpq(spec)
    theta = non_hopf_endomorphism(spec)
    kernel = commutator(concat(stable("s", -1), vertex(1, 0), stable("s")), vertex(1, -1))
    return NonHopfWitness(
        endomorphism={name: format_word(w, pres) for name, w in theta.items()},
        kernel_word=format_word(kernel, pres),
        well_defined=check_endo_well_defined(theta, pres, gpq_relations(spec)),
        kernel_nontrivial=not is_trivial(kernel, pres),
        image_trivial=is_trivial(apply_endo(theta, kernel, pres), pres),
    )


class CqQuotientReport(BaseModel, frozen=True):
    p: int
    q: int
    modulus: int
    beta: int
    relation_images: tuple[int, ...]
    kernel: SublatticeBasis
    coordinates: dict[str, tuple[int, int]]
    primitive: dict[str, bool]
    ok: bool


def cq_quotient(spec: GpqSpec) -> CqQuotientReport:
    """Map to the cyclic group of order |q| with a -> 1, b -> beta, s, t -> 0.

    beta is 0 when q divides p and p otherwise (q = 2m with m dividing p). The
    edge inclusions must be primitive in the kernel lattice of the vertex group.
    """
    if not is_residually_finite(spec):
        raise WitnessUnavailableError(f"q = {spec.q} does not divide 2p = {2 * spec.p}")
    n = abs(spec.q)
    beta = 0 if spec.p % spec.q == 0 else spec.p
    images = (0, (spec.q - spec.p - beta) % n, (spec.q - spec.p + beta) % n)
    kernel = sublattice_basis([LatticeVector(n, 0), LatticeVector(-beta, 1)])
    inclusions = {
        "s_minus": LatticeVector(spec.q, 0),
        "s_plus": LatticeVector(spec.p, 1),
        "t_plus": LatticeVector(spec.p, -1),
    }
    coords = {}
    primitive = {}
    for name, z in inclusions.items():
        c = lattice_coordinates(z, kernel)
        if c is None:
            raise CertificationError(f"inclusion {name} = {tuple(z)} is not in the kernel lattice")
        coords[name] = c
        primitive[name] = is_primitive_in(z, kernel)
    return CqQuotientReport(
        p=spec.p, q=spec.q, modulus=n, beta=beta, relation_images=images, kernel=kernel,
        coordinates=coords, primitive=primitive,
        ok=all(i == 0 for i in images) and all(primitive.values()),
    )


class FiniteQuotient(BaseModel, frozen=True):
    """Images of a, b, s, t in the symmetric group of the given degree, as 0-based array forms."""
    degree: int
    a: tuple[int, ...]
    b: tuple[int, ...]
    s: tuple[int, ...]
    t: tuple[int, ...]

    def images(self) -> dict[str, Permutation]:
        return {"a": Permutation(list(self.a)), "b": Permutation(list(self.b)),
                "s": Permutation(list(self.s)), "t": Permutation(list(self.t))}


class QuotientReport(BaseModel, frozen=True):
    quotient: FiniteQuotient
    witness_identity: bool | None = None


def word_image(fq: FiniteQuotient, w: GroupWord) -> Permutation:
    images = fq.images()
    result = Permutation(list(range(fq.degree)))
    for letter in w:
        if isinstance(letter, VertexElement):
            result = result * images["a"] ** letter.vector.x * images["b"] ** letter.vector.y
        else:
            assert isinstance(letter, StableLetter)
            result = result * images[letter.edge] ** letter.exponent
    return result


def verify_quotient(spec: GpqSpec, fq: FiniteQuotient) -> bool:
    images = fq.images()
    if images["a"] * images["b"] != images["b"] * images["a"]:
        return False
    return all(word_image(fq, r).is_Identity for r in gpq_relations(spec))


def _elements(n: int) -> list[Permutation]:
    return [Permutation(af) for af in sorted(SymmetricGroup(n).generate(af=True))]


def _conjugacy_representatives(perms: list[Permutation]) -> list[Permutation]:
    seen = set()
    reps = []
    for x in perms:
        key = tuple(sorted(x.cycle_structure.items()))
        if key not in seen:
            seen.add(key)
            reps.append(x)
    return reps


def _quotients_for_a(p: int, q: int, n: int, a_form: tuple[int, ...]) -> list[tuple[tuple[int, ...], ...]]:
    """All (a, b, s, t) images with the given image of a."""
    G = SymmetricGroup(n)
    perms = _elements(n)
    A = Permutation(list(a_form))
    X = A ** q
    found = []
    for b_form in sorted(G.centralizer(A).generate(af=True)):
        B = Permutation(b_form)
        ys = A ** p * B
        yt = A ** p * ~B
        s_images = [S for S in perms if ~S * X * S == ys]
        t_images = [T for T in perms if ~T * X * T == yt]
        for S in s_images:
            for T in t_images:
                found.append((tuple(A.array_form), tuple(B.array_form), tuple(S.array_form), tuple(T.array_form)))
    return found


def finite_quotient_search(spec: GpqSpec, n_max: int, workers: int = 1, up_to_conjugacy: bool = False,
                           progress: bool = False) -> list[QuotientReport]:
    """Enumerate homomorphisms from G_{p,q} to symmetric groups of degree <= n_max.

    Args:
        spec (GpqSpec): Group parameters.
        n_max (int): Largest degree searched.
        workers (int, optional): Processes for the fan-out over images of a. Defaults to 1.
        up_to_conjugacy (bool, optional): Only one image of a per cycle type. Defaults to False.
        progress (bool, optional): Show a progress bar. Defaults to False.

    Returns:
        list[QuotientReport]: Quotients in lexicographic order of their array forms, each with the image of the
            residual finiteness witness when one exists.
    """
    if n_max < 1:
        raise InputError(f"n_max must be at least 1, got {n_max}")
    witness = None if is_residually_finite(spec) else rf_obstruction_witness(spec)
    jobs = []
    for n in range(1, n_max + 1):
        candidates = _elements(n)
        if up_to_conjugacy:
            candidates = _conjugacy_representatives(candidates)
        jobs.extend((n, tuple(A.array_form)) for A in candidates)

    found = []
    with make_executor(workers) as executor:
        futures = [executor.submit(_quotients_for_a, spec.p, spec.q, n, a) for n, a in jobs]
        for fut in tqdm(futures, desc="Images of a", disable=not progress):
            found.extend(fut.result())
    found.sort(key=lambda t: (len(t[0]), t))

    reports = []
    for a, b, s, t in found:
        fq = FiniteQuotient(degree=len(a), a=a, b=b, s=s, t=t)
        if not verify_quotient(spec, fq):
            raise CertificationError(f"search returned a map that breaks a relation: {fq}")
        witness_identity = None if witness is None else word_image(fq, witness).is_Identity
        if witness_identity is False:
            logger.error("finite quotient %s separates the witness of G_{%d,%d}", fq, spec.p, spec.q)
        reports.append(QuotientReport(quotient=fq, witness_identity=witness_identity))
    logger.info("found %d homomorphisms of G_{%d,%d} into S_n, n <= %d", len(reports), spec.p, spec.q, n_max)
    return reports


class Tristate(str, Enum):
    TRUE = "true"
    FALSE = "false"
    UNKNOWN = "unknown"


class RpqPresentation(BaseModel, frozen=True):
    """R_{p,q} = <x, y, t | x^2 = y^2, t^-1 x^{2q} t = x^{2p-1} y>, containing G_{p,q} with index 2."""
    generators: tuple[str, ...] = ("x", "y", "t")
    relators: tuple[str, str]
    one_relator: str


def _pw(name: str, n: int) -> str:
    return name if n == 1 else f"{name}^{n}"


def make_rpq(spec: GpqSpec) -> RpqPresentation:
    p, q = spec.p, spec.q
    return RpqPresentation(
        relators=(
            "x^2 y^-2",
            f"t^-1 {_pw('x', 2 * q)} t ({_pw('x', 2 * p - 1)} y)^-1",
        ),
        # y = x^-(2p-1) t^-1 x^2q t substituted into x^2 y^-2
        one_relator=" ".join([
            "x^2", "t^-1", _pw("x", -2 * q), "t", _pw("x", 2 * p - 1),
            "t^-1", _pw("x", -2 * q), "t", _pw("x", 2 * p - 1),
        ]),
    )


# how each verdict passes between G_{p,q} and its index 2 overgroup R_{p,q}
RPQ_TRANSFER = {
    "rf": "both directions (finite index)",
    "cat0": "R_{p,q} to G_{p,q} (finite-index subgroup); converse cited for p, q >= 1",
    "hopfian": "not transferred",
}

CITATIONS = (
    "Wise: an equitable set makes a tubular group act freely on a CAT(0) cube complex",
    "Woodhouse: fortified primitive equitable sets with undilated walls give virtually special tubular groups",
    "Brady, Bridson: snowflake groups G_{p,q} with p > q >= 1 have super-quadratic Dehn function",
    "Gersten: G_{1,1} is not a subgroup of any CAT(0) group",
)


class GpqClassification(BaseModel, frozen=True):
    p: int
    q: int
    rf: bool
    hopfian: Tristate
    cat0: Tristate
    screen: ScreenVerdict
    class_count: int
    regimes: tuple[str, ...]
    notes: tuple[str, ...]
    rpq: RpqPresentation
    rpq_transfer: dict[str, str]
    citations: tuple[str, ...]


def classify(spec: GpqSpec) -> GpqClassification:
    p, q = spec.p, spec.q
    rf = is_residually_finite(spec)
    if rf:
        hopfian = Tristate.TRUE
    elif p == 1 and q >= 3 and q % 2 == 1:
        hopfian = Tristate.FALSE
    else:
        hopfian = Tristate.UNKNOWN
    if p >= 1 and q >= 1:
        cat0 = Tristate.TRUE if q > p else Tristate.FALSE
    else:
        cat0 = Tristate.UNKNOWN

    regimes = []
    notes = []
    if p > q >= 1:
        regimes.append("snowflake")
    if p == q == 1:
        regimes.append("gersten")
        notes.append("Gersten's group")
    if p == q:
        regimes.append("rf-not-cat0")
    if q == 3 * p:
        regimes.append("cat0-not-rf")
    if q == p - 1 and p > 3:
        regimes.append("neither")
    if not rf:
        notes.append("residually finite only if q divides 2p")

    g, _ = make_gpq(spec)
    return GpqClassification(
        p=p, q=q, rf=rf, hopfian=hopfian, cat0=cat0,
        screen=cubulation_screen(g),
        class_count=class_counts(g)["v"],
        regimes=tuple(regimes), notes=tuple(notes),
        rpq=make_rpq(spec), rpq_transfer=RPQ_TRANSFER,
        citations=CITATIONS,
    )

