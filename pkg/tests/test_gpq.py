import pytest

from tubular_tools.errors import InputError, WitnessUnavailableError
from tubular_tools.gpq import (FiniteQuotient, GpqSpec, Tristate, classify, cq_quotient, finite_quotient_search,
                               gpq_relations, is_residually_finite, make_gpq, make_rpq, non_hopf_witness,
                               rf_obstruction_witness, verify_quotient)
from tubular_tools.graph import ScreenVerdict, parallelism_classes
from tubular_tools.lattice import LatticeVector as V
from tubular_tools.words import format_word, has_pinch, is_trivial


def test_make_gpq():
    g, pres = make_gpq(GpqSpec(p=2, q=5))
    assert g.vertices == ("v",)
    assert [e.id for e in g.edges] == ["s", "t"]
    assert parallelism_classes(g, "v") == [V(1, 0), V(2, -1), V(2, 1)]
    assert pres.pair("t").z_plus == V(2, -1)
    assert [format_word(r, pres) for r in gpq_relations(GpqSpec(p=2, q=5))] == [
        "1", "s^-1 a^5 s a^-2 b^-1", "t^-1 a^5 t a^-2 b"]


def test_parameters_must_be_nonzero():
    with pytest.raises(InputError, match="nonzero"):
        GpqSpec.of(0, 3)
    with pytest.raises(InputError):
        GpqSpec.of(1, 0)


@pytest.mark.parametrize("p, q, rf", [
    (1, 1, True), (1, 2, True), (1, 3, False), (2, 4, True), (3, 2, True),
    (2, 3, False), (3, 6, True), (1, -2, True), (-3, 4, False), (5, 4, False),
])
def test_residual_finiteness(p, q, rf):
    assert is_residually_finite(GpqSpec(p=p, q=q)) == rf


def test_obstruction_witness():
    spec = GpqSpec(p=1, q=3)
    _, pres = make_gpq(spec)
    x = rf_obstruction_witness(spec)
    assert format_word(x, pres) == "s^-1 a s a b^-1 s^-1 a^-1 s a^-1 b"
    assert not has_pinch(x, pres)
    assert not is_trivial(x, pres)
    with pytest.raises(WitnessUnavailableError, match="residually finite"):
        rf_obstruction_witness(GpqSpec(p=1, q=2))


@pytest.mark.parametrize("p, q", [(2, 3), (2, 6), (3, 4), (-1, 3), (4, 7)])
def test_obstruction_witness_is_pinch_free(p, q):
    spec = GpqSpec(p=p, q=q)
    _, pres = make_gpq(spec)
    assert not is_trivial(rf_obstruction_witness(spec), pres)


@pytest.mark.parametrize("q", [3, 5, 7])
def test_non_hopf_witness(q):
    w = non_hopf_witness(GpqSpec(p=1, q=q))
    assert w.well_defined.ok
    assert w.kernel_nontrivial
    assert w.image_trivial
    assert w.endomorphism == {"a": f"a^{q}", "b": f"b^{q}", "s": "s", "t": "t"}
    assert w.kernel_word == "s^-1 a s a b^-1 s^-1 a^-1 s a^-1 b"


@pytest.mark.parametrize("p, q", [(1, 2), (2, 3), (1, 1)])
def test_non_hopf_witness_needs_odd_q(p, q):
    with pytest.raises(WitnessUnavailableError):
        non_hopf_witness(GpqSpec(p=p, q=q))


@pytest.mark.parametrize("p, q, kernel, coordinates", [
    (2, 2, ((2, 0), (0, 1)), {"s_minus": (1, 0), "s_plus": (1, 1), "t_plus": (1, -1)}),
    (2, 4, ((4, 0), (2, 1)), {"s_minus": (1, 0), "s_plus": (0, 1), "t_plus": (1, -1)}),
    (1, 1, ((1, 0), (0, 1)), {"s_minus": (1, 0), "s_plus": (1, 1), "t_plus": (1, -1)}),
])
def test_cyclic_quotient(p, q, kernel, coordinates):
    report = cq_quotient(GpqSpec(p=p, q=q))
    assert report.ok
    assert report.relation_images == (0, 0, 0)
    assert (tuple(report.kernel.first), tuple(report.kernel.second)) == kernel
    assert report.coordinates == coordinates
    assert all(report.primitive.values())


def test_cyclic_quotient_needs_rf():
    with pytest.raises(WitnessUnavailableError):
        cq_quotient(GpqSpec(p=1, q=3))


def test_quotients_never_separate_the_witness():
    reports = finite_quotient_search(GpqSpec(p=1, q=3), n_max=4)
    assert all(r.witness_identity is True for r in reports)
    degrees = {r.quotient.degree for r in reports}
    assert degrees == {1, 2, 3, 4}
    trivial = FiniteQuotient(degree=3, a=(0, 1, 2), b=(0, 1, 2), s=(0, 1, 2), t=(0, 1, 2))
    assert trivial in [r.quotient for r in reports]


def test_quotient_search_small_cases():
    [only] = finite_quotient_search(GpqSpec(p=1, q=3), n_max=1)
    assert only.quotient.a == (0,)
    reports = finite_quotient_search(GpqSpec(p=1, q=2), n_max=3)
    assert all(r.witness_identity is None for r in reports)
    with pytest.raises(InputError):
        finite_quotient_search(GpqSpec(p=1, q=2), n_max=0)


def test_quotient_search_up_to_conjugacy():
    spec = GpqSpec(p=1, q=2)
    full = finite_quotient_search(spec, n_max=3)
    reps = finite_quotient_search(spec, n_max=3, up_to_conjugacy=True)
    assert 0 < len(reps) < len(full)
    assert all(verify_quotient(spec, r.quotient) for r in reps)
    assert {r.quotient for r in reps} <= {r.quotient for r in full}


def test_verify_quotient_rejects_broken_maps():
    spec = GpqSpec(p=1, q=1)
    # conjugation is trivial in S_2, so s^-1 a s = a b forces b = 1
    bad = FiniteQuotient(degree=2, a=(1, 0), b=(1, 0), s=(0, 1), t=(0, 1))
    assert not verify_quotient(spec, bad)
    good = FiniteQuotient(degree=2, a=(1, 0), b=(0, 1), s=(1, 0), t=(0, 1))
    assert verify_quotient(spec, good)


@pytest.mark.parametrize("p, q", [(1, 1), (1, 3), (3, 2), (-2, 5), (4, -3)])
def test_every_gpq_fails_the_screen(p, q):
    c = classify(GpqSpec(p=p, q=q))
    assert c.class_count == 3
    assert c.screen == ScreenVerdict.NOT_COCOMPACTLY_CUBULATED


def test_classify():
    c = classify(GpqSpec(p=1, q=3))
    assert (c.rf, c.hopfian, c.cat0) == (False, Tristate.FALSE, Tristate.TRUE)
    assert c.regimes == ("cat0-not-rf",)
    assert "residually finite only if q divides 2p" in c.notes

    c = classify(GpqSpec(p=1, q=1))
    assert (c.rf, c.hopfian, c.cat0) == (True, Tristate.TRUE, Tristate.FALSE)
    assert c.regimes == ("gersten", "rf-not-cat0")
    assert "Gersten's group" in c.notes

    c = classify(GpqSpec(p=5, q=4))
    assert c.regimes == ("snowflake", "neither")
    assert (c.rf, c.hopfian, c.cat0) == (False, Tristate.UNKNOWN, Tristate.FALSE)

    c = classify(GpqSpec(p=-1, q=3))
    assert (c.hopfian, c.cat0) == (Tristate.UNKNOWN, Tristate.UNKNOWN)


def test_make_rpq():
    r = make_rpq(GpqSpec(p=1, q=3))
    assert r.relators == ("x^2 y^-2", "t^-1 x^6 t (x y)^-1")
    assert r.one_relator == "x^2 t^-1 x^-6 t x t^-1 x^-6 t x"
    assert make_rpq(GpqSpec(p=2, q=1)).relators[1] == "t^-1 x^2 t (x^3 y)^-1"


def test_rf_grid():
    for p in range(1, 7):
        for q in range(1, 7):
            spec = GpqSpec(p=p, q=q)
            _, pres = make_gpq(spec)
            assert is_residually_finite(spec) == (2 * p % q == 0)
            if is_residually_finite(spec):
                assert cq_quotient(spec).ok
            else:
                assert not is_trivial(rf_obstruction_witness(spec), pres)


@pytest.mark.parametrize("p, q", [(p, q) for p in range(1, 7) for q in range(1, 7) if (2 * p) % q != 0])
def test_witness_dies_in_small_quotients(p, q):
    reports = finite_quotient_search(GpqSpec(p=p, q=q), n_max=4, up_to_conjugacy=True)
    assert reports
    assert all(r.witness_identity is True for r in reports)
