import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from witten.series import GeneratorTable, SeriesError, SeriesMatrix, SuperSeries

T = GeneratorTable(("d", "s"), ("e1", "e2", "e3"), 4)


def gen(name, table=T):
    return SuperSeries.generator(table, name)


def one(table=T):
    return SuperSeries.constant(table, 1)


def test_anticommutation_and_nilpotency():
    e1, e2 = gen("e1"), gen("e2")
    assert (e1 * e2 + e2 * e1).terms == {}
    assert (e1 * e1).terms == {}
    assert (e1 * e2).coefficient("e1*e2") == 1
    assert (e2 * e1).coefficient("e1*e2") == -1
    assert (e1 * e2).coefficient({"e2": 1, "e1": 1}) == -1
    assert (e1 * e2 * e1).terms == {}


def test_geometric_truncation():
    t = GeneratorTable(("d",), (), 2)
    d = gen("d", t)
    assert ((1 + d) * (1 - d + d * d)).max_abs_diff(one(t)) == 0
    assert (1 + d).inverse().max_abs_diff(1 - d + d * d) == 0


def test_exp():
    t2 = GeneratorTable((), ("e1", "e2"), 2)
    x = gen("e1", t2) * gen("e2", t2)
    assert x.exp().max_abs_diff(one(t2) + x) == 0
    assert SuperSeries.zero(T).exp().max_abs_diff(one()) == 0
    t3 = GeneratorTable(("d",), (), 3)
    d = gen("d", t3)
    assert d.exp().max_abs_diff(1 + d + d * d * 0.5 + d * d * d * (1 / 6)) < 1e-16
    with pytest.raises(SeriesError):
        (one() + gen("d")).exp()


def test_exp_coefficient():
    x = gen("e1") * gen("e2")
    assert x.exp().coefficient("e1*e2") == 1
    assert one().coefficient("d") == 0
    assert ((1 + gen("d")) ** 3).coefficient("d^2") == 3


def test_sqrt_and_inverse():
    t = GeneratorTable(("d",), (), 2)
    d = gen("d", t)
    assert (1 + 2 * d).sqrt().max_abs_diff(1 + d - 0.5 * d * d) < 1e-16
    assert one(t).sqrt().max_abs_diff(one(t)) == 0
    with pytest.raises(SeriesError):
        (d * 1).inverse()
    with pytest.raises(SeriesError):
        (d * 1).sqrt()


def test_truncation_drops_high_degree():
    t = GeneratorTable(("d",), ("e1",), 2)
    x = gen("d", t) * gen("d", t) * gen("e1", t)
    assert x.terms == {}
    with pytest.raises(SeriesError):
        one(t).coefficient("d^3")


def test_monomial_strings():
    x = gen("s") * gen("d") * gen("e3") * gen("e1")
    assert list(x.to_dict()) == ["d*s*e1*e3"]
    assert x.to_dict()["d*s*e1*e3"] == -1
    assert list(one().to_dict()) == ["1"]


def test_table_mismatch():
    other = GeneratorTable(("d",), (), 4)
    with pytest.raises(SeriesError):
        gen("d") + gen("d", other)
    with pytest.raises(SeriesError):
        GeneratorTable(("a", "a"), ())


def test_matrix_inverse_and_det():
    t = GeneratorTable(("d",), (), 3)
    d = gen("d", t)
    m = SeriesMatrix([[1 + d, SuperSeries.zero(t)], [SuperSeries.zero(t), one(t)]])
    inv = m.inverse()
    assert inv[0, 0].max_abs_diff(1 - d + d * d - d * d * d) < 1e-15
    assert m.det().max_abs_diff(1 + d) == 0
    n = SeriesMatrix([[one(t), d * 1], [d * 2, one(t)]])
    prod = n @ n.inverse()
    ident = SeriesMatrix.identity(t, 2)
    for i in range(2):
        for j in range(2):
            assert prod[i, j].max_abs_diff(ident[i, j]) < 1e-15
    assert SeriesMatrix.identity(t, 3).det().max_abs_diff(one(t)) == 0


def test_matrix_rejects_odd_entries():
    with pytest.raises(SeriesError):
        SeriesMatrix([[gen("e1")]])


def test_solve_with_odd_rhs():
    t = GeneratorTable(("d",), ("e1",), 3)
    d, e = gen("d", t), gen("e1", t)
    m = SeriesMatrix([[1 + d]])
    (x,) = m.solve([e * 1])
    assert ((1 + d) * x).max_abs_diff(e) < 1e-15


def test_evaluate():
    t = GeneratorTable(("d",), (), 4)
    d = gen("d", t)
    assert complex((1 + d).inverse().evaluate({"d": 0.1})) == pytest.approx(sum((-0.1) ** k for k in range(5)))
    with pytest.raises(SeriesError):
        gen("e1").evaluate({})


# ---------------------------------------------------------------- properties

coef = st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False)
monomials = st.sampled_from(["1", "d", "s", "d^2", "e1", "e2", "e3", "d*e1", "e1*e2", "s*e2*e3", "e1*e2*e3"])


@st.composite
def series(draw):
    terms = draw(st.dictionaries(monomials, coef, max_size=5))
    out = SuperSeries.zero(T)
    for m, c in terms.items():
        out = out + SuperSeries.monomial(T, m, c)
    return out


@st.composite
def even_series(draw):
    terms = draw(st.dictionaries(st.sampled_from(["d", "s", "d^2", "e1*e2", "d*e2*e3"]), coef, max_size=4))
    out = SuperSeries.constant(T, draw(st.floats(0.5, 2)))
    for m, c in terms.items():
        out = out + SuperSeries.monomial(T, m, c)
    return out


@settings(max_examples=60, deadline=None)
@given(series(), series(), series())
def test_associativity(a, b, c):
    assert ((a * b) * c).max_abs_diff(a * (b * c)) < 1e-12


@settings(max_examples=60, deadline=None)
@given(series(), series())
def test_graded_commutativity(a, b):
    def parts(x):
        ev = SuperSeries(T, {k: v for k, v in x.terms.items() if bin(k[-1]).count("1") % 2 == 0})
        od = SuperSeries(T, {k: v for k, v in x.terms.items() if bin(k[-1]).count("1") % 2 == 1})
        return ev, od

    ae, ao = parts(a)
    be, bo = parts(b)
    assert (ae * b).max_abs_diff(b * ae) < 1e-12
    assert (ao * bo).max_abs_diff(-(bo * ao)) < 1e-12


@settings(max_examples=60, deadline=None)
@given(series())
def test_exp_inverse(a):
    x = a - a.constant_term
    assert (x.exp() * (-x).exp()).max_abs_diff(one()) < 1e-12


@settings(max_examples=60, deadline=None)
@given(even_series())
def test_inverse_and_sqrt_roundtrip(a):
    assert a.inverse().inverse().max_abs_diff(a) < 1e-10
    r = a.sqrt()
    assert (r * r).max_abs_diff(a) < 1e-10
