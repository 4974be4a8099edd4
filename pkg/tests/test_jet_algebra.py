import random
from fractions import Fraction

import pytest
import sympy

from jet_algebra import (COUPLING, CoeffRing, DomainError, Expr, JetMonomial, TrigKind, TrigMode, UNIT, add,
                         d_tau_onshell, d_xi, degree, jet_symbols, mul, parse, serialize, substitute_coupling,
                         to_latex, to_sympy, to_text)


def a_pow(z, q=1):
    return CoeffRing.monomial(z, q)


def random_expr(rng: random.Random, trig: bool = True, with_phi: bool = True) -> Expr:
    result = Expr.zero()
    for _ in range(rng.randint(1, 4)):
        coeff = a_pow(rng.randint(-3, 3), Fraction(rng.randint(-5, 5), rng.randint(1, 4)))
        term = Expr.constant(coeff)
        for _ in range(rng.randint(0, 3)):
            term = term * Expr.jet(rng.randint(0 if with_phi else 1, 4))
        if trig and rng.random() < 0.5:
            term = term * (Expr.cos(rng.randint(1, 3)) if rng.random() < 0.5 else Expr.sin(rng.randint(1, 3)))
        result = result + term
    return result


# --- add / mul ---

def test_add_collects_like_terms():
    x = Expr.jet(1, coeff=a_pow(-1, 2))
    y = Expr.jet(1, coeff=a_pow(-1))
    assert add(x, y) == Expr.jet(1, coeff=a_pow(-1, 3))


def test_add_zero_is_identity_and_cancellation_gives_empty():
    x = Expr.jet(1, 2)
    assert add(x, Expr.zero()) == x
    assert add(x, Expr.jet(1, 2, coeff=-1)).is_zero()
    assert len(add(x, -x)) == 0


def test_mul_adds_exponents():
    assert mul(Expr.jet(1), Expr.jet(1)) == Expr.jet(1, 2)


def test_sin_squared_product_to_sum():
    expected = Expr.constant(Fraction(1, 2)) - Expr.cos(2).scale(Fraction(1, 2))
    assert mul(Expr.sin(1), Expr.sin(1)) == expected


def test_mul_coefficient_arithmetic():
    a1 = Expr.jet(1, coeff=a_pow(-1, 2))
    a2 = Expr.jet(2, coeff=a_pow(-2, 2))
    expected = Expr({(JetMonomial.from_dict({1: 2, 2: 1}), UNIT): a_pow(-4, 8)})
    assert mul(a1 * a1, a2) == expected


def test_trig_normalization():
    assert Expr.sin(0).is_zero()
    assert Expr.cos(0) == Expr.one()
    assert Expr.sin(-2) == -Expr.sin(2)
    assert Expr.cos(-3) == Expr.cos(3)
    assert TrigMode.normalize(TrigKind.SIN, 0) is None


def test_ring_laws_on_random_triples():
    rng = random.Random(20240601)
    for _ in range(25):
        x, y, z = (random_expr(rng) for _ in range(3))
        assert (x * y) * z == x * (y * z)
        assert x * (y + z) == x * y + x * z
        assert x * y == y * x
        assert (x + y) - y == x


@pytest.mark.slow
def test_ring_laws_on_many_random_triples():
    rng = random.Random(31337)
    for _ in range(10_000):
        x, y, z = (random_expr(rng) for _ in range(3))
        assert (x * y) * z == x * (y * z)
        assert x * (y + z) == x * y + x * z
        assert x * y == y * x
        assert x + y == y + x


# --- производные ---

def test_d_xi_examples():
    assert d_xi(Expr.jet(1, 2)) == Expr({(JetMonomial.from_dict({1: 1, 2: 1}), UNIT): CoeffRing.scalar(2)})
    assert d_xi(Expr.cos(1)) == (Expr.jet(1) * Expr.sin(1)).scale(a_pow(1, -1))
    assert d_xi(Expr.jet(2, coeff=a_pow(-2, 2))) == Expr.jet(3, coeff=a_pow(-2, 2))


def test_d_xi_leibniz_on_random_pairs():
    rng = random.Random(7)
    for _ in range(25):
        x, y = random_expr(rng), random_expr(rng)
        assert d_xi(x * y) == d_xi(x) * y + x * d_xi(y)
        assert d_xi(x + y) == d_xi(x) + d_xi(y)


def random_homogeneous(rng: random.Random, total: int) -> Expr:
    result = Expr.zero()
    for _ in range(rng.randint(1, 4)):
        term = Expr.constant(a_pow(rng.randint(-3, 3), Fraction(rng.choice([-3, -1, 1, 2]), rng.randint(1, 3))))
        remaining = total
        while remaining:
            k = rng.randint(1, remaining)
            term = term * Expr.jet(k)
            remaining -= k
        for _ in range(rng.randint(0, 2)):
            term = term * Expr.jet(0)
        result = result + term
    return result


def test_d_xi_raises_degree_by_one():
    rng = random.Random(17)
    for _ in range(200):
        total = rng.randint(1, 6)
        x = random_homogeneous(rng, total)
        if x.is_zero():
            continue
        assert degree(x) == (True, total)
        assert degree(d_xi(x)) == (True, total + 1)


def test_d_xi_matches_sympy_chain_rule():
    rng = random.Random(11)
    xi = sympy.Symbol('xi')
    f = sympy.Function('f')(xi)

    def as_function_of_xi(expr: sympy.Expr, max_order: int) -> sympy.Expr:
        symbols = jet_symbols(max_order)
        return expr.subs({symbols[k]: f.diff(xi, k) if k else f for k in symbols}, simultaneous=True)

    for _ in range(10):
        x = random_expr(rng)
        top = max(x.jet_orders(), default=0) + 1
        lhs = sympy.diff(as_function_of_xi(to_sympy(x), top), xi)
        rhs = as_function_of_xi(to_sympy(d_xi(x)), top)
        assert sympy.expand(lhs - rhs) == 0


def test_d_tau_onshell_examples():
    assert d_tau_onshell(Expr.jet(1)) == Expr.sin(1).scale(a_pow(1))
    assert d_tau_onshell(Expr.jet(2)) == (Expr.jet(1) * Expr.cos(1)).scale(a_pow(2))
    assert d_tau_onshell(Expr.jet(1, 2)) == (Expr.jet(1) * Expr.sin(1)).scale(a_pow(1, 2))


def test_d_tau_onshell_leibniz():
    rng = random.Random(3)
    for _ in range(15):
        x, y = random_expr(rng, trig=False, with_phi=False), random_expr(rng, trig=False, with_phi=False)
        assert d_tau_onshell(x * y) == d_tau_onshell(x) * y + x * d_tau_onshell(y)


@pytest.mark.parametrize("bad", [Expr.cos(1), Expr.jet(0), Expr.jet(0) * Expr.jet(1)])
def test_d_tau_onshell_rejects_outside_domain(bad):
    with pytest.raises(DomainError):
        d_tau_onshell(bad)


# --- степень и подстановка ---

def test_degree_examples():
    assert degree(Expr.jet(1, 3)) == (True, 3)
    assert degree(Expr.cos(1)) == (True, 0)
    assert degree(Expr.jet(1) + Expr.jet(2)) == (False, None)
    with pytest.raises(DomainError):
        degree(Expr.zero())


def test_degree_is_additive_under_product():
    rng = random.Random(5)
    for _ in range(20):
        x = Expr.jet(rng.randint(1, 4), rng.randint(1, 3))
        y = Expr.jet(rng.randint(1, 4), rng.randint(1, 3)) * Expr.cos(rng.randint(1, 2))
        assert degree(x * y)[1] == degree(x)[1] + degree(y)[1]


def test_substitute_coupling_examples():
    a3 = Expr.jet(3, coeff=a_pow(-3, 2)) + Expr.jet(1, 3, coeff=a_pow(-1, Fraction(1, 3)))
    assert substitute_coupling(a3, 1) == Expr.jet(3, coeff=2) + Expr.jet(1, 3, coeff=Fraction(1, 3))
    assert substitute_coupling(Expr.jet(1, 2), 7) == Expr.jet(1, 2)
    assert substitute_coupling(Expr.jet(2, 2, coeff=a_pow(-2)), 2) == Expr.jet(2, 2, coeff=Fraction(1, 4))
    with pytest.raises(DomainError):
        substitute_coupling(a3, 0)


def test_coeff_ring_evaluate_rejects_zero_and_floats():
    with pytest.raises(DomainError):
        a_pow(-1).evaluate(0)
    with pytest.raises(DomainError):
        CoeffRing.scalar(0.5)


# --- сериализация и отображение ---

def test_serialization_is_canonical():
    rng = random.Random(99)
    for _ in range(10):
        x = random_expr(rng)
        assert parse(serialize(x)) == x
        assert serialize(parse(serialize(x))) == serialize(x)


@pytest.mark.parametrize("records", [
    [{'coeff': [], 'jets': [[1, 1]], 'trig': {'kind': 'Unit', 'mode': 0}}],
    [{'coeff': [[0, 1, 1]], 'jets': [], 'trig': {'kind': 'Sin', 'mode': 0}}],
    [{'coeff': [[0, 1, 1]], 'jets': [], 'trig': {'kind': 'Cos', 'mode': -2}}],
    [{'coeff': [[0, 1, 1]], 'jets': [[1, 1]], 'trig': {'kind': 'Unit', 'mode': 0}}] * 2,
    [{'coeff': [[0, 1, 0]], 'jets': [], 'trig': {'kind': 'Unit', 'mode': 0}}],
    [{'coeff': [[0, 1, 1]], 'jets': [], 'trig': {'kind': 'sin', 'mode': 1}}],
    [{'coeff': [[0, 1, 1]], 'jets': [], 'trig': {'kind': 'SIN', 'mode': 1}}],
    [{'coeff': [[0, 1, 1]], 'jets': [], 'trig': {'kind': 2, 'mode': 1}}],
    [{'jets': []}],
])
def test_parse_rejects_non_canonical_records(records):
    with pytest.raises(DomainError):
        parse(records)


def test_text_rendering():
    a3 = Expr.jet(3, coeff=a_pow(-3, 2)) + Expr.jet(1, 3, coeff=a_pow(-1, Fraction(1, 3)))
    assert to_text(a3) == "1/(3a) φ_ξ^3 + 2/a^3 φ_ξξξ"
    assert to_text(Expr.zero()) == "0"
    assert to_text(Expr.jet(4)) == "φ_4ξ"
    assert to_text(-(Expr.jet(1, 2) * Expr.cos(1))) == "-φ_ξ^2 cos(aφ)"


def test_latex_rendering_uses_xi_subscripts():
    a3 = Expr.jet(3, coeff=a_pow(-3, 2)) + Expr.jet(1, 3, coeff=a_pow(-1, Fraction(1, 3)))
    rendered = to_latex(a3)
    assert r"\varphi_{\xi\xi\xi}" in rendered
    assert r"\varphi_{\xi}" in rendered
    assert r"\varphi_{4\xi}" in to_latex(Expr.jet(4))


def test_to_sympy_keeps_coupling_symbol():
    expr = to_sympy(Expr.cos(2).scale(a_pow(-1)))
    assert expr.has(COUPLING)
    assert expr == sympy.cos(2 * COUPLING * jet_symbols(0)[0]) / COUPLING
