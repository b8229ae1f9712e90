import random

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import GF, Poly, Symbol
from sympy import gcd as sym_gcd

from cubitab.errors import DomainError
from cubitab.forms import (
    IDENTITY,
    SWAP,
    CubicForm,
    UnimodularMap,
    act,
    disc,
    hessian,
    is_irreducible,
    is_p_maximal,
    orbit_equivalent,
    orbit_search,
    reduce_form,
)

coeff = st.integers(min_value=-40, max_value=40)
forms = st.builds(CubicForm, coeff, coeff, coeff, coeff)


def random_unimodular(rng, size=5):
    # Product of elementary matrices, entries kept small.
    p, q, r, s = 1, 0, 0, 1
    for _ in range(rng.randint(1, 4)):
        k = rng.randint(-size, size)
        if rng.random() < 0.5:
            p, q, r, s = p + k * r, q + k * s, r, s
        else:
            p, q, r, s = p, q, r + k * p, s + k * q
    if rng.random() < 0.5:
        p, q, r, s = q, p, s, r
    return UnimodularMap(p, q, r, s)


class TestDisc:
    @pytest.mark.parametrize(
        "form,expected",
        [
            ((1, 0, -1, -1), -23),
            ((1, 1, -2, -1), 49),
            ((1, 0, 0, 0), 0),
            ((1, 0, 0, -2), -108),
            ((1, -1, 2, -1), -23),
        ],
    )
    def test_values(self, form, expected):
        assert disc(CubicForm(*form)) == expected

    @settings(max_examples=200, deadline=None)
    @given(forms)
    def test_against_sympy(self, form):
        x = Symbol("x")
        poly = Poly(
            [form.a, form.b, form.c, form.d], x
        )
        if poly.degree() == 3:
            assert disc(form) == sympy.discriminant(poly.as_expr(), x)


class TestHessian:
    def test_pure_cube_x(self):
        p, q, r = hessian(CubicForm(1, 0, 0, -2))
        assert (p, q, r) == (0, 18, 0)
        assert q * q - 4 * p * r == -3 * disc(CubicForm(1, 0, 0, -2))

    def test_minus_23(self):
        assert hessian(CubicForm(1, 0, -1, -1)) == (3, 9, 1)

    def test_pure_cube_y(self):
        assert hessian(CubicForm(0, 0, 0, 1)) == (0, 0, 0)

    @settings(max_examples=300, deadline=None)
    @given(forms)
    def test_syzygy(self, form):
        p, q, r = hessian(form)
        assert q * q - 4 * p * r == -3 * disc(form)


class TestAct:
    def test_identity(self):
        f = CubicForm(3, -2, 5, 7)
        assert act(IDENTITY, f) == f

    def test_swap_on_cube_root_two(self):
        f = CubicForm(1, 0, 0, -2)
        g = act(SWAP, f)
        assert g in (CubicForm(-2, 0, 0, 1), CubicForm(2, 0, 0, -1))
        assert disc(g) == -108

    def test_translation(self):
        f = CubicForm(1, 0, -1, -1)
        g = act(UnimodularMap(1, 1, 0, 1), f)
        assert g == CubicForm(1, 3, 2, -1)
        assert disc(g) == -23

    def test_non_unimodular_rejected(self):
        with pytest.raises(DomainError):
            act(UnimodularMap(2, 0, 0, 1), CubicForm(1, 0, 0, -2))

    def test_disc_invariance_bulk(self):
        rng = random.Random(17)
        for _ in range(10**4):
            f = CubicForm(*(rng.randint(-30, 30) for _ in range(4)))
            g = random_unimodular(rng)
            assert disc(act(g, f)) == disc(f)

    def test_group_compatibility(self):
        # Substitution composes contravariantly: act(g, act(h, .)) = act(h g, .).
        rng = random.Random(23)
        for _ in range(500):
            f = CubicForm(*(rng.randint(-20, 20) for _ in range(4)))
            g, h = random_unimodular(rng), random_unimodular(rng)
            hg = UnimodularMap(
                h.p * g.p + h.q * g.r,
                h.p * g.q + h.q * g.s,
                h.r * g.p + h.s * g.r,
                h.r * g.q + h.s * g.s,
            )
            assert act(g, act(h, f)) == act(hg, f)


class TestIrreducible:
    @pytest.mark.parametrize(
        "form,expected",
        [
            ((1, 0, 0, -2), True),
            ((0, 1, 0, -1), False),
            ((1, 0, -1, 0), False),
            ((1, 0, -1, -1), True),
            ((2, 3, 3, 1), False),  # root -1/1... (x+y) divides? F(-1,1) = -2+3-3+1
            ((1, 3, 3, 1), False),  # (x+y)^3
            ((6, -5, -2, 1), False),  # roots 1/2, 1/3, ... rational zeros with q>1
        ],
    )
    def test_values(self, form, expected):
        assert is_irreducible(CubicForm(*form)) is expected

    @settings(max_examples=200, deadline=None)
    @given(forms)
    def test_against_sympy(self, form):
        x, y = Symbol("x"), Symbol("y")
        expr = (
            form.a * x**3 + form.b * x**2 * y + form.c * x * y**2 + form.d * y**3
        )
        factored = sympy.factor_list(expr, x, y)
        linear_factor = any(
            sympy.total_degree(fac) == 1 for fac, _ in factored[1]
        )
        has_rational_zero = linear_factor or form.a == 0 or form.d == 0
        assert is_irreducible(form) is (not has_rational_zero and expr != 0)


def _dedekind_maximal(b, c, d, p):
    x = Symbol("x")
    f = Poly([1, b, c, d], x, domain="ZZ")
    fp = Poly(f, x, domain=GF(p))
    gbar = Poly(1, x, domain=GF(p))
    for fac, _ in fp.factor_list()[1]:
        gbar = gbar * fac
    hbar = fp.quo(gbar)
    g = Poly(gbar, x, domain="ZZ")
    h = Poly(hbar, x, domain="ZZ")
    t = (g * h - f).quo(Poly(p, x, domain="ZZ"))
    tp = Poly(t, x, domain=GF(p))
    return sym_gcd(tp, sym_gcd(gbar, hbar)).degree() == 0


class TestMaximality:
    def test_cube_root_two_at_two(self):
        assert is_p_maximal(CubicForm(1, 0, 0, -2), 2) is True

    def test_cube_root_four_at_two(self):
        assert is_p_maximal(CubicForm(1, 0, 0, -4), 2) is False

    def test_vacuous_at_five(self):
        assert is_p_maximal(CubicForm(1, 0, -1, -1), 5) is True

    def test_non_primitive_rejected(self):
        with pytest.raises(DomainError):
            is_p_maximal(CubicForm(2, 2, 2, 2), 2)

    def test_against_dedekind(self):
        rng = random.Random(41)
        tested = 0
        while tested < 400:
            b, c, d = (rng.randint(-60, 60) for _ in range(3))
            form = CubicForm(1, b, c, d)
            value = disc(form)
            if value == 0 or not is_irreducible(form):
                continue
            for p in (2, 3, 5, 7, 11, 13, 53, 61, 101):
                if value % (p * p) == 0:
                    assert is_p_maximal(form, p) is _dedekind_maximal(b, c, d, p), (
                        form,
                        p,
                    )
                    tested += 1

    def test_class_invariance(self):
        rng = random.Random(43)
        checked = 0
        while checked < 300:
            form = CubicForm(*(rng.randint(-15, 15) for _ in range(4)))
            if form.content() != 1 or disc(form) == 0:
                continue
            g = random_unimodular(rng, size=3)
            image = act(g, form)
            for p in (2, 3, 5, 7):
                assert is_p_maximal(form, p) == is_p_maximal(image, p)
                checked += 1


class TestReduce:
    def test_minus_23_examples(self):
        canonical = reduce_form(CubicForm(1, 0, -1, -1))
        assert disc(canonical) == -23
        assert reduce_form(canonical) == canonical

    def test_cube_root_two_pair(self):
        assert reduce_form(CubicForm(-2, 0, 0, 1)) == reduce_form(
            CubicForm(1, 0, 0, -2)
        )

    def test_reducible_rejected(self):
        with pytest.raises(DomainError):
            reduce_form(CubicForm(0, 1, 0, -1))

    def test_idempotent_and_invariant(self):
        rng = random.Random(29)
        done = 0
        while done < 800:
            form = CubicForm(*(rng.randint(-12, 12) for _ in range(4)))
            if disc(form) == 0 or not is_irreducible(form):
                continue
            canonical = reduce_form(form)
            assert disc(canonical) == disc(form)
            assert reduce_form(canonical) == canonical
            g = random_unimodular(rng)
            assert reduce_form(act(g, form)) == canonical
            done += 1

    def test_galois_hexagonal_classes(self):
        # Hessians of cyclic cubics are hexagonal; ties must not split classes.
        f49 = CubicForm(1, 1, -2, -1)
        rng = random.Random(31)
        canonical = reduce_form(f49)
        for _ in range(50):
            g = random_unimodular(rng)
            assert reduce_form(act(g, f49)) == canonical


class TestOrbit:
    def test_constructed_pair(self):
        rng = random.Random(37)
        f = CubicForm(1, 0, -1, -1)
        g = act(random_unimodular(rng, 3), f)
        box = 10 * max(max(abs(x) for x in f), max(abs(x) for x in g))
        assert orbit_equivalent(f, g, box)

    def test_reflexive(self):
        f = CubicForm(1, 0, -1, -1)
        assert orbit_equivalent(f, f, 10)

    def test_box_precondition(self):
        with pytest.raises(DomainError):
            orbit_search(CubicForm(1, 0, -1, -1), CubicForm(1, 0, -1, -1), 0)

    def test_different_disc_short_circuit(self):
        assert not orbit_equivalent(
            CubicForm(1, 0, -1, -1), CubicForm(1, 0, 1, -1), 100
        )

    def test_saturation_reported(self):
        # Imprimitive target is unreachable; the tiny box clips the search.
        f = CubicForm(1, 0, -1, -1)
        result = orbit_search(f, CubicForm(3, 3, 3, 3), box=3)
        assert not result.equivalent
        assert result.saturated

    def test_exhaustive_false_is_proof(self):
        f = CubicForm(1, 0, -1, -1)
        found = act(UnimodularMap(1, 1, 0, 1), f)
        result = orbit_search(f, found, box=500)
        assert result.equivalent

    def test_taussky_scholz_classes_inequivalent(self):
        from cubitab.tabulate import _enumerate_range

        forms_3299 = [f for _, f in _enumerate_range("-", 3299, 3299)]
        assert len(forms_3299) == 4
        for i in range(4):
            for j in range(i + 1, 4):
                assert not orbit_equivalent(forms_3299[i], forms_3299[j], 100)
