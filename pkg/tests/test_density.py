from fractions import Fraction

import mpmath as mp
import pytest

from cubitab.density import (
    EXACT,
    LOWER_BOUND,
    ZERO,
    ZETA3,
    C_MINUS,
    C_PLUS,
    K_MINUS,
    PredictionInterval,
    density,
    density_lower_bound,
    implied_class0_density,
    local_density,
    predict_count,
    setting_density_check,
)
from cubitab.errors import (
    DomainError,
    UnsupportedModulusError,
    ZeroDensityError,
)
from cubitab.progression import SettingParams, construct_setting


def euler(p):
    return Fraction(p**3, p**3 - 1)


class TestLocalDensity:
    def test_paper_zero_class(self):
        v = local_density(7, 3, 3 * 49)
        assert v.kind == ZERO
        assert v.value == 0

    def test_unit_class_mod_5(self):
        v = local_density(5, 1, 1)
        assert v.kind == EXACT
        assert v.value == Fraction(25, 124)

    def test_zero_class_mod_5(self):
        v = local_density(5, 1, 0)
        assert v.kind == LOWER_BOUND
        assert v.value == Fraction(20, 124)

    def test_p2_class(self):
        v = local_density(7, 2, 7)
        assert v.kind == EXACT
        assert v.value == Fraction(1, 49) * euler(7)

    def test_p3_positive_symbol(self):
        # -3 * 9 = -27 = -1 = 12 (mod 13) is a square; kind exact, doubled mass.
        v = local_density(13, 3, 9 * 169)
        assert v.kind == EXACT
        assert v.value == Fraction(2, 13**3) * euler(13)

    def test_p3_cube_class_is_zero(self):
        v = local_density(11, 3, 0)
        assert v.kind == ZERO
        assert v.provenance[0][2] == "zero-cube"

    def test_small_primes_rejected(self):
        for p in (2, 3):
            with pytest.raises(UnsupportedModulusError):
                local_density(p, 1, 1)

    def test_valuation_one_at_cube_modulus_unsupported(self):
        with pytest.raises(UnsupportedModulusError):
            local_density(5, 3, 5)


class TestDensity:
    def test_coprime_closed_form_35(self):
        v = density(35, 1)
        assert v.kind == EXACT
        assert v.value == Fraction(1, 35) * euler(5) * euler(7)

    def test_zero_propagates(self):
        v = density(343, 147)
        assert v.kind == ZERO and v.value == 0
        # Provenance keeps the vanishing local factor visible.
        assert (7, 3, "p3-local") in v.provenance

    def test_single_prime(self):
        assert density(5, 1).value == Fraction(25, 124)

    def test_trivial_modulus(self):
        v = density(1, 0)
        assert v.kind == EXACT and v.value == 1

    def test_rejects_even_modulus(self):
        with pytest.raises(UnsupportedModulusError):
            density(10, 1)

    def test_rejects_high_exponent(self):
        with pytest.raises(UnsupportedModulusError):
            density(5**4, 1)

    def test_partition_identity_prime_modulus(self):
        # (p-1) unit classes plus the implied zero-class mass fill the space.
        for p in (5, 7, 11, 13):
            unit = density(p, 1).value
            implied = implied_class0_density(p)
            assert (p - 1) * unit + implied == 1
            assert implied == Fraction(p * p - 1, p**3 - 1)
            est = local_density(p, 1, 0).value
            assert est == Fraction(p * p - p, p**3 - 1)
            assert implied >= est

    def test_mixed_kind_is_lower_bound(self):
        v = density(5 * 7, 5)  # zero class mod 5, unit mod 7
        assert v.kind == LOWER_BOUND
        assert v.value == Fraction(20, 124) * Fraction(1, 7) * euler(7)


class TestLemmaBound:
    def test_class_zero_mod_5(self):
        v = density_lower_bound(5, 0, Fraction(1, 3))
        assert v.value == Fraction(1, 5) * Fraction(2, 3)
        assert v.kind == LOWER_BOUND

    def test_exponent_three_t_zero(self):
        # a = 9 * 13^2: -3 * 9 is a square mod 13, so the factor is positive.
        v = density_lower_bound(13**3, 9 * 169, Fraction(1, 5))
        assert v.value == Fraction(1, 13**3)

    def test_two_unit_primes(self):
        v = density_lower_bound(35, 1, Fraction(1, 6))
        assert v.value == Fraction(1, 35) * Fraction(25, 36)

    def test_bound_below_exact(self):
        for m, a in ((5, 1), (35, 1), (13, 2)):
            exact = density(m, a)
            bound = density_lower_bound(m, a, Fraction(1, 6))
            assert bound.value <= exact.value

    def test_zero_density_error_names_prime(self):
        with pytest.raises(ZeroDensityError) as err:
            density_lower_bound(7**3, 3 * 49, Fraction(1, 8))
        assert err.value.prime == 7

    def test_small_prime_precondition(self):
        # The zero class of a too-small prime cannot absorb the 1-eps margin.
        with pytest.raises(DomainError):
            density_lower_bound(5, 0, Fraction(1, 5))
        # Coprime classes carry full mass, so the same prime is fine there.
        assert density_lower_bound(5, 1, Fraction(1, 5)).value == Fraction(4, 25)


class TestSettingDensity:
    def test_strengthened_bound(self):
        cert = construct_setting(SettingParams("-", Fraction(1, 3), 1, 1), True)
        report = setting_density_check(cert)
        assert report.passed
        assert report.bounds() == {1: Fraction(2, 3) / cert.m}

    def test_literal_failure_names_symbol(self):
        cert = construct_setting(SettingParams("-", Fraction(1, 3), 1, 1), False)
        report = setting_density_check(cert)
        assert not report.passed
        failing = {e["prime"]: e for e in report.failures}
        assert 13 in failing
        assert failing[13]["kronecker_q_p"] == -1
        assert failing[13]["legendre"] == -1

    def test_k1_coprimality_trivial(self):
        cert = construct_setting(SettingParams("+", Fraction(1, 3), 1, 1), True)
        report = setting_density_check(cert)
        # No h != i subchecks exist for k = 1.
        roles = {e.get("role") for e in report.entries if "prime" in e}
        assert roles == {"q_1", "p_11", "p_12"}

    def test_multi_column(self):
        cert = construct_setting(SettingParams("-", Fraction(1, 2), 2, 1), True)
        report = setting_density_check(cert)
        assert report.passed
        bound = (1 - Fraction(1, 2)) / cert.m
        assert report.bounds() == {1: bound, 2: bound}


class TestConstantsAndPrediction:
    def test_zeta3_thirty_digits(self):
        reference = "1.202056903159594285399738161511"
        assert mp.nstr(ZETA3, 31) == reference

    def test_counting_constants(self):
        assert C_PLUS == 1 and C_MINUS == 3
        assert mp.almosteq(K_MINUS**2, 3)

    def test_predict_full_count(self):
        value = predict_count("+", 10**6, 1, 0)
        assert mp.almosteq(value, 10**6 / (12 * ZETA3))
        assert abs(float(value) - 0.069325 * 10**6) < 50
        minus = predict_count("-", 10**6, 1, 0)
        assert mp.almosteq(minus, 3 * value)

    def test_predict_progression(self):
        value = predict_count("+", 10**6, 5, 1)
        assert mp.almosteq(value, mp.mpf(25) / 124 * 10**6 / (12 * ZETA3))

    def test_predict_refuses_lower_bound(self):
        out = predict_count("+", 10**6, 5, 0)
        assert isinstance(out, PredictionInterval)
        assert out.lower < out.upper

    def test_predict_implied_class0(self):
        value = predict_count("+", 10**6, 5, 0, class0="implied")
        assert mp.almosteq(value, mp.mpf(6) / 31 * 10**6 / (12 * ZETA3))
