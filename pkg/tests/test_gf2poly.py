"""Tests for polynomials and polynomial matrices over GF(2)."""

import pytest

from src.errors import CanonicityError, ParseError, ShapeError
from src.gf2poly import (
    MINUS_INFINITY,
    ONE,
    ZERO,
    BinaryPoly,
    D,
    PolyMatrix,
    column_monomial_factor,
    expand,
    is_canonical,
    maximal_minors,
    overall_constraint_length,
    parse_poly,
    poly_arith,
    poly_gcd,
    reduce_rows_to_canonical,
    row_degrees,
)


# ── BinaryPoly ─────────────────────────────────────────────────────────


def test_parse_and_format():
    p = parse_poly("1+D+D^3")
    assert p.coefficients == (1, 1, 0, 1)
    assert p.degree == 3
    assert str(p) == "1+D+D^3"
    assert str(ZERO) == "0"


def test_repeated_terms_cancel():
    assert parse_poly("D + D + 1") == ONE


def test_zero_degree_is_minus_infinity():
    assert ZERO.degree == MINUS_INFINITY
    assert MINUS_INFINITY < 0
    assert ZERO.is_zero()


def test_bad_term_reports_column():
    with pytest.raises(ParseError) as exc:
        parse_poly("1+X^2", line=3)
    assert exc.value.line == 3
    assert exc.value.column == 3


def test_arithmetic():
    a = BinaryPoly.from_coefficients([1, 1])  # 1+D
    assert a * a == parse_poly("1+D^2")
    assert a + a == ZERO
    assert poly_arith(a, D, "add") == ONE
    assert poly_arith(parse_poly("D+D^3"), BinaryPoly.monomial(1), "divmod_by_monomial") == (parse_poly("1+D^2"), ZERO)
    assert divmod(parse_poly("1+D^2"), a) == (a, ZERO)
    assert parse_poly("D+D^2").gcd(parse_poly("D^2")) == D


def test_monomial_helpers():
    assert parse_poly("D^2+D^3").monomial_factor() == 2
    assert BinaryPoly.monomial(3) == parse_poly("D^3")
    assert parse_poly("D^2+D^3").divmod_monomial(2) == (parse_poly("1+D"), ZERO)
    assert poly_gcd([parse_poly("D^2"), parse_poly("D+D^3")]) == D


# ── PolyMatrix ─────────────────────────────────────────────────────────


def test_parse_matrix(h1):
    assert h1.shape == (2, 3)
    assert h1[0, 2] == D
    assert h1[1, 1] == parse_poly("1+D")
    assert h1.format() == "1, 0, D\nD, 1+D, 0"


def test_parse_matrix_errors():
    with pytest.raises(ParseError):
        PolyMatrix.parse("# only a comment\n\n")
    with pytest.raises(ParseError) as exc:
        PolyMatrix.parse("1, D\n1, D, D^2")
    assert exc.value.line == 2


def test_expansion_round_trip(h2):
    coefficients = expand(h2)
    assert coefficients.memory == 3
    assert coefficients[0].tolist() == [[0, 0, 1], [0, 1, 0]]
    assert coefficients.reconstruct() == h2


def test_degrees(h1, h2, g1):
    assert row_degrees(h1) == [1, 1]
    assert overall_constraint_length(h1) == 2
    assert row_degrees(h2) == [3, 2]
    assert overall_constraint_length(h2) == 5
    assert g1.memory == 2


def test_column_operations(h2, h2_delayed):
    delayed = h2.multiply_column(1, 2).multiply_column(2, 2)
    assert delayed == h2_delayed
    assert delayed.divide_column(1, 2).divide_column(2, 2) == h2
    with pytest.raises(ShapeError):
        h2.divide_column(1, 1)


def test_column_monomial_factor(h1, h2):
    assert [column_monomial_factor(h1, j) for j in range(3)] == [0, 0, 1]
    assert [column_monomial_factor(h2, j) for j in range(3)] == [2, 0, 0]
    with pytest.raises(ShapeError):
        column_monomial_factor(PolyMatrix.from_rows([[1, 0]]), 1)


def test_duality_product(g1, h1):
    assert (g1 @ h1.transpose()).is_zero()


def test_maximal_minors(h1):
    assert maximal_minors(h1) == [parse_poly("1+D"), parse_poly("D^2"), parse_poly("D+D^2")]


# ── Canonicity ─────────────────────────────────────────────────────────


@pytest.mark.parametrize("name", ["h1", "h1_reduced", "h2", "h2_reduced", "g1", "g1_reduced"])
def test_golden_matrices_are_canonical(name, request):
    report = is_canonical(request.getfixturevalue(name))
    assert report.canonical
    assert report.diagnostic == "row-reduced and basic"


def test_delayed_matrix_is_not_basic(h2_delayed):
    report = is_canonical(h2_delayed)
    assert report.row_reduced
    assert not report.basic
    assert report.row_factors == (2, 2)
    assert "rows share monomial factors" in report.diagnostic


def test_not_row_reduced():
    report = is_canonical(PolyMatrix.parse("1, D\nD, 1+D^2"))
    assert not report.row_reduced
    assert "not row-reduced" in report.diagnostic


def test_more_rows_than_columns():
    with pytest.raises(ShapeError):
        is_canonical(PolyMatrix.parse("1\nD"))


def test_recanonicalize_delayed(h2_delayed, h2_reduced):
    canon = reduce_rows_to_canonical(h2_delayed)
    assert canon.matrix == h2_reduced
    assert canon.row_delays == (2, 2)
    assert canon.is_pure_delay


def test_recanonicalize_with_row_operation():
    m = PolyMatrix.parse("1, D\nD, 1+D^2")
    canon = reduce_rows_to_canonical(m)
    assert is_canonical(canon.matrix).canonical
    assert overall_constraint_length(canon.matrix) < overall_constraint_length(m)
    assert not canon.is_pure_delay


def test_recanonicalize_dependent_rows():
    with pytest.raises(CanonicityError):
        reduce_rows_to_canonical(PolyMatrix.parse("1, D\n1, D"))
