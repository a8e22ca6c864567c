"""Parser unit tests: shapes of known patterns and error reporting."""

import pytest

from pfsm.syntax import (Alt, ByteClass, Concat, Empty, Literal, Opt, Plus,
                         RegexSyntaxError, Star, nullable, parse_regex)


def test_single_literal():
    assert parse_regex("a") == Literal(ord("a"))


def test_star_concat():
    assert parse_regex("a*c") == Concat((Star(Literal(ord("a"))),
                                         Literal(ord("c"))))


def test_grouped_star():
    got = parse_regex("a(ca)*b")
    assert got == Concat((
        Literal(ord("a")),
        Star(Concat((Literal(ord("c")), Literal(ord("a"))))),
        Literal(ord("b")),
    ))


def test_alternation_and_quantifiers():
    got = parse_regex("(a|b)+c?")
    assert got == Concat((
        Plus(Alt((Literal(ord("a")), Literal(ord("b"))))),
        Opt(Literal(ord("c"))),
    ))


def test_empty_pattern():
    assert parse_regex("") == Empty()


def test_dot_is_any_byte():
    got = parse_regex(".")
    assert isinstance(got, ByteClass) and len(got.bytes_) == 256


def test_escaped_metacharacter():
    assert parse_regex(r"\*") == Literal(ord("*"))
    assert parse_regex(r"a\.b") == Concat((Literal(ord("a")),
                                           Literal(ord(".")),
                                           Literal(ord("b"))))


def test_class_with_range_and_negation():
    got = parse_regex("[a-c]")
    assert got == ByteClass(frozenset({ord("a"), ord("b"), ord("c")}))
    neg = parse_regex("[^a]")
    assert isinstance(neg, ByteClass)
    assert ord("a") not in neg.bytes_ and len(neg.bytes_) == 255


def test_class_literal_dash():
    got = parse_regex("[a-]")
    assert got == ByteClass(frozenset({ord("a"), ord("-")}))


def test_stray_close_bracket_is_literal():
    assert parse_regex("]") == Literal(ord("]"))


@pytest.mark.parametrize("pattern, offset, fragment", [
    ("(ab", 0, "parenthesis"),
    ("ab)", 2, "parenthesis"),
    ("*a", 0, "quantifier"),
    ("a|*b", 2, "quantifier"),
    ("[]", 0, "class"),
    ("[ab", 0, "bracket"),
    ("a\\", 2, "escape"),
    (r"\q", 1, "escape"),
    ("[b-a]", 4, "range"),
])
def test_syntax_errors_carry_offset(pattern, offset, fragment):
    with pytest.raises(RegexSyntaxError) as exc:
        parse_regex(pattern)
    assert exc.value.offset == offset
    assert fragment in exc.value.reason


def test_nullable():
    assert nullable(parse_regex("a*"))
    assert nullable(parse_regex("a?b?"))
    assert nullable(parse_regex("(a|)"))
    assert not nullable(parse_regex("a*c"))
    assert not nullable(parse_regex("a+"))


def test_pattern_as_bytes():
    assert parse_regex(b"ab") == Concat((Literal(ord("a")), Literal(ord("b"))))
