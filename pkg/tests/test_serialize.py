from __future__ import annotations

import random

import pytest
from hypothesis import given, strategies as st

from plusspace.cyclotomic import root_of_unity
from plusspace.expansions import jacobi_of_plus, split_plus
from plusspace.field import RATIONAL, real_quadratic
from plusspace.samples import random_plus_expansion
from plusspace.serialize import (FormatError, dumps, expansion_json, field_from_flag, loads, parse_expansion,
                                 parse_scalar, parse_word, scalar_json, word_json)
from plusspace.weil.local import LocalField
from plusspace.weil.words import random_word

Q5 = real_quadratic(5)


def test_scalar_format():
    assert scalar_json(root_of_unity(0, 1)) == {"order": 1, "coeffs": ["1"]}
    z = root_of_unity(1, 8) * 3
    assert scalar_json(z) == {"order": 8, "coeffs": ["0", "3", "0", "0"]}
    assert parse_scalar(scalar_json(z)) == z


def test_field_flags():
    assert field_from_flag("Q") is RATIONAL
    assert field_from_flag("Q(sqrt5)") == Q5
    assert field_from_flag("5") == Q5
    with pytest.raises(FormatError):
        field_from_flag("Q(i)")


@pytest.mark.parametrize("F,m", [(RATIONAL, 1), (RATIONAL, 2), (Q5, 1), (Q5, 2)])
def test_expansion_round_trip(F, m):
    h = random_plus_expansion(F, m, 6, random.Random(9))
    for obj in (h, jacobi_of_plus(h), split_plus(h)):
        text = dumps(expansion_json(obj))
        back = parse_expansion(loads(text))
        assert dumps(expansion_json(back)) == text


def test_matrix_text_over_q():
    h = random_plus_expansion(RATIONAL, 2, 4, random.Random(1))
    doc = expansion_json(h)
    assert all(isinstance(x, str) for c in doc["coefficients"] for row in c["T"] for x in row)
    assert doc["eta"] == "-1" and doc["kind"] == "plus"


def test_position_in_parse_errors():
    with pytest.raises(FormatError) as err:
        loads('{"kind": "plus",\n  "m": }')
    assert err.value.line == 2 and err.value.col is not None


@pytest.mark.parametrize("doc", [
    {"kind": "plus"},
    {"kind": "cubic", "field": {"kind": "rational"}, "m": 1, "weight": [1], "trace_bound": "4",
     "coefficients": []},
    {"kind": "plus", "field": {"kind": "rational"}, "m": 1, "weight": [1], "trace_bound": "4",
     "coefficients": [{"T": [["1.5"]], "c": "1"}]},
])
def test_malformed_documents(doc):
    with pytest.raises((FormatError, ValueError)):
        parse_expansion(doc)


def test_duplicate_keys_rejected():
    doc = {"kind": "plus", "field": {"kind": "rational"}, "m": 1, "weight": [1], "trace_bound": "4",
           "coefficients": [{"T": [["3"]], "c": "1"}, {"T": [["3"]], "c": "2"}]}
    with pytest.raises(FormatError):
        parse_expansion(doc)


@given(st.integers(0, 10 ** 6), st.sampled_from(["q2", "q4", "q2sqrt2"]))
def test_word_round_trip(seed, name):
    F = LocalField(name)
    w = random_word(F, 2, "gamma", random.Random(seed))
    assert parse_word(F, loads(dumps(word_json(w)))) == w
