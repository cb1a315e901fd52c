import json

import numpy as np
import pytest

from ncmoments.matrixio import (
    matrices_to_payload,
    parse_word,
    payload_to_matrices,
    read_matrix_file,
    word_to_spec,
    write_matrix_file,
)

from conftest import random_matrix


def test_roundtrip(tmp_path, rng):
    fam = [random_matrix(rng, 3) for _ in range(2)]
    path = tmp_path / "fam.json"
    write_matrix_file(path, fam)
    back = read_matrix_file(path)
    assert len(back) == 2
    for a, b in zip(fam, back):
        assert np.allclose(a, b, atol=0)


def test_payload_layout(rng):
    m = np.array([[1 + 2j, 3], [0, -1j]])
    payload = matrices_to_payload([m])
    assert payload["dim"] == 2
    assert payload["matrices"][0][0] == [1.0, 2.0]  # row-major, [re, im]
    assert payload["matrices"][0][1] == [3.0, 0.0]
    assert payload["matrices"][0][3] == [0.0, -1.0]


def test_schema_errors():
    with pytest.raises(ValueError):
        payload_to_matrices({"matrices": []})
    with pytest.raises(ValueError):
        payload_to_matrices({"dim": 2, "matrices": [[[1, 0]]]})
    with pytest.raises(ValueError):
        payload_to_matrices({"dim": 1, "matrices": []})


def test_parse_word():
    assert parse_word("1*,2,3*") == ((1, True), (2, False), (3, True))
    assert parse_word(" 2 , 1* ") == ((2, False), (1, True))
    with pytest.raises(ValueError):
        parse_word("0")
    with pytest.raises(ValueError):
        parse_word("")


def test_word_spec_roundtrip():
    word = ((1, True), (4, False))
    assert parse_word(word_to_spec(word)) == word
