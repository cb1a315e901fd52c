"""JSON matrix-file schema.

A matrix file holds one family of equally-sized complex square matrices:

    {"dim": d, "matrices": [[[re, im], ...d*d entries row-major...], ...]}

Complex numbers are 2-arrays so the files stay language-neutral.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Sequence

import numpy as np

from .algebra import as_matrix


def matrices_to_payload(family: Sequence[np.ndarray]) -> dict:
    mats = [as_matrix(m) for m in family]
    if not mats:
        raise ValueError("family must be nonempty")
    dim = mats[0].shape[0]
    if any(m.shape[0] != dim for m in mats):
        raise ValueError("family members must share one dimension")
    out = []
    for m in mats:
        flat = m.reshape(-1)
        out.append([[float(z.real), float(z.imag)] for z in flat])
    return {"dim": dim, "matrices": out}


def payload_to_matrices(payload: dict) -> list[np.ndarray]:
    try:
        dim = int(payload["dim"])
        raw = payload["matrices"]
    except (KeyError, TypeError) as exc:
        raise ValueError("matrix file needs 'dim' and 'matrices' fields") from exc
    if dim < 1:
        raise ValueError("dim must be >= 1")
    mats = []
    for entry in raw:
        if len(entry) != dim * dim:
            raise ValueError(
                f"matrix entry count {len(entry)} does not match dim {dim}"
            )
        flat = np.array(
            [complex(re, im) for re, im in entry], dtype=np.complex128
        )
        mats.append(flat.reshape(dim, dim))
    if not mats:
        raise ValueError("matrix file holds no matrices")
    return mats


def write_matrix_file(path, family: Sequence[np.ndarray]) -> None:
    Path(path).write_text(json.dumps(matrices_to_payload(family)))


def read_matrix_file(path) -> list[np.ndarray]:
    return payload_to_matrices(json.loads(Path(path).read_text()))


def parse_word(spec: str) -> tuple[tuple[int, bool], ...]:
    """Parse a word spec like "1*,2,3*" into ((1,True),(2,False),(3,True))."""
    letters = []
    for tok in spec.replace(" ", "").split(","):
        if not tok:
            continue
        star = tok.endswith("*")
        idx = int(tok[:-1] if star else tok)
        if idx < 1:
            raise ValueError(f"word indices are 1-based, got {idx}")
        letters.append((idx, star))
    if not letters:
        raise ValueError("empty word spec")
    return tuple(letters)


def word_to_spec(word) -> str:
    return ",".join(f"{i}{'*' if s else ''}" for i, s in word)
