"""Plain-text matrix format.

::

    matrix <real|complex> <rows> <cols>
    <row 0 entries separated by single spaces>
    ...

Complex entries are written ``re,im``. Values use Python's shortest
round-trip float repr, so reading back reproduces every bit. Vectors are
stored as matrices with one column.
"""
from __future__ import annotations

import io
import os

import numpy as np

from .linalg import is_real


def _fmt(v: float) -> str:
    return repr(float(v))


def format_matrix(A) -> str:
    A = np.asarray(A)
    if A.ndim == 1:
        A = A.reshape(-1, 1)
    if A.ndim != 2:
        raise ValueError("only 1-D and 2-D arrays can be written")
    real = is_real(A)
    out = io.StringIO()
    out.write(f"matrix {'real' if real else 'complex'} {A.shape[0]} {A.shape[1]}\n")
    for row in A:
        if real:
            out.write(" ".join(_fmt(np.real(v)) for v in row))
        else:
            out.write(" ".join(f"{_fmt(v.real)},{_fmt(v.imag)}" for v in row))
        out.write("\n")
    return out.getvalue()


def parse_matrix(text: str) -> np.ndarray:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty matrix file")
    head = lines[0].split()
    if len(head) != 4 or head[0] != "matrix" or head[1] not in ("real", "complex"):
        raise ValueError(f"bad matrix header: {lines[0]!r}")
    rows, cols = int(head[2]), int(head[3])
    if rows < 1 or cols < 1:
        raise ValueError("matrix dimensions must be positive")
    body = lines[1:]
    if len(body) != rows:
        raise ValueError(f"expected {rows} rows, found {len(body)}")
    complex_field = head[1] == "complex"
    A = np.empty((rows, cols), dtype=np.complex128 if complex_field else np.float64)
    for i, line in enumerate(body):
        toks = line.split()
        if len(toks) != cols:
            raise ValueError(f"row {i}: expected {cols} entries, found {len(toks)}")
        for j, tok in enumerate(toks):
            if complex_field:
                re, _, im = tok.partition(",")
                A[i, j] = complex(float(re), float(im or 0.0))
            else:
                A[i, j] = float(tok)
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix file has non-finite entries")
    return A


def write_matrix(path: str | os.PathLike, A) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_matrix(A))


def read_matrix(path: str | os.PathLike) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        return parse_matrix(fh.read())


def read_vector(path: str | os.PathLike) -> np.ndarray:
    A = read_matrix(path)
    if A.shape[1] != 1:
        raise ValueError(f"vector file must have one column, found {A.shape[1]}")
    return A[:, 0]
