"""Reading and writing parity-check matrices in MacKay's alist format."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .code import LinearCode


class AlistError(ValueError):
    """Malformed alist input; ``line`` is 1-based."""

    def __init__(self, line: int, msg: str):
        super().__init__(f"line {line}: {msg}")
        self.line = line


def _int_rows(text: str) -> list[tuple[int, list[int]]]:
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        toks = raw.split()
        if not toks:
            continue
        try:
            rows.append((lineno, [int(t) for t in toks]))
        except ValueError:
            bad = next(t for t in toks if not t.lstrip("-").isdigit())
            raise AlistError(lineno, f"non-numeric token {bad!r}") from None
    return rows


def parse_alist_matrix(text: str) -> np.ndarray:
    """Parse alist text into a dense 0/1 parity-check matrix."""
    rows = _int_rows(text)
    if len(rows) < 4:
        raise AlistError(len(rows) + 1, "truncated header")

    def expect(idx: int, count: int, what: str) -> list[int]:
        if idx >= len(rows):
            raise AlistError(rows[-1][0] + 1, f"missing {what}")
        lineno, vals = rows[idx]
        if len(vals) != count:
            raise AlistError(lineno, f"expected {count} values for {what}, got {len(vals)}")
        return vals

    n, m = expect(0, 2, "dimensions 'n m'")
    if n < 1 or m < 1:
        raise AlistError(rows[0][0], f"invalid dimensions {n} x {m}")
    max_col, max_row = expect(1, 2, "maximum degrees")
    col_deg = expect(2, n, "column degrees")
    row_deg = expect(3, m, "row degrees")
    for lineno, degs, cap in ((rows[2][0], col_deg, max_col), (rows[3][0], row_deg, max_row)):
        if any(d < 0 or d > cap for d in degs):
            raise AlistError(lineno, "degree list inconsistent with maximum degree")
    if sum(col_deg) != sum(row_deg):
        raise AlistError(rows[3][0], "column and row degrees do not sum to the same total")

    H = np.zeros((m, n), dtype=np.uint8)
    idx = 4
    for i in range(n):
        if idx >= len(rows):
            raise AlistError(rows[-1][0] + 1, f"missing adjacency list of column {i + 1}")
        lineno, vals = rows[idx]
        entries = [v for v in vals if v != 0]
        if len(entries) != col_deg[i] or len(vals) > max_col:
            raise AlistError(lineno, f"column {i + 1} lists {len(entries)} rows, degree is {col_deg[i]}")
        for v in entries:
            if not 1 <= v <= m:
                raise AlistError(lineno, f"row index {v} out of range 1..{m}")
            H[v - 1, i] = 1
        idx += 1
    # the per-row section is redundant but must agree with the column section
    H_rows = np.zeros_like(H)
    for j in range(m):
        if idx >= len(rows):
            raise AlistError(rows[-1][0] + 1, f"missing adjacency list of row {j + 1}")
        lineno, vals = rows[idx]
        entries = [v for v in vals if v != 0]
        if len(entries) != row_deg[j] or len(vals) > max_row:
            raise AlistError(lineno, f"row {j + 1} lists {len(entries)} columns, degree is {row_deg[j]}")
        for v in entries:
            if not 1 <= v <= n:
                raise AlistError(lineno, f"column index {v} out of range 1..{n}")
            H_rows[j, v - 1] = 1
        if not np.array_equal(H_rows[j], H[j]):
            raise AlistError(lineno, f"row {j + 1} disagrees with the column lists")
        idx += 1
    if idx < len(rows):
        raise AlistError(rows[idx][0], "trailing data after row lists")
    return H


def parse_alist(text: str, name: str = "") -> LinearCode:
    return LinearCode(parse_alist_matrix(text), name=name)


def emit_alist(code_or_matrix) -> str:
    H = code_or_matrix.H_dense if isinstance(code_or_matrix, LinearCode) else np.asarray(code_or_matrix)
    m, n = H.shape
    col_deg = H.sum(axis=0).astype(int)
    row_deg = H.sum(axis=1).astype(int)
    max_col, max_row = int(col_deg.max()), int(row_deg.max())
    lines = [f"{n} {m}", f"{max_col} {max_row}"]
    lines.append(" ".join(map(str, col_deg)))
    lines.append(" ".join(map(str, row_deg)))
    for i in range(n):
        idx = list(np.flatnonzero(H[:, i]) + 1) + [0] * (max_col - col_deg[i])
        lines.append(" ".join(map(str, idx)))
    for j in range(m):
        idx = list(np.flatnonzero(H[j]) + 1) + [0] * (max_row - row_deg[j])
        lines.append(" ".join(map(str, idx)))
    return "\n".join(lines) + "\n"


def read_alist(path) -> LinearCode:
    path = Path(path)
    return parse_alist(path.read_text(), name=path.name)
