"""CSV and PGM readers/writers used by the command line front-end.

Floats are written with Python's shortest round-trip repr, so a CSV read back
reproduces the exact binary64 values.  Integral values drop the trailing
``.0`` (``1`` rather than ``1.0``).
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

FIELDS_HEADER = ("t", "x", "p_tot", "j_total", "j_conv1", "j_conv2", "j_interf",
                 "j_entangling", "phi12", "v_eff")
TRAJ_HEADER = ("traj_id", "t", "x")
EPR_HEADER = ("phi", "P_D2_D4", "P_D2_D3", "P_D6_D4")
PGM_MAX = 65535


class ParseError(ValueError):
    def __init__(self, path, line, message):
        self.path = str(path)
        self.line = line
        super().__init__(f"{path}:{line}: {message}")


def fmt(value):
    r = repr(float(value))
    return r[:-2] if r.endswith(".0") else r


def write_table(path, header, columns):
    """Write equal-length 1-D columns as CSV rows, in order."""
    data = np.column_stack([np.asarray(c, dtype=float).ravel() for c in columns]).tolist()
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        fh.writelines(",".join(map(fmt, row)) + "\n" for row in data)


def write_fields_csv(path, history):
    """One row per (t, x), t ascending then x ascending."""
    nt, nx = history.p_tot.shape
    t = np.repeat(history.t, nx)
    x = np.tile(history.x, nt)
    j = history.j
    write_table(path, FIELDS_HEADER,
                [t, x, history.p_tot, j.total, j.term_conv_1, j.term_conv_2,
                 j.term_interf_conv, j.term_entangling, history.phi12, history.v_eff])


def read_fields_csv(path):
    """Parse ``fields.csv`` back to (t, x, p_tot) with p_tot of shape (nt, nx)."""
    path = Path(path)
    try:
        text = path.read_text(encoding="ascii")
    except UnicodeDecodeError as exc:
        raise ParseError(path, 1, f"not ASCII text ({exc.reason})") from None
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ParseError(path, 1, "empty file, expected header")
    if tuple(lines[0].split(",")) != FIELDS_HEADER:
        raise ParseError(path, 1, f"bad header, expected {','.join(FIELDS_HEADER)}")
    if len(lines) < 2:
        raise ParseError(path, 2, "no data rows")
    rows = np.empty((len(lines) - 1, 3))
    width = len(FIELDS_HEADER)
    for n, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != width:
            raise ParseError(path, n, f"expected {width} fields, got {len(parts)}")
        try:
            rows[n - 2] = float(parts[0]), float(parts[1]), float(parts[2])
        except ValueError:
            raise ParseError(path, n, "non-numeric field") from None
    t_col = rows[:, 0]
    nx = int(np.argmax(t_col != t_col[0])) if np.any(t_col != t_col[0]) else len(rows)
    if len(rows) % nx:
        raise ParseError(path, len(lines), f"row count {len(rows)} is not a multiple of nx={nx}")
    nt = len(rows) // nx
    grid = rows.reshape(nt, nx, 3)
    x = grid[0, :, 1]
    t = grid[:, 0, 0]
    for i in range(nt):
        if np.any(grid[i, :, 0] != t[i]) or np.any(grid[i, :, 1] != x):
            raise ParseError(path, 2 + i * nx, "rows are not a regular (t, x) grid in row-major order")
    return t, x, grid[:, :, 2]


def density_image(p_tot):
    """16-bit samples, latest time in the top row (evolution runs bottom to top)."""
    p = np.asarray(p_tot, dtype=float)
    peak = float(np.max(p))
    scaled = np.zeros_like(p) if peak <= 0 else np.clip(p / peak, 0.0, 1.0) * PGM_MAX
    return np.rint(scaled[::-1]).astype(">u2")


def write_pgm(path, image):
    image = np.asarray(image, dtype=">u2")
    h, w = image.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n{PGM_MAX}\n".encode("ascii"))
        fh.write(image.tobytes())


def read_pgm(path):
    data = Path(path).read_bytes()
    fields = []
    pos = 0
    while len(fields) < 4:
        while data[pos:pos + 1].isspace():
            pos += 1
        start = pos
        while not data[pos:pos + 1].isspace():
            pos += 1
        fields.append(data[start:pos])
    magic, w, h, maxval = fields[0], int(fields[1]), int(fields[2]), int(fields[3])
    if magic != b"P5" or maxval != PGM_MAX:
        raise ValueError(f"{path}: not a 16-bit binary PGM")
    return np.frombuffer(data[pos + 1:], dtype=">u2").reshape(h, w)
