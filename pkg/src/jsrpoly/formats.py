"""File formats: rational matrix blocks, family files, certificates.

* ``.rat``: line-oriented rational matrix blocks.  Comment lines start with
  '#'; each block is a header line "rows cols" followed by rows*cols entries
  "p/q" (or plain integers), whitespace separated, row major.  A file may
  hold several consecutive blocks.
* family files: a small key-value header (dim, matrices) followed by one
  "matrix <label>" block per member; entries are decimal or rational
  strings.  Exact rationals are carried through whenever every entry is
  rational.  Optional "candidate <letters>" lines record known candidates.
* certificates: JSON documents with every tolerance recorded, reproducible
  numeric content (wall-clock time excluded), and enough data to re-check
  polytope invariance without rerunning the algorithm.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .linalg import MatrixFamily, exact_to_float

TOOL_VERSION = "jsrpoly 0.1.0"
CERT_FORMAT = 1


class ParseError(ValueError):
    def __init__(self, path, lineno, message):
        super().__init__(f"{path}:{lineno}: {message}")
        self.path, self.lineno = path, lineno


# ---------------------------------------------------------------- .rat files

def read_rat_blocks(path) -> list:
    """All matrix blocks in the file, as nested lists of Fractions."""
    blocks = []
    with open(path) as fh:
        tokens = []
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if line:
                tokens.extend((lineno, t) for t in line.split())
    pos = 0
    while pos < len(tokens):
        try:
            rows, cols = int(tokens[pos][1]), int(tokens[pos + 1][1])
        except (ValueError, IndexError):
            raise ParseError(path, tokens[pos][0], "expected block header 'rows cols'")
        pos += 2
        need = rows * cols
        if pos + need > len(tokens):
            raise ParseError(path, tokens[-1][0], "truncated matrix block")
        entries = [Fraction(t) for _, t in tokens[pos : pos + need]]
        pos += need
        blocks.append([entries[r * cols : (r + 1) * cols] for r in range(rows)])
    return blocks


def write_rat_blocks(path, blocks, comment: str | None = None) -> None:
    with open(path, "w") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        for block in blocks:
            rows, cols = len(block), len(block[0])
            fh.write(f"{rows} {cols}\n")
            for row in block:
                fh.write(" ".join(_fmt_rational(x) for x in row) + "\n")


def _fmt_rational(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


# -------------------------------------------------------------- family files

@dataclass
class FamilyFile:
    family: MatrixFamily
    candidates: list  # known candidate words (may be empty)


def parse_family(path) -> FamilyFile:
    with open(path) as fh:
        raw = fh.readlines()
    lines = []
    for lineno, line in enumerate(raw, 1):
        stripped = line.split("#", 1)[0].strip()
        if stripped:
            lines.append((lineno, stripped))
    if not lines:
        raise ParseError(path, 1, "empty family file")

    dim = count = None
    idx = 0
    while idx < len(lines) and not lines[idx][1].startswith("matrix"):
        lineno, text = lines[idx]
        parts = text.split()
        if parts[0] == "dim" and len(parts) == 2:
            dim = int(parts[1])
        elif parts[0] == "matrices" and len(parts) == 2:
            count = int(parts[1])
        else:
            raise ParseError(path, lineno, f"unexpected header line {text!r}")
        idx += 1
    if dim is None or count is None:
        raise ParseError(path, lines[0][0], "missing 'dim' or 'matrices' header")

    labels, exact, floats = [], [], []
    all_rational = True
    for _ in range(count):
        if idx >= len(lines) or not lines[idx][1].startswith("matrix"):
            raise ParseError(path, lines[-1][0], "expected a 'matrix <label>' line")
        lineno, text = lines[idx]
        parts = text.split(maxsplit=1)
        labels.append(parts[1].strip() if len(parts) > 1 else f"A{len(labels)+1}")
        idx += 1
        rows_exact, rows_float = [], []
        for _r in range(dim):
            if idx >= len(lines):
                raise ParseError(path, lines[-1][0], "truncated matrix block")
            lineno, text = lines[idx]
            cells = text.split()
            if len(cells) != dim:
                raise ParseError(path, lineno, f"expected {dim} entries, got {len(cells)}")
            er, fr = [], []
            for cell in cells:
                rat, val = _parse_entry(cell, path, lineno)
                if rat is None:
                    all_rational = False
                er.append(rat)
                fr.append(val)
            rows_exact.append(er)
            rows_float.append(fr)
            idx += 1
        exact.append(rows_exact)
        floats.append(np.array(rows_float))

    cands = []
    while idx < len(lines):
        lineno, text = lines[idx]
        parts = text.split()
        if parts[0] != "candidate":
            raise ParseError(path, lineno, f"unexpected trailing line {text!r}")
        word = tuple(int(x) for x in parts[1:])
        if not word or any(not 1 <= l <= count for l in word):
            raise ParseError(path, lineno, "candidate letters must be in 1..m")
        cands.append(word)
        idx += 1

    fam = MatrixFamily(
        tuple(floats),
        exact=tuple(exact) if all_rational else None,
        labels=tuple(labels),
    )
    return FamilyFile(fam, cands)


def _parse_entry(cell: str, path, lineno):
    """-> (Fraction | None, float)."""
    try:
        if "/" in cell or _looks_integral(cell):
            rat = Fraction(cell)
            return rat, float(rat)
        return None, float(cell)
    except (ValueError, ZeroDivisionError):
        raise ParseError(path, lineno, f"bad numeric entry {cell!r}")


def _looks_integral(cell: str) -> bool:
    body = cell[1:] if cell[:1] in "+-" else cell
    return body.isdigit()


def serialize_family(ff: FamilyFile, path) -> None:
    fam = ff.family
    with open(path, "w") as fh:
        fh.write(f"dim {fam.dim}\nmatrices {fam.m}\n")
        for i in range(fam.m):
            fh.write(f"\nmatrix {fam.label(i + 1)}\n")
            for r in range(fam.dim):
                cells = []
                for c in range(fam.dim):
                    if fam.exact is not None:
                        cells.append(_fmt_rational(fam.exact[i][r][c]))
                    else:
                        cells.append(repr(float(fam.mats[i][r, c])))
                fh.write(" ".join(cells) + "\n")
        if ff.candidates:
            fh.write("\n")
            for w in ff.candidates:
                fh.write("candidate " + " ".join(str(l) for l in w) + "\n")


def family_digest(path) -> str:
    """Digest of the parsed numeric content (whitespace/comments immaterial)."""
    ff = parse_family(path)
    h = hashlib.sha256()
    h.update(f"{ff.family.dim} {ff.family.m}".encode())
    for a in ff.family.mats:
        h.update(np.ascontiguousarray(a).tobytes())
    for w in ff.candidates:
        h.update(("c" + ",".join(map(str, w))).encode())
    return h.hexdigest()


# -------------------------------------------------------------- certificates

def certificate_payload(cert, settings: dict, input_sha256: str, family: MatrixFamily) -> dict:
    """JSON-ready dict; deterministic for identical inputs+flags."""
    alpha = cert.alpha
    return {
        "format": CERT_FORMAT,
        "tool_version": TOOL_VERSION,
        "status": cert.status,
        "jsr": cert.jsr,
        "smp_words": [list(w) for w in cert.smp_words],
        "alpha": {
            "values": [float(a) for a in alpha.alpha],
            "margin": _json_float(alpha.margin),
            "k_used": alpha.k_used,
            "snapped": bool(getattr(alpha, "snapped", False)),
        },
        "iterations": cert.iterations,
        "vertex_count": cert.vertex_count,
        "vertex_count_signed": cert.vertex_count_signed,
        "max_invariance_residual": cert.max_invariance_residual,
        "vertices": [[float(x) for x in v] for v in cert.vertices],
        "extra_vertices": [[float(x) for x in v] for v in cert.extra_vertices],
        "iteration_log": cert.log,
        "settings": settings,
        "input_sha256": input_sha256,
        "family": {
            "dim": family.dim,
            "matrices": [[[float(x) for x in row] for row in a] for a in family.mats],
            "labels": [family.label(i + 1) for i in range(family.m)],
        },
    }


def _json_float(x: float):
    if x == float("inf"):
        return "inf"
    return float(x)


def write_certificate(path, payload: dict, wall_time_s: float | None = None) -> None:
    doc = dict(payload)
    if wall_time_s is not None:
        doc["wall_time_s"] = wall_time_s  # excluded from reproducibility claims
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)
        fh.write("\n")


def read_certificate(path) -> dict:
    with open(path) as fh:
        return json.load(fh)
