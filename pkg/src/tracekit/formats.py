"""Matrix Market and JSON input/output for dense complex matrices.

The Matrix Market support covers the dense "array" and sparse
"coordinate" formats with real, complex, or integer fields and general,
symmetric, or hermitian symmetry; parse failures carry 1-based line
numbers.  Array data is column-major; symmetric and hermitian files
store the lower triangle (column-major within it) and are expanded on
read.  Written files always use "array complex general".

All numeric output (Matrix Market and JSON alike) prints floats with
17 significant digits, which round-trips every float64 bit pattern, so
write -> parse is the identity on matrices and reports.  JSON is
emitted with fixed key order, making equal inputs produce
byte-identical documents.
"""

from __future__ import annotations

import json

import numpy as np

from .estimator import EstimateReport
from .sphere import StreamSpec

__all__ = [
    "MatrixMarketError",
    "parse_matrix_market",
    "write_matrix_market",
    "parse_json_dense",
    "write_json_dense",
    "parse_report_json",
    "write_report_json",
    "dumps",
    "complex_pair",
    "matrix_pairs",
]


class MatrixMarketError(ValueError):
    """Malformed Matrix Market input; messages include the offending line."""


def _fmt(x: float) -> str:
    return "%.17g" % float(x)


def _numbered_lines(text: str):
    """Yield (line_number, stripped_content) skipping comments and blanks."""
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        yield number, line


def _parse_floats(tokens, want: int, number: int):
    if len(tokens) != want:
        raise MatrixMarketError(
            f"line {number}: expected {want} value(s), found {len(tokens)}"
        )
    out = []
    for tok in tokens:
        try:
            value = float(tok)
        except ValueError:
            raise MatrixMarketError(f"line {number}: bad number {tok!r}") from None
        if not np.isfinite(value):
            raise MatrixMarketError(f"line {number}: non-finite value {tok!r}")
        out.append(value)
    return out


def _parse_index(tok: str, limit: int, number: int, axis: str) -> int:
    try:
        value = int(tok)
    except ValueError:
        raise MatrixMarketError(f"line {number}: bad {axis} index {tok!r}") from None
    if not 1 <= value <= limit:
        raise MatrixMarketError(
            f"line {number}: {axis} index {value} out of range [1, {limit}]"
        )
    return value - 1


def parse_matrix_market(text) -> np.ndarray:
    """Parse Matrix Market text into a dense complex (rows, cols) array.

    Supports format array or coordinate; field real, complex, or
    integer; symmetry general, symmetric, or hermitian.  Symmetric and
    hermitian inputs must be square, store only entries with
    row >= column, and a hermitian diagonal entry must have zero
    imaginary part.  Coordinate duplicates are summed.  Anything else,
    including a wrong entry count, raises MatrixMarketError with the
    line number.
    """
    if isinstance(text, (bytes, bytearray)):
        text = text.decode("utf-8")
    lines = text.splitlines()
    if not lines:
        raise MatrixMarketError("line 1: empty input, expected %%MatrixMarket header")
    header = lines[0].split()
    if len(header) != 5 or header[0].lower() != "%%matrixmarket":
        raise MatrixMarketError(
            "line 1: expected header '%%MatrixMarket matrix <format> <field> <symmetry>'"
        )
    obj, fmt, field, symmetry = (tok.lower() for tok in header[1:])
    if obj != "matrix":
        raise MatrixMarketError(f"line 1: unsupported object {obj!r}")
    if fmt not in ("array", "coordinate"):
        raise MatrixMarketError(f"line 1: unsupported format {fmt!r}")
    if field not in ("real", "complex", "integer"):
        raise MatrixMarketError(f"line 1: unsupported field {field!r}")
    if symmetry not in ("general", "symmetric", "hermitian"):
        raise MatrixMarketError(f"line 1: unsupported symmetry {symmetry!r}")

    body = _numbered_lines("\n".join(lines[1:]))

    def shifted(item):
        return item[0] + 1, item[1]

    try:
        number, size_line = shifted(next(body))
    except StopIteration:
        raise MatrixMarketError(f"line {len(lines)}: missing size line") from None
    tokens = size_line.split()
    want_size = 3 if fmt == "coordinate" else 2
    if len(tokens) != want_size:
        raise MatrixMarketError(
            f"line {number}: size line needs {want_size} integers, found {len(tokens)}"
        )
    try:
        sizes = [int(tok) for tok in tokens]
    except ValueError:
        raise MatrixMarketError(f"line {number}: bad size line {size_line!r}") from None
    rows, cols = sizes[0], sizes[1]
    if rows < 1 or cols < 1:
        raise MatrixMarketError(f"line {number}: sizes must be >= 1, got {rows} x {cols}")
    if symmetry != "general" and rows != cols:
        raise MatrixMarketError(
            f"line {number}: {symmetry} symmetry requires a square size, got {rows} x {cols}"
        )

    values_per_entry = 2 if field == "complex" else 1
    a = np.zeros((rows, cols), dtype=np.complex128)

    def entry_value(tokens, number):
        parts = _parse_floats(tokens, values_per_entry, number)
        return complex(parts[0], parts[1]) if field == "complex" else complex(parts[0])

    if fmt == "array":
        if symmetry == "general":
            coords = [(i, j) for j in range(cols) for i in range(rows)]
        else:
            coords = [(i, j) for j in range(cols) for i in range(j, rows)]
        filled = 0
        last = number
        for number, line in map(shifted, body):
            if filled == len(coords):
                raise MatrixMarketError(
                    f"line {number}: extra data, expected {len(coords)} entries"
                )
            i, j = coords[filled]
            value = entry_value(line.split(), number)
            if symmetry == "hermitian" and i == j and value.imag != 0.0:
                raise MatrixMarketError(
                    f"line {number}: hermitian diagonal entry has imaginary part"
                )
            a[i, j] = value
            filled += 1
            last = number
        if filled != len(coords):
            raise MatrixMarketError(
                f"line {last}: expected {len(coords)} entries, found {filled}"
            )
    else:
        nnz = sizes[2]
        if nnz < 0:
            raise MatrixMarketError(f"line {number}: entry count must be >= 0, got {nnz}")
        filled = 0
        last = number
        for number, line in map(shifted, body):
            if filled == nnz:
                raise MatrixMarketError(
                    f"line {number}: extra data, expected {nnz} entries"
                )
            tokens = line.split()
            if len(tokens) != 2 + values_per_entry:
                raise MatrixMarketError(
                    f"line {number}: expected {2 + values_per_entry} fields, "
                    f"found {len(tokens)}"
                )
            i = _parse_index(tokens[0], rows, number, "row")
            j = _parse_index(tokens[1], cols, number, "column")
            if symmetry != "general" and i < j:
                raise MatrixMarketError(
                    f"line {number}: {symmetry} storage requires row >= column, "
                    f"got ({i + 1}, {j + 1})"
                )
            value = entry_value(tokens[2:], number)
            if symmetry == "hermitian" and i == j and value.imag != 0.0:
                raise MatrixMarketError(
                    f"line {number}: hermitian diagonal entry has imaginary part"
                )
            a[i, j] += value
            filled += 1
            last = number
        if filled != nnz:
            raise MatrixMarketError(
                f"line {last}: expected {nnz} entries, found {filled}"
            )

    if symmetry == "symmetric":
        low = np.tril(a, -1)
        a = a + low.T
    elif symmetry == "hermitian":
        low = np.tril(a, -1)
        a = a + np.conj(low).T
    return a


def write_matrix_market(a, comment: str = None) -> str:
    """Render a dense matrix as 'array complex general' Matrix Market text."""
    m = np.atleast_2d(np.asarray(a, dtype=np.complex128))
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ValueError(f"matrix must be 2-dimensional and nonempty, got {m.shape}")
    out = ["%%MatrixMarket matrix array complex general"]
    if comment:
        out.extend("% " + line for line in comment.splitlines())
    rows, cols = m.shape
    out.append(f"{rows} {cols}")
    for j in range(cols):
        for i in range(rows):
            out.append(f"{_fmt(m[i, j].real)} {_fmt(m[i, j].imag)}")
    return "\n".join(out) + "\n"


def _real_number(x, where: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ValueError(f"{where}: expected a number, got {x!r}")
    value = float(x)
    if not np.isfinite(value):
        raise ValueError(f"{where}: non-finite value {x!r}")
    return value


def _complex_from_pair(item, where: str) -> complex:
    if not isinstance(item, list) or len(item) != 2:
        raise ValueError(f"{where}: expected a [re, im] pair, got {item!r}")
    return complex(
        _real_number(item[0], where + "[0]"), _real_number(item[1], where + "[1]")
    )


def parse_json_dense(text) -> np.ndarray:
    """Parse a JSON array of rows of [re, im] pairs into a complex matrix."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"invalid JSON: {exc}") from None
    if not isinstance(data, list) or not data:
        raise ValueError("expected a nonempty JSON array of rows")
    if not all(isinstance(row, list) for row in data):
        raise ValueError("expected every row to be a JSON array")
    width = len(data[0])
    if width == 0:
        raise ValueError("row 0 is empty")
    a = np.zeros((len(data), width), dtype=np.complex128)
    for i, row in enumerate(data):
        if len(row) != width:
            raise ValueError(f"row {i} has {len(row)} entries, expected {width}")
        for j, item in enumerate(row):
            a[i, j] = _complex_from_pair(item, f"entry ({i}, {j})")
    return a


def complex_pair(z) -> list:
    """A complex number as the [re, im] list used in all JSON output."""
    w = complex(z)
    return [w.real, w.imag]


def matrix_pairs(a) -> list:
    """Nested row-major [re, im] pairs for a 2-d array."""
    m = np.atleast_2d(np.asarray(a, dtype=np.complex128))
    return [[complex_pair(z) for z in row] for row in m]


def write_json_dense(a) -> str:
    """Render a matrix as JSON rows of [re, im] pairs (deterministic bytes)."""
    return dumps(matrix_pairs(a)) + "\n"


def dumps(value) -> str:
    """Deterministic JSON: insertion-ordered keys, floats at 17 digits."""
    pieces = []
    _emit(value, pieces)
    return "".join(pieces)


def _emit(value, pieces) -> None:
    if value is None:
        pieces.append("null")
    elif isinstance(value, bool):
        pieces.append("true" if value else "false")
    elif isinstance(value, (int, np.integer)):
        pieces.append(str(int(value)))
    elif isinstance(value, (float, np.floating)):
        if not np.isfinite(value):
            raise ValueError(f"cannot serialize non-finite float {value!r}")
        pieces.append(_fmt(float(value)))
    elif isinstance(value, str):
        pieces.append(json.dumps(value))
    elif isinstance(value, (list, tuple)):
        pieces.append("[")
        for k, item in enumerate(value):
            if k:
                pieces.append(", ")
            _emit(item, pieces)
        pieces.append("]")
    elif isinstance(value, dict):
        pieces.append("{")
        for k, (key, item) in enumerate(value.items()):
            if not isinstance(key, str):
                raise ValueError(f"JSON object keys must be strings, got {key!r}")
            if k:
                pieces.append(", ")
            pieces.append(json.dumps(key))
            pieces.append(": ")
            _emit(item, pieces)
        pieces.append("}")
    else:
        raise ValueError(f"cannot serialize {type(value).__name__} to JSON")


def write_report_json(report: EstimateReport, abs_error: float = None) -> str:
    """Serialize an estimate report with a fixed key order.

    Keys: n, samples, mean, stderr, ci_radius, seed, exact, and
    abs_error when one is supplied.  `exact` is null unless the report
    carries the exact value.
    """
    doc = {
        "n": report.dim,
        "samples": report.sample_count,
        "mean": complex_pair(report.mean),
        "stderr": report.stderr,
        "ci_radius": report.ci_radius,
        "seed": report.spec.master_seed,
        "exact": None if report.exact is None else complex_pair(report.exact),
    }
    if abs_error is not None:
        doc["abs_error"] = float(abs_error)
    return dumps(doc) + "\n"


def parse_report_json(text) -> EstimateReport:
    """Rebuild an EstimateReport from write_report_json output.

    The document stores only the master seed; reports are always based
    at stream index 0, so that is what the spec is rebuilt with.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ValueError("expected a JSON object")
    for key in ("n", "samples", "mean", "stderr", "ci_radius", "seed"):
        if key not in doc:
            raise ValueError(f"report is missing key {key!r}")
    for key in ("n", "samples", "seed"):
        if isinstance(doc[key], bool) or not isinstance(doc[key], int):
            raise ValueError(f"{key}: expected an integer, got {doc[key]!r}")
    mean = _complex_from_pair(doc["mean"], "mean")
    exact = doc.get("exact")
    return EstimateReport(
        dim=int(doc["n"]),
        sample_count=int(doc["samples"]),
        mean=mean,
        stderr=_real_number(doc["stderr"], "stderr"),
        ci_radius=_real_number(doc["ci_radius"], "ci_radius"),
        spec=StreamSpec(int(doc["seed"]), 0),
        exact=None if exact is None else _complex_from_pair(exact, "exact"),
    )
