"""Monad and matrix-pair documents.

Rationals are written as "p/q" strings. A monad entry is a list of terms
{"coeff": "p/q", "exps": [...]}, one exponent per Cox variable.
"""

from fractions import Fraction
from typing import Any

import orjson

from core.canonical import MatrixPairE, PointConfig
from core.errors import FormatError, RelstabError
from core.exact import CoxPolynomial, RationalMatrix
from core.monad import MonadData
from core.variety import VarietyTag

FORMAT_VERSION = 1
OPTIONS = orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS


def rational_str(x: Fraction | int) -> str:
    """Return "p" or "p/q"."""
    return str(Fraction(x))


def parse_rational(value: Any) -> Fraction:
    """Parse an int or a "p/q" string; decimals are rejected."""
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise FormatError(f"expected an integer or a 'p/q' string, got {value!r}")
    if isinstance(value, str) and ("." in value or "e" in value.lower()):
        raise FormatError(f"decimal scalar {value!r}")
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError) as err:
        raise FormatError(f"bad rational {value!r}") from err


def parse_int(value: Any, what: str) -> int:
    """Return a JSON integer; floats, strings and booleans are rejected."""
    if isinstance(value, bool) or not isinstance(value, int):
        raise FormatError(f"{what} must be an integer, got {value!r}")
    return value


def _variety_doc(v: VarietyTag) -> Any:
    if v.is_fibred:
        return {"a": v.a, "b": v.b}
    return str(v)


def _parse_variety(doc: Any) -> VarietyTag:
    if doc == "p2":
        return VarietyTag.p2()
    if isinstance(doc, dict) and set(doc) == {"a", "b"}:
        return VarietyTag.p2_bundle(parse_int(doc["a"], "a"), parse_int(doc["b"], "b"))
    raise FormatError(f"variety must be {{a, b}} or 'p2', got {doc!r}")


def _poly_doc(p: CoxPolynomial) -> list[dict[str, Any]]:
    return [
        {"coeff": rational_str(c), "exps": list(exps)} for exps, c in p.terms
    ]


def _parse_poly(v: VarietyTag, doc: Any) -> CoxPolynomial:
    if not isinstance(doc, list):
        raise FormatError(f"an entry must be a list of terms, got {doc!r}")
    terms: dict[tuple[int, ...], Fraction] = {}
    for term in doc:
        try:
            exps = tuple(parse_int(e, "exponent") for e in term["exps"])
            coeff = parse_rational(term["coeff"])
        except (KeyError, TypeError, ValueError) as err:
            raise FormatError(f"bad term {term!r}") from err
        if len(exps) != len(v.cox_variables):
            raise FormatError(f"{len(exps)} exponents for {v}")
        terms[exps] = terms.get(exps, Fraction(0)) + coeff
    return CoxPolynomial.from_mapping(v, terms)


def monad_to_doc(m: MonadData) -> dict[str, Any]:
    """Return the JSON-ready document of a monad."""
    return {
        "format": FORMAT_VERSION,
        "variety": _variety_doc(m.variety),
        "r": m.r,
        "n": m.n,
        "A": [[_poly_doc(p) for p in row] for row in m.a_matrix],
        "B": [[_poly_doc(p) for p in row] for row in m.b_matrix],
    }


def _check_header(doc: Any, keys: set[str]) -> None:
    if not isinstance(doc, dict):
        raise FormatError("document must be an object")
    missing = keys - set(doc)
    if missing:
        raise FormatError(f"missing keys {sorted(missing)}")
    if doc["format"] != FORMAT_VERSION:
        raise FormatError(f"unsupported format {doc['format']!r}")


def monad_from_doc(doc: Any) -> MonadData:
    """Parse a monad document; a missing or null B is read as the zero matrix."""
    _check_header(doc, {"format", "variety", "r", "n", "A"})
    try:
        v = _parse_variety(doc["variety"])
        r, n = parse_int(doc["r"], "r"), parse_int(doc["n"], "n")
        a_matrix = tuple(
            tuple(_parse_poly(v, p) for p in row) for row in doc["A"]
        )
        if doc.get("B") is None:
            zero = CoxPolynomial.zero(v)
            b_matrix = tuple((zero,) * (r + 2 * n) for _ in range(n))
        else:
            b_matrix = tuple(
                tuple(_parse_poly(v, p) for p in row) for row in doc["B"]
            )
        return MonadData(v, r, n, a_matrix, b_matrix)
    except FormatError:
        raise
    except (RelstabError, TypeError, ValueError) as err:
        raise FormatError(f"invalid monad: {err}") from err


def _matrix_doc(m: RationalMatrix) -> list[list[str]]:
    return [[rational_str(x) for x in m.row(i)] for i in range(m.rows)]


def _parse_matrix(doc: Any, cols: int) -> RationalMatrix:
    if not isinstance(doc, list) or not all(isinstance(row, list) for row in doc):
        raise FormatError("a matrix must be a list of rows")
    return RationalMatrix.from_rows(
        [[parse_rational(x) for x in row] for row in doc], cols=cols
    )


def pair_to_doc(e: MatrixPairE) -> dict[str, Any]:
    """Return the JSON-ready document of a matrix pair."""
    return {
        "format": FORMAT_VERSION,
        "r": e.r,
        "n": e.n,
        "x": [rational_str(x) for x in e.config.xs],
        "left": _matrix_doc(e.left),
        "right": _matrix_doc(e.right),
    }


def pair_from_doc(doc: Any) -> MatrixPairE:
    """Parse a matrix-pair document."""
    _check_header(doc, {"format", "r", "n", "x", "left", "right"})
    try:
        n = parse_int(doc["n"], "n")
        config = PointConfig(tuple(parse_rational(x) for x in doc["x"]))
        if config.n != n:
            raise FormatError(f"{config.n} points for n = {n}")
        return MatrixPairE(
            config,
            parse_int(doc["r"], "r"),
            _parse_matrix(doc["left"], n),
            _parse_matrix(doc["right"], n),
        )
    except FormatError:
        raise
    except (RelstabError, TypeError, ValueError) as err:
        raise FormatError(f"invalid matrix pair: {err}") from err


def read_document(path: str) -> Any:
    """Load a JSON document; malformed JSON raises FormatError."""
    with open(path, "rb") as fh:
        data = fh.read()
    try:
        return orjson.loads(data)
    except orjson.JSONDecodeError as err:
        raise FormatError(f"{path}: {err}") from err


def write_document(path: str, doc: Any) -> None:
    """Write a JSON document with sorted keys."""
    with open(path, "wb") as fh:
        fh.write(orjson.dumps(doc, option=OPTIONS))
        fh.write(b"\n")


def read_monad(path: str) -> MonadData:
    """Read a monad file."""
    return monad_from_doc(read_document(path))


def write_monad(path: str, m: MonadData) -> None:
    """Write a monad file."""
    write_document(path, monad_to_doc(m))


def read_pair(path: str) -> MatrixPairE:
    """Read a matrix-pair file."""
    return pair_from_doc(read_document(path))


def write_pair(path: str, e: MatrixPairE) -> None:
    """Write a matrix-pair file."""
    write_document(path, pair_to_doc(e))
