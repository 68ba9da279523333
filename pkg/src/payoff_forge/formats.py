"""File formats and deterministic serialization.

Identical inputs must produce byte-identical outputs: every float is written
with 17 significant digits (lossless for 64-bit binary floats), lines end
with a bare newline, JSON keys are sorted, and non-finite diagnostics travel
as the literal markers ``inf`` and ``indeterminate``.
"""

from __future__ import annotations

import json
import math
import os

import numpy as np

from .errors import InvalidInputError, ParseError
from .market import Distribution, Mesh, Role, SecurityQuotes, validate_distribution
from .preferences import RiskAversionProfile, UtilitySpec

CURVE_HEADER = "x_left,x_right,value"
PROFILE_HEADER = "x_mid,R"
PLOT_HEADER = "series,x,value"


def format_float(x: float) -> str:
    """Decimal rendering at 17 significant digits; round-trips exactly."""
    return "%.17g" % float(x)


def dumps(obj, indent: int = 2) -> str:
    """Deterministic JSON text: sorted keys, 17-digit floats, trailing newline."""
    return _render(obj, indent, 0) + "\n"


def _render(obj, indent: int, depth: int) -> str:
    pad = " " * (indent * (depth + 1))
    closing = " " * (indent * depth)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = []
        for key in sorted(obj):
            if not isinstance(key, str):
                raise InvalidInputError("JSON object keys must be strings")
            items.append(f"{pad}{json.dumps(key)}: {_render(obj[key], indent, depth + 1)}")
        return "{\n" + ",\n".join(items) + f"\n{closing}}}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        items = [f"{pad}{_render(item, indent, depth + 1)}" for item in seq]
        return "[\n" + ",\n".join(items) + f"\n{closing}]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        if not math.isfinite(value):
            raise InvalidInputError(
                "non-finite numbers must be encoded as markers, not JSON numbers"
            )
        return format_float(value)
    if isinstance(obj, str):
        return json.dumps(obj)
    raise InvalidInputError(f"cannot serialize {type(obj).__name__}")


def write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(text)


def write_json_doc(path: str, doc: dict) -> None:
    write_text(path, dumps(doc))


# --------------------------------------------------------------------------
# Curve CSV (one row per bucket)
# --------------------------------------------------------------------------


def render_curve_csv(mesh: Mesh, values) -> str:
    values = np.asarray(values, dtype=float)
    lines = [CURVE_HEADER]
    for k in range(mesh.n_buckets):
        lines.append(
            f"{format_float(mesh.edges[k])},{format_float(mesh.edges[k + 1])},{format_float(values[k])}"
        )
    return "\n".join(lines) + "\n"


def write_curve_csv(path: str, mesh: Mesh, values) -> None:
    write_text(path, render_curve_csv(mesh, values))


def read_curve_csv(path: str) -> tuple[Mesh, np.ndarray]:
    rows = _read_rows(path, CURVE_HEADER, 3)
    lefts, rights, values = [], [], []
    for line_no, cells in rows:
        try:
            lefts.append(float(cells[0]))
            rights.append(float(cells[1]))
            values.append(float(cells[2]))
        except ValueError:
            raise ParseError(path, line_no, f"cannot parse numbers from {','.join(cells)!r}")
    for k in range(1, len(lefts)):
        gap = abs(lefts[k] - rights[k - 1])
        if gap > 1e-12 * max(1.0, abs(rights[k - 1])):
            raise ParseError(path, k + 2, "buckets are not contiguous")
    try:
        mesh = Mesh(np.array(lefts + [rights[-1]]))
    except InvalidInputError as exc:
        raise ParseError(path, None, str(exc))
    return mesh, np.array(values)


# --------------------------------------------------------------------------
# Risk profile CSV (one row per interior edge)
# --------------------------------------------------------------------------


def render_profile_csv(positions, values) -> str:
    lines = [PROFILE_HEADER]
    for x, r in zip(np.asarray(positions, dtype=float), np.asarray(values, dtype=float)):
        if math.isnan(r):
            token = "indeterminate"
        elif math.isinf(r):
            token = "inf" if r > 0 else "-inf"
        else:
            token = format_float(r)
        lines.append(f"{format_float(x)},{token}")
    return "\n".join(lines) + "\n"


def write_profile_csv(path: str, positions, values) -> None:
    write_text(path, render_profile_csv(positions, values))


def read_profile_csv(path: str) -> tuple[np.ndarray, np.ndarray]:
    """Positions and values; ``inf`` parses to +inf, ``indeterminate`` to NaN."""
    rows = _read_rows(path, PROFILE_HEADER, 2)
    positions, values = [], []
    for line_no, cells in rows:
        try:
            positions.append(float(cells[0]))
        except ValueError:
            raise ParseError(path, line_no, f"cannot parse position {cells[0]!r}")
        token = cells[1].strip()
        if token == "inf":
            values.append(math.inf)
        elif token == "-inf":
            values.append(-math.inf)
        elif token == "indeterminate":
            values.append(math.nan)
        else:
            try:
                values.append(float(token))
            except ValueError:
                raise ParseError(path, line_no, f"cannot parse risk aversion {token!r}")
    return np.array(positions), np.array(values)


# --------------------------------------------------------------------------
# Long-format plot CSV
# --------------------------------------------------------------------------


def render_plot_csv(series: list[tuple[str, np.ndarray, np.ndarray]]) -> str:
    """Tidy rows (series, x, value); non-finite values keep their marker literals."""
    lines = [PLOT_HEADER]
    for name, xs, values in series:
        for x, value in zip(xs, values):
            if math.isnan(value):
                token = "indeterminate"
            elif math.isinf(value):
                token = "inf" if value > 0 else "-inf"
            else:
                token = format_float(value)
            lines.append(f"{name},{format_float(x)},{token}")
    return "\n".join(lines) + "\n"


def _read_rows(path: str, header: str, n_cells: int):
    try:
        with open(path, "r", encoding="utf-8") as handle:
            raw = handle.read()
    except OSError as exc:
        raise ParseError(path, None, str(exc))
    lines = raw.splitlines()
    if not lines or lines[0].strip() != header:
        raise ParseError(path, 1, f"expected header {header!r}")
    rows = []
    for line_no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        cells = line.split(",")
        if len(cells) != n_cells:
            raise ParseError(path, line_no, f"expected {n_cells} columns, got {len(cells)}")
        rows.append((line_no, cells))
    if not rows:
        raise ParseError(path, None, "no data rows")
    return rows


# --------------------------------------------------------------------------
# Product documents
# --------------------------------------------------------------------------


class ProductSpec:
    """Parsed product document: mesh, market or prices, belief, optional extras."""

    def __init__(self, doc: dict, path: str = "<memory>"):
        if not isinstance(doc, dict):
            raise ParseError(path, None, "product document must be a JSON object")
        self.path = path
        self.doc = doc
        try:
            self.mesh = Mesh(np.asarray(doc["mesh"], dtype=float))
        except KeyError:
            raise ParseError(path, None, "missing 'mesh'")
        except (InvalidInputError, TypeError, ValueError) as exc:
            raise ParseError(path, None, f"bad mesh: {exc}")
        n = self.mesh.n_buckets

        has_prices = "prices" in doc
        has_market = "market" in doc
        if has_prices == has_market:
            raise ParseError(path, None, "exactly one of 'prices' or 'market' is required")
        self.quotes = None
        if has_prices:
            self.quotes = SecurityQuotes(self.mesh, self._array(doc["prices"], n, "prices"))
            from .market import imply_market_distribution

            self.market = imply_market_distribution(self.quotes)
        else:
            weights = self._array(doc["market"], n, "market")
            self.market = self._distribution(weights, Role.MARKET)

        if "belief" not in doc:
            raise ParseError(path, None, "missing 'belief'")
        self.belief_weights = self._array(doc["belief"], n, "belief")

        self.payoff_values = None
        if "payoff" in doc:
            self.payoff_values = self._array(doc["payoff"], n, "payoff")

        self.risk_doc = doc.get("risk_profile")
        self.metadata = doc.get("metadata", {})

    def _array(self, values, n: int, what: str) -> np.ndarray:
        try:
            arr = np.asarray(values, dtype=float)
        except (TypeError, ValueError):
            raise ParseError(self.path, None, f"'{what}' must be an array of numbers")
        if arr.shape != (n,):
            raise ParseError(self.path, None, f"'{what}' must have length {n}, got {arr.size}")
        return arr

    def _distribution(self, weights: np.ndarray, role: Role) -> Distribution:
        outcome = validate_distribution(weights, tolerance=1e-9)
        if not outcome.passed:
            raise InvalidInputError(f"{role.value} weights: {outcome.message}")
        return Distribution(self.mesh, weights / weights.sum(), role)

    def belief(self, floor_beliefs: bool = False) -> Distribution:
        weights = self.belief_weights
        if floor_beliefs:
            from .market import floor_weights

            weights = floor_weights(weights)
        return self._distribution(weights, Role.BELIEF)

    def risk_specification(self):
        """Resolve an inline risk_profile entry to a spec or per-edge profile."""
        doc = self.risk_doc
        if doc is None:
            return None
        if not isinstance(doc, dict):
            raise ParseError(self.path, None, "'risk_profile' must be an object")
        if "values" in doc:
            values = [
                math.inf if v == "inf" else float(v) for v in doc["values"]
            ]
            return RiskAversionProfile.per_edge(np.asarray(values))
        if "file" in doc:
            ref = os.path.join(os.path.dirname(self.path), doc["file"])
            _, values = read_profile_csv(ref)
            if np.any(np.isnan(values)):
                raise InvalidInputError(
                    f"profile {ref} contains indeterminate entries; not solvable"
                )
            return RiskAversionProfile.per_edge(values)
        if "family" in doc:
            return parse_family(doc, self.path)
        raise ParseError(self.path, None, "risk_profile needs 'values', 'file', or 'family'")


def parse_family(doc: dict, path: str = "<memory>") -> UtilitySpec:
    family = doc.get("family")
    if family == "log":
        return UtilitySpec.log()
    if family == "constant_relative":
        if "R" not in doc:
            raise ParseError(path, None, "constant_relative needs field 'R'")
        return UtilitySpec.constant_relative(float(doc["R"]))
    if family == "constant_absolute_over_f":
        if "a" not in doc:
            raise ParseError(path, None, "constant_absolute_over_f needs field 'a'")
        return UtilitySpec.constant_absolute_over_f(float(doc["a"]))
    raise ParseError(path, None, f"unknown utility family {family!r}")


def read_product(path: str) -> ProductSpec:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            doc = json.load(handle)
    except OSError as exc:
        raise ParseError(path, None, str(exc))
    except json.JSONDecodeError as exc:
        raise ParseError(path, exc.lineno, exc.msg)
    return ProductSpec(doc, path)


def parse_product_doc(doc: dict) -> ProductSpec:
    return ProductSpec(doc)
