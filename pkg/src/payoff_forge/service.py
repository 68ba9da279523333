"""Stateless HTTP facade over the solver, for the workbench and automation.

POST /v1/solve                 product fields + risk + settings -> payoff bundle
POST /v1/imply-risk-aversion   {product, payoff}                -> implied series
POST /v1/validate              {product, payoff|overlay}        -> audit report
GET  /v1/health                                                 -> {status, version}

Identical requests produce byte-identical responses (same serialization
contract as the file formats). Errors: 400 malformed request, 422 domain
error, 500 internal. Non-finite diagnostics travel as marker strings beside
strictly finite numeric arrays.
"""

from __future__ import annotations

import json
import logging
import os
import sys
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import numpy as np

from . import __version__
from .errors import ParseError, PayoffForgeError
from .formats import dumps, parse_product_doc
from .growth import OverlayCurve, PayoffCurve, growth_optimal_payoff, payoff_cost
from .pipeline import (
    implied_series_doc,
    normalize_risk_request,
    run_solve,
    settings_from_doc,
    solve_manifest,
    validation_summary,
)
from .solver import implied_risk_aversion
from .validation import audit_product

MAX_BODY_BYTES = 1 << 20  # desk tool, not a data plane
MAX_MESH_BUCKETS = 100_000
DEFAULT_BIND = "127.0.0.1:8080"

log = logging.getLogger("payoff_forge.service")


class RequestRejected(Exception):
    def __init__(self, status: int, message: str):
        self.status = status
        self.message = message
        super().__init__(message)


def _product_from(doc: dict):
    if not isinstance(doc, dict):
        raise RequestRejected(400, "request body must be a JSON object")
    mesh = doc.get("mesh")
    if isinstance(mesh, list) and len(mesh) - 1 > MAX_MESH_BUCKETS:
        raise RequestRejected(400, f"mesh exceeds the {MAX_MESH_BUCKETS} bucket cap")
    try:
        return parse_product_doc(doc)
    except ParseError as exc:
        raise RequestRejected(400, str(exc))


def _curve_values(doc: dict, product, key: str) -> np.ndarray:
    values = doc.get(key)
    if values is None:
        raise RequestRejected(400, f"missing '{key}'")
    arr = np.asarray(values, dtype=float)
    if arr.shape != (product.mesh.n_buckets,):
        raise RequestRejected(400, f"'{key}' must have length {product.mesh.n_buckets}")
    return arr


def handle_solve(doc: dict) -> dict:
    product = _product_from(doc)
    risk_doc = doc.get("risk", {})
    if not isinstance(risk_doc, dict):
        raise RequestRejected(400, "'risk' must be an object")
    request = {
        "family": risk_doc.get("family") and risk_doc,
        "profile_values": _profile_values(risk_doc),
        "strength": risk_doc.get("a"),
        "max_loss": risk_doc.get("max_loss"),
    }
    settings = settings_from_doc(doc.get("settings"))
    risk = normalize_risk_request(request, product)
    outcome = run_solve(
        product,
        risk,
        settings,
        allow_gambling=bool(doc.get("allow_gambling", False)),
        floor_beliefs=bool(doc.get("floor_beliefs", False)),
    )
    return {
        "growth_optimal": [float(v) for v in outcome.growth_optimal.values],
        "payoff": [float(v) for v in outcome.payoff.values],
        "implied_r": implied_series_doc(outcome.implied),
        "cost_residual": abs(payoff_cost(outcome.payoff, outcome.market) - 1.0),
        "manifest": solve_manifest(outcome, settings),
        "validation": validation_summary(outcome),
    }


def _profile_values(risk_doc: dict):
    values = risk_doc.get("profile")
    if values is None:
        return None
    if not isinstance(values, list):
        raise RequestRejected(400, "'risk.profile' must be an array")
    out = []
    for v in values:
        if v == "inf":
            out.append(np.inf)
        else:
            out.append(float(v))
    return np.asarray(out)


def handle_imply(doc: dict) -> dict:
    product = _product_from(doc.get("product"))
    payoff = PayoffCurve(product.mesh, _curve_values(doc, product, "payoff"))
    reference = growth_optimal_payoff(product.belief(), product.market)
    implied = implied_risk_aversion(payoff, reference)
    return {"implied_r": implied_series_doc(implied)}


def handle_validate(doc: dict) -> dict:
    product = _product_from(doc.get("product"))
    if "overlay" in doc:
        curve = OverlayCurve(product.mesh, _curve_values(doc, product, "overlay"))
    else:
        curve = PayoffCurve(product.mesh, _curve_values(doc, product, "payoff"))
    report = audit_product(curve, product.market, product.belief())
    out = report.to_doc()
    out["implied_r"] = implied_series_doc(report.implied)
    return out


def handle_health(_doc) -> dict:
    return {"status": "ok", "version": __version__}


_ROUTES = {
    ("POST", "/v1/solve"): handle_solve,
    ("POST", "/v1/imply-risk-aversion"): handle_imply,
    ("POST", "/v1/validate"): handle_validate,
    ("GET", "/v1/health"): handle_health,
}


class _Handler(BaseHTTPRequestHandler):
    server_version = f"payoff-forge/{__version__}"
    protocol_version = "HTTP/1.1"

    def _dispatch(self, method: str) -> None:
        started = time.monotonic()
        status, body = self._run(method)
        payload = body.encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)
        log.info(
            "%s %s -> %d (%d bytes, %.1f ms)",
            method,
            self.path,
            status,
            len(payload),
            1000.0 * (time.monotonic() - started),
        )

    def _run(self, method: str) -> tuple[int, str]:
        handler = _ROUTES.get((method, self.path))
        if handler is None:
            return 404, dumps({"error": "no such endpoint"})
        try:
            doc = None
            if method == "POST":
                length = int(self.headers.get("Content-Length") or 0)
                if length > MAX_BODY_BYTES:
                    # Drain what the client already sent so the rejection can
                    # be delivered instead of surfacing as a broken pipe.
                    remaining = min(length, 8 * MAX_BODY_BYTES)
                    while remaining > 0:
                        chunk = self.rfile.read(min(remaining, 65536))
                        if not chunk:
                            break
                        remaining -= len(chunk)
                    self.close_connection = True
                    raise RequestRejected(400, "request body exceeds 1 MiB")
                raw = self.rfile.read(length)
                try:
                    doc = json.loads(raw.decode("utf-8"))
                except (UnicodeDecodeError, json.JSONDecodeError) as exc:
                    raise RequestRejected(400, f"malformed JSON: {exc}")
            return 200, dumps(handler(doc))
        except RequestRejected as exc:
            return exc.status, dumps({"error": exc.message})
        except PayoffForgeError as exc:
            return 422, dumps({"error": str(exc)})
        except Exception:  # pragma: no cover - defensive
            log.exception("internal error handling %s %s", method, self.path)
            return 500, dumps({"error": "internal error"})

    def do_GET(self):  # noqa: N802 (http.server naming)
        self._dispatch("GET")

    def do_POST(self):  # noqa: N802
        self._dispatch("POST")

    def log_message(self, fmt, *args):  # request logging goes through `log`
        pass


def make_server(bind: str | None = None) -> ThreadingHTTPServer:
    """Build the server without starting it (tests pick port 0 for an OS port)."""
    address = bind or os.environ.get("PAYOFF_FORGE_BIND") or DEFAULT_BIND
    host, _, port_text = address.rpartition(":")
    if not host or not port_text:
        raise PayoffForgeError(f"bind address {address!r} is not host:port")
    try:
        port = int(port_text)
    except ValueError:
        raise PayoffForgeError(f"bind port {port_text!r} is not an integer")
    return ThreadingHTTPServer((host, port), _Handler)


def serve(bind: str | None = None) -> None:
    logging.basicConfig(stream=sys.stderr, level=logging.INFO, format="%(asctime)s %(message)s")
    server = make_server(bind)
    host, port = server.server_address[:2]
    log.info("listening on %s:%d", host, port)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()


def main(argv=None) -> int:
    import argparse

    parser = argparse.ArgumentParser(prog="payoff-forge-service", description=__doc__)
    parser.add_argument("--bind", help="host:port (default PAYOFF_FORGE_BIND or 127.0.0.1:8080)")
    args = parser.parse_args(argv)
    serve(args.bind)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
