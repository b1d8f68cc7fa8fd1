#!/usr/bin/env python3
"""Flask application for dense coding analysis - JSON API."""

import os
from typing import Any, Dict, Optional, Tuple

from flask import Flask, jsonify, request
from flask_cors import CORS

from src.calculator import DenseCodingCalculator
from src.config import (
    DEFAULT_SCHEME,
    DEFAULT_SEED,
    FLAG_SPECTRUM_TOL,
    MAX_API_TRIALS,
    SUPPORTED_SCHEMES,
    check_resource_dimension,
)
from src.parsing import ParameterParser
from src.protocol import ProtocolConfig
from src.states import SchmidtState

app = Flask(__name__)

# Configure CORS with restricted origins
allowed_origins = os.environ.get('ALLOWED_ORIGINS', 'http://localhost:5000').split(',')
CORS(app, resources={r"/api/*": {"origins": allowed_origins}})

# One calculator per process; protocols are cached across requests
calculator = DenseCodingCalculator()
values = ParameterParser()


# Security headers
@app.after_request
def add_security_headers(response):
    """Add security headers to all responses."""
    response.headers['X-Content-Type-Options'] = 'nosniff'
    response.headers['X-Frame-Options'] = 'DENY'
    response.headers['X-XSS-Protection'] = '1; mode=block'
    response.headers['Strict-Transport-Security'] = 'max-age=31536000; includeSubDomains'
    response.headers['Content-Security-Policy'] = "default-src 'none'"
    return response


def _request_data() -> Optional[Dict[str, Any]]:
    """JSON body, falling back to form data."""
    if request.is_json:
        data = request.get_json(silent=True)
    else:
        data = request.get_json(force=True, silent=True)
    if data is None:
        data = request.form.to_dict()
    return data if isinstance(data, dict) else None


def _integer(data: Dict[str, Any], field: str, default: Optional[int] = None) -> int:
    value = data.get(field, default)
    if value is None:
        raise ValueError(f'Missing required field: {field}')
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise ValueError(f'Invalid {field} field: must be an integer')
    try:
        return int(value)
    except ValueError:
        raise ValueError(f'Invalid {field} field: must be an integer') from None


def _complex(data: Dict[str, Any], field: str) -> complex:
    if field not in data:
        raise ValueError(f'Missing required field: {field}')
    value = data[field]
    if isinstance(value, bool):
        raise ValueError(f'Invalid {field} field: must be a number or "re+imi" string')
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, list) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, str):
        return values.complex_value(value)
    raise ValueError(f'Invalid {field} field: must be a number or "re+imi" string')


def _spectrum(data: Dict[str, Any]) -> Tuple[float, ...]:
    if data.get('me'):
        return SchmidtState.uniform(check_resource_dimension(_integer(data, 'D'))).spectrum
    if 'spectrum' not in data:
        raise ValueError('Missing required field: spectrum (or "me" with "D")')
    spectrum = data['spectrum']
    if isinstance(spectrum, str):
        return values.spectrum(spectrum, FLAG_SPECTRUM_TOL)
    if not isinstance(spectrum, list) or not all(
        isinstance(p, (int, float)) and not isinstance(p, bool) for p in spectrum
    ):
        raise ValueError('Invalid spectrum field: must be a list of numbers')
    return values.spectrum(','.join(repr(float(p)) for p in spectrum), FLAG_SPECTRUM_TOL)


def _config(data: Dict[str, Any], default_trials: int) -> ProtocolConfig:
    spectrum = _spectrum(data)
    scheme = data.get('scheme', DEFAULT_SCHEME)
    if not isinstance(scheme, str) or scheme not in SUPPORTED_SCHEMES:
        raise ValueError(f'Unsupported scheme: {scheme}')
    trials = _integer(data, 'trials', default_trials)
    if trials > MAX_API_TRIALS:
        raise ValueError(f'Too many trials. Maximum {MAX_API_TRIALS:,}.')
    return ProtocolConfig(
        d=_integer(data, 'd', len(spectrum)),
        spectrum=spectrum,
        trials=trials,
        seed=_integer(data, 'seed', DEFAULT_SEED),
        scheme=scheme,
    )


def _handle(compute):
    """Run compute() and map failures to sanitized JSON errors."""
    try:
        data = _request_data()
        if not data:
            return jsonify({'error': 'Invalid request: No JSON data provided'}), 400
        return jsonify(compute(data)), 200

    except ValueError as e:
        # Parameter validation errors
        error_msg = str(e)
        app.logger.warning(f'Validation error: {error_msg}')
        return jsonify({'error': error_msg}), 400

    except Exception as e:
        # Unexpected errors - never expose internals
        app.logger.error(f'Unexpected error: {e}', exc_info=True)
        return jsonify({'error': 'An error occurred while processing your request.'}), 500


@app.route('/health', methods=['GET'])
def health_check():
    """Health check endpoint."""
    return jsonify({'status': 'healthy'}), 200


@app.route('/api/schemes', methods=['GET'])
def get_schemes():
    """Get supported encoding schemes grouped by family.

    Response JSON:
        {"schemes": {"qudit": ["weyl"], "qubit": ["pauli"]}}
    """
    schemes_by_family: Dict[str, list] = {}
    for scheme, family in SUPPORTED_SCHEMES.items():
        schemes_by_family.setdefault(family, []).append(scheme)
    return jsonify({'schemes': schemes_by_family}), 200


@app.route('/api/basis', methods=['POST'])
def basis():
    """NME basis vectors for complex (ell, p).

    Request JSON:
        {"ell": "0.5+0.1i", "p": 0.3}
    """
    return _handle(lambda data: calculator.basis_report(
        _complex(data, 'ell'), _complex(data, 'p')
    ).to_dict())


@app.route('/api/analyze', methods=['POST'])
def analyze():
    """Analytic report for one configuration.

    Request JSON:
        {"d": 2, "spectrum": [0.8, 0.2], "scheme": "weyl"}
    """
    return _handle(lambda data: calculator.analyze(_config(data, default_trials=0)).to_dict())


@app.route('/api/simulate', methods=['POST'])
def simulate():
    """Analytic report plus a seeded Monte Carlo run.

    Request JSON:
        {"d": 2, "spectrum": [0.8, 0.2], "trials": 10000, "seed": 7}
    """
    def compute(data: Dict[str, Any]) -> Dict[str, Any]:
        config = _config(data, default_trials=10_000)
        if config.trials < 1:
            raise ValueError('Simulation needs trials >= 1')
        return calculator.analyze(config, include_simulation=True).to_dict()

    return _handle(compute)


@app.errorhandler(404)
def not_found(error):
    """Handle 404 errors."""
    return jsonify({'error': 'Endpoint not found'}), 404


@app.errorhandler(405)
def method_not_allowed(error):
    """Handle 405 errors."""
    return jsonify({'error': 'Method not allowed'}), 405


if __name__ == '__main__':
    # Get port from environment or use default
    port = int(os.environ.get('PORT', 5000))
    debug = os.environ.get('DEBUG', 'False').lower() == 'true'

    print(f"""
    Dense coding API running on http://localhost:{port}

    GET  /health
    GET  /api/schemes
    POST /api/basis
    POST /api/analyze
    POST /api/simulate
    """)

    app.run(host='0.0.0.0', port=port, debug=debug)
