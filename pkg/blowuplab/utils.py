import cmath
import json
import math
import os
import tempfile

import numpy as np
import pandas as pd


class BlowupLabException(Exception):
    exit_code = 2


class ValidationError(BlowupLabException):
    """ Inputs rejected before any computation starts. """
    exit_code = 1


class NumericalFailure(BlowupLabException):
    """ A computation was attempted and did not deliver a trustworthy result. """
    exit_code = 2


class ParameterError(ValidationError):
    pass


class DomainError(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class OutOfHalfPlane(ValidationError):
    pass


class OutsideLightcone(ValidationError):
    pass


class HypothesisViolation(ValidationError):
    pass


class NoConvergence(NumericalFailure):
    pass


class QuadratureFailure(NumericalFailure):
    pass


class UnderResolved(NumericalFailure):
    pass


class EigFailure(NumericalFailure):
    pass


class Instability(NumericalFailure):
    pass


class NpEncoder(json.JSONEncoder):
    def default(self, obj):
        if isinstance(obj, (np.bool_,)):
            return bool(obj)
        if isinstance(obj, np.integer):
            return int(obj)
        if isinstance(obj, np.floating):
            return encode_real(float(obj))
        if isinstance(obj, (complex, np.complexfloating)):
            return {'re': encode_real(obj.real), 'im': encode_real(obj.imag)}
        if isinstance(obj, np.ndarray):
            return _sanitize(obj.tolist())
        else:
            return super(NpEncoder, self).default(obj)

    def iterencode(self, o, _one_shot=False):
        return super(NpEncoder, self).iterencode(_sanitize(o), _one_shot)


def encode_real(value):
    """ JSON has no infinity, the ``inf`` token is written as a string. """
    if math.isinf(value):
        return 'inf' if value > 0 else '-inf'
    if math.isnan(value):
        return 'nan'
    return value


def _sanitize(obj):
    if isinstance(obj, float):
        return encode_real(obj)
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    return obj


def dumps(payload):
    """ Canonical JSON text: sorted keys, fixed indentation, exact floats. """
    return json.dumps(payload, cls=NpEncoder, sort_keys=True, indent=2) + '\n'


def as_complex(value, name='value'):
    """ Coerce a number to a finite complex value.

    Args:
        value (complex, float, int): Raw input
        name (str, optional): Name used in the diagnostic

    Raises:
        ParameterError: If a component is NaN or infinite
    """
    z = complex(value)
    if not cmath.isfinite(z):
        raise ParameterError('{} must be finite, got {}'.format(name, value))
    return z


def nearest_integer(z, tol):
    """ Return the integer ``m`` with ``|z - m| < tol``, or ``None``. """
    m = round(z.real)
    if abs(z - m) < tol:
        return int(m)
    return None


def atomic_write(path, text):
    """ Write ``text`` to ``path`` through a temporary file and a rename,
    so that no partial file is ever visible at ``path``. """
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(prefix='.tmp-', dir=directory)
    try:
        with os.fdopen(fd, 'w', newline='') as handle:
            handle.write(text)
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise
    return path


def frame_to_csv(frame: pd.DataFrame, path):
    """ Atomically write a table with 17 significant digits. """
    return atomic_write(path, frame.to_csv(index=False, float_format='%.16e', lineterminator='\n'))

