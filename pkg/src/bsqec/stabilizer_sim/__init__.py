"""Stabilizer-circuit simulation on the Aaronson-Gottesman tableau.

The hot kernel is a compiled extension (``_ctableau``).  If it is missing,
or ``BSQEC_BACKEND=python`` is set, the pure-Python twin in ``_pytableau``
is used instead; both expose the same ``Tableau`` class.
"""

import os

from . import ops
from .pauli import PauliString
from . import _pytableau

PyTableau = _pytableau.Tableau

try:
    from ._ctableau import Tableau as CTableau
except ImportError:  # extension not built
    CTableau = None

if CTableau is not None and os.environ.get("BSQEC_BACKEND", "").lower() != "python":
    Tableau = CTableau
    BACKEND = "cython"
else:
    Tableau = PyTableau
    BACKEND = "python"

from .api import (  # noqa: E402
    apply_clifford,
    apply_pauli,
    expectation,
    is_valid,
    measure,
    new_state,
    stabilizer_rows,
    destabilizer_rows,
)

__all__ = [
    "BACKEND",
    "CTableau",
    "PauliString",
    "PyTableau",
    "Tableau",
    "apply_clifford",
    "apply_pauli",
    "destabilizer_rows",
    "expectation",
    "is_valid",
    "measure",
    "new_state",
    "ops",
    "stabilizer_rows",
]
