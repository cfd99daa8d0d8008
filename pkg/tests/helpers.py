"""Shared plumbing for tests: run a circuit noiselessly on a fresh tableau."""

import numpy as np

from bsqec.stabilizer_sim import Tableau

NO_POS = np.zeros(0, np.int32)
NO_CODE = np.zeros(0, np.uint8)


def execute(circuit, state=None, seed=0):
    """Run every op of ``circuit`` with no faults; returns (state, outcomes)."""
    prog = circuit.program()
    state = state if state is not None else Tableau(circuit.n_qubits)
    bits = np.random.default_rng(seed).integers(0, 2, len(prog) + 1).astype(np.uint8)
    out = np.zeros(len(prog) + 1, np.uint8)
    k = state.run(prog, NO_POS, NO_POS, NO_CODE, bits, out)
    return state, out[:k].tolist()
