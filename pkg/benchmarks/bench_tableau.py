"""Compare the compiled and pure-Python tableau backends.

Times three workloads per backend: random Clifford gates on a 17-qubit
state, one noiseless Surface-17 syndrome round through ``Tableau.run``, and
full simple-circuit trials of Bacon-Shor-13 with a fault injected.

    python benchmarks/bench_tableau.py [--repeat N]
"""

import argparse
import time

import numpy as np

from bsqec.circuits import simple_circuit, syndrome_round
from bsqec.codes import baconshor, surface17
from bsqec.decoders import SimpleRunner
from bsqec.stabilizer_sim import CTableau, PyTableau, ops


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        n = fn()
        times.append((time.perf_counter() - t) / n)
    return min(times)


def gates(cls, n_ops=2000):
    rng = np.random.default_rng(0)
    pairs = rng.integers(0, 17, (n_ops, 2))

    def fn():
        s = cls(17)
        for a, b in pairs:
            if a == b:
                s.h(int(a))
            else:
                s.cnot(int(a), int(b))
        return n_ops
    return fn


def round_program(cls, n_runs=300):
    code = surface17()
    prog = syndrome_round(code).program()
    none_i, none_c = np.zeros(0, np.int32), np.zeros(0, np.uint8)
    bits = np.zeros(len(prog), np.uint8)
    out = np.zeros(len(prog), np.uint8)

    def fn():
        for _ in range(n_runs):
            cls(code.n_qubits).run(prog, none_i, none_i, none_c, bits, out)
        return n_runs
    return fn


def trials(cls, n_runs=200):
    code = baconshor(3)
    runner = SimpleRunner(simple_circuit(code, 1), code, backend=cls)
    fault = [(20, True, 4, 1)]

    def fn():
        rng = np.random.default_rng(1)
        for _ in range(n_runs):
            runner.run(fault, rng)
        return n_runs
    return fn


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = [("python", PyTableau)]
    if CTableau is not None:
        backends.append(("cython", CTableau))
    else:
        print("compiled backend not built; timing the Python backend only")
    work = [("gate (17q H/CNOT)", gates), ("S17 syndrome round", round_program),
            ("BS13 simple-circuit trial", trials)]
    print(f"{'workload':28s}" + "".join(f"{name:>14s}" for name, _ in backends) + "   speedup")
    for label, make in work:
        res = [_best(make(cls), args.repeat) for _, cls in backends]
        cells = "".join(f"{t * 1e6:11.2f} us" for t in res)
        speed = f"{res[0] / res[1]:9.1f}x" if len(res) == 2 else ""
        print(f"{label:28s}{cells}{speed}")


if __name__ == "__main__":
    main()
