"""Opcode table shared by both tableau backends and the circuit encoder."""

PREP_Z = 0
PREP_X = 1
H = 2
S = 3
X = 4
Y = 5
Z = 6
CNOT = 7
RX_P = 8
RX_M = 9
RY_P = 10
RY_M = 11
XX = 12
MEAS_Z = 13
MEAS_X = 14
NOP = 15

# circuit op kind -> opcode
KIND_TO_OPCODE = {
    "prep_z": PREP_Z,
    "prep_x": PREP_X,
    "H": H,
    "S": S,
    "X": X,
    "Y": Y,
    "Z": Z,
    "CNOT": CNOT,
    "RX+90": RX_P,
    "RX-90": RX_M,
    "RY+90": RY_P,
    "RY-90": RY_M,
    "XX": XX,
    "measure_z": MEAS_Z,
    "measure_x": MEAS_X,
    "shuttle": NOP,
}

RANDOM_OPS = frozenset({PREP_Z, PREP_X, MEAS_Z, MEAS_X})
MEASURE_OPS = frozenset({MEAS_Z, MEAS_X})

# Pauli fault codes: bit 0 = X component, bit 1 = Z component
PAULI_CODE = {"I": 0, "X": 1, "Z": 2, "Y": 3}
