"""Independent brute-force oracles used to pin expected values.

Everything here is built from raw 2x2 matrices and numpy kron products,
on purpose sharing no code with the package's bit-packed algebra, so
the two can check each other.
"""

from __future__ import annotations

import itertools

import numpy as np

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
MATS = {"I": I2, "X": X, "Y": Y, "Z": Z}


def pauli_matrix(letters: str, sign: int = 1) -> np.ndarray:
    """Dense matrix for a Pauli string; letter 0 acts on qubit 0.

    Qubit i is the tensor factor with stride 2^i, so qubit 0 is the
    RIGHTMOST kron factor.
    """
    out = np.array([[1.0]], dtype=complex)
    for ch in letters:
        out = np.kron(MATS[ch], out)
    return sign * out


def string_and_sign(op) -> tuple[str, int]:
    """Letters and sign of a package PauliOperator, via its public API."""
    text = op.to_string()
    assert text[0] in "+-", f"imaginary phase leaked into {text}"
    return text[1:], 1 if text[0] == "+" else -1


def op_matrix(op) -> np.ndarray:
    letters, sign = string_and_sign(op)
    return pauli_matrix(letters, sign)


def identify_pauli(mat: np.ndarray, n: int):
    """Find (letters, sign) with sign in {1,-1} matching the matrix, else None."""
    for letters in itertools.product("IXYZ", repeat=n):
        cand = pauli_matrix("".join(letters))
        for sign in (1, -1):
            if np.allclose(mat, sign * cand, atol=1e-12):
                return "".join(letters), sign
    return None


def dense_graph_state(n: int, edges) -> np.ndarray:
    """|G> built with explicit CZ matrices."""
    state = np.full(1 << n, 1.0 / np.sqrt(1 << n), dtype=complex)
    idx = np.arange(1 << n)
    for u, v in edges:
        mask = ((idx >> u) & 1) & ((idx >> v) & 1)
        state = state.copy()
        state[mask == 1] *= -1.0
    return state


def project(state: np.ndarray, mat: np.ndarray, outcome: int) -> np.ndarray:
    dim = state.size
    return 0.5 * (state + outcome * (mat @ state.reshape(dim, 1)).ravel())
