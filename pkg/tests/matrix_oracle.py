"""Independent dense-matrix reference implementations for the tests.

Everything here is built from literal 2x2 matrices with np.kron and plain
loops, deliberately sharing no code with the package under test.
"""
import numpy as np

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def kron_chain(mats):
    out = np.eye(1, dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out


def pauli_matrix(x_bits, z_bits):
    """Tensor product of per-qubit X^x Z^z factors (qubit 1 leftmost)."""
    return kron_chain([
        (X if x else I2) @ (Z if z else I2) for x, z in zip(x_bits, z_bits)
    ])


def zstring_matrix(bits):
    return kron_chain([Z if b else I2 for b in bits])


def xstring_matrix(bits):
    return kron_chain([X if b else I2 for b in bits])


def hadamard_matrix(n):
    return kron_chain([H] * n)


def diag_gate_matrix(m, level, numerators):
    """exp(i * sum_j theta_j Z-string_j) with theta_j = numerators[j]*pi/2**level.

    The exponent is assembled as a dense matrix sum of Z-string tensor
    products; it is diagonal, so the exponential is entrywise.
    """
    exponent = np.zeros((2**m, 2**m), dtype=complex)
    for j, r in enumerate(numerators):
        bits = [(j >> (m - 1 - k)) & 1 for k in range(m)]
        exponent += (r * np.pi / 2**level) * zstring_matrix(bits)
    assert np.allclose(exponent, np.diag(np.diag(exponent)))
    return np.diag(np.exp(1j * np.diag(exponent)))


def cz_ladder_matrix(n):
    out = np.eye(2**n, dtype=complex)
    for i in range(n - 1):
        cz = np.eye(2**n, dtype=complex)
        for b in range(2**n):
            if (b >> (n - 1 - i)) & 1 and (b >> (n - 2 - i)) & 1:
                cz[b, b] = -1
        out = cz @ out
    return out


def cnot_matrix(n, control, target):
    """CNOT on an n-qubit register, 1-based indices, qubit 1 = MSB."""
    out = np.zeros((2**n, 2**n), dtype=complex)
    for b in range(2**n):
        if (b >> (n - control)) & 1:
            out[b ^ (1 << (n - target)), b] = 1
        else:
            out[b, b] = 1
    return out


def equal_up_to_phase(a, b, tol=1e-10):
    """Matrix or vector equality modulo one global phase factor."""
    a = np.asarray(a).reshape(-1)
    b = np.asarray(b).reshape(-1)
    if a.shape != b.shape:
        return False
    k = np.argmax(np.abs(b))
    if np.abs(b[k]) < tol or np.abs(a[k]) < tol:
        return bool(np.allclose(a, b, atol=tol))
    return bool(np.allclose(a * (b[k] / a[k]), b, atol=tol))
