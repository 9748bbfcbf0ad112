"""Shipped system files and the builders that produce them.

Run ``python3 -m indirect_control.fixtures`` to regenerate the JSON files.
"""
import json
from pathlib import Path

import numpy as np

from ..operators import E1, SIGMA_X, SIGMA_Y, SIGMA_Z, expm_skew, su_basis
from ..systemfile import load_spec, matrix_to_json

HERE = Path(__file__).resolve().parent
I2 = np.eye(2)


def _ham(name, m):
    return {"name": name, "matrix": matrix_to_json(m)}


def _doc(n_s, n_a, hams, **extra):
    doc = {"schema_version": 1, "n_s": n_s, "n_a": n_a, "hamiltonians": hams}
    for k, v in extra.items():
        doc[k] = matrix_to_json(v)
    return doc


def ising_hamiltonian(ux, uy, J=1.0, wz=1.0):
    """Two spins, Ising coupling, constant field on S, controls on A."""
    return (
        J * np.kron(SIGMA_X, SIGMA_X)
        + 1j * np.kron(I2, SIGMA_X) * ux
        + 1j * np.kron(I2, SIGMA_Y) * uy
        + wz * 1j * np.kron(SIGMA_Z, I2)
    )


def example1_ising():
    hams = [_ham(f"H(u_x={ux},u_y={uy})", ising_hamiltonian(ux, uy))
            for ux, uy in ((0, 0), (1, 0), (0, 1))]
    return _doc(2, 2, hams, rho_a=E1, target_x=expm_skew(SIGMA_X))


def p1_P_basis():
    """The five-dimensional P of the p = 1 counterexample on four-level S."""
    return [
        np.kron(SIGMA_Y, I2),
        np.kron(SIGMA_Z, I2),
        1j * np.kron(SIGMA_X, SIGMA_Y),
        1j * np.kron(SIGMA_X, SIGMA_Z),
        1j * np.eye(4),
    ]


def p1_counterexample():
    hams = []
    names = ("sy.1", "sz.1", "i sx.sy", "i sx.sz", "i1")
    for pn, p in zip(names, p1_P_basis()):
        for sn, s in zip("xyz", (SIGMA_X, SIGMA_Y, SIGMA_Z)):
            # generator i p (x) sigma, entered as H = -i G
            hams.append(_ham(f"P[{pn}] (x) sigma_{sn}", np.kron(p, s)))
    k0 = np.kron(SIGMA_X, I2)  # [sigma_y (x) 1, sigma_z (x) 1]
    rho_s = np.eye(4) / 4 + 0.01 * 1j * k0
    return _doc(4, 2, hams, rho_a=E1, rho_s=rho_s)


def full_control():
    gens = [
        1j * np.kron(SIGMA_X, SIGMA_X),
        np.kron(I2, SIGMA_X),
        np.kron(I2, SIGMA_Y),
        np.kron(SIGMA_Z, I2),
        np.kron(SIGMA_X, I2),
    ]
    hams = [_ham(f"G{k}", -1j * g) for k, g in enumerate(gens)]
    return _doc(2, 2, hams, rho_a=E1, target_x=expm_skew(0.7 * SIGMA_Y))


def local_only():
    gens = [np.kron(SIGMA_Z, I2), np.kron(I2, SIGMA_X), np.kron(I2, SIGMA_Y)]
    hams = [_ham(f"G{k}", -1j * g) for k, g in enumerate(gens)]
    return _doc(2, 2, hams, rho_a=E1)


def qutrit_ancilla():
    """Qubit S, qutrit A with full local control and one Ising-type coupling."""
    gens = [np.kron(I2, s) for s in su_basis(3)]
    gens.append(np.kron(SIGMA_Z, np.diag([1.0, -1.0, 0.0])))
    hams = [_ham(f"G{k}", -1j * g) for k, g in enumerate(gens)]
    rho_a = np.diag([1.0, 0.0, 0.0])
    return _doc(2, 3, hams, rho_a=rho_a)


BUILDERS = {
    "example1_ising": example1_ising,
    "p1_counterexample": p1_counterexample,
    "full_control": full_control,
    "local_only": local_only,
    "qutrit_ancilla": qutrit_ancilla,
}


def fixture_path(name):
    return HERE / f"{name}.json"


def load_fixture(name):
    return load_spec(fixture_path(name))


def write_all():
    for name, build in BUILDERS.items():
        fixture_path(name).write_text(json.dumps(build(), indent=1) + "\n")
