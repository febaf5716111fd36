"""Regenerate the STO-3G FCIDUMP fixtures under crates/nnqs/data/fcidump.

Requires pyscf. Geometries are the STO-3G FCI equilibrium structures for the
gated molecules and simple scans for the potential-energy-surface recipes.
Run from the repository root:

    python3 scripts/make_fcidump.py
"""
import json
import os

import numpy as np
from pyscf import fci, gto, scf
from pyscf.tools import fcidump

OUT = os.path.join("crates", "nnqs", "data", "fcidump")


def h2o_atoms(r, angle_deg):
    a = np.deg2rad(angle_deg / 2)
    return (f"O 0 0 0; H 0 {r * np.sin(a)} {r * np.cos(a)}; "
            f"H 0 {-r * np.sin(a)} {r * np.cos(a)}")


MOLECULES = {
    "h2": ("H 0 0 0; H 0 0 0.734", 0, True),
    "lih": ("Li 0 0 0; H 0 0 1.5475", 0, True),
    "h2o": (h2o_atoms(1.0285, 96.758), 0, True),
    "be": ("Be 0 0 0", 0, True),
    "n2": ("N 0 0 0; N 0 0 1.1", 0, True),
    "co2": ("C 0 0 0; O 0 0 1.16; O 0 0 -1.16", 0, False),
}

SCANS = {
    "h2": ("H 0 0 0; H 0 0 {r}", [0.5, 0.734, 1.0, 1.5, 2.0]),
    "lih": ("Li 0 0 0; H 0 0 {r}", [1.2, 1.5475, 2.0, 2.5, 3.0]),
}


def write(name, atom, spin, run_fci):
    mol = gto.M(atom=atom, basis="sto-3g", spin=spin, verbose=0)
    mf = scf.RHF(mol).run()
    path = os.path.join(OUT, f"{name}.fcidump")
    fcidump.from_scf(mf, path, tol=1e-14)
    info = {"file": f"{name}.fcidump", "hf": mf.e_tot}
    if run_fci:
        info["fci"] = fci.FCI(mf).kernel()[0]
    return info


def main():
    os.makedirs(OUT, exist_ok=True)
    index = {}
    for name, (atom, spin, run_fci) in MOLECULES.items():
        index[name] = write(name, atom, spin, run_fci)
        print(name, index[name])
    for name, (template, lengths) in SCANS.items():
        rows = []
        for r in lengths:
            tag = f"{name}_{r:.4f}"
            info = write(tag, template.format(r=r), 0, True)
            rows.append({"bond_length": r, "path": info["file"]})
            index[tag] = info
            print(tag, info)
        with open(os.path.join(OUT, f"{name}_scan.json"), "w") as fh:
            json.dump(rows, fh, indent=2)
    with open(os.path.join(OUT, "pyscf_energies.json"), "w") as fh:
        json.dump(index, fh, indent=2, sort_keys=True)


if __name__ == "__main__":
    main()
