#!/usr/bin/env python3
"""Regenerate the committed FCIDUMP fixtures and their JSON sidecars.

Requires pyscf. The C++ test suite only reads the committed output, so this
script is needed only when adding or changing a system.

    python3 fixtures/generate_fixtures.py [--only NAME ...]

Conventions:
  * ORBSYM values are pyscf irrep ids + 1; (a-1) XOR (b-1) gives the product
    irrep, 0 is totally symmetric.
  * Integrals cover every orbital; the manifest records how many core orbitals
    the C++ side should freeze. lih_1.595_fc_eff is the exception: its core is
    already folded into effective integrals.
  * eps_spin interleaves alpha/beta Fock diagonals (spin orbital 2p+s).
  * e_fci is the lowest root in the reference's (n_alpha, n_beta, irrep)
    sector of the active space.
"""
import argparse
import json
import math
import os

import numpy as np
from pyscf import ao2mo, fci, gto, mcscf, scf

HERE = os.path.dirname(os.path.abspath(__file__))

# trans-diazene equilibrium structure (r_e values, Demaison et al. 1997)
N2H2_R_NN = 1.247
N2H2_R_NH = 1.029
N2H2_A_NNH = 106.3


def n2h2_atoms(rotation_deg):
    """Rigid rotation about the N=N axis; 0 deg is trans, 180 deg is cis."""
    half = N2H2_R_NN / 2.0
    polar = math.radians(180.0 - N2H2_A_NNH)
    rho = N2H2_R_NH * math.sin(polar)
    dz = N2H2_R_NH * math.cos(polar)
    phi1 = 0.0
    phi2 = math.pi - math.radians(rotation_deg)
    h1 = (rho * math.cos(phi1), rho * math.sin(phi1), half + dz)
    h2 = (rho * math.cos(phi2), rho * math.sin(phi2), -half - dz)
    return [("N", (0.0, 0.0, half)), ("N", (0.0, 0.0, -half)),
            ("H", h1), ("H", h2)]


def ch2_atoms(r, angle_deg):
    a = math.radians(angle_deg / 2.0)
    return [("C", (0.0, 0.0, 0.0)),
            ("H", (r * math.sin(a), 0.0, r * math.cos(a))),
            ("H", (-r * math.sin(a), 0.0, r * math.cos(a)))]


def diatomic(a, b, r):
    return [(a, (0.0, 0.0, 0.0)), (b, (0.0, 0.0, r))]


def systems():
    out = []
    out.append(dict(name="h2_0.74", atoms=diatomic("H", "H", 0.74),
                    group="D2h", spin=0, frozen=0, geometry={"r": 0.74}))
    for r in (0.995, 1.395, 1.595, 1.795, 2.195):
        out.append(dict(name=f"lih_{r:.3f}", atoms=diatomic("Li", "H", r),
                        group="C2v", spin=0, frozen=0, geometry={"r": r}))
    out.append(dict(name="lih_1.595_fc_eff", atoms=diatomic("Li", "H", 1.595),
                    group="C2v", spin=0, frozen=0, geometry={"r": 1.595},
                    fold_core=1))
    for r in (1.06, 1.08, 1.10, 1.12, 1.14, 1.16, 1.18):
        out.append(dict(name=f"ch2_triplet_135_{r:.2f}", atoms=ch2_atoms(r, 135.0),
                        group="C2v", spin=2, frozen=1,
                        geometry={"r": r, "angle": 135.0}))
    for r in (0.9, 1.1, 1.3, 1.5, 1.7, 1.9):
        out.append(dict(name=f"n2_{r:.1f}", atoms=diatomic("N", "N", r),
                        group="D2h", spin=0, frozen=2, geometry={"r": r}))
    for ang in (0, 90):
        out.append(dict(name=f"n2h2_A_{ang}", atoms=n2h2_atoms(ang), group=None,
                        spin=0, frozen=4, geometry={"rotation": ang}))
    # B is a C2 label; only the twisted geometry has C2 as its full group.
    out.append(dict(name="n2h2_B_90", atoms=n2h2_atoms(90), group=None,
                    spin=2, frozen=4, geometry={"rotation": 90},
                    open_irreps="B"))
    return out


def build_mol(sysdef):
    mol = gto.Mole()
    mol.atom = [(a, c) for a, c in sysdef["atoms"]]
    mol.basis = "sto-3g"
    mol.spin = sysdef["spin"]
    mol.unit = "Angstrom"
    if sysdef["group"] is None:
        mol.symmetry = True
    else:
        mol.symmetry = sysdef["group"]
    mol.verbose = 0
    mol.build()
    return mol


def run_scf(mol, sysdef):
    if sysdef["spin"] == 0:
        mf = scf.RHF(mol)
    else:
        mf = scf.ROHF(mol)
    mf.conv_tol = 1e-12
    mf.max_cycle = 200
    mf.kernel()
    if sysdef.get("open_irreps") and sysdef["spin"] > 0:
        # Steer the open shells into the requested total irrep (e.g. B of C2).
        target = sysdef["open_irreps"]
        best = None
        for guess in _open_shell_guesses(mol, mf):
            mf2 = scf.ROHF(mol)
            mf2.conv_tol = 1e-12
            mf2.max_cycle = 300
            mf2.irrep_nelec = guess
            mf2.kernel()
            if not mf2.converged:
                continue
            if _open_shell_irrep(mol, mf2) != target:
                continue
            if best is None or mf2.e_tot < best.e_tot:
                best = mf2
        if best is None:
            raise RuntimeError(f"no ROHF solution of symmetry {target}")
        mf = best
    if not mf.converged:
        raise RuntimeError("SCF did not converge")
    return mf


def _open_shell_guesses(mol, mf):
    labels = mol.irrep_name
    orbsym = scf.hf_symm.get_orbsym(mol, mf.mo_coeff)
    nalpha = (mol.nelectron + mol.spin) // 2
    nbeta = (mol.nelectron - mol.spin) // 2
    guesses = []
    # alpha/beta counts per irrep: close nbeta lowest, then try open-shell pairs
    order = np.argsort(mf.mo_energy)
    beta_orbs = list(order[:nbeta])
    rest = list(order[nbeta:nbeta + 6])
    for a in range(len(rest)):
        for b in range(a + 1, len(rest)):
            alpha_orbs = beta_orbs + [rest[a], rest[b]]
            if len(alpha_orbs) != nalpha:
                continue
            g = {}
            for idx, name in zip(mol.irrep_id, labels):
                na = sum(1 for o in alpha_orbs if orbsym[o] == idx)
                nb = sum(1 for o in beta_orbs if orbsym[o] == idx)
                g[name] = (na, nb)
            guesses.append(g)
    return guesses


def _open_shell_irrep(mol, mf):
    orbsym = scf.hf_symm.get_orbsym(mol, mf.mo_coeff)
    sym = 0
    for o, occ in enumerate(mf.mo_occ):
        if abs(occ - 1.0) < 1e-8:
            sym ^= int(orbsym[o])
    return mol.irrep_name[list(mol.irrep_id).index(sym)]


def spin_fock_diagonals(mf):
    c = mf.mo_coeff
    f = mf.get_fock()
    if isinstance(mf, scf.rohf.ROHF):
        fa, fb = f.focka, f.fockb
    else:
        fa = fb = f
    ea = np.einsum("pi,pq,qi->i", c, fa, c)
    eb = np.einsum("pi,pq,qi->i", c, fb, c)
    out = []
    for a, b in zip(ea, eb):
        out.extend([float(a), float(b)])
    return out


def write_fcidump(path, h1, eri, ecore, norb, nelec, ms2, orbsym):
    with open(path, "w") as f:
        f.write(f" &FCI NORB={norb},NELEC={nelec},MS2={ms2},\n")
        f.write("  ORBSYM=" + ",".join(str(s + 1) for s in orbsym) + ",\n")
        f.write("  ISYM=1,\n &END\n")
        tol = 1e-14
        for p in range(norb):
            for q in range(p + 1):
                pq = p * (p + 1) // 2 + q
                for r in range(norb):
                    for s in range(r + 1):
                        rs = r * (r + 1) // 2 + s
                        if rs > pq:
                            continue
                        v = eri[pq, rs]
                        if abs(v) > tol:
                            f.write(f"{v: .16e} {p+1:4d} {q+1:4d} {r+1:4d} {s+1:4d}\n")
        for p in range(norb):
            for q in range(p + 1):
                if abs(h1[p, q]) > tol:
                    f.write(f"{h1[p, q]: .16e} {p+1:4d} {q+1:4d}    0    0\n")
        f.write(f"{ecore: .16e}    0    0    0    0\n")


def generate(sysdef):
    mol = build_mol(sysdef)
    mf = run_scf(mol, sysdef)
    c = mf.mo_coeff
    orbsym = [int(s) for s in scf.hf_symm.get_orbsym(mol, c)]
    norb = c.shape[1]
    nalpha = (mol.nelectron + mol.spin) // 2
    nbeta = (mol.nelectron - mol.spin) // 2
    # Aufbau consistency: occupations must be a prefix in the file ordering
    occ = mf.mo_occ
    assert all(occ[i] >= occ[i + 1] - 1e-8 for i in range(norb - 1)), occ

    ref_irrep = 0
    for o in range(norb):
        if abs(occ[o] - 1.0) < 1e-8:
            ref_irrep ^= orbsym[o]

    fold = sysdef.get("fold_core", 0)
    frozen = sysdef["frozen"]
    ncore = fold if fold else frozen
    ncas = norb - ncore
    nelecas = (nalpha - ncore, nbeta - ncore)

    cas = mcscf.CASCI(mf, ncas, nelecas)
    cas.fcisolver = fci.direct_spin1_symm.FCI(mol)
    cas.fcisolver.wfnsym = ref_irrep
    cas.fcisolver.spin = nelecas[0] - nelecas[1]
    cas.fcisolver.conv_tol = 1e-12
    cas.fcisolver.nroots = 1
    cas.verbose = 0
    cas.kernel()
    e_fci = float(cas.e_tot)

    if fold:
        h1, ecore = cas.get_h1eff()
        eri = ao2mo.restore(4, cas.get_h2eff(), ncas)
        write_norb, write_nelec = ncas, sum(nelecas)
        write_sym = orbsym[ncore:]
        eps = spin_fock_diagonals(mf)[2 * ncore:]
        write_frozen = 0
    else:
        h1 = c.T @ mf.get_hcore() @ c
        eri = ao2mo.restore(4, ao2mo.kernel(mol, c), norb)
        ecore = mol.energy_nuc()
        write_norb, write_nelec = norb, mol.nelectron
        write_sym = orbsym
        eps = spin_fock_diagonals(mf)
        write_frozen = frozen

    name = sysdef["name"]
    write_fcidump(os.path.join(HERE, name + ".FCIDUMP"), h1, eri, ecore,
                  write_norb, write_nelec, mol.spin, write_sym)
    sidecar = {
        "system": name,
        "geometry": sysdef["geometry"],
        "atoms": [[a, list(xyz)] for a, xyz in sysdef["atoms"]],
        "basis": "sto-3g",
        "point_group": mol.groupname,
        "ms2": mol.spin,
        "n_orb": write_norb,
        "n_elec": write_nelec,
        "frozen": write_frozen,
        "reference_irrep": ref_irrep,
        "e_hf": float(mf.e_tot),
        "eps_spin": eps,
        "e_fci": e_fci,
    }
    with open(os.path.join(HERE, name + ".json"), "w") as f:
        json.dump(sidecar, f, indent=2)
    return sidecar


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--only", nargs="*")
    args = ap.parse_args()
    manifest = []
    for sysdef in systems():
        if args.only and sysdef["name"] not in args.only:
            continue
        try:
            side = generate(sysdef)
        except RuntimeError as err:
            print(f"{sysdef['name']}: skipped ({err})")
            manifest.append({"system": sysdef["name"], "skipped": str(err)})
            continue
        print(f"{side['system']:24s} {side['point_group']:4s} norb={side['n_orb']:2d} "
              f"E_HF={side['e_hf']:.10f} E_FCI={side['e_fci']:.10f}")
        manifest.append({"system": side["system"], "fcidump": side["system"] + ".FCIDUMP",
                         "sidecar": side["system"] + ".json", "frozen": side["frozen"],
                         "ms2": side["ms2"], "geometry": side["geometry"]})
    if not args.only:
        with open(os.path.join(HERE, "manifest.json"), "w") as f:
            json.dump(manifest, f, indent=2)


if __name__ == "__main__":
    main()
