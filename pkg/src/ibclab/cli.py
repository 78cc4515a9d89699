"""Batch experiment runner: ``ibclab <command> --config cfg.json [--out out.csv]``.

The config is one JSON object. Keys may be given flat (``{"q": 0.9, "n": 200}``)
or grouped (``{"coupling": {"q": 0.9}, "grid": {"n": 200}}``); every key name is
unique across groups. Output is CSV with a header row and shortest round-trip
float formatting, so reruns are byte-identical. On failure a single line
``<ErrorCode>: <detail>`` goes to stderr and the exit status is 2.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from .angular import CouplingConstants, boundary_pairing, boundary_vectors, AngularSector
from .assembly import IbcParams, assemble_operator, build_basis, spectrum, validate_ibc_params
from .errors import ConfigError, IbcError
from .evolution import default_time_step, evolve, project_vacuum
from .nonrel import NonRelParams, nr_assemble, nr_build_basis
from .radial import PhysicalParams, RadialGrid, classify_sector
from .short_distance import (CutoffSpec, ShortDistanceCoeffs, TestFunction, fock_symmetry_defect,
                             ibc_vacuum, predicted_defect, symmetry_defect)

COMMANDS = ("classify", "pairing", "defect", "assemble", "spectrum", "evolve", "nonrel")

GROUPS = {
    "coupling": ("q",),
    "sector": ("m_j", "kappa"),
    "ibc": ("g_re", "g_im", "a1", "a2", "a3", "a4", "vacuum_energy"),
    "grid": ("r_min", "r_max", "n", "n_hats"),
    "cutoff": ("rho1", "rho2", "order"),
    "dynamics": ("dt", "n_steps"),
    "physics": ("mass",),
    "nonrel": ("E0", "nr_mass", "hbar"),
    "classify": ("kappa_max", "q_step"),
    "pairing": ("q_values",),
    "defect": ("n_pairs", "seed"),
}

DEFAULTS = {
    "q": 0.9, "m_j": 0.5, "kappa": 1,
    "g_re": 1.0, "g_im": 0.0, "a1": 1.0, "a2": 0.0, "a3": 0.0, "a4": None,
    "vacuum_energy": 0.0,
    "r_min": 1e-3, "r_max": 10.0, "n": 200, "n_hats": 100,
    "rho1": 0.5, "rho2": 1.5, "order": 3,
    "dt": None, "n_steps": 100,
    "mass": 0.0,
    "E0": 1.0, "nr_mass": 0.5, "hbar": 1.0,
    "kappa_max": 3, "q_step": 0.01,
    "q_values": [0.87, 0.90, 0.95, 0.99],
    "n_pairs": 20, "seed": 0,
    "output_path": None, "command": None,
}


def load_config(doc: dict) -> dict:
    """Flatten grouped keys, apply defaults and reject unknown keys."""
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    flat = {}
    for key, value in doc.items():
        if key in GROUPS and isinstance(value, dict):
            for sub, v in value.items():
                if sub not in GROUPS[key]:
                    raise ConfigError(f"unknown key {key}.{sub}")
                flat[sub] = v
        elif key in DEFAULTS:
            flat[key] = value
        else:
            raise ConfigError(f"unknown key {key}")
    cfg = dict(DEFAULTS)
    cfg.update(flat)
    return cfg


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _write(rows, header, out) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    out.write(buf.getvalue())


def _coupling(cfg) -> CouplingConstants:
    return CouplingConstants(float(cfg["q"]))


def _ibc_params(cfg, c: CouplingConstants) -> IbcParams:
    a4 = cfg["a4"]
    if a4 is None:
        # complete the constraint from the other three
        a4 = (c.pairing_constant + cfg["a2"] * cfg["a3"]) / cfg["a1"] if cfg["a1"] else 0.0
    params = IbcParams(complex(cfg["g_re"], cfg["g_im"]), float(cfg["a1"]), float(cfg["a2"]),
                       float(cfg["a3"]), float(a4), float(cfg["vacuum_energy"]))
    validate_ibc_params(params, c)
    return params


def _system(cfg):
    c = _coupling(cfg)
    sector = AngularSector(int(cfg["kappa"]), float(cfg["m_j"]))
    params = _ibc_params(cfg, c)
    grid = RadialGrid(float(cfg["r_min"]), float(cfg["r_max"]), int(cfg["n"]))
    cut = CutoffSpec(float(cfg["rho1"]), float(cfg["rho2"]), int(cfg["order"]))
    basis = build_basis(grid, c, params, cut, int(cfg["n_hats"]), kappa=sector.kappa)
    phys = PhysicalParams(mass=float(cfg["mass"]))
    return assemble_operator(basis, c, phys, params), cut, grid


def cmd_classify(cfg):
    step = float(cfg["q_step"])
    rows = []
    for kappa in range(1, int(cfg["kappa_max"]) + 1):
        n = int(round(kappa / step))
        for k in range(n):
            q = round(k * step, 12)
            rows.append((kappa, q, classify_sector(kappa, q).value))
    return ["kappa", "q", "verdict"], rows


def cmd_pairing(cfg):
    rows = []
    for q in cfg["q_values"]:
        c = CouplingConstants(float(q))
        fp, fm = boundary_vectors(c, int(cfg["kappa"]))
        rows.append((c.q, c.B, boundary_pairing(fp, fp).real, boundary_pairing(fm, fm).real,
                     boundary_pairing(fm, fp).real, boundary_pairing(fp, fm).real,
                     -c.pairing_constant))
    return ["q", "B", "pair_plus_plus", "pair_minus_minus", "pair_minus_plus",
            "pair_plus_minus", "expected_minus_plus"], rows


def cmd_defect(cfg):
    c = _coupling(cfg)
    params = _ibc_params(cfg, c)
    cut = CutoffSpec(float(cfg["rho1"]), float(cfg["rho2"]), int(cfg["order"]))
    phys = PhysicalParams(mass=float(cfg["mass"]))
    kappa = int(cfg["kappa"])
    seed = int(cfg["seed"])
    rng = np.random.default_rng(seed)
    rows = []
    for i in range(int(cfg["n_pairs"])):
        z = rng.standard_normal(8)
        cf = ShortDistanceCoeffs(complex(z[0], z[1]), complex(z[2], z[3]))
        d = ShortDistanceCoeffs(complex(z[4], z[5]), complex(z[6], z[7]))
        psi, phi = TestFunction(c, cf, cut, kappa), TestFunction(c, d, cut, kappa)
        one = symmetry_defect(phi, psi, c, phys)
        fock = fock_symmetry_defect(ibc_vacuum(d, params), phi, ibc_vacuum(cf, params), psi,
                                    params, c, phys)
        pred = predicted_defect(d, cf, c)
        rows.append((seed, i, cf.c_minus.real, cf.c_minus.imag, cf.c_plus.real, cf.c_plus.imag,
                     d.c_minus.real, d.c_minus.imag, d.c_plus.real, d.c_plus.imag,
                     one.real, one.imag, pred.real, pred.imag, fock.real, fock.imag))
    header = ["seed", "pair", "c_minus_re", "c_minus_im", "c_plus_re", "c_plus_im",
              "d_minus_re", "d_minus_im", "d_plus_re", "d_plus_im", "defect_re", "defect_im",
              "predicted_re", "predicted_im", "fock_defect_re", "fock_defect_im"]
    return header, rows


def cmd_assemble(cfg):
    sys_, _, _ = _system(cfg)
    H = sys_.H
    rows = [
        ("basis_size", sys_.size),
        ("hermiticity_defect", sys_.hermiticity_defect),
        ("H_max_abs", sys_.h_norm),
        ("S_min_eig", sys_.s_min_eig),
        ("S_cond", sys_.s_cond),
        ("coupling_bc_plus_re", H[0, 1].real),
        ("coupling_bc_plus_im", H[0, 1].imag),
        ("vacuum_row_norm", float(np.linalg.norm(H[0, 1:]))),
    ]
    return ["quantity", "value"], rows


def cmd_spectrum(cfg):
    sys_, _, _ = _system(cfg)
    return ["index", "E"], list(enumerate(spectrum(sys_)))


def _evolve_rows(sys_, traj, lo, hi):
    o = traj.observables
    return [(t, p0, p1, n2, a.real, a.imag, b.real, b.imag)
            for t, p0, p1, n2, a, b in zip(o["t"], o["P0"], o["P1"], o["norm2"], o[lo], o[hi])]


def cmd_evolve(cfg):
    sys_, cut, grid = _system(cfg)
    dt = cfg["dt"] if cfg["dt"] is not None else default_time_step(sys_)
    traj = evolve(sys_, project_vacuum(sys_), float(dt), int(cfg["n_steps"]),
                  wall_time=grid.r_max - cut.rho2)
    header = ["t", "P0", "P1", "norm2", "c_minus_re", "c_minus_im", "c_plus_re", "c_plus_im"]
    return header, _evolve_rows(sys_, traj, "c_minus", "c_plus")


def cmd_nonrel(cfg):
    p = NonRelParams(complex(cfg["g_re"], cfg["g_im"]), float(cfg["E0"]), float(cfg["nr_mass"]),
                     float(cfg["hbar"]))
    grid = RadialGrid(float(cfg["r_min"]), float(cfg["r_max"]), int(cfg["n"]))
    cut = CutoffSpec(float(cfg["rho1"]), float(cfg["rho2"]), int(cfg["order"]))
    sys_ = nr_assemble(nr_build_basis(grid, p, cut, int(cfg["n_hats"])), p)
    dt = cfg["dt"] if cfg["dt"] is not None else default_time_step(sys_)
    traj = evolve(sys_, project_vacuum(sys_), float(dt), int(cfg["n_steps"]))
    header = ["t", "P0", "P1", "norm2", "c_minus1_re", "c_minus1_im", "c_0_re", "c_0_im"]
    return header, _evolve_rows(sys_, traj, "c_minus1", "c_0")


HANDLERS = {
    "classify": cmd_classify,
    "pairing": cmd_pairing,
    "defect": cmd_defect,
    "assemble": cmd_assemble,
    "spectrum": cmd_spectrum,
    "evolve": cmd_evolve,
    "nonrel": cmd_nonrel,
}


def run(command: str, doc: dict, out_path: str | None = None, stdout=None) -> None:
    cfg = load_config(doc)
    if cfg["command"] not in (None, command):
        raise ConfigError(f"config is for {cfg['command']!r}, not {command!r}")
    header, rows = HANDLERS[command](cfg)
    path = out_path or cfg["output_path"]
    if path:
        with open(path, "w", newline="") as fh:
            _write(rows, header, fh)
    else:
        _write(rows, header, stdout or sys.stdout)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="ibclab", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="JSON config file")
    parser.add_argument("--out", default=None, help="CSV output path (default: output_path or stdout)")
    args = parser.parse_args(argv)
    try:
        try:
            with open(args.config) as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(str(exc)) from exc
        run(args.command, doc, args.out)
    except IbcError as exc:
        print(f"{exc.code}: {exc}", file=sys.stderr)
        return 2
    except (ValueError, TypeError, KeyError) as exc:
        print(f"{ConfigError.code}: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
