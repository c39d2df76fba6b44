"""Command-line front end: ``vibronic spectrum | decompose | verify``."""

from __future__ import annotations

import argparse
import io
import json
import sys
from typing import Optional, Sequence

import jsonschema
import numpy as np

from . import verify as verify_mod
from .config import ENV_PREFIX, RunConfig, from_env
from .doktorov import MolecularParams, doktorov_transform, duschinsky_params
from .errors import CostGuardError, VibronicError, ValidationError
from .extension import ThermalSpec, build_extended, synthesize_vibronic_prep
from .gaussian import bloch_messiah, max_entry_difference, validate
from .spectrum import aligned, fcp_direct, fcp_extended

EXIT_OK, EXIT_INPUT, EXIT_GUARD, EXIT_MISMATCH = 0, 2, 3, 4


class InputError(ValidationError):
    pass


_NUM_ARRAY = {"type": "array", "items": {"type": "number"}}

MOLECULE_SCHEMA = {
    "type": "object",
    "required": ["modes", "omega", "omega_prime", "duschinsky", "displacement", "units"],
    "additionalProperties": False,
    "properties": {
        "modes": {"type": "integer", "minimum": 1},
        "omega": _NUM_ARRAY,
        "omega_prime": _NUM_ARRAY,
        "duschinsky": {"type": "array", "items": _NUM_ARRAY},
        "displacement": _NUM_ARRAY,
        "units": {"enum": ["cm-1", "dimensionless"]},
        "temperature_K": {"type": "number", "minimum": 0},
        "nbar": _NUM_ARRAY,
        "adiabatic_offset": {"type": "number"},
        "reference_frequency": {"type": "number", "exclusiveMinimum": 0},
    },
}


def parse_molecule(text: str, source: str = "<input>") -> MolecularParams:
    """Parse a JSON molecule document; every failure becomes :class:`InputError`."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{source}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    try:
        jsonschema.validate(doc, MOLECULE_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "(root)"
        raise InputError(f"{source}: {where}: {exc.message}") from None
    M = doc["modes"]
    for key in ("omega", "omega_prime", "displacement", "nbar"):
        if key in doc and len(doc[key]) != M:
            raise InputError(f"{source}: {key} has {len(doc[key])} entries, modes = {M}")
    if len(doc["duschinsky"]) != M or any(len(row) != M for row in doc["duschinsky"]):
        raise InputError(f"{source}: duschinsky must be {M}x{M}")
    try:
        return MolecularParams(
            omega=doc["omega"],
            omega_prime=doc["omega_prime"],
            duschinsky_U=np.array(doc["duschinsky"], dtype=float),
            displacement_d=doc["displacement"],
            temperature=float(doc.get("temperature_K", 0.0)),
            nbar=doc.get("nbar"),
            adiabatic_offset=float(doc.get("adiabatic_offset", 0.0)),
            units=doc["units"],
            reference_frequency=doc.get("reference_frequency"),
        )
    except ValidationError as exc:
        raise InputError(f"{source}: {exc}") from None


def load_molecule(path: str) -> MolecularParams:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    return parse_molecule(text, path)


def _fmt(x) -> str:
    return "%.17g" % x


def spectrum_csv(mol: MolecularParams, config: RunConfig, route: str = "direct") -> tuple:
    """CSV text for the requested route(s) and the route difference (0 unless ``both``)."""
    kw = dict(cutoff=config.cutoff, epsilon=config.epsilon, bin_width=config.bin_width, tol=config.tolerance)
    kw.update(config.fock_kwargs)
    spectra = []
    if route in ("direct", "both"):
        spectra.append(fcp_direct(mol, workers=config.threads, **kw))
    if route in ("extended", "both"):
        spectra.append(fcp_extended(mol, **kw))
    centers, cols = aligned(*spectra)
    first = spectra[0]
    out = io.StringIO()
    out.write(f"# route={route}\n")
    out.write(f"# units={mol.units}\n")
    out.write(f"# cutoff={config.cutoff}\n")
    out.write(f"# captured_probability={_fmt(first.captured_probability)}\n")
    if route == "both":
        out.write(f"# captured_probability_extended={_fmt(spectra[1].captured_probability)}\n")
    out.write(f"# bin_width={_fmt(first.bin_width)}\n")
    out.write(f"# epsilon={_fmt(config.epsilon)}\n")
    out.write(f"# ensemble_size={first.metadata['ensemble_size']}\n")
    out.write(f"# ensemble_coverage={_fmt(first.metadata['ensemble_coverage'])}\n")
    out.write("omega_v_bin_center,intensity" + (",intensity_extended" if route == "both" else "") + "\n")
    for i, c in enumerate(centers):
        out.write(",".join(_fmt(v) for v in [c] + [col[i] for col in cols]) + "\n")
    diff = float(np.max(np.abs(cols[0] - cols[1]))) if route == "both" and centers.size else 0.0
    return out.getvalue(), diff


def _mat(name: str, A, indent: str = "") -> str:
    body = np.array2string(np.asarray(A), precision=10, suppress_small=True, max_line_width=120)
    return f"{indent}{name} =\n" + "\n".join(indent + "  " + line for line in body.splitlines())


def decompose_report(mol: MolecularParams, config: RunConfig) -> str:
    p = duschinsky_params(mol)
    T = doktorov_transform(p)
    res = validate(T)
    f = bloch_messiah(T, config.tolerance)
    lines = [
        f"modes = {mol.mode_count}, units = {mol.units}, reference_frequency = {mol.reference_frequency:.10g}",
        _mat("J", p.J),
        _mat("delta", p.delta),
        _mat("X", T.X),
        _mat("Y", T.Y),
        _mat("z", T.z),
        f"constraint residuals: symplectic = {res.symplectic:.3e}, symmetric = {res.symmetric:.3e}",
        "Bloch-Messiah factors:",
        _mat("sigma", f.sigma, "  "),
        _mat("U_L", f.U_L, "  "),
        _mat("U_R", f.U_R, "  "),
        f"  reconstruction error = {max_entry_difference(f.reconstruct(), T):.3e}",
    ]
    nbar = mol.thermal_nbar()
    if np.any(nbar > 0):
        ext = build_extended(T, ThermalSpec.from_nbar(nbar), config.tolerance)
        prep = synthesize_vibronic_prep(ext, config.tolerance)
        eres = validate(ext.transform)
        lines += [
            f"thermal input ({2 * mol.mode_count}-mode preparation):",
            _mat("nbar", nbar, "  "),
            _mat("s", prep.squeeze_params, "  "),
            _mat("gamma''", prep.gamma_dprime, "  "),
            _mat("C_L", prep.interferometer, "  "),
            f"  constraint residuals: symplectic = {eres.symplectic:.3e}, symmetric = {eres.symmetric:.3e}",
            f"  reconstruction error = {max_entry_difference(prep.factors.reconstruct(), ext.transform):.3e}",
        ]
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vibronic",
        description="Vibronic spectra through Gaussian boson sampling circuits.",
        epilog=f"RunConfig fields may be overridden with {ENV_PREFIX}<FIELD> environment variables, "
        f"e.g. {ENV_PREFIX}CUTOFF=12 or {ENV_PREFIX}THREADS=4.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("spectrum", help="compute a binned Franck-Condon profile as CSV")
    sp.add_argument("file")
    sp.add_argument("--route", choices=["direct", "extended", "both"], default="direct")
    sp.add_argument("--cutoff", type=int)
    sp.add_argument("--bin-width", type=float)
    sp.add_argument("--epsilon", type=float)
    sp.add_argument("--threads", type=int)
    sp.add_argument("--out", help="write CSV here instead of stdout")

    dp = sub.add_parser("decompose", help="report the transform, its factors and the thermal preparation")
    dp.add_argument("file")

    vp = sub.add_parser("verify", help="run the randomized invariant suites")
    vp.add_argument("--seed", type=int, default=0)
    vp.add_argument("--tolerance", type=float)
    return parser


def _run(args, stdout, stderr) -> int:
    if args.command == "spectrum":
        config = from_env(
            cutoff=args.cutoff, bin_width=args.bin_width, epsilon=args.epsilon, threads=args.threads
        )
        mol = load_molecule(args.file)
        text, diff = spectrum_csv(mol, config, args.route)
        if args.out:
            with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        else:
            stdout.write(text)
        if diff > config.route_tolerance:
            stderr.write(f"route mismatch: max bin difference {diff:.3e} exceeds {config.route_tolerance:.1e}\n")
            return EXIT_MISMATCH
        return EXIT_OK
    if args.command == "decompose":
        config = from_env()
        stdout.write(decompose_report(load_molecule(args.file), config))
        return EXIT_OK
    config = from_env(tolerance=args.tolerance)
    results = verify_mod.run_all(config, args.seed)
    stdout.write(f"seed = {args.seed}\n")
    for r in results:
        stdout.write(r.line() + "\n")
    return EXIT_OK if all(r.passed for r in results) else EXIT_MISMATCH


def main(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        return _run(args, stdout, stderr)
    except CostGuardError as exc:
        stderr.write(f"cost guard {exc.guard}: {exc}\n")
        return EXIT_GUARD
    except ValidationError as exc:
        stderr.write(f"input error: {exc}\n")
        return EXIT_INPUT
    except VibronicError as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_MISMATCH


if __name__ == "__main__":
    sys.exit(main())
