"""Command-line entry point ``spectral-shapes``.

Exit status is 0 iff every audit or check run by the command passes.
"""

import argparse
import logging
import sys
from pathlib import Path

from . import report
from .experiments import (
    ExperimentConfig,
    corpus_measure,
    density_theorem_sweep,
    measure_from_csv,
    run_bounds_sweep,
    run_machinery_suite,
    run_sharpness,
)
from .folding import FoldingError, folded_rayleigh_bound, rearranged, strictness_margin
from .geometry import read_domain_file
from .hersch import as_psi, center_of_mass, renormalize
from .inertia import CapSearchError, anisotropy_landscape_csv, find_multiple_cap, inertia_form
from .moebius import d, pushforward
from .spectral import NEUMANN_DEGREE, STEKLOV_DEGREE, neumann_spectrum, steklov_spectrum

log = logging.getLogger("spectral_shapes")

PSI_FOR = {"steklov": "id", "neumann": "bessel"}


def _config(args):
    cfg = ExperimentConfig.from_file(args.config) if args.config else ExperimentConfig()
    if args.seed is not None:
        cfg.seed = args.seed
    return cfg


def _out(args):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _domain(args):
    if not args.domain:
        raise SystemExit("--domain <spec file> is required")
    return read_domain_file(args.domain)


def cmd_solve(args):
    spec = _domain(args)
    out = _out(args)
    rows = []
    problems = ("neumann", "steklov") if args.problem == "both" else (args.problem,)
    for prob in problems:
        if prob == "neumann":
            s = neumann_spectrum(spec.map, spec.density, args.degree or NEUMANN_DEGREE)
        else:
            s = steklov_spectrum(spec.map, spec.density, args.degree or STEKLOV_DEGREE)
        m = s.meta["mass"]
        for k, v in enumerate(s.values[: args.k + 1]):
            rows.append([prob, k, float(v), float(v) * m])
    header = ["problem", "k", "eigenvalue", "eigenvalue*M"]
    (out / f"{spec.name}_spectrum.csv").write_text(report.to_csv(header, rows))
    print(report.to_markdown(header, rows, f"Spectrum of {spec.name}"))
    return 0


def cmd_bounds_sweep(args):
    cfg = _config(args)
    out = _out(args)
    res = run_bounds_sweep(cfg)
    res.write(out)
    ok = res.passed
    if cfg.density == "const:1":
        dens = density_theorem_sweep(cfg)
        dens.write(out, stem="bounds_density")
        ok &= dens.passed
    n_bad = sum(not r.passed for r in res.rows)
    print(f"bound audit: {len(res.rows)} domains, {n_bad} with violations -> {out / 'bounds.md'}")
    if not ok:
        print("a bound violation is a numerical defect of this computation, not a counterexample",
              file=sys.stderr)
    return 0 if ok else 1


def cmd_sharpness(args):
    cfg = _config(args)
    out = _out(args)
    res = run_sharpness(cfg)
    res.write(out, L=cfg.passage_L)
    for w in res.warnings:
        print("warning:", w, file=sys.stderr)
    ok = all(r[5] < 1 for r in res.overlap) and all(r[5] < 1 for r in res.passage)
    print(f"sharpness sweep written to {out / 'sharpness.md'}")
    return 0 if ok else 1


def cmd_hersch(args):
    if not args.measure:
        raise SystemExit("--measure <csv> is required")
    nu = measure_from_csv(args.measure)
    psi = as_psi(args.psi or "id")
    xi = renormalize(nu, psi)
    pushed = pushforward(d(xi), nu)
    res = abs(center_of_mass(pushed, psi))
    out = _out(args)
    pushed.to_csv(out / "renormalized.csv")
    print(f"xi = {report.fmt(complex(xi))}")
    print(f"residual = {res:.3e}")
    return 0 if res <= 1e-10 else 1


def _parse_cap(text):
    l, p = (float(v) for v in text.split(","))
    return l, p


def cmd_fold_demo(args):
    spec = _domain(args)
    if not args.cap:
        raise SystemExit("--cap l,p_angle is required")
    prob = "steklov" if args.problem == "both" else args.problem
    psi = as_psi(args.psi or PSI_FOR[prob])
    nu = corpus_measure(spec, prob)
    out = _out(args)
    try:
        R = rearranged(nu, _parse_cap(args.cap), psi)
    except FoldingError as exc:
        print(f"folding failed: {exc}", file=sys.stderr)
        return 1
    R.folded.to_csv(out / "folded.csv")
    R.measure.to_csv(out / "rearranged.csv")
    sc = strictness_margin(R.map, 1.0, psi)
    bound = folded_rayleigh_bound(nu, None, psi, zeta=R.measure)
    print(f"mass: {nu.mass():.12g} -> {R.measure.mass():.12g}")
    print(f"folded energy {sc.folded_energy:.12g}, harmonic extension {sc.harmonic_energy:.12g}, "
          f"margin {sc.margin:.3e}")
    print(f"Rayleigh bound from the rearranged measure: {bound:.12g}")
    return 0 if sc.margin > 0 else 1


def cmd_cap_search(args):
    spec = _domain(args)
    prob = "steklov" if args.problem == "both" else args.problem
    psi = as_psi(args.psi or PSI_FOR[prob])
    nu = corpus_measure(spec, prob)
    out = _out(args)
    try:
        res = find_multiple_cap(nu, psi)
    except CapSearchError as exc:
        print(f"cap search failed: {exc}", file=sys.stderr)
        return 1
    if res.trivial:
        print("measure is already multiple after renormalisation; no cap needed")
    else:
        print(f"cap l = {res.l:.12g}, p = {res.p_angle:.12g}, "
              f"anisotropy/trace = {res.relative_anisotropy:.3e}")
        if res.landscape is not None:
            (out / "anisotropy_landscape.csv").write_text(anisotropy_landscape_csv(res))
    q = inertia_form(nu, psi)
    print(f"input anisotropy/trace = {q.anisotropy / q.trace:.6g}")
    return 0


def cmd_suite(args):
    cfg = _config(args)
    out = _out(args)
    rep = run_machinery_suite(cfg)
    rep.write(out)
    n_fail = sum(not c.passed for c in rep.checks)
    print(f"suite (seed {cfg.seed}): {len(rep.checks) - n_fail}/{len(rep.checks)} checks passed")
    if n_fail:
        print(f"failing cases serialized under {out / 'failures'}", file=sys.stderr)
    return 0 if rep.passed else 1


COMMANDS = {
    "solve": cmd_solve,
    "bounds-sweep": cmd_bounds_sweep,
    "sharpness": cmd_sharpness,
    "hersch": cmd_hersch,
    "fold-demo": cmd_fold_demo,
    "cap-search": cmd_cap_search,
    "suite": cmd_suite,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="spectral-shapes",
                                     description="Low Neumann and Steklov eigenvalues of planar domains.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="key=value experiment config")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--domain", help="domain spec file (kind/coeffs/density)")
        p.add_argument("--problem", choices=("neumann", "steklov", "both"), default="both")
        p.add_argument("--measure", help="measure CSV (re,im,weight,part)")
        p.add_argument("--psi", choices=("id", "bessel"))
        p.add_argument("--cap", help="cap as l,p_angle")
        p.add_argument("--degree", type=int)
        p.add_argument("-k", type=int, default=8, help="eigenvalues to print")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return COMMANDS[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
