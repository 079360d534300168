"""Batch front end: kernel spec files in, JSON/CSV reports out.

Kernel spec schema (version "1"):

    {"schema": "1", "type": "quasi_carleman", "v0": 1.0, "q": 1.0,
     "alpha": 0.0, "r": 0.0}
    {"schema": "1", "type": "finite_rank",
     "terms": [{"coeffs": [[re, im], ...], "beta": [re, im]}]}
    {"schema": "1", "type": "sum", "parts": [ ... ]}

Commands: sigma, predict, verify {identity|galerkin|factorization|witness},
certificate, sweep.  Exit codes: 0 success, 2 validation/precondition
failure, 3 numerical tolerance failure.  HS_LOG sets the log level.

Run as ``python -m hankelsigma <command> ...``.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import csv
import json
import logging
import os
import sys
import time

import numpy as np

from . import __version__
from .form import ExpPoly, identity_residual, min_monomial_order, spectral_witnesses
from .galerkin import assemble, certificate, stabilized_negcount
from .kernel import (Classification, FiniteRankTerm, Kernel, QuasiCarlemanTerm,
                     UndefinableKernelError, classify)
from .predict import (AssumptionViolation, IntegerExponentError,
                      predict_finite_rank, predict_perturbed,
                      predict_quasi_carleman)
from .sigma import RegularizedPower, DeltaCombo, sigma_of_kernel
from .special import laguerre_e, laguerre_image
from .transform import DEFAULT_GRID, GridFunction, laplace_via_mellin

log = logging.getLogger("hankelsigma")

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_TOLERANCE = 3

SCHEMA = "1"


class SpecError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Kernel spec parsing
# ---------------------------------------------------------------------------

def _parse_complex(v):
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(v[0], v[1])
    raise SpecError("complex numbers are [re, im] pairs, got %r" % (v,))


def parse_kernel(doc):
    """Parse a kernel-spec JSON document into a validated Kernel."""
    if not isinstance(doc, dict):
        raise SpecError("kernel spec must be a JSON object")
    if str(doc.get("schema", SCHEMA)) != SCHEMA:
        raise SpecError("unsupported schema %r" % doc.get("schema"))
    ktype = doc.get("type")
    if ktype == "quasi_carleman":
        try:
            term = QuasiCarlemanTerm(float(doc["v0"]), float(doc["q"]),
                                     float(doc.get("alpha", 0.0)),
                                     float(doc.get("r", 0.0)))
        except (KeyError, ValueError) as exc:
            raise SpecError("bad quasi_carleman spec: %s" % exc) from exc
        return Kernel((term,))
    if ktype == "finite_rank":
        terms = []
        for entry in doc.get("terms", []):
            coeffs = tuple(_parse_complex(c) for c in entry["coeffs"])
            beta = _parse_complex(entry["beta"])
            try:
                terms.append(FiniteRankTerm(coeffs, beta))
            except ValueError as exc:
                raise SpecError("bad finite_rank term: %s" % exc) from exc
        if not terms:
            raise SpecError("finite_rank spec needs at least one term")
        k = Kernel(tuple(terms))
        k.check_self_adjoint()
        return k
    if ktype == "sum":
        k = Kernel(())
        for part in doc.get("parts", []):
            sub = dict(part)
            sub.setdefault("schema", SCHEMA)
            k = k + parse_kernel(sub)
        if not k.terms:
            raise SpecError("sum spec needs at least one part")
        return k
    raise SpecError("unknown kernel type %r" % (ktype,))


def load_kernel(path):
    with open(path) as fh:
        return parse_kernel(json.load(fh))


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

def _report_skeleton(command, args):
    return {
        "schema": SCHEMA,
        "command": command,
        "seed": args.seed,
        "tolerance": args.tol,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S"),
    }


def _write_report(report, args, name):
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, name)
    with open(path, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    log.info("wrote %s", path)
    return path


def _write_csv(args, name, header, rows):
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, name)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    log.info("wrote %s", path)
    return path


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_sigma(args):
    kern = load_kernel(args.spec)
    try:
        sig = sigma_of_kernel(kern)
    except UndefinableKernelError as exc:
        log.error("%s", exc)
        return EXIT_VALIDATION
    lam = np.exp(np.linspace(np.log(args.lam_min), np.log(args.lam_max), args.points))
    dens = sig.density(lam)
    rows = [["density", "%.17g" % lv, "%.17g" % dv, "", "", "", ""]
            for lv, dv in zip(lam, dens)]
    for p in sig.parts:
        if isinstance(p, RegularizedPower):
            rows.append(["regularized_power", "", "", "%.17g" % (p.q - 1),
                         str(p.order), "%.17g" % p.alpha, ""])
        elif isinstance(p, DeltaCombo):
            rows.append(["delta_combo", "", "", "", str(p.degree),
                         "%.17g" % p.beta.real, "%.17g" % p.beta.imag])
    _write_csv(args, "sigma.csv",
               ["kind", "lambda", "value", "exponent", "order", "center_re", "center_im"],
               rows)
    return EXIT_OK


def predict_kernel(kern):
    """Prediction dispatch used by the predict and verify commands."""
    qc = kern.qc_terms
    fr = kern.fr_terms
    if qc and classify(kern) is Classification.UNDEFINABLE:
        raise UndefinableKernelError("kernel is undefinable")
    if not qc:
        return predict_finite_rank(kern)
    if len(qc) == 1 and not fr:
        return predict_quasi_carleman(qc[0].q, v0=qc[0].v0)
    if len(qc) == 2:
        base, pert = sorted(qc, key=lambda t: t.q, reverse=True)
        return predict_perturbed(Kernel((base,)), pert)
    if len(qc) == 1 and fr:
        return predict_perturbed_finite(kern)
    raise SpecError("no prediction route for this kernel shape")


def predict_perturbed_finite(kern):
    from .predict import assumption_hfree

    sigma0 = sigma_of_kernel(Kernel(tuple(kern.qc_terms)))
    if not assumption_hfree(sigma0):
        raise AssumptionViolation("unperturbed part violates the regularity assumption")
    return predict_finite_rank(Kernel(tuple(kern.fr_terms)))


def cmd_predict(args):
    kern = load_kernel(args.spec)
    report = _report_skeleton("predict", args)
    try:
        pred = predict_kernel(kern)
    except (UndefinableKernelError, SpecError, IntegerExponentError,
            AssumptionViolation) as exc:
        log.error("%s", exc)
        return EXIT_VALIDATION
    report["prediction"] = pred.to_json()
    _write_report(report, args, "predict.json")
    return EXIT_OK


def _random_tests(kern, count, seed):
    """Random ExpPoly test functions admissible for the kernel's direct form."""
    rng = np.random.default_rng(seed)
    mmin = 0
    for t in kern.qc_terms:
        if t.r == 0:
            mmin = max(mmin, min_monomial_order(t.q))
    out = []
    rates = (0.5, 0.75, 1.0, 1.5, 2.0, 2.5)
    for _ in range(count):
        terms = []
        for _ in range(int(rng.integers(1, 3))):
            terms.append((float(rng.normal()), int(mmin + rng.integers(0, 4)),
                          float(rng.choice(rates))))
        out.append(ExpPoly(tuple(terms)))
    return out


def cmd_verify(args):
    kern = load_kernel(args.spec)
    report = _report_skeleton("verify-" + args.mode, args)
    start = time.time()
    code = EXIT_OK
    if args.mode == "identity":
        tests = _random_tests(kern, args.count, args.seed)
        residuals = [identity_residual(kern, f) for f in tests]
        report["residuals"] = residuals
        report["max_residual"] = max(residuals)
        if report["max_residual"] > args.tol:
            code = EXIT_TOLERANCE
    elif args.mode == "galerkin":
        sizes = tuple(int(s) for s in args.sizes.split(","))
        est = stabilized_negcount(kern, sizes)
        report["counts"] = est.to_json()
        try:
            report["prediction"] = predict_kernel(kern).to_json()
        except (SpecError, IntegerExponentError, UndefinableKernelError,
                AssumptionViolation):
            report["prediction"] = None
        top = assemble(kern, sizes[-1])
        ev = np.linalg.eigvalsh(top.matrix)
        report["max_eig"] = float(ev[-1])
        rows = []
        for n, nneg, npos in est.history:
            sub_ev = np.linalg.eigvalsh(top.leading(n).matrix)
            rows.append([n, nneg, npos, "%.12g" % sub_ev[-1]])
        _write_csv(args, "galerkin.csv", ["N", "n_minus", "n_plus", "max_eig"], rows)
        if report["prediction"] is not None and est.kind == "finite":
            pn = report["prediction"]["n_minus"]
            if pn != "infinite" and est.value != pn:
                code = EXIT_TOLERANCE
    elif args.mode == "factorization":
        grid = DEFAULT_GRID
        t = grid.lambdas_pos
        worst = 0.0
        for n in range(6):
            f = GridFunction(grid, laguerre_e(n, t))
            w = laplace_via_mellin(f)
            truth = laguerre_image(n)(t)
            dif = (w.values - truth) * np.exp(grid.xs / 2)
            num = np.sqrt(grid.dx * np.sum(np.abs(dif) ** 2))
            worst = max(worst, float(num))
        report["residual"] = worst
        if worst > args.tol:
            code = EXIT_TOLERANCE
    elif args.mode == "witness":
        cls = classify(kern)
        report["classification"] = cls.value
        report["zero_in_spectrum"] = spectral_witnesses(kern, "zero_in_spectrum")
        if cls is not Classification.BOUNDED:
            report["unbounded"] = spectral_witnesses(kern, "unbounded")
    else:
        log.error("unknown verify mode %r", args.mode)
        return EXIT_VALIDATION
    report["runtime_sec"] = time.time() - start
    _write_report(report, args, "verify_%s.json" % args.mode)
    return code


def cmd_certificate(args):
    h0 = load_kernel(args.h0) if args.h0 else Kernel(())
    v = load_kernel(args.spec)
    report = _report_skeleton("certificate", args)
    start = time.time()
    cert = certificate(h0, v, args.target)
    report["certificate"] = {
        "kind": cert.kind,
        "eps": cert.eps,
        "achieved": cert.achieved,
        "target": cert.target,
        "success": bool(cert.success),
    }
    report["runtime_sec"] = time.time() - start
    _write_report(report, args, "certificate.json")
    return EXIT_OK if cert.success else EXIT_TOLERANCE


def _sweep_case(case, args):
    sub = argparse.Namespace(**vars(args))
    sub.out = os.path.join(args.out, case["name"])
    kern = parse_kernel(case["kernel"])
    report = _report_skeleton("sweep-case", sub)
    try:
        report["prediction"] = predict_kernel(kern).to_json()
        code = EXIT_OK
    except (SpecError, IntegerExponentError, UndefinableKernelError,
            AssumptionViolation) as exc:
        report["error"] = str(exc)
        code = EXIT_VALIDATION
    if case.get("galerkin") and code == EXIT_OK:
        sizes = tuple(case.get("sizes", (16, 32, 64, 128)))
        report["counts"] = stabilized_negcount(kern, sizes).to_json()
    os.makedirs(sub.out, exist_ok=True)
    with open(os.path.join(sub.out, "report.json"), "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return code


def cmd_sweep(args):
    with open(args.config) as fh:
        config = json.load(fh)
    cases = config.get("cases", [])
    os.makedirs(args.out, exist_ok=True)
    if not cases:
        return EXIT_OK
    worst = EXIT_OK
    with concurrent.futures.ThreadPoolExecutor(max_workers=args.jobs) as pool:
        for code in pool.map(lambda c: _sweep_case(c, args), cases):
            worst = max(worst, code)
    return worst


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(
        prog="hankelsigma",
        description="sigma-function calculus for quasi-Carleman Hankel operators")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--tol", type=float, default=1e-6)
        p.add_argument("--seed", type=int, default=1234)
        p.add_argument("--jobs", type=int, default=4)

    p = sub.add_parser("sigma", help="sample the sigma distribution to CSV")
    p.add_argument("--spec", required=True)
    p.add_argument("--lam-min", type=float, default=1e-3)
    p.add_argument("--lam-max", type=float, default=1e3)
    p.add_argument("--points", type=int, default=200)
    common(p)
    p.set_defaults(func=cmd_sigma)

    p = sub.add_parser("predict", help="closed-form spectral counts")
    p.add_argument("--spec", required=True)
    common(p)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("verify", help="numerical verification")
    p.add_argument("mode", choices=("identity", "galerkin", "factorization", "witness"))
    p.add_argument("--spec", required=True)
    p.add_argument("--sizes", default="16,32,64,128")
    p.add_argument("--count", type=int, default=20)
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("certificate", help="variational negative-subspace certificate")
    p.add_argument("--spec", required=True, help="perturbation kernel V")
    p.add_argument("--h0", default=None, help="unperturbed kernel H0 (optional)")
    p.add_argument("--target", type=int, required=True)
    common(p)
    p.set_defaults(func=cmd_certificate)

    p = sub.add_parser("sweep", help="run a batch of prediction/verification cases")
    p.add_argument("--config", required=True)
    common(p)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None):
    logging.basicConfig(level=os.environ.get("HS_LOG", "WARNING").upper(),
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SpecError, UndefinableKernelError, FileNotFoundError,
            json.JSONDecodeError) as exc:
        log.error("%s", exc)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
