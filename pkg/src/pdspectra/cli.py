"""Batch command-line driver for the verification suites.

Exit status: 0 when every check passes, 1 for usage or configuration errors,
2 when a verification fails.  JSON output is key-sorted and carries no
timestamps, so equal configurations give byte-identical reports.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import abelian, cantor, comb, gp, rkhs
from .errors import PdSpectraError
from .spectra import CATALOG_VERSION, ISOMETRY_PAIRS, catalog, get_pair
from .testfn import catalog as phi_catalog

EXIT_OK, EXIT_CONFIG, EXIT_FAIL = 0, 1, 2


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _num(v):
    if isinstance(v, (complex, np.complexfloating)):
        return [float(v.real), float(v.imag)]
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    return v


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    return _num(obj)


def _phis(names):
    cat = phi_catalog()
    if names is None:
        names = [n for n in cat if n != "zero"]
    unknown = [n for n in names if n not in cat]
    if unknown:
        raise ConfigError(f"unknown test function(s) {unknown}; known: {sorted(cat)}")
    return [(n, cat[n]) for n in names]


def _pairs(names, default):
    names = list(default) if not names else names
    known = catalog()
    unknown = [n for n in names if n not in known]
    if unknown:
        raise ConfigError(f"unknown catalog pair(s) {unknown}; known: {sorted(known)}")
    return names


def _check_tol(tol):
    if tol is None:
        return
    if not math.isfinite(tol) or tol < 0:
        raise ConfigError(f"tolerance must be a nonnegative number, got {tol}")


def _within(err, tol):
    # a zero tolerance is a strict failure by contract
    return tol > 0 and err <= tol


def _report(command, tolerances, records, passed, **extra):
    doc = {"command": command, "catalog_version": CATALOG_VERSION, "tolerances": tolerances,
           "records": records, "passed": passed}
    doc.update(extra)
    return doc


def _csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# commands: each returns (report_dict, csv_text_or_None, passed)
# ---------------------------------------------------------------------------

def cmd_catalog(args):
    if args.action != "list":
        raise ConfigError("catalog supports only 'list'")
    pairs = [catalog()[n].to_json() for n in sorted(catalog())]
    phis = {n: p.to_json() for n, p in sorted(phi_catalog().items())}
    doc = {"command": "catalog", "catalog_version": CATALOG_VERSION, "pairs": pairs,
           "test_functions": phis}
    rows = [(p["name"], p["kernel"]["form"], p["measure"]["growth_class"]) for p in pairs]
    return doc, _csv(["name", "kernel_form", "growth_class"], rows), True


def cmd_isometry(args):
    tol = 1e-6 if args.tol is None else args.tol
    pairs = _pairs(args.pair, ISOMETRY_PAIRS)
    phis = _phis(args.phi)
    records, rows = [], []
    for pname in pairs:
        pair = get_pair(pname)
        for fname, phi in phis:
            r = rkhs.verify_isometry(phi, pair)
            ok = _within(r.rel_err, tol)
            records.append({"pair": pname, "phi": fname, "lhs": r.lhs, "rhs": r.rhs,
                            "rel_err": r.rel_err, "pass": ok})
            rows.append((pname, fname, r.lhs, r.rhs, r.rel_err, ok))
    passed = all(r["pass"] for r in records)
    doc = _report("isometry", {"rel_err": tol}, records, passed)
    return doc, _csv(["pair", "phi", "lhs", "rhs", "rel_err", "pass"], rows), passed


def cmd_comb(args):
    tol = 1e-9 if args.tol is None else args.tol
    phis = _phis(args.phi if args.phi is not None else ["gaussian", "bspline3"])
    c = comb.DiracComb(truncation=args.truncation)
    records, rows = [], []
    for fname, phi in phis:
        ident = comb.comb_norm_identity(phi, c)
        diff = abs(ident.xside - ident.freqside)
        ok = _within(diff, tol)
        records.append({"phi": fname, "xside": ident.xside, "freqside": ident.freqside,
                        "abs_diff": diff, "truncation": ident.truncation,
                        "tail_bound": ident.tail_bound, "pass": ok})
        el = comb.comb_element(phi, c)
        rows.extend((fname, int(n), z.real, z.imag) for n, z in zip(el.indices, el.coefficients))
    passed = all(r["pass"] for r in records)
    doc = _report("comb", {"abs_diff": tol}, records, passed)
    return doc, _csv(["phi", "n", "coefficient_re", "coefficient_im"], rows), passed


def cmd_cantor(args):
    tol = 1e-8 if args.tol is None else args.tol
    parseval_tol = 1e-6
    terms = int(round(math.log2(args.prefix))) if args.prefix > 0 else 0
    if args.prefix < 1 or 2 ** terms != args.prefix:
        raise ConfigError("--prefix must be a power of two")
    lam = cantor.lambda4(terms)
    m4 = cantor.nu4()
    G = cantor.onb_gram(m4, lam)
    off = float(np.max(np.abs(G - np.eye(len(lam)))))
    rng = np.random.default_rng(np.random.SeedSequence(args.seed))
    pars = []
    for _ in range(args.trials):
        cvec = rng.standard_normal(len(lam)) + 1j * rng.standard_normal(len(lam))
        r = cantor.parseval_check(cvec, lam, m4)
        pars.append({"rkhs_side": r.rkhs_side, "l2_side": r.l2_side,
                     "abs_diff": abs(r.rkhs_side - r.l2_side)})
    search = cantor.max_orth_search(cantor.nu3(), np.arange(0, 101) * 0.5, 1e-3)
    checks = {
        "gram_offdiag_max": {"value": off, "pass": _within(off, tol)},
        "parseval_max_diff": {"value": max((p["abs_diff"] for p in pars), default=0.0),
                              "pass": _within(max((p["abs_diff"] for p in pars), default=0.0),
                                              parseval_tol)},
        "nu3_max_orthogonal": {"value": search.max_size, "witness": list(search.witness),
                               "note": search.note, "pass": search.max_size <= 2},
    }
    passed = all(c["pass"] for c in checks.values())
    doc = _report("cantor", {"gram_offdiag": tol, "parseval": parseval_tol, "nu3_eps": 1e-3},
                  pars, passed, spectrum=lam, checks=checks, seed=args.seed)
    rows = [(i, j, lam[i], lam[j], float(G[i, j].real), float(G[i, j].imag))
            for i in range(len(lam)) for j in range(len(lam))]
    return doc, _csv(["i", "j", "lambda_i", "lambda_j", "re", "im"], rows), passed


def cmd_gp(args):
    z_max = 3.0 if args.tol is None else args.tol
    (pname,) = _pairs(args.pair[:1] if args.pair else None, ("lebesgue",))
    measure = get_pair(pname).measure
    grid = np.linspace(0.0, args.grid_max, args.grid_size + 1)
    model = gp.GpModel(measure, grid, args.seed)
    paths = gp.sample_paths(model, args.n_paths)
    variances = [{"x": float(x), "r": gp.variance_r(measure, x)} for x in grid]
    records = []
    if args.n_paths > 1:
        for c in gp.moment_checks(model, paths):
            records.append({"stat": c.name, "x": c.x, "y": c.y, "empirical": c.empirical,
                            "predicted": c.predicted, "std_error": c.std_error,
                            "z": c.z_score, "pass": _within(c.z_score, z_max)})
    passed = all(r["pass"] for r in records) and (z_max > 0)
    doc = _report("gp", {"z_score": z_max}, records, passed, pair=pname, seed=args.seed,
                  n_paths=args.n_paths, variance=variances)
    body = _csv([repr(float(x)) for x in grid], paths.tolist())
    return doc, body, passed


def cmd_abelian(args):
    tol = 1e-12 if args.tol is None else args.tol
    rng = np.random.default_rng(np.random.SeedSequence(args.seed))
    records = []
    for t in range(args.trials):
        mu = rng.uniform(0.0, 1.0, args.n)
        f = abelian.CyclicPdFunction.from_measure(mu)
        phi = rng.standard_normal(args.n) + 1j * rng.standard_normal(args.n)
        r = abelian.isometry_exact(f, phi)
        records.append({"trial": t, "xside": r.xside, "freqside": r.freqside,
                        "rel_err": r.rel_err, "pass": _within(r.rel_err, tol)})
    passed = all(r["pass"] for r in records)
    doc = _report("abelian", {"rel_err": tol}, records, passed, N=args.n, seed=args.seed)
    rows = [(r["trial"], r["xside"], r["freqside"], r["rel_err"]) for r in records]
    return doc, _csv(["trial", "xside", "freqside", "rel_err"], rows), passed


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None, help="pass/fail tolerance")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=None, help="output path (default: stdout)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--pair", action="append", default=None, help="catalog pair (repeatable)")
    common.add_argument("--phi", nargs="*", default=None, help="test function names")

    p = _Parser(prog="pdspectra", description="Spectral verification suites for positive definite kernels.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    c = sub.add_parser("catalog", parents=[common], help="list catalog pairs")
    c.add_argument("action", choices=("list",))
    c.set_defaults(func=cmd_catalog)
    sub.add_parser("isometry", parents=[common], help="double-integral vs spectral norms").set_defaults(
        func=cmd_isometry)
    c = sub.add_parser("comb", parents=[common], help="Dirac comb identity")
    c.add_argument("--truncation", type=int, default=16)
    c.set_defaults(func=cmd_comb)
    c = sub.add_parser("cantor", parents=[common], help="Cantor spectral pair checks")
    c.add_argument("--prefix", type=int, default=16)
    c.add_argument("--trials", type=int, default=10)
    c.set_defaults(func=cmd_cantor)
    c = sub.add_parser("gp", parents=[common], help="Gaussian process Monte Carlo")
    c.add_argument("--n-paths", type=int, default=100_000)
    c.add_argument("--grid-size", type=int, default=10)
    c.add_argument("--grid-max", type=float, default=5.0)
    c.set_defaults(func=cmd_gp)
    c = sub.add_parser("abelian", parents=[common], help="exact Z_N isometry")
    c.add_argument("--n", type=int, default=16)
    c.add_argument("--trials", type=int, default=100)
    c.set_defaults(func=cmd_abelian)
    return p


def _validate(args):
    _check_tol(args.tol)
    for name in ("n_paths", "grid_size", "trials", "truncation"):
        v = getattr(args, name, None)
        if v is not None and v < 0:
            raise ConfigError(f"--{name.replace('_', '-')} must be >= 0")
    if getattr(args, "n", 1) < 1:
        raise ConfigError("--n must be >= 1")
    if getattr(args, "grid_size", 1) == 0:
        raise ConfigError("--grid-size must be >= 1")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _validate(args)
        doc, table, passed = args.func(args)
    except ConfigError as e:
        print(f"pdspectra: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except PdSpectraError as e:
        print(f"pdspectra: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_FAIL
    text = table if args.format == "csv" else json.dumps(_clean(doc), sort_keys=True, indent=2) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
