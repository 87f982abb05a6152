"""Command-line front end: knot data, transforms, residues, identity
verification, surgery invariants, Park polynomials, connected sums, and
numerical asymptotics.

Exit codes: 0 success, 1 usage errors, 2 domain errors (divergence, LBC
failure, ...).  ``--json`` switches structured output; with it domain
errors are emitted as machine-readable JSON on stdout.  The environment
variable ``QHABIRO_PREC`` sets the default series precision; flags
override it.  Progress/diagnostics go to stderr only.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from . import asympt, knots, omega, residues, surgery, transform
from .series import QAlgebraError, QSeries

VERIFY_SUITES = (
    "pentagonal",
    "hecke-rogers",
    "fig8-sum",
    "residue-symmetry",
    "theta-route",
    "trefoil-recurrence-l",
    "trefoil-recurrence-r",
    "tails-even",
    "tails-odd",
    "branch-half",
    "descendant-g0",
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # usage problems must exit 1, not argparse's default 2
    def error(self, message):
        raise UsageError(message)


def _default_prec() -> int:
    env = os.environ.get("QHABIRO_PREC")
    if env:
        try:
            return int(env)
        except ValueError:
            pass
    return 40


def _knot_constant(spec: knots.KnotSpec) -> Fraction:
    return transform.lbc_check(spec.a, 30).constant


def _series_out(s: QSeries, as_json: bool, extra=None) -> str:
    if as_json:
        obj = {"series": s.to_json()}
        if extra:
            obj.update(extra)
        return json.dumps(obj, sort_keys=True)
    lines = [str(s)]
    if extra:
        lines += ["%s: %s" % (k, v) for k, v in extra.items()]
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _cmd_knot(args) -> int:
    spec = knots.get_knot(args.name)
    out = []
    for k in range(args.index + 1):
        s = spec.f_coeff(k) if args.side == "f" else spec.a_coeff(k)
        if args.prec is not None:
            s = s.truncate(args.prec)
        out.append(s)
    if args.json:
        print(json.dumps({"knot": spec.name, "side": args.side,
                          "coeffs": [s.to_json() for s in out]},
                         sort_keys=True))
    else:
        label = "f" if args.side == "f" else "a_-"
        for k, s in enumerate(out):
            print("%s%d: %s" % (label, k if args.side == "f" else k + 1, s))
    return 0


def _cmd_transform(args) -> int:
    spec = knots.get_knot(args.knot)
    if args.direction == "f-from-a":
        seq = transform.f_from_a(spec.a)
        label = "f"
    else:
        seq = transform.a_from_f(spec.f, method=args.method)
        label = "a_-"
    out = [seq[k] for k in range(args.index + 1)]
    if args.json:
        print(json.dumps({"knot": spec.name, "direction": args.direction,
                          "coeffs": [s.to_json() for s in out]},
                         sort_keys=True))
    else:
        for k, s in enumerate(out):
            print("%s%d: %s" % (label, k if label == "f" else k + 1, s))
    return 0


def _cmd_residues(args) -> int:
    spec = knots.get_knot(args.knot)
    C = _knot_constant(spec)
    js = args.j if args.j is not None else list(range(-args.window, args.window + 1))
    if isinstance(js, int):
        js = [js]

    def one(j):
        return j, residues.residue_series(spec.a, j, args.prec, C)

    if args.jobs > 1 and len(js) > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            results = dict(pool.map(one, js))
    else:
        results = dict(one(j) for j in js)
    if args.json:
        print(json.dumps({"knot": spec.name, "prec": args.prec,
                          "residues": {str(j): results[j].to_json()
                                       for j in sorted(results)}},
                         sort_keys=True))
    else:
        for j in sorted(results):
            print("r_%d: %s" % (j, results[j]))
    return 0


def _run_suite(name: str, prec) -> tuple:
    """Returns (ok: bool, detail: str)."""
    if name in ("pentagonal", "hecke-rogers", "fig8-sum"):
        kname = {"pentagonal": "3_1l", "hecke-rogers": "3_1r",
                 "fig8-sum": "4_1"}[name]
        spec = knots.get_knot(kname)
        defect = residues.residue_theorem_check(spec.a, prec,
                                                _knot_constant(spec))
        return defect.is_zero, ("defect 0 to O(q^%s)" % prec
                                if defect.is_zero else "defect %s" % defect)
    if name == "residue-symmetry":
        for kname in ("3_1l", "3_1r", "4_1"):
            spec = knots.get_knot(kname)
            fam = residues.residue_family(spec.a, 4, prec,
                                          _knot_constant(spec))
            for j in range(1, fam.J + 1):
                if not fam.symmetry_defect(j).is_zero:
                    return False, "r_{-%d} != q^{-%d} r_%d for %s" % (j, j, j, kname)
        return True, "r_{-j} = q^{-j} r_j on all computed families"
    if name == "theta-route":
        for kname in ("3_1l", "3_1r", "4_1"):
            spec = knots.get_knot(kname)
            C = _knot_constant(spec)
            for j in (0, 1, 2):
                direct = residues.residue_series(spec.a, j, prec, C)
                theta = residues.residues_from_f(spec.f, j, prec, C)
                if not (direct - theta).truncate(prec).is_zero:
                    return False, "mismatch at %s, j=%d" % (kname, j)
        return True, "theta route matches direct residues to O(q^%s)" % prec
    if name == "trefoil-recurrence-l":
        ok = residues.trefoil_recurrence_check("L", 6, prec)
        return ok, "recurrence holds for j=0..5" if ok else "recurrence fails"
    if name == "trefoil-recurrence-r":
        ok = residues.trefoil_recurrence_check("R", 6, prec)
        return ok, "recurrence holds for j=0..5" if ok else "recurrence fails"
    if name in ("tails-even", "tails-odd"):
        parity = name.split("-")[1]
        normalized, target, agree_to = residues.tail_check(parity, 10, prec)
        ok = agree_to >= 8
        return ok, "tail agrees to O(q^%s)" % agree_to
    if name == "branch-half":
        spec = knots.get_knot("4_1")
        C = _knot_constant(spec)
        inv = residues._inv_poch_product((residues.INF,), Fraction(prec))
        for j in (-2, -1, 0, 1, 2):
            br = residues.branch_residue_41("+1/2", j, prec)
            rj = residues.residue_series(spec.a, j, prec, C)
            if not (br - rj * inv).truncate(prec).is_zero:
                return False, "branch relation fails at j=%d" % j
        return True, "res of +1/2 branch = (q)_inf^{-1} r_j for |j| <= 2"
    if name == "descendant-g0":
        spec = knots.get_knot("4_1")
        shifted = residues.descendant(spec.a, 1)
        r0 = residues.residue_series(shifted, 0, prec, Fraction(-1))
        # direct sum: -r_0 = sum_k (-1)^k q^{binom(k+1,2)+k}/(q)_k^2
        acc = QSeries.zero(Fraction(prec))
        k = 0
        while True:
            e = k * (k + 1) // 2 + k
            if e >= prec:
                break
            sign = -1 if k % 2 else 1
            acc = acc + QSeries.monomial(e, sign) * residues._inv_poch_product(
                (k, k), Fraction(prec) - e)
            k += 1
        ok = (r0 + acc.truncate(prec)).truncate(prec).is_zero
        return ok, ("descendant m=1 residue matches the G series"
                    if ok else "descendant residue mismatch")
    raise UsageError("unknown verify suite %r" % name)


def _cmd_verify(args) -> int:
    names = VERIFY_SUITES if args.suite == "all" else (args.suite,)
    results = {}
    for name in names:
        ok, detail = _run_suite(name, args.prec)
        results[name] = (ok, detail)
    all_ok = all(ok for ok, _ in results.values())
    if args.json:
        print(json.dumps({name: {"ok": ok, "detail": detail}
                          for name, (ok, detail) in results.items()},
                         sort_keys=True))
    else:
        for name, (ok, detail) in results.items():
            print("%s: %s" % ("OK" if ok else "FAIL", detail))
    return 0 if all_ok else 2


def _cmd_surgery(args) -> int:
    spec = knots.get_knot(args.knot)
    params = surgery.SurgeryParams(p=args.p, a=args.a, prec=args.prec,
                                   method=args.method.upper())
    result = surgery.zhat(spec, params)
    extra = {"delta": str(result.delta), "note": result.sign_convention}
    print(_series_out(result.series, args.json, extra))
    return 0


def _cmd_park_poly(args) -> int:
    out = {}
    if args.method in ("explicit", "both"):
        out["explicit"] = surgery.park_poly_explicit(args.p, args.a, args.k)
    if args.method in ("residue", "both"):
        out["residue"] = surgery.park_poly_residue(args.p, args.a, args.k)
    if args.json:
        print(json.dumps({name: s.to_json() for name, s in out.items()},
                         sort_keys=True))
    else:
        for name, s in out.items():
            print("%s: %s" % (name, s))
    return 0


def _cmd_connect_sum(args) -> int:
    el = None
    for name in args.knots:
        spec = knots.get_knot(name)
        cur = omega.omega_from_a(spec.a, args.depth)
        el = cur if el is None else omega.omega_mul(el, cur, args.depth,
                                                    prec=args.prec)
    # omega_mul fills indices k = 0..depth-1 (basis indices -1..-depth)
    out = [el.a[k].truncate(args.prec) for k in range(args.depth)]
    if args.json:
        print(json.dumps({"knots": args.knots,
                          "coeffs": [s.to_json() for s in out]},
                         sort_keys=True))
    else:
        for k, s in enumerate(out):
            print("a_-%d: %s" % (k + 1, s))
    return 0


def _cmd_asympt(args) -> int:
    if args.mode == "period":
        rep = asympt.periodicity_check(args.knot, args.n_max, args.bits)
        if args.json:
            print(json.dumps({"period": rep.period,
                              "values": list(rep.values),
                              "message": rep.message}))
        else:
            if rep.period is None:
                print(rep.message)
            else:
                print("period %d, values %s" % (rep.period, list(rep.values)))
        return 0 if rep.period is not None else 2
    if args.mode == "growth":
        n_list = list(range(max(10, args.n_max // 4), args.n_max + 1,
                            max(1, args.n_max // 20)))
        g = asympt.growth_rate(args.knot, n_list, args.bits)
        if args.json:
            print(json.dumps({"growth": g.estimate, "order": g.order,
                              "flagged": g.flagged}))
        else:
            print("growth %.10f%s" % (g.estimate,
                                      " (flagged)" if g.flagged else ""))
        return 0
    if args.mode == "phi":
        ps = asympt.extract_phi(args.knot, args.depth, args.n_max, args.bits)
        if args.json:
            print(json.dumps({"coeffs": list(ps.coeffs),
                              "prefactor": ps.prefactor}))
        else:
            print("c = %s (prefactor %s)" % (list(ps.coeffs), ps.prefactor))
        return 0
    if args.mode == "quotient":
        vals = asympt.phi_quotient_check(args.depth)
        print(json.dumps(list(vals)) if args.json else
              "quotient coefficients: %s" % (list(vals),))
        return 0
    if args.mode == "csv":
        asympt.emit_csv(sys.stdout, args.knot, args.n_max, args.bits)
        return 0
    raise UsageError("unknown asympt mode %r" % args.mode)


# ---------------------------------------------------------------------------
# parser and dispatch
# ---------------------------------------------------------------------------


def _build_parser() -> _Parser:
    prec_default = _default_prec()
    top = _Parser(prog="qhabiro", description=__doc__)
    sub = top.add_subparsers(dest="command")

    def add(name, func, **kw):
        p = sub.add_parser(name, **kw)
        p.set_defaults(func=func)
        p.add_argument("--json", action="store_true")
        return p

    p = add("knot", _cmd_knot, help="print stored coefficient sequences")
    p.add_argument("--name", required=True)
    p.add_argument("--side", choices=("f", "a"), default="a")
    p.add_argument("--index", type=int, default=5)
    p.add_argument("--prec", type=int, default=None)

    p = add("transform", _cmd_transform, help="run the coefficient transforms")
    p.add_argument("--knot", required=True)
    p.add_argument("--direction", choices=("f-from-a", "a-from-f"),
                   default="f-from-a")
    p.add_argument("--index", type=int, default=5)
    p.add_argument("--method", choices=("solve", "closed"), default="solve")

    p = add("residues", _cmd_residues, help="residues r_j of a knot")
    p.add_argument("--knot", required=True)
    p.add_argument("-j", type=int, default=None)
    p.add_argument("--window", type=int, default=2)
    p.add_argument("--prec", type=int, default=prec_default)
    p.add_argument("--jobs", type=int, default=1)

    p = add("verify", _cmd_verify, help="run a named identity suite")
    p.add_argument("suite", choices=VERIFY_SUITES + ("all",))
    p.add_argument("--prec", type=int, default=prec_default)
    p.add_argument("--jobs", type=int, default=1)

    p = add("surgery", _cmd_surgery, help="surgery q-series invariant")
    p.add_argument("--knot", required=True)
    p.add_argument("-p", type=int, required=True)
    p.add_argument("-a", type=int, default=0)
    p.add_argument("--method", choices=("fk", "residues", "ihcoef"),
                   default="fk")
    p.add_argument("--prec", type=int, default=prec_default)

    p = add("park-poly", _cmd_park_poly, help="Park polynomials")
    p.add_argument("-p", type=int, required=True)
    p.add_argument("-a", type=int, default=0)
    p.add_argument("-k", type=int, required=True)
    p.add_argument("--method", choices=("explicit", "residue", "both"),
                   default="both")

    p = add("connect-sum", _cmd_connect_sum,
            help="connected-sum coefficients via the ring product")
    p.add_argument("--knots", nargs="+", required=True)
    p.add_argument("--depth", type=int, default=8)
    p.add_argument("--prec", type=int, default=prec_default)

    p = add("asympt", _cmd_asympt, help="numerical asymptotics")
    p.add_argument("--knot", default="4_1")
    p.add_argument("--mode", choices=("period", "growth", "phi",
                                      "quotient", "csv"), required=True)
    p.add_argument("--n-max", type=int, default=100)
    p.add_argument("--bits", type=int, default=256)
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--jobs", type=int, default=1)

    return top


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "func", None):
            parser.print_usage(sys.stderr)
            return 1
        return args.func(args)
    except BrokenPipeError:
        return 0
    except UsageError as exc:
        print("usage error: %s" % exc, file=sys.stderr)
        return 1
    except QAlgebraError as exc:
        as_json = bool(argv) and "--json" in argv or "--json" in sys.argv
        if as_json:
            print(json.dumps({"error": type(exc).__name__,
                              "message": str(exc)}))
        else:
            print("error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
