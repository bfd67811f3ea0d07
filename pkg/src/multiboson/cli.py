"""Batch verification runner and OPE calculator.

``multiboson verify <suite>`` runs a named group of checks and writes a JSON
array of reports; ``multiboson ope <system> <lhs> <rhs>`` prints the singular
part of an OPE in canonical text.  Exit codes: 0 all checks pass, 1 some
check fails, 2 usage or runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Optional

from . import catalog
from .catalog import (HEISENBERG, check_homomorphism, derived_field, get_system, ope_from_terms, phi_betagamma,
                      phi_sb, solitary_identification, virasoro_check)
from .fieldcalc import Field, ParseError, format_field, locality_profile, normal_product, ope, parse_field
from .ratfunc import PoleError, RatFunc, expand, format_ratfunc, partial_fractions, verify_interpolation_identity
from .scalars import ONE, I, as_scalar, format_scalar

REPORT_SCHEMA_VERSION = 1
SUITES = ("ope", "heisenberg", "virasoro", "iso", "symplectic", "appendix", "fock")


@dataclass
class VerificationReport:
    check_id: str
    system: str
    parameters: dict
    status: str  # pass, fail or error
    expected: str
    computed: str
    wall_time: float = 0.0
    schema_version: int = REPORT_SCHEMA_VERSION


@dataclass
class Options:
    n: Optional[int] = None
    family: Optional[str] = None
    params: dict = field(default_factory=dict)
    field_name: Optional[str] = None
    cutoff_e: Fraction = Fraction(6)
    cutoff_p: int = 6
    series_order: int = 12


def _status(ok: bool) -> str:
    return "pass" if ok else "fail"


def _text(x) -> str:
    if isinstance(x, RatFunc):
        return format_ratfunc(x)
    if isinstance(x, Field):
        return format_field(x)
    if isinstance(x, Fraction):
        return str(x)
    if x is None:
        return "none"
    try:
        return format_scalar(x)
    except (AttributeError, TypeError):
        return str(x)


def format_ope_result(res) -> str:
    """Central part as one rational function times Id, then the remaining pole terms."""
    parts = []
    central = res.central()
    if not central.is_zero():
        parts.append(f"{format_ratfunc(central)} * Id")
    n = res.system.num_points
    for (j, k), f in sorted(res.non_central().items()):
        pole = format_ratfunc(RatFunc.pole(Fraction(j, n), k + 1))
        parts.append(f"{pole} * [{format_field(f, 'w')}]")
    return " + ".join(parts) if parts else "0"


class _Runner:
    """Collects reports; each check body returns (ok, expected, computed)."""

    def __init__(self):
        self.reports: list[VerificationReport] = []

    def run(self, check_id: str, system: str, params: dict, body: Callable):
        t0 = time.perf_counter()
        try:
            ok, expected, computed = body()
            status = _status(ok)
        except Exception as exc:  # reported, not raised: one broken check must not hide the rest
            status, expected, computed = "error", "", f"{type(exc).__name__}: {exc}"
        params = {k: _text(v) for k, v in params.items()}
        self.reports.append(VerificationReport(check_id, system, params, status, str(expected), str(computed),
                                               round(time.perf_counter() - t0, 3)))


def _series_equal(a: RatFunc, b: RatFunc, order: int) -> bool:
    return expand(a, "z", order) == expand(b, "z", order)


# suites ------------------------------------------------------------------------------


def suite_ope(opts: Options) -> list[VerificationReport]:
    r = _Runner()
    chi_sys = catalog.chi_system(2)
    chi = Field.generator(chi_sys, "chi")
    order = opts.series_order

    def central_check(a, b, want: RatFunc):
        def body():
            res = ope(a, b)
            got = res.central()
            ok = got == want and not res.non_central() and _series_equal(got, want, order)
            return ok, format_ratfunc(want), format_ope_result(res)
        return body

    r.run("ope.chi_chi", chi_sys.name, {}, central_check(chi, chi, RatFunc.pole(Fraction(1, 2))))
    bc, gc = catalog.beta_chi(), catalog.gamma_chi()
    sq = RatFunc({(0, 0): ONE}, roots={Fraction(0): 1, Fraction(1, 2): 1})
    bg_pairs = {("beta_chi", "gamma_chi"): sq, ("gamma_chi", "beta_chi"): -sq,
             ("beta_chi", "beta_chi"): RatFunc({}), ("gamma_chi", "gamma_chi"): RatFunc({})}
    fields = {"beta_chi": bc, "gamma_chi": gc}
    for (x, y), want in bg_pairs.items():
        r.run(f"ope.{x}.{y}", chi_sys.name, {}, central_check(fields[x], fields[y], want))
    for which, (name, want) in sorted(HEISENBERG.items()):
        h = derived_field(name)
        r.run(f"ope.{name}", h.system.name, {}, central_check(h, h, want))

    def chi_square():
        cc = normal_product(chi, chi)
        res = ope(cc, cc)
        two = Field.identity(chi_sys, as_scalar(2))
        mixed = normal_product(Field.generator(chi_sys, "chi", 1), chi) * 4
        want = ope_from_terms(chi_sys, [(RatFunc.pole(Fraction(1, 2), 2), two), (RatFunc.pole(Fraction(1, 2)), mixed)])
        return res == want, format_ope_result(want), format_ope_result(res)

    r.run("ope.chi_sq", chi_sys.name, {}, chi_square)

    def locality():
        got = (locality_profile(chi, chi), locality_profile(bc, gc))
        return got == ((0, 1), (1, 1)), "(0, 1) (1, 1)", f"{got[0]} {got[1]}"

    r.run("ope.locality", chi_sys.name, {}, locality)

    def pf(f: RatFunc, want: dict):
        def body():
            dec = partial_fractions(f)
            got = {}
            for q, terms in sorted(dec.poles.items()):
                for order_k, coeff in terms.items():
                    got[(q, order_k)] = coeff
            ok = dec.recombine() == f and got == want
            return ok, _pf_text(want), _pf_text(got)
        return body

    half = as_scalar(Fraction(1, 2))
    quarter = as_scalar(Fraction(1, 4))
    r.run("ope.pf.inverse_square_difference", "-", {},
          pf(sq, {(Fraction(0), 1): {-1: half}, (Fraction(1, 2), 1): {-1: -half}}))
    r.run("ope.pf.h_bg_tw", "-", {},
          pf(HEISENBERG["bg-twisted"][1], {(Fraction(0), 2): {1: -ONE}, (Fraction(0), 1): {0: -half}}))
    r.run("ope.pf.h_chi_tw", "-", {},
          pf(HEISENBERG["chi-twisted"][1], {(Fraction(0), 2): {0: -quarter}, (Fraction(1, 2), 2): {0: -quarter}}))
    return r.reports


def _pf_text(terms: dict) -> str:
    out = []
    for (q, k), coeff in sorted(terms.items()):
        body = " + ".join(f"{format_scalar(c)} w^{e}" for e, c in sorted(coeff.items()))
        out.append(f"[{q}, {k}]: {body}")
    return "; ".join(out)


def suite_heisenberg(opts: Options) -> list[VerificationReport]:
    r = _Runner()
    for which in sorted(HEISENBERG):
        name = HEISENBERG[which][0]

        def body(which=which):
            rep = catalog.heisenberg_check(which, opts.cutoff_e, opts.cutoff_p, bound=3, pairs="all")
            bad = [f"[{b.m},{b.n}]={_text(b.value)}" for b in rep.brackets if not b.ok]
            computed = f"ope {format_ratfunc(rep.computed)}; {len(rep.brackets)} brackets"
            if bad:
                computed += "; wrong: " + ", ".join(bad[:6])
            return rep.ok, f"ope {format_ratfunc(rep.expected)}; [h_m, h_n] = -m delta", computed

        r.run(f"heisenberg.{which}", derived_field(name).system.name,
              {"cutoff_e": opts.cutoff_e, "cutoff_p": opts.cutoff_p}, body)
    return r.reports


_VIRASORO_GRID = (
    [("L1", {"a": a, "b": b}) for a in ("0", "1/2", "1", "1/3") for b in ("0", "2", "1/5")]
    + [("L2", {"lam": lam, "mu": mu}) for lam in ("0", "-1/2", "1") for mu in ("0", "1/4", "2")]
    + [("L3", {"kappa": k}) for k in ("0", "1/2", "1")]
    + [("L3_chi", {"kappa": k}) for k in ("0", "1")]
    + [("solitary", {})]
)


def _virasoro_body(family: str, params: dict):
    def body():
        rep = virasoro_check(family, params)
        computed = f"c = {_text(rep.central_charge)}; shape {'ok' if rep.matches else 'mismatch'}"
        if not rep.third_order_pole_vanishes:
            computed += "; third order pole present"
        if rep.residual:
            computed += "; residual " + "; ".join(f"{k}: {format_field(v, 'w')}" for k, v in sorted(rep.residual.items()))
        return rep.ok, f"c = {_text(rep.expected_central_charge)}; shape ok", computed
    return body


def _param_id(params: dict) -> str:
    return ",".join(f"{k}={v}" for k, v in sorted(params.items()))


def suite_virasoro(opts: Options) -> list[VerificationReport]:
    r = _Runner()
    if opts.family:
        allowed = {"L1": ("a", "b"), "L2": ("lam", "mu"), "L3": ("kappa",), "L3_chi": ("kappa",),
                   "L1_chi": ("a", "b"), "L2_chi": ("lam", "mu"), "solitary": ()}
        if opts.family not in allowed:
            raise ValueError(f"unknown family {opts.family!r}; choose from {sorted(allowed)}")
        params = {k: v for k, v in opts.params.items() if k in allowed[opts.family]}
        r.run(f"virasoro.{opts.family}[{_param_id(params)}]", "-", params, _virasoro_body(opts.family, params))
        return r.reports
    for family, params in _VIRASORO_GRID:
        system = "chi" if family in ("L3_chi", "solitary") else "betagamma"
        r.run(f"virasoro.{family}[{_param_id(params)}]", system, params, _virasoro_body(family, params))

    def interp(family, param, values, fixed, want):
        def body():
            got = catalog.interpolate_central_charge(family, param, values, fixed)
            return got == want, " ".join(map(str, want)), " ".join(map(str, got))
        return body

    r.run("virasoro.L1.polynomial", "betagamma", {"b": "2"},
          interp("L1", "a", ["0", "1/2", "1"], {"b": "2"}, [1, 0, 12]))
    r.run("virasoro.L2.polynomial", "betagamma", {"mu": "1/4"},
          interp("L2", "lam", ["0", "-1/2", "1"], {"mu": "1/4"}, [2, 12, 12]))

    def independent(family, param, values, fixed):
        def body():
            cs = []
            for v in values:
                p = dict(fixed)
                p[param] = v
                cs.append(virasoro_check(family, p).central_charge)
            ok = all(c == cs[0] for c in cs)
            return ok, f"one value over {param} in {values}", " ".join(_text(c) for c in cs)
        return body

    r.run("virasoro.L1.b_independence", "betagamma", {"a": "1/2"},
          independent("L1", "b", ["0", "1", "-2", "1/3"], {"a": "1/2"}))
    r.run("virasoro.L2.mu_independence", "betagamma", {"lam": "1"},
          independent("L2", "mu", ["0", "1/4", "2", "-3"], {"lam": "1"}))

    def third_pole():
        f = catalog.l3_third_pole(1)
        return not f.is_zero(), "nonzero for nu = 1", format_field(f, "w")

    r.run("virasoro.L3.derivative_term_third_pole", "betagamma", {"nu": "1"}, third_pole)
    return r.reports


def suite_iso(opts: Options) -> list[VerificationReport]:
    r = _Runner()
    phi = phi_betagamma()
    src, tgt = phi.source.name, phi.target.name

    def round_trip():
        bad = phi.round_trip_errors()
        return not bad, "[]", str(bad)

    r.run("iso.phi_betagamma.round_trip", f"{src}->{tgt}", {}, round_trip)

    def hom():
        rep = check_homomorphism(phi)
        text = "; ".join(f"{p.left},{p.right}: {format_ope_result(p.computed)}" for p in rep.pairs)
        return rep.ok, "image of ope(chi, chi)", text

    r.run("iso.phi_betagamma.homomorphism", f"{src}->{tgt}", {}, hom)

    def chi_image():
        chi = Field.generator(phi.source, "chi")
        res = ope(phi.image(chi), phi.image(chi))
        want = RatFunc.pole(Fraction(1, 2))
        return res.central() == want and not res.non_central(), format_ratfunc(want), format_ope_result(res)

    r.run("iso.phi_betagamma.chi_image_ope", tgt, {}, chi_image)

    def interchange():
        b, g = Field.generator(phi.target, "beta"), Field.generator(phi.target, "gamma")
        lhs = phi.inverse_image(normal_product(b, g))
        rhs = normal_product(catalog.beta_chi(), catalog.gamma_chi())
        return lhs == rhs, format_field(rhs), format_field(lhs)

    r.run("iso.phi_betagamma.interchange", src, {}, interchange)

    def heis_image():
        lhs = phi.image(catalog.h_chi_tw())
        rhs = catalog.substitute_power(catalog.h_bg_tw(), 2)
        return lhs == rhs, format_field(rhs), format_field(lhs)

    r.run("iso.phi_betagamma.h_twisted", tgt, {}, heis_image)

    def dictionary():
        rep = catalog.mode_dictionary_check(3, opts.cutoff_e, min(opts.cutoff_p, 4))
        bad = [f"[{x}_{m},{y}_{n}]" for x, m, y, n, a, b, w in rep.rows if not (a == b == w)]
        return rep.ok, "chi side = betagamma side = delta", f"{len(rep.rows)} brackets; wrong: {bad[:6]}"

    r.run("iso.phi_betagamma.mode_dictionary", f"{src},betagamma", {"cutoff_e": opts.cutoff_e}, dictionary)

    def ident(lam, mu, expect_equal):
        def body():
            rep = solitary_identification(lam, mu)
            want = "equal" if expect_equal else "nonzero difference"
            got = "equal" if rep.equal else f"difference {format_field(rep.difference)}"
            return rep.equal == expect_equal, want, got
        return body

    r.run("iso.solitary_identification", src, {"lam": "-1/2", "mu": "1/4"},
          ident(Fraction(-1, 2), Fraction(1, 4), True))
    r.run("iso.solitary_identification.mu_negative", src, {"lam": "-1/2", "mu": "-1/4"},
          ident(Fraction(-1, 2), Fraction(-1, 4), True))
    r.run("iso.solitary_identification.mu_zero", src, {"lam": "-1/2", "mu": "0"},
          ident(Fraction(-1, 2), Fraction(0), False))
    return r.reports


def suite_symplectic(opts: Options) -> list[VerificationReport]:
    r = _Runner()
    top = opts.n if opts.n is not None else 3
    for n in range(1, top + 1):
        q = phi_sb(n)

        def round_trip(q=q):
            bad = q.round_trip_errors()
            return not bad, "[]", str(bad)

        def hom(q=q):
            rep = check_homomorphism(q)
            return rep.ok, "image of ope(chi, chi)", "; ".join(format_ope_result(p.computed) for p in rep.pairs)

        def pairs(n=n, q=q):
            bad = []
            for a in range(1, 2 * n + 1):
                for b in range(1, 2 * n + 1):
                    got = ope(catalog.xi_chi(a, n), catalog.xi_chi(b, n))
                    want = ope(Field.generator(q.target, f"xi{a}"), Field.generator(q.target, f"xi{b}"))
                    if got.non_central() or got.central() != want.central():
                        bad.append(f"({a},{b}): {format_ope_result(got)}")
            return not bad, f"i J^ab/(z^{2 * n}-w^{2 * n}) for all {4 * n * n} pairs", "all match" if not bad else "; ".join(bad)

        r.run(f"symplectic.n{n}.round_trip", q.source.name, {"n": n}, round_trip)
        r.run(f"symplectic.n{n}.homomorphism", q.target.name, {"n": n}, hom)
        r.run(f"symplectic.n{n}.xi_opes", q.source.name, {"n": n}, pairs)

    def reduction():
        ok = catalog.xi_chi(1, 1) == catalog.beta_chi() and catalog.xi_chi(2, 1) == catalog.gamma_chi() * I
        return ok, "xi1 = beta_chi, xi2 = i gamma_chi", "equal" if ok else "different"

    r.run("symplectic.n1.reduces_to_betagamma", "chi", {}, reduction)
    return r.reports


def suite_appendix(opts: Options) -> list[VerificationReport]:
    r = _Runner()
    top = opts.n if opts.n is not None else 8
    for n in range(1, top + 1):
        for l in range(1, 2 * n + 1):
            def body(n=n, l=l):
                rep = verify_interpolation_identity(n, l)
                return rep.equal, rep.rhs, rep.lhs
            r.run(f"appendix.n{n}.l{l}", f"chi_N{2 * n}", {"n": n, "l": l}, body)
    return r.reports


def suite_fock(opts: Options) -> list[VerificationReport]:
    r = _Runner()
    params = {"cutoff_e": opts.cutoff_e, "cutoff_p": opts.cutoff_p}
    name = opts.field_name
    if name is not None:
        if name in ("h_chi_tw", "h_chi_utw", "h_bg_tw"):
            which = {v[0]: k for k, v in HEISENBERG.items()}[name]

            def body():
                rep = catalog.heisenberg_check(which, opts.cutoff_e, opts.cutoff_p, bound=3, pairs="diagonal")
                got = ", ".join(f"[{b.m},{b.n}]={_text(b.value)}" for b in rep.brackets)
                return all(b.ok for b in rep.brackets), "[h_m, h_-m] = -m", got

            r.run(f"fock.{name}", derived_field(name).system.name, params, body)
            return r.reports
        if name in ("chi", "L3"):
            pass
        else:
            raise ValueError(f"no Fock check for field {name!r}; choose chi, L3, h_chi_tw, h_chi_utw or h_bg_tw")

    def chi_modes():
        rep = catalog.chi_mode_check(Fraction(7, 2), opts.cutoff_e, opts.cutoff_e + 2)
        bad = [f"[{m},{n}]" for m, n, ok, _ in rep.rows if not ok]
        return rep.ok, "(-1)^(m-1/2) delta_{m,-n}", f"{len(rep.rows)} brackets; wrong: {bad}"

    def vir_modes():
        rep = catalog.virasoro_mode_check(1, 2, opts.cutoff_e, min(opts.cutoff_p, 4))
        bad = [f"[{m},{n}] {note}" for m, n, ok, note in rep.rows if not ok]
        return rep.ok, "(m-n) L_{m+n} + (m^3-m)/12 delta, c = 1", f"{len(rep.rows)} brackets; wrong: {bad}"

    if name in (None, "chi"):
        r.run("fock.chi", "chi", params, chi_modes)
    if name in (None, "L3"):
        r.run("fock.L3.virasoro_modes", "betagamma", {**params, "kappa": 1}, vir_modes)
    return r.reports


SUITE_FUNCS = {"ope": suite_ope, "heisenberg": suite_heisenberg, "virasoro": suite_virasoro, "iso": suite_iso,
               "symplectic": suite_symplectic, "appendix": suite_appendix, "fock": suite_fock}


def _run_suite(args) -> list[VerificationReport]:
    name, opts = args
    return SUITE_FUNCS[name](opts)


def run_suites(names, opts: Options, jobs: int = 1) -> list[VerificationReport]:
    """Run suites (in a process pool when jobs > 1); reports come back sorted by check id."""
    work = [(name, opts) for name in names]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_run_suite, work))
    else:
        chunks = [_run_suite(w) for w in work]
    return sorted((rep for chunk in chunks for rep in chunk), key=lambda rep: rep.check_id)


def apply_golden(reports: list[VerificationReport], golden: Path) -> None:
    """Compare computed text with <golden>/<check_id>.txt; missing files are written."""
    golden.mkdir(parents=True, exist_ok=True)
    for rep in reports:
        path = golden / f"{rep.check_id}.txt"
        if path.exists():
            if path.read_text().rstrip("\n") != rep.computed and rep.status == "pass":
                rep.status = "fail"
                rep.expected = f"golden: {path.read_text().rstrip()}"
        elif rep.status == "pass":
            path.write_text(rep.computed + "\n")


# command line ------------------------------------------------------------------------


def _scalar_arg(text: str) -> str:
    try:
        Fraction(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None
    return text


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="multiboson", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("suite", nargs="?", default=None, help=f"one of {', '.join(SUITES)}, all")
    v.add_argument("--suite", dest="suite_flag", default=None, help="same as the positional suite")
    v.add_argument("--n", type=int, default=None, help="largest n for the symplectic or appendix suites")
    v.add_argument("--family", default=None, help="single Virasoro family (L1, L2, L3, L3_chi, solitary)")
    v.add_argument("--field", dest="field_name", default=None, help="single field for the fock suite")
    for flag, dest in (("--a", "a"), ("--b", "b"), ("--lambda", "lam"), ("--mu", "mu"), ("--kappa", "kappa")):
        v.add_argument(flag, dest=dest, type=_scalar_arg, default=None)
    v.add_argument("--cutoff-e", type=_scalar_arg, default="6")
    v.add_argument("--cutoff-p", type=int, default=6)
    v.add_argument("--series-order", type=int, default=12)
    v.add_argument("--report", type=Path, default=None, help="write the JSON report here")
    v.add_argument("--golden", type=Path, default=None, help="directory of golden canonical texts")
    v.add_argument("--jobs", type=int, default=1, help="worker processes for 'all'")

    o = sub.add_parser("ope", help="print the OPE of two fields")
    o.add_argument("system", help="chi, chi2, chi_N<N>, betagamma, betagamma_squared, symplectic, ...")
    o.add_argument("lhs")
    o.add_argument("rhs")

    sub.add_parser("fields", help="list catalog field names")
    return parser


def _system_for(name: str):
    if name.startswith("chi") and name[3:].isdigit():
        return catalog.chi_system(int(name[3:]))
    return get_system(name)


def _refs(system) -> dict:
    """Catalog fields that live in the given system, by name."""
    out = {}
    for name in catalog.DERIVED_NAMES:
        try:
            f = derived_field(name)
        except (KeyError, ValueError):
            continue
        if f.system is system:
            out[name] = f
    n = system.num_points
    if system.name.startswith("chi") and n % 2 == 0:
        for a in range(1, n + 1):
            out[f"xi_chi_{a}"] = catalog.xi_chi(a, n // 2)
    return out


class _Refs(dict):
    def __init__(self, system):
        super().__init__()
        self.system = system
        self.loaded = False

    def _load(self):
        if not self.loaded:
            self.update(_refs(self.system))
            self.loaded = True

    def __contains__(self, key):
        self._load()
        return super().__contains__(key)

    def __getitem__(self, key):
        self._load()
        return super().__getitem__(key)


def cmd_ope(args, out) -> int:
    system = _system_for(args.system)
    refs = _Refs(system)
    lhs = parse_field(args.lhs, system, refs)
    rhs = parse_field(args.rhs, system, refs)
    res = ope(lhs, rhs)
    print(format_ope_result(res), file=out)
    print(f"locality {locality_profile(lhs, rhs)}", file=out)
    return 0


def cmd_verify(args, out) -> int:
    suite = args.suite_flag or args.suite or "all"
    if suite != "all" and suite not in SUITES:
        print(f"error: unknown suite {suite!r}; choose from {', '.join(SUITES)}, all", file=sys.stderr)
        return 2
    params = {k: getattr(args, k) for k in ("a", "b", "lam", "mu", "kappa") if getattr(args, k) is not None}
    opts = Options(args.n, args.family, params, args.field_name, Fraction(args.cutoff_e), args.cutoff_p,
                   args.series_order)
    if args.report is not None:
        try:
            args.report.parent.mkdir(parents=True, exist_ok=True)
            args.report.touch()
        except OSError as exc:
            print(f"error: cannot write report {args.report}: {exc}", file=sys.stderr)
            return 2
    names = list(SUITES) if suite == "all" else [suite]
    reports = run_suites(names, opts, args.jobs)
    if args.golden is not None:
        apply_golden(reports, args.golden)
    for rep in reports:
        print(f"{rep.status.upper():5} {rep.check_id}: {rep.computed}", file=out)
    n_pass = sum(rep.status == "pass" for rep in reports)
    print(f"{n_pass}/{len(reports)} checks passed", file=out)
    if args.report is not None:
        args.report.write_text(json.dumps([asdict(rep) for rep in reports], indent=2, sort_keys=True) + "\n")
    if any(rep.status == "error" for rep in reports):
        return 2
    return 0 if n_pass == len(reports) else 1


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        if args.command == "ope":
            return cmd_ope(args, out)
        if args.command == "fields":
            for name in catalog.DERIVED_NAMES:
                print(name, file=out)
            return 0
        return cmd_verify(args, out)
    except (ParseError, PoleError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
