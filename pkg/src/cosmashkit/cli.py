"""Command-line entry point: ``cosmashkit <verb> [options]``.

Exit status: 0 success, 1 a check failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import pickle
import random
import sys
from typing import Sequence

from . import eqsys
from .commpoly import DEGREVLEX, LEX, CommPolynomial, parse_poly
from .cosmash import (FDAlgebra, FreeFactor, ca_cosmash_tensor_check, ca_ternary_kernel_dimension,
                      closure_check, comparison_phi, comparison_psi, comparison_quaternary, cosmash,
                      higgins_commutator, independence_check, random_ca_algebra, random_instance)
from .exactarith import QQ, ZZ, ParseError, format_decimal, gcd, parse_decimal, parse_field
from .groebner import BudgetExceeded, NotInIdeal, buchberger, clear_denominators, lift
from .hrewrite import h_compose, render
from .magma import parse_expression, print_expression
from .variety import (Empty, builtin_variety, classify_degree2, is_identity, load_variety,
                      multilinearise, solve_lambda_rules, VarietyPresentation)


class UsageError(Exception):
    pass


class Output:
    """Collects human lines and a JSON result; prints one of them at the end."""

    def __init__(self, as_json: bool, out_path: str | None):
        self.as_json = as_json
        self.out_path = out_path
        self.lines: list[str] = []
        self.data: dict = {}

    def say(self, line: str = "") -> None:
        self.lines.append(line)

    def put(self, **kw) -> None:
        self.data.update(kw)

    def flush(self, status: int) -> None:
        self.data.setdefault("status", status)
        text = json.dumps(self.data, indent=2, sort_keys=True) if self.as_json else "\n".join(self.lines)
        print(text)


# -- shared helpers -----------------------------------------------------------------

def _field(args):
    try:
        return parse_field(args.field)
    except (ParseError, ValueError) as e:
        raise UsageError(str(e))


def _order(args):
    return LEX if args.order == "lex" else DEGREVLEX


def _variety(args, field=None) -> VarietyPresentation:
    spec = args.variety
    if spec is None:
        raise UsageError("--variety is required")
    F = field or _field(args)
    if spec.startswith("ids:"):
        ids = [s for s in spec[4:].split(";") if s.strip()]
        return VarietyPresentation("custom", [parse_expression(s, F) for s in ids], F)
    if os.path.exists(spec):
        V = load_variety(spec)
        return V if V.field == F or args.field is None else V.with_field(F)
    try:
        return builtin_variety(spec, F)
    except KeyError as e:
        raise UsageError(str(e.args[0]))


def _assignment(text: str) -> dict:
    if text in eqsys.ASSIGNMENTS:
        return eqsys.named_assignment(text)
    if os.path.exists(text):
        with open(text) as fh:
            text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise UsageError(f"--assign: not a known name, file or JSON object ({e})")
    if not isinstance(data, dict):
        raise UsageError("--assign must be a JSON object")
    return data


def _factors(text: str) -> list[FreeFactor]:
    """``a;b;c`` or ``a1,a2;b`` -> free factors."""
    return [FreeFactor(tuple(g.strip() for g in block.split(",") if g.strip()))
            for block in text.split(";") if block.strip()]


def _load_algebra(path: str) -> FDAlgebra:
    with open(path) as fh:
        return FDAlgebra.from_json(json.load(fh))


def _poly_text(f: CommPolynomial) -> str:
    return f.to_text()


# -- verbs --------------------------------------------------------------------------

def cmd_gen_eqs(args, out: Output) -> int:
    system = eqsys.generate_system(eqsys.RuleTable(swap_delta=args.swap_delta)) if args.swap_delta \
        else eqsys.generate_system()
    sizes = [e - s for _, s, e in system.blocks]
    out.say(f"{len(system)} equations in {len(system.blocks)} blocks "
            f"({sizes.count(4)} of 4, {sizes.count(8)} of 8)")
    out.put(equations=len(system), blocks=len(system.blocks))
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(system.to_json(), fh, indent=1)
        out.say(f"wrote {args.out}")
    if args.print:
        for i, f in enumerate(system, start=1):
            out.say(f"f{i} = {_poly_text(f)}")
    if args.check_appendix:
        rep = eqsys.check_against_fixture(system)
        n = len(eqsys.appendix_system())
        out.say(f"{rep.matched}/{n} matched")
        out.put(matched=rep.matched, missing=rep.missing, extra=rep.extra)
        return 0 if rep.ok else 1
    return 0


def cmd_gcd_check(args, out: Output) -> int:
    m, mp = eqsys.certificate_integers()
    sm, smp = eqsys.certificate_strings()
    roundtrip = format_decimal(m) == sm and format_decimal(mp) == smp
    g = gcd(m, mp)
    out.say(f"m has {len(sm)} digits, m' has {len(smp)} digits")
    out.say(f"decimal round-trip: {'ok' if roundtrip else 'FAILED'}")
    out.say(f"gcd(m, m') = {g}")
    out.put(gcd=g, roundtrip=roundtrip, digits=[len(sm), len(smp)])
    return 0 if roundtrip and g == 2 else 1


def _system_from_args(args, F):
    if getattr(args, "input", None):
        with open(args.input) as fh:
            text = fh.read()
        try:
            data = json.loads(text)
            return eqsys.EquationSystem.from_json(data, ZZ).change_ring(F).equations
        except json.JSONDecodeError:
            return [parse_poly(ln, F) for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    return eqsys.generate_system().change_ring(F).equations


def _budget(args) -> dict:
    return {"max_seconds": float(args.budget)} if args.budget is not None else {}


def cmd_groebner(args, out: Output) -> int:
    F = _field(args)
    eqs = _system_from_args(args, F)
    try:
        gb = buchberger(eqs, _order(args), **_budget(args))
    except BudgetExceeded as e:
        out.say(f"budget exceeded: {e}")
        out.put(budget_exceeded=True)
        return 1
    out.say(f"reduced basis over {F.spec} ({args.order}), {len(gb.basis)} elements, "
            f"{gb.pairs_processed} pairs, max degree {gb.max_degree}")
    for g in gb.basis:
        out.say(f"  {_poly_text(g)}")
    out.put(basis=[_poly_text(g) for g in gb.basis], pairs=gb.pairs_processed)
    return 0


def cmd_inconsistency(args, out: Output) -> int:
    F = _field(args)
    eqs = _system_from_args(args, F)
    try:
        gb = buchberger(eqs, _order(args), **_budget(args))
    except BudgetExceeded as e:
        out.say(f"budget exceeded: {e}")
        out.put(budget_exceeded=True)
        return 1
    if gb.is_unit():
        out.say("reduced basis = {1}")
    else:
        out.say(f"reduced basis has {len(gb.basis)} elements; system is consistent over {F.spec}")
    out.put(field=F.spec, inconsistent=gb.is_unit(), basis_size=len(gb.basis))
    return 0 if gb.is_unit() else 1


def cmd_eval_assignment(args, out: Output) -> int:
    if args.assign is None:
        raise UsageError("--assign is required")
    F = _field(args)
    system = eqsys.appendix_system()  # published numbering
    try:
        bad = eqsys.evaluate_assignment(system, _assignment(args.assign), F)
    except KeyError as e:
        raise UsageError(str(e.args[0]))
    out.say(f"{len(bad)} of {len(system)} equations violated")
    for i, v in bad:
        out.say(f"  f{i} = {v}")
    out.put(violated=[[i, str(v)] for i, v in bad])
    return 0 if not bad else 1


def cmd_certificate(args, out: Output) -> int:
    if args.toy:
        ok_all = True
        for name, fs, mu, n in eqsys.toy_certificates():
            ok = eqsys.verify_certificate(fs, mu, n)
            ok_all &= ok
            out.say(f"{name}: sum mu_i f_i = {n}: {'ok' if ok else 'FAILED'}")
        out.put(toys_ok=ok_all)
        return 0 if ok_all else 1
    system = eqsys.generate_system()
    if args.mu:
        if args.expect is None:
            raise UsageError("--mu needs --expect")
        with open(args.mu) as fh:
            data = json.load(fh)
        mu = [parse_poly(t, ZZ) for t in data["cofactors"]] if isinstance(data, dict) else \
            [parse_poly(t, ZZ) for t in data]
        ok = eqsys.verify_certificate(system, mu, parse_decimal(args.expect))
        out.say(f"certificate {'verified' if ok else 'REJECTED'}")
        out.put(verified=ok)
        return 0 if ok else 1
    # attempt the lift over QQ
    F = _field(args)
    eqs = system.change_ring(F).equations
    budget = _budget(args)
    if args.resume:
        with open(args.resume, "rb") as fh:
            budget["resume"] = pickle.load(fh)
    try:
        cof = lift(eqs, CommPolynomial.constant(1, F), _order(args), **budget)
    except BudgetExceeded as e:
        if args.out:
            with open(args.out + ".state", "wb") as fh:
                pickle.dump(e.state, fh)
            out.say(f"budget exceeded; state saved to {args.out}.state")
        else:
            out.say("budget exceeded")
        out.put(budget_exceeded=True)
        return 1
    except NotInIdeal:
        out.say("1 is not in the ideal")
        return 1
    mu, n = clear_denominators(cof) if F == QQ else (cof, 1)
    ok = eqsys.verify_certificate(system.change_ring(ZZ) if F == QQ else system.change_ring(F), mu, n)
    out.say(f"sum mu_i f_i = {n}; verified: {ok}")
    out.put(n=str(n), verified=ok)
    if args.out:
        with open(args.out, "w") as fh:
            json.dump({"cofactors": [_poly_text(m) for m in mu], "n": str(n)}, fh)
    return 0 if ok else 1


def cmd_variety(args, out: Output) -> int:
    F = _field(args)
    V = _variety(args, F) if args.action != "multilinearise" else None
    if args.action == "check-identity":
        if not args.expr:
            raise UsageError("check-identity needs an identity")
        ok = is_identity(V, args.expr[0], F)
        out.say(f"{args.expr[0]} is {'an identity' if ok else 'not an identity'} of {V.name} over {F.spec}")
        out.put(identity=ok)
        return 0 if ok else 1
    if args.action == "classify":
        c = classify_degree2(V, F)
        out.say(f"{V.name} over {F.spec}: {c.value}")
        out.put(classification=c.value)
        return 0
    if args.action == "lambda-solve":
        sol = solve_lambda_rules(V, F)
        if sol is Empty:
            out.say("Empty")
            out.put(solution=None)
            return 0
        out.say("particular: " + ", ".join(f"{k}={v}" for k, v in sol.particular.items() if v))
        out.say(f"kernel dimension: {sol.dimension}")
        for k in sol.kernel:
            out.say("  " + ", ".join(f"{n}={v}" for n, v in k.items()))
        out.put(particular={k: str(v) for k, v in sol.particular.items()},
                kernel=[{k: str(v) for k, v in vec.items()} for vec in sol.kernel])
        if args.assign:
            ok = sol.contains(_assignment(args.assign))
            out.say(f"assignment {'is' if ok else 'is not'} a solution")
            out.put(contains=ok)
            return 0 if ok else 1
        return 0
    if args.action == "multilinearise":
        if not args.expr:
            raise UsageError("multilinearise needs an expression")
        try:
            res = multilinearise(args.expr[0], F)
        except ValueError as e:
            raise UsageError(str(e))
        for p in res:
            out.say(print_expression(p))
        out.put(result=[print_expression(p) for p in res])
        return 0
    raise UsageError(f"unknown variety action {args.action}")


def cmd_cosmash(args, out: Output) -> int:
    F = _field(args)
    V = _variety(args, F)
    d = args.degree
    if args.action == "report":
        facs = _factors(args.factors or "a;b")
        if args.map in ("phi", "psi"):
            if len(facs) != 3:
                raise UsageError("--map needs three factors")
            rep = (comparison_phi if args.map == "phi" else comparison_psi)(V, *facs, d)
            out.say(rep.summary())
            out.put(**rep.to_json())
            return 0
        res = cosmash(V, facs, d)
        out.say(f"{len(facs)}-ary cosmash in {V.name} up to degree {d}: dimension {res.dimension}")
        for w, n in res.dimension_by_weight().items():
            out.say(f"  degree {w}: {n}")
        for p in res.polynomials():
            out.say(f"  {print_expression(p)}")
        out.put(dimension=res.dimension, by_degree={str(k): v for k, v in res.dimension_by_weight().items()})
        return 0
    if args.action == "independence":
        if not args.monomials:
            raise UsageError("independence needs --monomials")
        mons = [m.strip() for m in args.monomials.split(",") if m.strip()]
        facs = _factors(args.factors) if args.factors else \
            [FreeFactor((g,)) for g in sorted({ch for m in mons for ch in m if ch.isalpha()})]
        res = independence_check(V, mons, facs, d)
        out.say("independent" if res.independent else f"dependent: {print_expression(res.witness)} = 0")
        out.put(independent=res.independent, witness=print_expression(res.witness) if res.witness else None)
        return 0 if res.independent else 1
    if args.action == "quaternary":
        facs = _factors(args.factors or "a;b;c;d")
        if len(facs) != 4:
            raise UsageError("quaternary needs four factors")
        rep = comparison_quaternary(V, *facs, d)
        out.say(rep.summary())
        out.put(**rep.to_json())
        return 0
    raise UsageError(f"unknown cosmash action {args.action}")


def cmd_ca(args, out: Output) -> int:
    F = _field(args)
    rng = random.Random(args.seed)
    if args.action == "tensor-check":
        if args.algebra:
            algs = [_load_algebra(p) for p in args.algebra]
            trials = [algs]
        else:
            k = 3 if args.ternary else 2
            trials = [[random_ca_algebra(rng.randint(1, args.max_dim), F, rng, p) for p in "efg"[:k]]
                      for _ in range(args.random)]
        ok_all = True
        for algs in trials:
            ok = ca_cosmash_tensor_check(*algs)
            ok_all &= ok
            dims = "x".join(str(a.dimension) for a in algs)
            extra = ""
            if len(algs) == 3:
                extra = " kernel dims (definition, cross effect) = %s" % (ca_ternary_kernel_dimension(*algs),)
            out.say(f"dims {dims}: {'ok' if ok else 'FAILED'}{extra}")
        out.put(ok=ok_all, trials=len(trials))
        return 0 if ok_all else 1
    if args.action == "closure-check":
        if not args.identity:
            raise UsageError("closure-check needs --identity")
        kind = args.kind
        ok_all = True
        for _ in range(args.random):
            A = random_instance(kind, rng.randint(1, args.max_dim), F, rng, "e")
            B = random_instance(kind, rng.randint(1, args.max_dim), F, rng, "f")
            ok = closure_check(args.identity, A, B, F)
            ok_all &= ok
            out.say(f"dims {A.dimension}x{B.dimension}: {'closed' if ok else 'NOT closed'}")
        out.put(ok=ok_all)
        return 0 if ok_all else 1
    raise UsageError(f"unknown ca action {args.action}")


def cmd_h_apply(args, out: Output) -> int:
    result = h_compose(args.monomial, args.steps)
    order = [m.strip() for m in args.order_terms.split(",")] if args.order_terms else None
    try:
        text = render(result, order)
    except ValueError as e:
        raise UsageError(str(e))
    out.say(text)
    out.put(result=text, terms={str(m): c.to_text() for m, c in result.terms.items()})
    return 0


def cmd_higgins(args, out: Output) -> int:
    if not (args.algebra and args.K and args.L):
        raise UsageError("higgins needs --algebra, --K and --L")
    A = _load_algebra(args.algebra[0])
    K = json.loads(args.K)
    L = json.loads(args.L)
    try:
        res = higgins_commutator(A, K, L, args.degree)
    except ValueError as e:
        out.say(str(e))
        return 1
    out.say(f"[K, L] has dimension {res.dimension} ({'exact' if res.exact else f'approximate at bound {args.degree}'})")
    for v in res.basis:
        out.say("  " + " ".join(str(x) for x in v))
    out.put(dimension=res.dimension, exact=res.exact, basis=[[str(x) for x in v] for v in res.basis])
    return 0


# -- argument parsing ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--field", default="q", help="q, z or fp:<p>")
    common.add_argument("--order", choices=["degrevlex", "lex"], default="degrevlex")
    common.add_argument("--degree", type=int, default=3)
    common.add_argument("--variety", help="built-in name, variety file, or ids:<identity>;<identity>")
    common.add_argument("--assign", help="assignment: name, JSON file or JSON object")
    common.add_argument("--mu", help="cofactor file (JSON list of polynomials)")
    common.add_argument("--expect", help="expected integer n of a certificate")
    common.add_argument("--budget", type=float, help="time budget in seconds")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--out", help="output file")

    p = argparse.ArgumentParser(prog="cosmashkit", description="Cosmash products and the rule-coefficient system.")
    sub = p.add_subparsers(dest="verb", required=True)

    s = sub.add_parser("gen-eqs", parents=[common], help="generate the 96 equations")
    s.add_argument("--check-appendix", action="store_true")
    s.add_argument("--swap-delta", action="store_true")
    s.add_argument("--print", action="store_true")
    s.set_defaults(run=cmd_gen_eqs)

    s = sub.add_parser("gcd-check", parents=[common], help="gcd of the two published certificate integers")
    s.set_defaults(run=cmd_gcd_check)

    for verb, fn in (("groebner", cmd_groebner), ("inconsistency", cmd_inconsistency)):
        s = sub.add_parser(verb, parents=[common])
        s.add_argument("--input", help="polynomials (one per line) or a system JSON; default: the 96 equations")
        s.set_defaults(run=fn)

    s = sub.add_parser("eval-assignment", parents=[common])
    s.set_defaults(run=cmd_eval_assignment)

    s = sub.add_parser("certificate", parents=[common])
    s.add_argument("--toy", action="store_true", help="verify the built-in toy certificates")
    s.add_argument("--resume", help="continue a lift from a saved .state file")
    s.set_defaults(run=cmd_certificate)

    s = sub.add_parser("variety", parents=[common])
    s.add_argument("action", choices=["check-identity", "classify", "lambda-solve", "multilinearise"])
    s.add_argument("expr", nargs="*")
    s.set_defaults(run=cmd_variety)

    s = sub.add_parser("cosmash", parents=[common])
    s.add_argument("action", choices=["report", "independence", "quaternary"])
    s.add_argument("--factors", help="blocks separated by ';', generators by ','")
    s.add_argument("--map", choices=["none", "phi", "psi"], default="none")
    s.add_argument("--monomials", help="comma-separated monomials")
    s.set_defaults(run=cmd_cosmash)

    s = sub.add_parser("ca", parents=[common])
    s.add_argument("action", choices=["tensor-check", "closure-check"])
    s.add_argument("--algebra", action="append", help="FDAlgebra JSON file (repeatable)")
    s.add_argument("--random", type=int, default=3, help="number of random instances")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--max-dim", type=int, default=3)
    s.add_argument("--ternary", action="store_true")
    s.add_argument("--identity")
    s.add_argument("--kind", choices=["ca", "square_zero", "nil", "bool"], default="ca")
    s.set_defaults(run=cmd_ca)

    s = sub.add_parser("h-apply", parents=[common], help="apply pull-out operators, innermost first")
    s.add_argument("monomial")
    s.add_argument("steps", nargs="+", help="submonomials X, applied left to right")
    s.add_argument("--order-terms", help="comma-separated output monomials in display order")
    s.set_defaults(run=cmd_h_apply)

    s = sub.add_parser("higgins", parents=[common])
    s.add_argument("--algebra", action="append")
    s.add_argument("--K", help="JSON list of spanning vectors")
    s.add_argument("--L", help="JSON list of spanning vectors")
    s.set_defaults(run=cmd_higgins)
    return p


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args, extra = parser.parse_known_args(argv)
        # a trailing expression after the options lands here
        if extra:
            if getattr(args, "expr", None) is None or any(x.startswith("--") for x in extra):
                parser.error(f"unrecognized arguments: {' '.join(extra)}")
            args.expr = list(args.expr) + extra
    except SystemExit as e:
        return int(e.code or 0)
    out = Output(args.json, args.out)
    try:
        status = args.run(args, out)
    except (UsageError, ParseError) as e:
        print(f"cosmashkit {args.verb}: error: {e}", file=sys.stderr)
        return 2
    out.flush(status)
    return status


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
