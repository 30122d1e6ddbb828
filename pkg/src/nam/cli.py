"""Batch front-end: ``nam run``, ``nam validate`` and ``nam oracle``.

A scenario file holds one scenario or ``{"scenarios": [...]}``. Each
scenario names a command, its inputs (inline documents or paths relative to
the scenario file) and command parameters. Reports are canonical JSON; exit
status is 0 when every check passes, 1 when a mathematical check fails and
2 for input or operation errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction
from pathlib import Path

import jsonschema

from nam import io
from nam.errors import NamError, SchemaError
from nam.kakutani import (
    Equivalent,
    Orthogonal,
    change_of_measure_holds,
    kakutani_decide,
    orthogonality_check,
)
from nam.linalg import (
    det,
    gauss_decompose,
    matmul,
    split_isometry,
    transpose,
)
from nam.measures import (
    BallMeasure,
    LocallyConstantFn,
    at_resolution,
    convolve,
    fourier_stieltjes,
    is_symmetric,
    product_measure,
    projection_matrix,
    pushforward,
    transform_lattice,
    weak_q_moment,
)
from nam.oracle import DEFAULT_CAP, enumerate_oracle
from nam.padic import PI_SQUARED_ENCLOSURE, pnorm
from nam.weak_dist import (
    check_consistency,
    check_tightness,
    minlos_sazonov_witness,
    sazonov_witness,
)

COMMANDS = (
    "transform",
    "convolve",
    "product",
    "pushforward",
    "moments",
    "consistency",
    "tightness",
    "kakutani",
    "orthogonality",
    "decompose",
    "split",
    "minlos",
    "sazonov-witness",
    "verify-identities",
)

SCENARIO_SCHEMA = {
    "type": "object",
    "properties": {
        "command": {"enum": list(COMMANDS)},
        "inputs": {"type": "object"},
        "params": {"type": "object"},
    },
    "required": ["command"],
    "additionalProperties": False,
}

BATCH_SCHEMA = {
    "type": "object",
    "properties": {"scenarios": {"type": "array", "items": SCENARIO_SCHEMA}},
    "required": ["scenarios"],
    "additionalProperties": False,
}

rat = io.rat


def approx(x: float, bound: float) -> dict:
    return {"approx": float(x), "error_bound": float(bound)}


def check(name: str, passed: bool, **detail) -> dict:
    return {"name": name, "passed": bool(passed), **detail}


class Inputs:
    """Resolves scenario inputs, loading paths relative to the scenario file."""

    def __init__(self, raw: dict, base: Path):
        self.raw = raw
        self.base = base

    def doc(self, key: str):
        if key not in self.raw:
            raise SchemaError(f"scenario input {key!r} is missing")
        v = self.raw[key]
        if isinstance(v, str):
            path = self.base / v
            try:
                return json.loads(path.read_text())
            except FileNotFoundError:
                raise SchemaError(f"input file {path} not found") from None
            except json.JSONDecodeError as exc:
                raise SchemaError(f"input file {path} is not JSON: {exc}") from None
        return v

    def measure(self, key: str) -> BallMeasure:
        return io.measure_from_json(self.doc(key))

    def measures(self, key: str) -> list[BallMeasure]:
        docs = self.doc(key)
        if not isinstance(docs, list):
            raise SchemaError(f"input {key!r} must be a list of measures")
        return [io.measure_from_json(Inputs({"_": d}, self.base).doc("_")) for d in docs]


def _vec(v) -> tuple:
    return tuple(io.parse_rat(x) for x in v)


def _cyc(c) -> dict:
    z = c.complex_approx()
    # each term carries a few ulps from exp and the product; the sum adds one more
    err = 4 * sum(abs(float(x)) for x in c.coeffs) * 2.0**-52
    return {"exact": io.cyclotomic_to_json(c), "complex": [approx(z.real, err), approx(z.imag, err)]}


def _lattice(params: dict, *measures: BallMeasure, cap: int) -> list[tuple]:
    if "z" in params:
        return [_vec(z) for z in params["z"]]
    lat = transform_lattice(*measures)
    if len(lat) > cap:
        raise SchemaError(f"transform lattice of {len(lat)} points exceeds cap {cap}")
    return lat


def _unified(*mus: BallMeasure) -> list[BallMeasure]:
    m = max(mu.m for mu in mus)
    return [at_resolution(mu, m) if mu.refinable else mu for mu in mus]


# -- commands ----------------------------------------------------------------


def cmd_transform(inp: Inputs, params: dict, cap: int):
    mu = inp.measure("mu")
    zs = _lattice(params, mu, cap=cap)
    values = [(z, fourier_stieltjes(mu, z)) for z in zs]
    zero = fourier_stieltjes(mu, (0,) * mu.n)
    result = {"values": [{"z": [rat(x) for x in z], "theta": _cyc(v)} for z, v in values]}
    return result, [check("theta(0) = mu(X)", zero == mu.total_mass())]


def _convolution_checks(mu, nu, cap):
    mu, nu = _unified(mu, nu)
    conv = convolve(mu, nu)
    zs = _lattice({}, mu, nu, conv, cap=cap)
    bad = [z for z in zs if fourier_stieltjes(conv, z) != fourier_stieltjes(mu, z) * fourier_stieltjes(nu, z)]
    return conv, check("convolution theorem", not bad, points=len(zs), failures=len(bad))


def cmd_convolve(inp, params, cap):
    conv, chk = _convolution_checks(inp.measure("mu"), inp.measure("nu"), cap)
    return {"measure": io.measure_to_json(conv)}, [chk]


def _product_checks(mu, nu, cap):
    mu, nu = _unified(mu, nu)
    prod = product_measure(mu, nu)
    za = _lattice({}, mu, cap=cap)
    zb = _lattice({}, nu, cap=cap)
    if len(za) * len(zb) > cap:
        raise SchemaError("product lattice exceeds cap")
    bad = 0
    for a in za:
        ta = fourier_stieltjes(mu, a)
        for b in zb:
            if fourier_stieltjes(prod, a + b) != ta * fourier_stieltjes(nu, b):
                bad += 1
    marg = pushforward(prod, projection_matrix(prod.n, range(mu.n)), m=prod.m)
    return prod, [
        check("product factorization", bad == 0, points=len(za) * len(zb), failures=bad),
        check("first marginal of product", marg == at_resolution(mu, prod.m).replace(refinable=False)),
    ]


def cmd_product(inp, params, cap):
    prod, checks = _product_checks(inp.measure("mu"), inp.measure("nu"), cap)
    return {"measure": io.measure_to_json(prod)}, checks


def _pushforward_checks(mu, T, cap, m=None):
    nu = pushforward(mu, T, m)
    zs = _lattice({}, nu, cap=cap)
    bad = 0
    for z in zs:
        tz = tuple(sum((T[i][j] * z[i] for i in range(len(T))), Fraction(0)) for j in range(mu.n))
        if fourier_stieltjes(nu, z) != fourier_stieltjes(mu, tz):
            bad += 1
    return nu, check("pushforward adjoint law", bad == 0, points=len(zs), failures=bad)


def cmd_pushforward(inp, params, cap):
    mu = inp.measure("mu")
    if "matrix" in params:
        T = [[io.parse_rat(x) for x in row] for row in params["matrix"]]
    elif "keep" in params:
        T = projection_matrix(mu.n, params["keep"])
    else:
        raise SchemaError("pushforward needs params.matrix or params.keep")
    nu, chk = _pushforward_checks(mu, T, cap, params.get("m"))
    return {"measure": io.measure_to_json(nu)}, [chk]


def cmd_moments(inp, params, cap):
    mu = inp.measure("mu")
    z = _vec(params["z"])
    q = Fraction(str(params.get("q", 1)))
    # integral q keeps the moment exact; anything else goes through floats
    q = int(q) if q.denominator == 1 else float(q)
    value, bound = weak_q_moment(mu, z, q)
    if isinstance(value, Fraction):
        res = {"value": rat(value), "error_bound": rat(bound)}
    else:
        res = {"value": approx(value, bound)}
    return res, [check("truncation bound nonnegative", bound >= 0)]


def _expect(params: dict, n: int) -> list:
    exp = params.get("expect")
    if exp is None:
        return [True] * n
    if isinstance(exp, bool):
        return [exp] * n
    if len(exp) != n:
        raise SchemaError(f"params.expect must have {n} entries")
    return [bool(e) for e in exp]


def cmd_consistency(inp, params, cap):
    wd = io.weak_dist_from_json(inp.doc("wd"))
    rep = check_consistency(wd)
    res = {
        "ok": rep.ok,
        "pair": list(rep.pair) if rep.pair else None,
        "discrepancy": [
            {"center": [rat(x) for x in c], "difference": rat(d)} for c, d in rep.discrepancy.items()
        ],
    }
    (want,) = _expect(params, 1)
    return res, [check("consistency", rep.ok == want, ok=rep.ok, expected=want)]


def cmd_tightness(inp, params, cap):
    wd = io.weak_dist_from_json(inp.doc("wd"))
    schedule = [(io.parse_rat(c), io.parse_rat(r)) for c, r in params["schedule"]]
    entries = check_tightness(wd, schedule)
    expected = _expect(params, len(entries))
    res = {
        "entries": [
            {
                "c": rat(e.c),
                "r": rat(e.r),
                "passed": e.passed,
                "witness_level": e.witness_level,
                "outside": [rat(v) for v in e.outside],
                "sup_norm": rat(e.sup_norm),
            }
            for e in entries
        ]
    }
    checks = [
        check(f"tightness at c={rat(e.c)}, r={rat(e.r)}", e.passed == want, tight=e.passed, expected=want)
        for e, want in zip(entries, expected)
    ]
    return res, checks


def _change_of_measure_checks(pp, verdict, max_len=6):
    ok = True
    for length in range(1, min(len(pp.factors), max_len) + 1):
        mu, nu = pp.truncated(length)
        q = verdict.partial_density(length)
        for c in nu.cells:
            h = LocallyConstantFn.from_table(mu.p, mu.n, mu.m, {c: Fraction(1)})
            ok &= change_of_measure_holds(mu, nu, q, h)
        ok &= change_of_measure_holds(mu, nu, q, LocallyConstantFn.constant(mu.p, mu.n, Fraction(1)))
    return ok


def cmd_kakutani(inp, params, cap):
    pp = io.product_pair_from_json(inp.doc("pair"))
    verdict = kakutani_decide(pp)
    betas = verdict.betas
    checks = [check("beta_j <= 1", all(b <= 1 for b in betas))]
    prod = Fraction(1)
    for b in betas:
        prod *= b
    if isinstance(verdict, Equivalent):
        res = {"verdict": "Equivalent", "betas": [rat(b) for b in betas], "product": rat(verdict.product)}
        checks.append(check("change of measure on truncated products", _change_of_measure_checks(pp, verdict)))
    else:
        res = {
            "verdict": "Singular",
            "betas": [rat(b) for b in betas],
            "certificate": {
                "prefix_product": rat(verdict.prefix_product),
                "tail_ratio": rat(verdict.ratio),
                "limit": "0",
            },
        }
        checks.append(check("certificate prefix product", verdict.prefix_product == prod))
    if "expect" in params:
        checks.append(check("expected verdict", res["verdict"] == params["expect"]))
    return res, checks


def cmd_orthogonality(inp, params, cap):
    mu, nu = inp.measure("mu"), inp.measure("nu")
    verdict = orthogonality_check(mu, nu)
    disjoint = not (set(mu.cells) & set(nu.cells))
    if isinstance(verdict, Orthogonal):
        res = {"verdict": "Orthogonal"}
    else:
        res = {"verdict": "Overlapping", "witness": [rat(x) for x in verdict.witness]}
    checks = [check("matches support disjointness", isinstance(verdict, Orthogonal) == disjoint)]
    return res, checks


def _matrix_json(rows):
    return [[rat(x) for x in row] for row in rows]


def cmd_decompose(inp, params, cap):
    op = io.operator_from_json(inp.doc("operator"))
    A = op.matrix()
    dec = gauss_decompose(op)
    dA = det(A)
    res = {
        "S": _matrix_json(dec.S),
        "C": _matrix_json(dec.C),
        "D": [rat(x) for x in dec.D],
        "E": _matrix_json(dec.E),
        "det": rat(dA),
        "permutation_cycles": dec.cycles(),
        "signs": list(dec.signs),
    }
    checks = [
        check("A = SCDE", dec.reconstruct() == A),
        check("det(D) = det(A)", dec.det_D == dA),
    ]
    if A == transpose(A) and not dec.cycles():
        checks.append(check("symmetric: E = C^t and S = I", [list(r) for r in dec.E] == transpose([list(r) for r in dec.C])))
    return res, checks


def cmd_split(inp, params, cap):
    op = io.operator_from_json(inp.doc("operator"))
    c = io.parse_rat(params["c"]) if "c" in params else None
    sp = split_isometry(op, c)
    A = op.matrix()
    res = {
        "n": sp.n,
        "A1": _matrix_json(sp.A1),
        "A2": _matrix_json(sp.A2),
        "bound": rat(sp.bound),
        "det_A1": rat(sp.det_A1),
        "det_A2": rat(sp.det_A2),
    }
    cval = c if c is not None else Fraction(1, op.p)
    checks = [
        check("A = A' A''", matmul([list(r) for r in sp.A1], [list(r) for r in sp.A2]) == A),
        check("entrywise isometry bound", sp.bound <= cval),
        check("|det A''|_p = 1", pnorm(sp.det_A2, op.p) == 1),
        check("det(A') det(A'') = det(A)", sp.det_A1 * sp.det_A2 == det(A)),
    ]
    return res, checks


def cmd_minlos(inp, params, cap):
    mu = inp.measure("mu")
    r = io.parse_rat(params.get("r", "1"))
    w = minlos_sazonov_witness(mu, r)
    lo, hi = PI_SQUARED_ENCLOSURE
    ok = all(
        (g == 0 and j == 0) or (abs(j) * lo <= g and g <= mu.p * abs(j) * hi)
        for jr, gr in zip(w.j_coeff, w.g)
        for j, g in zip(jr, gr)
    )
    res = {
        "J_over_pi_squared": _matrix_json(w.j_coeff),
        "g": _matrix_json(w.g),
        "xi": [[rat(x.value) for x in row] for row in w.xi],
    }
    return res, [check("|J| <= g <= p|J|", ok)]


def cmd_sazonov(inp, params, cap):
    mu = inp.measure("mu")
    eps = io.parse_rat(params["eps"])
    sw = sazonov_witness(mu, eps)
    res = {"radii": [rat(x) for x in sw.radii], "captured": rat(sw.captured), "pad": rat(sw.pad)}
    return res, [check("box captures 1 - eps", sw.captured >= 1 - eps)]


def cmd_verify(inp, params, cap):
    mus = inp.measures("measures")
    checks = []
    for i, mu in enumerate(mus):
        checks.append(check(f"theta(0) = mu(X) [{i}]", fourier_stieltjes(mu, (0,) * mu.n) == mu.total_mass()))
        zs = _lattice({}, mu, cap=cap)
        real = all(fourier_stieltjes(mu, z).is_real() for z in zs)
        checks.append(check(f"symmetric iff real transform [{i}]", real == is_symmetric(mu)))
        _, chk = _pushforward_checks(mu, [[-(i == j) for j in range(mu.n)] for i in range(mu.n)], cap)
        checks.append(check(f"negation adjoint law [{i}]", chk["passed"]))
    for i, mu in enumerate(mus):
        for j, nu in enumerate(mus):
            if j < i or mu.n != nu.n:
                continue
            _, chk = _convolution_checks(mu, nu, cap)
            checks.append(check(f"convolution theorem [{i},{j}]", chk["passed"]))
            _, pchecks = _product_checks(mu, nu, cap)
            for pc in pchecks:
                checks.append(check(f"{pc['name']} [{i},{j}]", pc["passed"]))
    return {"measures": len(mus)}, checks


DISPATCH = {
    "transform": cmd_transform,
    "convolve": cmd_convolve,
    "product": cmd_product,
    "pushforward": cmd_pushforward,
    "moments": cmd_moments,
    "consistency": cmd_consistency,
    "tightness": cmd_tightness,
    "kakutani": cmd_kakutani,
    "orthogonality": cmd_orthogonality,
    "decompose": cmd_decompose,
    "split": cmd_split,
    "minlos": cmd_minlos,
    "sazonov-witness": cmd_sazonov,
    "verify-identities": cmd_verify,
}


def run_scenario(scenario: dict, base: Path, cap: int = DEFAULT_CAP) -> dict:
    """Run one validated scenario; errors become an ``error`` entry."""
    try:
        jsonschema.validate(scenario, SCENARIO_SCHEMA)
    except jsonschema.ValidationError as exc:
        return {"command": scenario.get("command"), "error": {"type": "SchemaError", "message": exc.message}}
    cmd = scenario["command"]
    inp = Inputs(scenario.get("inputs", {}), base)
    try:
        result, checks = DISPATCH[cmd](inp, scenario.get("params", {}), cap)
    except (NamError, ValueError, KeyError, TypeError, ZeroDivisionError) as exc:
        return {
            "command": cmd,
            "error": {"type": type(exc).__name__, "module": type(exc).__module__, "message": str(exc)},
        }
    return {"command": cmd, "result": result, "checks": checks, "passed": all(c["passed"] for c in checks)}


def load_scenarios(path: Path) -> list[dict]:
    try:
        doc = json.loads(path.read_text())
    except FileNotFoundError:
        raise SchemaError(f"{path} not found") from None
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path} is not JSON: {exc}") from None
    if isinstance(doc, dict) and "scenarios" in doc:
        try:
            jsonschema.validate(doc, BATCH_SCHEMA)
        except jsonschema.ValidationError as exc:
            raise SchemaError(f"batch invalid: {exc.message}") from None
        return doc["scenarios"]
    return [doc]


def exit_code(reports: list[dict]) -> int:
    if any("error" in r for r in reports):
        return 2
    return 0 if all(r["passed"] for r in reports) else 1


def write_csv(reports: list[dict], directory: Path):
    directory.mkdir(parents=True, exist_ok=True)
    for i, rep in enumerate(reports):
        with open(directory / f"scenario_{i:03d}_{rep['command']}.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["check", "passed"])
            for c in rep.get("checks", []):
                w.writerow([c["name"], c["passed"]])


def main_run(args) -> int:
    path = Path(args.scenario)
    try:
        scenarios = load_scenarios(path)
    except SchemaError as exc:
        print(f"nam: {exc}", file=sys.stderr)
        return 2
    reports = [
        dict(run_scenario(s, path.parent, args.cap), index=i) for i, s in enumerate(scenarios)
    ]
    doc = reports[0] if len(reports) == 1 else {"reports": reports}
    text = io.dumps(doc)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if args.csv:
        write_csv(reports, Path(args.csv))
    return exit_code(reports)


def main_validate(args) -> int:
    path = Path(args.file)
    try:
        doc = json.loads(path.read_text())
    except (FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"nam: {exc}", file=sys.stderr)
        return 2
    try:
        if isinstance(doc, dict) and ("command" in doc or "scenarios" in doc):
            jsonschema.validate(doc, BATCH_SCHEMA if "scenarios" in doc else SCENARIO_SCHEMA)
            kind = "scenario"
        else:
            kind = args.kind or io.guess_kind(doc)
            if kind is None:
                raise SchemaError("cannot tell what kind of document this is; pass --kind")
            loaders = {
                "measure": io.measure_from_json,
                "weak_distribution": io.weak_dist_from_json,
                "product_pair": io.product_pair_from_json,
                "matrix": io.operator_from_json,
                "cyclotomic": io.cyclotomic_from_json,
            }
            loaders[kind](doc)
    except (SchemaError, NamError, ValueError) as exc:
        print(f"nam: invalid: {exc}", file=sys.stderr)
        return 2
    except jsonschema.ValidationError as exc:
        print(f"nam: invalid scenario: {exc.message}", file=sys.stderr)
        return 2
    print(f"{path}: valid {kind}")
    return 0


def main_oracle(args) -> int:
    grid = [io.parse_rat(g) for g in args.grid.split(",")]
    try:
        stream = enumerate_oracle(
            args.p, args.n, args.m, grid, cap=args.cap,
            probability=args.probability, max_support=args.max_support,
        )
        out = open(args.out, "w") if args.out else sys.stdout
        try:
            for mu in stream:
                out.write(json.dumps(io.measure_to_json(mu), sort_keys=True) + "\n")
        finally:
            if args.out:
                out.close()
    except (NamError, ValueError) as exc:
        print(f"nam: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nam", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="cmd", required=True)

    run = sub.add_parser("run", help="run a scenario file and emit a report")
    run.add_argument("scenario")
    run.add_argument("--out", help="write the report here instead of stdout")
    run.add_argument("--csv", help="directory for per-scenario CSV check tables")
    run.add_argument("--cap", type=int, default=DEFAULT_CAP, help="size cap for lattices")
    run.set_defaults(func=main_run)

    val = sub.add_parser("validate", help="validate a scenario or data document")
    val.add_argument("file")
    val.add_argument("--kind", choices=sorted(io.SCHEMAS))
    val.set_defaults(func=main_validate)

    ora = sub.add_parser("oracle", help="enumerate small measures as JSON lines")
    ora.add_argument("--p", type=int, required=True)
    ora.add_argument("--n", type=int, required=True)
    ora.add_argument("--m", type=int, required=True)
    ora.add_argument("--grid", required=True, help="comma-separated weights, e.g. 0,1/2,1")
    ora.add_argument("--probability", action="store_true")
    ora.add_argument("--max-support", type=int)
    ora.add_argument("--cap", type=int, default=DEFAULT_CAP)
    ora.add_argument("--out")
    ora.set_defaults(func=main_oracle)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
