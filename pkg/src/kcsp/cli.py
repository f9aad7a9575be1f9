"""``kcsp`` command-line workbench.

Every command prints a report holding the resolved configuration, the argv
that produced it and the result. ``kcsp replay REPORT`` re-runs the stored
argv and checks that the result is bit-identical.

Exit codes: 0 success, 1 validation error, 2 budget exceeded, 3 a
``verify`` check failed or a ``replay`` mismatched.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys

from kcsp import algorithms, csp_core, dictator_test, fourier, games, inequality_lab
from kcsp._rng import rng_for
from kcsp.errors import BudgetError, HypothesisUnmet, ValidationError

EXIT_OK, EXIT_VALIDATION, EXIT_BUDGET, EXIT_CHECK = 0, 1, 2, 3
DTEST_CSV_HEADER = ("f_id", "mode", "k", "R", "rho", "acceptance", "stderr", "quasirandom", "max_influence")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(message)


def _sha256(path) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def _text_sha256(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def _write_text(path, text):
    with open(path, "w") as fh:
        fh.write(text)


def _read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None


def _emit_artifact(args, text):
    """Artifact commands write to ``-o``; without it the artifact goes to stdout."""
    if args.output:
        _write_text(args.output, text)
        return None
    return json.loads(text)


# --------------------------------------------------------------------------
# commands (each returns (result dict, resolved parameters))
# --------------------------------------------------------------------------

def cmd_gen_csp(args):
    inst = csp_core.generate_random_instance(args.n, args.R, args.k, args.m, args.seed)
    text = csp_core.dumps(inst)
    out = {"n": inst.n, "R": inst.R, "m": inst.m, "sha256": _text_sha256(text)}
    art = _emit_artifact(args, text)
    if art is not None:
        out["instance"] = art
    return out, {}


def _gen_game(args, d21: bool):
    if d21:
        game = games.generate_d21_game(args.V, args.W, args.N, args.d, args.edges, args.seed, args.satisfiable)
    else:
        game = games.generate_unique_game(args.V, args.W, args.N, args.edges, args.seed, args.satisfiable)
    text = json.dumps(game.to_dict())
    out = {"kind": game.kind, "V": game.V, "W": game.W, "N": game.N, "edges": len(game.edges), "sha256": _text_sha256(text)}
    art = _emit_artifact(args, text)
    if art is not None:
        out["game"] = art
    return out, {}


def cmd_gen_ug(args):
    return _gen_game(args, False)


def cmd_gen_d21(args):
    return _gen_game(args, True)


def cmd_solve(args):
    inst = csp_core.load(args.input)
    resolved = {}
    if args.algo == "naive":
        phi = algorithms.naive_random(inst, args.seed)
        out = {"assignment": list(phi), "value": csp_core.evaluate(inst, phi)}
    elif args.algo == "brute":
        phi, val = csp_core.brute_force_optimum(inst, budget=args.budget)
        out = {"assignment": list(phi), "value": val}
    else:
        (k,) = inst.arities if len(inst.arities) == 1 else (None,)
        if k is None:
            raise ValidationError(f"mixed constraint arities {sorted(inst.arities)}")
        kprime = args.kprime if args.kprime is not None else k - 1
        params = algorithms.ExtensionParams(k, kprime, args.alpha)
        base = algorithms.brute_base(kprime) if args.base == "brute" else algorithms.naive_base(kprime)
        phi_b, phi_a, projected = algorithms.extend_algorithm(inst, base, params, args.seed)
        resolved = {"k": k, "kprime": kprime, "alpha": params.resolved_alpha, "base": args.base}
        out = {
            "assignment": list(phi_b),
            "value": csp_core.evaluate(inst, phi_b),
            "base_assignment": list(phi_a),
            "projected_value": csp_core.evaluate(projected, phi_a),
            "expected_value": algorithms.expected_blend_value(inst, phi_a, params.resolved_alpha),
            "guarantee_factor": params.guarantee_factor(),
        }
    out["random_expectation"] = csp_core.expected_random_value(inst)
    return out, resolved


def cmd_reduce_d21(args):
    ug = games.reduce_d21_to_ug(games.Game.from_dict(_read_json(args.input)))
    text = json.dumps(ug.to_dict())
    out = {"V": ug.V, "W": ug.W, "N": ug.N, "edges": len(ug.edges), "sha256": _text_sha256(text)}
    art = _emit_artifact(args, text)
    if art is not None:
        out["game"] = art
    return out, {}


def _pcp_params(args):
    return games.PcpParams(
        args.k, args.R, args.rho, args.d, args.log_delta, "sampled" if args.mode == "sampled" else "exact", args.samples
    )


def _resolved_pcp(p):
    return {"k": p.k, "R": p.R, "rho": p.rho, "d": p.d, "log_delta": p.log_delta, "mode": p.mode, "samples": p.samples}


def cmd_reduce_ug2csp(args):
    game = games.Game.from_dict(_read_json(args.input))
    params = _pcp_params(args)
    inst = games.reduce_ug_to_csp(game, params, args.seed, budget=args.budget)
    text = csp_core.dumps(inst)
    out = {"n": inst.n, "R": inst.R, "m": inst.m, "sha256": _text_sha256(text)}
    art = _emit_artifact(args, text)
    if art is not None:
        out["instance"] = art
    return out, _resolved_pcp(params)


def _dtest_function(args):
    n, R = args.n, args.R
    kind = args.function
    if kind == "dictator":
        return dictator_test.RFunction.dictator(n, R, args.coord)
    if kind == "constant":
        return dictator_test.RFunction.constant(n, R, args.value)
    if kind == "random":
        return dictator_test.RFunction.random(n, R, args.seed)
    if kind == "folded-random":
        return dictator_test.folded_random(n, R, args.seed)
    if args.input is None:
        raise ValidationError("--function file needs --input")
    return dictator_test.RFunction.from_dict(_read_json(args.input))


def cmd_dtest(args):
    f = _dtest_function(args)
    params = dictator_test.TestParams(args.k, f.R, args.rho, args.d, args.log_delta, args.trials, args.seed)
    resolved = {"k": params.k, "R": f.R, "n": f.n, "rho": params.rho, "d": params.d, "log_delta": params.log_delta}
    out = {"function": args.function, "mode": args.mode}
    if args.mode == "exact":
        out["acceptance"] = dictator_test.run_test_exact(f, params, args.budget)
    else:
        p, se = dictator_test.run_test_mc(f, params, args.workers)
        out.update(acceptance=p, stderr=se, trials=params.trials)
    if args.function == "dictator":
        out["closed_form"] = dictator_test.dictator_closed_form(params.k, f.R, params.rho)
    if args.quasirandom:
        q = dictator_test.quasirandomness_check(f, params.d, params.log_delta, args.budget)
        out.update(
            quasirandom=q.is_quasirandom, max_influence=q.max_influence, argmax=list(q.argmax)
        )
    return out, resolved


def _lab_summary(reports):
    margins = [r.margin for r in reports if r.margin is not None]
    return {
        "count": len(reports),
        "min_margin": min(margins) if margins else None,
        "violations": sum(1 for r in reports if r.certified and r.margin < -1e-12),
        "reports": [r.to_dict() for r in reports],
    }


def cmd_lab_hyper(args):
    rho = args.rho if args.rho is not None else inequality_lab.hypercontractive_rho(args.p, args.q)
    reports = []
    for t in range(args.count):
        h = rng_for(args.seed, t).standard_normal(1 << args.m)
        reports.append(inequality_lab.hypercontractivity_margin(h, args.p, args.q, rho))
    return _lab_summary(reports), {"rho": rho}


def cmd_lab_invariance(args):
    psi = inequality_lab.PsiFunction.parse(args.psi)
    reports = []
    for t in range(args.count):
        f = fourier.TableFunction.random(args.n, args.R, (args.seed, t))
        reports.append(inequality_lab.invariance_gap(f, args.d, psi, args.budget))
    return _lab_summary(reports), {"psi": psi.name}


def cmd_lab_mainlemma(args):
    rho, d, log_delta = dictator_test.default_parameters(args.k, args.R)
    rho = args.rho if args.rho is not None else rho
    d = args.d if args.d is not None else d
    log_delta = args.log_delta if args.log_delta is not None else log_delta
    reports = [
        inequality_lab.main_lemma_report(
            inequality_lab.random_bounded_mean(args.n, args.R, (args.seed, t)), args.k, rho, d, log_delta, args.budget
        )
        for t in range(args.count)
    ]
    return _lab_summary(reports), {"rho": rho, "d": d, "log_delta": log_delta}


def _verify_checks(args):
    """Cross-module consistency checks; yields (name, passed, detail)."""
    k, R, rho = args.k, args.R, args.rho if args.rho is not None else 0.5
    dparams = dictator_test.TestParams(k, R, rho, trials=args.trials, seed=args.seed)
    dic = dictator_test.RFunction.dictator(2, R, 0)
    exact = dictator_test.run_test_exact(dic, dparams)
    closed = dictator_test.dictator_closed_form(k, R, rho)
    yield "dictator_closed_form", abs(exact - closed) <= 1e-9, {"exact": exact, "closed_form": closed}

    f = dictator_test.RFunction.random(2, R, args.seed)
    exact = dictator_test.run_test_exact(f, dparams)
    p, se = dictator_test.run_test_mc(f, dparams, args.workers)
    yield "dtest_exact_vs_mc", abs(p - exact) <= 3 * max(se, 1e-12), {"exact": exact, "mc": p, "stderr": se}

    if args.input:
        game = games.Game.from_dict(_read_json(args.input))
    else:
        game = games.generate_unique_game(2, 2, 3, 4, args.seed, satisfiable=True)
    params = games.PcpParams(k, R, rho)
    csp = games.reduce_ug_to_csp(game, params, args.seed, budget=args.budget)
    proofs = {"random": games.Proof.random(game.W, game.N, R, args.seed)}
    if game.kind == "unique":
        phi, zeta = games.brute_force_game_value(game)
        proofs["honest"] = games.honest_proof(game, phi, R)
    for name, proof in proofs.items():
        acc = games.verifier_acceptance(game, params, proof)
        val = csp_core.evaluate(csp, games.proof_assignment(proof))
        yield f"csp_vs_verifier_{name}", abs(acc.probability - val) <= 1e-9, {"verifier": acc.probability, "csp": val}
        bound = max(acc.per_vertex)
        yield f"projection_sum_{name}", bound <= 1 + 1e-12, {"max_per_vertex": bound}
        mc = games.verifier_acceptance(game, params, proof, "mc", args.trials, args.seed, args.workers)
        ok = abs(mc.probability - acc.probability) <= 3 * max(mc.stderr, 1e-12)
        yield f"verifier_exact_vs_mc_{name}", ok, {"exact": acc.probability, "mc": mc.probability, "stderr": mc.stderr}
    if "honest" in proofs:
        acc = games.verifier_acceptance(game, params, proofs["honest"]).probability
        floor = zeta**k * rho**k
        yield "completeness_floor", acc >= floor - 1e-12, {"acceptance": acc, "floor": floor, "zeta": zeta}


def cmd_verify(args):
    checks = [{"name": n, "passed": bool(ok), "detail": det} for n, ok, det in _verify_checks(args)]
    out = {"checks": checks, "passed": all(c["passed"] for c in checks)}
    return out, {}


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

def _common(sub, output_help="report file (default: stdout)"):
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--workers", type=int, default=1, help="worker threads for Monte-Carlo runs")
    sub.add_argument("--format", choices=("json", "csv"), default="json")
    sub.add_argument("--budget", type=int, default=10**7)
    sub.add_argument("-o", "--output", default=None, help=output_help)


def _test_params(sub):
    sub.add_argument("--k", type=int, default=2)
    sub.add_argument("--R", type=int, default=3)
    sub.add_argument("--rho", type=float, default=None)
    sub.add_argument("--d", type=int, default=None)
    sub.add_argument("--log-delta", type=float, default=None, help="natural log of delta")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="kcsp", description=__doc__.splitlines()[0])
    top = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = top.add_parser("gen", help="generate instances and games")
    gsub = gen.add_subparsers(dest="what", required=True, parser_class=_Parser)
    g = gsub.add_parser("csp")
    for name in ("n", "R", "k", "m"):
        g.add_argument(f"--{name}", type=int, required=True)
    _common(g, "instance file")
    g.set_defaults(func=cmd_gen_csp)
    for kind, fn in (("ug", cmd_gen_ug), ("d21", cmd_gen_d21)):
        g = gsub.add_parser(kind)
        for name in ("V", "W", "N", "edges"):
            g.add_argument(f"--{name}", type=int, required=True)
        if kind == "d21":
            g.add_argument("--d", type=int, required=True)
        g.add_argument("--satisfiable", action="store_true")
        _common(g, "game file")
        g.set_defaults(func=fn)

    s = top.add_parser("solve", help="run an approximation algorithm")
    s.add_argument("input")
    s.add_argument("--algo", choices=("naive", "brute", "extend"), default="brute")
    s.add_argument("--base", choices=("naive", "brute"), default="brute")
    s.add_argument("--kprime", type=int, default=None)
    s.add_argument("--alpha", type=float, default=None)
    _common(s)
    s.set_defaults(func=cmd_solve)

    r = top.add_parser("reduce", help="game and PCP reductions")
    rsub = r.add_subparsers(dest="what", required=True, parser_class=_Parser)
    x = rsub.add_parser("d21")
    x.add_argument("input")
    _common(x, "unique game file")
    x.set_defaults(func=cmd_reduce_d21)
    x = rsub.add_parser("ug2csp")
    x.add_argument("input")
    _test_params(x)
    x.add_argument("--mode", choices=("exact", "sampled"), default="exact")
    x.add_argument("--samples", type=int, default=10**4)
    _common(x, "instance file")
    x.set_defaults(func=cmd_reduce_ug2csp, budget=games.EXACT_TUPLE_BUDGET)

    t = top.add_parser("dtest", help="dictator-vs-quasirandom test")
    t.add_argument("--function", choices=("dictator", "constant", "random", "folded-random", "file"), default="dictator")
    t.add_argument("--input", default=None, help="function file for --function file")
    t.add_argument("--n", type=int, default=3)
    t.add_argument("--coord", type=int, default=0)
    t.add_argument("--value", type=int, default=0)
    _test_params(t)
    t.add_argument("--mode", choices=("exact", "mc"), default="exact")
    t.add_argument("--trials", type=int, default=dictator_test.DEFAULT_TRIALS)
    t.add_argument("--quasirandom", action="store_true", help="also report degree-d influences")
    _common(t)
    t.set_defaults(func=cmd_dtest, budget=dictator_test.EXACT_BUDGET)

    lab = top.add_parser("lab", help="inequality sweeps")
    lsub = lab.add_subparsers(dest="what", required=True, parser_class=_Parser)
    h = lsub.add_parser("hyper")
    h.add_argument("--m", type=int, default=8)
    h.add_argument("--p", type=float, default=2.0)
    h.add_argument("--q", type=float, default=4.0)
    h.add_argument("--rho", type=float, default=None)
    h.add_argument("--count", type=int, default=100)
    _common(h)
    h.set_defaults(func=cmd_lab_hyper)
    v = lsub.add_parser("invariance")
    v.add_argument("--n", type=int, default=2)
    v.add_argument("--R", type=int, default=3)
    v.add_argument("--d", type=int, default=2)
    v.add_argument("--psi", default="psi1")
    v.add_argument("--count", type=int, default=10)
    _common(v)
    v.set_defaults(func=cmd_lab_invariance, budget=10**6)
    mlm = lsub.add_parser("mainlemma")
    mlm.add_argument("--n", type=int, default=2)
    _test_params(mlm)
    mlm.add_argument("--count", type=int, default=10)
    _common(mlm)
    mlm.set_defaults(func=cmd_lab_mainlemma, budget=10**6)

    ver = top.add_parser("verify", help="cross-module consistency checks")
    ver.add_argument("input", nargs="?", default=None, help="unique game file (default: generated)")
    ver.add_argument("--k", type=int, default=2)
    ver.add_argument("--R", type=int, default=3)
    ver.add_argument("--rho", type=float, default=None)
    ver.add_argument("--trials", type=int, default=10**5)
    _common(ver)
    ver.set_defaults(func=cmd_verify, budget=games.EXACT_TUPLE_BUDGET)

    rep = top.add_parser("replay", help="re-run a report and compare results")
    rep.add_argument("report")
    rep.add_argument("--workers", type=int, default=None, help="override the stored worker count")
    rep.set_defaults(func=None)
    return p


_NOT_CONFIG = {"func", "format", "output"}


def _config(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in _NOT_CONFIG}


def _execute(argv):
    args = build_parser().parse_args(argv)
    if args.command == "replay":
        return args, None
    for name in ("workers",):
        if getattr(args, name, 1) < 1:
            raise ValidationError(f"--{name} must be >= 1")
    inputs = {}
    for key in ("input",):
        path = getattr(args, key, None)
        if path:
            try:
                inputs[key] = _sha256(path)
            except OSError as exc:
                raise ValidationError(f"cannot read {path}: {exc.strerror}") from None
    result, resolved = args.func(args)
    report = {
        "command": " ".join(filter(None, [args.command, getattr(args, "what", None)])),
        "argv": list(argv),
        "seed": args.seed,
        "config": {**_config(args), "resolved": resolved, "input_sha256": inputs},
        "result": result,
    }
    return args, json.loads(json.dumps(report))


def _flatten(prefix, value, rows):
    if isinstance(value, dict):
        for k, v in value.items():
            _flatten(f"{prefix}.{k}" if prefix else k, v, rows)
    else:
        rows.append((prefix, json.dumps(value)))


def _render(report, fmt) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2) + "\n"
    result = report["result"]
    if "reports" in result:
        reports = [inequality_lab.InequalityReport(**r) for r in result["reports"]]
        return inequality_lab.reports_to_csv(reports)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if report["command"] == "dtest":
        cfg = report["config"]
        res = cfg["resolved"]
        fid = f"{result['function']}:seed={report['seed']}"
        w.writerow(DTEST_CSV_HEADER)
        w.writerow((
            fid, result["mode"], res["k"], res["R"], repr(res["rho"]), repr(result["acceptance"]),
            repr(result.get("stderr", 0.0)), result.get("quasirandom", ""), repr(result["max_influence"]) if "max_influence" in result else "",
        ))
        return buf.getvalue()
    w.writerow(("key", "value"))
    rows = []
    _flatten("", {k: v for k, v in report.items() if k != "result"}, rows)
    _flatten("result", result, rows)
    w.writerows(rows)
    return buf.getvalue()


def _replay(args) -> tuple[dict, int]:
    stored = _read_json(args.report)
    try:
        argv = list(stored["argv"])
        expected = stored["result"]
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"report missing field {exc}") from None
    # never overwrite the original artifacts while replaying
    argv = _strip_output(argv)
    if args.workers is not None:
        argv = _strip_option(argv, "--workers") + ["--workers", str(args.workers)]
    _, fresh = _execute(argv)
    exp = _without_artifact_echo(expected)
    got = _without_artifact_echo(fresh["result"])
    same = exp == got
    out = {"command": "replay", "argv": argv, "identical": same, "report": args.report}
    if not same:
        out["differences"] = sorted(k for k in set(exp) | set(got) if exp.get(k) != got.get(k))
    return out, EXIT_OK if same else EXIT_CHECK


def _without_artifact_echo(result):
    return {k: v for k, v in result.items() if k not in ("instance", "game")}


def _strip_option(argv, flag):
    out, skip = [], False
    for tok in argv:
        if skip:
            skip = False
            continue
        if tok == flag:
            skip = True
            continue
        if tok.startswith(flag + "="):
            continue
        out.append(tok)
    return out


def _strip_output(argv):
    return _strip_option(_strip_option(argv, "-o"), "--output")


def run(argv) -> int:
    argv = list(argv)
    try:
        args, report = _execute(argv)
        if report is None:
            out, code = _replay(args)
            sys.stdout.write(json.dumps(out, indent=2) + "\n")
            return code
        text = _render(report, args.format)
        if args.output and args.func not in _ARTIFACT_COMMANDS:
            _write_text(args.output, text)
        else:
            sys.stdout.write(text)
        if args.func is cmd_verify and not report["result"]["passed"]:
            failed = [c["name"] for c in report["result"]["checks"] if not c["passed"]]
            print(f"error: verify failed: {', '.join(failed)}", file=sys.stderr)
            return EXIT_CHECK
        return EXIT_OK
    except BudgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ValidationError, HypothesisUnmet) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


_ARTIFACT_COMMANDS = {cmd_gen_csp, cmd_gen_ug, cmd_gen_d21, cmd_reduce_d21, cmd_reduce_ug2csp}


def main(argv=None) -> int:
    return run(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
