"""Command-line entry point.

Exit codes: 0 success, 1 malformed input or usage, 2 domain rejection
(for example a function whose zero set is not regular).  Errors are printed
to stderr as JSON with a machine-readable ``code``, a ``message`` and a
JSON ``pointer`` into the offending input.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import sys
from typing import Any, Callable, Iterator, Mapping, Sequence, TextIO

from .config import Config, ConfigError, load_config, parse_tolerance_override

EXIT_OK, EXIT_MALFORMED, EXIT_DOMAIN = 0, 1, 2


class CliError(Exception):
    def __init__(self, code: str, message: str, pointer: str = "", exit_code: int = EXIT_MALFORMED):
        super().__init__(message)
        self.code = code
        self.message = message
        self.pointer = pointer
        self.exit_code = exit_code

    def to_json(self) -> dict:
        return {"error": {"code": self.code, "message": self.message, "pointer": self.pointer}}


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str):  # route usage errors through CliError
        raise CliError("usage", message)


@contextlib.contextmanager
def parsing(pointer: str) -> Iterator[None]:
    """Structural problems inside this block are malformed input at ``pointer``."""
    try:
        yield
    except CliError:
        raise
    except KeyError as exc:
        raise CliError("schema", f"missing key {exc.args[0]!r}", f"{pointer}/{exc.args[0]}") from exc
    except (TypeError, ValueError, IndexError, ZeroDivisionError) as exc:
        raise CliError("schema", str(exc), pointer) from exc


@contextlib.contextmanager
def domain(pointer: str = "") -> Iterator[None]:
    """Mathematical rejections inside this block exit with code 2."""
    from .exactlin import InvariantViolation
    from .morita_finite import CapExceeded
    from .tss import NotTSS

    try:
        yield
    except CliError:
        raise
    except NotTSS as exc:
        msg = str(exc) + (f" (near {exc.witness})" if exc.witness else "")
        raise CliError(NotTSS.code, msg, pointer, EXIT_DOMAIN) from exc
    except CapExceeded as exc:
        raise CliError(CapExceeded.code, str(exc), pointer, EXIT_DOMAIN) from exc
    except InvariantViolation as exc:
        raise CliError("invariant_violation", str(exc), pointer, EXIT_DOMAIN) from exc
    except (ValueError, ArithmeticError) as exc:
        raise CliError("domain_rejection", str(exc), pointer, EXIT_DOMAIN) from exc


def read_json(path: str, stdin: TextIO) -> Any:
    try:
        if path == "-":
            text = stdin.read()
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        raise CliError("io", f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError("json", f"{path}: {exc.msg} at line {exc.lineno} column {exc.colno}") from exc


def require(obj: Any, key: str, pointer: str = "") -> Any:
    if not isinstance(obj, Mapping):
        raise CliError("schema", "expected a JSON object", pointer)
    if key not in obj:
        raise CliError("schema", f"missing key {key!r}", f"{pointer}/{key}")
    return obj[key]


# ---------------------------------------------------------------------------
# input decoders


def _matrix(obj: Any, pointer: str):
    from .exactlin import Matrix, to_scalar

    if isinstance(obj, Mapping) and "matrix" in obj:
        pointer, obj = pointer + "/matrix", obj["matrix"]
    if isinstance(obj, Mapping):
        with parsing(pointer):
            return Matrix.from_json(obj)
    if not isinstance(obj, list) or not all(isinstance(r, list) for r in obj):
        raise CliError("schema", "a matrix is a list of rows", pointer)
    rows = []
    for i, r in enumerate(obj):
        row = []
        for j, v in enumerate(r):
            with parsing(f"{pointer}/{i}/{j}"):
                row.append(to_scalar(v))
        rows.append(row)
    with parsing(pointer):
        return Matrix.from_rows(rows, len(rows[0]) if rows else 0)


def _dirac(obj: Any, pointer: str):
    from .diraclin import DiracSubspace

    with parsing(pointer):
        n = int(require(obj, "v_dim", pointer))
        basis = require(obj, "basis", pointer)
    with domain(pointer):
        if isinstance(basis, Mapping):
            return DiracSubspace.from_json(obj)
        return DiracSubspace.span(n, _matrix(basis, pointer + "/basis").tolist())


def _bivector(obj: Any, pointer: str):
    from .multivec import PolyBivector

    with parsing(pointer):
        return PolyBivector.from_json(obj)


def _three_form(obj: Any, pointer: str):
    from .multivec import PolyThreeForm

    with parsing(pointer):
        return PolyThreeForm.from_json(obj)


def _skew_param(obj: Any, pointer: str):
    from .nctorus import SkewParam

    with parsing(pointer):
        require(obj, "entries", pointer)
        return SkewParam.from_json(obj)


def _torus_function(obj: Any, pointer: str):
    from .tss import TorusFunction

    if not isinstance(obj, Mapping) or not ({"fourier", "terms", "const"} & set(obj)):
        raise CliError("schema", "expected 'fourier' or 'terms'/'const'", pointer)
    unknown = sorted(set(obj) - {"fourier", "terms", "const", "name"})
    if unknown:
        raise CliError("schema", f"unknown key {unknown[0]!r}", f"{pointer}/{unknown[0]}")
    with parsing(pointer):
        return TorusFunction.from_json(obj)


# ---------------------------------------------------------------------------
# handlers return (payload, dot_text or None, text)


Result = tuple[dict, "str | None", str]


def _dirac_report(l) -> Result:
    from .diraclin import certificate

    cert = certificate(l)
    payload = {"dirac": l.to_json(), "certificate": cert}
    return payload, None, cert["text"]


def cmd_dirac(args, cfg: Config, stdin: TextIO) -> Result:
    from .diraclin import DiracPair, from_bivector, from_pair, from_two_form, gauge, roundtrip_laws, to_pair
    from .exactlin import ExactSubspace

    data = read_json(args.input, stdin)
    if args.action in ("from-bivector", "from-two-form"):
        m = _matrix(data, "")
        with domain(""):
            l = from_bivector(m) if args.action == "from-bivector" else from_two_form(m)
        return _dirac_report(l)
    if args.action == "to-pair":
        l = _dirac(data, "")
        with domain(""):
            p = to_pair(l)
        payload = {"range": p.range.to_json(), "theta": p.theta.to_json()}
        return payload, None, f"range of dimension {p.range.dim}, theta {p.theta.tolist()}"
    if args.action == "from-pair":
        with parsing(""):
            rng = ExactSubspace.from_json(require(data, "range"))
        theta = _matrix(require(data, "theta"), "/theta")
        with domain(""):
            return _dirac_report(from_pair(DiracPair(rng, theta)))
    if args.action == "gauge":
        l = _dirac(require(data, "dirac"), "/dirac")
        b = _matrix(require(data, "b"), "/b")
        with domain("/b"):
            return _dirac_report(gauge(l, b))
    if args.action == "roundtrip":
        f = _matrix(require(data, "f"), "/f")
        src = _dirac(data["source"], "/source") if "source" in data else None
        tgt = _dirac(data["target"], "/target") if "target" in data else None
        with domain(""):
            rep = roundtrip_laws(f, src, tgt)
        payload = {k: v for k, v in vars(rep).items() if v is not None}
        return payload, None, ", ".join(f"{k}={v}" for k, v in payload.items())
    raise CliError("usage", f"unknown dirac action {args.action!r}")


def cmd_poisson(args, cfg: Config, stdin: TextIO) -> Result:
    from .multivec import Poly, StructureConstants, lie_poisson, poisson_bracket, schouten_square, twisted_poisson_check

    data = read_json(args.input, stdin)
    if args.action == "check":
        pi = _bivector(require(data, "pi"), "/pi")
        phi = _three_form(data["phi"], "/phi") if "phi" in data else None
        with domain("/phi"):
            res = twisted_poisson_check(pi, phi)
        payload = {"holds": res.holds, "residual": res.residual.to_json(), "schouten_square": schouten_square(pi).to_json()}
        text = "twisted Poisson condition holds" if res.holds else f"condition fails: residual {res.residual!r}"
        return payload, None, text
    if args.action == "lie":
        with parsing(""):
            n = int(require(data, "n"))
            brackets = {(int(b["i"]), int(b["j"])): b["value"] for b in require(data, "brackets")}
        with domain(""):
            c = StructureConstants.from_brackets(n, brackets)
            pi = lie_poisson(c)
        defect = [[i, j, k, m, str(v)] for i, j, k, m, v in c.jacobi_defect()]
        payload = {"jacobi": not defect, "jacobi_defect": defect, "bivector": pi.to_json(), "schouten_square": schouten_square(pi).to_json()}
        return payload, None, "Jacobi identity holds" if not defect else f"Jacobi identity fails: {defect}"
    if args.action == "bracket":
        pi = _bivector(require(data, "pi"), "/pi")
        with parsing(""):
            f, g = Poly.from_json(require(data, "f")), Poly.from_json(require(data, "g"))
        with domain(""):
            h = poisson_bracket(f, g, pi)
        return {"bracket": h.to_json()}, None, repr(h)
    raise CliError("usage", f"unknown poisson action {args.action!r}")


def cmd_torus(args, cfg: Config, stdin: TextIO) -> Result:
    from .nctorus import SOnnMatrix, fractional_action, generator_relation_check, n2_decide, orbit_bfs, replay

    if args.action == "decide2":
        if args.theta1 is None or args.theta2 is None:
            raise CliError("usage", "decide2 needs --theta1 and --theta2")
        with parsing("/theta"):
            d = n2_decide(args.theta1, args.theta2)
        payload = {"verdict": d.verdict, "reason": d.reason, "period1": d.tail1, "period2": d.tail2}
        return payload, None, f"{d.verdict}: {d.reason}"
    if args.input is None:
        raise CliError("usage", f"torus {args.action} needs an input file")
    data = read_json(args.input, stdin)
    if args.action == "relation":
        pi = _skew_param(data, "")
        rep = generator_relation_check(pi, cfg.tol("relation"))
        payload = {"passed": rep.passed, "max_deviation": rep.max_deviation, "worst": list(rep.worst)}
        return payload, None, f"max deviation {rep.max_deviation:.3e} ({'pass' if rep.passed else 'fail'})"
    if args.action == "act":
        pi = _skew_param(require(data, "pi"), "/pi")
        with parsing("/g"):
            g = SOnnMatrix.from_json(require(data, "g"))
        with domain("/g"):
            res = fractional_action(g, pi)
        if res is None:
            raise CliError("undefined_action", "C pi + D is singular", "/pi", EXIT_DOMAIN)
        return {"pi": res.to_json()}, None, repr(res)
    if args.action == "orbit":
        p1 = _skew_param(require(data, "pi1"), "/pi1")
        p2 = _skew_param(require(data, "pi2"), "/pi2")
        with parsing("/depth"):
            depth = int(data.get("depth", cfg.cap("bfs_depth")))
        with domain(""):
            res = orbit_bfs(p1, p2, depth, cfg.cap("bfs_nodes"))
        payload = {"status": res.status, "word": res.word, "explored": res.explored, "exhausted": res.exhausted}
        if res.word is not None:
            payload["replay_matches"] = bool(replay(p1, res.word) is not None and replay(p1, res.word).same_as(p2))
        return payload, None, f"{res.status} after {res.explored} nodes" + (f": {' '.join(res.word)}" if res.word else "")
    raise CliError("usage", f"unknown torus action {args.action!r}")


def cmd_tss(args, cfg: Config, stdin: TextIO) -> Result:
    from .tss import build_graph, graphs_isomorphic, regularized_volume

    grid = args.grid or cfg.cap("grid")
    curve_tol = args.curve_tol or cfg.tol("curve")
    period_tol = args.period_tol or cfg.tol("period")

    def graph_of(path: str, pointer: str):
        f = _torus_function(read_json(path, stdin), pointer)
        with domain(pointer):
            return f, build_graph(f, grid, curve_tol, cfg.tol("grad"))

    if args.action == "graph":
        f, g = graph_of(args.inputs[0], "")
        payload = {"graph": g.to_json()}
        if args.volume:
            with domain(""):
                payload["volume"] = regularized_volume(f, tol=cfg.tol("volume")).to_json()
        text = f"{len(g.vertices)} vertices, {len(g.edges)} edges"
        return payload, g.to_dot(), text
    if args.action == "compare":
        if len(args.inputs) != 2:
            raise CliError("usage", "tss compare takes two inputs")
        _, g1 = graph_of(args.inputs[0], "/0")
        _, g2 = graph_of(args.inputs[1], "/1")
        res = graphs_isomorphic(g1, g2, period_tol)
        payload = {**res.to_json(), "period_tol": period_tol}
        verdict = "Morita equivalent" if res.isomorphic else "not Morita equivalent"
        return payload, None, f"{verdict}: {res.reason}"
    raise CliError("usage", f"unknown tss action {args.action!r}")


def cmd_finite(args, cfg: Config, stdin: TextIO) -> Result:
    from .morita_finite import FiniteGroup, invertibility_census, picard_group

    if args.action == "census":
        with domain(""):
            res = invertibility_census()
        payload = {"pairs": res.pairs, "bispaces": res.bispaces, "invertible": res.invertible, "passed": res.passed, "disagreements": res.disagreements, "existence_mismatches": res.existence_mismatches}
        return payload, None, f"{res.bispaces} bispaces over {res.pairs} group pairs: {'pass' if res.passed else 'FAIL'}"
    if args.group is None:
        raise CliError("usage", "finite picard needs a group preset or JSON file")
    spec: Any = args.group
    if spec.endswith(".json") or spec == "-":
        spec = read_json(spec, stdin)
    with parsing(""):
        g = FiniteGroup.from_spec(spec)
    with domain(""):
        res = picard_group(g, cfg.cap("group_order"))
    return res.to_json(), None, f"|Pic({g.name})| = {res.order} = |Out| = {res.aut_order}/{res.inn_order}"


def cmd_selftest(args, cfg: Config, stdin: TextIO) -> Result:
    from .selftest import run_selftest

    results = run_selftest(cfg)
    ok = all(r.passed for r in results)
    payload = {"seed": cfg.seed, "passed": ok, "suites": [r.to_json() for r in results]}
    width = max(len(r.module) for r in results)
    lines = [f"{r.module:<{width}}  {'PASS' if r.passed else 'FAIL'}  {r.detail}" for r in results]
    if not ok:
        raise _SelftestFailed(payload, "\n".join(lines))
    return payload, None, "\n".join(lines)


class _SelftestFailed(Exception):
    def __init__(self, payload: dict, text: str):
        super().__init__("selftest failed")
        self.payload, self.text = payload, text


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    # global flags are accepted before or after the subcommand
    common = _ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS, help="JSON config file (default: $POISSONDIRAC_CONFIG)")
    common.add_argument("--format", choices=["json", "dot", "text"], default=argparse.SUPPRESS, help="output format")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="seed for randomised checks")
    common.add_argument("--tol", action="append", default=argparse.SUPPRESS, metavar="NAME=VAL", help="override a named tolerance")
    p = _ArgumentParser(prog="poissondirac", description="Dirac, Poisson and Morita computations.", parents=[common])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    d = sub.add_parser("dirac", parents=[common], help="linear Dirac structures")
    d.add_argument("action", choices=["from-bivector", "from-two-form", "to-pair", "from-pair", "gauge", "roundtrip"])
    d.add_argument("input", help='JSON file or "-" for stdin')
    d.set_defaults(handler=cmd_dirac)

    q = sub.add_parser("poisson", parents=[common], help="polynomial bivectors")
    q.add_argument("action", choices=["check", "lie", "bracket"])
    q.add_argument("input")
    q.set_defaults(handler=cmd_poisson)

    t = sub.add_parser("torus", parents=[common], help="quantum tori and SO(n,n|Z)")
    t.add_argument("action", choices=["relation", "act", "orbit", "decide2"])
    t.add_argument("input", nargs="?")
    t.add_argument("--theta1")
    t.add_argument("--theta2")
    t.set_defaults(handler=cmd_torus)

    s = sub.add_parser("tss", parents=[common], help="stable Poisson structures on the torus")
    s.add_argument("action", choices=["graph", "compare"])
    s.add_argument("inputs", nargs="+")
    s.add_argument("--grid", type=int)
    s.add_argument("--curve-tol", type=float)
    s.add_argument("--period-tol", type=float)
    s.add_argument("--volume", action="store_true", help="also report the principal-value volume")
    s.set_defaults(handler=cmd_tss)

    f = sub.add_parser("finite", parents=[common], help="finite-group Morita calculus")
    f.add_argument("action", choices=["picard", "census"])
    f.add_argument("group", nargs="?", help="preset (cyclic:n, dihedral:n, s3, q8, klein) or JSON table file")
    f.set_defaults(handler=cmd_finite)

    st = sub.add_parser("selftest", parents=[common], help="run the invariant battery")
    st.set_defaults(handler=cmd_selftest)
    return p


def _render(payload: dict, dot: str | None, text: str, fmt: str) -> str:
    if fmt == "dot":
        if dot is None:
            raise CliError("usage", "DOT output is only available for tss graph")
        return dot
    if fmt == "text":
        return text + "\n"
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def main(argv: Sequence[str] | None = None, stdin: TextIO | None = None, stdout: TextIO | None = None, stderr: TextIO | None = None) -> int:
    stdin, stdout, stderr = stdin or sys.stdin, stdout or sys.stdout, stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        try:
            cfg = load_config(getattr(args, "config", None))
            overrides = dict(parse_tolerance_override(t) for t in getattr(args, "tol", []))
            cfg = cfg.with_overrides(getattr(args, "seed", None), overrides, getattr(args, "format", None))
        except ConfigError as exc:
            raise CliError(ConfigError.code, str(exc), exc.pointer) from exc
        handler: Callable = args.handler
        try:
            payload, dot, text = handler(args, cfg, stdin)
        except _SelftestFailed as exc:
            stdout.write(_render(exc.payload, None, exc.text, cfg.output_format))
            return EXIT_DOMAIN
        stdout.write(_render(payload, dot, text, cfg.output_format))
        return EXIT_OK
    except CliError as exc:
        stderr.write(json.dumps(exc.to_json(), sort_keys=True) + "\n")
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
