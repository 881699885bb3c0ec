"""Command-line interface.

Two kinds of commands:

* **Session commands** operate on a JSON session file (``--session``,
  default ``gjb-session.json``): ``chart new`` creates it, ``theta set``
  installs the structure form, ``let`` stores named values, and the
  computational commands (``check``, ``kernel``, ``conformal``,
  ``bracket``, ``cup``, ``symplectize``, ``lift``, ``poisson``,
  ``psi-check``, ``sharp``, ``render``) read it without modifying it.

* **Phase-space commands** (``tables``, ``hdw``, ``sigma``,
  ``dissipated``, ``distortion``) work directly on a canonical phase
  space selected with ``--n``/``--m`` and need no session.

Exit codes: 0 on success, 1 when a mathematical check fails or an object
fails validation, 2 on usage errors (bad flags, syntax errors, unknown
names, missing or incompatible session files).
"""

from __future__ import annotations

import argparse
import sys

from .coeffring import Chart, Coefficient
from .dsl import (
    FUNCTIONS,
    Environment,
    free_names,
    latex_coefficient,
    latex_name,
    parse,
    render,
    to_json,
)
from .errors import GjbError, ParseError, ValidationError
from .exterior import DiffForm, MultiVector, interior_product
from .fieldtheory import (
    CanonicalStructure,
    build_canonical,
    dissipated_check,
    dissipation_form,
    distortion,
    elementary_tables,
    hamiltonian_section,
    hdw_residuals,
    jet_name,
    JetSection,
    vertical_conformal_from_FG,
)
from .session import Session, SessionError
from .structures import ConformalData, is_multicontact, make_conformal_data, verify_conformal
from .symplectization import (
    build,
    check_correspondence,
    lift_conformal,
    nondegeneracy_check,
    poisson_bracket,
    psi_map,
)
from .sharp import sharp_and_reeb

__all__ = ["main"]


class _UsageError(Exception):
    """Bad command-line input (maps to exit code 2)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would sys.exit(2); raise instead
        raise _UsageError(f"{self.prog}: {message}")


# ---------------------------------------------------------------------------
# small helpers
# ---------------------------------------------------------------------------


def _split_names(text: str) -> tuple[str, ...]:
    return tuple(part.strip() for part in text.split(",") if part.strip())


def _evaluate(env: Environment, text: str, label: str = "expression"):
    from .dsl import elaborate

    try:
        return elaborate(parse(text), env)
    except ParseError as err:
        raise _UsageError(f"in {label}: {err}") from err


def _flush_warnings(env: Environment) -> None:
    for message in env.warnings:
        print(f"warning: {message}", file=sys.stderr)
    env.warnings.clear()


def _expect_data(value, label: str) -> ConformalData:
    if not isinstance(value, ConformalData):
        raise _UsageError(f"{label} must name conformal data, got {type(value).__name__}")
    return value


def _expect_form(value, label: str) -> DiffForm:
    if isinstance(value, Coefficient):
        return DiffForm.from_scalar(value)
    if isinstance(value, DiffForm):
        return value
    raise _UsageError(f"{label} must be a differential form, got {type(value).__name__}")


def _expect_multivector(value, label: str) -> MultiVector:
    if isinstance(value, Coefficient):
        return MultiVector.from_scalar(value)
    if isinstance(value, MultiVector):
        return value
    raise _UsageError(f"{label} must be a multivector, got {type(value).__name__}")


def _session_env(session: Session) -> Environment:
    extension = None
    if session.theta is not None:
        extension = build(session.structure())
    return session.environment(extension=extension)


def _print_value(value, fmt: str = "plain") -> None:
    print(render(value, fmt))


def _canonical_from_args(args, extra_exprs: tuple[str, ...] = ()) -> tuple[CanonicalStructure, dict]:
    """Build the (n, m) phase space, promoting unknown names in the given
    expressions to symbolic parameters."""
    probe = build_canonical(args.n, args.m)
    unknown: set[str] = set()
    for text in extra_exprs:
        for name in free_names(parse(text)):
            if name in probe.chart.coordinates:
                continue
            if name.startswith("d") and name[1:] in probe.chart.coordinates:
                continue
            if name.startswith("e_") and name[2:] in probe.chart.coordinates:
                continue
            unknown.add(name)
    if unknown:
        C = build_canonical(args.n, args.m, parameters=tuple(sorted(unknown)))
    else:
        C = probe
    env = Environment(chart=C.chart)
    return C, {"env": env, "parameters": tuple(sorted(unknown))}


def _scalar_on(env: Environment, text: str, label: str) -> Coefficient:
    value = _evaluate(env, text, label)
    if isinstance(value, Coefficient):
        return value
    if isinstance(value, (DiffForm, MultiVector)) and value.degree == 0:
        return value.scalar()
    raise _UsageError(f"{label} must be a scalar expression")


# ---------------------------------------------------------------------------
# session commands
# ---------------------------------------------------------------------------


def _cmd_chart_new(args) -> int:
    if bool(args.canonical) == bool(args.coordinates):
        raise _UsageError("chart new takes exactly one of --coordinates or --canonical")
    if args.canonical:
        if args.nonvanishing:
            raise _UsageError("--nonvanishing applies to explicit charts only")
        pieces = _split_names(args.canonical)
        if len(pieces) != 2 or not all(p.isdigit() for p in pieces):
            raise _UsageError("--canonical expects N,M (e.g. --canonical 2,1)")
        parameters = _split_names(args.parameters) if args.parameters else ()
        C = build_canonical(int(pieces[0]), int(pieces[1]), parameters=parameters)
        session = Session(chart=C.chart)
        session.set_theta(C.theta)
    else:
        if args.parameters:
            raise _UsageError("--parameters applies to canonical charts only")
        coordinates = _split_names(args.coordinates)
        nonvanishing = frozenset(_split_names(args.nonvanishing)) if args.nonvanishing else frozenset()
        session = Session(chart=Chart(coordinates, nonvanishing))
    session.save(args.session)
    print(f"chart: {', '.join(session.chart.coordinates)}")
    if session.chart.nonvanishing:
        print(f"nonvanishing: {', '.join(sorted(session.chart.nonvanishing))}")
    if session.theta is not None:
        print(f"theta = {session.theta}")
    print(f"session written to {args.session}")
    return 0


def _cmd_theta_set(args) -> int:
    session = Session.load(args.session)
    env = session.environment()
    value = _evaluate(env, args.expr, "theta")
    _flush_warnings(env)
    if not isinstance(value, DiffForm) or value.degree < 1:
        raise _UsageError("theta must be a form of positive degree")
    session.set_theta(value)
    session.save(args.session)
    print(f"theta = {value}")
    return 0


def _cmd_check_multicontact(args) -> int:
    session = Session.load(args.session)
    report = is_multicontact(session.structure())
    if report.ok:
        print("multicontact: yes")
        return 0
    print("multicontact: no")
    if report.witness is not None:
        print(f"witness: {report.witness}")
    if report.details:
        print(f"details: {report.details}")
    return 1


def _cmd_kernel(args) -> int:
    session = Session.load(args.session)
    S = session.structure()
    which = ("theta", "dtheta") if args.which == "both" else (args.which,)
    for name in which:
        basis = S.kernel(args.degree, name)
        label = "theta" if name == "theta" else "d(theta)"
        print(f"kernel of degree {args.degree} against {label}: dimension {len(basis)}")
        for vector in basis:
            print(f"  {vector}")
    return 0


def _check_binding_name(session: Session, name: str) -> None:
    if not name.isidentifier():
        raise _UsageError(f"{name!r} is not a valid binding name")
    if name in session.chart.coordinates:
        raise _UsageError(f"{name!r} is a chart coordinate and cannot be rebound")
    if name in FUNCTIONS:
        raise _UsageError(f"{name!r} is a builtin function name and cannot be rebound")


def _store_binding(session: Session, path, name: str, value) -> None:
    _check_binding_name(session, name)
    session.bindings[name] = value
    session.save(path)
    print(f"stored as {name}")


def _cmd_conformal(args) -> int:
    session = Session.load(args.session)
    if args.store:
        _check_binding_name(session, args.store)
    S = session.structure()
    env = _session_env(session)
    if args.mode == "verify":
        if args.alpha is None or args.x is None or args.v is None:
            raise _UsageError("conformal verify needs --alpha, --x and --v")
        alpha = _expect_form(_evaluate(env, args.alpha, "--alpha"), "--alpha")
        x_field = _expect_multivector(_evaluate(env, args.x, "--x"), "--x")
        v_value = _evaluate(env, args.v, "--v")
        _flush_warnings(env)
        data = make_conformal_data(S, alpha, x_field, v_value)
    else:
        # make: solve for the witness from the transformation alone
        if args.x is None:
            raise _UsageError("conformal make needs --x")
        x_field = _expect_multivector(_evaluate(env, args.x, "--x"), "--x")
        _flush_warnings(env)
        witness = verify_conformal(S, x_field)
        if witness is None:
            print("conformal: no (no witness solves the conformal equation)")
            return 1
        alpha = -interior_product(x_field, S.theta, strict=False)
        data = make_conformal_data(S, alpha, x_field, witness)
    print("conformal: yes")
    _print_value(data, args.format)
    if args.store:
        _store_binding(session, args.session, args.store, data)
    return 0


def _cmd_bracket(args) -> int:
    from .structures import cup_product, jacobi_bracket

    session = Session.load(args.session)
    env = _session_env(session)
    a = _expect_data(_evaluate(env, args.first, "first operand"), "first operand")
    b = _expect_data(_evaluate(env, args.second, "second operand"), "second operand")
    _flush_warnings(env)
    result = jacobi_bracket(a, b) if args.operation == "bracket" else cup_product(a, b)
    _print_value(result, args.format)
    return 0


def _cmd_symplectize(args) -> int:
    session = Session.load(args.session)
    sym = build(session.structure())
    print(f"fiber: {sym.fiber}")
    print(f"upsilon = {sym.upsilon}")
    print(f"omega = {sym.omega}")
    print(f"liouville = {sym.liouville}")
    report = nondegeneracy_check(sym)
    print(f"nondegenerate: {'yes' if report.ok else 'no'}")
    if not report.ok and report.witness is not None:
        print(f"witness: {report.witness}")
    return 0


def _cmd_lift(args) -> int:
    session = Session.load(args.session)
    env = _session_env(session)
    data = _expect_data(_evaluate(env, args.expr, "operand"), "operand")
    _flush_warnings(env)
    lifted = lift_conformal(env.extension, data.x_field, data.v_field)
    print(f"lift = {lifted}")
    return 0


def _cmd_poisson(args) -> int:
    session = Session.load(args.session)
    env = _session_env(session)
    a = _expect_data(_evaluate(env, args.first, "first operand"), "first operand")
    b = _expect_data(_evaluate(env, args.second, "second operand"), "second operand")
    _flush_warnings(env)
    result = poisson_bracket(env.extension, psi_map(env.extension, a), psi_map(env.extension, b))
    _print_value(result, args.format)
    return 0


def _cmd_psi_check(args) -> int:
    session = Session.load(args.session)
    env = _session_env(session)
    a = _expect_data(_evaluate(env, args.first, "first operand"), "first operand")
    b = _expect_data(_evaluate(env, args.second, "second operand"), "second operand")
    _flush_warnings(env)
    residual = check_correspondence(env.extension, a, b)
    print(f"residual = {residual}")
    if residual.is_zero():
        print("correspondence holds: yes")
        return 0
    print("correspondence holds: no")
    return 1


def _cmd_sharp(args) -> int:
    session = Session.load(args.session)
    env = _session_env(session)
    alpha = _expect_form(_evaluate(env, args.expr, "operand"), "operand")
    _flush_warnings(env)
    x_field, factor = sharp_and_reeb(session.structure(), alpha)
    print(f"sharp = {x_field}")
    print(f"reeb factor = {factor}")
    return 0


def _cmd_render(args) -> int:
    session = Session.load(args.session)
    env = _session_env(session)
    value = _evaluate(env, args.expr, "expression")
    _flush_warnings(env)
    _print_value(value, args.format)
    return 0


def _cmd_let(args) -> int:
    text = " ".join(args.assignment)
    if "=" not in text:
        raise _UsageError("let expects `let <name> = <expression>`")
    name, expr = text.split("=", 1)
    name = name.strip()
    session = Session.load(args.session)
    _check_binding_name(session, name)
    env = _session_env(session)
    value = _evaluate(env, expr, "expression")
    _flush_warnings(env)
    print(f"{name} =")
    _print_value(value)
    _store_binding(session, args.session, name, value)
    return 0


# ---------------------------------------------------------------------------
# canonical phase-space commands
# ---------------------------------------------------------------------------


def _row_title(row) -> str:
    if row.indices:
        inner = ",".join(str(i) for i in row.indices)
        return f"{row.family}({inner})"
    return str(row.family)


def _cmd_tables(args) -> int:
    C, _ = _canonical_from_args(args)
    rows, entries = elementary_tables(C)
    if args.format == "json":
        import json as _json

        payload = {
            "n": args.n,
            "m": args.m,
            "table1": [
                {
                    "family": row.family,
                    "indices": list(row.indices),
                    "alpha": to_json(row.data.alpha),
                    "x_field": to_json(row.data.x_field),
                    "v_field": to_json(row.data.v_field),
                    "factor": str(row.factor),
                }
                for row in rows
            ],
            "table2": [
                {
                    "row": _row_title(entry.row),
                    "column": _row_title(entry.column),
                    "computed": to_json(entry.computed),
                    "reference": to_json(entry.reference),
                    "match": entry.match,
                    "note": entry.note,
                }
                for entry in entries
            ],
        }
        print(_json.dumps(payload, indent=2, sort_keys=True))
        return 0
    latex = args.format == "latex"
    show = (lambda obj: render(obj, "latex")) if latex else (lambda obj: str(obj))
    print(f"elementary conformal forms on the canonical (n={args.n}, m={args.m}) phase space")
    print()
    print("Table 1: form | transformation | factor")
    for row in rows:
        print(f"  [{_row_title(row)}] alpha = {show(row.data.alpha)}")
        print(f"      X = {show(row.data.x_field)}")
        print(f"      factor = {row.factor}")
    print()
    print("Table 2: pairwise brackets, definitional vs reference")
    mismatches = 0
    for entry in entries:
        verdict = "MATCH" if entry.match else "MISMATCH"
        if not entry.match:
            mismatches += 1
        line = (
            f"  {{{_row_title(entry.row)}, {_row_title(entry.column)}}}"
            f" = {show(entry.computed)}  [reference: {show(entry.reference)}]  {verdict}"
        )
        if entry.note:
            line += f"  ({entry.note})"
        print(line)
    print()
    print(f"{len(entries)} brackets, {mismatches} mismatch(es) against the reference table")
    return 0


def _hdw_labels(C: CanonicalStructure, count: int) -> list[str]:
    labels = ["E_s"]
    for i in range(C.spec.m):
        for mu in range(C.spec.n):
            labels.append(f"E_y[{i},{mu}]")
    for i in range(C.spec.m):
        labels.append(f"E_p[{i}]")
    while len(labels) < count:
        labels.append(f"E[{len(labels)}]")
    return labels[:count]


def _legend(C: CanonicalStructure, J: JetSection) -> dict[str, str]:
    out = {}
    for field in J.fields:
        for x in C.x_names:
            out[jet_name(field, x)] = f"first derivative of {field} along {x}"
    return out


def _cmd_hdw(args) -> int:
    C, meta = _canonical_from_args(args, (args.H,))
    env = meta["env"]
    H = _scalar_on(env, args.H, "--H")
    _flush_warnings(env)
    section = hamiltonian_section(C, H)
    J = JetSection.for_hamiltonian_section(section)
    sigma = dissipation_form(C, section)
    equations = hdw_residuals(C, section, J)
    labels = _hdw_labels(C, len(equations))
    if args.format == "json":
        import json as _json

        payload = {
            "n": args.n,
            "m": args.m,
            "parameters": list(meta["parameters"]),
            "hamiltonian": str(H),
            "sigma": to_json(sigma),
            "residuals": [
                {"label": label, "expression": str(eq)} for label, eq in zip(labels, equations)
            ],
            "legend": _legend(C, J),
        }
        print(_json.dumps(payload, indent=2, sort_keys=True))
        return 0
    if args.format == "latex":
        print(f"\\sigma_h = {render(sigma, 'latex')}")
        for label, eq in zip(labels, equations):
            print(f"0 = {latex_coefficient(eq)} \\qquad [{latex_name(label)}]")
        return 0
    if meta["parameters"]:
        print(f"parameters: {', '.join(meta['parameters'])}")
    print(f"sigma = {sigma}")
    print("field equations (each = 0):")
    from .coeffring import format_coefficient

    for label, eq in zip(labels, equations):
        print(f"  {label}: {format_coefficient(eq, elide_unit=True)}")
    legend = _legend(C, J)
    print("legend:")
    for symbol in sorted(legend):
        print(f"  {symbol}: {legend[symbol]}")
    return 0


def _cmd_sigma(args) -> int:
    C, meta = _canonical_from_args(args, (args.H,))
    env = meta["env"]
    H = _scalar_on(env, args.H, "--H")
    _flush_warnings(env)
    section = hamiltonian_section(C, H)
    sigma = dissipation_form(C, section)
    _print_value(sigma, args.format)
    return 0


def _parse_row_spec(text: str) -> tuple[int, tuple[int, ...]]:
    head, _, tail = text.partition(":")
    if not head.isdigit():
        raise _UsageError(f"bad --row {text!r}; expected FAMILY[:i[,mu]] like 3:0 or 2:0,1")
    family = int(head)
    indices = tuple(int(p) for p in _split_names(tail)) if tail else ()
    return family, indices


def _cmd_dissipated(args) -> int:
    exprs = [args.H]
    if args.F:
        exprs.append(args.F)
    if args.G:
        exprs.extend(args.G)
    C, meta = _canonical_from_args(args, tuple(exprs))
    env = meta["env"]
    H = _scalar_on(env, args.H, "--H")
    section = hamiltonian_section(C, H)
    if args.row and (args.F or args.G):
        raise _UsageError("give either --row or --F/--G, not both")
    if args.row:
        family, indices = _parse_row_spec(args.row)
        rows, _ = elementary_tables(C)
        matches = [r for r in rows if r.family == family and (not indices or r.indices == indices)]
        if not matches:
            raise _UsageError(f"no elementary row {args.row!r} on this phase space")
        if len(matches) > 1:
            options = ", ".join(_row_title(r) for r in matches)
            raise _UsageError(f"--row {args.row!r} is ambiguous; candidates: {options}")
        data = matches[0].data
        title = matches[0].label
    elif args.F or args.G:
        if args.G and len(args.G) != C.spec.n:
            raise _UsageError(f"--G must be given {C.spec.n} times (one component per variable)")
        F = _scalar_on(env, args.F, "--F") if args.F else Coefficient.zero(C.chart)
        G = (
            [_scalar_on(env, g, "--G") for g in args.G]
            if args.G
            else [Coefficient.zero(C.chart)] * C.spec.n
        )
        _, data = vertical_conformal_from_FG(C, F, G)
        title = "vertical conformal data from (F, G)"
    else:
        raise _UsageError("dissipated needs --row or --F/--G to pick the conformal data")
    _flush_warnings(env)
    verdict = dissipated_check(C, section, data)
    print(f"form: {title}")
    print(f"alpha = {data.alpha}")
    print(f"dissipated: {'yes' if verdict else 'no'}")
    return 0 if verdict else 1


def _cmd_distortion(args) -> int:
    if args.n is not None or args.m is not None:
        if args.n is None or args.m is None:
            raise _UsageError("give both --n and --m (or neither, to use the session)")
        S = build_canonical(args.n, args.m)
    else:
        S = Session.load(args.session).structure()
    table, all_zero = distortion(S)
    size = max((i for i, _ in table), default=-1) + 1
    for i in range(size):
        for j in range(size):
            print(f"C[{i}][{j}] = {table[(i, j)]}")
    print(f"all zero: {'yes' if all_zero else 'no'}")
    return 0


# ---------------------------------------------------------------------------
# parser assembly and dispatch
# ---------------------------------------------------------------------------


def _add_session_flag(parser) -> None:
    parser.add_argument(
        "-s",
        "--session",
        default="gjb-session.json",
        help="session file (default: gjb-session.json)",
    )


def _add_format_flag(parser) -> None:
    parser.add_argument(
        "--format",
        choices=("plain", "latex", "json"),
        default="plain",
        help="output format",
    )


def _add_nm_flags(parser, required: bool = True) -> None:
    parser.add_argument("--n", type=int, required=required, help="number of independent variables")
    parser.add_argument("--m", type=int, required=required, help="number of field components")


def _build_parser() -> _Parser:
    parser = _Parser(prog="gjb", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    chart = sub.add_parser("chart", help="manage the session chart")
    chart_sub = chart.add_subparsers(dest="chart_command", required=True)
    new = chart_sub.add_parser("new", help="start a session on a fresh chart")
    new.add_argument("--coordinates", help="comma-separated coordinate names")
    new.add_argument("--nonvanishing", help="comma-separated invertible coordinates")
    new.add_argument("--canonical", help="N,M: canonical phase space chart with its structure form")
    new.add_argument("--parameters", help="comma-separated symbolic constants (canonical only)")
    _add_session_flag(new)
    new.set_defaults(func=_cmd_chart_new)

    theta = sub.add_parser("theta", help="manage the structure form")
    theta_sub = theta.add_subparsers(dest="theta_command", required=True)
    tset = theta_sub.add_parser("set", help="install the structure form")
    tset.add_argument("expr", help="form expression, e.g. 'd(z)^d(x) - p*d(x)^d(y)'")
    _add_session_flag(tset)
    tset.set_defaults(func=_cmd_theta_set)

    check = sub.add_parser("check", help="structure checks")
    check_sub = check.add_subparsers(dest="check_command", required=True)
    mc = check_sub.add_parser("multicontact", help="degree-1 kernel conditions")
    _add_session_flag(mc)
    mc.set_defaults(func=_cmd_check_multicontact)

    kernel = sub.add_parser("kernel", help="kernel basis of the structure form")
    kernel.add_argument("--degree", type=int, default=1)
    kernel.add_argument("--which", choices=("theta", "dtheta", "both"), default="theta")
    _add_session_flag(kernel)
    kernel.set_defaults(func=_cmd_kernel)

    conformal = sub.add_parser("conformal", help="conformal data construction and checks")
    conformal.add_argument("mode", choices=("verify", "make"))
    conformal.add_argument("--alpha", help="form expression (verify)")
    conformal.add_argument("--x", help="multivector expression")
    conformal.add_argument("--v", help="witness expression (verify)")
    conformal.add_argument("--store", help="bind the validated data to this session name")
    _add_format_flag(conformal)
    _add_session_flag(conformal)
    conformal.set_defaults(func=_cmd_conformal)

    for name, operation in (("bracket", "bracket"), ("cup", "cup")):
        cmd = sub.add_parser(name, help=f"{name} of two conformal data expressions")
        cmd.add_argument("first")
        cmd.add_argument("second")
        _add_format_flag(cmd)
        _add_session_flag(cmd)
        cmd.set_defaults(func=_cmd_bracket, operation=operation)

    symplectize = sub.add_parser("symplectize", help="homogeneous extension of the session structure")
    _add_session_flag(symplectize)
    symplectize.set_defaults(func=_cmd_symplectize)

    lift = sub.add_parser("lift", help="homogeneous lift of conformal data")
    lift.add_argument("expr")
    _add_session_flag(lift)
    lift.set_defaults(func=_cmd_lift)

    poisson = sub.add_parser("poisson", help="graded Poisson bracket on the extension")
    poisson.add_argument("first")
    poisson.add_argument("second")
    _add_format_flag(poisson)
    _add_session_flag(poisson)
    poisson.set_defaults(func=_cmd_poisson)

    psi_check = sub.add_parser("psi-check", help="bracket correspondence residual on the extension")
    psi_check.add_argument("first")
    psi_check.add_argument("second")
    _add_session_flag(psi_check)
    psi_check.set_defaults(func=_cmd_psi_check)

    sharp = sub.add_parser("sharp", help="invert the flat map and read off the Reeb factor")
    sharp.add_argument("expr")
    _add_session_flag(sharp)
    sharp.set_defaults(func=_cmd_sharp)

    tables = sub.add_parser("tables", help="elementary conformal forms and their bracket table")
    _add_nm_flags(tables)
    _add_format_flag(tables)
    tables.set_defaults(func=_cmd_tables)

    hdw = sub.add_parser("hdw", help="covariant Hamilton equations for a Hamiltonian function")
    _add_nm_flags(hdw)
    hdw.add_argument("--H", required=True, help="Hamiltonian expression; unknown names become parameters")
    _add_format_flag(hdw)
    hdw.set_defaults(func=_cmd_hdw)

    sigma = sub.add_parser("sigma", help="dissipation one-form of a Hamiltonian function")
    _add_nm_flags(sigma)
    sigma.add_argument("--H", required=True)
    _add_format_flag(sigma)
    sigma.set_defaults(func=_cmd_sigma)

    dissipated = sub.add_parser("dissipated", help="test a conformal form against the dissipation law")
    _add_nm_flags(dissipated)
    dissipated.add_argument("--H", required=True)
    dissipated.add_argument("--row", help="elementary row FAMILY[:i[,mu]], e.g. 1, 3:0, 2:0,1")
    dissipated.add_argument("--F", help="scalar F(x, y) for vertical conformal data")
    dissipated.add_argument("--G", action="append", help="component G^mu (repeat n times)")
    dissipated.set_defaults(func=_cmd_dissipated)

    distortion_cmd = sub.add_parser("distortion", help="distortion table of a variational structure")
    _add_nm_flags(distortion_cmd, required=False)
    _add_session_flag(distortion_cmd)
    distortion_cmd.set_defaults(func=_cmd_distortion)

    render_cmd = sub.add_parser("render", help="evaluate an expression and print it")
    render_cmd.add_argument("expr")
    _add_format_flag(render_cmd)
    _add_session_flag(render_cmd)
    render_cmd.set_defaults(func=_cmd_render)

    let = sub.add_parser("let", help="bind a name in the session: let a = d(x)^d(y)")
    let.add_argument("assignment", nargs="+")
    _add_session_flag(let)
    let.set_defaults(func=_cmd_let)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except SessionError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except ParseError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except ValidationError as err:
        print(f"error: {err}", file=sys.stderr)
        for label, residual in err.residuals.items():
            print(f"  residual[{label}] = {residual}", file=sys.stderr)
        return 1
    except GjbError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
