"""Batch analyzer: ``analyze <file> --cmd <command> [--max-degree D] [--max-order N] [--json]``.

Problem files are JSON (schema in ``fixtures/SCHEMA.md``).  Every command
builds a plain report dict; the text output is a rendering of its
``summary`` lines, the JSON output is the dict itself.
"""
from __future__ import annotations

import argparse
import json
import os
import re
import sys
from dataclasses import dataclass, field
from math import gcd
from pathlib import Path
from typing import Any

import jsonschema

from .algebra import NCPoly, PBWPresentation, make_presentation, skew
from .autgroup import (FiniteGroup, GradedMap, classical_family, close_group, compare_order_distributions,
                       g_b, order_distribution, tau, theta)
from .errors import (FieldMismatchError, GroupTooLargeError, InternalConsistencyError, NotAutomorphismError,
                     SpecError)
from .invariants import circle_invariant_generators, free_module_check, generator_mining_and_verify
from .series import (format_product_form, matches_qr_form, molien_fixed_hilbert, qr_form, recognize_product_form,
                     trace_series)
from .structure import block_circle_decomposition, classify_quasi_reflection, decide_stc, make_M_group, twist_check

SCHEMA_VERSION = 1
COMMANDS = ("classify", "decompose", "decide-stc", "hilbert", "invariants", "trace", "free-module",
            "compare-orders", "twist-check", "mgroup")

PROBLEM_SCHEMA = {
    "type": "object",
    "required": ["ring"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "name": {"type": "string"},
        "field": {"type": "object",
                  "properties": {"root_of_unity_order": {"type": "integer", "minimum": 1},
                                 "working_order": {"type": "integer", "minimum": 1}},
                  "additionalProperties": False},
        "ring": {"type": "object", "required": ["kind"]},
        "generators": {"type": "array"},
        "invariant_generators": {"type": "array", "items": {"type": "array"}},
        "options": {"type": "object",
                    "properties": {"max_degree": {"type": "integer", "minimum": 0},
                                   "max_group_order": {"type": "integer", "minimum": 1},
                                   "commands": {"type": "array", "items": {"type": "string"}}},
                    "additionalProperties": False},
    },
    "additionalProperties": False,
}


class UserError(Exception):
    pass


@dataclass
class AnalysisConfig:
    max_degree: int = 12
    max_group_order: int = 10_000
    commands: list = field(default_factory=list)

    def overridden(self, max_degree=None, max_group_order=None, env=None) -> "AnalysisConfig":
        """Flags beat environment variables, which beat the file."""
        env = os.environ if env is None else env
        D, N = self.max_degree, self.max_group_order
        if env.get("SKEWSTC_MAX_DEGREE"):
            D = int(env["SKEWSTC_MAX_DEGREE"])
        if env.get("SKEWSTC_MAX_ORDER"):
            N = int(env["SKEWSTC_MAX_ORDER"])
        if max_degree is not None:
            D = max_degree
        if max_group_order is not None:
            N = max_group_order
        return AnalysisConfig(D, N, list(self.commands))


@dataclass
class ProblemSpec:
    field_order: int
    working_order: int
    ring: PBWPresentation
    generators: list
    options: AnalysisConfig = field(default_factory=AnalysisConfig)
    invariant_generators: list = field(default_factory=list)
    name: str = ""
    _group: Any = field(default=None, repr=False, compare=False)

    def group(self) -> FiniteGroup:
        if self._group is None:
            self._group = close_group(self.generators, cap=self.options.max_group_order, ring=self.ring)
        return self._group


# ---------------------------------------------------------------------------
# parsing


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def _declared_orders(obj, out: set) -> None:
    if isinstance(obj, dict):
        if "order" in obj and ("zeta_exp" in obj or "coeffs" in obj):
            out.add(int(obj["order"]))
        for v in obj.values():
            _declared_orders(v, out)
    elif isinstance(obj, list):
        for v in obj:
            _declared_orders(v, out)


def global_field_order(doc: dict) -> int:
    """lcm of all declared root orders, doubled for square roots, then made a multiple of 4."""
    fld = doc.get("field", {})
    if "working_order" in fld:
        return int(fld["working_order"])
    orders = {int(fld.get("root_of_unity_order", 1))}
    _declared_orders(doc.get("ring"), orders)
    _declared_orders(doc.get("generators"), orders)
    _declared_orders(doc.get("invariant_generators"), orders)
    L = 1
    for k in orders:
        L = _lcm(L, k)
    return _lcm(2 * L, 4)


def _generator(A: PBWPresentation, g) -> GradedMap:
    if isinstance(g, list):
        return GradedMap(A, [[A.scalar(c) for c in row] for row in g])
    if isinstance(g, dict) and len(g) == 1:
        (kind, args), = g.items()
        if kind == "tau":
            s, t, *rest = args
            return tau(A, int(s), int(t), A.scalar(rest[0]) if rest else 1)
        if kind == "theta":
            s, lam = args
            return theta(A, int(s), A.scalar(lam))
        if kind == "g_b":
            return g_b(A, A.scalar(args))
    raise SpecError("generator must be a matrix or one of {tau, theta, g_b}")


def parse_input(text: str | dict) -> ProblemSpec:
    """Validate a problem document and build the ring, generators and options."""
    if isinstance(text, str):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise UserError(f"invalid JSON: {exc}") from None
    else:
        doc = text
    try:
        jsonschema.validate(doc, PROBLEM_SCHEMA)
    except jsonschema.ValidationError as exc:
        path = ".".join(str(p) for p in exc.absolute_path) or "<root>"
        raise UserError(f"{path}: {exc.message}") from None
    M = int(doc.get("field", {}).get("root_of_unity_order", 1))
    W = global_field_order(doc)
    if W % 4 or W % M:
        raise UserError(f"field.working_order: {W} must be a multiple of 4 and of {M}")

    try:
        ring = make_presentation(doc["ring"], W)
    except (SpecError, FieldMismatchError, ValueError, KeyError, TypeError) as exc:
        raise UserError(f"ring: {exc}") from None
    gens = []
    for k, g in enumerate(doc.get("generators", [])):
        try:
            gens.append(_generator(ring, g))
        except (SpecError, FieldMismatchError, NotAutomorphismError, ValueError, TypeError) as exc:
            raise UserError(f"generators[{k}]: {exc}") from None
    inv = []
    for k, f in enumerate(doc.get("invariant_generators", [])):
        try:
            inv.append(NCPoly.from_json(ring, f))
        except (FieldMismatchError, ValueError, KeyError, TypeError) as exc:
            raise UserError(f"invariant_generators[{k}]: {exc}") from None
    opts = doc.get("options", {})
    cfg = AnalysisConfig(int(opts.get("max_degree", 12)), int(opts.get("max_group_order", 10_000)),
                         list(opts.get("commands", [])))
    return ProblemSpec(M, W, ring, gens, cfg, inv, doc.get("name", ""))


def serialize(spec: ProblemSpec) -> str:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "field": {"root_of_unity_order": spec.field_order, "working_order": spec.working_order},
        "ring": spec.ring.to_spec(),
        "generators": [g.to_json() for g in spec.generators],
        "options": {"max_degree": spec.options.max_degree, "max_group_order": spec.options.max_group_order,
                    "commands": list(spec.options.commands)},
    }
    if spec.name:
        doc["name"] = spec.name
    if spec.invariant_generators:
        doc["invariant_generators"] = [f.to_json() for f in spec.invariant_generators]
    return json.dumps(doc, indent=2, sort_keys=True)


# ---------------------------------------------------------------------------
# group descriptors used by compare-orders and mgroup

_GROUP_RE = re.compile(r"^\s*([MG])\s*\(\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*\)\s*$")


def group_from_descriptor(text: str, cap: int = 10_000) -> FiniteGroup:
    """"M(n,a,b)" on k_{-1}[x1..xn] or "G(m,p,n)" on the commutative ring."""
    m = _GROUP_RE.match(text)
    if not m:
        raise UserError(f"cannot read group {text!r}; expected M(n,a,b) or G(m,p,n)")
    kind, a, b, c = m.group(1), int(m.group(2)), int(m.group(3)), int(m.group(4))
    if kind == "M":
        return make_M_group(a, b, c, cap=cap)
    A = skew(c, 1, order=_lcm(a, 4))
    return close_group(classical_family(A, a, b), cap=cap, ring=A)


# ---------------------------------------------------------------------------
# commands


def _series_list(s) -> list:
    ints = s.integers()
    return ints if ints is not None else [str(c) for c in s.coeffs]


def _report(command: str, summary: list, **data) -> dict:
    out = {"schema_version": SCHEMA_VERSION, "command": command, "summary": summary}
    out.update(data)
    return out


def _need_spec(spec, command):
    if spec is None:
        raise UserError(f"{command} needs a problem file")
    return spec


def cmd_classify(spec: ProblemSpec, cfg: AnalysisConfig) -> dict:
    A, G = spec.ring, spec.group()
    D = cfg.max_degree
    gens = [classify_quasi_reflection(A, g, D).to_json() for g in spec.generators]
    rows = []
    counts = {"NotQR": 0, "Reflection": 0, "Mystic": 0}
    for k, g in enumerate(G.elements):
        c = classify_quasi_reflection(A, g, D)
        counts[c.variant] += 1
        row = {"element": k, "order": c.order, "variant": c.variant}
        if c.is_qr:
            row["lambda"] = c.lam.to_json()
        rows.append(row)
    summary = [f"|G| = {len(G)}",
               f"reflections: {counts['Reflection']}; mystic reflections: {counts['Mystic']}; "
               f"other: {counts['NotQR']}"]
    for k, c in enumerate(gens):
        summary.append(f"generator {k + 1}: {c['variant']} (order {c['order']})")
    return _report("classify", summary, group_order=len(G), generators=gens, elements=rows, counts=counts)


def cmd_decompose(spec: ProblemSpec, cfg: AnalysisConfig) -> dict:
    dec = block_circle_decomposition(spec.ring, spec.group(), cfg.max_degree)
    summary = []
    for p in dec.parts:
        idx = ",".join(str(i) for i in p.indices)
        line = f"{p.kind} {{{idx}}}: |G_v| = {len(p.group)}"
        if p.circle_params is not None:
            line += f", alpha = {p.circle_params[0]}, beta = {p.circle_params[1]}"
        summary.append(line)
    summary.append(f"generated by quasi-reflections: {'yes' if dec.qr_generated else 'no'}")
    return _report("decompose", summary, decomposition=dec.to_json())


def cmd_decide(spec: ProblemSpec, cfg: AnalysisConfig) -> dict:
    rep = decide_stc(spec.ring, spec.group(), cfg.max_degree)
    yes = "yes" if rep.generated_by_qr else "no"
    summary = [f"generated by quasi-reflections: {yes}; G ≅ {rep.structure}; |G| = {rep.group_order}",
               rep.verdict]
    return _report("decide-stc", summary, result=rep.to_json())


def cmd_hilbert(spec: ProblemSpec, cfg: AnalysisConfig) -> dict:
    D = cfg.max_degree
    s = molien_fixed_hilbert(spec.ring, spec.group(), D)
    degs = recognize_product_form(s, n=spec.ring.n)
    form = format_product_form(degs) if degs else None
    vals = _series_list(s)
    line = "series " + ",".join(str(v) for v in vals)
    line += f" recognized as {form}" if form else " not of product form with n factors"
    return _report("hilbert", [line, f"checked through degree {D}"], series=vals, product_form=form,
                   degrees=degs, max_degree=D)


def cmd_invariants(spec: ProblemSpec, cfg: AnalysisConfig) -> dict:
    A, G, D = spec.ring, spec.group(), cfg.max_degree
    out = {}
    summary = []
    if spec.invariant_generators:
        ver = generator_mining_and_verify(A, G, spec.invariant_generators, D)
        out["verification"] = ver.to_json()
        state = "verified" if ver.ok else f"deficits {ver.deficits}"
        summary.append(f"given generators: {state} to degree {D}")
        if ver.redundant:
            summary.append("redundant: " + ", ".join(str(ver.generators[i]) for i in ver.redundant))
    mined = generator_mining_and_verify(A, G, None, D)
    out["mined"] = mined.to_json()
    summary.append(f"mined {len(mined)} generators to degree {D}: " + ", ".join(str(f) for f in mined.generators))
    return _report("invariants", summary, **out)


def cmd_trace(spec: ProblemSpec, cfg: AnalysisConfig, arg: str) -> dict:
    m = re.fullmatch(r"g\s*=\s*(\d+)", arg.strip())
    if not m:
        raise UserError("trace expects g=<k> with k a 1-based generator index")
    k = int(m.group(1))
    if not 1 <= k <= len(spec.generators):
        raise UserError(f"generator index {k} out of range 1..{len(spec.generators)}")
    A, g, D = spec.ring, spec.generators[k - 1], cfg.max_degree
    s = trace_series(A, g, D)
    c = classify_quasi_reflection(A, g, D)
    if c.is_qr and matches_qr_form(s, A.n, c.lam):
        form = str(qr_form(A.n, c.lam))
    else:
        degs = recognize_product_form(s)
        form = format_product_form(degs) if degs else None
    vals = _series_list(s)
    summary = ["trace " + ",".join(str(v) for v in vals),
               f"matched form: {form or 'none'}; classification: {c.variant}"]
    return _report("trace", summary, generator=k, series=vals, form=form,
                   classification=c.to_json())


def cmd_free_module(spec: ProblemSpec, cfg: AnalysisConfig) -> dict:
    rep = free_module_check(spec.ring, spec.group(), cfg.max_degree)
    summary = [f"basis: {rep.basis}", rep.message]
    if rep.cosets:
        summary.insert(1, f"{len(rep.cosets)} coset monomials, degree polynomial {rep.coset_polynomial}")
    return _report("free-module", summary, result=rep.to_json())


def cmd_compare(args: list, cfg: AnalysisConfig) -> dict:
    if len(args) != 2:
        raise UserError("compare-orders expects two groups, e.g. compare-orders M(4,1,2) G(2,2,4)")
    G1 = group_from_descriptor(args[0], cfg.max_group_order)
    G2 = group_from_descriptor(args[1], cfg.max_group_order)
    cmp = compare_order_distributions(G1, G2)
    rel = "=" if len(G1) == len(G2) else "!="
    if cmp["same_distribution"]:
        head = f"orders {len(G1)} {rel} {len(G2)}; identical order distributions"
    else:
        head = f"orders {len(G1)} {rel} {len(G2)}; distributions differ at element order {cmp['first_differing_order']}"
    summary = [head]
    a, b = cmp["distribution_a"], cmp["distribution_b"]
    summary.append(f"  element order: {args[0]} {args[1]}")
    for o in a:
        summary.append(f"  {o}: {a[o]} {b[o]}")
    data = {"groups": list(args), "group_orders": cmp["orders"], "distribution_a": a, "distribution_b": b,
            "differing_orders": cmp["differing_orders"], "first_differing_order": cmp["first_differing_order"]}
    return _report("compare-orders", summary, **data)


def cmd_twist(spec: ProblemSpec, cfg: AnalysisConfig) -> dict:
    G = spec.group() if spec.generators else None
    rep = twist_check(spec.ring, G, cfg.max_degree)
    s, p = rep["singletons"], rep["partition"]
    parts = " | ".join(",".join(str(i) for i in q["indices"]) for q in p["parts"])
    summary = [f"all-singletons twist: {s['pairs_checked']} pairs, "
               + ("all commute" if s["ok"] else f"failing {s['failing']}"),
               f"partition {parts}: " + ("cross-part generators commute, parts keep their relations"
                                         if p["ok"] else f"cross failing {p['cross_part_failing']}, "
                                                         f"inner failing {p['inner_failing']}")]
    return _report("twist-check", summary, result=rep)


def cmd_mgroup(args: list, cfg: AnalysisConfig) -> dict:
    if len(args) != 3:
        raise UserError("mgroup expects n alpha beta")
    try:
        n, a, b = (int(x) for x in args)
    except ValueError:
        raise UserError("mgroup arguments must be integers") from None
    G = make_M_group(n, a, b, cap=cfg.max_group_order)
    A = G.ring
    rep = decide_stc(A, G, cfg.max_degree)
    D = cfg.max_degree
    gens = circle_invariant_generators(n, a, b, D, G=G)
    ver = generator_mining_and_verify(A, G, gens.generators, D)
    summary = [f"|M({n},{a},{b})| = {len(G)}; structure {rep.structure}",
               f"generators ({gens.label}): " + ", ".join(str(f) for f in gens.generators),
               f"verified to degree {D}: " + ("yes" if ver.ok else f"deficits {ver.deficits}")]
    dist = {str(k): v for k, v in order_distribution(G).items()}
    return _report("mgroup", summary, group_order=len(G), order_distribution=dist, decision=rep.to_json(),
                   generators=gens.to_json(), verification=ver.to_json())


def run_command(spec: ProblemSpec | None, command: str, cfg: AnalysisConfig | None = None) -> dict:
    cfg = cfg or (spec.options if spec is not None else AnalysisConfig())
    words = command.split()
    if not words:
        raise UserError("empty command")
    head, rest = words[0], words[1:]
    if head == "compare-orders":
        return cmd_compare(rest, cfg)
    if head == "mgroup":
        return cmd_mgroup(rest, cfg)
    if head not in COMMANDS:
        raise UserError(f"unknown command {head!r}; choose from {', '.join(COMMANDS)}")
    spec = _need_spec(spec, head)
    if head == "trace":
        return cmd_trace(spec, cfg, " ".join(rest))
    table = {"classify": cmd_classify, "decompose": cmd_decompose, "decide-stc": cmd_decide,
             "hilbert": cmd_hilbert, "invariants": cmd_invariants, "free-module": cmd_free_module,
             "twist-check": cmd_twist}
    return table[head](spec, cfg)


def render(report: dict, as_json: bool) -> str:
    if as_json:
        return json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False)
    return "\n".join([f"[{report['command']}]"] + list(report["summary"]))


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="analyze", description="Invariant theory of skew polynomial rings and O_q(M_2).")
    p.add_argument("file", nargs="?", help="problem JSON (optional for compare-orders and mgroup)")
    p.add_argument("--cmd", action="append", help="command to run; repeatable")
    p.add_argument("--max-degree", type=int, default=None)
    p.add_argument("--max-order", type=int, default=None)
    p.add_argument("--json", action="store_true", help="emit JSON reports")
    return p


def main(argv: list | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = None
        if args.file:
            try:
                text = Path(args.file).read_text()
            except OSError as exc:
                raise UserError(f"cannot read {args.file}: {exc.strerror}") from None
            spec = parse_input(text)
        base = spec.options if spec is not None else AnalysisConfig()
        cfg = base.overridden(args.max_degree, args.max_order)
        if spec is not None:
            spec.options = cfg
        commands = args.cmd or list(base.commands)
        if not commands:
            raise UserError("no command given (use --cmd)")
        reports = [run_command(spec, c, cfg) for c in commands]
    except InternalConsistencyError as exc:
        print(f"internal consistency error: {exc}", file=sys.stderr)
        return 2
    except (UserError, SpecError, FieldMismatchError, NotAutomorphismError, GroupTooLargeError,
            ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.json:
        out = reports[0] if len(reports) == 1 else reports
        print(json.dumps(out, indent=2, sort_keys=True, ensure_ascii=False))
    else:
        print("\n\n".join(render(r, False) for r in reports))
    return 0


if __name__ == "__main__":
    sys.exit(main())
