"""Command-line driver.

Exit codes: 0 when the check passes, 1 on a mathematical failure (the
report carries a witness), 2 on unreadable or malformed input.

``--format structured`` prints JSON lines with sorted keys; each record
carries the schema version, the command and the seed, and no timing, so
the same arguments always give byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from typing import Any, Callable

from . import formats
from .descent import (
    PresheafError,
    check_hypersheaf,
    check_sheaf,
    check_sheaf_on_basis,
    hypercover_suite,
    right_kan_extend,
    roundtrip_theorem_check,
)
from .formats import InputError
from .homotopy import (
    COINITIAL,
    check_coinitial,
    slice_counterexample,
    verify_sym_coinitiality_instance,
)
from .hypercover import (
    cech_from_cover,
    check_hypercover,
    describe_sphere,
    refine_to_basis,
)
from .simplicial import (
    SimplicialError,
    boundary_simplex,
    standard_simplex,
)
from .topology import (
    Basis,
    NotACover,
    TopologyError,
    describe_witness,
    is_intersection_stable,
    minimal_basis,
    verify_topology,
)

SCHEMA = "hyperdescent.report/1"

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INPUT = 2


@dataclass
class RunConfig:
    command: str
    trunc: int | None
    cap: int
    samples: int | None
    seed: int
    format: str
    degree: int


@dataclass
class Report:
    """Collects records; ``lines`` are the human-readable rendering."""

    config: RunConfig
    records: list[dict] = field(default_factory=list)
    lines: list[str] = field(default_factory=list)

    def record(self, kind: str, **data: Any) -> None:
        self.records.append({"kind": kind, **data})

    def say(self, text: str) -> None:
        self.lines.append(text)

    def emit(self, out) -> None:
        if self.config.format == "structured":
            for rec in self.records:
                full = {
                    "schema": SCHEMA,
                    "command": self.config.command,
                    "seed": self.config.seed,
                    **rec,
                }
                out.write(json.dumps(full, sort_keys=True, default=str) + "\n")
        else:
            for line in self.lines:
                out.write(line + "\n")


def _show_masks(space, masks) -> list[str]:
    return [space.show(U) for U in masks]


def _basis_for(space, raw_basis, args) -> Basis:
    choice = args.basis if getattr(args, "basis", None) else raw_basis
    return formats.resolve_basis(space, choice)


# -- commands -------------------------------------------------------------------


def cmd_check_topology(args, report: Report) -> int:
    space, raw_basis = formats.load_space(args.space)
    ok, witness = verify_topology(space)
    if not ok:
        report.record("result", ok=False, witness=witness and {
            k: space.show(v) if isinstance(v, int) else v for k, v in witness.items()
        })
        report.say(f"FAIL topology: {describe_witness(space, witness)}")
        return EXIT_FAIL
    report.say(f"ok: {len(space.points)} points, {len(space.opens)} opens")
    result: dict = {"ok": True, "points": len(space.points), "opens": len(space.opens)}
    if raw_basis is not None or getattr(args, "basis", None):
        try:
            basis = _basis_for(space, raw_basis, args)
        except TopologyError as exc:
            report.record("result", ok=False, witness={"basis": str(exc)})
            report.say(f"FAIL basis: {exc}")
            return EXIT_FAIL
        stable, pair = is_intersection_stable(basis)
        result["basis"] = _show_masks(space, basis.members)
        result["intersection_stable"] = stable
        report.say("basis: " + " ".join(result["basis"]))
        report.say("intersection-stable" if stable else
                   f"not intersection-stable: {space.show(pair[0])} ∩ {space.show(pair[1])}")
    report.record("result", **result)
    return EXIT_OK


def cmd_minimal_basis(args, report: Report) -> int:
    space, _ = formats.load_space(args.space)
    ok, witness = verify_topology(space)
    if not ok:
        raise InputError(f"not a topology: {describe_witness(space, witness)}")
    basis = minimal_basis(space)
    stable, pair = is_intersection_stable(basis)
    members = _show_masks(space, basis.members)
    report.record(
        "result",
        ok=True,
        basis=members,
        intersection_stable=stable,
        witness=None if stable else _show_masks(space, pair),
    )
    report.say("minimal basis: " + " ".join(members))
    report.say("intersection-stable" if stable else
               f"not intersection-stable: {space.show(pair[0])} ∩ {space.show(pair[1])}"
               f" = {space.show(pair[0] & pair[1])}")
    return EXIT_OK


def _parse_open(space, text: str) -> int:
    names = [p for p in text.replace(" ", "").split(",") if p]
    try:
        U = space.mask(names)
    except TopologyError as exc:
        raise InputError(str(exc)) from None
    return U


def _emit_hypercover(args, report: Report, H) -> None:
    data = formats.hypercover_to_dict(H)
    if args.output:
        formats.write_json(args.output, data)
        report.say(f"wrote {args.output}")
        report.record("artifact", path=args.output)
    else:
        report.say(json.dumps(data, sort_keys=True))
        report.record("artifact", hypercover=data)


def cmd_cech(args, report: Report) -> int:
    space, _ = formats.load_space(args.space)
    cover = [_parse_open(space, text) for text in args.cover]
    target = _parse_open(space, args.target) if args.target else None
    N = 2 if args.trunc is None else args.trunc
    try:
        H = cech_from_cover(space, cover, N, target=target)
    except NotACover as exc:
        report.record("result", ok=False, witness={"cover": str(exc)})
        report.say(f"FAIL: {exc}")
        return EXIT_FAIL
    except TopologyError as exc:
        raise InputError(str(exc)) from None
    ok, witness = check_hypercover(H, N)
    if not ok:
        return _hypercover_failure(report, H, witness)
    report.record("result", ok=True, levels=list(H.spine.counts), trunc=N)
    report.say(f"ok: Cech hypercover with level sizes {list(H.spine.counts)}")
    _emit_hypercover(args, report, H)
    return EXIT_OK


def _hypercover_failure(report: Report, H, witness) -> int:
    sp = H.space
    w = {
        "n": witness["n"],
        "sphere": describe_sphere(H, witness["sphere"]),
        "fillers_cover": sp.show(witness["lhs"]),
        "facets_meet": sp.show(witness["rhs"]),
    }
    report.record("result", ok=False, witness=w)
    report.say(
        f"FAIL in dimension {w['n']}: fillers cover {w['fillers_cover']}"
        f" but the facets meet in {w['facets_meet']}"
    )
    if w["sphere"] is not None:
        report.say("sphere: " + json.dumps(w["sphere"]))
    return EXIT_FAIL


def cmd_check_hypercover(args, report: Report) -> int:
    H = formats.load_hypercover(args.hypercover)
    N = args.trunc
    if N is not None and N > H.max_dim:
        raise InputError(f"--trunc {N} exceeds the stored truncation {H.max_dim}")
    bad = H.check_functorial()
    if bad is not None:
        x, i = bad
        report.record("result", ok=False, witness={"simplex": repr(H.spine.label(x)), "face": i,
                                                    "kind": "open not inside face open"})
        report.say(f"FAIL: open of {H.spine.label(x)} is not inside the open of face {i}")
        return EXIT_FAIL
    ok, witness = check_hypercover(H, N)
    if not ok:
        return _hypercover_failure(report, H, witness)
    report.record("result", ok=True, levels=list(H.spine.counts))
    report.say(f"ok: hypercover of {H.space.show(H.target)}, level sizes {list(H.spine.counts)}")
    return EXIT_OK


def cmd_refine(args, report: Report) -> int:
    H = formats.load_hypercover(args.hypercover)
    basis = formats.resolve_basis(H.space, args.basis or "minimal")
    N = min(2, H.max_dim) if args.trunc is None else args.trunc
    if N > H.max_dim:
        raise InputError(f"--trunc {N} exceeds the stored truncation {H.max_dim}")
    R = refine_to_basis(H, basis, N)
    problems = []
    ok, witness = check_hypercover(R, N)
    if not ok:
        return _hypercover_failure(report, R, witness)
    if R.check_refinement() is not None:
        problems.append("an open is not inside the open of its projection")
    if R.check_projection() is not None:
        problems.append("the projection does not commute with faces")
    if not R.opens_used() <= set(basis.members):
        problems.append("an assigned open is not a basis member")
    if problems:
        report.record("result", ok=False, witness={"problems": problems})
        for p in problems:
            report.say(f"FAIL: {p}")
        return EXIT_FAIL
    report.record("result", ok=True, levels=R.level_sizes(), nondegenerate=list(R.spine.counts))
    report.say(f"ok: refinement with level sizes {R.level_sizes()}"
               f" ({list(R.spine.counts)} nondegenerate)")
    _emit_hypercover(args, report, R)
    return EXIT_OK


def _load_presheaf_and_basis(args):
    space, raw_basis = formats.load_space(args.space)
    F = formats.load_presheaf(args.presheaf, space)
    if set(F.index) == set(space.opens):
        return space, F, None
    basis = _basis_for(space, raw_basis, args)
    if set(F.index) != set(basis.members):
        raise InputError("the presheaf is indexed neither by all opens nor by the basis")
    return space, F, basis


def _functoriality_failure(report: Report, F) -> int | None:
    bad = F.check_functorial()
    if bad is None:
        return None
    V, W, U = (F.space.show(m) for m in bad)
    report.record("result", ok=False, witness={"kind": "not functorial", "chain": [V, W, U]})
    report.say(f"FAIL: restrictions along {V} ⊆ {W} ⊆ {U} do not compose")
    return EXIT_FAIL


def cmd_check_sheaf(args, report: Report) -> int:
    space, F, basis = _load_presheaf_and_basis(args)
    bad = _functoriality_failure(report, F)
    if bad is not None:
        return bad
    ok, witness = check_sheaf(F) if basis is None else check_sheaf_on_basis(F, basis)
    where = "all opens" if basis is None else "the basis"
    report.record("result", ok=ok, index="opens" if basis is None else "basis", witness=witness)
    report.say(f"ok: sheaf on {where}" if ok else f"FAIL: {json.dumps(witness)}")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_check_hypersheaf(args, report: Report) -> int:
    space, F, basis = _load_presheaf_and_basis(args)
    bad = _functoriality_failure(report, F)
    if bad is not None:
        return bad
    N = 1 if args.trunc is None else args.trunc
    if basis is None:
        suite = hypercover_suite(Basis.all_opens(space), allow_empty=True, N=N)
    else:
        suite = hypercover_suite(basis, N=N)
    ok, witness = check_hypersheaf(F, suite)
    report.record("result", ok=ok, suite_size=len(suite), witness=witness)
    report.say(f"ok: hypersheaf against {len(suite)} hypercovers" if ok
               else f"FAIL: {json.dumps(witness)}")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_kan_extend(args, report: Report) -> int:
    space, F, basis = _load_presheaf_and_basis(args)
    bad = _functoriality_failure(report, F)
    if bad is not None:
        return bad
    ext = right_kan_extend(F, space)
    data = ext.presheaf.to_dict()
    sizes = {space.show(U): len(ext.presheaf.values[U]) for U in space.opens}
    report.record("result", ok=True, sizes=sizes)
    report.say("extension sizes: " + ", ".join(f"{k}:{v}" for k, v in sizes.items()))
    if args.output:
        formats.write_json(args.output, data)
        report.record("artifact", path=args.output)
        report.say(f"wrote {args.output}")
    else:
        report.record("artifact", presheaf=data)
        report.say(json.dumps(data, sort_keys=True))
    return EXIT_OK


def cmd_roundtrip(args, report: Report) -> int:
    space, raw_basis = formats.load_space(args.space)
    ok, witness = verify_topology(space)
    if not ok:
        raise InputError(f"not a topology: {describe_witness(space, witness)}")
    try:
        basis = _basis_for(space, raw_basis, args)
    except TopologyError as exc:
        raise InputError(str(exc)) from None
    supplied = [formats.load_presheaf(p, space) for p in args.presheaf or ()]
    for F in supplied:
        if set(F.index) != set(basis.members):
            raise InputError("supplied presheaves must be indexed by the basis")
    result = roundtrip_theorem_check(
        space,
        basis,
        cap=args.cap,
        samples=args.samples,
        seed=args.seed,
        condition=args.condition,
        supplied=supplied,
    )
    data = result.to_dict()
    failures = data.pop("failures")
    report.record("result", **data)
    for f in failures:
        report.record("failure", **f)
    report.say(
        f"basis presheaves: {result.basis_considered} considered, {result.basis_accepted} accepted,"
        f" {result.basis_rejected} rejected; {result.space_accepted} on all opens pass the {args.condition} condition"
    )
    for f in failures:
        report.say(f"FAIL {f['check']}: {json.dumps(f['witness'])}")
    report.say("ok: zero failures" if result.ok else f"{len(failures)} failure(s)")
    return EXIT_OK if result.ok else EXIT_FAIL


def cmd_coinitial(args, report: Report) -> int:
    f = formats.load_poset_map(args.map)
    result = check_coinitial(f, args.degree)
    data = result.to_dict()
    report.record("result", ok=result.aggregate == COINITIAL, **data)
    for b, v in result.verdicts.items():
        report.say(f"{b}: {v.status}")
    report.say(f"aggregate: {result.aggregate}")
    return EXIT_OK if result.aggregate == COINITIAL else EXIT_FAIL


def _builtin_complex(name: str, levels: int):
    kind, _, n = name.partition(":")
    try:
        n = int(n)
    except ValueError:
        raise InputError(f"bad complex {name!r}; use simplex:N, boundary:N or a file") from None
    top = max(levels, n)
    if kind == "simplex":
        return standard_simplex(n, top)
    if kind == "boundary":
        return boundary_simplex(n, top)
    raise InputError(f"bad complex {name!r}; use simplex:N, boundary:N or a file")


def cmd_sym_coinitial(args, report: Report) -> int:
    levels = 2 if args.trunc is None else args.trunc
    if ":" in args.complex and not args.complex.endswith(".json"):
        K = _builtin_complex(args.complex, levels)
    else:
        K = formats.load_simplicial_set(args.complex)
    if K.max_dim < levels:
        raise InputError(f"the complex is truncated at {K.max_dim}, below level {levels}")
    result = verify_sym_coinitiality_instance(K, levels, args.degree)
    entries = result.pop("entries")
    report.record("result", **result)
    for e in entries:
        report.record("verdict", **e)
    report.say(f"levels <= {levels}: " + ", ".join(f"{k} {v}" for k, v in result["counts"].items()))
    report.say("ok: no obstructed slice" if result["ok"] else "FAIL: obstructed slice found")
    for e in entries:
        if e["verdict"]["status"] == "obstructed":
            report.say(f"  {e['element']}: {json.dumps(e['verdict'])}")
    return EXIT_OK if result["ok"] else EXIT_FAIL


def cmd_counterexample(args, report: Report) -> int:
    if args.posets:
        I, J = formats.load_posets(args.posets)
        result = slice_counterexample(I, J, args.degree)
    else:
        result = slice_counterexample(homology_degree=args.degree)
    report.record("result", **result)
    first = result["first_half"]["aggregate"]
    second = result["second_half"]["aggregate"] if result["second_half"] else None
    report.say(f"I -> J: {first}")
    report.say(f"slices over {result['final_vertex']}: {second}")
    if result["second_half"]:
        empty = result["second_half"]["empty_slices"]
        if empty:
            report.say("empty comma poset over: " + ", ".join(empty))
    report.say("ok: both halves reproduced" if result["ok"] else "FAIL: halves not reproduced")
    return EXIT_OK if result["ok"] else EXIT_FAIL


COMMANDS: dict[str, Callable[[argparse.Namespace, Report], int]] = {
    "check-topology": cmd_check_topology,
    "minimal-basis": cmd_minimal_basis,
    "cech": cmd_cech,
    "check-hypercover": cmd_check_hypercover,
    "refine": cmd_refine,
    "check-sheaf": cmd_check_sheaf,
    "check-hypersheaf": cmd_check_hypersheaf,
    "kan-extend": cmd_kan_extend,
    "roundtrip": cmd_roundtrip,
    "coinitial": cmd_coinitial,
    "sym-coinitial": cmd_sym_coinitial,
    "counterexample": cmd_counterexample,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--trunc", type=int, default=None, help="truncation dimension N")
    common.add_argument("--cap", type=int, default=2, help="largest value-set size")
    common.add_argument("--samples", type=int, default=None,
                        help="number of sampled basis presheaves (default: exhaustive)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("text", "structured"), default="text")
    common.add_argument("--degree", type=int, default=3, help="highest homology degree checked")

    parser = argparse.ArgumentParser(
        prog="hyperdescent",
        description="Exact checks for hypercovers, basis refinements and (hyper)descent on finite spaces.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check-topology", parents=[common], help="validate a space file")
    p.add_argument("space")
    p.add_argument("--basis", help="minimal, all, or omit to use the file's basis")

    p = sub.add_parser("minimal-basis", parents=[common], help="print the minimal basis")
    p.add_argument("space")

    p = sub.add_parser("cech", parents=[common], help="build a Cech hypercover")
    p.add_argument("space")
    p.add_argument("--cover", nargs="+", required=True, help="opens as comma-separated points")
    p.add_argument("--target", help="open being covered (default: the whole space)")
    p.add_argument("-o", "--output")

    p = sub.add_parser("check-hypercover", parents=[common], help="check the covering condition")
    p.add_argument("hypercover")

    p = sub.add_parser("refine", parents=[common], help="refine a hypercover to a basis")
    p.add_argument("hypercover")
    p.add_argument("--basis", help="minimal (default) or all")
    p.add_argument("-o", "--output")

    for name, text in (
        ("check-sheaf", "check the sheaf condition"),
        ("check-hypersheaf", "check hyperdescent against the generated suite"),
        ("kan-extend", "right Kan extend a basis presheaf to all opens"),
    ):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("space")
        p.add_argument("presheaf")
        p.add_argument("--basis", help="minimal, all, or omit to use the file's basis")
        if name == "kan-extend":
            p.add_argument("-o", "--output")

    p = sub.add_parser("roundtrip", parents=[common], help="restriction/extension round trip")
    p.add_argument("space")
    p.add_argument("--basis", help="minimal, all, or omit to use the file's basis")
    p.add_argument("--condition", choices=("hypersheaf", "sheaf"), default="hypersheaf")
    p.add_argument("--presheaf", action="append",
                   help="basis presheaf claimed to satisfy the condition (repeatable)")

    p = sub.add_parser("coinitial", parents=[common], help="check a poset map for coinitiality")
    p.add_argument("map")

    p = sub.add_parser("sym-coinitial", parents=[common],
                       help="slice verdicts for the symmetrization of a simplicial set")
    p.add_argument("complex", help="simplex:N, boundary:N, or a simplicial-set JSON file")

    p = sub.add_parser("counterexample", parents=[common],
                       help="two glued triangles: coinitial map with non-coinitial slices")
    p.add_argument("--posets", help="JSON file with posets I and J replacing the defaults")
    return parser


def main(argv: list[str] | None = None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    config = RunConfig(args.command, args.trunc, args.cap, args.samples, args.seed,
                       args.format, args.degree)
    report = Report(config)
    for name, value in (("--trunc", args.trunc), ("--samples", args.samples)):
        if value is not None and value < 0:
            sys.stderr.write(f"error: {name} must be non-negative\n")
            return EXIT_INPUT
    if args.cap < 0:
        sys.stderr.write("error: --cap must be non-negative\n")
        return EXIT_INPUT
    try:
        code = COMMANDS[args.command](args, report)
    except (InputError, PresheafError, SimplicialError, TopologyError) as exc:
        report.record("error", ok=False, message=str(exc))
        report.say(f"error: {exc}")
        code = EXIT_INPUT
    report.emit(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
