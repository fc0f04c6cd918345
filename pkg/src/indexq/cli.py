"""Command-line runner: ``indexq {decide,identify,sk,bv,labelings,report}``.

Human-readable output goes to stdout; ``--out PATH`` writes one JSON record per
line and ``--json`` prints the same records to stdout instead of the table.

Exit codes: 0 success, 1 usage or parse error, 2 promise violation,
3 mismatch against expected values.
"""
from __future__ import annotations

import argparse
import dataclasses
import itertools
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .algorithms import (
    bernstein_vazirani,
    bv_oracle,
    djh_decide,
    index_q_identify,
    shor_kitaev_distribution,
    shor_kitaev_samples,
    sk_success_probability,
)
from .errors import InvalidArgument, InvalidState, PromiseViolation, RefusedOperation
from .fixtures import KLEIN_FUNCTIONS, klein_function
from .groups import (
    format_generators,
    parse_generators,
    parse_group,
    quotient_type,
    subgroup_closure,
    whole_group,
)
from .labelings import behavioral_compatibility_scan, classify_all_labelings, euler_totient
from .oracles import HidingFunction, OracleHandle, OracleKind, make_hiding_function
from .report import build_report, format_probability, render_table
from .statesim import UnitaryChoice, uniform_first_column_unitaries

EXIT_OK, EXIT_USAGE, EXIT_PROMISE, EXIT_MISMATCH = 0, 1, 2, 3

@dataclass(frozen=True)
class RunConfig:
    command: str
    group: str | None = None
    subgroup: str | None = None
    function: str | None = None
    q: int | None = None
    labeling: str | None = None
    character: int = 1
    unitary: str = UnitaryChoice.GROUP_QFT.value
    seed: int = 0
    samples: int = 1
    exact: bool = False
    secret: str | None = None
    n: int | None = None
    exhaustive: bool = False
    out: str | None = None

    def canonical(self) -> str:
        """``key=value`` pairs in field order, unset optional fields omitted."""
        parts = []
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            if value is None:
                continue
            if isinstance(value, bool):
                value = "true" if value else "false"
            parts.append(f"{f.name}={value}")
        return " ".join(parts)

    @classmethod
    def from_canonical(cls, text: str) -> RunConfig:
        types = {f.name: f.type for f in dataclasses.fields(cls)}
        kwargs = {}
        for part in text.split(" "):
            key, _, raw = part.partition("=")
            if key not in types:
                raise InvalidArgument(f"unknown config key {key!r}")
            kind = types[key]
            if "bool" in kind:
                kwargs[key] = raw == "true"
            elif "int" in kind:
                kwargs[key] = int(raw)
            else:
                kwargs[key] = raw
        return cls(**kwargs)

    def inputs(self) -> dict:
        return {k: v for k, v in dataclasses.asdict(self).items() if v is not None and k != "out"}


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse would exit with 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="indexq", description="One-query hidden subgroup experiments.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", help="write newline-delimited JSON records here")
        p.add_argument("--json", action="store_true", help="print records instead of a table")

    def instance(p: argparse.ArgumentParser) -> None:
        p.add_argument("--group", help='e.g. "Z2xZ2" or "Z4 x Z3"')
        p.add_argument("--subgroup", default="", help='generators, e.g. "1,1;0,2"')
        p.add_argument("--function", choices=sorted(KLEIN_FUNCTIONS), help="named Klein-group function")
        p.add_argument("--q", type=int, help="alphabet size (default: the subgroup index)")
        p.add_argument("--labeling", help='coset-index -> label, e.g. "2,0,1"')
        p.add_argument("--character", type=int, default=1, help="exponent m of the alphabet character")

    p = sub.add_parser("decide", help="DJH constant-vs-balanced decision")
    instance(p)
    p.add_argument("--unitary", choices=[c.value for c in UnitaryChoice], default=UnitaryChoice.GROUP_QFT.value)
    common(p)

    p = sub.add_parser("identify", help="one-query index-q identification")
    instance(p)
    p.add_argument("--exact", action="store_true", help="report the exact distribution and its mode")
    common(p)

    p = sub.add_parser("sk", help="Shor-Kitaev sampling and kernel intersection")
    instance(p)
    p.add_argument("--samples", type=int, default=1)
    common(p)

    p = sub.add_parser("bv", help="Bernstein-Vazirani via the index-2 reduction")
    p.add_argument("--secret", help='bit string, e.g. "101"')
    p.add_argument("--n", type=int)
    p.add_argument("--exhaustive", action="store_true", help="sweep all 2^n secrets")
    common(p)

    p = sub.add_parser("labelings", help="affine vs non-affine Z_q labelings")
    p.add_argument("--q", type=int)
    p.add_argument("--group")
    p.add_argument("--subgroup", default="")
    p.add_argument("--character", type=int, default=1)
    common(p)

    p = sub.add_parser("report", help="reproduce the one-query comparison table")
    common(p)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    fields = {f.name for f in dataclasses.fields(RunConfig)}
    values = {k: v for k, v in vars(args).items() if k in fields and v is not None}
    if values.get("subgroup") == "":
        values.pop("subgroup")
    return RunConfig(**values)


# --- instance construction ------------------------------------------------


def _parse_ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.replace(" ", "").split(",") if x != "")
    except ValueError as exc:
        raise InvalidArgument(f"cannot parse integer list {text!r}") from exc


def hiding_function_from_config(cfg: RunConfig) -> HidingFunction:
    if cfg.function is not None:
        return klein_function(cfg.function)
    if cfg.group is None:
        raise InvalidArgument("give --group (with --subgroup) or --function")
    G = parse_group(cfg.group)
    H = subgroup_closure(G, parse_generators(cfg.subgroup or ""))
    labeling = _parse_ints(cfg.labeling) if cfg.labeling else tuple(range(H.index))
    q = cfg.q if cfg.q is not None else max(H.index, 2)
    return make_hiding_function(G, H, labeling, q)


# --- commands -------------------------------------------------------------


def _distribution(dist: dict) -> dict[str, str]:
    out = {}
    for label, p in dist.items():
        if p > 1e-12:
            key = "(" + ",".join(map(str, label)) + ")" if isinstance(label, tuple) else str(label)
            out[key] = format_probability(p)
    return out


def cmd_decide(cfg: RunConfig) -> tuple[list[dict], str]:
    fn = hiding_function_from_config(cfg)
    G = fn.group
    factors = G.orders if cfg.unitary == UnitaryChoice.GROUP_QFT.value else None
    V = uniform_first_column_unitaries(G.size, cfg.unitary, factors=factors, seed=cfg.seed)
    oracle = OracleHandle.for_function(fn, OracleKind.SHIFT)
    result = djh_decide(oracle, cfg.character, V)
    record = {
        "command": "decide",
        "inputs": cfg.inputs(),
        "function": fn.to_record(),
        "verdict": result.verdict.value,
        "queries": result.queries_used,
        "distribution": _distribution(result.final_distribution),
    }
    text = f"verdict: {result.verdict.value}  (P[start] = {format_probability(result.p_start)}, queries = {result.queries_used})"
    return [record], text


def cmd_identify(cfg: RunConfig) -> tuple[list[dict], str]:
    fn = hiding_function_from_config(cfg)
    G = fn.group
    oracle = OracleHandle.for_function(fn, OracleKind.PHASE)
    result = index_q_identify(oracle, G, cfg.character, seed=None if cfg.exact else cfg.seed)
    recovered = result.recovered_subgroup
    record = {
        "command": "identify",
        "inputs": cfg.inputs(),
        "function": fn.to_record(),
        "mode": "exact" if cfg.exact else "sample",
        "character": str(result.measured_character),
        "recovered_subgroup": format_generators(recovered.generators),
        "recovered_order": recovered.order,
        "correct": recovered == fn.subgroup,
        "success_certain": result.success_certain,
        "p_kernel_is_H": format_probability(result.probability_of(fn.subgroup)),
        "queries": result.queries_used,
        "distribution": _distribution(result.distribution),
    }
    gens = format_generators(recovered.generators) or "(identity)"
    text = (
        f"character {result.measured_character} -> H = <{gens}> (order {recovered.order})\n"
        f"certain: {result.success_certain}, correct: {record['correct']}, queries: {result.queries_used}"
    )
    return [record], text


def cmd_sk(cfg: RunConfig) -> tuple[list[dict], str]:
    fn = hiding_function_from_config(cfg)
    G, H = fn.group, fn.subgroup
    oracle = OracleHandle.for_function(fn, OracleKind.SHIFT)
    samples = shor_kitaev_samples(oracle, G, cfg.samples, cfg.seed)
    meet = whole_group(G)
    for s in samples:
        meet = meet & s.kernel
    exact = sk_success_probability(G, H)
    qt = quotient_type(G, H)
    dist = shor_kitaev_distribution(OracleHandle.for_function(fn, OracleKind.SHIFT), G)
    record = {
        "command": "sk",
        "inputs": cfg.inputs(),
        "function": fn.to_record(),
        "samples": [
            {"character": str(s.character), "kernel": format_generators(s.kernel.generators), "kernel_order": s.kernel.order}
            for s in samples
        ],
        "intersection": format_generators(meet.generators),
        "intersection_order": meet.order,
        "intersection_is_H": meet == H,
        "single_sample_success": str(exact),
        "quotient_factors": list(qt.cyclic_factors),
        "queries": oracle.queries,
        "distribution": _distribution(dist),
    }
    lines = [f"sample {i}: character {s.character}, |ker| = {s.kernel.order}" for i, s in enumerate(samples)]
    lines.append(f"intersection order {meet.order} (|H| = {H.order}), equals H: {meet == H}")
    lines.append(f"exact single-sample success probability: {exact}")
    if not qt.is_cyclic:
        note = f"G/H has invariant factors {list(qt.cyclic_factors)}: no character is faithful on it, so one sample never pins down H"
        record["note"] = note
        lines.append(note)
    elif H.index > 1:
        q = H.index
        lines.append(f"phi({q})/{q} = {Fraction(euler_totient(q), q)}")
    return [record], "\n".join(lines)


def cmd_bv(cfg: RunConfig) -> tuple[list[dict], str]:
    if cfg.secret is not None:
        if set(cfg.secret) - {"0", "1"} or not cfg.secret:
            raise InvalidArgument(f"secret must be a bit string, got {cfg.secret!r}")
        secrets = [tuple(int(c) for c in cfg.secret)]
    elif cfg.n is not None and cfg.exhaustive:
        secrets = list(itertools.product((0, 1), repeat=cfg.n))
    elif cfg.n is not None:
        import numpy as np

        rng = np.random.default_rng(cfg.seed)
        secrets = [tuple(int(b) for b in rng.integers(0, 2, size=cfg.n))]
    else:
        raise InvalidArgument("give --secret, or --n (optionally with --exhaustive)")
    records, failures = [], 0
    for s in secrets:
        oracle = bv_oracle(s)
        got = bernstein_vazirani(oracle, len(s))
        ok = got == s
        failures += not ok
        records.append({
            "command": "bv",
            "inputs": cfg.inputs(),
            "secret": "".join(map(str, s)),
            "recovered": "".join(map(str, got)),
            "match": ok,
            "queries": oracle.queries,
        })
    if len(records) == 1:
        text = f"recovered s = {records[0]['recovered']} (queries = {records[0]['queries']})"
    else:
        text = f"{len(records) - failures}/{len(records)} secrets recovered exactly, one query each"
    if failures:
        raise _Mismatch(records, text)
    return records, text


def cmd_labelings(cfg: RunConfig) -> tuple[list[dict], str]:
    records, lines = [], []
    if cfg.group is not None:
        G = parse_group(cfg.group)
        H = subgroup_closure(G, parse_generators(cfg.subgroup or ""))
        scan = behavioral_compatibility_scan(G, H, cfg.character)
        q = H.index
    elif cfg.q is not None:
        q, scan = cfg.q, None
    else:
        raise InvalidArgument("give --q, or --group/--subgroup for a behavioral scan")
    cls = classify_all_labelings(q)
    summary = {
        "command": "labelings",
        "inputs": cfg.inputs(),
        "q": q,
        "affine_count": cls.affine_count,
        "non_affine_count": cls.non_affine_count,
        "q_times_phi_q": q * euler_totient(q),
        "affine": [{"labeling": list(p), "alpha": w.alpha, "beta": w.beta} for p, w in cls.affine],
    }
    records.append(summary)
    lines.append(f"q = {q}: {cls.affine_count} affine, {cls.non_affine_count} non-affine (q*phi(q) = {q * euler_totient(q)})")
    if scan is not None:
        for r in scan:
            records.append({"command": "labelings", "scan": r.to_record()})
            tag = "affine" if r.affine else "non-affine"
            lines.append(f"  {r.labeling}  {tag:10s}  P[ker=H] = {r.success_probability:.12f}  deterministic = {r.deterministic}")
    return records, "\n".join(lines)


def cmd_report(cfg: RunConfig) -> tuple[list[dict], str]:
    rows = build_report()
    records = [dict(command="report", **row.to_record()) for row in rows]
    text = render_table(rows)
    if not all(row.matches for row in rows):
        raise _Mismatch(records, text)
    return records, text


class _Mismatch(Exception):
    def __init__(self, records: list[dict], text: str) -> None:
        super().__init__(text)
        self.records, self.text = records, text


HANDLERS = {
    "decide": cmd_decide,
    "identify": cmd_identify,
    "sk": cmd_sk,
    "bv": cmd_bv,
    "labelings": cmd_labelings,
    "report": cmd_report,
}


def _emit(records: list[dict], text: str, cfg: RunConfig, as_json: bool) -> None:
    lines = [json.dumps(r, ensure_ascii=False, sort_keys=False) for r in records]
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
    print("\n".join(lines) if as_json else text)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help or a usage error
        return int(exc.code or 0)
    try:
        cfg = config_from_args(args)
        records, text = HANDLERS[cfg.command](cfg)
    except _Mismatch as exc:
        _emit(exc.records, exc.text, cfg, args.json)
        print("mismatch against expected values", file=sys.stderr)
        return EXIT_MISMATCH
    except PromiseViolation as exc:
        print(f"promise violation: {exc}", file=sys.stderr)
        return EXIT_PROMISE
    except (InvalidArgument, InvalidState, RefusedOperation, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _emit(records, text, cfg, args.json)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
