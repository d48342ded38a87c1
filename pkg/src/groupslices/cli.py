"""Command-line front end.

Exit status: 0 when every check passes, 1 on a failed property, 2 on bad usage.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from typing import Sequence

from .errors import SliceError, UsageError
from .rootsys import RootSystemData, SimpleType, build_root_system, weyl_from_word

COMMANDS = ("analyze", "factorize", "verify-subregular", "probe-quotient", "selftest")
DEFAULT_SAMPLES = {"factorize": 5, "probe-quotient": 50}


@dataclass
class RunConfig:
    command: str
    type: SimpleType | None = None
    word: str | None = None
    seed: int = 0
    samples: int | None = None
    bound: int = 3
    format: str = "json"
    out: str | None = None
    max_rank: int = 4


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="groupslices", description="Transversal slices attached to Weyl group elements.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--type", dest="family", help="Dynkin family letter, e.g. A")
    p.add_argument("--rank", type=int)
    p.add_argument("--word", help="comma-separated 1-based root indices, 'subregular' or 'identity'")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int)
    p.add_argument("--bound", type=int, default=3, help="size of sampled rational parameters")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--max-rank", type=int, default=4)
    return p


def parse_config(argv: Sequence[str]) -> RunConfig:
    parser = _parser()

    def error(message):
        raise UsageError(message)

    parser.error = error  # type: ignore[method-assign]
    ns = parser.parse_args(list(argv))
    t = None
    if ns.command == "probe-quotient" and ns.family is None and ns.rank is not None:
        ns.family = "A"
    if ns.family is not None or ns.rank is not None:
        if ns.family is None or ns.rank is None:
            raise UsageError("--type and --rank go together")
        try:
            t = SimpleType(ns.family.upper(), ns.rank)
        except SliceError as exc:
            raise UsageError(str(exc)) from None
    cfg = RunConfig(ns.command, t, ns.word, ns.seed, ns.samples, ns.bound, ns.format, ns.out, ns.max_rank)
    if cfg.command in ("analyze", "factorize", "verify-subregular") and t is None:
        raise UsageError(f"{cfg.command} needs --type and --rank")
    if cfg.command in ("analyze", "factorize") and cfg.word is None:
        raise UsageError(f"{cfg.command} needs --word")
    if cfg.command == "probe-quotient":
        if t is None:
            raise UsageError("probe-quotient needs --rank (type A)")
        if t.family != "A" or t.rank < 2:
            raise UsageError("probe-quotient supports type A with rank >= 2 only")
    if cfg.samples is not None and cfg.samples < 0:
        raise UsageError("--samples must be non-negative")
    if cfg.bound < 1:
        raise UsageError("--bound must be positive")
    return cfg


def parse_word(rs: RootSystemData, text: str) -> list[tuple[int, ...]]:
    if text.strip().lower() == "subregular":
        from .subregular import subregular_data

        return list(subregular_data(rs.type).s_e_word)
    if text.strip().lower() in ("", "identity"):
        return []
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok.isdigit() or not 1 <= int(tok) <= len(rs.roots):
            raise UsageError(f"bad root index {tok!r}; expected 1..{len(rs.roots)}")
        out.append(rs.roots[int(tok) - 1])
    return out


def _plan_for(cfg: RunConfig):
    from .spectral import build_plan
    from .subregular import subregular_plan

    rs = build_root_system(cfg.type)
    if cfg.word.strip().lower() == "subregular":
        return subregular_plan(cfg.type, cfg.seed)
    word = parse_word(rs, cfg.word)
    return build_plan(rs, weyl_from_word(rs, word), seed=cfg.seed)


def _analyze(cfg: RunConfig) -> tuple[dict, bool]:
    from .selftest import plan_violations

    plan = _plan_for(cfg)
    doc = plan.to_json()
    bad = plan_violations(plan)
    doc["violations"] = bad
    return doc, not bad


def _factorize(cfg: RunConfig) -> tuple[dict, bool]:
    from .chevalley import chevalley_for
    from .crosssection import factorize, forward, sample_nilradical, sample_slice_point

    plan = _plan_for(cfg)
    chev = chevalley_for(plan.rs)
    n_samples = cfg.samples if cfg.samples is not None else DEFAULT_SAMPLES["factorize"]
    rows = []
    ok = True
    for i in range(n_samples):
        seed = cfg.seed + i
        p = sample_slice_point(plan, seed, cfg.bound)
        n = sample_nilradical(plan, seed + 10007, cfg.bound)
        row = {"sample": i, "seed": seed}
        try:
            res = factorize(forward(n, p), plan, chev)
            row["result"] = res.to_json()
            row["recovered"] = res.n == n and res.n_s == p.n_s and res.z == p.z
        except SliceError as exc:
            row["error"] = f"{type(exc).__name__}: {exc}"
            row["recovered"] = False
        if not row["recovered"]:
            row["reproduce"] = {"type": str(cfg.type), "word": cfg.word, "seed": seed}
        ok = ok and row["recovered"]
        rows.append(row)
    return {"type": str(cfg.type), "word": cfg.word, "l": plan.dims["l"], "samples": rows}, ok


def _verify(cfg: RunConfig) -> tuple[dict, bool]:
    from .subregular import verify_subregular

    rep = verify_subregular(cfg.type, cfg.seed, strict=False)
    return rep, rep["pass"]


def _probe(cfg: RunConfig) -> tuple[dict, bool]:
    from .quotient import fiber_rank_scan

    rank = cfg.type.rank
    n = cfg.samples if cfg.samples is not None else DEFAULT_SAMPLES["probe-quotient"]
    rep = fiber_rank_scan(rank, cfg.seed, n, cfg.bound)
    ok = all(int(k) <= rank for k in rep["rank_histogram"])
    return rep, ok


def _selftest(cfg: RunConfig) -> tuple[dict, bool]:
    from .selftest import run_selftest

    rep = run_selftest(cfg.max_rank, cfg.seed)
    return rep, rep["pass"]


def _text(doc, indent: int = 0) -> str:
    pad = "  " * indent
    lines = []
    if isinstance(doc, dict):
        for k, v in doc.items():
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.append(_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {json.dumps(v)}")
    elif isinstance(doc, list):
        for v in doc:
            if isinstance(v, (dict, list)):
                lines.append(f"{pad}-")
                lines.append(_text(v, indent + 1))
            else:
                lines.append(f"{pad}- {json.dumps(v)}")
    else:
        lines.append(pad + json.dumps(doc))
    return "\n".join(lines)


def render(doc: dict, fmt: str) -> str:
    if fmt == "text":
        return _text(doc) + "\n"
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def run(cfg: RunConfig) -> tuple[int, dict]:
    handler = {
        "analyze": _analyze,
        "factorize": _factorize,
        "verify-subregular": _verify,
        "probe-quotient": _probe,
        "selftest": _selftest,
    }[cfg.command]
    try:
        doc, ok = handler(cfg)
    except UsageError:
        raise
    except SliceError as exc:
        doc = {"error": f"{type(exc).__name__}: {exc}",
               "reproduce": {"type": str(cfg.type), "word": cfg.word, "seed": cfg.seed}}
        ok = False
    return (0 if ok else 1), doc


def main(argv: Sequence[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_config(argv)
        code, doc = run(cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    text = render(doc, cfg.format)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
