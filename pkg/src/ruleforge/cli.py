"""ruleforge command line: generate, solve, transform, evaluate, report.

Exit codes: 0 ok, 2 I/O error, 3 invalid configuration, 4 parse error,
5 law not applicable, 6 scoring error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import evalkit, genset, inference, rewrite, text
from .logic import Not, Theory, atoms_of, equivalent, fact_literals

EXIT_OK, EXIT_IO, EXIT_CONFIG, EXIT_PARSE, EXIT_NOT_APPLICABLE, EXIT_SCORING = 0, 2, 3, 4, 5, 6
ENV_OUT = "RULEFORGE_OUT"
DEFAULT_OUT = "ruleforge-out"

log = logging.getLogger("ruleforge")


class ConfigError(ValueError):
    pass


def _out_dir(args) -> Path:
    return Path(args.out or os.environ.get(ENV_OUT) or DEFAULT_OUT)


def _echo_config(args) -> None:
    if args.verbose >= 1:
        for key, value in sorted(vars(args).items()):
            if key != "func":
                print(f"# {key} = {value}", file=sys.stderr)


def cmd_generate(args) -> int:
    if args.seed is None:
        raise ConfigError("--seed is required for generate")
    if args.groups < 1 or not 0 <= args.train < args.groups:
        raise ConfigError(f"need 0 <= --train < --groups (got {args.train}, {args.groups})")
    out = _out_dir(args)
    existing = out / "manifest.json"
    if existing.exists() and not args.overwrite:
        fresh = genset.generate_dataset(args.groups, args.train, args.seed)
        if existing.read_bytes() != genset.manifest_bytes(fresh):
            raise ConfigError(f"{out} holds a different dataset; pass --overwrite or choose another --out")
        print(f"{out} already holds this dataset ({fresh.total_records} records, "
              "hashes match); nothing written")
        manifest = fresh
    else:
        manifest = genset.generate_dataset(args.groups, args.train, args.seed, out)
        print(f"wrote {manifest.total_records} question records to {out}")
    for name, count in manifest.question_counts.items():
        print(f"  {name:<26} {count:>5}")
    return EXIT_OK


def _load_instance(path: str):
    facts, rules, questions = [], [], []
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    for lineno, line in enumerate(lines, 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            kind = text.classify(line)
            if kind == "question":
                questions.append(text.parse_question(line))
            elif kind == "rule":
                rules.append(text.parse_rule(line, f"r{len(rules) + 1}"))
            else:
                facts.append(text.parse_fact(line))
        except text.ParseError as exc:
            raise text.ParseError(f"line {lineno}: {exc.args[0]}", exc.text, exc.position) from None
    if questions:
        entity = questions[0].subject
    elif facts:
        entity = _fact_entity(facts[0])
    else:
        raise ConfigError(f"{path} has neither facts nor questions")
    vocab: dict[str, None] = {}
    for body in (*(f.body for f in facts), *(r.body for r in rules)):
        vocab.update(dict.fromkeys(atoms_of(body)))
    for q in questions:
        vocab.setdefault(q.attribute)
    if not questions:
        questions = [inference.Question(entity, a) for a in vocab]
    return Theory(entity, tuple(vocab), tuple(facts), tuple(rules)), questions


def _fact_entity(fact) -> str:
    lit = fact_literals(fact.body)[0]
    return (lit.operand if isinstance(lit, Not) else lit).entity


def cmd_solve(args) -> int:
    theory, questions = _load_instance(args.instance)
    consistent = inference.is_consistent(theory)
    if not consistent:
        print("INCONSISTENT: the facts and rules derive a contradiction; "
              "all conclusions withheld")
    try:
        chain = inference.forward_chain(theory)
    except inference.UnsupportedRuleForm as exc:
        chain = None
        print(f"(no derivation trace: {exc})")
    if chain is not None:
        for i, branch in enumerate(chain.branches, 1):
            case = ", ".join(f"{'' if p else 'not '}{n}" for n, p in branch.assumptions) or "-"
            status = "closed" if branch.closed else "open"
            print(f"case {i} [{case}] ({status})")
            for step in branch.steps:
                print(f"  {step}")
    for i, q in enumerate(questions, 1):
        status = inference.entails(theory, q.attribute)
        label = inference.to_label(inference.answer(theory, q))
        print(f"Q{i}: {text.render_question(q)}  {status.value}  [Answer: {label}]")
    return EXIT_OK


def cmd_transform(args) -> int:
    rule = text.parse_rule(args.rule, "r1")
    if args.stack is not None:
        new, trace = rewrite.stack_laws(rule, args.stack, args.seed if args.seed is not None else 0)
    else:
        if args.law is None:
            raise ConfigError("transform needs --law or --stack")
        new, step = rewrite.apply_law(rule, rewrite.Law.from_name(args.law))
        trace = [step]
    print(text.render_rule(new))
    print(f"equivalent: {str(equivalent(rule.body, new.body)).lower()}")
    for step in trace:
        print(f"  {step}")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    sources = [s for s in (args.baseline, args.predictions, args.endpoint) if s]
    if len(sources) != 1:
        raise ConfigError("give exactly one of --baseline, --predictions, --endpoint")
    try:
        dataset = genset.load_dataset(args.dataset)
    except (OSError, ValueError, KeyError) as exc:
        raise evalkit.ScoringError(f"cannot load dataset {args.dataset}: {exc}") from None
    if args.baseline:
        predictor = args.baseline
        try:
            preds = evalkit.run_baseline(dataset, args.baseline, args.seed)
        except evalkit.UnknownBaselineError as exc:
            raise ConfigError(str(exc)) from None
    elif args.predictions:
        predictor = Path(args.predictions).stem
        try:
            preds = evalkit.read_predictions(args.predictions)
        except OSError as exc:
            raise evalkit.ScoringError(f"cannot read predictions: {exc}") from None
    else:
        predictor = args.endpoint
        preds, failures = evalkit.fetch_remote_predictions(
            dataset, args.endpoint, timeout=args.timeout, max_workers=args.max_workers,
            strict=not args.permissive)
        if failures:
            print(failures.summary(), file=sys.stderr)
    report = evalkit.score(dataset, preds, predictor, permissive=args.permissive)
    print(evalkit.render_report(report))
    dest = Path(args.report) if args.report else _out_dir(args) / f"report-{_slug(predictor)}.json"
    dest.parent.mkdir(parents=True, exist_ok=True)
    evalkit.write_report(report, dest)
    print(f"report written to {dest}")
    return EXIT_OK


def _slug(name: str) -> str:
    return "".join(c if c.isalnum() or c in "-_" else "_" for c in name)[:60]


def cmd_report(args) -> int:
    try:
        report = evalkit.read_report(args.report)
    except (ValueError, KeyError) as exc:
        raise evalkit.ScoringError(f"cannot read report {args.report}: {exc}") from None
    print(evalkit.render_report(report))
    if args.json:
        print(json.dumps(report.to_dict(), indent=2))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ruleforge", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="generate a dataset")
    g.add_argument("--groups", type=int, default=100)
    g.add_argument("--train", type=int, default=80)
    g.add_argument("--seed", type=int)
    g.add_argument("--out", help=f"output directory (default ${ENV_OUT} or {DEFAULT_OUT})")
    g.add_argument("--overwrite", action="store_true")
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("solve", help="oracle answers and derivation for an instance file")
    s.add_argument("instance", help="text file: one fact, rule or question per line")
    s.set_defaults(func=cmd_solve)

    t = sub.add_parser("transform", help="rewrite one rule by an equivalence law")
    t.add_argument("rule", help='rule text, e.g. "If someone is green then they are cold."')
    t.add_argument("--law", help=", ".join(l.value for l in rewrite.Law))
    t.add_argument("--stack", type=int, help="apply a random stack of this many laws (2-5)")
    t.add_argument("--seed", type=int)
    t.set_defaults(func=cmd_transform)

    e = sub.add_parser("evaluate", help="score predictions or a baseline")
    e.add_argument("--dataset", required=True)
    e.add_argument("--baseline", help=", ".join(evalkit.BASELINES))
    e.add_argument("--predictions", help="JSON-lines prediction file")
    e.add_argument("--endpoint", help="HTTP endpoint answering {id, prompt} with {id, label}")
    e.add_argument("--seed", type=int, help="seed for the random baseline")
    e.add_argument("--timeout", type=float, default=30.0)
    e.add_argument("--max-workers", type=int, default=8)
    e.add_argument("--permissive", action="store_true",
                   help="score unanswered questions as wrong instead of failing")
    e.add_argument("--report", help="where to write the JSON report")
    e.add_argument("--out")
    e.set_defaults(func=cmd_evaluate)

    r = sub.add_parser("report", help="re-render a stored report")
    r.add_argument("report")
    r.add_argument("--json", action="store_true")
    r.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    logging.basicConfig(level=logging.DEBUG if args.verbose >= 2 else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    _echo_config(args)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except text.ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (rewrite.NotApplicableError, rewrite.StackingError) as exc:
        print(f"not applicable: {exc}", file=sys.stderr)
        return EXIT_NOT_APPLICABLE
    except evalkit.ScoringError as exc:
        print(f"scoring error: {exc}", file=sys.stderr)
        return EXIT_SCORING
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
