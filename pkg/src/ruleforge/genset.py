"""Seeded generation of base groups, their perturbation variants, and dataset files."""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import inference, rewrite, text
from .inference import Question
from .logic import Atom, Fact, Implies, Not, Or, Rule, Theory, atoms_of
from .rewrite import Law

FORMAT_VERSION = 1

ADJECTIVES = (
    "green", "blue", "cold", "rough", "young", "nice", "big", "red", "furry",
    "kind", "quiet", "round", "smart", "white", "small", "tall", "bright",
    "calm", "clever", "quick", "slow", "happy", "sad", "brave", "shy",
    "loud", "soft", "hard", "warm", "wet", "dry", "heavy", "light", "old",
    "new", "clean", "dirty", "rich", "poor", "strong", "weak", "sharp",
    "dull", "fresh", "sweet", "sour", "bitter", "salty", "gentle", "proud",
    "wise", "silly", "lazy", "busy", "polite", "rude", "honest", "fierce",
    "noisy", "tidy", "messy", "sleepy", "hungry", "thirsty", "curious",
    "lucky", "plain", "fancy", "tiny", "huge", "yellow", "purple", "orange",
    "grey", "brown", "pink", "golden", "silver", "shiny", "fuzzy",
)

ENTITIES = (
    "Anne", "Bob", "Charlie", "Dave", "Erin", "Fiona", "Gary", "Harry",
    "Irene", "Jack", "Kate", "Liam", "Mona", "Nick", "Olga", "Paul",
    "Quinn", "Rosa", "Sam", "Tina", "Uma", "Victor", "Wendy", "Xavier",
    "Yara", "Zack",
)

VARIANT_KINDS = (
    "base",
    "variant1",
    "variant2",
    "variant3",
    "variant4-contrapositive",
    "variant4-double-negation",
    "variant4-implication",
    "variant4-de-morgan",
    "variant4-identity",
    "variant4-commutativity",
    "variant4-multi",
)
MERGE_VARIANT = "variant2-merge"

REUSE_POLICY = (
    "disjoint 6-word blocks of a seeded pool permutation while groups*6 <= pool size; "
    "otherwise each group draws 6 distinct words independently from its own seed"
)


class GenerationError(ValueError):
    pass


class VocabularyCollision(GenerationError):
    pass


@dataclass(frozen=True)
class GroupSpec:
    group_id: int
    entity: str
    vocabulary: tuple[str, ...]  # (a0a, a0b, a1, a2, a3, a4)
    seed: int | str = 0

    def __post_init__(self):
        if len(self.vocabulary) != 6:
            raise VocabularyCollision("a group needs exactly 6 attributes")
        if len(set(self.vocabulary)) != 6:
            raise VocabularyCollision(f"attributes collide: {self.vocabulary}")
        for word in self.vocabulary:
            if not text.valid_attribute(word):
                raise VocabularyCollision(f"{word!r} is not a usable attribute word")
        if not text._ENTITY.fullmatch(self.entity):
            raise VocabularyCollision(f"{self.entity!r} is not a usable entity name")

    @property
    def chain(self) -> tuple[str, ...]:
        return self.vocabulary[2:]


@dataclass(frozen=True)
class BaseGroup:
    spec: GroupSpec
    theory: Theory
    questions: tuple[Question, ...]


@dataclass(frozen=True)
class VariantInstance:
    group_id: int
    kind: str
    theory: Theory
    laws_applied: tuple[tuple[str, ...], ...]
    questions: tuple[Question, ...]
    description: str
    traces: tuple = field(default=(), compare=False)


def _implies(a: str, b: str) -> Implies:
    return Implies(Atom(a), Atom(b))


def _questions(theory: Theory, entity: str, attrs) -> tuple[Question, ...]:
    qs = [Question(entity, a) for a in attrs]
    return tuple(Question(entity, q.attribute, inference.answer(theory, q)) for q in qs)


def sample_base_group(spec: GroupSpec) -> BaseGroup:
    a0a, a0b, a1, a2, a3, a4 = spec.vocabulary
    e = spec.entity
    facts = (Fact(Or(Atom(a0a, e), Atom(a0b, e))),)
    rules = (
        Rule("r1", _implies(a0a, a1)),
        Rule("r2", _implies(a0b, a1)),
        Rule("r3", _implies(a1, a2)),
        Rule("r4", _implies(a2, a3)),
        Rule("r5", _implies(a3, a1)),  # redundant back-edge
        Rule("r6", _implies(a3, a4)),
    )
    theory = Theory(e, spec.vocabulary, facts, rules)
    return BaseGroup(spec, theory, _questions(theory, e, spec.chain))


BACK_EDGE = "r5"
ESSENTIAL_LINK = "r3"

_LAW_DESCRIPTIONS = {
    Law.CONTRAPOSITION: "every rule replaced by its contrapositive",
    Law.DOUBLE_NEGATION: "every rule antecedent wrapped in a double negation ('not not')",
    Law.IMPLICATION: "every rule rewritten from 'if P then Q' to 'not P or Q'",
    Law.DE_MORGAN: ("every rule rewritten to 'not P or Q' and then by De Morgan to "
                    "'it is not the case that P and not Q'"),
    Law.IDENTITY: "every rule antecedent duplicated by idempotence (P becomes 'P or P')",
    Law.COMMUTATIVITY: "operands of the disjunctive fact (and of any binary rule connective) swapped",
}


def _rewrite_all(theory: Theory, laws: tuple[Law, ...]):
    rules, applied, traces = [], [], []
    for rule in theory.rules:
        current, steps = rule, []
        for law in laws:
            if rewrite.applicable(law, current):
                current, step = rewrite.apply_law(current, law)
                steps.append(step)
        rules.append(current)
        applied.append(tuple(s.law.value for s in steps))
        traces.append(tuple(steps))
    return rules, tuple(applied), tuple(traces)


def _derive_seed(*parts) -> str:
    return ":".join(str(p) for p in parts)


def make_variant(group: BaseGroup, kind: str, rng=None) -> VariantInstance:
    """Derive one variant of a base group with oracle-recomputed gold labels.

    ``rng`` seeds variant4-multi; it defaults to the group spec seed.
    """
    spec, base = group.spec, group.theory
    a1, a4 = spec.vocabulary[2], spec.vocabulary[5]
    no_laws = tuple(() for _ in base.rules)
    traces: tuple = ()

    if kind == "base":
        theory, laws, desc = base, no_laws, "unmodified base example"
    elif kind == "variant1":
        theory = base.without_rule(BACK_EDGE)
        laws = tuple(() for _ in theory.rules)
        desc = (f"redundant rule removed: 'if someone is {spec.vocabulary[4]} then they are "
                f"{a1}' (derivability preserved)")
    elif kind == "variant2":
        theory = base.without_rule(ESSENTIAL_LINK)
        laws = tuple(() for _ in theory.rules)
        desc = (f"essential rule removed: 'if someone is {a1} then they are "
                f"{spec.vocabulary[3]}' (chain broken after {a1})")
    elif kind == "variant3":
        contra = Fact(Or(Not(Atom(a1, spec.entity)), Not(Atom(a4, spec.entity))))
        theory = base.with_facts(base.facts + (contra,))
        laws = no_laws
        desc = (f"contradictory fact added: '{spec.entity} is not {a1} or not {a4}' "
                f"(theory inconsistent; conservative answers withhold every conclusion)")
    elif kind == MERGE_VARIANT:
        a0a, a0b = spec.vocabulary[:2]
        merged = Rule("rA", Implies(Or(Atom(a0a), Atom(a0b)), Atom(a1)))
        kept = [r for r in base.rules if r.id in ("r3", "r4")]
        theory = base.with_rules([merged, *kept])
        laws = tuple(() for _ in theory.rules)
        desc = ("rules 1-2 merged into one equivalent disjunctive rule; the back-edge and "
                f"the rule deriving {a4} dropped")
    elif kind == "variant4-multi":
        seed = spec.seed if rng is None else rng
        rules, applied, trace_list = [], [], []
        for rule in base.rules:
            r = random.Random(_derive_seed(seed, spec.group_id, "multi", rule.id))
            new, steps = rewrite.stack_laws(rule, r.randint(2, 5), r)
            rules.append(new)
            applied.append(tuple(s.law.value for s in steps))
            trace_list.append(tuple(steps))
        theory, laws, traces = base.with_rules(rules), tuple(applied), tuple(trace_list)
        desc = "each rule rewritten by an independently sampled stack of 2-5 equivalence laws"
    elif kind.startswith("variant4-"):
        law = Law.from_name(kind[len("variant4-"):])
        sequence = (Law.IMPLICATION, Law.DE_MORGAN) if law is Law.DE_MORGAN else (law,)
        rules, laws, traces = _rewrite_all(base, sequence)
        theory = base.with_rules(rules)
        if law is Law.COMMUTATIVITY:
            theory = theory.with_facts(
                rewrite.commute_fact(f) if isinstance(f.body, Or) else f for f in theory.facts)
        desc = _LAW_DESCRIPTIONS[law]
    else:
        raise GenerationError(f"unknown variant kind {kind!r}")

    questions = _questions(theory, spec.entity, spec.chain)
    return VariantInstance(spec.group_id, kind, theory, laws, questions, desc, traces)


# -- dataset ---------------------------------------------------------------


def group_spec(group_id: int, seed: int, n_groups: int) -> GroupSpec:
    rng = random.Random(_derive_seed(seed, group_id))
    if n_groups * 6 <= len(ADJECTIVES):
        pool = random.Random(_derive_seed(seed, "pool")).sample(ADJECTIVES, len(ADJECTIVES))
        vocab = tuple(pool[6 * group_id: 6 * group_id + 6])
    else:
        vocab = tuple(rng.sample(ADJECTIVES, 6))
    entity = rng.choice(ENTITIES)
    return GroupSpec(group_id, entity, vocab, seed)


def split_groups(n_groups: int, train: int, seed: int) -> tuple[list[int], list[int]]:
    ids = list(range(n_groups))
    random.Random(_derive_seed(seed, "split")).shuffle(ids)
    return sorted(ids[:train]), sorted(ids[train:])


def instance_records(inst: VariantInstance, split: str) -> list[dict]:
    facts = [text.render_fact(f) for f in inst.theory.facts]
    rules = [text.render_rule(r) for r in inst.theory.rules]
    return [
        {
            "group_id": inst.group_id,
            "split": split,
            "variant": inst.kind,
            "facts": facts,
            "rules": rules,
            "laws_applied": [list(x) for x in inst.laws_applied],
            "question": text.render_question(q),
            "question_index": i,
            "label": q.label,
            "description": inst.description,
        }
        for i, q in enumerate(inst.questions)
    ]


def split_file(kind: str, split: str) -> str:
    if kind == "base":
        return f"base_{split}"
    return kind


@dataclass
class DatasetManifest:
    seed: int
    n_groups: int
    train_group_ids: list[int]
    test_group_ids: list[int]
    question_counts: dict[str, int]
    record_counts: dict[str, int]
    hashes: dict[str, str]
    vocabulary_pool_size: int = len(ADJECTIVES)
    vocabulary_reuse_policy: str = REUSE_POLICY
    format_version: int = FORMAT_VERSION

    @property
    def total_records(self) -> int:
        return sum(self.record_counts.values())

    def to_dict(self) -> dict:
        return {
            "format_version": self.format_version,
            "seed": self.seed,
            "n_groups": self.n_groups,
            "train_group_ids": self.train_group_ids,
            "test_group_ids": self.test_group_ids,
            "question_counts": self.question_counts,
            "record_counts": self.record_counts,
            "total_records": self.total_records,
            "hashes": self.hashes,
            "vocabulary_pool_size": self.vocabulary_pool_size,
            "vocabulary_reuse_policy": self.vocabulary_reuse_policy,
        }

    @classmethod
    def from_dict(cls, d: dict) -> DatasetManifest:
        return cls(d["seed"], d["n_groups"], d["train_group_ids"], d["test_group_ids"],
                   d["question_counts"], d["record_counts"], d["hashes"],
                   d["vocabulary_pool_size"], d["vocabulary_reuse_policy"],
                   d["format_version"])


def build_group(group_id: int, seed: int, n_groups: int,
                kinds=VARIANT_KINDS) -> list[VariantInstance]:
    group = sample_base_group(group_spec(group_id, seed, n_groups))
    return [make_variant(group, kind) for kind in kinds]


def generate_records(n_groups: int = 100, train: int = 80, seed: int = 0) -> tuple[dict, dict]:
    """All records keyed by file stem, plus the split assignment."""
    if not 0 <= train < n_groups:
        raise GenerationError(f"need 0 <= train < n_groups, got train={train}, n_groups={n_groups}")
    train_ids, test_ids = split_groups(n_groups, train, seed)
    train_set = set(train_ids)
    files: dict[str, list[dict]] = {"base_train": [], "base_test": []}
    files.update({k: [] for k in VARIANT_KINDS[1:]})
    for gid in range(n_groups):
        split = "train" if gid in train_set else "test"
        for inst in build_group(gid, seed, n_groups):
            files[split_file(inst.kind, split)].extend(instance_records(inst, split))
    return files, {"train": train_ids, "test": test_ids}


def _question_counts(files: dict) -> dict[str, int]:
    # Scored splits only: the base row is the test groups.
    return {("base" if n == "base_test" else n): len(r)
            for n, r in files.items() if n != "base_train"}


def _encode(records: list[dict]) -> bytes:
    return "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in records).encode("utf-8")


def generate_dataset(n_groups: int = 100, train: int = 80, seed: int = 0,
                     out_dir: Optional[str | Path] = None) -> DatasetManifest:
    files, splits = generate_records(n_groups, train, seed)
    payloads = {name: _encode(recs) for name, recs in files.items()}
    question_counts = _question_counts(files)
    manifest = DatasetManifest(
        seed=seed,
        n_groups=n_groups,
        train_group_ids=splits["train"],
        test_group_ids=splits["test"],
        question_counts=question_counts,
        record_counts={name: len(recs) for name, recs in files.items()},
        hashes={f"{name}.jsonl": hashlib.sha256(p).hexdigest() for name, p in payloads.items()},
    )
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for name, payload in payloads.items():
            (out / f"{name}.jsonl").write_bytes(payload)
        (out / "manifest.json").write_bytes(manifest_bytes(manifest))
    return manifest


def manifest_bytes(manifest: DatasetManifest) -> bytes:
    return (json.dumps(manifest.to_dict(), indent=2, sort_keys=True) + "\n").encode("utf-8")


# -- loading ---------------------------------------------------------------


@dataclass
class Dataset:
    root: Optional[Path]
    manifest: DatasetManifest
    files: dict[str, list[dict]]
    manifest_hash: str

    def records(self, name: str) -> list[dict]:
        return self.files.get(name, [])

    def scored_splits(self) -> dict[str, list[dict]]:
        """Table rows in order: the base test set, then every variant present."""
        rows = {"base": self.records("base_test")}
        for kind in VARIANT_KINDS[1:]:
            if self.files.get(kind):
                rows[kind] = self.files[kind]
        return rows

    def base_labels(self) -> dict[tuple[int, int], str]:
        return {(r["group_id"], r["question_index"]): r["label"]
                for name in ("base_train", "base_test") for r in self.records(name)}


def load_dataset(path: str | Path) -> Dataset:
    root = Path(path)
    raw = (root / "manifest.json").read_bytes()
    manifest = DatasetManifest.from_dict(json.loads(raw))
    files = {}
    for name in manifest.record_counts:
        payload = (root / f"{name}.jsonl").read_bytes()
        files[name] = [json.loads(line) for line in payload.decode("utf-8").splitlines() if line]
    return Dataset(root, manifest, files, hashlib.sha256(raw).hexdigest())


def dataset_from_records(files: dict, splits: dict, seed: int = 0) -> Dataset:
    """In-memory dataset, for scoring without touching disk."""
    payloads = {name: _encode(recs) for name, recs in files.items()}
    manifest = DatasetManifest(
        seed=seed,
        n_groups=len(splits["train"]) + len(splits["test"]),
        train_group_ids=splits["train"],
        test_group_ids=splits["test"],
        question_counts=_question_counts(files),
        record_counts={n: len(r) for n, r in files.items()},
        hashes={f"{n}.jsonl": hashlib.sha256(p).hexdigest() for n, p in payloads.items()},
    )
    return Dataset(None, manifest, files, hashlib.sha256(manifest_bytes(manifest)).hexdigest())


def record_theory(record: dict) -> tuple[Theory, Question]:
    """Rebuild the theory and question of a dataset record from its text alone."""
    facts = [text.parse_fact(s) for s in record["facts"]]
    rules = [text.parse_rule(s, f"r{i + 1}") for i, s in enumerate(record["rules"])]
    question = text.parse_question(record["question"])
    vocab: dict[str, None] = {}
    for f in (*(x.body for x in facts), *(r.body for r in rules)):
        vocab.update(dict.fromkeys(atoms_of(f)))
    vocab.setdefault(question.attribute)
    return Theory(question.subject, tuple(vocab), tuple(facts), tuple(rules)), question
