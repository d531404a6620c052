"""Monte Carlo corpus synthesis from a fingerprint database.

Signatures are population descriptions, not points: a rule like gcd=<6
covers six concrete values.  Training corpora are drawn by sampling each
constraint uniformly (literal values as-is, alternatives uniformly,
comparisons uniformly over the satisfying integer interval), so every
sample matches its source signature perfectly by construction.

Sample counts follow a prevalence table, apportioned by largest remainder
after reserving one sample per signature with positive weight.  Each
signature samples from its own (seed, index) substream, so the corpus is
reproducible and independent of evaluation order.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import floor

import numpy as np

from .encoding import TOTAL_NEURONS, encode_observation
from .signatures import (
    And,
    AnyValue,
    Atom,
    Cmp,
    Const,
    Observation,
    OneOf,
    Signature,
)

# OS families the pipeline is trained to tell apart, in output order.
RELEVANT_FAMILIES = ("Windows", "Linux", "Solaris", "OpenBSD", "FreeBSD", "NetBSD")

# Upper bounds for open comparisons; hex integers in first-gen data are
# 16-bit window-ish quantities except the sequence statistics.
_DOMAIN_CAP = {"gcd": 0xFFFFFF, "SI": 0xFFFFFF, "VAL": 0xFFFFFF, "TOS": 0xFF}
_DEFAULT_CAP = 0xFFFF


class GenerationError(ValueError):
    pass


def signature_family(sig: Signature) -> str | None:
    """First class family that names a supported OS family, else None."""
    for _, family, _, _ in sig.classes:
        if family in RELEVANT_FAMILIES:
            return family
    return None


def signature_line(sig: Signature) -> str | None:
    """Version line of the class that carries the supported family."""
    for _, family, line, _ in sig.classes:
        if family in RELEVANT_FAMILIES:
            return line
    return None


def is_relevant(sig: Signature) -> bool:
    return signature_family(sig) is not None


@dataclass(frozen=True)
class PrevalenceTable:
    """Sampling weights keyed by signature name or family name."""

    weights: dict[str, float]

    @classmethod
    def parse(cls, text: str) -> "PrevalenceTable":
        """One entry per line: <weight> <name>. '#' comments allowed."""
        weights = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            head, _, name = line.partition(" ")
            try:
                w = float(head)
            except ValueError:
                raise GenerationError(f"prevalence line {lineno}: bad weight {head!r}") from None
            if w < 0 or not name.strip():
                raise GenerationError(f"prevalence line {lineno}: need non-negative weight and name")
            weights[name.strip()] = w
        return cls(weights)


def resolve_weights(db: list[Signature], prev: PrevalenceTable | None) -> list[float]:
    """Per-signature weights, normalized to sum 1.

    Signature-name keys override; a family key spreads its mass equally over
    the family's signatures; everything else keeps the uniform default.
    """
    if not db:
        return []
    uniform = 1.0 / len(db)
    weights = [uniform] * len(db)
    if prev is not None:
        family_sizes: dict[str, int] = {}
        for sig in db:
            fam = signature_family(sig)
            if fam is not None:
                family_sizes[fam] = family_sizes.get(fam, 0) + 1
        for i, sig in enumerate(db):
            fam = signature_family(sig)
            if sig.name in prev.weights:
                weights[i] = prev.weights[sig.name]
            elif fam is not None and fam in prev.weights:
                weights[i] = prev.weights[fam] / family_sizes[fam]
    mass = sum(weights)
    if mass <= 0:
        raise GenerationError("all signature weights are zero")
    return [w / mass for w in weights]


def signature_counts(weights: list[float], total: int) -> list[int]:
    """Largest-remainder apportionment with one sample reserved per
    positive-weight signature, so coverage is guaranteed."""
    positive = [i for i, w in enumerate(weights) if w > 0]
    if total < len(positive):
        raise GenerationError(f"total {total} below positive-weight signature count {len(positive)}")
    mass = sum(weights[i] for i in positive)
    rest = total - len(positive)
    counts = [0] * len(weights)
    quotas = {i: weights[i] / mass * rest for i in positive}
    for i in positive:
        counts[i] = 1 + floor(quotas[i])
    assigned = sum(counts)
    order = sorted(positive, key=lambda i: (-(quotas[i] - floor(quotas[i])), i))
    for i in order[: total - assigned]:
        counts[i] += 1
    return counts


def _interval(field: str, atoms: tuple[Cmp, ...]) -> tuple[int, int]:
    lo, hi = 0, _DOMAIN_CAP.get(field, _DEFAULT_CAP)
    for cmp_ in atoms:
        if cmp_.op == "<":
            hi = min(hi, cmp_.bound - 1)
        else:
            lo = max(lo, cmp_.bound + 1)
    return lo, hi


def _sample_atom(atom: Atom, field: str, rng, context: str) -> str:
    if isinstance(atom, Const):
        return atom.value
    atoms = atom.terms if isinstance(atom, And) else (atom,)
    lo, hi = _interval(field, atoms)
    if lo > hi:
        raise GenerationError(f"{context}.{field}: unsatisfiable interval")
    value = int(rng.integers(lo, hi + 1))
    return f"{value:X}"


def sample_observation(sig: Signature, rng) -> Observation:
    """Draw one concrete observation satisfying every rule of sig."""
    tests: dict[str, dict[str, str]] = {}
    for tid, rules in sig.tests.items():
        fields: dict[str, str] = {}
        for rule in rules:
            c = rule.constraint
            if isinstance(c, AnyValue):
                continue
            if isinstance(c, OneOf):
                c = c.choices[int(rng.integers(len(c.choices)))]
            fields[rule.field] = _sample_atom(c, rule.field, rng, f"{sig.name}: {tid}")
        # a silent probe carries nothing but the fact that it stayed silent
        if fields.get("Resp") == "N":
            fields = {"Resp": "N"}
        tests[tid] = fields
    return Observation(None, tests)


@dataclass(frozen=True)
class SampleLabel:
    signature: str
    relevant: bool
    family: str | None
    line: str | None


@dataclass
class Dataset:
    """Encoded samples plus per-sample provenance labels.

    output_labels decodes target columns: ("relevant",) for the relevance
    stage, the six family names for the family stage, version lines for a
    version stage.
    """

    stage: str
    inputs: np.ndarray
    targets: np.ndarray
    labels: list[SampleLabel]
    output_labels: tuple[str, ...]
    seed: int


def _stage_slice(db: list[Signature], stage: str) -> tuple[list[Signature], tuple[str, ...]]:
    if stage == "relevance":
        return list(db), ("relevant",)
    if stage == "family":
        slice_ = [s for s in db if is_relevant(s)]
        return slice_, RELEVANT_FAMILIES
    if stage.startswith("version:"):
        family = stage.split(":", 1)[1]
        if family not in RELEVANT_FAMILIES:
            raise GenerationError(f"unknown family {family!r}")
        slice_ = [s for s in db if signature_family(s) == family]
        lines = tuple(sorted({signature_line(s) for s in slice_}))
        return slice_, lines
    raise GenerationError(f"unknown stage {stage!r}")


def _target_row(sig: Signature, stage: str, output_labels: tuple[str, ...]) -> np.ndarray:
    row = np.full(len(output_labels), -1.0)
    if stage == "relevance":
        row[0] = 1.0 if is_relevant(sig) else -1.0
    elif stage == "family":
        row[output_labels.index(signature_family(sig))] = 1.0
    else:
        row[output_labels.index(signature_line(sig))] = 1.0
    return row


def generate_dataset(
    db: list[Signature],
    prev: PrevalenceTable | None,
    total: int,
    stage: str = "relevance",
    seed: int = 0,
) -> Dataset:
    """Synthesize an encoded, labeled corpus for one pipeline stage."""
    slice_, output_labels = _stage_slice(db, stage)
    if not slice_:
        raise GenerationError(f"stage {stage!r} has no signatures to sample")
    weights = resolve_weights(slice_, prev)
    counts = signature_counts(weights, total)
    inputs = np.zeros((total, TOTAL_NEURONS))
    targets = np.zeros((total, len(output_labels)))
    labels: list[SampleLabel] = []
    row = 0
    for i, sig in enumerate(slice_):
        if counts[i] == 0:
            continue
        rng = np.random.default_rng((seed, i))
        target = _target_row(sig, stage, output_labels)
        label = SampleLabel(sig.name, is_relevant(sig), signature_family(sig), signature_line(sig))
        for _ in range(counts[i]):
            inputs[row] = encode_observation(sample_observation(sig, rng))
            targets[row] = target
            labels.append(label)
            row += 1
    return Dataset(stage, inputs, targets, labels, output_labels, seed)
