"""Decision cascade: relevance, then OS family, then version analysis.

One network answers "is this host one of the families we care about";
one picks the family; per-family networks pick the version group.  Each
stage owns its reduction pipeline, fit on that stage's training slice.
Windows version analysis is delegated to the DCE-RPC endpoint classifier
when a dump is available, since the TCP/IP probes barely separate
Windows versions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .datagen import (
    RELEVANT_FAMILIES,
    Dataset,
    SampleLabel,
    generate_dataset,
    signature_family,
    signature_line,
)
from .dcerpc import WindowsRefiner, WindowsVerdict
from .encoding import EndpointMap, encode_observation
from .neural import Mlp, TrainConfig, forward, forward_batch, init_mlp, train, train_subsets
from .preprocess import ReductionPipeline, fit_pipeline
from .signatures import Observation, Signature

__all__ = [
    "ClassificationResult",
    "EvaluationReport",
    "HierarchyConfig",
    "HierarchyError",
    "HierarchyModel",
    "Stage",
    "classify",
    "classify_vector",
    "evaluate",
    "report_classification",
    "train_hierarchy",
]

# hidden-layer sizes that worked for the reference corpus; anything
# absent falls back to DEFAULT_HIDDEN
STAGE_HIDDEN = {"relevance": 20, "family": 20, "Linux": 18, "Solaris": 7, "OpenBSD": 4}
DEFAULT_HIDDEN = 8


class HierarchyError(Exception):
    pass


@dataclass
class Stage:
    """One trained decision: a reduction pipeline, a net, output labels."""

    pipeline: ReductionPipeline
    net: Mlp
    labels: tuple[str, ...]

    def scores(self, vec: np.ndarray) -> np.ndarray:
        return forward(self.net, self.pipeline.apply(vec))

    def scores_batch(self, X: np.ndarray) -> np.ndarray:
        return forward_batch(self.net, self.pipeline.apply(X))


@dataclass
class HierarchyModel:
    relevance: Stage
    family: Stage
    versions: dict[str, Stage]
    relevance_threshold: float = 0.0
    decision_threshold: float = 0.5
    windows: WindowsRefiner | None = None

    @property
    def family_labels(self) -> tuple[str, ...]:
        return self.family.labels


@dataclass(frozen=True)
class HierarchyConfig:
    seed: int = 0
    samples: int = 3000
    generations: int = 300
    target_error: float = 0.02
    lam: float = 0.01
    momentum: float = 0.8
    adaptive: bool = True
    variance: float = 0.98
    relevance_threshold: float = 0.0
    decision_threshold: float = 0.5
    subset_size: int | None = None
    hidden: dict = field(default_factory=dict)
    # train a DCE-RPC refiner on the synthetic dump corpus and attach it
    windows: bool = False


@dataclass
class ClassificationResult:
    relevance: float
    family_scores: dict[str, float] | None
    version_scores: dict[str, float] | None
    verdict: tuple[str, str | None] | str
    stage_trace: tuple[str, ...]
    windows: WindowsVerdict | None = None

    def os_name(self) -> str | None:
        if isinstance(self.verdict, str):
            return None
        if self.windows is not None:
            return self.windows.os_name()
        family, line = self.verdict
        return family if line is None else f"{family} {line}"


def _stage_seed(base: int, index: int) -> int:
    return base * 1000 + index


def _train_stage(
    name: str,
    inputs: np.ndarray,
    targets: np.ndarray,
    labels: tuple[str, ...],
    cfg: HierarchyConfig,
    index: int,
) -> Stage:
    if len(inputs) == 0:
        raise HierarchyError(f"stage {name!r} has an empty dataset")
    pipe = fit_pipeline(inputs, variance=cfg.variance)
    hidden = cfg.hidden.get(name, STAGE_HIDDEN.get(name, DEFAULT_HIDDEN))
    seed = _stage_seed(cfg.seed, index)
    net = init_mlp([pipe.output_dim, hidden, targets.shape[1]], seed=seed)
    tcfg = TrainConfig(
        generations=cfg.generations,
        target_error=cfg.target_error,
        lam=cfg.lam,
        momentum=cfg.momentum,
        adaptive=cfg.adaptive,
        subset_size=cfg.subset_size,
        seed=seed,
    )
    trainer = train_subsets if cfg.subset_size else train
    trainer(net, pipe.apply(inputs), targets, tcfg)
    return Stage(pipe, net, labels)


def _version_lines(db: list[Signature], family: str) -> tuple[str, ...]:
    lines = {signature_line(s) for s in db if signature_family(s) == family}
    return tuple(sorted(lines))


def train_hierarchy(
    db: list[Signature],
    prev=None,
    cfg: HierarchyConfig | None = None,
    corpus: tuple[np.ndarray, list[SampleLabel]] | None = None,
) -> HierarchyModel:
    """Train every stage of the cascade from a signature database.

    By default each stage draws its own balanced Monte Carlo corpus; pass
    `corpus` (encoded inputs plus their sample labels, e.g. the training
    side of a holdout split) to slice every stage from shared data
    instead.  Families absent from the db, single-line families, and
    Windows (refined via DCE-RPC, not TCP/IP probes) get no version net.
    """
    cfg = cfg or HierarchyConfig()
    stages: list[tuple[str, np.ndarray, np.ndarray, tuple[str, ...]]] = []

    version_families = [
        fam
        for fam in RELEVANT_FAMILIES
        if fam != "Windows" and len(_version_lines(db, fam)) >= 2
    ]

    if corpus is None:
        rel = generate_dataset(db, prev, cfg.samples, stage="relevance",
                               seed=_stage_seed(cfg.seed, 0))
        stages.append(("relevance", rel.inputs, rel.targets, rel.output_labels))
        fam = generate_dataset(db, prev, cfg.samples, stage="family",
                              seed=_stage_seed(cfg.seed, 1))
        stages.append(("family", fam.inputs, fam.targets, fam.output_labels))
        for i, family in enumerate(version_families):
            ds = generate_dataset(db, prev, cfg.samples, stage=f"version:{family}",
                                  seed=_stage_seed(cfg.seed, 2 + i))
            stages.append((family, ds.inputs, ds.targets, ds.output_labels))
    else:
        inputs, labels = corpus
        inputs = np.asarray(inputs, dtype=float)
        rel_y = np.array([[1.0 if l.relevant else -1.0] for l in labels])
        stages.append(("relevance", inputs, rel_y, ("relevant",)))
        rel_idx = [i for i, l in enumerate(labels) if l.relevant]
        fam_y = np.array([
            [1.0 if labels[i].family == f else -1.0 for f in RELEVANT_FAMILIES]
            for i in rel_idx
        ])
        stages.append(("family", inputs[rel_idx], fam_y, RELEVANT_FAMILIES))
        for family in version_families:
            lines = _version_lines(db, family)
            rows = [i for i, l in enumerate(labels) if l.family == family]
            if not rows:
                continue
            ver_y = np.array([
                [1.0 if labels[i].line == line else -1.0 for line in lines]
                for i in rows
            ])
            stages.append((family, inputs[rows], ver_y, lines))

    trained: dict[str, Stage] = {}
    for index, (name, X, Y, labs) in enumerate(stages):
        trained[name] = _train_stage(name, X, Y, tuple(labs), cfg, index)

    refiner = None
    if cfg.windows:
        from .dcerpc import synthetic_windows_corpus, train_windows_net

        refiner = train_windows_net(synthetic_windows_corpus(seed=cfg.seed))

    return HierarchyModel(
        relevance=trained.pop("relevance"),
        family=trained.pop("family"),
        versions=trained,
        relevance_threshold=cfg.relevance_threshold,
        decision_threshold=cfg.decision_threshold,
        windows=refiner,
    )


def classify_vector(
    model: HierarchyModel, vec: np.ndarray, dump: EndpointMap | None = None
) -> ClassificationResult:
    """Run the cascade on an already-encoded feature vector."""
    trace = ["relevance"]
    relevance = float(model.relevance.scores(vec)[0])
    if relevance < model.relevance_threshold:
        return ClassificationResult(relevance, None, None, "not relevant", tuple(trace))

    trace.append("family")
    fam_out = model.family.scores(vec)
    family_scores = dict(zip(model.family.labels, (float(v) for v in fam_out)))
    best = int(np.argmax(fam_out))
    if fam_out[best] < model.decision_threshold:
        return ClassificationResult(relevance, family_scores, None, "unknown", tuple(trace))
    family = model.family.labels[best]

    if family == "Windows" and dump is not None and model.windows is not None:
        trace.append("dcerpc")
        verdict = model.windows.classify(dump)
        line = f"{verdict.version} {verdict.edition} sp{verdict.service_pack}"
        return ClassificationResult(
            relevance, family_scores, None, ("Windows", line), tuple(trace), windows=verdict
        )

    stage = model.versions.get(family)
    if stage is None:
        return ClassificationResult(relevance, family_scores, None, (family, None), tuple(trace))

    trace.append(f"version:{family}")
    ver_out = stage.scores(vec)
    version_scores = dict(zip(stage.labels, (float(v) for v in ver_out)))
    vbest = int(np.argmax(ver_out))
    if ver_out[vbest] < model.decision_threshold:
        return ClassificationResult(relevance, family_scores, version_scores, "unknown", tuple(trace))
    return ClassificationResult(
        relevance, family_scores, version_scores, (family, stage.labels[vbest]), tuple(trace)
    )


def classify(
    model: HierarchyModel, obs: Observation, dump: EndpointMap | None = None
) -> ClassificationResult:
    return classify_vector(model, encode_observation(obs), dump)


def report_classification(result: ClassificationResult) -> str:
    """The staged two-column listing, one section per executed stage."""
    lines = ["Relevant / not relevant analysis"]
    lines.append(f"    {result.relevance:.17f} relevant")
    if result.verdict == "not relevant":
        lines.append("Host is not relevant; analysis stopped.")
        return "\n".join(lines)
    lines.append("OS family analysis")
    for name, score in sorted(result.family_scores.items(), key=lambda p: -p[1]):
        lines.append(f"    {score:.17f} {name}")
    if result.windows is not None:
        from .dcerpc import report_windows

        lines.append(report_windows(result.windows))
    elif result.version_scores is not None:
        family = result.stage_trace[-1].split(":", 1)[1]
        lines.append(f"{family} version analysis")
        for name, score in sorted(result.version_scores.items(), key=lambda p: -p[1]):
            lines.append(f"    {score:.17f} {name}")
    name = result.os_name()
    if name is None:
        lines.append("OS unknown: strongest score fell below the decision threshold.")
    else:
        lines.append(f"Setting OS to {name}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Evaluation


def _wilson(successes: int, n: int, z: float = 1.959963984540054) -> tuple[float, float]:
    """95% score interval for a binomial proportion."""
    if n == 0:
        return (0.0, 1.0)
    p = successes / n
    denom = 1.0 + z * z / n
    center = (p + z * z / (2 * n)) / denom
    half = z * np.sqrt(p * (1.0 - p) / n + z * z / (4 * n * n)) / denom
    return (max(0.0, center - half), min(1.0, center + half))


@dataclass
class EvaluationReport:
    n: int
    relevance_accuracy: float
    family_accuracy: float
    family_interval: tuple[float, float]
    version_accuracy: dict[str, float]
    confusion: np.ndarray
    confusion_labels: tuple[str, ...]
    categories: dict[str, int]

    def render(self) -> str:
        lines = [f"Evaluation over {self.n} held-out observations"]
        lines.append(f"  relevance accuracy: {self.relevance_accuracy:.4f}")
        lo, hi = self.family_interval
        lines.append(
            f"  family accuracy:    {self.family_accuracy:.4f} (95% CI {lo:.4f}-{hi:.4f})"
        )
        for fam, acc in sorted(self.version_accuracy.items()):
            lines.append(f"  {fam} version accuracy: {acc:.4f}")
        lines.append("  confusion (rows true, columns predicted):")
        width = max(len(l) for l in self.confusion_labels) + 1
        header = " " * (width + 2) + " ".join(f"{l:>{width}}" for l in self.confusion_labels)
        lines.append(header)
        for i, lab in enumerate(self.confusion_labels):
            row = " ".join(f"{int(v):>{width}}" for v in self.confusion[i])
            lines.append(f"  {lab:>{width}} {row}")
        order = ("perfect match", "partial match", "error", "no answer")
        lines.append("  outcomes: " + ", ".join(f"{k} {self.categories[k]}" for k in order))
        return "\n".join(lines)


def evaluate(model: HierarchyModel, heldout: Dataset) -> EvaluationReport:
    """Score every stage on held-out data and bucket cascade outcomes.

    Stage accuracies are measured independently on the rows where ground
    truth makes the stage applicable (family accuracy over truly
    relevant rows, and so on).  The outcome buckets run the full cascade:
    perfect match needs family and version both right, partial match is
    a right family with a missing or wrong version, "unknown" verdicts
    count as no answer, and everything else is an error.
    """
    X = heldout.inputs
    labels = heldout.labels
    n = len(X)
    rel_out = model.relevance.scores_batch(X)[:, 0]
    fam_out = model.family.scores_batch(X)
    rel_truth = np.array([l.relevant for l in labels], dtype=bool)
    rel_pred = rel_out >= model.relevance_threshold
    relevance_accuracy = float((rel_pred == rel_truth).mean())

    fam_labels = model.family.labels
    fam_pred_idx = fam_out.argmax(axis=1)
    nfam = len(fam_labels)
    confusion = np.zeros((nfam, nfam))
    fam_ok = 0
    fam_total = 0
    for i, lab in enumerate(labels):
        if not lab.relevant:
            continue
        true_idx = fam_labels.index(lab.family)
        confusion[true_idx, fam_pred_idx[i]] += 1
        fam_ok += int(fam_pred_idx[i] == true_idx)
        fam_total += 1
    family_accuracy = fam_ok / fam_total if fam_total else 0.0

    version_accuracy: dict[str, float] = {}
    for fam, stage in model.versions.items():
        rows = np.array([l.family == fam for l in labels], dtype=bool)
        if not rows.any():
            continue
        out = stage.scores_batch(X[rows])
        pred = out.argmax(axis=1)
        truth = [l.line for l in labels if l.family == fam]
        ok = sum(stage.labels[p] == t for p, t in zip(pred, truth))
        version_accuracy[fam] = ok / len(truth)

    categories = {"perfect match": 0, "partial match": 0, "error": 0, "no answer": 0}
    for i, lab in enumerate(labels):
        verdict = classify_vector(model, X[i]).verdict
        if verdict == "unknown":
            categories["no answer"] += 1
        elif not lab.relevant:
            categories["perfect match" if verdict == "not relevant" else "error"] += 1
        elif isinstance(verdict, str):
            categories["error"] += 1
        elif verdict[0] != lab.family:
            categories["error"] += 1
        elif verdict[1] is not None and verdict[1] == lab.line:
            categories["perfect match"] += 1
        else:
            categories["partial match"] += 1

    return EvaluationReport(
        n=n,
        relevance_accuracy=relevance_accuracy,
        family_accuracy=family_accuracy,
        family_interval=_wilson(fam_ok, fam_total),
        version_accuracy=version_accuracy,
        confusion=confusion,
        confusion_labels=fam_labels,
        categories=categories,
    )
