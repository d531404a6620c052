"""Endpoint-mapper dump parsing and Windows version classification.

A host's RPC endpoint mapper lists the programs (UUIDs) registered on it
and how to reach them.  Which programs are present discriminates Windows
version, edition, and service pack, so a single perceptron over the
endpoint schema decodes all three at once; the edition and service-pack
decisions are read from disjoint neuron groups and never interact.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .encoding import (
    EndpointMap,
    EndpointSchema,
    RpcProgram,
    build_endpoint_schema,
    encode_endpoint_map,
)
from .neural import Mlp, TrainConfig, forward, init_mlp, train

__all__ = [
    "DumpParseError",
    "WindowsLabelSpace",
    "WindowsRefiner",
    "WindowsVerdict",
    "classify_windows",
    "format_endpoint_dump",
    "parse_endpoint_dump",
    "report_windows",
    "synthetic_windows_corpus",
    "train_windows_net",
]

_UUID_RE = re.compile(
    r"^[0-9A-Fa-f]{8}-[0-9A-Fa-f]{4}-[0-9A-Fa-f]{4}-[0-9A-Fa-f]{4}-[0-9A-Fa-f]{12}$"
)


class DumpParseError(Exception):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


def parse_endpoint_dump(text: str, name: str | None = None) -> EndpointMap:
    """Parse the line-oriented dump format into an EndpointMap.

    Grammar: `uuid <UUID>` opens a program, indented `binding <protocol>
    [endpoint-name]` lines attach to it, `annotation <text>` lines are
    kept as documentation.  A program must collect at least one binding.
    """
    programs: list[RpcProgram] = []
    uuid: str | None = None
    annotation: str | None = None
    bindings: list[tuple[str, str | None]] = []
    opened_at = 0

    def flush():
        if uuid is None:
            return
        if not bindings:
            raise DumpParseError(f"program {uuid} has no bindings", opened_at)
        programs.append(RpcProgram(uuid, annotation, tuple(bindings)))

    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        word, _, rest = line.partition(" ")
        rest = rest.strip()
        if word == "uuid":
            if not _UUID_RE.match(rest):
                raise DumpParseError(f"malformed UUID {rest!r}", n)
            flush()
            uuid, annotation, bindings, opened_at = rest.upper(), None, [], n
        elif word == "annotation":
            if uuid is None:
                raise DumpParseError("annotation before any uuid line", n)
            annotation = rest or None
        elif word == "binding":
            if uuid is None:
                raise DumpParseError("binding before any uuid line", n)
            if not rest:
                raise DumpParseError("binding needs a protocol", n)
            proto, _, endpoint = rest.partition(" ")
            bindings.append((proto, endpoint.strip() or None))
        else:
            raise DumpParseError(f"unrecognized directive {word!r}", n)
    flush()
    return EndpointMap(name, tuple(programs))


def format_endpoint_dump(emap: EndpointMap) -> str:
    lines = []
    for prog in emap.programs:
        lines.append(f"uuid {prog.uuid}")
        if prog.annotation:
            lines.append(f"  annotation {prog.annotation}")
        for proto, endpoint in prog.bindings:
            lines.append(f"  binding {proto}" + (f" {endpoint}" if endpoint else ""))
    return "\n".join(lines) + ("\n" if lines else "")


# ---------------------------------------------------------------------------
# Label space


@dataclass(frozen=True)
class WindowsLabelSpace:
    """Output layout: versions, then editions, then service packs.

    Editions and service packs are grouped under their version; the
    three decisions are decoded independently from disjoint neuron
    ranges.
    """

    versions: tuple[str, ...]
    editions: dict[str, tuple[str, ...]]
    service_packs: dict[str, tuple[str, ...]]

    @classmethod
    def default(cls) -> "WindowsLabelSpace":
        return cls(
            versions=("NT4", "2000", "2003", "XP"),
            editions={
                "NT4": ("Enterprise Server", "Server"),
                "2000": ("Server", "Professional", "Advanced Server"),
                "2003": ("Web Edition", "Enterprise Edition", "Standard Edition"),
                "XP": ("Professional", "Home"),
            },
            service_packs={
                "NT4": ("6", "6a"),
                "2000": ("4", "2", "3", "0", "1"),
                "2003": ("0",),
                "XP": ("2", "0", "1"),
            },
        )

    @property
    def total(self) -> int:
        ed = sum(len(v) for v in self.editions.values())
        sp = sum(len(v) for v in self.service_packs.values())
        return len(self.versions) + ed + sp

    def neuron_labels(self) -> list[str]:
        out = [f"version {v}" for v in self.versions]
        for v in self.versions:
            out += [f"{v} edition {e}" for e in self.editions[v]]
        for v in self.versions:
            out += [f"{v} sp{s}" for s in self.service_packs[v]]
        return out

    def version_index(self, version: str) -> int:
        return self.versions.index(version)

    def edition_indices(self, version: str) -> range:
        base = len(self.versions)
        for v in self.versions:
            if v == version:
                return range(base, base + len(self.editions[v]))
            base += len(self.editions[v])
        raise KeyError(version)

    def sp_indices(self, version: str) -> range:
        base = len(self.versions) + sum(len(e) for e in self.editions.values())
        for v in self.versions:
            if v == version:
                return range(base, base + len(self.service_packs[v]))
            base += len(self.service_packs[v])
        raise KeyError(version)

    def target_vector(self, version: str, edition: str, sp: str) -> np.ndarray:
        y = np.full(self.total, -1.0)
        y[self.version_index(version)] = 1.0
        y[self.edition_indices(version)[self.editions[version].index(edition)]] = 1.0
        y[self.sp_indices(version)[self.service_packs[version].index(sp)]] = 1.0
        return y


@dataclass
class WindowsVerdict:
    version: str
    edition: str
    service_pack: str
    scores: dict[str, float]
    low_confidence: bool
    labels: "WindowsLabelSpace"

    def os_name(self) -> str:
        return f"Windows {self.version} {self.edition} sp{self.service_pack}"


def classify_windows(
    net: Mlp, schema: EndpointSchema, labels: WindowsLabelSpace, dump: EndpointMap
) -> WindowsVerdict:
    """Decode (version, edition, service pack) from one endpoint dump.

    The three argmaxes run over disjoint neuron groups: mistakes in one
    dimension cannot move the others.
    """
    vec = encode_endpoint_map(schema, dump)
    low_confidence = not np.any(vec > 0.0)
    out = forward(net, vec)
    version = labels.versions[int(np.argmax(out[: len(labels.versions)]))]
    ed_idx = labels.edition_indices(version)
    edition = labels.editions[version][int(np.argmax(out[ed_idx.start : ed_idx.stop]))]
    sp_idx = labels.sp_indices(version)
    sp = labels.service_packs[version][int(np.argmax(out[sp_idx.start : sp_idx.stop]))]
    scores = dict(zip(labels.neuron_labels(), (float(v) for v in out)))
    return WindowsVerdict(version, edition, sp, scores, low_confidence, labels)


def report_windows(verdict: WindowsVerdict) -> str:
    """Grouped two-column listing of the endpoint classifier's scores."""
    labels = verdict.labels
    out = list(verdict.scores.values())
    lines = ["DCE-RPC Windows analysis"]
    if verdict.low_confidence:
        lines.append("  (no known UUID present; low confidence)")

    def section(title, names, idx):
        lines.append(title)
        for label, i in sorted(zip(names, idx), key=lambda p: -out[p[1]]):
            lines.append(f"    {out[i]:.8f} {label}")

    section("Windows version analysis", labels.versions, range(len(labels.versions)))
    v = verdict.version
    section(
        f"Windows {v} edition analysis",
        labels.editions[v],
        labels.edition_indices(v),
    )
    section(
        f"Windows {v} service pack analysis",
        [f"sp{s}" for s in labels.service_packs[v]],
        labels.sp_indices(v),
    )
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Synthetic corpus and training


def _uuid(group: int, item: int) -> str:
    return f"{group:08X}-0000-0000-0000-{item:012X}"


def _template(labels: WindowsLabelSpace, version: str, edition: str, sp: str) -> EndpointMap:
    """Deterministic endpoint map for one (version, edition, sp) triple.

    Every Windows host shares a core set of programs; each version,
    edition, and service pack registers its own, so the three dimensions
    stay independently decodable.
    """
    progs = []
    for i in range(3):  # core services every stack exposes
        progs.append(RpcProgram(
            _uuid(1, i), "core service",
            (("ncalrpc", f"LRPC{i:05X}"), ("ncacn_ip_tcp", f"{1024 + i}")),
        ))
    vi = labels.version_index(version)
    for i in range(3):
        progs.append(RpcProgram(
            _uuid(16 + vi, i), f"{version} service",
            (("ncacn_np", rf"\PIPE\svc{vi}{i}"), ("ncadg_ip_udp", None)),
        ))
    ei = list(labels.edition_indices(version))[labels.editions[version].index(edition)]
    for i in range(2):
        progs.append(RpcProgram(
            _uuid(64 + ei, i), f"{edition} service",
            (("ncalrpc", f"ED{ei:04X}{i}"),),
        ))
    si = list(labels.sp_indices(version))[labels.service_packs[version].index(sp)]
    progs.append(RpcProgram(
        _uuid(128 + si, 0), f"sp{sp} hotfix service",
        (("ncacn_ip_tcp", f"{2048 + si}"), ("ncalrpc", f"SP{si:04X}")),
    ))
    return EndpointMap(f"Windows {version} {edition} sp{sp}", tuple(progs))


def synthetic_windows_corpus(
    labels: WindowsLabelSpace | None = None,
    per_triple: int = 8,
    seed: int = 0,
    dropout: float = 0.1,
) -> list[tuple[EndpointMap, tuple[str, str, str]]]:
    """Jittered exemplars for every (version, edition, sp) combination.

    Each binding survives with probability 1 - dropout; a program that
    loses every binding disappears from the dump, the way a disabled
    service would.
    """
    labels = labels or WindowsLabelSpace.default()
    rng = np.random.default_rng(seed)
    corpus = []
    for version in labels.versions:
        for edition in labels.editions[version]:
            for sp in labels.service_packs[version]:
                template = _template(labels, version, edition, sp)
                for _ in range(per_triple):
                    progs = []
                    for prog in template.programs:
                        kept = tuple(b for b in prog.bindings if rng.random() >= dropout)
                        if kept:
                            progs.append(RpcProgram(prog.uuid, prog.annotation, kept))
                    corpus.append((
                        EndpointMap(template.name, tuple(progs)),
                        (version, edition, sp),
                    ))
    return corpus


@dataclass
class WindowsRefiner:
    """A trained endpoint classifier bundled with its schema and labels."""

    net: Mlp
    schema: EndpointSchema
    labels: WindowsLabelSpace

    def classify(self, dump: EndpointMap) -> WindowsVerdict:
        return classify_windows(self.net, self.schema, self.labels, dump)


def train_windows_net(
    corpus: list[tuple[EndpointMap, tuple[str, str, str]]],
    labels: WindowsLabelSpace | None = None,
    hidden: int = 24,
    cfg: TrainConfig | None = None,
) -> WindowsRefiner:
    """Fit the endpoint perceptron on a dump corpus."""
    labels = labels or WindowsLabelSpace.default()
    schema = build_endpoint_schema([m for m, _ in corpus])
    X = np.array([encode_endpoint_map(schema, m) for m, _ in corpus])
    Y = np.array([labels.target_vector(*triple) for _, triple in corpus])
    cfg = cfg or TrainConfig(generations=150, target_error=0.02, lam=0.005, momentum=0.8, seed=0)
    net = init_mlp([schema.size, hidden, labels.total], seed=cfg.seed)
    train(net, X, Y, cfg)
    return WindowsRefiner(net, schema, labels)
