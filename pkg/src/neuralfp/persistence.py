"""Versioned on-disk containers for trained artifacts.

Everything is one JSON document: a small header (format version, kind
tag, metadata) plus a body whose sha256 digest is stored alongside.
Floats serialize through repr, so numeric fields round-trip exactly.
Writes go to a temp file in the target directory and are renamed into
place, so a crash never leaves a half-written model.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile

import numpy as np

from .datagen import Dataset, SampleLabel
from .dcerpc import WindowsLabelSpace, WindowsRefiner
from .encoding import EndpointSchema
from .hierarchy import HierarchyModel, Stage
from .neural import Mlp, TrainHistory
from .preprocess import Normalizer, ReductionPipeline

__all__ = [
    "CorruptContainerError",
    "FormatVersionError",
    "KindMismatchError",
    "PersistenceError",
    "FORMAT_VERSION",
    "load",
    "save",
]

FORMAT_VERSION = 1


class PersistenceError(Exception):
    pass


class CorruptContainerError(PersistenceError):
    """Unparseable container or a body that fails its digest."""


class FormatVersionError(PersistenceError):
    """Container written by an unknown format version."""


class KindMismatchError(PersistenceError):
    """Container holds a different payload kind than the caller expects."""


# ---------------------------------------------------------------------------
# Body codecs, one pair per payload kind


def _mat(a) -> list:
    return np.asarray(a, dtype=float).tolist()


def _encode_network(net: Mlp) -> dict:
    body = {"weights": [_mat(w) for w in net.weights]}
    if net.history is not None:
        body["history"] = [list(r) for r in net.history.rows]
    return body


def _decode_network(body: dict) -> Mlp:
    net = Mlp([np.array(w, dtype=float) for w in body["weights"]])
    rows = body.get("history")
    if rows is not None:
        net.history = TrainHistory([(int(g), m, l, x) for g, m, l, x in rows])
    return net


def _encode_pipeline(pipe: ReductionPipeline) -> dict:
    return {
        "mean": _mat(pipe.normalizer.mean),
        "std": _mat(pipe.normalizer.std),
        "constant": [bool(v) for v in pipe.normalizer.constant],
        "kept": list(pipe.kept),
        "basis": _mat(pipe.basis),
        "eigenvalues": _mat(pipe.eigenvalues),
        "variance_kept": float(pipe.variance_kept),
    }


def _decode_pipeline(body: dict) -> ReductionPipeline:
    norm = Normalizer(
        np.array(body["mean"], dtype=float),
        np.array(body["std"], dtype=float),
        np.array(body["constant"], dtype=bool),
    )
    return ReductionPipeline(
        normalizer=norm,
        kept=tuple(int(i) for i in body["kept"]),
        basis=np.array(body["basis"], dtype=float),
        eigenvalues=np.array(body["eigenvalues"], dtype=float),
        variance_kept=float(body["variance_kept"]),
    )


def _encode_stage(stage: Stage) -> dict:
    return {
        "pipeline": _encode_pipeline(stage.pipeline),
        "network": _encode_network(stage.net),
        "labels": list(stage.labels),
    }


def _decode_stage(body: dict) -> Stage:
    return Stage(
        pipeline=_decode_pipeline(body["pipeline"]),
        net=_decode_network(body["network"]),
        labels=tuple(body["labels"]),
    )


def _encode_schema(schema: EndpointSchema) -> dict:
    return {
        "uuids": [[u, i] for u, i in schema.uuid_index.items()],
        "bindings": [[u, proto, ep, i] for (u, proto, ep), i in schema.binding_index.items()],
    }


def _decode_schema(body: dict) -> EndpointSchema:
    return EndpointSchema(
        uuid_index={u: int(i) for u, i in body["uuids"]},
        binding_index={(u, proto, ep): int(i) for u, proto, ep, i in body["bindings"]},
    )


def _encode_label_space(labels: WindowsLabelSpace) -> dict:
    return {
        "versions": list(labels.versions),
        "editions": {v: list(e) for v, e in labels.editions.items()},
        "service_packs": {v: list(s) for v, s in labels.service_packs.items()},
    }


def _decode_label_space(body: dict) -> WindowsLabelSpace:
    return WindowsLabelSpace(
        versions=tuple(body["versions"]),
        editions={v: tuple(e) for v, e in body["editions"].items()},
        service_packs={v: tuple(s) for v, s in body["service_packs"].items()},
    )


def _encode_refiner(ref: WindowsRefiner) -> dict:
    return {
        "network": _encode_network(ref.net),
        "schema": _encode_schema(ref.schema),
        "labels": _encode_label_space(ref.labels),
    }


def _decode_refiner(body: dict) -> WindowsRefiner:
    return WindowsRefiner(
        net=_decode_network(body["network"]),
        schema=_decode_schema(body["schema"]),
        labels=_decode_label_space(body["labels"]),
    )


def _encode_hierarchy(model: HierarchyModel) -> dict:
    return {
        "relevance": _encode_stage(model.relevance),
        "family": _encode_stage(model.family),
        "versions": {name: _encode_stage(s) for name, s in model.versions.items()},
        "relevance_threshold": float(model.relevance_threshold),
        "decision_threshold": float(model.decision_threshold),
        "windows": None if model.windows is None else _encode_refiner(model.windows),
    }


def _decode_hierarchy(body: dict) -> HierarchyModel:
    windows = body.get("windows")
    return HierarchyModel(
        relevance=_decode_stage(body["relevance"]),
        family=_decode_stage(body["family"]),
        versions={name: _decode_stage(s) for name, s in body["versions"].items()},
        relevance_threshold=float(body["relevance_threshold"]),
        decision_threshold=float(body["decision_threshold"]),
        windows=None if windows is None else _decode_refiner(windows),
    )


def _encode_dataset(ds: Dataset) -> dict:
    return {
        "stage": ds.stage,
        "inputs": _mat(ds.inputs),
        "targets": _mat(ds.targets),
        "labels": [[l.signature, l.relevant, l.family, l.line] for l in ds.labels],
        "output_labels": list(ds.output_labels),
        "seed": int(ds.seed),
    }


def _decode_dataset(body: dict) -> Dataset:
    return Dataset(
        stage=body["stage"],
        inputs=np.array(body["inputs"], dtype=float),
        targets=np.array(body["targets"], dtype=float),
        labels=[SampleLabel(s, bool(r), f, l) for s, r, f, l in body["labels"]],
        output_labels=tuple(body["output_labels"]),
        seed=int(body["seed"]),
    )


_CODECS = {
    "network": (Mlp, _encode_network, _decode_network),
    "pipeline": (ReductionPipeline, _encode_pipeline, _decode_pipeline),
    "stage": (Stage, _encode_stage, _decode_stage),
    "hierarchy": (HierarchyModel, _encode_hierarchy, _decode_hierarchy),
    "windows-refiner": (WindowsRefiner, _encode_refiner, _decode_refiner),
    "endpoint-schema": (EndpointSchema, _encode_schema, _decode_schema),
    "dataset": (Dataset, _encode_dataset, _decode_dataset),
}


def _kind_of(obj) -> str:
    for kind, (cls, _, _) in _CODECS.items():
        if type(obj) is cls:
            return kind
    raise PersistenceError(f"no container kind for {type(obj).__name__}")


def _digest(body: dict) -> str:
    canon = json.dumps(body, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


# ---------------------------------------------------------------------------
# Container I/O


def save(obj, path, metadata: dict | None = None) -> None:
    """Serialize a supported artifact; the write is atomic."""
    kind = _kind_of(obj)
    encode = _CODECS[kind][1]
    body = encode(obj)
    meta = dict(metadata or {})
    if isinstance(obj, Dataset):
        meta.setdefault("seed", obj.seed)
    container = {
        "format_version": FORMAT_VERSION,
        "kind": kind,
        "metadata": meta,
        "digest": _digest(body),
        "body": body,
    }
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=directory)
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(container, fh, separators=(",", ":"))
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_container(path, expected_kind: str | None = None) -> dict:
    """Read and validate a container without decoding the body."""
    try:
        with open(path) as fh:
            container = json.load(fh)
    except ValueError as exc:
        raise CorruptContainerError(f"{path}: not a valid container: {exc}") from exc
    if not isinstance(container, dict):
        raise CorruptContainerError(f"{path}: not a valid container")
    for key in ("format_version", "kind", "metadata", "digest", "body"):
        if key not in container:
            raise CorruptContainerError(f"{path}: missing field {key!r}")
    version = container["format_version"]
    if version != FORMAT_VERSION:
        raise FormatVersionError(
            f"{path}: format version {version!r} (supported: {FORMAT_VERSION})"
        )
    if _digest(container["body"]) != container["digest"]:
        raise CorruptContainerError(f"{path}: body does not match its digest")
    kind = container["kind"]
    if kind not in _CODECS:
        raise CorruptContainerError(f"{path}: unknown payload kind {kind!r}")
    if expected_kind is not None and kind != expected_kind:
        raise KindMismatchError(f"{path}: holds {kind!r}, expected {expected_kind!r}")
    return container


def load(path, expected_kind: str | None = None):
    """Load an artifact saved by save(); see load_container for checks."""
    container = load_container(path, expected_kind)
    decode = _CODECS[container["kind"]][2]
    return decode(container["body"])
