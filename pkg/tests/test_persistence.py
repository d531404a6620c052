"""Container round-trips, integrity checks, and error taxonomy."""

import json
import os

import numpy as np
import pytest

from neuralfp.corpus import demo_database
from neuralfp.datagen import generate_dataset
from neuralfp.encoding import build_endpoint_schema
from neuralfp.dcerpc import parse_endpoint_dump, synthetic_windows_corpus, train_windows_net
from neuralfp.hierarchy import HierarchyConfig, classify_vector, train_hierarchy
from neuralfp.neural import Mlp, TrainConfig, forward_batch, init_mlp, train
from neuralfp.persistence import (
    FORMAT_VERSION,
    CorruptContainerError,
    FormatVersionError,
    KindMismatchError,
    PersistenceError,
    load,
    load_container,
    save,
)
from neuralfp.preprocess import fit_pipeline
from neuralfp.signatures import parse_fingerprint_db


def _trained_net(sizes=(2, 2, 1), seed=0):
    rng = np.random.default_rng(seed)
    net = init_mlp(list(sizes), seed=seed)
    X = rng.uniform(-1.0, 1.0, (16, sizes[0]))
    Y = np.sign(rng.uniform(-1.0, 1.0, (16, sizes[-1])))
    train(net, X, Y, TrainConfig(generations=8, lam=0.05, seed=seed))
    return net


class TestNetworkRoundTrip:
    def test_forward_outputs_bit_exact_on_100_random_inputs(self, tmp_path):
        net = _trained_net()
        path = tmp_path / "net.model"
        save(net, path)
        back = load(path)
        probe = np.random.default_rng(42).uniform(-10.0, 10.0, (100, 2))
        assert np.array_equal(forward_batch(net, probe), forward_batch(back, probe))

    def test_history_survives(self, tmp_path):
        net = _trained_net()
        path = tmp_path / "net.model"
        save(net, path)
        assert load(path).history.rows == net.history.rows

    def test_weights_identical(self, tmp_path):
        net = _trained_net(sizes=(5, 4, 3), seed=9)
        save(net, tmp_path / "n.model")
        back = load(tmp_path / "n.model")
        for a, b in zip(net.weights, back.weights):
            assert np.array_equal(a, b)


class TestOtherKinds:
    def test_pipeline_round_trip(self, tmp_path):
        rng = np.random.default_rng(5)
        X = rng.normal(size=(60, 9))
        X[:, 4] = 2.0  # constant column exercises the mask
        pipe = fit_pipeline(X, variance=0.98)
        save(pipe, tmp_path / "p.model")
        back = load(tmp_path / "p.model")
        assert back.kept == pipe.kept
        assert np.array_equal(pipe.apply(X), back.apply(X))

    def test_dataset_round_trip(self, tmp_path):
        db = parse_fingerprint_db(demo_database())
        ds = generate_dataset(db, None, 120, stage="family", seed=6)
        save(ds, tmp_path / "d.model")
        back = load(tmp_path / "d.model")
        assert back.stage == "family"
        assert np.array_equal(back.inputs, ds.inputs)
        assert np.array_equal(back.targets, ds.targets)
        assert back.labels == ds.labels
        assert back.output_labels == ds.output_labels

    def test_dataset_seed_recorded_in_metadata(self, tmp_path):
        db = parse_fingerprint_db(demo_database())
        ds = generate_dataset(db, None, 120, stage="relevance", seed=31)
        save(ds, tmp_path / "d.model")
        assert load_container(tmp_path / "d.model")["metadata"]["seed"] == 31

    def test_refiner_round_trip_classifies_identically(self, tmp_path):
        corpus = synthetic_windows_corpus(per_triple=1, seed=2, dropout=0.0)
        ref = train_windows_net(corpus)
        save(ref, tmp_path / "r.model")
        back = load(tmp_path / "r.model")
        for dump, _ in corpus[:10]:
            a, b = ref.classify(dump), back.classify(dump)
            assert (a.version, a.edition, a.service_pack) == (b.version, b.edition, b.service_pack)
            assert a.scores == b.scores

    def test_schema_round_trip(self, tmp_path):
        emap = parse_endpoint_dump(
            "uuid 00000001-0000-0000-0000-000000000002\n"
            "  binding ncalrpc ep1\n  binding ncadg_ip_udp\n"
        )
        schema = build_endpoint_schema([emap])
        save(schema, tmp_path / "s.model")
        back = load(tmp_path / "s.model")
        assert back.uuid_index == schema.uuid_index
        assert back.binding_index == schema.binding_index

    def test_hierarchy_round_trip_classifies_identically(self, tmp_path):
        db = parse_fingerprint_db(demo_database())
        ds = generate_dataset(db, None, 400, stage="relevance", seed=8)
        model = train_hierarchy(
            db,
            cfg=HierarchyConfig(seed=2, generations=40),
            corpus=(ds.inputs, ds.labels),
        )
        save(model, tmp_path / "h.model")
        back = load(tmp_path / "h.model", expected_kind="hierarchy")
        for i in range(0, 400, 13):
            a = classify_vector(model, ds.inputs[i])
            b = classify_vector(back, ds.inputs[i])
            assert a.verdict == b.verdict
            assert a.relevance == b.relevance
            assert a.family_scores == b.family_scores


class TestContainerChecks:
    def test_tampered_body_is_an_integrity_error(self, tmp_path):
        path = tmp_path / "n.model"
        save(_trained_net(), path)
        raw = json.loads(path.read_text())
        raw["body"]["weights"][0][0][0] += 1e-12
        path.write_text(json.dumps(raw))
        with pytest.raises(CorruptContainerError, match="does not match its digest"):
            load(path)

    def test_unknown_format_version(self, tmp_path):
        path = tmp_path / "n.model"
        save(_trained_net(), path)
        raw = json.loads(path.read_text())
        raw["format_version"] = FORMAT_VERSION + 1
        path.write_text(json.dumps(raw))
        with pytest.raises(FormatVersionError, match="format version"):
            load(path)

    def test_kind_mismatch(self, tmp_path):
        path = tmp_path / "n.model"
        save(_trained_net(), path)
        with pytest.raises(KindMismatchError, match="holds 'network', expected 'dataset'"):
            load(path, expected_kind="dataset")

    def test_not_json_is_corrupt(self, tmp_path):
        path = tmp_path / "junk.model"
        path.write_text("definitely not json{")
        with pytest.raises(CorruptContainerError, match="not a valid container"):
            load(path)

    def test_missing_field_is_corrupt(self, tmp_path):
        path = tmp_path / "n.model"
        save(_trained_net(), path)
        raw = json.loads(path.read_text())
        del raw["digest"]
        path.write_text(json.dumps(raw))
        with pytest.raises(CorruptContainerError, match="missing field 'digest'"):
            load(path)

    def test_error_classes_are_distinct_but_related(self):
        for cls in (CorruptContainerError, FormatVersionError, KindMismatchError):
            assert issubclass(cls, PersistenceError)
        assert not issubclass(CorruptContainerError, FormatVersionError)
        assert not issubclass(FormatVersionError, KindMismatchError)

    def test_unsupported_object_rejected(self, tmp_path):
        with pytest.raises(PersistenceError, match="no container kind"):
            save({"weights": [1, 2]}, tmp_path / "x.model")


class TestAtomicity:
    def test_overwrite_leaves_valid_file(self, tmp_path):
        path = tmp_path / "n.model"
        save(_trained_net(seed=0), path)
        save(_trained_net(seed=1), path)
        back = load(path)
        assert isinstance(back, Mlp)
        assert not [p for p in os.listdir(tmp_path) if p.startswith(".tmp-")]

    def test_no_partial_file_on_failure(self, tmp_path):
        # an unserializable object aborts before the rename
        class Weird(Mlp):
            pass

        net = _trained_net()
        bad = Weird(net.weights)
        with pytest.raises(PersistenceError):
            save(bad, tmp_path / "w.model")
        assert not (tmp_path / "w.model").exists()
        assert not [p for p in os.listdir(tmp_path) if p.startswith(".tmp-")]
