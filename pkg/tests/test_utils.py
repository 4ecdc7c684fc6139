"""Unit tests for artifact envelopes and document formats."""

import json
from pathlib import Path

import pytest

from omega_width.config import load_config
from omega_width.engine import FiniteConstraint, FiniteInstance, Instance, InstanceError
from omega_width.fixtures import complete_graph, cycle_graph
from omega_width.formats import (
    finite_instance_from_dict,
    finite_instance_to_dict,
    freeze,
    load_instance,
    load_structure,
    load_witness,
    save_instance,
    save_verdict,
    structure_to_dict,
    thaw,
    witness_to_dict,
)
from omega_width.reduction import solve, verify_witness
from omega_width.utils import (
    FORMAT_VERSION,
    FormatError,
    canonical_json,
    check_envelope,
    envelope,
    load_document,
    save_document,
)


@pytest.fixture
def temp_invalid_json_file(tmp_path):
    """A file that is not valid JSON."""
    path = tmp_path / "broken.json"
    path.write_text("{ invalid json }", encoding="utf-8")
    return path


class TestEnvelope:
    """Test format tags and versions."""

    def test_envelope_fields(self):
        document = envelope("witness", {"classes": []})
        assert document["format"] == "witness"
        assert document["version"] == FORMAT_VERSION
        assert document["classes"] == []

    def test_unknown_format(self):
        with pytest.raises(FormatError, match="Unknown artifact format"):
            envelope("spreadsheet", {})

    def test_wrong_format(self):
        with pytest.raises(FormatError, match="expected format 'instance'"):
            check_envelope(envelope("witness", {}), "instance")

    def test_wrong_version(self):
        document = {"format": "instance", "version": FORMAT_VERSION + 1}
        with pytest.raises(FormatError, match="unsupported instance version"):
            check_envelope(document, "instance")

    def test_not_an_object(self):
        with pytest.raises(FormatError, match="JSON object"):
            check_envelope([1, 2], "instance")


class TestDocuments:
    """Test reading and writing versioned documents."""

    def test_canonical_json(self):
        text = canonical_json({"b": 1, "a": [1, 2]})
        assert text.endswith("\n")
        assert text.index('"a"') < text.index('"b"')

    def test_save_and_load(self, tmp_path):
        path = save_document(envelope("report", {"ok": True}), tmp_path / "nested" / "r.json")
        assert load_document(path, "report")["ok"] is True

    def test_missing_file(self, tmp_path):
        with pytest.raises(FormatError, match="File not found"):
            load_document(tmp_path / "absent.json", "instance")

    def test_invalid_json(self, temp_invalid_json_file):
        with pytest.raises(FormatError, match="Invalid JSON"):
            load_document(temp_invalid_json_file, "instance")

    def test_freeze_and_thaw(self):
        assert freeze([1, [2, 3]]) == (1, (2, 3))
        assert thaw((1, (2, 3))) == [1, [2, 3]]


class TestInstanceDocuments:
    """Test instance files."""

    def test_save_and_load(self, tmp_path, equality):
        instance = Instance.from_applications(equality, [1, 2, 3], [("NEQ", (1, 3))])
        path = save_instance(instance, tmp_path / "inst.json")
        loaded = load_instance(path, equality)
        assert loaded.variables == (1, 2, 3)
        assert loaded.applications == instance.applications

    def test_canonical_bytes(self, tmp_path, equality):
        instance = Instance.from_applications(equality, [2, 1], [("EQ", (1, 2))])
        first = save_instance(instance, tmp_path / "a.json").read_bytes()
        second = save_instance(instance, tmp_path / "b.json").read_bytes()
        assert first == second

    def test_atlas_mismatch(self, tmp_path, equality, henson3):
        path = save_instance(Instance.from_applications(equality, [1], []), tmp_path / "i.json")
        with pytest.raises(InstanceError, match="over atlas equality"):
            load_instance(path, henson3)

    def test_malformed(self, tmp_path, equality):
        path = save_document(envelope("instance", {"atlas": "equality"}), tmp_path / "i.json")
        with pytest.raises(FormatError, match="malformed instance"):
            load_instance(path, equality)

    def test_finite_instance(self):
        fi = FiniteInstance(
            variables=(("a", "b"),),
            alphabet=("EQ", "NEQ"),
            constraints=(FiniteConstraint((("a", "b"),), frozenset({("NEQ",)}), "NEQ"),),
        )
        decoded = finite_instance_from_dict(json.loads(canonical_json(finite_instance_to_dict(fi))))
        assert decoded.variables == fi.variables
        assert decoded.constraints[0].tuples == frozenset({("NEQ",)})


class TestOtherDocuments:
    """Test structures, witnesses and verdicts."""

    def test_structure_file(self, tmp_path):
        structure = complete_graph(3)
        path = save_document(structure_to_dict(structure), tmp_path / "k3.json")
        loaded = load_structure(path)
        assert loaded.domain == structure.domain
        assert loaded.relations == structure.relations

    def test_bad_structure(self, tmp_path):
        relations = {"E": {"arity": 2, "tuples": [[0, 5]]}}
        document = envelope("structure", {"domain": [0], "relations": relations})
        path = save_document(document, tmp_path / "bad.json")
        with pytest.raises(FormatError, match="leaves the domain"):
            load_structure(path)

    def test_witness_file(self, tmp_path, equality):
        instance = Instance.from_applications(equality, ["u", "v"], [("NEQ", ("u", "v"))])
        witness = solve(instance, "family").witness
        path = save_document(witness_to_dict(witness), tmp_path / "w.json")
        assert verify_witness(instance, load_witness(path)).ok

    def test_verdict_kind(self, tmp_path):
        path = save_verdict("solve", {"verdict": "SAT"}, tmp_path / "v.json")
        document = load_document(path, "verdict")
        assert document["kind"] == "solve"
        assert document["verdict"] == "SAT"


class TestDataSamples:
    """The shipped samples load with the current readers."""

    SAMPLES = Path(__file__).parent.parent / "data_samples"

    def test_instances(self, equality, henson3):
        triangle = load_instance(self.SAMPLES / "equality_triangle.json", equality)
        assert len(triangle.applications) == 3
        path = load_instance(self.SAMPLES / "henson3_path.json", henson3)
        assert path.variables == (1, 2, 3)

    def test_structures(self):
        assert load_structure(self.SAMPLES / "c4.json").relations == cycle_graph(4).relations
        assert load_structure(self.SAMPLES / "c5.json").relations == cycle_graph(5).relations

    def test_config(self):
        config = load_config(self.SAMPLES / "run_config.json")
        assert config.atlas == "henson:3"
        assert config.mode == "family"
