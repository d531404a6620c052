"""Observation and endpoint-map encodings for the neural pipeline.

Nmap observations become flat vectors of 568 neurons: one 75-wide block per
TCP test T1..T7, a 27-wide block for TSeq and a 16-wide block for PU.
Categorical data uses 1 (present/true) and -1 (absent/false); an absent test
or field contributes 0 at every position it owns, so "no data" is neutral.
Window sizes and the other numeric fields enter as their integer values and
are rescaled later by the preprocessing stage.

DCE-RPC endpoint maps are encoded against a corpus-derived schema: one
neuron per distinct program UUID and one per distinct binding, 1 when
present and -1 when not.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TOTAL_NEURONS = 568
TCP_BLOCK = 75
TSEQ_BLOCK = 27
PU_BLOCK = 16

TCP_TESTS = ("T1", "T2", "T3", "T4", "T5", "T6", "T7")
TSEQ_BASE = 7 * TCP_BLOCK
PU_BASE = TSEQ_BASE + TSEQ_BLOCK

# TCP flag letters as they appear in Flags values. The reserved bit was
# written B in first-gen databases; both spellings land on the ECE neuron.
FLAG_NAMES = ("ECE", "URG", "ACK", "PSH", "RST", "SYN", "FIN")
_FLAG_SLOT = {"B": 0, "E": 0, "U": 1, "A": 2, "P": 3, "R": 4, "S": 5, "F": 6}

OPTION_KINDS = ("EOL", "MAXSEG", "NOP", "TIMESTAMP", "WINDOW", "ECHOED")
_OPTION_SLOT = {"L": 0, "M": 1, "N": 2, "T": 3, "W": 4, "E": 5}
OPTION_GROUPS = 10

SEQ_CLASSES = ("TD", "64K", "RI", "TR", "C", "i800")
IPID_CLASSES = ("I", "BI", "RPI", "RD", "C", "Z")
IPID_LABELS = ("INCR", "BROKEN INCR", "RPI", "RD", "CONSTANT", "ZERO")
TS_CLASSES = ("0", "2HZ", "100HZ", "1000HZ", "U")
TS_LABELS = ("ZERO", "2HZ", "100HZ", "1000HZ", "UNSUPPORTED")
PU_OUTCOME_LABELS = {"0": "ZERO", "E": "EQ", "F": "FAIL"}

# Intra-block offsets. TCP tests: field markers and categories first, ten
# option groups of six, window size last.
_ACK_OFF = 0
_SEQ_OFF = {"S": 1, "S++": 2, "O": 3}
_DF_OFF = 4
_RESP_OFF = 5
_FLAGS_OFF = 6
_FLAG0_OFF = 7
_OPT0_OFF = 14
_W_OFF = 74

# TSeq offsets
_TS_CLASS_FIELD = 0
_TS_CLASS0 = 1
_TS_GCD = 7
_TS_IPID_FIELD = 8
_TS_IPID0 = 9
_TS_SI = 15
_TS_TS_FIELD = 16
_TS_TS0 = 17
_TS_VAL = 22
_TS_PAD0 = 23

# PU offsets: outcome triples for UCK/RID/RIPCK, pair for DAT, numerics.
_PU_DF = 0
_PU_UCK = {"0": 1, "F": 2, "E": 3}
_PU_RID = {"E": 4, "F": 5, "0": 6}
_PU_RIPCK = {"E": 7, "F": 8, "0": 9}
_PU_ULEN = 10
_PU_DAT = {"E": 11, "F": 12}
_PU_RIPTL = 13
_PU_TOS = 14
_PU_IPLEN = 15


class EncodeError(ValueError):
    """Raised when an observation value cannot be encoded."""


def _hex(test: str, name: str, value: str) -> float:
    try:
        return float(int(value, 16))
    except ValueError:
        raise EncodeError(f"{test}.{name} not hexadecimal: {value!r}") from None


def _yes_no(test: str, name: str, value: str) -> float:
    if value == "Y":
        return 1.0
    if value == "N":
        return -1.0
    raise EncodeError(f"{test}.{name} must be Y or N, got {value!r}")


def _one_hot(vec, base: int, slots: int, hit: int | None):
    vec[base:base + slots] = -1.0
    if hit is not None:
        vec[base + hit] = 1.0


def _encode_tcp(vec, base: int, test: str, fields: dict[str, str]) -> None:
    resp = fields.get("Resp")
    vec[base + _RESP_OFF] = _yes_no(test, "Resp", resp) if resp is not None else 1.0
    if "ACK" in fields:
        vec[base + _ACK_OFF] = 1.0
        hit = _SEQ_OFF.get(fields["ACK"])
        _one_hot(vec, base + 1, 3, (hit - 1) if hit else None)
    if "DF" in fields:
        vec[base + _DF_OFF] = _yes_no(test, "DF", fields["DF"])
    if "Flags" in fields:
        slots = [_FLAG_SLOT[c] for c in fields["Flags"] if c in _FLAG_SLOT]
        vec[base + _FLAGS_OFF] = float(len(slots))
        vec[base + _FLAG0_OFF:base + _FLAG0_OFF + 7] = -1.0
        for s in slots:
            vec[base + _FLAG0_OFF + s] = 1.0
    if "Ops" in fields:
        letters = fields["Ops"]
        for g in range(OPTION_GROUPS):
            hit = _OPTION_SLOT.get(letters[g]) if g < len(letters) else None
            _one_hot(vec, base + _OPT0_OFF + 6 * g, 6, hit)
    if "W" in fields:
        vec[base + _W_OFF] = _hex(test, "W", fields["W"])


def _encode_tseq(vec, fields: dict[str, str]) -> None:
    base = TSEQ_BASE
    if "Class" in fields:
        vec[base + _TS_CLASS_FIELD] = 1.0
        hit = SEQ_CLASSES.index(fields["Class"]) if fields["Class"] in SEQ_CLASSES else None
        _one_hot(vec, base + _TS_CLASS0, 6, hit)
    if "gcd" in fields:
        vec[base + _TS_GCD] = _hex("TSeq", "gcd", fields["gcd"])
    if "IPID" in fields:
        vec[base + _TS_IPID_FIELD] = 1.0
        hit = IPID_CLASSES.index(fields["IPID"]) if fields["IPID"] in IPID_CLASSES else None
        _one_hot(vec, base + _TS_IPID0, 6, hit)
    if "SI" in fields:
        vec[base + _TS_SI] = _hex("TSeq", "SI", fields["SI"])
    if "TS" in fields:
        vec[base + _TS_TS_FIELD] = 1.0
        hit = TS_CLASSES.index(fields["TS"]) if fields["TS"] in TS_CLASSES else None
        _one_hot(vec, base + _TS_TS0, 5, hit)
    if "VAL" in fields:
        vec[base + _TS_VAL] = _hex("TSeq", "VAL", fields["VAL"])


def _outcome(vec, base: int, slots: dict[str, int], test: str, name: str, value: str) -> None:
    if value not in slots:
        raise EncodeError(f"{test}.{name} outcome must be one of {sorted(slots)}, got {value!r}")
    for off in slots.values():
        vec[base + off] = -1.0
    vec[base + slots[value]] = 1.0


def _encode_pu(vec, fields: dict[str, str]) -> None:
    base = PU_BASE
    if "DF" in fields:
        vec[base + _PU_DF] = _yes_no("PU", "DF", fields["DF"])
    for name, slots in (("UCK", _PU_UCK), ("RID", _PU_RID), ("RIPCK", _PU_RIPCK), ("DAT", _PU_DAT)):
        if name in fields:
            _outcome(vec, base, slots, "PU", name, fields[name])
    for name, off in (("ULEN", _PU_ULEN), ("RIPTL", _PU_RIPTL), ("TOS", _PU_TOS), ("IPLEN", _PU_IPLEN)):
        if name in fields:
            vec[base + off] = _hex("PU", name, fields[name])


def encode_observation(obs) -> np.ndarray:
    """Encode an Observation into the 568-neuron vector."""
    vec = np.zeros(TOTAL_NEURONS)
    for i, test in enumerate(TCP_TESTS):
        fields = obs.tests.get(test)
        if fields:
            _encode_tcp(vec, i * TCP_BLOCK, test, fields)
    if obs.tests.get("TSeq"):
        _encode_tseq(vec, obs.tests["TSeq"])
    if obs.tests.get("PU"):
        _encode_pu(vec, obs.tests["PU"])
    return vec


def _tcp_labels() -> list[str]:
    labels = ["ACK FIELD", "SEQ S", "SEQ S++", "SEQ O", "DF FIELD", "RESP YES", "FLAGS FIELD"]
    labels += [f"FLAG {n}" for n in FLAG_NAMES]
    for g in range(OPTION_GROUPS):
        labels += [f"TCP OPT {g} {kind}" for kind in OPTION_KINDS]
    labels.append("W FIELD")
    return labels


def _tseq_labels() -> list[str]:
    labels = ["CLASS FIELD"]
    labels += [f"SEQ {c.upper()}" for c in SEQ_CLASSES]
    labels.append("GCD FIELD")
    labels.append("IPID FIELD")
    labels += [f"IPID SEQ {n}" for n in IPID_LABELS]
    labels.append("SI FIELD")
    labels.append("TS FIELD")
    labels += [f"TS SEQ {n}" for n in TS_LABELS]
    labels.append("VAL FIELD")
    labels += [f"PAD {i}" for i in range(4)]
    return labels


def _pu_labels() -> list[str]:
    labels = [""] * PU_BLOCK
    labels[_PU_DF] = "DF FIELD"
    for name, slots in (("UCK", _PU_UCK), ("RID", _PU_RID), ("RIPCK", _PU_RIPCK), ("DAT", _PU_DAT)):
        for value, off in slots.items():
            labels[off] = f"{name} {PU_OUTCOME_LABELS[value]}"
    labels[_PU_ULEN] = "ULEN FIELD"
    labels[_PU_RIPTL] = "RIPTL FIELD"
    labels[_PU_TOS] = "TOS FIELD"
    labels[_PU_IPLEN] = "IPLEN FIELD"
    return labels


def layout_table() -> list[tuple[int, str, str]]:
    """(index, test id, feature label) for all 568 positions."""
    rows = []
    tcp = _tcp_labels()
    for i, test in enumerate(TCP_TESTS):
        rows += [(i * TCP_BLOCK + off, test, label) for off, label in enumerate(tcp)]
    rows += [(TSEQ_BASE + off, "TSeq", label) for off, label in enumerate(_tseq_labels())]
    rows += [(PU_BASE + off, "PU", label) for off, label in enumerate(_pu_labels())]
    return rows


def feature_label(index: int) -> str:
    """Human-readable name of one vector position, e.g. 'T1: W FIELD'."""
    _, test, label = layout_table()[index]
    return f"{test}: {label}"


# ---------------------------------------------------------------------------
# DCE-RPC endpoint maps


@dataclass(frozen=True)
class RpcProgram:
    """One registered RPC program and where it can be reached."""

    uuid: str
    annotation: str | None
    bindings: tuple[tuple[str, str | None], ...]


@dataclass(frozen=True)
class EndpointMap:
    """Programs exposed by one host, in dump order."""

    name: str | None
    programs: tuple[RpcProgram, ...]

    def binding_count(self) -> int:
        return sum(len(p.bindings) for p in self.programs)


@dataclass(frozen=True)
class EndpointSchema:
    """Neuron assignment for UUIDs and bindings, in first-seen order."""

    uuid_index: dict[str, int]
    binding_index: dict[tuple[str, str, str | None], int]

    @property
    def size(self) -> int:
        return len(self.uuid_index) + len(self.binding_index)

    def labels(self) -> list[str]:
        out = [""] * self.size
        for uuid, i in self.uuid_index.items():
            out[i] = f"uuid {uuid}"
        for (uuid, proto, ep), i in self.binding_index.items():
            out[i] = f"{uuid} {proto} {ep or ''}".rstrip()
        return out


def build_endpoint_schema(maps: list[EndpointMap]) -> EndpointSchema:
    """Assign one neuron per distinct UUID and per distinct binding."""
    uuid_index: dict[str, int] = {}
    binding_index: dict[tuple[str, str, str | None], int] = {}
    nxt = 0
    for emap in maps:
        for prog in emap.programs:
            if prog.uuid not in uuid_index:
                uuid_index[prog.uuid] = nxt
                nxt += 1
            for proto, endpoint in prog.bindings:
                key = (prog.uuid, proto, endpoint)
                if key not in binding_index:
                    binding_index[key] = nxt
                    nxt += 1
    return EndpointSchema(uuid_index, binding_index)


def encode_endpoint_map(schema: EndpointSchema, emap: EndpointMap) -> np.ndarray:
    """1 at present UUID/binding neurons, -1 elsewhere.

    A binding never seen by the schema contributes nothing beyond its UUID
    neuron; unknown UUIDs are ignored entirely.
    """
    vec = np.full(schema.size, -1.0)
    for prog in emap.programs:
        idx = schema.uuid_index.get(prog.uuid)
        if idx is None:
            continue
        vec[idx] = 1.0
        for proto, endpoint in prog.bindings:
            bidx = schema.binding_index.get((prog.uuid, proto, endpoint))
            if bidx is not None:
                vec[bidx] = 1.0
    return vec
