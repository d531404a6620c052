"""
Refining a Windows verdict from DCE-RPC endpoints
==================================================

TCP/IP behavior separates Windows from everything else but barely
separates Windows releases from each other. The endpoint mapper on
port 135 does: which RPC programs are registered, and under which
bindings, shifts with version, edition and service pack. This script
parses a captured-style endpoint dump, trains the refiner on a
synthetic corpus over the 25-label space, and decodes the dump.
"""

from neuralfp.dcerpc import (
    WindowsLabelSpace,
    parse_endpoint_dump,
    report_windows,
    synthetic_windows_corpus,
    train_windows_net,
)

DUMP = """\
uuid 5A7B91F8-FF00-11D0-A9B2-00C04FB6E6FC
annotation Messenger Service
  binding ncalrpc ntsvcs
  binding ncacn_np \\PIPE\\ntsvcs
  binding ncacn_np \\PIPE\\scerpc
  binding ncadg_ip_udp

uuid 1FF70682-0A51-30E8-076D-740BE8CEE98B
  binding ncalrpc LRPC
  binding ncacn_ip_tcp 1025

uuid 378E52B0-C0A9-11CF-822D-00AA0051E40F
  binding ncalrpc LRPC
  binding ncacn_ip_tcp 1025
"""

emap = parse_endpoint_dump(DUMP, name="target host")
print(f"dump: {len(emap.programs)} programs, {emap.binding_count()} bindings")
for prog in emap.programs:
    note = f"  ({prog.annotation})" if prog.annotation else ""
    print(f"  {prog.uuid}{note}: {len(prog.bindings)} bindings")
print()

labels = WindowsLabelSpace.default()
n_editions = sum(len(v) for v in labels.editions.values())
n_sps = sum(len(v) for v in labels.service_packs.values())
print(
    f"label space: {len(labels.versions)} versions, {n_editions} editions, "
    f"{n_sps} service packs -> {labels.total} output neurons decoded as "
    f"three independent groups"
)

# Train on synthetic dumps; each (version, edition, sp) triple gets its
# own endpoint composition, with a little binding dropout as noise.
corpus = synthetic_windows_corpus(per_triple=8, seed=0, dropout=0.1)
refiner = train_windows_net(corpus)

hits = sum(
    (v.version, v.edition, v.service_pack) == triple
    for dump, triple in corpus
    for v in [refiner.classify(dump)]
)
print(f"replay accuracy on the training corpus: {hits}/{len(corpus)}")
print()

# Decode a host whose endpoint composition the refiner has learned.
host, truth = corpus[17]
verdict = refiner.classify(host)
print(f"host registered {host.binding_count()} bindings; truth is {truth}")
print(report_windows(verdict))
print()
print(f"Setting OS to Windows {verdict.version} {verdict.edition} sp{verdict.service_pack}")
print()

# The captured dump above names UUIDs outside the training schema, so
# every input neuron stays at -1 and the verdict is flagged.
stranger = refiner.classify(emap)
print(f"captured dump: low confidence = {stranger.low_confidence}")
