"""
Why best-fit matching breaks: the sparse-signature pathology
=============================================================

Classic fingerprint matching scores a host against every database entry
as matched rules / considered rules. A signature with a single rule can
therefore outrank a rich, specific one the moment the host disagrees
with any single field of the rich entry. This script constructs exactly
that situation and shows a trained neural hierarchy shrugging it off.
"""

from neuralfp.corpus import demo_database, pathology_observation
from neuralfp.encoding import encode_observation
from neuralfp.hierarchy import HierarchyConfig, classify_vector, train_hierarchy
from neuralfp.signatures import best_fit, format_observation, parse_fingerprint_db

db = parse_fingerprint_db(demo_database())

# The observation is drawn from "Linux Kernel 2.6.8" and then nudged so
# that exactly one of that signature's rules stops matching.
obs = pathology_observation(seed=0)
print("observed host:")
print(format_observation(obs))
print()

# Best fit: the one-rule "RetroBox Game Console" entry matches perfectly,
# the true signature loses a single rule and drops below it.
print("best-fit ranking:")
for name, score in best_fit(db, obs, top=5):
    print(f"  {score:.5f}  {name}")
print()

# The hierarchy was trained on Monte Carlo samples of the same database;
# one off rule barely moves the encoded vector.
model = train_hierarchy(db, cfg=HierarchyConfig(seed=7))
result = classify_vector(model, encode_observation(obs))
print(f"neural verdict: {result.verdict}")
print(f"stages consulted: {' -> '.join(result.stage_trace)}")
