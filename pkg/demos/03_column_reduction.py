"""
Shrinking 568 neurons to a few informative dimensions
======================================================

The raw observation encoding is wide and redundant: most of a
homogeneous corpus never varies, and many columns move in lockstep.
The reduction drops constant and linearly dependent columns from the
correlation matrix, then PCA re-bases what is left, keeping at least
98% of the variance.

The study corpus here is a single OS family (OpenBSD) whose versions
all answer the later probes identically, so entire test blocks carry
nothing and must disappear.
"""

from neuralfp.corpus import openbsd_study_database
from neuralfp.datagen import generate_dataset
from neuralfp.encoding import TOTAL_NEURONS, feature_label
from neuralfp.preprocess import fit_pipeline, reduction_report
from neuralfp.signatures import parse_fingerprint_db

db = parse_fingerprint_db(openbsd_study_database())
print(f"study corpus: {len(db)} OpenBSD versions")

ds = generate_dataset(db, None, 1500, stage="version:OpenBSD", seed=5)
pipe = fit_pipeline(ds.inputs)

labels = [feature_label(i) for i in range(TOTAL_NEURONS)]
print()
print(reduction_report(pipe, labels))

# Sanity check the headline: no T5 column survives.
t5 = [i for i in pipe.kept if 300 <= i < 375]
print()
print(f"T5 columns kept: {len(t5)} (the block spans indices 300..374)")
print(f"projection: {len(pipe.kept)} kept columns -> {pipe.output_dim} components")
