"""
Bringing in a learned metric
============================

Learned perceptual metrics are computed outside this package.  Their
values can be supplied as a CSV keyed by clip and frame, after which they
are summarized like any built-in metric.  Lower is better for this kind of
distance.
"""

import tempfile
from pathlib import Path

import numpy as np

from progbench.evaluation import evaluate_trajectory, summarize
from progbench.metrics import EXTERNAL, CsvMetric

values = [0.335, 0.330, 0.323, 0.319, 0.316, 0.318, 0.316, 0.317, 0.317]
path = Path(tempfile.mkdtemp()) / "perceptual.csv"
path.write_text("clip_id,frame,value\n" + "".join(
    f"clip_000000,{t},{v}\n" for t, v in enumerate(values, start=1)))

# %%
# The image arguments are unused by a CSV source; only clip and frame matter.
frames = [np.zeros((16, 16, 3))] * 9
curve = evaluate_trajectory(frames[0], frames, metrics=(EXTERNAL,),
                            external=CsvMetric(path), clip_id="clip_000000")
summary = summarize([curve])
print("best frame:", summary.best_frame[EXTERNAL])
print("net improvement:", round(summary.net_delta[EXTERNAL], 6))
print("share of steps that do not get worse:", summary.monotone_fraction[EXTERNAL])
