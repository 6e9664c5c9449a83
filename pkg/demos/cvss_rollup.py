"""Score single vectors, then roll up a small architecture two ways.

Run with ``python demos/cvss_rollup.py``.
"""

from defii.cvss import roll_up, score_vector

for vector in (
    "CVSS:3.1/AV:P/AC:H/PR:H/UI:R/S:U/C:N/I:N/A:L",
    "CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H",
):
    print(f"{vector} -> {score_vector(vector)}")

# Three elements, long-form values as they appear in model slots.
arrays = {
    "av_inherited": ["Physical", "Network", "Local"],
    "ac_inherited": ["High", "Low", "High"],
    "pr_inherited": ["High"],  # one binding broadcasts under max-score
    "ui_inherited": ["Required", "Required", "Required"],
    "s_inherited": ["Changed", "Unchanged", "Unchanged"],
    "c_inherited": ["None", "Low", "None"],
    "i_inherited": ["None", "None", "Low"],
    "a_inherited": ["Low", "Low", "Low"],
}
for strategy in ("worst-case", "max-score"):
    r = roll_up(arrays, strategy)
    print(f"{strategy:>10}: {r.base_score}  {r.vector_string}")
