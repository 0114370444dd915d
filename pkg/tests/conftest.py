import re
import xml.etree.ElementTree as ET

import hypothesis
import numpy as np
import pytest

from sparse_iroa.ensemble import EnsembleSpec, make_problem

hypothesis.settings.register_profile("default", max_examples=60, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.load_profile("default")


def planted(m, n, k, seed, sign_mode="gaussian"):
    return make_problem(EnsembleSpec(m=m, n=n, k=k, trials=1, seed=seed, sign_mode=sign_mode), 0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


SVG_NS = "{http://www.w3.org/2000/svg}"


def svg_series(text):
    """Map series name -> (list of (x, y) vertices, marker count) from a plot written by sparse_iroa.svg."""
    root = ET.fromstring(text)
    out = {}
    for g in root.iter(f"{SVG_NS}g"):
        gid = g.get("id", "")
        if not gid.startswith("series-"):
            continue
        path = g.find(f"{SVG_NS}path")
        nums = [float(v) for v in re.findall(r"-?\d+(?:\.\d+)?", path.get("d"))]
        out[gid[len("series-"):]] = (list(zip(nums[::2], nums[1::2])), len(list(g.iter(f"{SVG_NS}use"))))
    return out


def svg_legend_text(text):
    root = ET.fromstring(text)
    legend = next(g for g in root.iter(f"{SVG_NS}g") if g.get("id") == "legend")
    return [t.text for t in legend.iter(f"{SVG_NS}text")]
