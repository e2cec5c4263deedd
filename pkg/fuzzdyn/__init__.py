"""
fuzzdyn: a laboratory for the hyperspace and Zadeh extensions of a dynamical system.

It builds compact-set and fuzzy-set lifts of point maps, measures them with the
Hausdorff metric and the four fuzzy metrics (supremum, Skorokhod, sendograph,
endograph) and estimates Li-Yorke, mean Li-Yorke and distributional chaos from
finite orbit segments.
"""
import os

import loguru
import yaml

__version__ = "0.1.0"

logger = loguru.logger

cdir = os.path.dirname(os.path.abspath(__file__))
with open(os.path.join(cdir, 'config.yml'), 'r') as f:
    config = yaml.load(f, Loader=yaml.FullLoader)
