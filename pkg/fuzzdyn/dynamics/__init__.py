"""
In this package we define the dynamics: metric universes and their maps, the
hyperspace of compact sets, step fuzzy sets with their four metrics, the
finite-horizon chaos classifier and the proximality/sensitivity searches.
"""
