"""
Worked systems with known behaviour: the three column shifts over density
sets and the weighted backward shift, each with a routine that checks its
claims and returns a ClaimReport.
"""
