"""Replay laboratory for comparing bug-triage policies.

Replays a bug-tracker history day by day and compares five triage
policies (Actual, CBR, CosTriage, RABT, DABT).  DABT solves a
precedence-constrained multiple-knapsack integer program that trades
off developer suitability against estimated fixing cost.
"""

__version__ = "0.1.0"
