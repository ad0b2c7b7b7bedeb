"""
The five-family property matrix
===============================

Runs every verification suite behind the matrix (about a minute with four
threads; set MAXGRAPH_THREADS) and prints one verdict per cell.
"""

from maxgraph.harness import Context, table1_report, threads_from_env
from maxgraph.harness.table1 import COLUMNS

rep = table1_report(Context(seed=0), threads_from_env(default=4))
print(f"{'':10s}" + "".join(f"{c:>20s}" for c in COLUMNS))
for fam, row in rep.rows.items():
    print(f"{fam:10s}" + "".join(f"{row[c].verdict + ('!' if row[c].failure else ''):>20s}"
                                 for c in COLUMNS))
print("failure cells:", len(rep.failures))
for imp in rep.implications:
    print(f"  {imp['from']:>9s} => {imp['to']:<9s} {imp['entry']:9s} {imp['status']}")
