"""Implication audit over the catalog plus seeded random trivial-bundle systems."""
import argparse
import json

from stabtopo.catalog import audit_corpus
from stabtopo.conditions import audit_implications
from stabtopo.report import dumps

ap = argparse.ArgumentParser()
ap.add_argument("--random", type=int, default=20)
ap.add_argument("--seed", type=int, default=0)
ap.add_argument("--output")
args = ap.parse_args()

rep = audit_implications(audit_corpus(args.random, args.seed))
conds = ("brockett", "adversary", "coron", "mansouri", "homology")
print("instance".ljust(26) + "".join(c.ljust(10) for c in conds))
for name, v in rep.verdicts.items():
    print(name.ljust(26) + "".join(v[c].status.ljust(10) for c in conds))
print(f"contradictions {len(rep.contradictions)}, coron/brockett flags {len(rep.coron_brockett_flags)}, "
      f"independence witnesses {[w['instance'] for w in rep.independence_witnesses]}")
if args.output:
    with open(args.output, "w") as fh:
        fh.write(dumps(rep.as_dict()))
