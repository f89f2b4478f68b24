"""
Time-indexed ILP export and the enumeration oracle
==================================================

The integer program is written in LP format for an external solver.  For a
desk-sized instance the optimum is also available by enumeration, which
gives something to check solver output against.  If highspy is installed
the exported file is solved here as well.
"""

import os
import tempfile

from gridmend import InstanceSpec, build_ilp, exact_enum, export_model, forest_from_network, gen_instance
from gridmend.ilp import schedule_from_solution
from gridmend.schedule import schedule_harm

net = gen_instance(InstanceSpec(topology="ieee13", damage=4, seed=3))
forest = forest_from_network(net)
model = build_ilp(net, 2)
text = export_model(model)
print(f"horizon {model.horizon}, {model.n_variables} variables, {len(model.rows)} rows")
print("\n".join(line[:100] for line in text.splitlines()[:8]))

opt = exact_enum(forest, 2)
print("enumeration optimum:", opt.harm, "after", opt.explored, "search nodes")

try:
    import highspy
except ImportError:
    highspy = None

if highspy is not None:
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "model.lp")
        with open(path, "w") as fh:
            fh.write(text)
        h = highspy.Highs()
        h.setOptionValue("output_flag", False)
        h.readModel(path)
        h.run()
        values = dict(zip(h.getLp().col_names_, h.getSolution().col_value))
    print("solver objective:", h.getInfo().objective_function_value)
    sched = schedule_from_solution(model, values, forest)
    print("re-scored solver schedule:", schedule_harm(forest, sched))
