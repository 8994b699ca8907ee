"""Full run of the two-contact stick-slip model with the published parameters.

Prints the event log and writes ``stickslip.svg`` with the three velocities.
"""

import sys

from hybridslide import SimConfig, StickSlip2Params, make_case_study_1, simulate
from hybridslide.svgplot import trace_svg

amp = float(sys.argv[1]) if len(sys.argv) > 1 else 1.0
P = StickSlip2Params(A_amp=amp)
model = make_case_study_1(P)
trace = simulate(model, P.initial_state(), SimConfig(t_end=120.0))

for e in trace.events:
    print(f"t={e.t:8.3f}  {e.kind:<13} {','.join(e.manifolds):<5} {e.from_} -> {e.to}")
print(f"{trace.n_steps} steps, {trace.mode_switches} mode switches")

series = {v: trace.column(v) for v in ("v_m", "v_M1", "v_M2")}
with open("stickslip.svg", "w") as fh:
    fh.write(trace_svg(trace.t, series, [(e.t, e.kind) for e in trace.events], title=f"stickslip2, A={amp}"))
