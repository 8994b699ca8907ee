"""Three blocks on a moving belt: slip, stick to the belt, and multi-contact sticking.

A weak forcing lets the blocks stick to the belt one at a time and in
pairs; a strong one keeps them slipping.
"""

from collections import Counter

from hybridslide import Belt3Params, SimConfig, make_case_study_2, simulate

for amp in (0.1, 1.0):
    P = Belt3Params(amp=amp)
    trace = simulate(make_case_study_2(P), P.initial_state(), SimConfig(t_end=100.0))
    time_in = Counter()
    for t0, t1, lab in zip(trace.t, trace.t[1:], trace.regime[1:]):
        time_in[lab] += t1 - t0
    print(f"amp={amp}: {trace.mode_switches} mode switches, {len(trace.events_of('Crossing'))} crossings")
    for lab, dur in time_in.most_common():
        print(f"   {lab:<16} {dur:6.2f} s")
