"""Independent derivation of the frozen reference values used in the tests.

Everything here is symbolic (sympy) and shares no code with the package.
Run ``python3 tests/oracles/derive_values.py`` to print the values.
"""

import sympy as sp


def stickslip_flows():
    xm, vm, xM1, vM1, xM2, vM2, t = sp.symbols("x_m v_m x_M1 v_M1 x_M2 v_M2 t")
    m, M1, M2, k, F1, F2, A = sp.symbols("m M1 M2 k Fc1 Fc2 A")
    state = sp.Matrix([xm, vm, xM1, vM1, xM2, vM2])
    flows = {}
    # mode name -> (sign of slip 1, sign of slip 2)
    for name, (s1, s2) in {"q1": (1, 1), "q2": (-1, 1), "q3": (-1, -1), "q4": (1, -1)}.items():
        flows[name] = sp.Matrix([vm, (A - s1 * F1 - s2 * F2) / m, vM1, s1 * F1 / M1, vM2, s2 * F2 / M2])
    ga = vm - vM1
    gb = vm - vM2
    return state, flows, ga, gb, dict(m=m, M1=M1, M2=M2, F1=F1, F2=F2, A=A)


def lie(g, f, state):
    return (sp.Matrix([g]).jacobian(state) * f)[0]


def filippov(flows_list, grads, state):
    """Tangent convex combination with product weights (one parameter per manifold)."""
    al = sp.symbols(f"al0:{len(grads)}")
    # local sign columns: bit b of the column index = side of manifold b
    n = len(flows_list)
    fs = sp.zeros(len(state), 1)
    for i, f in enumerate(flows_list):
        w = 1
        for b in range(len(grads)):
            w *= al[b] if (i >> b) & 1 else (1 - al[b])
        fs += w * f
    eqs = [lie(g, fs, state) for g in grads]
    sol = sp.solve(eqs, al, dict=True)
    return fs, sol, al


def main():
    state, fl, ga, gb, P = stickslip_flows()
    vals = {P["m"]: 1, P["M1"]: 1, P["M2"]: 1, P["F1"]: sp.Rational(2, 100), P["F2"]: sp.Rational(6, 100)}
    print("column a of F (q1..q4) at A=0.05:",
          [float(lie(ga, fl[q], state).subs(vals).subs(P["A"], sp.Rational(5, 100))) for q in ("q1", "q2", "q3", "q4")])
    print("column a of F (q1..q4) at A=-0.05:",
          [float(lie(ga, fl[q], state).subs(vals).subs(P["A"], -sp.Rational(5, 100))) for q in ("q1", "q2", "q3", "q4")])
    print("column a of F (q1..q4) at A=0.01:",
          [float(lie(ga, fl[q], state).subs(vals).subs(P["A"], sp.Rational(1, 100))) for q in ("q1", "q2", "q3", "q4")])

    # sliding on a with b positive: adjacent q2 (a-) and q1 (a+)
    fs, sol, al = filippov([fl["q2"], fl["q1"]], [ga], state)
    acc = sp.simplify(fs[1].subs(sol[0]))
    print("a1 sliding v_m' symbolic:", acc)
    print("a1 sliding at A=0.05, Fc2=0.06, unit masses:",
          [float(sp.simplify(c.subs(sol[0])).subs(vals).subs(P["A"], sp.Rational(5, 100))) for c in fs[1::2]])
    # intersection: local order (a-,b-), (a+,b-), (a-,b+), (a+,b+) = q3, q4, q2, q1
    fs, sol, al = filippov([fl["q3"], fl["q4"], fl["q2"], fl["q1"]], [ga, gb], state)
    print("delta solutions:", len(sol))
    for s in sol:
        print("  v_m' =", sp.simplify(fs[1].subs(s)), " v_M1' =", sp.simplify(fs[3].subs(s)), " v_M2' =", sp.simplify(fs[5].subs(s)))

    # scalar and geometric references
    print("rk2 on x'=x from 1 with dt=0.1:", 1 + sp.Rational(1, 10) * (1 + sp.Rational(1, 20)))
    print("alpha for normal components (3, -1):", sp.Rational(3, 1) / (3 - (-1)))
    x1, x2, x3, l1, l2 = sp.symbols("x1 x2 x3 l1 l2")
    L = ((x1 - sp.Rational(2, 10)) ** 2 + (x2 + sp.Rational(3, 10)) ** 2 + (x3 - 7) ** 2) / 2 + l1 * x1 + l2 * x2
    print("stacked projection:", sp.solve([sp.diff(L, v) for v in (x1, x2, x3, l1, l2)], (x1, x2, x3, l1, l2)))
    L = ((x1 - 2) ** 2 + x2 ** 2) / 2 + l1 * (x1 ** 2 + x2 ** 2 - 1)
    print("circle projection:", sp.solve([sp.diff(L, v) for v in (x1, x2, l1)], (x1, x2, l1)))
    s = sp.symbols("s")
    print("quadratic root:", sp.solve(s ** 2 - sp.Rational(1, 4), s))
    # kappa weights for a single manifold with normal components (3, -1)
    om1, om2 = 3, -(-1) * -1  # b-signs: first flow +sgn, second -sgn
    print("kappa p=1 for (3, -1): omega", (3, -1), "weights", [sp.Rational(-1, 1) / (-1 - 3), sp.Rational(3, 1) / (3 - (-1))])


if __name__ == "__main__":
    main()
