"""The jump/triangle pair: a divergence signature under frequency truncation.

The odd sawtooth (jump) is discontinuous and its spectrum decays like 1/w, so
its truncated sup-norm sums gain a near-constant increment per cutoff
doubling -- the log-divergence signature.  Its modulus is the triangle, whose
w^-2 spectrum makes the same sums Cauchy.  No finite computation exhibits an
infinite norm; the non-Cauchy increments are the operational counterexample.
"""

from modspace.verify import counterexample_probe

rep = counterexample_probe()
partials = rep.details["partials"]
increments = rep.details["increments"]

print("cutoffs:", rep.params["W"])
for name in ("triangle", "jump", "gaussian"):
    ps = ", ".join(f"{p:.4f}" for p in partials[name])
    ds = ", ".join(f"{d:.4f}" for d in increments[name])
    print(f"{name:9s} partial sums [{ps}]  increments [{ds}]")

tri, jmp = increments["triangle"], increments["jump"]
print(f"\ntriangle: last/first increment = {tri[-1] / tri[0]:.3f}  (Cauchy: -> 0)")
print(f"jump:     increments hover near {sum(jmp) / len(jmp):.3f} per doubling (log growth)")
print(f"gaussian control converges to its full norm {rep.details['gaussian_full_norm']:.6f}")
print("probe verdict:", "signature confirmed" if rep.passed else "NOT confirmed")
