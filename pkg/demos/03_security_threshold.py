"""
How bright may a randomized source be?
======================================

With phase randomization the multiphoton pulses are the only leak. Their share
of the detections bounds how far the phase error rate can drift from the bit
error rate, and both must stay below the two-way threshold of 0.189.
"""

# %%
from phaseqkd.attack import induced_error_rate
from phaseqkd.cli import cmd_sweep
from phaseqkd.security import max_secure_mu, secure_verdict

delta = 0.146
print(f"largest secure mu at delta = {delta}: {max_secure_mu(delta):.6f}")
print(f"largest secure mu at the one-way threshold: {max_secure_mu(0.110):.6f}")

# %%
# One report at a mu below the limit. The bit error rate Eve's attack
# induces is exactly what this source tolerates.
report = secure_verdict(induced_error_rate(), 0.02)
print(report.verdict_R.value, report.verdict_P.value, f"Delta = {report.big_delta:.4f}")

# %%
for row in cmd_sweep([0.005 * k for k in range(1, 9)], delta):
    print(f"mu {row['mu']:.3f}  Delta {row['big_delta']:.4f}  "
          f"delta_p <= {row['delta_p_bound']:.4f}  {row['verdict_R']}")
