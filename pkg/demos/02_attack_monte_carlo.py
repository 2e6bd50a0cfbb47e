"""
Intercept and resend, simulated
===============================

Alice sends weak coherent pulses, Eve measures each one with her unambiguous
measurement and forwards a single photon on every conclusive outcome. Bob's
sifted key then carries a fixed error rate while Eve holds every sifted bit.
"""

# %%
import math

from phaseqkd.attack import conclusive_probability, induced_error_rate
from phaseqkd.simulate import Attack, RunConfig, run_protocol
from phaseqkd.source import SourceConfig, SourceKind

mu = 0.1
cfg = RunConfig(10**6, SourceConfig(SourceKind.P, mu), Attack.UKD, seed=1)
stats = run_protocol(cfg)

# %%
print(f"detected {stats.detected} of {stats.sent}, sifted {stats.sifted}")
expected = 0.5 * (conclusive_probability(0, mu) + conclusive_probability(1, mu))
print(f"detection rate {stats.detection_rate:.6f} +- {stats.detection_rate_se:.6f}"
      f"  (expected {expected:.6f})")
print(f"error rate     {stats.error_rate_hat:.5f} +- {stats.error_rate_se:.5f}"
      f"  (expected {induced_error_rate():.5f})")
print("Eve agrees with Alice on", stats.eve_agreement, "of the sifted key")

# %%
# Compare with an honest lossless channel: more clicks and no errors.
honest = run_protocol(RunConfig(10**6, SourceConfig(SourceKind.R, mu), seed=1))
print(f"honest detection {honest.detection_rate:.6f}  (1 - e^-mu = {1 - math.exp(-mu):.6f})")
print("honest errors", honest.errors)
