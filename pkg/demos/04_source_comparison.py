"""
Randomized phase versus known phase
===================================

The same pulse energy gives two different stories. Averaged over a random
phase, a coherent state is a Poisson mixture of photon numbers. With the phase
known, Eve can work on the coherent state itself.
"""

# %%
import numpy as np

from phaseqkd.cli import cmd_analyze
from phaseqkd.source import photon_statistics, sample_photon_number

mu = 0.02
stats = photon_statistics(mu)
print(f"p0 {stats.p0:.6f}  p1 {stats.p1:.6f}  pM {stats.pM:.3e}")

# %%
draws = sample_photon_number(mu, np.random.default_rng(5), 10**6)
print("sampled multiphoton fraction", np.mean(draws >= 2))

# %%
report = cmd_analyze(mu, 0.146)
print("source R:", report["source_R"]["verdict_R"].value)
print("source P:", report["source_R"]["verdict_P"].value,
      "| Eve's knowledge of the sifted key:", report["source_P"]["eve_knowledge"])
