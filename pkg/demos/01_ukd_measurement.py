"""
Building Eve's unambiguous key measurement
==========================================

A phase-coherent source emits four coherent states. Restricted to at most one
photon they live in a three-dimensional space spanned by the vacuum and the two
polarization modes. Eve builds a three-outcome measurement that names the key
bit with certainty or gives up.
"""

# %%
import numpy as np

from phaseqkd import attack, source
from phaseqkd.linalg import min_eigenvalue

mu = 0.1
signals = source.bb84_signal_set(mu)
for (bit, basis), s in signals.items():
    print(f"bit {bit} basis {basis.name}: {np.round(s.amplitudes.real, 6)}  norm^2 {s.norm2():.6f}")

# %%
# The missing weight in each norm is the chance of two or more photons.
print("multiphoton probability:", source.photon_statistics(mu).pM)

# %%
# The two vectors orthogonal to the bit-0 pair and to the bit-1 pair.
ukd = attack.build_ukd_povm(mu)
print("v0perp", np.round(ukd.v0perp.amplitudes.real, 6))
print("v1perp", np.round(ukd.v1perp.amplitudes.real, 6))

# %%
# Each element is positive and they sum to the identity.
for name in attack.OUTCOMES:
    print(name, "min eigenvalue", f"{min_eigenvalue(ukd.povm[name]):+.3e}")

# %%
# Outcome probabilities per signal. The leftover weight is the multiphoton part.
for (bit, basis) in signals:
    p = np.clip(ukd.outcome_probabilities(bit, basis), 0, None)
    print(f"bit {bit} {basis.name}: BIT0 {p[0]:.6f}  BIT1 {p[1]:.6f}  DK {p[2]:.6f}")

# %%
# Bit 0 is identified a little more often than bit 1.
for bit in (0, 1):
    print(f"bit {bit}: operator {ukd.conclusive_probability(bit):.9f}"
          f"  closed form {attack.conclusive_probability(bit, mu):.9f}")
