"""Population dynamics in the stochastic field, hierarchy against sampling.

Evolves the initially excited system under the three-process field for a few
cutoffs and prints the population at selected times, next to a Monte Carlo
average over exactly sampled noise paths with its statistical error.  The
two columns agree within a few standard errors at every time.  Runs in
about a minute; most of it is the Monte Carlo average.
"""

import numpy as np

import heomfield as hf
from heomfield.montecarlo import mc_evolve

NO_BATH = hf.BathParams(0.0, 1.0, enabled=False)
EXCITED = np.diag([1.0, 0.0]).astype(complex)
CHECK_TIMES = (2.0, 5.0, 10.0, 20.0, 30.0)


def compare(gamma, delta_sq, n_traj=4000):
    field = hf.StochasticField.uniform(delta_sq=delta_sq, gamma=gamma)
    sim = hf.SimConfig(
        bath=NO_BATH, field=field, depth=16, dt=0.02, t_max=30.0, sample_stride=5
    )
    traj = hf.evolve(sim)
    mc = mc_evolve(field, EXCITED, 30.0, 0.02, n_traj, 2024, sample_stride=5)
    print(f"field gamma={gamma}, delta_sq={delta_sq}, {n_traj} noise paths")
    print(f"{'t':>6} {'hierarchy':>10} {'sampled':>10} {'stderr':>9}")
    for t in CHECK_TIMES:
        k = int(np.argmin(np.abs(traj.times - t)))
        print(
            f"{traj.times[k]:6.1f} {traj.population[k]:10.6f} "
            f"{mc.population[k]:10.6f} {mc.population_stderr[k]:9.1e}"
        )
    gap = np.max(np.abs(traj.population - mc.population))
    print(f"largest gap over the whole window {gap:.2e}")
    print()


if __name__ == "__main__":
    for gamma in (0.2, 0.4, 0.8):
        compare(gamma, 1.6)
    print("Faster field fluctuations (larger cutoff) wash out the early dip")
    print("and carry the population to one half sooner.")
