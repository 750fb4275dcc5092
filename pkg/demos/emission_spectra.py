"""Emission spectra: side peaks at slow cutoffs and the negative-frequency zero.

Computes the stationary emission spectrum from the two-time correlation of
the raising and lowering operators.  A slowly fluctuating field splits the
line into a resonance peak and a low-frequency side peak; the bath spectrum
under the full coupling vanishes exactly at minus the level splitting.
Runs in about a minute.
"""

import numpy as np

import heomfield as hf

NO_BATH = hf.BathParams(0.0, 1.0, enabled=False)
NO_FIELD = hf.StochasticField.disabled()


def spectrum_for(sim):
    cfg = hf.SpectrumConfig(
        sim=sim,
        tau_max=150.0,
        dtau=0.05,
        omega_grid=np.linspace(-2.0, 3.0, 1001),
        steady_method=hf.SteadyMethod.NULLSPACE,
    )
    _, spec = hf.compute_spectrum(cfg)
    return spec


def peaks_of(spec, floor=0.05):
    s = spec.s_normalized
    found = [
        k
        for k in range(1, len(s) - 1)
        if s[k] > s[k - 1] and s[k] >= s[k + 1] and s[k] > floor
    ]
    return [(spec.omega[k], s[k]) for k in found]


def field_side_peak():
    print("Field spectra at delta_sq=0.6: peak positions against the cutoff")
    for gamma in (0.1, 0.2, 0.4):
        sim = hf.SimConfig(
            bath=NO_BATH,
            field=hf.StochasticField.uniform(delta_sq=0.6, gamma=gamma),
            depth=20,
        )
        spec = spectrum_for(sim)
        peaks = ", ".join(f"{w:+.2f} (height {h:.2f})" for w, h in peaks_of(spec))
        print(f"gamma={gamma}: {peaks}")
    print("At this coupling the low-frequency peak dominates while the")
    print("resonance remnant sits far above the level splitting; faster")
    print("cutoffs feed the upper peak back up.")
    print()


def bath_zero_point():
    print("Bath spectrum, full coupling, gamma=0.2, delta_sq=0.6, beta=0.1")
    sim = hf.SimConfig(
        bath=hf.BathParams(0.6, 0.2, beta=0.1),
        field=NO_FIELD,
        depth=16,
    )
    spec = spectrum_for(sim)
    k = int(np.searchsorted(spec.omega, -1.0))
    peak = spec.omega[int(np.argmax(spec.s_normalized))]
    print(f"main peak at omega={peak:+.3f}")
    print(f"normalized intensity at omega=-1: {abs(spec.s_normalized[k]):.2e}")
    print("The spectrum vanishes at minus the level splitting; the ladder")
    print("coupling has no such zero.")


if __name__ == "__main__":
    field_side_peak()
    bath_zero_point()
