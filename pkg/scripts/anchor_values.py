"""Print the headline numbers of the flux-qubit converter at its default bias.

    python3 scripts/anchor_values.py
"""

import numpy as np

from deltaqed import circuit, lindblad, pulse, sweep
from deltaqed.config import Config, resolve
from deltaqed.constants import to_angular, to_ghz


def main():
    s = resolve(Config())
    spec, params = s.spectrum, s.circuit_params
    rates = circuit.decay_rates(params, spec)
    print(f"f = {params.flux}")
    print(f"levels (GHz): w21={to_ghz(spec.omega_21):.4f} w31={to_ghz(spec.omega_31):.4f} w32={to_ghz(spec.omega_32):.4f}")
    print(f"|n21|={spec.abs_n(2, 1):.4f} |n31|={spec.abs_n(3, 1):.4f} |n32|={spec.abs_n(3, 2):.4f}")
    print(f"rates (GHz): G31={to_ghz(rates.gamma_31):.5f} G21={to_ghz(rates.gamma_21):.5f} G32={to_ghz(rates.gamma_32):.5f}")

    rabi = s.drive.rabi
    print(f"optimal drive: Omega/2pi = {to_ghz(rabi) * 1e3:.2f} MHz, "
          f"V_c = {circuit.voltage_for_rabi(params, spec, rabi):.3e} V")
    print(f"control photons per 2pi/G32: N = {lindblad.control_photon_number(rabi, rates.gamma_32):.1f}")

    for d in (0.005, 0.05):
        p = pulse.gaussian_pulse(s.transitions.omega_31, to_angular(d))
        out = pulse.convert_down(p, s.rates, s.transitions, s.drive)
        print(f"pulse d={d} GHz: P_dc = {out.efficiency * 100:.2f}%")

    lr = lindblad.LindbladRates.from_emitter(s.rates, s.gamma_32)
    for x in (0.01, 0.5, 1.0, 2.0):
        _, ta, tb = lindblad.saturation_sweep(lr, rabi, [x * lr.gamma_31])[0]
        print(f"Omega_p = {x:4} G31: |Ta|^2 = {ta:.4f}, |Tb|^2 = {tb:.4f}")

    for window, direction in (((0.47, 0.50), "down"), ((0.50, 0.53), "up")):
        res = sweep.find_optimal_bias(params, window, direction, 0.0, 0.0)
        print(f"{direction}: f* = {res.flux:.5f}, efficiency {res.efficiency * 100:.2f}%, "
              f">90% band [{res.band[0]:.4f}, {res.band[1]:.4f}]")
    return 0


if __name__ == "__main__":
    np.set_printoptions(precision=5)
    raise SystemExit(main())
