"""A single impedance link, poked three ways.

The whole simulator rests on one building block: a virtual mass-damper-
spring whose displacement nudges a follower's goal. This script steps that
block directly so you can see the shape of its response before any
formation logic gets involved.

Run:  python3 demos/01_link_response.py
"""

import numpy as np

from swarmlink import (ImpedanceParams, LinkState, build_discrete_model,
                       clamp_correction, classify_damping, step_link)

RATE = 80.0
NOMINAL = ImpedanceParams(mass=1.9, damping=12.6, stiffness=21.0)


def run_step(params, force_n, seconds):
    model = build_discrete_model(params, 1.0 / RATE)
    state = LinkState.zero()
    force = np.array([force_n, 0.0, 0.0])
    out = []
    for _ in range(int(seconds * RATE)):
        state = step_link(state, model, force)
        out.append(state.disp[0])
    return np.array(out)


def sparkline(xs, width=60):
    lo, hi = min(xs.min(), 0.0), max(xs.max(), 0.0)
    span = hi - lo or 1.0
    cells = " .:-=+*#%@"
    idx = np.linspace(0, len(xs) - 1, width).astype(int)
    return "".join(cells[int((xs[i] - lo) / span * (len(cells) - 1))]
                   for i in idx)


print("1. Step response at the stock parameters")
print(f"   (M, D, K) = (1.9, 12.6, 21.0)  ->  {classify_damping(NOMINAL)}")
xs = run_step(NOMINAL, -7.0, 4.0)
print(f"   constant -7 N pull, 4 s at {RATE:g} Hz")
print(f"   |{sparkline(-xs)}|")
print(f"   settles at {xs[-1]:+.4f} m; the spring alone predicts "
      f"F/K = {-7.0 / 21.0:+.4f} m")
print()

print("2. The damping regimes, same spring, different drag")
for damping in (4.0, 2.0 * np.sqrt(1.9 * 21.0), 26.0):
    params = ImpedanceParams(mass=1.9, damping=float(damping), stiffness=21.0)
    xs = run_step(params, -7.0, 4.0)
    overshoot = max(0.0, float(-7.0 / 21.0 - xs.min()))
    print(f"   D = {damping:6.2f}  {classify_damping(params):>12}  "
          f"overshoot {overshoot * 1000.0:6.2f} mm   |{sparkline(-xs, 40)}|")
print()

print("3. The correction clamp")
print("   Goals only ever move by the clamped displacement, so a hard pull")
print("   saturates instead of dragging the formation apart:")
for raw in (-0.1, -0.2493, -0.4, -0.8):
    clamped = clamp_correction(np.array([raw, 0.0, 0.0]), 0.25)
    marker = "  <- saturated" if abs(clamped[0]) == 0.25 else ""
    print(f"   raw {raw:+.4f} m  ->  applied {clamped[0]:+.4f} m{marker}")
