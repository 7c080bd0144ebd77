"""Walk the NEM relay through its hysteresis loop, then watch the stored
charge leak away and see why a refresh voltage inside the window is safe.
"""

from tcamsim import (
    Position,
    RelayState,
    default_relay_params,
    relay_apply_bias,
    relay_leak_decay,
    relay_retention_time,
)

relay = default_relay_params()
print(f"pull-in {relay.v_pi} V, pull-out {relay.v_po} V, "
      f"mechanical delay {relay.tau_mech * 1e9:.0f} ns")

print("\n-- bias sweep up and back down (each step held 2 ns) --")
state = RelayState()
for v in (0.0, 0.2, 0.4, 0.5, 0.53, 1.0, 0.6, 0.3, 0.14, 0.13, 0.0):
    state = relay_apply_bias(state, relay, v, duration=2e-9)
    print(f"  bias {v:4.2f} V -> {state.position.value}")

print("\nThe beam closed at 0.53 V but stayed closed all the way down to "
      "0.14 V: that band is the hysteresis window.")

print("\n-- leakage from a full 1.0 V write --")
state = RelayState(position=Position.CLOSED, v_gb=1.0)
t = 0.0
for _ in range(6):
    state, lost = relay_leak_decay(state, relay, dt=5e-6)
    t += 5e-6
    marker = "  <- stored bit lost (pull-out)" if lost else ""
    print(f"  t = {t * 1e6:4.1f} us   gate at {state.v_gb:5.3f} V{marker}")

print(f"\nclosed-form retention from 1.0 V: "
      f"{relay_retention_time(relay, 1.0) * 1e6:.1f} us")
print(f"retention budget after refreshing to 0.5 V: "
      f"{relay_retention_time(relay, 0.5) * 1e6:.1f} us")
print("\nRefreshing to 0.5 V (inside the window) tops the gate back up "
      "without moving any beam, which is what makes one-shot refresh work.")
