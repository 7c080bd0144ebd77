"""Compare one-shot refresh against the conventional row-by-row sweep:
per-operation cost, then interference with a live search workload.
"""

import random

from tcamsim import (
    OneShot,
    Request,
    RowByRow,
    SearchOp,
    Technology,
    calibrate,
    from_symbols,
    min_safe_period,
    one_shot_refresh,
    row_by_row_refresh,
    simulate_workload,
)
from tcamsim.bench import random_definite_word, random_ternary_word

cal = calibrate()
cfg = cal.array_config(Technology.NEM_3T2N)
rng = random.Random(0)
arr = from_symbols(cfg, [random_definite_word(rng, cfg.cols) for _ in range(cfg.rows)])

_, e_osr, t_osr = one_shot_refresh(arr, 0.5)
_, e_rbr, t_rbr, ops = row_by_row_refresh(arr)
print("per-refresh cost on the 64x64 relay array:")
print(f"  one-shot : 1 operation, {e_osr * 1e15:7.1f} fJ, {t_osr * 1e9:6.1f} ns busy")
print(f"  row-by-row: {ops} operations, {e_rbr * 1e15:7.1f} fJ, {t_rbr * 1e9:6.1f} ns busy")

period = min_safe_period(cfg.tech.device_params, OneShot(v_r=0.5, period=1.0))
print(f"\nminimum safe one-shot period (0.8x the 0.5 V decay budget): "
      f"{period * 1e6:.2f} us")

# Uniform search traffic across ten refresh periods.
horizon = 10 * period
requests = tuple(Request(i * horizon / 200,
                         SearchOp(random_ternary_word(rng, cfg.cols)))
                 for i in range(200))
from tcamsim import WorkloadTrace

trace = WorkloadTrace(requests, duration=horizon)
print(f"\nreplaying {len(requests)} searches over {horizon * 1e6:.1f} us:")
for name, policy in (("one-shot", OneShot(v_r=0.5, period=period)),
                     ("row-by-row", RowByRow(period=period))):
    stats = simulate_workload(arr, trace, policy)
    print(f"  {name:10s}: {stats.refresh_ops:3d} refresh ops, "
          f"{stats.stalled_requests:2d} stalled requests "
          f"({stats.total_stall_time * 1e9:.1f} ns total stall), "
          f"avg refresh power {stats.average_power * 1e9:.2f} nW, "
          f"data losses {stats.data_loss_events}")
