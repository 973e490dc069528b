"""Exact bookkeeping under a hand-written bet schedule.

Instead of drawing random pairings, run_conservative accepts a forced
schedule: a list per step of ((buyer, seller), winner) entries.  That
turns the simulator into a deterministic ledger machine, which makes
it easy to check the posterior rule by hand.

Each participant starts with one virtual win.  After every step the
sum of wins minus the sum of losses still equals the population size.
"""
from betsim import ConservativeConfig, run_conservative

# five participants, one or two bets per step
SCHEDULE = [
    [((0, 1), 1)],
    [((0, 2), 2), ((3, 4), 3)],
    [((1, 3), 1)],
]

cfg = ConservativeConfig(steps=len(SCHEDULE), n_microstates=5, bets_per_step=2, seed=0)
traj = run_conservative(cfg, record_microstates=True, forced_schedule=SCHEDULE)

for step, ledgers in enumerate(traj.per_microstate):
    wins, losses, post = ledgers.wins, ledgers.losses, ledgers.posteriors
    print(f"after step {step}:" if step else "initial state:")
    for i in range(5):
        print(f"  participant {i}: wins={wins[i]} losses={losses[i]} posterior={post[i]:.4f}")
    total = int(wins.sum()) - int(losses.sum())
    print(f"  wins minus losses = {total} (population 5)")
    print()

# replaying the same schedule reproduces the run byte for byte
again = run_conservative(cfg, record_microstates=True, forced_schedule=SCHEDULE)
assert all(
    (a.wins == b.wins).all() and (a.losses == b.losses).all()
    for a, b in zip(traj.per_microstate, again.per_microstate)
)
print("replay with the same schedule is identical")
