"""Deterministic per-trial seed derivation.

Monte-Carlo runs derive every trial's seed from a single master seed so that
trials are independent of execution order and of the worker-pool size.  The
scheme is fixed (and documented here) so that runs are reproducible across
machines and so external tooling can re-derive any trial:

    splitmix64(x):
        z = (x + 0x9E3779B97F4A7C15) mod 2**64
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 mod 2**64
        z = (z ^ (z >> 27)) * 0x94D049BB133111EB mod 2**64
        return z ^ (z >> 31)

    mix64(a, b, c, ...) folds the arguments left to right:
        h = splitmix64(a); h = splitmix64(h ^ splitmix64(b)); ...

A trial's scenario seed is ``mix64(master_seed, cell_index, trial_index, 0)``
and the solver-init seed for algorithm ``k`` (0-based position in the grid's
algorithm list) is ``mix64(master_seed, cell_index, trial_index, 1 + k)``.
"""

_MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    z = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def mix64(*parts: int) -> int:
    """Fold integers into one 64-bit seed via chained splitmix64 steps."""
    if not parts:
        raise ValueError("mix64 needs at least one argument")
    h = splitmix64(parts[0] & _MASK64)
    for p in parts[1:]:
        h = splitmix64(h ^ splitmix64(p & _MASK64))
    return h


def scenario_seed(master_seed: int, cell_index: int, trial_index: int) -> int:
    return mix64(master_seed, cell_index, trial_index, 0)


def solver_seed(master_seed: int, cell_index: int, trial_index: int,
                algo_index: int) -> int:
    return mix64(master_seed, cell_index, trial_index, 1 + algo_index)
