"""Mirror descent on the expected objective keeps the diagonal ahead.

The iterate stays in a two-parameter family (one value on the diagonal,
one off it), so the whole run reduces to a scalar recursion.
"""

import math

from simplexmatch.population import check_multistep_rates, gap_scale, pop_run, rates_for_gaps, ratio_recursion

n, sigma, N = 100, 0.5, 50
rates = [(n - 1) * math.log(2) / (8 * N)] * N
states = pop_run(n, sigma, rates)
print("rate condition satisfied:", check_multistep_rates(n, rates))
print("off/diag ratio at k=1, 10, 50:", [round(states[k].ratio, 6) for k in (1, 10, 50)])
closed = ratio_recursion(n, sigma, rates)
print("largest gap to the scalar recursion:", max(abs(c - s.ratio) for c, s in zip(closed, states[1:])))

gaps = [1 + 0.5 / k for k in range(1, 11)]
sched = rates_for_gaps(20, sigma, gaps)
c = gap_scale(20, sigma)
print("rates hitting prescribed ratios:", [round(g, 4) for g in sched])
print("achieved / target:", [round(s.ratio / (c * g), 12) for s, g in zip(pop_run(20, sigma, sched)[1:], gaps)])
