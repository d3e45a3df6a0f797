"""How many node queries it takes to tell N1 from N2.

Until some k-set is fully revealed the two worlds produce the same
transcript, so the advantage of any tester stays small. Past about sqrt(n)
queries a pair-hunting tester wins almost every time.
"""

import math

from relutest.distfree import completion_probability, distinguishing_game, pair_hunting_tester

n = 2500
for q in (5, 25, 50, 100, 250):
    est = completion_probability(n, 2, q, trials=300, seed=1)
    game = distinguishing_game(pair_hunting_tester, n, 2, budget=q, trials=60, seed=1, workers=4)
    print(f"q={q:4d} (q/sqrt(n)={q / math.sqrt(n):4.1f})  P(pair complete)={est.probability:.2f}"
          f"  advantage={game.advantage:.2f}  [{game.ci_low:+.2f}, {game.ci_high:+.2f}]")
