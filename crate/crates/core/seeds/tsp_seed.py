import json
import math
import random
import sys


class FireworksTsp:
    """Fireworks search over tour permutations.

    explosion_operator: every firework emits sparks made by reversing one
    random segment; fitter fireworks get more sparks and a shorter maximum
    reversal, and most reversals reconnect a long tour edge to one of the
    city's near neighbors.
    mutation_operator: relocate a random block of 1-3 cities (or-opt).
    selection_operator: keep the best tour plus diverse survivors.
    """

    def __init__(self, coords, rng, pop_size=8, spark_budget=40, mutation_sparks=4):
        self.coords = coords
        self.rng = rng
        self.pop_size = pop_size
        self.spark_budget = spark_budget
        self.mutation_sparks = mutation_sparks
        self.neighbors = self._neighbor_table(12)

    def _dist(self, a, b):
        ax, ay = self.coords[a]
        bx, by = self.coords[b]
        return math.hypot(bx - ax, by - ay)

    def _neighbor_table(self, k):
        n = len(self.coords)
        table = []
        for i in range(n):
            others = sorted(
                (j for j in range(n) if j != i), key=lambda j: self._dist(i, j)
            )
            table.append(others[:k])
        return table

    def tour_length(self, tour):
        total = 0
        n = len(tour)
        for i in range(n):
            x1, y1 = self.coords[tour[i]]
            x2, y2 = self.coords[tour[(i + 1) % n]]
            total += int(math.floor(math.hypot(x2 - x1, y2 - y1) + 0.5))
        return total

    def explosion_operator(self, population):
        # population: list of (length, tour) sorted ascending by length
        n = len(self.coords)
        worst = max(l for l, _ in population)
        weights = [worst - l + 1e-9 for l, _ in population]
        total_w = sum(weights)
        sparks = []
        for rank, ((_, tour), w) in enumerate(zip(population, weights)):
            count = max(1, round(self.spark_budget * w / total_w))
            cap = max(2, min(n - 1, n // 2 + n // 2 * (rank + 1) // len(population)))
            pos = {city: p for p, city in enumerate(tour)}
            edge_lens = [self._dist(tour[i], tour[(i + 1) % n]) for i in range(n)]
            for _ in range(count):
                if len(sparks) >= self.spark_budget:
                    break
                child = list(tour)
                done = False
                if self.rng.random() < 0.8:
                    # cut a long edge, reconnect to a near neighbor, weighted
                    # by the edge-length gain of the implied reversal
                    cut = self.rng.choices(range(n), weights=edge_lens, k=1)[0]
                    moves = []
                    gains = []
                    for target in self.neighbors[tour[cut]]:
                        j = pos[target]
                        lo, hi = (j, cut) if j < cut else (cut, j)
                        if not 2 <= hi - lo <= cap:
                            continue
                        gain = (
                            self._dist(tour[lo], tour[(lo + 1) % n])
                            + self._dist(tour[hi], tour[(hi + 1) % n])
                            - self._dist(tour[lo], tour[hi])
                            - self._dist(tour[(lo + 1) % n], tour[(hi + 1) % n])
                        )
                        moves.append((lo, hi))
                        gains.append(max(gain, 0.0) + 1e-9)
                    if moves:
                        lo, hi = self.rng.choices(moves, weights=gains, k=1)[0]
                        child[lo + 1:hi + 1] = reversed(child[lo + 1:hi + 1])
                        done = True
                if not done:
                    seg = self.rng.randint(2, min(cap, n - 1))
                    start = self.rng.randint(0, n - seg)
                    child[start:start + seg] = reversed(child[start:start + seg])
                sparks.append(child)
        while len(sparks) < self.spark_budget:
            sparks.append(list(population[0][1]))
        return sparks

    def mutation_operator(self, tour):
        n = len(tour)
        block = self.rng.randint(1, min(3, n - 2))
        start = self.rng.randint(0, n - block)
        child = list(tour)
        piece = child[start:start + block]
        del child[start:start + block]
        at = self.rng.randint(0, len(child))
        child[at:at] = piece
        return child

    def selection_operator(self, scored, k):
        # scored: list of (length, tour); keep the best, then favour tours
        # far from the already-selected ones.
        scored = sorted(scored, key=lambda item: item[0])
        selected = [scored[0]]
        rest = scored[1:]
        while len(selected) < k and rest:
            weights = []
            for _, tour in rest:
                d = sum(
                    sum(1 for a, b in zip(tour, chosen) if a != b)
                    for _, chosen in selected
                )
                weights.append(d / len(selected) + 1e-9)
            pick = self.rng.choices(range(len(rest)), weights=weights, k=1)[0]
            selected.append(rest.pop(pick))
        return selected

    def run(self, eval_budget):
        n = len(self.coords)
        population = []
        for _ in range(self.pop_size):
            tour = list(range(n))
            self.rng.shuffle(tour)
            population.append((self.tour_length(tour), tour))
        evals = self.pop_size
        population.sort(key=lambda item: item[0])
        best = population[0]

        while evals < eval_budget:
            sparks = self.explosion_operator(population)
            for _ in range(self.mutation_sparks):
                parent = population[self.rng.randrange(len(population))][1]
                sparks.append(self.mutation_operator(parent))
            scored = list(population)
            for tour in sparks:
                if evals >= eval_budget + self.pop_size:
                    break
                length = self.tour_length(tour)
                evals += 1
                scored.append((length, tour))
                if length < best[0]:
                    best = (length, tour)
            population = self.selection_operator(scored, self.pop_size)
        return best[1]


def main():
    request = json.loads(sys.stdin.readline())
    rng = random.Random(request.get("seed", 0))
    coords = [tuple(c) for c in request["coords"]]
    solver = FireworksTsp(coords, rng)
    tour = solver.run(int(request["eval_budget"]))
    sys.stdout.write(json.dumps({"tour": list(tour)}) + "\n")
    sys.stdout.flush()


if __name__ == "__main__":
    main()
