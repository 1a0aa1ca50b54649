"""Regenerates synthetic_regression.csv (200 rows, fixed seed)."""
import random

rng = random.Random(20240611)
with open("synthetic_regression.csv", "w") as f:
    f.write("x1,x2,x3,y\n")
    for _ in range(200):
        x1 = rng.uniform(0, 10)
        x2 = rng.uniform(-5, 5)
        x3 = rng.uniform(0, 4)
        y = 3.0 + 2.0 * x1 - 1.5 * x2 + 0.5 * x3 * x3 + rng.gauss(0, 0.5)
        f.write(f"{x1:.4f},{x2:.4f},{x3:.4f},{y:.4f}\n")
