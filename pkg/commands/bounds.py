"""Evaluate every closed-form bound for given (n, l, V, I) and k = 1..k, without solving"""
import pandas as pd

from bounds import BoundInputs, conjectural_bounds, evaluate_all
from cli_harness import EXIT_PASS


def add_arguments(parser):
    parser.add_argument("--n", type=int, required=True, help="dimension")
    parser.add_argument("--l", type=int, required=True, help="order of the poly-Laplacian")
    parser.add_argument("--V", type=float, required=True, help="volume of the domain")
    parser.add_argument("--I", type=float, required=True, help="moment of inertia about the centroid")
    parser.add_argument("--k", type=int, default=1, help="largest k tabulated")


def bound_table(n, l, V, I, k_max):
    rows = []
    for k in range(1, k_max + 1):
        inputs = BoundInputs(n, l, V, I, k)
        rows.append({"k": k, **evaluate_all(inputs), "inertia_admissible": inputs.inertia_admissible})
    return pd.DataFrame(rows)


def run(args):
    table = bound_table(args.n, args.l, args.V, args.I, args.k)
    print(table.to_string(index=False, float_format=lambda x: f"{x:.10g}"))
    for name in conjectural_bounds(BoundInputs(args.n, args.l, args.V, args.I, 1)):
        print(f"{name}: conjectural unless the domain tiles space")
    return EXIT_PASS
