"""Write the sample algebra and Cayley-table files."""

from pathlib import Path

import numpy as np

from hyperbench.findim.algebras import (
    commutative_sup,
    cyclic_group_table,
    format_algebra,
    load_algebra,
    load_cayley_table,
    matrix_algebra,
)

SPECS_DIR = Path(__file__).parent


def _symmetric_group_table() -> np.ndarray:
    """S3 with elements ordered as the permutations of (0, 1, 2) in lexicographic order."""
    perms = [(0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)]
    index = {p: i for i, p in enumerate(perms)}
    # (g h)(x) = g(h(x))
    return np.array([[index[tuple(g[h[x]] for x in range(3))] for h in perms] for g in perms])


def _format_table(table: np.ndarray) -> str:
    return "\n".join(" ".join(str(int(v)) for v in row) for row in table) + "\n"


def init_specs():
    """Regenerate every sample file and read it back."""
    algebras = {
        "c2.alg": commutative_sup(2),
        "c3.alg": commutative_sup(3),
        "m2.alg": matrix_algebra(2),
    }
    tables = {
        "z3.cayley": cyclic_group_table(3),
        "z4.cayley": cyclic_group_table(4),
        "s3.cayley": _symmetric_group_table(),
    }

    for name, A in algebras.items():
        path = SPECS_DIR / name
        path.write_text(f"# {A.name}\n" + format_algebra(A), encoding="utf-8")
        loaded = load_algebra(path)
        print(f"  ✓ {name}: dim {loaded.dim}, norm {loaded.norm_kind}")

    for name, table in tables.items():
        path = SPECS_DIR / name
        path.write_text(_format_table(table), encoding="utf-8")
        loaded = load_cayley_table(path)
        print(f"  ✓ {name}: order {loaded.shape[0]}")

    print(f"\nSpecs written to: {SPECS_DIR}")


if __name__ == "__main__":
    init_specs()
