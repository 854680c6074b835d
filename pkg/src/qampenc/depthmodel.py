"""Layer-count model shared by the plan builder and the resource estimator.

Each term is the unpipelined layer count of the segment the builder emits;
``used`` is the number of index registers the widest chunk fills and
``lg(x) = ceil(log2(max(x, 2)))``.

* initial: 1 (H) + 1 (X) + lg(used) for the fan-out tree; the final segment
  mirrors it without the H layer.
* chunk: 2 * (1 + and_depth(n) + mtc_depth(used)) + ladder, i.e. LoadIndex,
  the n-Toffoli tree, Mem2CTRL plus the CTRL compression tree, all mirrored,
  and one layer per ladder gate.
"""
import math

def lg(x):
    return math.ceil(math.log2(max(int(x), 2)))


def initial_depth(used):
    return 2 + lg(used)


def and_depth(n):
    """Toffoli tree up, one CX onto C_j, tree down."""
    return 1 if n == 1 else 2 * lg(n) + 1


def mtc_depth(used):
    """Two Mem2CTRL layers per copy (one if a single register) plus the XOR tree over copies."""
    if used <= 1:
        return 1
    return 2 + math.ceil(math.log2(-(-used // 2)))


def chunk_depth(n, used, ladder):
    return 2 * (1 + and_depth(n) + mtc_depth(used)) + ladder


def s0_depth(n):
    # X layer, MCX tree onto the ancilla, CZ, the tree again, X layer
    mcx = 1 if n <= 2 else 2 * lg(n - 1) + 1
    return 3 + 2 * mcx


def depth_for_chunks(n, entries, R, ladder, extra=0):
    used = -(-entries // R) if R else 0
    init = initial_depth(used)
    return 2 * init - 1 + (R * chunk_depth(n, used, ladder) if R else 0) + extra


def choose_chunks(n, M, entries, ladder):
    """Chunk count R >= ceil(entries / M) with the smallest model depth.

    This is ceil(entries / M) except where one more chunk lets every chunk
    fit a shallower compression tree; ties go to the fewest chunks.
    """
    if entries == 0:
        return 0
    R0 = -(-entries // M)
    best, best_d = R0, depth_for_chunks(n, entries, R0, ladder)
    R = R0 + 1
    while R <= min(entries, 2 * R0):
        d = depth_for_chunks(n, entries, R, ladder)
        if d < best_d:
            best, best_d = R, d
        R += 1
    return best
