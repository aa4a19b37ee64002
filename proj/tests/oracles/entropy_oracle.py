"""Independent term-by-term evaluation of the coding-tree entropy on the
small fixtures used by the C++ unit tests. Run with python3; prints the
values frozen into tests/test_coding_tree.cpp and tests/test_enhance.cpp."""
import math
from itertools import combinations


def degrees(n, edges):
    d = [0] * n
    for u, v in edges:
        d[u] += 1
        d[v] += 1
    return d


def cut(edges, a, b):
    return sum(1 for u, v in edges if (u in a and v in b) or (u in b and v in a))


def two_level_se(n, edges, blocks):
    """Height-2 tree: root -> blocks -> leaves."""
    d = degrees(n, edges)
    vol_g = sum(d)
    total = 0.0
    for blk in blocks:
        vol_b = sum(d[v] for v in blk)
        g_b = cut(edges, set(blk), set(range(n)) - set(blk))
        if g_b:
            total -= g_b / vol_g * math.log2(vol_b / vol_g)
        for v in blk:
            if d[v]:
                total -= d[v] / vol_g * math.log2(d[v] / vol_b)
    return total


def one_dim(n, edges):
    d = degrees(n, edges)
    vol_g = sum(d)
    return -sum(x / vol_g * math.log2(x / vol_g) for x in d if x)


def pearson(x, y):
    mx, my = sum(x) / len(x), sum(y) / len(y)
    num = sum((a - mx) * (b - my) for a, b in zip(x, y))
    den = math.sqrt(sum((a - mx) ** 2 for a in x)) * math.sqrt(sum((b - my) ** 2 for b in y))
    return num / den


barbell = [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)]
print("pearson([1,2,3,4],[1,2,3,5]) =", pearson([1, 2, 3, 4], [1, 2, 3, 5]))
print("H1 path 0-1-2 =", one_dim(3, [(0, 1), (1, 2)]))
print("barbell 2-level SE =", two_level_se(6, barbell, [[0, 1, 2], [3, 4, 5]]))
print("barbell H1 =", one_dim(6, barbell))
# deduction from root to leaf 0: leaf term + its community term
d = degrees(6, barbell)
vol_g = sum(d)
leaf = -d[0] / vol_g * math.log2(d[0] / 7)
comm = -1 / vol_g * math.log2(7 / vol_g)
print("barbell deduction(root, leaf0) =", leaf + comm)
# two disjoint edges a-b, c-d: merge {a},{b}
de = [(0, 1), (2, 3)]
before = one_dim(4, de)
# after: root -> m{a,b}, c, d ; m -> a, b
after = 0.0 - 0 / 4 * 0  # m has g = 0
after += -1 / 4 * math.log2(1 / 2) * 2  # a, b under m
after += -1 / 4 * math.log2(1 / 4) * 2  # c, d under root
print("disjoint edges merge delta =", before - after)
# two disjoint triangles optimal
tri2 = [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]
print("two triangles 2-level SE =", two_level_se(6, tri2, [[0, 1, 2], [3, 4, 5]]))
