"""Plain enumeration oracle for small representation counts."""
import itertools
from fractions import Fraction


def brute_count(p, k, gram, t):
    """Number of x in (Z/p^k)^(l x n) with (x_i, x_j)/2 = t_ij mod p^k."""
    q = p ** k
    l, n = len(gram), len(t)
    half = pow(2, -1, q)
    target = [[int(Fraction(t[i][j]).numerator * pow(Fraction(t[i][j]).denominator, -1, q)) % q
               for j in range(n)] for i in range(n)]
    g = [[int(v) for v in row] for row in gram]
    vecs = list(itertools.product(range(q), repeat=l))

    def pair(a, b):
        return sum(a[r] * g[r][c] * b[c] for r in range(l) for c in range(l)) * half % q

    count = 0
    for xs in itertools.product(vecs, repeat=n):
        if all(pair(xs[i], xs[j]) == target[i][j] for i in range(n) for j in range(i, n)):
            count += 1
    return count
