"""Shared numerical kernels: complex polynomial roots and exact integer linear algebra.

Two independent toolkits live here.  The floating-point side (ComplexPoly,
find_roots, deflate_root) supports the geometry modules, which intersect
lines with plane curves and need root multisets with multiplicities.  The
exact side (IntPoly, BigIntMatrix, char_poly, bracketed_largest_root)
supports the spectral module, where every statement is an integer identity
and floating point is never allowed to leak in.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

__all__ = [
    "ComplexPoly",
    "RootCluster",
    "IntPoly",
    "BigIntMatrix",
    "NonConvergenceError",
    "NotARootError",
    "NoSignChangeError",
    "find_roots",
    "deflate_root",
    "char_poly",
    "exact_poly_divide",
    "bracketed_largest_root",
    "exact_rank",
    "exact_det",
]

LEADING_ZERO_TOL = 1e-12
CLUSTER_REL_TOL = 1e-6
ROOT_RESIDUAL_TOL = 1e-8
DEFLATE_RESIDUAL_TOL = 1e-6
MAX_ABERTH_SWEEPS = 500


class NonConvergenceError(RuntimeError):
    """Simultaneous root iteration failed to converge; input is likely ill-conditioned."""


class NotARootError(ValueError):
    """A claimed root does not actually annihilate the polynomial."""


class NoSignChangeError(ValueError):
    """A root bracket [lo, hi] does not enclose a sign change."""


# ---------------------------------------------------------------------------
# Complex polynomials
# ---------------------------------------------------------------------------


def _trim_complex(coeffs) -> tuple[complex, ...]:
    cs = [complex(c) for c in coeffs]
    if not cs:
        return (0j,)
    big = max(abs(c) for c in cs)
    tol = LEADING_ZERO_TOL * max(1.0, big)
    while len(cs) > 1 and abs(cs[-1]) <= tol:
        cs.pop()
    return tuple(cs)


@dataclass(frozen=True)
class ComplexPoly:
    """Polynomial with complex coefficients, ascending degree order.

    Trailing coefficients below ``LEADING_ZERO_TOL`` (relative to the largest
    coefficient) are trimmed at construction, so the leading coefficient of a
    nonzero polynomial is always significant.
    """

    coeffs: tuple[complex, ...]

    def __init__(self, coeffs):
        object.__setattr__(self, "coeffs", _trim_complex(coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, z: complex) -> complex:
        acc = 0j
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc

    def eval_with_derivative(self, z: complex) -> tuple[complex, complex]:
        p = 0j
        dp = 0j
        for c in reversed(self.coeffs):
            dp = dp * z + p
            p = p * z + c
        return p, dp

    def derivative(self) -> "ComplexPoly":
        if self.degree == 0:
            return ComplexPoly((0j,))
        return ComplexPoly(tuple(k * c for k, c in enumerate(self.coeffs) if k > 0))

    def scale(self) -> float:
        return max(abs(c) for c in self.coeffs)


@dataclass(frozen=True)
class RootCluster:
    """A root with multiplicity; residual is |p(value)| / max(1, |lead|)."""

    value: complex
    multiplicity: int
    residual: float


def _eval_magnitude_scale(coeffs, z: complex) -> float:
    # sum_k |a_k| |z|^k, the natural backward-error yardstick at z
    az = abs(z)
    s = 0.0
    pw = 1.0
    for c in coeffs:
        s += abs(c) * pw
        pw *= az
    return max(1.0, s)


def _initial_guesses(monic: tuple[complex, ...]) -> list[complex]:
    n = len(monic) - 1
    radius = 1.0 + max(abs(c) for c in monic[:-1]) if n > 0 else 1.0
    r = 0.7 * radius + 0.3
    return [
        r * cmath.exp(2j * math.pi * (j + 0.3419) / n + 0.401j) for j in range(n)
    ]


def find_roots(p: ComplexPoly) -> list[RootCluster]:
    """All roots of ``p`` with multiplicity, via Aberth simultaneous iteration.

    Approximations within ``CLUSTER_REL_TOL * (1 + max |root|)`` of each other
    are merged into one cluster; genuinely multiple roots whose approximations
    straddle that radius (the attainable accuracy of a root of multiplicity m
    scales like eps**(1/m)) are detected by re-polishing the cluster centroid
    with a multiplicity-corrected Newton step and checking that the polynomial
    sits at rounding level there.

    Raises NonConvergenceError after ``MAX_ABERTH_SWEEPS`` sweeps.
    """
    n = p.degree
    if n < 1:
        raise ValueError("find_roots requires degree >= 1")
    for c in p.coeffs:
        if not (math.isfinite(c.real) and math.isfinite(c.imag)):
            raise ValueError("coefficients must be finite")
    lead = p.coeffs[-1]
    monic = tuple(c / lead for c in p.coeffs)

    if n == 1:
        r = -monic[0]
        return [RootCluster(r, 1, abs(p(r)) / max(1.0, abs(lead)))]

    z = _initial_guesses(monic)
    mp = ComplexPoly(monic)
    eps = np.finfo(float).eps
    converged = [False] * n
    for _sweep in range(MAX_ABERTH_SWEEPS):
        moved = 0.0
        for j in range(n):
            pj, dpj = mp.eval_with_derivative(z[j])
            if abs(pj) <= 8.0 * (n + 1) * eps * _eval_magnitude_scale(monic, z[j]):
                converged[j] = True
                continue
            if dpj == 0:
                z[j] += 1e-8 * (1.0 + abs(z[j]))
                moved = max(moved, 1.0)
                continue
            newton = pj / dpj
            s = 0j
            for k in range(n):
                if k != j:
                    dz = z[j] - z[k]
                    if dz == 0:
                        dz = 1e-12 * (1.0 + abs(z[j]))
                    s += 1.0 / dz
            denom = 1.0 - newton * s
            step = newton if abs(denom) < 1e-14 else newton / denom
            z[j] -= step
            moved = max(moved, abs(step) / (1.0 + abs(z[j])))
            converged[j] = False
        if all(converged) or moved < 1e-14:
            break
    else:
        raise NonConvergenceError(
            f"Aberth iteration did not converge in {MAX_ABERTH_SWEEPS} sweeps"
        )

    clusters = _cluster_roots(mp, z)
    lead_abs = max(1.0, abs(lead))
    out = []
    for value, mult in clusters:
        value = _polish_root(mp, value, mult)
        out.append(RootCluster(value, mult, abs(p(value)) / lead_abs))
    out.sort(key=lambda rc: (rc.value.real, rc.value.imag))
    return out


def _cluster_roots(mp: ComplexPoly, roots: list[complex]) -> list[tuple[complex, int]]:
    big = max(abs(r) for r in roots)
    tol = CLUSTER_REL_TOL * (1.0 + big)
    groups = _agglomerate(roots, tol)

    # Second pass: genuine multiple roots leave a cloud wider than tol but
    # narrower than the spacing of distinct roots.  Merge groups whose common
    # centroid evaluates to rounding noise after multiplicity-aware polishing.
    coarse_tol = max(tol, 1e-4 * (1.0 + big))
    merged = True
    while merged:
        merged = False
        for i in range(len(groups)):
            for j in range(i + 1, len(groups)):
                (vi, mi), (vj, mj) = groups[i], groups[j]
                if abs(vi - vj) > coarse_tol:
                    continue
                m = mi + mj
                center = (vi * mi + vj * mj) / m
                center = _polish_root(mp, center, m)
                noise = 64.0 * (mp.degree + 1) * np.finfo(float).eps
                if abs(mp(center)) <= noise * _eval_magnitude_scale(mp.coeffs, center):
                    groups[i] = (center, m)
                    del groups[j]
                    merged = True
                    break
            if merged:
                break
    return groups


def _agglomerate(points: list[complex], tol: float) -> list[tuple[complex, int]]:
    remaining = list(points)
    groups: list[tuple[complex, int]] = []
    while remaining:
        seed = remaining.pop()
        members = [seed]
        changed = True
        while changed:
            changed = False
            for k in range(len(remaining) - 1, -1, -1):
                if any(abs(remaining[k] - m) <= tol for m in members):
                    members.append(remaining.pop(k))
                    changed = True
        center = sum(members) / len(members)
        groups.append((center, len(members)))
    return groups


def _polish_root(mp: ComplexPoly, z: complex, mult: int) -> complex:
    best = z
    best_val = abs(mp(z))
    for _ in range(8):
        pz, dpz = mp.eval_with_derivative(z)
        if dpz == 0:
            break
        z = z - mult * pz / dpz
        val = abs(mp(z))
        if val < best_val:
            best, best_val = z, val
        else:
            break
    return best


def deflate_root(p: ComplexPoly, r: complex, k: int = 1) -> ComplexPoly:
    """Divide ``p`` by (t - r) exactly ``k`` times via synthetic division.

    Raises NotARootError if, before any of the k divisions, the residual
    |p(r)| exceeds ``DEFLATE_RESIDUAL_TOL`` relative to the evaluation scale.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    coeffs = list(p.coeffs)
    for _ in range(k):
        cur = ComplexPoly(coeffs)
        resid = abs(cur(r)) / _eval_magnitude_scale(cur.coeffs, r)
        if resid > DEFLATE_RESIDUAL_TOL:
            raise NotARootError(f"residual {resid:.3e} at {r!r}; not a root")
        if cur.degree == 0:
            raise ValueError("cannot deflate a constant polynomial")
        cs = cur.coeffs
        out = [0j] * cur.degree
        acc = cs[-1]
        for i in range(cur.degree - 1, -1, -1):
            out[i] = acc
            acc = cs[i] + r * acc
        coeffs = out
    return ComplexPoly(coeffs)


# ---------------------------------------------------------------------------
# Exact integer polynomials
# ---------------------------------------------------------------------------


def _trim_int(coeffs) -> tuple[int, ...]:
    cs = [int(c) for c in coeffs]
    if not cs:
        return (0,)
    while len(cs) > 1 and cs[-1] == 0:
        cs.pop()
    return tuple(cs)


@dataclass(frozen=True)
class IntPoly:
    """Univariate polynomial with arbitrary-precision integer coefficients."""

    coeffs: tuple[int, ...]

    def __init__(self, coeffs):
        object.__setattr__(self, "coeffs", _trim_int(coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return self.coeffs == (0,)

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __add__(self, other: "IntPoly") -> "IntPoly":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return IntPoly(out)

    def __sub__(self, other: "IntPoly") -> "IntPoly":
        return self + IntPoly(tuple(-c for c in other.coeffs))

    def __mul__(self, other: "IntPoly") -> "IntPoly":
        a, b = self.coeffs, other.coeffs
        out = [0] * (len(a) + len(b) - 1)
        for i, ca in enumerate(a):
            if ca == 0:
                continue
            for j, cb in enumerate(b):
                out[i + j] += ca * cb
        return IntPoly(out)

    def __pow__(self, n: int) -> "IntPoly":
        if n < 0:
            raise ValueError("negative power")
        result = IntPoly((1,))
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def derivative(self) -> "IntPoly":
        if self.degree == 0:
            return IntPoly((0,))
        return IntPoly(tuple(k * c for k, c in enumerate(self.coeffs) if k > 0))

    def eval_fraction(self, x: Fraction) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def sign_at(self, x: Fraction) -> int:
        v = self.eval_fraction(x)
        return (v > 0) - (v < 0)


def exact_poly_divide(num: IntPoly, den: IntPoly) -> tuple[IntPoly, IntPoly]:
    """Exact polynomial division over the rationals, returned as (quotient, remainder).

    Raises ValueError if the rational quotient or remainder fails to be
    integral (cannot happen for monic divisors).
    """
    if den.is_zero():
        raise ZeroDivisionError("division by zero polynomial")
    n = [Fraction(c) for c in num.coeffs]
    d = [Fraction(c) for c in den.coeffs]
    q = [Fraction(0)] * max(1, len(n) - len(d) + 1)
    r = list(n)
    dd = len(d) - 1
    lead = d[-1]
    while len(r) - 1 >= dd and any(r):
        k = len(r) - 1 - dd
        f = r[-1] / lead
        q[k] = f
        for i in range(len(d)):
            r[k + i] -= f * d[i]
        while len(r) > 1 and r[-1] == 0:
            r.pop()
        if len(r) - 1 < dd:
            break
    for f in q + r:
        if f.denominator != 1:
            raise ValueError("quotient/remainder not integral")
    return IntPoly([int(f) for f in q]), IntPoly([int(f) for f in r])


def bracketed_largest_root(
    p: IntPoly, lo, hi, *, tol: float = 1e-12, samples: int = 64
) -> float:
    """The unique root of ``p`` in (lo, hi), to absolute tolerance ``tol``.

    The bracket is validated with exact sign evaluation at rational points:
    p(lo) * p(hi) < 0, and uniqueness is verified by checking the sign
    sequence at ``samples`` equispaced interior rational points for exactly
    one change.  Refinement is bisection (with exact signs) followed by a
    floating-point Newton polish.
    """
    flo, fhi = Fraction(lo), Fraction(hi)
    if not flo < fhi:
        raise ValueError("need lo < hi")
    slo, shi = p.sign_at(flo), p.sign_at(fhi)
    if slo == 0 or shi == 0 or slo == shi:
        raise NoSignChangeError(f"no sign change of p on [{lo}, {hi}]")

    signs = [slo]
    step = (fhi - flo) / (samples + 1)
    for j in range(1, samples + 1):
        signs.append(p.sign_at(flo + j * step))
    signs.append(shi)
    zeros = sum(1 for s in signs[1:-1] if s == 0)
    changes = 0
    prev = signs[0]
    for s in signs[1:]:
        if s == 0:
            continue
        if s != prev:
            changes += 1
        prev = s
    if zeros + changes != 1:
        raise ValueError(
            f"bracket ({lo}, {hi}) does not isolate a unique root "
            f"({changes} sign changes, {zeros} exact zeros at samples)"
        )

    a, b, sa = flo, fhi, slo
    while float(b - a) > tol / 4:
        mid = (a + b) / 2
        sm = p.sign_at(mid)
        if sm == 0:
            return float(mid)
        if sm == sa:
            a = mid
        else:
            b = mid
    root = float((a + b) / 2)

    dp = p.derivative()
    best, best_val = root, abs(float(p.eval_fraction(Fraction(root))))
    x = root
    for _ in range(40):
        fx = float(p.eval_fraction(Fraction(x)))
        dfx = float(dp.eval_fraction(Fraction(x)))
        if dfx == 0:
            break
        step_f = fx / dfx
        x -= step_f
        if not (float(a) - tol <= x <= float(b) + tol):
            break
        val = abs(float(p.eval_fraction(Fraction(x))))
        if val < best_val:
            best, best_val = x, val
        if abs(step_f) < tol / 8:
            break
    return best


# ---------------------------------------------------------------------------
# Exact integer matrices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BigIntMatrix:
    """Dense matrix of arbitrary-precision integers, row-major."""

    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entries length must equal rows * cols")

    @staticmethod
    def from_rows(rows_list) -> "BigIntMatrix":
        r = len(rows_list)
        c = len(rows_list[0]) if r else 0
        flat = []
        for row in rows_list:
            if len(row) != c:
                raise ValueError("ragged rows")
            flat.extend(int(v) for v in row)
        return BigIntMatrix(r, c, tuple(flat))

    @staticmethod
    def identity(n: int) -> "BigIntMatrix":
        return BigIntMatrix(n, n, tuple(1 if i == j else 0 for i in range(n) for j in range(n)))

    @staticmethod
    def zeros(r: int, c: int) -> "BigIntMatrix":
        return BigIntMatrix(r, c, (0,) * (r * c))

    def __getitem__(self, ij) -> int:
        i, j = ij
        return self.entries[i * self.cols + j]

    def to_lists(self) -> list[list[int]]:
        return [
            list(self.entries[i * self.cols : (i + 1) * self.cols])
            for i in range(self.rows)
        ]

    def transpose(self) -> "BigIntMatrix":
        return BigIntMatrix(
            self.cols,
            self.rows,
            tuple(self[i, j] for j in range(self.cols) for i in range(self.rows)),
        )

    def max_abs(self) -> int:
        return max((abs(v) for v in self.entries), default=0)

    def __add__(self, other: "BigIntMatrix") -> "BigIntMatrix":
        self._check_same_shape(other)
        return BigIntMatrix(
            self.rows, self.cols, tuple(a + b for a, b in zip(self.entries, other.entries))
        )

    def __sub__(self, other: "BigIntMatrix") -> "BigIntMatrix":
        self._check_same_shape(other)
        return BigIntMatrix(
            self.rows, self.cols, tuple(a - b for a, b in zip(self.entries, other.entries))
        )

    def _check_same_shape(self, other):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")

    def scalar(self, k: int) -> "BigIntMatrix":
        return BigIntMatrix(self.rows, self.cols, tuple(k * v for v in self.entries))

    def __matmul__(self, other: "BigIntMatrix") -> "BigIntMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch in product")
        # int64 fast path when the exact product provably fits
        bound = max(1, self.max_abs()) * max(1, other.max_abs()) * max(1, self.cols)
        if bound < 2**62:
            a = np.array(self.to_lists(), dtype=np.int64)
            b = np.array(other.to_lists(), dtype=np.int64)
            c = a @ b
            return BigIntMatrix(self.rows, other.cols, tuple(int(v) for v in c.ravel()))
        a = self.to_lists()
        bt = other.transpose().to_lists()
        flat = []
        for row in a:
            for col in bt:
                flat.append(sum(x * y for x, y in zip(row, col)))
        return BigIntMatrix(self.rows, other.cols, tuple(flat))

    def matvec(self, v: list[int]) -> list[int]:
        if len(v) != self.cols:
            raise ValueError("vector length mismatch")
        out = []
        e = self.entries
        c = self.cols
        for i in range(self.rows):
            base = i * c
            out.append(sum(e[base + j] * v[j] for j in range(c) if v[j]))
        return out

    def is_symmetric(self) -> bool:
        return self.rows == self.cols and all(
            self[i, j] == self[j, i] for i in range(self.rows) for j in range(i)
        )


def exact_det(m: BigIntMatrix) -> int:
    """Exact determinant by Bareiss fraction-free elimination."""
    if m.rows != m.cols:
        raise ValueError("determinant of non-square matrix")
    n = m.rows
    a = [row[:] for row in m.to_lists()]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def exact_rank(m: BigIntMatrix) -> int:
    """Exact rank over the rationals, by fraction-free elimination."""
    a = [row[:] for row in m.to_lists()]
    rows, cols = m.rows, m.cols
    rank = 0
    prev = 1
    for col in range(cols):
        pivot = None
        for i in range(rank, rows):
            if a[i][col] != 0:
                pivot = i
                break
        if pivot is None:
            continue
        a[rank], a[pivot] = a[pivot], a[rank]
        for i in range(rank + 1, rows):
            for j in range(col + 1, cols):
                a[i][j] = (a[i][j] * a[rank][col] - a[i][col] * a[rank][j]) // prev
            a[i][col] = 0
        prev = a[rank][col]
        rank += 1
        if rank == rows:
            break
    return rank


def nullity(m: BigIntMatrix) -> int:
    return m.cols - exact_rank(m)


# -- characteristic polynomial ----------------------------------------------

_SMALL_CHARPOLY_SIDE = 24


def char_poly(m: BigIntMatrix) -> IntPoly:
    """Exact integer characteristic polynomial det(lambda*I - M), ascending coeffs.

    Small matrices use the Faddeev-LeVerrier recursion (all divisions exact
    over the integers).  Larger ones reduce to Hessenberg form modulo a batch
    of word-size primes and reconstruct the integer coefficients by CRT; the
    prime batch is sized from the Hadamard-style coefficient bound
    binom(n,k) * ||M||_F^k, so the reconstruction is certified, never
    heuristic.  No floating point is involved in either path.
    """
    if m.rows != m.cols:
        raise ValueError("characteristic polynomial of non-square matrix")
    n = m.rows
    if n > 1000:
        raise ValueError("matrix side exceeds supported bound 1000")
    if n == 0:
        return IntPoly((1,))
    if n <= _SMALL_CHARPOLY_SIDE:
        return _char_poly_faddeev(m)
    return _char_poly_crt(m)


def _char_poly_faddeev(m: BigIntMatrix) -> IntPoly:
    n = m.rows
    a = m
    ident = BigIntMatrix.identity(n)
    coeffs = [0] * (n + 1)
    coeffs[n] = 1
    mk = ident
    ck = 1
    for k in range(1, n + 1):
        am = a @ mk
        tr = sum(am[i, i] for i in range(n))
        assert tr % k == 0
        ck = -tr // k
        coeffs[n - k] = ck
        if k < n:
            mk = am + ident.scalar(ck)
    return IntPoly(coeffs)


def _primes_for_crt(need: int) -> list[int]:
    primes = []
    prod = 1
    candidate = (1 << 25) - 1
    while prod <= need:
        while not _is_prime(candidate):
            candidate -= 2
        primes.append(candidate)
        prod *= candidate
        candidate -= 2
    return primes


def _is_prime(v: int) -> bool:
    if v < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13):
        if v % q == 0:
            return v == q
    i = 17
    while i * i <= v:
        if v % i == 0:
            return False
        i += 2
    return True


def _char_poly_crt(m: BigIntMatrix) -> IntPoly:
    n = m.rows
    frob2 = sum(v * v for v in m.entries)
    s = math.isqrt(frob2) + 1
    bound = 1
    binom = 1
    spow = 1
    for k in range(1, n + 1):
        binom = binom * (n - k + 1) // k
        spow *= s
        bound = max(bound, binom * spow)
    primes = _primes_for_crt(2 * bound + 1)

    a64 = np.array(m.to_lists(), dtype=np.int64)
    residues = []
    for p in primes:
        residues.append(_char_poly_mod(a64 % p, p))

    coeffs = []
    for k in range(n + 1):
        x, mod = 0, 1
        for p, res in zip(primes, residues):
            r = int(res[k])
            # incremental CRT: x' = x + mod * t, t = (r - x) / mod (mod p)
            t = ((r - x) % p) * pow(mod % p, -1, p) % p
            x += mod * t
            mod *= p
        if x > mod // 2:
            x -= mod
        coeffs.append(x)
    return IntPoly(coeffs)


def _char_poly_mod(a: np.ndarray, p: int) -> np.ndarray:
    """Characteristic polynomial of a mod p (ascending), via Hessenberg reduction.

    All arithmetic stays below 2**63: entries are reduced mod p < 2**25 and
    dot products accumulate at most n < 2**13 terms of size < 2**50.
    """
    h = a.astype(np.int64) % p
    n = h.shape[0]
    for k in range(n - 2):
        piv = None
        for i in range(k + 1, n):
            if h[i, k] % p:
                piv = i
                break
        if piv is None:
            continue
        if piv != k + 1:
            h[[k + 1, piv], :] = h[[piv, k + 1], :]
            h[:, [k + 1, piv]] = h[:, [piv, k + 1]]
        inv = pow(int(h[k + 1, k]), -1, p)
        f = (h[k + 2 :, k] * inv) % p
        if f.size:
            h[k + 2 :, k:] = (h[k + 2 :, k:] - np.outer(f, h[k + 1, k:])) % p
            h[:, k + 1] = (h[:, k + 1] + h[:, k + 2 :] @ f) % p

    # p_k = (x - h[k-1,k-1]) p_{k-1} - sum_i h[i-1,k-1] * prod(subdiag) * p_{i-1}
    polys = np.zeros((n + 1, n + 1), dtype=np.int64)
    polys[0, 0] = 1
    for k in range(1, n + 1):
        prev = polys[k - 1]
        cur = np.zeros(n + 1, dtype=np.int64)
        cur[1 : k + 1] = prev[:k]
        cur = (cur - (int(h[k - 1, k - 1]) % p) * prev) % p
        if k >= 2:
            weights = np.zeros(k - 1, dtype=np.int64)
            prod = 1
            for i in range(k - 1, 0, -1):
                prod = (prod * int(h[i, i - 1])) % p
                weights[i - 1] = (int(h[i - 1, k - 1]) * prod) % p
            cur = (cur - (weights @ polys[: k - 1]) % p) % p
        polys[k] = cur
    return polys[n] % p
