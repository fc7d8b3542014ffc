"""Singularly perturbed PDEs  x^a e^a' sum_j mu_j x_j dy/dx_j = G(x, e, y).

The formal solution is computed shell by shell in the x-degree. Writing
F = G/<mu,alpha> and lambda_j = mu_j/<mu,alpha>, the coefficient of x^beta
satisfies

    <lambda, beta - alpha> e^a' y_{beta-alpha}(e) = [F(x, e, y)]_beta,

whose right side is J(e) y_beta plus terms known from lower shells, with
J(e) = dF/dy(0, e, y_0(e)). All series are truncated jointly in (x, e) by
total degree.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .borel import BorelSeries, convolve, formal_borel, split_summand
from .errors import InputError, NonConvergenceError, SingularB0Error
from .exact import to_exact
from .monomial import MonomialOrder, as_fraction
from .series import TruncatedSeries

Key = Tuple[Tuple[int, ...], Tuple[int, ...], Tuple[int, ...]]


# ---------------------------------------------------------------------------
# small dense linear algebra over complex numbers or exact rationals

def mat_inv(M, exact: bool):
    n = len(M)
    if not exact:
        A = np.array(M, dtype=complex)
        return np.linalg.inv(A)
    A = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    for c in range(n):
        piv = next((r for r in range(c, n) if A[r][c] != 0), None)
        if piv is None:
            raise SingularB0Error("matrix is singular")
        A[c], A[piv] = A[piv], A[c]
        p = A[c][c]
        A[c] = [x / p for x in A[c]]
        for r in range(n):
            if r != c and A[r][c] != 0:
                f = A[r][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    out = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            out[i, j] = A[i][n + j]
    return out


# ---------------------------------------------------------------------------

@dataclass
class PdeProblem:
    n: int
    m: int
    N: int
    alpha: Tuple[int, ...]
    alpha_prime: Tuple[int, ...]
    mu: Tuple[Fraction, ...]
    G: Dict[Key, np.ndarray] = field(default_factory=dict)
    exact: bool = False

    def __post_init__(self):
        self.alpha = tuple(int(a) for a in self.alpha)
        self.alpha_prime = tuple(int(a) for a in self.alpha_prime)
        self.mu = tuple(as_fraction(v) for v in self.mu)
        if len(self.alpha) != self.n or len(self.mu) != self.n or len(self.alpha_prime) != self.m:
            raise InputError("alpha/mu must have length n and alpha_prime length m")
        if min(self.alpha + self.alpha_prime, default=1) < 1:
            raise InputError("alpha and alpha_prime must be positive")
        if min(self.mu) <= 0:
            raise InputError("mu must be positive")
        table = {}
        for (bx, be, I), coef in self.G.items():
            bx, be, I = tuple(bx), tuple(be), tuple(I)
            if len(bx) != self.n or len(be) != self.m or len(I) != self.N:
                raise InputError(f"G term {(bx, be, I)} has wrong shape")
            if min(bx + be + I, default=0) < 0:
                raise InputError("G exponents must be non-negative")
            vec = _vec(coef, self.N, self.exact)
            key = (bx, be, I)
            table[key] = table[key] + vec if key in table else vec
        self.G = table
        zero = ((0,) * self.n, (0,) * self.m, (0,) * self.N)
        if zero in self.G and any(x != 0 for x in self.G[zero]):
            raise InputError("G(0,0,0) must vanish")

    # construction ---------------------------------------------------------
    @classmethod
    def from_dict(cls, data: dict, exact: bool = False) -> "PdeProblem":
        try:
            n, m, N = int(data["n"]), int(data["m"]), int(data["N"])
            terms = {}
            for t in data["G"]["terms"]:
                coef = [complex(float(c[0]), float(c[1])) for c in t["coef"]]
                key = (tuple(t["x"]), tuple(t["eps"]), tuple(t["y"]))
                if exact:
                    coef = [to_exact(z) for z in coef]
                if key in terms:
                    terms[key] = list(np.asarray(terms[key], dtype=object) + np.asarray(coef, dtype=object))
                else:
                    terms[key] = coef
            return cls(n, m, N, tuple(data["alpha"]), tuple(data["alpha_prime"]),
                       tuple(as_fraction(v) for v in data["mu"]), terms, exact)
        except (KeyError, TypeError, IndexError) as exc:
            raise InputError(f"malformed problem description: {exc!r}") from exc
        except ValueError as exc:
            raise InputError(f"malformed problem description: {exc}") from exc

    @classmethod
    def from_json(cls, text: str, exact: bool = False) -> "PdeProblem":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"invalid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise InputError("problem file must contain a JSON object")
        return cls.from_dict(data, exact)

    def to_dict(self) -> dict:
        terms = []
        for (bx, be, I), v in sorted(self.G.items()):
            terms.append({"x": list(bx), "eps": list(be), "y": list(I),
                          "coef": [[complex(z).real, complex(z).imag] for z in v]})
        return {"n": self.n, "m": self.m, "N": self.N, "alpha": list(self.alpha),
                "alpha_prime": list(self.alpha_prime), "mu": [float(v) for v in self.mu],
                "G": {"terms": terms}}

    def to_json(self) -> str:
        from .formatting import dumps
        return dumps(self.to_dict())

    def with_mode(self, exact: bool) -> "PdeProblem":
        if exact == self.exact:
            return self
        G = {}
        for k, v in self.G.items():
            G[k] = [to_exact(complex(z)) for z in v] if exact else [complex(z) for z in v]
        return PdeProblem(self.n, self.m, self.N, self.alpha, self.alpha_prime, self.mu, G, exact)

    # derived data ------------------------------------------------------------
    @property
    def d(self) -> int:
        return self.n + self.m

    @property
    def mu_alpha(self) -> Fraction:
        return sum((u * a for u, a in zip(self.mu, self.alpha)), Fraction(0))

    def B0(self):
        """Jacobian dG/dy at the origin as an N x N array."""
        M = np.empty((self.N, self.N), dtype=object if self.exact else complex)
        M[:] = Fraction(0) if self.exact else 0
        zx, ze = (0,) * self.n, (0,) * self.m
        for (bx, be, I), v in self.G.items():
            if bx == zx and be == ze and sum(I) == 1:
                k = I.index(1)
                M[:, k] = M[:, k] + v
        return M

    def check_B0(self):
        B0 = self.B0()
        if self.exact:
            mat_inv(B0, True)
            return B0
        A = np.array(B0, dtype=complex)
        if not np.all(np.isfinite(A)) or np.linalg.cond(A) > 1e12:
            raise SingularB0Error("B0 = dG/dy(0,0,0) is singular or ill-conditioned "
                                  f"(cond = {np.linalg.cond(A):.3g})")
        return B0

    def variable_names(self) -> List[str]:
        return [f"x{j + 1}" for j in range(self.n)] + [f"eps{j + 1}" for j in range(self.m)]

    def pde_order(self) -> MonomialOrder:
        """B_(lambda, 0) on (x, eps): alpha = (alpha, alpha'), k = 1, s = (s, 0)."""
        ma = self.mu_alpha
        s = [u * a / ma for u, a in zip(self.mu, self.alpha)] + [Fraction(0)] * self.m
        return MonomialOrder(self.alpha + self.alpha_prime, 1, s)

    def summation_order(self, s=None) -> MonomialOrder:
        """Order in the monomial x^alpha eps^alpha' used for numeric summation."""
        return MonomialOrder(self.alpha + self.alpha_prime, 1, s)


def _vec(coef, N, exact):
    if exact:
        arr = np.empty(N, dtype=object)
        items = list(coef) if isinstance(coef, (list, tuple, np.ndarray)) else [coef]
        if len(items) == 1 and N > 1:
            items = items * N
        if len(items) != N:
            raise InputError("coefficient vector has the wrong length")
        for i, z in enumerate(items):
            arr[i] = to_exact(z)
        return arr
    v = np.asarray(coef, dtype=complex).reshape(-1)
    if v.size == 1 and N > 1:
        v = np.repeat(v, N)
    if v.size != N:
        raise InputError("coefficient vector has the wrong length")
    return v


@dataclass
class Normalized:
    F: Dict[Key, np.ndarray]
    lam: Tuple[Fraction, ...]
    s: Tuple[Fraction, ...]
    A0: np.ndarray


def normalize(p: PdeProblem) -> Normalized:
    ma = p.mu_alpha
    if ma == 0:
        raise InputError("<mu, alpha> vanishes")
    inv = (1 / ma) if p.exact else 1.0 / float(ma)
    F = {k: v * inv for k, v in p.G.items()}
    s = tuple(u * a / ma for u, a in zip(p.mu, p.alpha))
    lam = tuple(u / ma for u in p.mu)
    return Normalized(F, lam, s, p.B0() * inv)


# ---------------------------------------------------------------------------
# series helpers (vectors as lists of scalar series)

class _Ctx:
    def __init__(self, p: PdeProblem, T: int):
        self.p, self.T, self.d, self.exact = p, T, p.d, p.exact
        norm = normalize(p)
        self.norm = norm
        self.A: Dict[Tuple[int, ...], List[TruncatedSeries]] = {}
        groups: Dict[Tuple[int, ...], Dict] = {}
        for (bx, be, I), v in norm.F.items():
            groups.setdefault(I, {})[bx + be] = v
        for I, table in groups.items():
            vec = TruncatedSeries(self.d, table, T, p.N, self.exact, check=False)
            comps = [vec.component(j) for j in range(p.N)]
            if any(len(c) for c in comps):
                self.A[I] = comps

    def zero(self):
        return TruncatedSeries.zero(self.d, self.T, 1, self.exact)

    def const(self, c):
        return TruncatedSeries.constant(self.d, c, self.T, 1, self.exact)

    def xdeg(self, key):
        return sum(key[:self.p.n])

    def shells(self, f: TruncatedSeries) -> Dict[int, TruncatedSeries]:
        buckets: Dict[int, dict] = {}
        for k, v in f.coeffs.items():
            buckets.setdefault(self.xdeg(k), {})[k] = v
        return {D: f._new(b) for D, b in buckets.items()}


def _is_const(f: TruncatedSeries) -> bool:
    return all(sum(k) == 0 for k in f.coeffs)


def _const_val(f: TruncatedSeries):
    z = (0,) * f.dim
    return f[z][0] if z in f.coeffs else (Fraction(0) if f.exact else 0)


def _smul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    if not a.coeffs or not b.coeffs:
        return a._new({}, trunc=min(a.trunc, b.trunc))
    if _is_const(a):
        return b.scale(_const_val(a)).truncate(a.trunc)
    if _is_const(b):
        return a.scale(_const_val(b)).truncate(b.trunc)
    return a.mul(b)


def _matvec(M, v: List[TruncatedSeries], zero) -> List[TruncatedSeries]:
    out = []
    for row in M:
        acc = zero
        for a, b in zip(row, v):
            acc = acc.add(_smul(a, b))
        out.append(acc)
    return out


def _matmul(A, B, zero):
    n = len(A)
    return [[_sum([_smul(A[i][k], B[k][j]) for k in range(n)], zero) for j in range(n)] for i in range(n)]


def _sum(items, zero):
    acc = zero
    for it in items:
        acc = acc.add(it)
    return acc


def _max_abs(series_list) -> float:
    worst = 0.0
    for f in series_list:
        for v in f.coeffs.values():
            for x in v:
                if x != 0:
                    worst = max(worst, abs(complex(x)))
    return worst


def _series_matrix_inverse(ctx: _Ctx, J: List[List[TruncatedSeries]]):
    """Inverse of a matrix of eps-series with invertible constant part."""
    N = len(J)
    J0 = [[_const_val(J[i][j]) for j in range(N)] for i in range(N)]
    try:
        J0inv = mat_inv(J0, ctx.exact)
    except np.linalg.LinAlgError as exc:
        raise SingularB0Error("dF/dy(0,0,y0(0)) is singular") from exc
    C = [[ctx.const(J0inv[i][j]) for j in range(N)] for i in range(N)]
    J1 = [[J[i][j].sub(ctx.const(J0[i][j])) for j in range(N)] for i in range(N)]
    if all(len(J1[i][j]) == 0 or _max_abs([J1[i][j]]) == 0 for i in range(N) for j in range(N)):
        return C
    X = C
    M = _matmul(C, J1, ctx.zero())  # J0^{-1} J1
    for _ in range(ctx.T + 2):
        MX = _matmul(M, X, ctx.zero())
        Xn = [[C[i][j].sub(MX[i][j]) for j in range(N)] for i in range(N)]
        diff = _max_abs([Xn[i][j].sub(X[i][j]) for i in range(N) for j in range(N)])
        X = Xn
        if diff == 0:
            break
    return X


def _powers_at_x0(ctx: _Ctx, y0: List[TruncatedSeries], I, cache):
    I = tuple(I)
    if I in cache:
        return cache[I]
    if sum(I) == 0:
        val = ctx.const(1)
    else:
        k = next(i for i, e in enumerate(I) if e)
        prev = list(I)
        prev[k] -= 1
        val = _smul(_powers_at_x0(ctx, y0, tuple(prev), cache), y0[k])
    cache[I] = val
    return val


def _x0(ctx: _Ctx, f: TruncatedSeries) -> TruncatedSeries:
    return f.select(lambda k: ctx.xdeg(k) == 0)


def _eval_F_x0(ctx: _Ctx, y: List[TruncatedSeries]):
    cache = {}
    out = [ctx.zero() for _ in range(ctx.p.N)]
    for I, comps in ctx.A.items():
        P = _powers_at_x0(ctx, y, I, cache)
        for j in range(ctx.p.N):
            out[j] = out[j].add(_smul(_x0(ctx, comps[j]), P))
    return out


def _jacobian_x0(ctx: _Ctx, y: List[TruncatedSeries]):
    N = ctx.p.N
    cache = {}
    J = [[ctx.zero() for _ in range(N)] for _ in range(N)]
    for I, comps in ctx.A.items():
        for k in range(N):
            if I[k] == 0:
                continue
            red = list(I)
            red[k] -= 1
            P = _powers_at_x0(ctx, y, tuple(red), cache).scale(I[k])
            for j in range(N):
                J[j][k] = J[j][k].add(_smul(_x0(ctx, comps[j]), P))
    return J


def _solve_y0_lifted(ctx: _Ctx) -> List[TruncatedSeries]:
    """Newton iteration for F(0, e, y0(e)) = 0 with y0(0) = 0."""
    N = ctx.p.N
    y = [ctx.zero() for _ in range(N)]
    for it in range(64):
        Fv = _eval_F_x0(ctx, y)
        if _max_abs(Fv) == 0:
            return y
        Jinv = _series_matrix_inverse(ctx, _jacobian_x0(ctx, y))
        step = _matvec(Jinv, Fv, ctx.zero())
        y = [a.sub(b) for a, b in zip(y, step)]
        size = _max_abs(step)
        if not ctx.exact and size <= 1e-15 * max(1.0, _max_abs(y)):
            return y
    raise NonConvergenceError("Newton iteration for y0 did not converge")


def solve_y0(p: PdeProblem, order: int) -> TruncatedSeries:
    """y0(e) with F(0, e, y0) = 0, as a vector series in the m eps-variables."""
    p.check_B0()
    ctx = _Ctx(p, order)
    y = _solve_y0_lifted(ctx)
    comps = [TruncatedSeries(p.m, {k[p.n:]: v for k, v in c.coeffs.items()}, order, 1, p.exact, check=False)
             for c in y]
    return TruncatedSeries.stack(comps)


@dataclass
class FormalSolution:
    series: TruncatedSeries
    order: int
    problem: PdeProblem

    def components(self) -> List[TruncatedSeries]:
        return [self.series.component(j) for j in range(self.series.N)]

    def to_csv(self) -> str:
        return self.series.to_csv(self.problem.variable_names())


def formal_solve(p: PdeProblem, order: int) -> FormalSolution:
    """Unique formal solution truncated at joint total degree ``order``."""
    if order < 0:
        raise InputError("order must be non-negative")
    p.check_B0()
    T = order
    ctx = _Ctx(p, T)
    N, n = p.N, p.n
    mo = p.pde_order()
    a_abs = sum(p.alpha)
    eps_shift = (0,) * n + p.alpha_prime

    y0 = _solve_y0_lifted(ctx)
    Ysh = [{0: y0[k]} for k in range(N)]
    J = _jacobian_x0(ctx, y0)
    Jinv = _series_matrix_inverse(ctx, J)
    Ash = {I: [ctx.shells(c) for c in comps] for I, comps in ctx.A.items()}

    # power products y^I needed by the table, closed under I -> I - e_k
    needed = set()
    for I in ctx.A:
        cur = tuple(I)
        while sum(cur) >= 2 and cur not in needed:
            needed.add(cur)
            k = next(i for i, e in enumerate(cur) if e)
            lst = list(cur)
            lst[k] -= 1
            cur = tuple(lst)
    order_I = sorted(needed, key=lambda I: (sum(I), I))
    P: Dict[Tuple[int, ...], Dict[int, TruncatedSeries]] = {}
    zero = ctx.zero()

    def pshell(I, D):
        if sum(I) == 0:
            return ctx.const(1) if D == 0 else zero
        if sum(I) == 1:
            return Ysh[I.index(1)].get(D, zero)
        return P[I].get(D, zero)

    def fill_power_shell(D):
        for I in order_I:
            k = next(i for i, e in enumerate(I) if e)
            lst = list(I)
            lst[k] -= 1
            prev = tuple(lst)
            acc = zero
            for a in range(D + 1):
                left = pshell(prev, a)
                right = Ysh[k].get(D - a)
                if right is None or not left.coeffs or not right.coeffs:
                    continue
                acc = acc.add(_smul(left, right))
            P.setdefault(I, {})[D] = acc

    fill_power_shell(0)
    for D in range(1, T + 1):
        fill_power_shell(D)
        known = [zero for _ in range(N)]
        for I, comps in Ash.items():
            for a in range(D + 1):
                ps = pshell(I, D - a)
                if not ps.coeffs:
                    continue
                for j in range(N):
                    sh = comps[j].get(a)
                    if sh is not None:
                        known[j] = known[j].add(_smul(sh, ps))
        rhs = []
        for j in range(N):
            lhs = zero
            prev = Ysh[j].get(D - a_abs)
            if prev is not None and prev.coeffs:
                lhs = prev.apply_vector_field(mo).shift(eps_shift).truncate(T)
            rhs.append(lhs.sub(known[j]))
        new = _matvec(Jinv, rhs, zero)
        for j in range(N):
            Ysh[j][D] = new[j].select(lambda k, D=D: ctx.xdeg(k) == D)
        fill_power_shell(D)

    comps = [_sum(Ysh[j].values(), zero) for j in range(N)]
    return FormalSolution(TruncatedSeries.stack(comps), T, p)


def pde_residual(sol: FormalSolution) -> TruncatedSeries:
    """e^a' X_lambda(y) - F(x, e, y) as a vector series (exact where possible)."""
    p, T = sol.problem, sol.order
    ctx = _Ctx(p, T)
    mo = p.pde_order()
    y = sol.components()
    eps_shift = (0,) * p.n + p.alpha_prime
    out = []
    cache: Dict[Tuple[int, ...], TruncatedSeries] = {}

    def power(I):
        if I not in cache:
            if sum(I) == 0:
                cache[I] = ctx.const(1)
            else:
                k = next(i for i, e in enumerate(I) if e)
                lst = list(I)
                lst[k] -= 1
                cache[I] = _smul(power(tuple(lst)), y[k])
        return cache[I]

    for j in range(p.N):
        lhs = y[j].apply_vector_field(mo).shift(eps_shift).truncate(T)
        rhs = _sum([_smul(comps[j], power(I)) for I, comps in ctx.A.items()], ctx.zero())
        out.append(lhs.sub(rhs))
    return TruncatedSeries.stack(out)


# ---------------------------------------------------------------------------
# singular directions

@dataclass
class SingularDirectionSet:
    eigenvalues: np.ndarray
    directions: List[float]

    def to_list(self):
        return list(self.directions)


def singular_directions(p: PdeProblem, dedup_tol: float = 1e-10) -> SingularDirectionSet:
    B0 = np.array(p.B0(), dtype=complex)
    nu = np.linalg.eigvals(B0)
    scale = max(np.linalg.norm(B0), 1e-300)
    if np.any(np.abs(nu) <= 1e-12 * scale):
        raise SingularB0Error("B0 has an eigenvalue at zero")
    ma = float(p.mu_alpha)
    thetas = []
    for v in nu:
        th = float(np.angle(v / ma)) % (2 * np.pi)
        if th >= 2 * np.pi - dedup_tol:
            th = 0.0
        thetas.append(th)
    thetas.sort()
    out: List[float] = []
    for th in thetas:
        if not out or th - out[-1] > dedup_tol:
            out.append(th)
    if len(out) > 1 and out[0] + 2 * np.pi - out[-1] <= dedup_tol:
        out.pop()
    return SingularDirectionSet(nu, out)


# ---------------------------------------------------------------------------
# convolution equation

@dataclass
class CEData:
    mo: MonomialOrder
    T: int
    h: List[TruncatedSeries]
    c_tilde: List[TruncatedSeries]
    c_tilde_head: float
    A_tilde: Dict[Tuple[int, ...], List[TruncatedSeries]]
    A0: np.ndarray
    w: List[TruncatedSeries]


def _binom(n, k):
    from math import comb
    return comb(n, k)


def prepare_ce(p: PdeProblem, T: int, solution: FormalSolution | None = None) -> CEData:
    """Shift y = w + h so that B(c~) is regular, and collect the transformed coefficients."""
    sol = solution or formal_solve(p, T)
    ctx = _Ctx(p, T)
    mo = p.pde_order()
    N = p.N
    heads, tails = [], []
    for c in sol.components():
        hd, tl = split_summand(c.truncate(T), mo)
        heads.append(hd)
        tails.append(tl)

    cache: Dict[Tuple[int, ...], TruncatedSeries] = {}

    def hpow(I):
        if I not in cache:
            if sum(I) == 0:
                cache[I] = ctx.const(1)
            else:
                k = next(i for i, e in enumerate(I) if e)
                lst = list(I)
                lst[k] -= 1
                cache[I] = _smul(hpow(tuple(lst)), heads[k])
        return cache[I]

    A_tilde: Dict[Tuple[int, ...], List[TruncatedSeries]] = {}
    for Jm, comps in ctx.A.items():
        for I in _sub_indices(Jm):
            factor = 1
            for a, b in zip(Jm, I):
                factor *= _binom(a, b)
            P = hpow(tuple(a - b for a, b in zip(Jm, I))).scale(factor)
            cur = A_tilde.setdefault(I, [ctx.zero() for _ in range(N)])
            for j in range(N):
                cur[j] = cur[j].add(_smul(comps[j], P))
    zeroI = (0,) * N
    base = A_tilde.pop(zeroI, [ctx.zero() for _ in range(N)])
    eps_shift = (0,) * p.n + p.alpha_prime
    c_tilde, worst = [], 0.0
    for j in range(N):
        xh = heads[j].apply_vector_field(mo).shift(eps_shift).truncate(T)
        c = base[j].sub(xh)
        hd, tl = split_summand(c, mo)
        worst = max(worst, _max_abs([hd]))
        c_tilde.append(tl)
    A0 = normalize(p).A0
    return CEData(mo, T, heads, c_tilde, worst, A_tilde, A0, tails)


def _sub_indices(J):
    if not J:
        yield ()
        return
    for rest in _sub_indices(J[1:]):
        for i in range(J[0] + 1):
            yield (i,) + rest


def _borel_or_zero(f: TruncatedSeries, mo) -> BorelSeries:
    return formal_borel(f, mo)


def build_ce_rhs(p: PdeProblem, Y: Sequence[BorelSeries], T: int, ce: CEData | None = None) -> List[BorelSeries]:
    """Right side of (CE) for a vector Y of Borel series."""
    ce = ce or prepare_ce(p, T)
    mo = ce.mo
    N = p.N
    if len(Y) != N:
        raise InputError("Y must have N components")
    for y in Y:
        if y.mo != mo:
            raise InputError("Y was built with a different monomial order")
    Yt = [BorelSeries(y.body.truncate(T), mo) for y in Y]
    zero = TruncatedSeries.zero(p.d, T, 1, p.exact)
    cache: Dict[Tuple[int, ...], BorelSeries] = {}

    def cpow(I):
        if I not in cache:
            k = next(i for i, e in enumerate(I) if e)
            lst = list(I)
            lst[k] -= 1
            prev = tuple(lst)
            cache[I] = Yt[k] if sum(prev) == 0 else convolve(cpow(prev), Yt[k])
        return cache[I]

    out = []
    for j in range(N):
        acc = formal_borel(ce.c_tilde[j], mo).body
        for I, comps in ce.A_tilde.items():
            a = comps[j]
            a_x0 = a.select(lambda k: sum(k[:p.n]) == 0)
            a_rest = a.select(lambda k: sum(k[:p.n]) > 0)
            YI = cpow(I)
            if a_rest.coeffs:
                acc = acc.add(convolve(formal_borel(a_rest, mo), YI).body)
            if a_x0.coeffs:
                acc = acc.add(_smul(a_x0, YI.body))
        for k in range(N):
            if ce.A0[j][k] != 0:
                acc = acc.sub(Yt[k].body.scale(ce.A0[j][k]))
        out.append(BorelSeries(acc.truncate(T), mo))
    return out


def ce_lhs(p: PdeProblem, Y: Sequence[BorelSeries], ce: CEData) -> List[BorelSeries]:
    """(xi^alpha eta^alpha' - A0) Y, truncated at T."""
    shift = p.alpha + p.alpha_prime
    out = []
    for j in range(p.N):
        acc = Y[j].body.shift(shift).truncate(ce.T)
        for k in range(p.N):
            if ce.A0[j][k] != 0:
                acc = acc.sub(Y[k].body.truncate(ce.T).scale(ce.A0[j][k]))
        out.append(BorelSeries(acc, ce.mo))
    return out


def ce_residual_formal(p: PdeProblem, T: int) -> float:
    """Largest coefficient of (xi^a eta^a' - A0) B(w) - rhs, with w = y - h, over degrees <= T."""
    ce = prepare_ce(p, T)
    Y = [formal_borel(w, ce.mo) for w in ce.w]
    lhs = ce_lhs(p, Y, ce)
    rhs = build_ce_rhs(p, Y, T, ce)
    worst = _max_abs([a.body.sub(b.body) for a, b in zip(lhs, rhs)])
    return max(worst, ce.c_tilde_head)


# ---------------------------------------------------------------------------
# companion system for operator polynomials in e^a' X_lambda

def companion_system(p: PdeProblem, b: Sequence, l: int, shifted: bool = False) -> PdeProblem:
    """First-order system of size lN for (e^a' X)^l y + sum_j a_j (e^a' X)^j y = F.

    Slots are (y_0, ..., y_{l-1}) with y_j = (e^a' X)^j y. The last slot is
    F(x, e, y_0) - a_1 y_0 - ... as displayed in the source statement
    (a_j multiplies y_{j-1}); with ``shifted=True`` a_j multiplies y_j, which
    is the reduction of the scalar equation. a_j = <mu,alpha>^{j-l} b_j.
    """
    if l < 2:
        raise InputError("companion system needs l >= 2")
    b = list(b)
    if len(b) != l - 1:
        raise InputError("expected l - 1 coefficients b_1 .. b_{l-1}")
    N, ex = p.N, p.exact
    ma = p.mu_alpha if ex else float(p.mu_alpha)
    NN = l * N
    zx, ze = (0,) * p.n, (0,) * p.m
    one = Fraction(1) if ex else 1.0
    G: Dict[Key, np.ndarray] = {}

    def put(key, row, val):
        vec = G.setdefault(key, _vec([0] * NN, NN, ex))
        vec[row] = vec[row] + val

    for r in range(l - 1):
        for i in range(N):
            I = [0] * NN
            I[(r + 1) * N + i] = 1
            put((zx, ze, tuple(I)), r * N + i, ma * one)
    last = (l - 1) * N
    scale = ma ** (1 - l)
    for (bx, be, I), v in p.G.items():
        Iw = tuple(I) + (0,) * ((l - 1) * N)
        for i in range(N):
            if v[i] != 0:
                put((bx, be, Iw), last + i, v[i] * scale)
    for jdx, bj in enumerate(b, start=1):
        Bm = np.asarray(bj, dtype=object if ex else complex)
        if Bm.ndim == 0:
            Bm = np.eye(N, dtype=object if ex else complex) * Bm
        aj = Bm * (ma ** (jdx - l))
        slot = jdx if shifted else jdx - 1
        for i in range(N):
            for k in range(N):
                if aj[i][k] != 0:
                    I = [0] * NN
                    I[slot * N + k] = 1
                    put((zx, ze, tuple(I)), last + i, -ma * aj[i][k])
    return PdeProblem(p.n, p.m, NN, p.alpha, p.alpha_prime, p.mu, G, ex)


# ---------------------------------------------------------------------------
# Nagumo norms

def _polydisc_grid(n: int, r: float, n_radial: int, n_angle: int) -> np.ndarray:
    radii = r * np.arange(n_radial) / (n_radial - 1)
    angles = 2 * np.pi * np.arange(n_angle) / n_angle
    one = (radii[:, None] * np.exp(1j * angles)[None, :]).reshape(-1)
    grids = np.meshgrid(*([one] * n), indexing="ij")
    return np.stack([g.reshape(-1) for g in grids], axis=1)


def nagumo_norm(f: TruncatedSeries, l: int, r: float, n_radial: int = 8, n_angle: int = 8,
                points: np.ndarray | None = None) -> float:
    """Grid supremum of |f(x)| prod_j (r - |x_j|)^l over the closed polydisc of radius r."""
    if r <= 0:
        raise InputError("radius must be positive")
    pts = points if points is not None else _polydisc_grid(f.dim, r, n_radial, n_angle)
    vals = np.linalg.norm(f.evaluate(pts), axis=1)
    weight = np.prod(np.clip(r - np.abs(pts), 0.0, None) ** l, axis=1)
    return float(np.max(vals * weight))


def nagumo_checks(f: TruncatedSeries, g: TruncatedSeries, l: int, k: int, r: float,
                  n_radial: int = 8, n_angle: int = 8) -> Dict[str, Tuple[float, float]]:
    """(lhs, rhs) pairs for the product, derivative and monotonicity inequalities."""
    pts = _polydisc_grid(f.dim, r, n_radial, n_angle)
    nf = nagumo_norm(f, l, r, points=pts)
    ng = nagumo_norm(g, k, r, points=pts)
    out = {"product": (nagumo_norm(f.mul(g), l + k, r, points=pts), nf * ng),
           "monotone": (nagumo_norm(f, l + 1, r, points=pts), r ** f.dim * nf)}
    const = np.e * (l + 1) * r ** (f.dim - 1)
    for j in range(f.dim):
        e = [0] * f.dim
        e[j] = 1
        out[f"derivative_{j + 1}"] = (nagumo_norm(f.derivative(e), l + 1, r, points=pts), const * nf)
    return out
