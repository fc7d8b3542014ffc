"""Truncated multivariate formal power series with vector coefficients.

Coefficients live in a sparse dict keyed by exponent tuples. Numeric series
use complex128 vectors; exact series use object vectors of Fractions (or
``GammaRational`` values in the Borel plane). Truncation is by total degree.
"""

from __future__ import annotations

import csv
import io
from fractions import Fraction
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np

from .errors import InputError
from .exact import to_exact

MultiIndex = Tuple[int, ...]


def leq(a: Sequence[int], b: Sequence[int]) -> bool:
    """Componentwise partial order a <= b."""
    return all(x <= y for x, y in zip(a, b))


def degree(beta: Sequence[int]) -> int:
    return int(sum(beta))


class TruncatedSeries:
    __slots__ = ("dim", "N", "trunc", "coeffs", "exact", "_arrays")

    def __init__(self, dim: int, coeffs: Dict[MultiIndex, object], trunc: int,
                 N: int = 1, exact: bool = False, check: bool = True):
        self.dim = int(dim)
        self.N = int(N)
        self.trunc = int(trunc)
        self.exact = bool(exact)
        self._arrays = None
        dtype = object if exact else complex
        out = {}
        for key, val in coeffs.items():
            key = tuple(int(e) for e in key)
            if check:
                if len(key) != self.dim or min(key, default=0) < 0:
                    raise InputError(f"bad exponent {key} for dim {self.dim}")
            if sum(key) > self.trunc:
                continue
            v = np.asarray(val, dtype=dtype).reshape(-1) if not exact else _exact_vec(val)
            if v.shape[0] == 1 and self.N > 1:
                v = np.repeat(v, self.N)
            if v.shape[0] != self.N:
                raise InputError(f"coefficient length {v.shape[0]} != N={self.N}")
            if not exact and not np.any(v):
                continue
            out[key] = v
        self.coeffs = out

    # constructors -------------------------------------------------------
    @classmethod
    def zero(cls, dim, trunc, N=1, exact=False):
        return cls(dim, {}, trunc, N, exact)

    @classmethod
    def monomial(cls, beta, trunc, coef=1, N=1, exact=False):
        return cls(len(beta), {tuple(beta): coef}, trunc, N, exact)

    @classmethod
    def constant(cls, dim, value, trunc, N=1, exact=False):
        return cls(dim, {(0,) * dim: value}, trunc, N, exact)

    @classmethod
    def variable(cls, dim, j, trunc, exact=False):
        e = [0] * dim
        e[j] = 1
        return cls(dim, {tuple(e): 1}, trunc, 1, exact)

    def _new(self, coeffs, trunc=None, N=None, exact=None):
        return TruncatedSeries(self.dim, coeffs, self.trunc if trunc is None else trunc,
                               self.N if N is None else N,
                               self.exact if exact is None else exact, check=False)

    # access -------------------------------------------------------------
    def __getitem__(self, beta) -> np.ndarray:
        v = self.coeffs.get(tuple(beta))
        if v is None:
            return self._zero_vec()
        return v

    def _zero_vec(self) -> np.ndarray:
        if self.exact:
            z = np.empty(self.N, dtype=object)
            z[:] = Fraction(0)
            return z
        return np.zeros(self.N, dtype=complex)

    def coef(self, beta, comp: int = 0):
        return self[beta][comp]

    def keys(self) -> List[MultiIndex]:
        return sorted(self.coeffs, key=lambda b: (sum(b), b))

    def items(self):
        for k in self.keys():
            yield k, self.coeffs[k]

    def __len__(self):
        return len(self.coeffs)

    def __repr__(self):
        head = ", ".join(f"{k}: {v.tolist()}" for k, v in list(self.items())[:6])
        more = " ..." if len(self) > 6 else ""
        return f"TruncatedSeries(dim={self.dim}, N={self.N}, T={self.trunc}, {{{head}{more}}})"

    def arrays(self):
        """Exponent matrix (K, d) and value matrix (K, N), cached."""
        if self._arrays is None:
            keys = list(self.coeffs)
            E = np.array(keys, dtype=np.int64).reshape(len(keys), self.dim)
            if keys:
                V = np.stack([self.coeffs[k] for k in keys])
            else:
                V = np.zeros((0, self.N), dtype=object if self.exact else complex)
            self._arrays = (E, V)
        return self._arrays

    # comparisons ----------------------------------------------------------
    def max_abs_diff(self, other: "TruncatedSeries") -> float:
        self._check(other)
        worst = 0.0
        for k in set(self.coeffs) | set(other.coeffs):
            d = self[k] - other[k]
            for x in d:
                if x != 0:
                    worst = max(worst, abs(complex(x)))
        return worst

    def is_zero(self) -> bool:
        return all(all(x == 0 for x in v) for v in self.coeffs.values())

    def equals(self, other: "TruncatedSeries") -> bool:
        """Exact coefficientwise equality on the common truncated support."""
        T = min(self.trunc, other.trunc)
        return self.truncate(T).max_abs_diff(other.truncate(T)) == 0

    # mode ---------------------------------------------------------------
    def to_numeric(self) -> "TruncatedSeries":
        if not self.exact:
            return self
        return TruncatedSeries(self.dim, {k: np.array([complex(x) for x in v]) for k, v in self.coeffs.items()},
                               self.trunc, self.N, False, check=False)

    def to_exact(self) -> "TruncatedSeries":
        if self.exact:
            return self
        return TruncatedSeries(self.dim, {k: [to_exact(complex(x)) for x in v] for k, v in self.coeffs.items()},
                               self.trunc, self.N, True, check=False)

    def component(self, i: int) -> "TruncatedSeries":
        return self._new({k: v[i:i + 1] for k, v in self.coeffs.items()}, N=1)

    @classmethod
    def stack(cls, comps: Sequence["TruncatedSeries"]) -> "TruncatedSeries":
        c0 = comps[0]
        T = min(c.trunc for c in comps)
        keys = set().union(*(c.coeffs for c in comps))
        coeffs = {k: np.concatenate([c[k] for c in comps]) for k in keys}
        return cls(c0.dim, coeffs, T, sum(c.N for c in comps), c0.exact, check=False)

    # arithmetic -------------------------------------------------------------
    def _check(self, other):
        if not isinstance(other, TruncatedSeries):
            raise InputError("expected a TruncatedSeries")
        if other.dim != self.dim:
            raise InputError(f"dimension mismatch {self.dim} vs {other.dim}")
        if other.exact != self.exact:
            raise InputError("cannot mix exact and numeric series")

    def truncate(self, T: int) -> "TruncatedSeries":
        T = min(T, self.trunc)
        return self._new({k: v for k, v in self.coeffs.items() if sum(k) <= T}, trunc=T)

    def add(self, other: "TruncatedSeries") -> "TruncatedSeries":
        self._check(other)
        if other.N != self.N:
            raise InputError(f"vector length mismatch {self.N} vs {other.N}")
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out[k] + v if k in out else v
        return self._new(out, trunc=min(self.trunc, other.trunc))

    def scale(self, c) -> "TruncatedSeries":
        if not self.exact:
            c = complex(c)
        return self._new({k: v * c for k, v in self.coeffs.items()})

    def neg(self):
        return self.scale(-1)

    def sub(self, other):
        return self.add(other.neg())

    def __add__(self, other):
        if isinstance(other, TruncatedSeries):
            return self.add(other)
        return self.add(TruncatedSeries.constant(self.dim, other, self.trunc, self.N, self.exact))

    __radd__ = __add__

    def __neg__(self):
        return self.neg()

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            return self.mul(other)
        return self.scale(other)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        return self.power(n)

    def mul(self, other: "TruncatedSeries") -> "TruncatedSeries":
        """Cauchy product truncated at min(T_a, T_b)."""
        self._check(other)
        if self.N != other.N and 1 not in (self.N, other.N):
            raise InputError(f"incompatible coefficient shapes N={self.N} and N={other.N}")
        T = min(self.trunc, other.trunc)
        N = max(self.N, other.N)
        if not self.coeffs or not other.coeffs:
            return self._new({}, trunc=T, N=N)
        if self.N == other.N and self.N > 1:
            raise InputError("product of two vector-valued series is undefined")
        E1, V1 = self.arrays()
        E2, V2 = other.arrays()
        deg1 = E1.sum(axis=1)
        deg2 = E2.sum(axis=1)
        i1, i2 = np.nonzero(deg1[:, None] + deg2[None, :] <= T)
        if i1.size == 0:
            return self._new({}, trunc=T, N=N)
        E = E1[i1] + E2[i2]
        V = V1[i1] * V2[i2]
        base = T + 1
        codes = np.zeros(E.shape[0], dtype=np.int64)
        for j in range(self.dim):
            codes = codes * base + E[:, j]
        uniq, first, inv = np.unique(codes, return_index=True, return_inverse=True)
        inv = inv.reshape(-1)
        if self.exact:
            acc = np.empty((uniq.size, N), dtype=object)
            acc[:] = Fraction(0)
            for r, slot in enumerate(inv):
                acc[slot] = acc[slot] + V[r]
        else:
            acc = np.zeros((uniq.size, N), dtype=complex)
            np.add.at(acc, inv, V)
        keys = [tuple(int(e) for e in E[f]) for f in first]
        return self._new(dict(zip(keys, acc)), trunc=T, N=N)

    def power(self, n: int) -> "TruncatedSeries":
        if n < 0:
            raise InputError("negative powers are not supported")
        if n == 0:
            return TruncatedSeries.constant(self.dim, 1, self.trunc, 1, self.exact)
        result = None
        base = self
        while n:
            if n & 1:
                result = base if result is None else result.mul(base)
            n >>= 1
            if n:
                base = base.mul(base)
        return result

    def shift(self, gamma: Sequence[int], trunc: int | None = None) -> "TruncatedSeries":
        """Multiply by the monomial x^gamma."""
        g = tuple(gamma)
        return self._new({tuple(a + b for a, b in zip(k, g)): v for k, v in self.coeffs.items()},
                         trunc=self.trunc if trunc is None else trunc)

    def select(self, predicate) -> "TruncatedSeries":
        return self._new({k: v for k, v in self.coeffs.items() if predicate(k)})

    def map_coeffs(self, fn) -> "TruncatedSeries":
        """Apply fn(beta, vector) -> vector termwise."""
        return self._new({k: fn(k, v) for k, v in self.coeffs.items()})

    # evaluation --------------------------------------------------------
    def evaluate(self, points) -> np.ndarray:
        """Evaluate at points of shape (P, d) or (d,); returns (P, N) or (N,)."""
        pts = np.asarray(points, dtype=complex)
        single = pts.ndim == 1
        pts = pts.reshape(-1, self.dim)
        num = self.to_numeric()
        E, V = num.arrays()
        if E.shape[0] == 0:
            out = np.zeros((pts.shape[0], self.N), dtype=complex)
        else:
            mono = np.ones((pts.shape[0], E.shape[0]), dtype=complex)
            for j in range(self.dim):
                mono *= pts[:, j:j + 1] ** E[None, :, j]
            out = mono @ V.astype(complex)
        return out[0] if single else out

    # differential operators and substitutions ---------------------------
    def derivative(self, beta: Sequence[int]) -> "TruncatedSeries":
        beta = tuple(beta)
        out = {}
        for k, v in self.coeffs.items():
            if not leq(beta, k):
                continue
            factor = 1
            for kj, bj in zip(k, beta):
                for t in range(bj):
                    factor *= kj - t
            out[tuple(a - b for a, b in zip(k, beta))] = v * factor
        return self._new(out, trunc=max(self.trunc - sum(beta), 0))

    def substitute_blowup(self, i: int, j: int) -> "TruncatedSeries":
        """f o pi_ij: x^beta -> x^beta * x_i^{beta_j} (0-based indices)."""
        if i == j:
            raise InputError("blow-up needs i != j")
        if not (0 <= i < self.dim and 0 <= j < self.dim):
            raise InputError("blow-up index out of range")
        out = {}
        for k, v in self.coeffs.items():
            e = list(k)
            e[i] += k[j]
            if sum(e) <= self.trunc:
                out[tuple(e)] = v
        return self._new(out)

    def apply_vector_field(self, mo) -> "TruncatedSeries":
        """X_lambda: x^beta -> <beta, lambda> x^{beta + k alpha_J}."""
        if mo.dim != self.dim:
            raise InputError("monomial order dimension mismatch")
        shift = mo.k_alpha_int()
        lam = mo.lam if self.exact else mo.lam_float
        out = {}
        for k, v in self.coeffs.items():
            w = sum(a * b for a, b in zip(k, lam))
            if w == 0:
                continue
            out[tuple(a + b for a, b in zip(k, shift))] = v * w
        return self._new(out, trunc=self.trunc + sum(shift))

    def ramify(self, alpha: Sequence[int]) -> List[Tuple[MultiIndex, "TruncatedSeries"]]:
        """Split f = sum_{0<=beta<alpha} x^beta f_beta(x^alpha)."""
        alpha = tuple(int(a) for a in alpha)
        if len(alpha) != self.dim or min(alpha) < 1:
            raise InputError("ramification exponents must be positive")
        buckets: Dict[MultiIndex, dict] = {}
        for k, v in self.coeffs.items():
            beta = tuple(e % a for e, a in zip(k, alpha))
            q = tuple(e // a for e, a in zip(k, alpha))
            buckets.setdefault(beta, {})[q] = v
        amin = min(alpha)
        out = []
        for beta in _box(alpha):
            Tb = (self.trunc - sum(beta)) // amin
            if Tb < 0:
                continue
            out.append((beta, self._new(buckets.get(beta, {}), trunc=Tb)))
        return out

    # I/O --------------------------------------------------------------------
    def to_csv(self, names: Sequence[str] | None = None, comments: Sequence[str] = ()) -> str:
        names = list(names) if names else [f"x{j + 1}" for j in range(self.dim)]
        buf = io.StringIO()
        buf.write(f"# trunc={self.trunc}\n")
        for c in comments:
            buf.write(f"# {c}\n")
        w = csv.writer(buf, lineterminator="\n")
        header = names + [f"c{i + 1}_{p}" for i in range(self.N) for p in ("re", "im")]
        w.writerow(header)
        for k, v in self.items():
            if all(x == 0 for x in v):
                continue
            row = [str(e) for e in k]
            for x in v:
                z = complex(x)
                row += [fmt_float(z.real), fmt_float(z.imag)]
            w.writerow(row)
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, exact: bool = False):
        """Parse the series CSV format. Returns (series, names, comment dict)."""
        meta = {}
        lines = []
        for line in text.splitlines():
            s = line.strip()
            if not s:
                continue
            if s.startswith("#"):
                body = s[1:].strip()
                if "=" in body:
                    key, val = body.split("=", 1)
                    meta[key.strip()] = val.strip()
                continue
            lines.append(line)
        if "trunc" not in meta:
            raise InputError("missing '# trunc=T' comment line")
        if not lines:
            raise InputError("missing header row")
        rows = list(csv.reader(lines))
        header = [h.strip() for h in rows[0]]
        d = next((i for i, h in enumerate(header) if h.endswith("_re")), len(header))
        ncoef = len(header) - d
        if ncoef <= 0 or ncoef % 2:
            raise InputError("expected re/im column pairs after the exponent columns")
        N = ncoef // 2
        try:
            T = int(meta["trunc"])
            coeffs = {}
            for r in rows[1:]:
                if len(r) != len(header):
                    raise InputError(f"row has {len(r)} fields, expected {len(header)}")
                key = tuple(int(x) for x in r[:d])
                vals = [float(x) for x in r[d:]]
                vec = [complex(vals[2 * i], vals[2 * i + 1]) for i in range(N)]
                if exact:
                    vec = [to_exact(z) for z in vec]
                coeffs[key] = vec
        except ValueError as exc:
            raise InputError(f"malformed series CSV: {exc}") from exc
        return cls(d, coeffs, T, N, exact), header[:d], meta


def _exact_vec(val) -> np.ndarray:
    if isinstance(val, np.ndarray):
        items = list(val.reshape(-1))
    elif isinstance(val, (list, tuple)):
        items = list(val)
    else:
        items = [val]
    arr = np.empty(len(items), dtype=object)
    for i, x in enumerate(items):
        arr[i] = x if not isinstance(x, (float, complex, np.floating, np.complexfloating)) else to_exact(complex(x))
        if isinstance(arr[i], (int, np.integer)):
            arr[i] = Fraction(int(arr[i]))
    return arr


def _box(alpha: Sequence[int]) -> Iterable[MultiIndex]:
    """All beta with 0 <= beta < alpha componentwise, lexicographic."""
    if not alpha:
        yield ()
        return
    for b0 in range(alpha[0]):
        for rest in _box(alpha[1:]):
            yield (b0,) + rest


def reassemble(parts, alpha: Sequence[int], trunc: int) -> TruncatedSeries:
    """Inverse of ramify: sum_beta x^beta f_beta(x^alpha), truncated at trunc."""
    alpha = tuple(alpha)
    out: Dict[MultiIndex, object] = {}
    dim = len(alpha)
    N, exact = 1, False
    for beta, fb in parts:
        N, exact = fb.N, fb.exact
        for q, v in fb.coeffs.items():
            key = tuple(b + a * e for b, a, e in zip(beta, alpha, q))
            out[key] = out[key] + v if key in out else v
    return TruncatedSeries(dim, out, trunc, N, exact)


def fmt_float(x: float) -> str:
    """Deterministic 17-significant-digit rendering."""
    x = float(x)
    if x == 0:
        return "0"
    return format(x, ".17g")
