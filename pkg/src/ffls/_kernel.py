"""Dense polynomial multiplication over small finite fields.

Three routes, picked by size:
  * schoolbook in Python for tiny inputs,
  * ``numpy.convolve`` with a final reduction mod p,
  * Kronecker substitution into big integers (gmpy2 when available) for large
    inputs, which is what keeps degree ~10^5 products cheap.
Extension fields over a prime field are handled by spreading each coefficient
into its F_p coordinates, multiplying as one F_p polynomial and reducing the
coordinate axis by the field modulus.
"""
import numpy as np

try:
    import gmpy2
except ImportError:  # pragma: no cover - exercised only without gmpy2
    gmpy2 = None

SCHOOLBOOK = 400
CONVOLVE = 4_000_000


def _as_array(a):
    return np.asarray(a, dtype=np.int64)


def _kronecker(a, b, p):
    n = min(len(a), len(b))
    bound = (p - 1) * (p - 1) * n
    if bound < 2 ** 32:
        dt, width = "<u4", 4
    else:
        dt, width = "<u8", 8
    x = int.from_bytes(a.astype(dt).tobytes(), "little")
    y = int.from_bytes(b.astype(dt).tobytes(), "little")
    if gmpy2 is not None:
        z = int(gmpy2.mpz(x) * gmpy2.mpz(y))
    else:
        z = x * y
    m = len(a) + len(b) - 1
    raw = z.to_bytes(m * width, "little")
    return np.frombuffer(raw, dtype=dt).astype(np.int64) % p


def mul_prime(a, b, p):
    """Product of integer coefficient arrays modulo p (untrimmed, full length)."""
    a, b = _as_array(a), _as_array(b)
    la, lb = len(a), len(b)
    if la == 0 or lb == 0:
        return np.zeros(0, dtype=np.int64)
    work = la * lb
    if work <= SCHOOLBOOK or min(la, lb) <= 8:
        if min(la, lb) <= 8 and work > SCHOOLBOOK:
            short, long_ = (a, b) if la <= lb else (b, a)
            out = np.zeros(la + lb - 1, dtype=np.int64)
            for i, c in enumerate(short.tolist()):
                if c:
                    out[i:i + len(long_)] += c * long_
            return out % p
        out = np.convolve(a, b)
        return out % p
    if work <= CONVOLVE:
        return np.convolve(a, b) % p
    return _kronecker(a, b, p)


def _reduce_coords(arr, modulus, p):
    """Reduce rows of F_p coordinate vectors of length <= 2e-1 modulo a monic modulus."""
    e = len(modulus) - 1
    mod = np.asarray(modulus[:e], dtype=np.int64)
    arr = arr % p
    for j in range(arr.shape[1] - 1, e - 1, -1):
        c = arr[:, j]
        if c.any():
            arr[:, j - e:j] = (arr[:, j - e:j] - c[:, None] * mod[None, :]) % p
    return arr[:, :e]


def mul(F, a, b, n=None):
    """Product of two code sequences over the field F, optionally truncated to n terms."""
    a, b = _as_array(a), _as_array(b)
    if n is not None:
        a, b = a[:n], b[:n]
    if len(a) == 0 or len(b) == 0:
        return np.zeros(0, dtype=np.int64)
    if F.is_prime:
        out = mul_prime(a, b, F.p)
    elif F.base.is_prime:
        out = _mul_ext(F, a, b)
    else:
        out = _mul_generic(F, a.tolist(), b.tolist(), n)
    if n is not None:
        out = out[:n]
    return out


def _mul_ext(F, a, b):
    p, e = F.p, F.degree
    s = 2 * e - 1
    da, db = F.digits_np(a), F.digits_np(b)
    fa = np.zeros((len(a), s), dtype=np.int64)
    fb = np.zeros((len(b), s), dtype=np.int64)
    fa[:, :e] = da
    fb[:, :e] = db
    prod = mul_prime(fa.ravel(), fb.ravel(), p)
    m = len(a) + len(b) - 1
    full = np.zeros(m * s, dtype=np.int64)
    full[:len(prod)] = prod[:m * s]
    coords = _reduce_coords(full.reshape(m, s), F.modulus, p)
    w = p ** np.arange(e, dtype=np.int64)
    return coords @ w


def _mul_generic(F, a, b, n=None):
    la, lb = len(a), len(b)
    m = la + lb - 1 if n is None else min(n, la + lb - 1)
    out = [0] * m
    add, mul_t = F.add, F.mul
    for i, x in enumerate(a):
        if not x or i >= m:
            continue
        row = mul_t[x]
        for j in range(min(lb, m - i)):
            y = b[j]
            if y:
                out[i + j] = add[out[i + j]][row[y]]
    return np.asarray(out, dtype=np.int64)


def add(F, a, b):
    """Coefficientwise sum of code arrays of possibly different length."""
    a, b = _as_array(a), _as_array(b)
    if len(a) < len(b):
        a, b = b, a
    out = a.copy()
    if len(b):
        out[:len(b)] = F.add_np[a[:len(b)], b]
    return out


def sub(F, a, b):
    a, b = _as_array(a), _as_array(b)
    m = max(len(a), len(b))
    out = np.zeros(m, dtype=np.int64)
    out[:len(a)] = a
    if len(b):
        out[:len(b)] = F.sub_np[out[:len(b)], b]
    return out


def scale(F, c, a):
    a = _as_array(a)
    return F.mul_np[c][a] if len(a) else a


def neg(F, a):
    a = _as_array(a)
    return F.neg_np[a] if len(a) else a


def trim(a):
    """Drop trailing zeros of a code array."""
    nz = np.flatnonzero(a)
    return a[:nz[-1] + 1] if len(nz) else a[:0]


def spread(a, k):
    """Insert k-1 zeros between coefficients: f(x) -> f(x^k)."""
    a = _as_array(a)
    if k == 1 or len(a) == 0:
        return a
    out = np.zeros((len(a) - 1) * k + 1, dtype=np.int64)
    out[::k] = a
    return out
