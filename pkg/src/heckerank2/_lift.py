"""Exact multiplication tables from modular evaluations.

The structure constants on the slice a_<orbit>_0 = 1 are integer polynomials
in the remaining Hecke coefficients.  They are recovered in three steps:

1. probe the degree in each variable along random lines;
2. evaluate the enumerator on a product grid of that size and interpolate
   axis by axis, lifting residues to symmetric integers (CRT over several
   primes when one is not enough);
3. certify the candidate exactly: it must satisfy every Hecke and braid
   relation and send the identity to each basis vector under the basis words.

Step 3 makes the result independent of the probabilistic steps: a table
passing it defines a module over the Hecke algebra that is cyclic on the
identity with the basis words acting freely, which by freeness of rank |W|
is the regular representation.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field

import flint
import numpy as np

from ._enumerate import DEFAULT_PRIMES, BadPoint, enumerate_points, vinv

log = logging.getLogger(__name__)


class CertificationFailed(ArithmeticError):
    pass


@dataclass
class PointFamily:
    """Hecke coefficients as functions of free variables.

    ``hecke(values)`` maps a dict name -> array of residues to the dict
    generator -> [a_0, ..., a_{e-1}] of arrays; ``exact`` gives the same
    coefficients as flint polynomials in ``ctx``.
    """

    names: list
    hecke: callable
    exact: callable


@dataclass
class ExactTable:
    ctx: object
    names: list
    rows: dict                       # g -> list of {k: fmpz_mpoly}
    degrees: dict = field(default_factory=dict)
    primes_used: int = 1
    points: int = 0


def _newton_degrees(vals, xs, p):
    """Degree of the interpolating polynomial of each row of ``vals`` (-1 for zero)."""
    c = vals.copy() % p
    M = len(xs)
    for j in range(1, M):
        diff = np.array([(xs[i] - xs[i - j]) % p for i in range(j, M)], dtype=np.int64)
        inv = vinv(diff, p)
        c[:, j:] = (c[:, j:] - c[:, j - 1:-1]) % p * inv % p
    nz = c != 0
    last = np.where(nz.any(axis=1), M - 1 - np.argmax(nz[:, ::-1], axis=1), -1)
    return last


def _entries(tab):
    for g, rows in tab.items():
        for j, row in enumerate(rows):
            for k, c in row.items():
                yield (g, j, k), c


def _run(gens, braids, basis, fam, values, p, n):
    hecke = fam.hecke(values, p, n)
    return enumerate_points(gens, hecke, braids, basis, p).table()


def probe_degrees(gens, braids, basis, fam, p, rng, start=6, cap=64):
    """Max degree of the table entries in each variable, via random lines."""
    nv = len(fam.names)
    M = start
    while True:
        n = nv * M
        base = rng.integers(2, p - 1, nv)
        xs = [rng.integers(2, p - 1, M) for _ in range(nv)]
        if any(len(set(x.tolist())) < M for x in xs):
            continue
        values = {}
        for i, name in enumerate(fam.names):
            col = np.full(n, base[i], dtype=np.int64)
            col[i * M:(i + 1) * M] = xs[i]
            values[name] = col
        try:
            tab = _run(gens, braids, basis, fam, values, p, n)
        except BadPoint:
            continue
        keys, arrs = zip(*_entries(tab))
        arrs = np.array(arrs)
        degs = {}
        ok = True
        for i, name in enumerate(fam.names):
            d = int(_newton_degrees(arrs[:, i * M:(i + 1) * M], [int(x) for x in xs[i]], p).max())
            if d >= M - 2:
                ok = False
            degs[name] = d
        if ok:
            return degs
        if M >= cap:
            raise CertificationFailed("degree probe did not stabilise below %d" % cap)
        M *= 2


def _inv_vandermonde(xs, p):
    """Inverse of V[i][m] = xs[i]^m modulo p (solves values -> coefficients)."""
    n = len(xs)
    A = [[pow(x, m, p) for m in range(n)] + [int(i == r) for r in range(n)] for i, x in enumerate(xs)]
    for c in range(n):
        piv = next(r for r in range(c, n) if A[r][c])
        A[c], A[piv] = A[piv], A[c]
        inv = pow(A[c][c], p - 2, p)
        A[c] = [v * inv % p for v in A[c]]
        for r in range(n):
            if r != c and A[r][c]:
                f = A[r][c]
                A[r] = [(v - f * w) % p for v, w in zip(A[r], A[c])]
    return np.array([row[n:] for row in A], dtype=np.int64)


def _apply_axis(arr, mat, axis, p):
    """Contract ``mat`` (n x n) against ``arr`` along ``axis`` modulo p."""
    arr = np.moveaxis(arr, axis, -1)
    out = np.zeros_like(arr)
    for m in range(mat.shape[1]):
        out = (out + arr[..., m:m + 1] * mat[:, m] % p) % p
    return np.moveaxis(out, -1, axis)


def interpolate_modular(gens, braids, basis, fam, degrees, p, rng, chunk=400):
    """Coefficient tensors modulo p for every nonzero table entry."""
    names = fam.names
    shape = tuple(degrees[nm] + 1 for nm in names)
    npts = math.prod(shape)
    for _ in range(20):
        nodes = [rng.integers(2, p - 1, s) for s in shape]
        if any(len(set(x.tolist())) < len(x) for x in nodes):
            continue
        try:
            return _interpolate_on(gens, braids, basis, fam, nodes, shape, p, chunk)
        except BadPoint:
            log.info("pivot vanished on the grid; resampling")
    raise CertificationFailed("could not find a grid avoiding vanishing pivots")


def _interpolate_on(gens, braids, basis, fam, nodes, shape, p, chunk):
    names = fam.names
    npts = math.prod(shape)
    grid = np.array(list(itertools.product(*[range(s) for s in shape])), dtype=np.int64).reshape(npts, len(names))
    vals = {}
    start = 0
    while start < npts:
        stop = min(npts, start + chunk)
        n = stop - start
        values = {nm: nodes[i][grid[start:stop, i]] for i, nm in enumerate(names)}
        tab = _run(gens, braids, basis, fam, values, p, n)
        for key, c in _entries(tab):
            a = vals.get(key)
            if a is None:
                a = vals[key] = np.zeros(npts, dtype=np.int64)
            a[start:stop] = c
        start = stop
    keys = list(vals)
    arr = np.array([vals[k] for k in keys]).reshape((len(keys),) + shape)
    for i, x in enumerate(nodes):
        arr = _apply_axis(arr, _inv_vandermonde([int(v) for v in x], p), i + 1, p)
    return keys, arr


def _symmetric(residues, modulus):
    half = modulus // 2
    return [int(r) - modulus if int(r) > half else int(r) for r in residues]


def build_exact_table(gens, braids, basis, fam, ctx, seed=0, primes=DEFAULT_PRIMES, chunk=400):
    """Interpolate and certify; returns an :class:`ExactTable`."""
    rng = np.random.default_rng(seed)
    degrees = probe_degrees(gens, braids, basis, fam, primes[0], rng)
    log.info("degrees %s", degrees)
    shape = tuple(degrees[nm] + 1 for nm in fam.names)
    residues = []
    failure = None
    for np_used, p in enumerate(primes, start=1):
        keys, arr = interpolate_modular(gens, braids, basis, fam, degrees, p, rng, chunk)
        residues.append((p, dict(zip(keys, arr))))
        rows = _combine(gens, len(basis), residues, shape, ctx)
        try:
            certify(ctx, rows, gens, braids, basis, fam)
        except CertificationFailed as exc:
            failure = exc
            log.info("certification with %d prime(s) failed: %s", np_used, exc)
            continue
        return ExactTable(ctx, list(fam.names), rows, degrees, np_used, math.prod(shape))
    raise failure


def _combine(gens, N, residues, shape, ctx):
    keys = set()
    for _, d in residues:
        keys.update(d)
    modulus = math.prod(p for p, _ in residues)
    rows = {g: [dict() for _ in range(N)] for g in gens}
    idx = list(itertools.product(*[range(s) for s in shape]))
    for key in keys:
        flat = []
        for p, d in residues:
            a = d.get(key)
            flat.append(np.zeros(len(idx), dtype=np.int64) if a is None else a.reshape(-1))
        if len(residues) == 1:
            coeffs = _symmetric(flat[0], modulus)
        else:
            coeffs = []
            for t in range(len(idx)):
                r = 0
                m = 1
                for (p, _), a in zip(residues, flat):
                    # incremental CRT
                    x = int(a[t])
                    r = r + m * ((x - r) * pow(m, -1, p) % p)
                    m *= p
                coeffs.append(r)
            coeffs = _symmetric(coeffs, modulus)
        poly = ctx.from_dict({e: c for e, c in zip(idx, coeffs) if c})
        if poly != 0:
            g, j, k = key
            rows[g][j][k] = poly
    return rows


# exact certification

def _axpy(out, c, vec):
    for k, x in vec.items():
        y = out.get(k)
        out[k] = c * x if y is None else y + c * x


def _clean(v):
    return {k: x for k, x in v.items() if x != 0}


def apply_gen(rows, g, v):
    out = {}
    for j, c in v.items():
        _axpy(out, c, rows[g][j])
    return _clean(out)


def apply_power(rows, coeffs, g, k, v):
    """g^k v with coeffs = exact Hecke coefficients of g (a_0 = 1 or a unit)."""
    if k >= 0:
        for _ in range(k):
            v = apply_gen(rows, g, v)
        return v
    e = len(coeffs)
    a0 = coeffs[0]
    for _ in range(-k):
        pw = [v]
        for _ in range(e - 1):
            pw.append(apply_gen(rows, g, pw[-1]))
        out = dict(pw[e - 1])
        for i in range(e - 1):
            _axpy(out, -coeffs[i + 1], pw[i])
        out = _clean(out)
        if a0 != 1:
            out = {k_: _divexact(x, a0) for k_, x in out.items()}
        v = out
    return v


def _divexact(x, d):
    q, r = divmod(x, d)
    if r != 0:
        raise CertificationFailed("a_0 does not divide")
    return q


def apply_word(rows, hecke, word, v):
    for g, k in reversed(word):
        v = apply_power(rows, hecke[g], g, k, v)
    return v


def certify(ctx, rows, gens, braids, basis, fam):
    hecke = fam.exact(ctx)
    N = len(basis)
    for j in range(N):
        ej = {j: ctx.constant(1)}
        for g in gens:
            a = hecke[g]
            pw = [ej]
            for _ in range(len(a)):
                pw.append(apply_gen(rows, g, pw[-1]))
            rhs = {}
            for i, c in enumerate(a):
                if c != 0:
                    _axpy(rhs, c, pw[i])
            if _clean(rhs) != pw[-1]:
                raise CertificationFailed("Hecke relation of %s fails on basis vector %d" % (g, j))
        for l, r in braids:
            if apply_word(rows, hecke, l, ej) != apply_word(rows, hecke, r, ej):
                raise CertificationFailed("braid relation %s = %s fails on basis vector %d" % (l, r, j))
    e0 = {0: ctx.constant(1)}
    for j, w in enumerate(basis):
        if apply_word(rows, hecke, w, e0) != {j: ctx.constant(1)}:
            raise CertificationFailed("basis word %d does not map 1 to its basis vector" % j)
