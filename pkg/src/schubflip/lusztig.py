"""
Exact checks of the factorisation of unipotent upper triangular matrices.

A matrix is a tuple of rows.  Numeric entries are ``Fraction``; symbolic
entries are ``Poly``, sparse polynomials in the parameters ``t_1..t_m`` with
rational coefficients.  Nothing here rounds.
"""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import permutations
from typing import Sequence

from .signs import transition
from .words import apply_move, reduced_words, longest_element

__all__ = [
    "Poly", "identity", "lusztig_product", "symbolic_product", "det", "det_leibniz",
    "minor_D", "corner_D", "in_big_cell", "exponents_of", "check_monomiality",
    "two_move_params", "three_move_params", "moved_params",
    "verify_move_invariance", "random_move_trials", "realize_sign_transitions",
    "sign_bridge",
]


class Poly:
    """Sparse polynomial: ``{exponent tuple: Fraction}``."""

    __slots__ = ("terms", "nvars")

    def __init__(self, terms: dict | None = None, nvars: int = 0):
        self.nvars = nvars
        self.terms = {e: c for e, c in (terms or {}).items() if c != 0}

    @classmethod
    def const(cls, c, nvars: int) -> "Poly":
        return cls({(0,) * nvars: Fraction(c)}, nvars)

    @classmethod
    def var(cls, l: int, nvars: int) -> "Poly":
        e = [0] * nvars
        e[l] = 1
        return cls({tuple(e): Fraction(1)}, nvars)

    def __add__(self, other: "Poly") -> "Poly":
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return Poly(out, self.nvars)

    def __neg__(self) -> "Poly":
        return Poly({e: -c for e, c in self.terms.items()}, self.nvars)

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return Poly(out, self.nvars)

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and self.terms == other.terms

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in sorted(self.terms.items(), reverse=True):
            mono = "*".join(f"t{l + 1}" + (f"^{p}" if p > 1 else "") for l, p in enumerate(e) if p)
            parts.append(f"{c}*{mono}" if mono and c != 1 else (mono or str(c)))
        return " + ".join(parts)

    def is_monomial(self) -> bool:
        return len(self.terms) == 1


def identity(n: int, one=Fraction(1), zero=Fraction(0)):
    return tuple(tuple(one if r == c else zero for c in range(n)) for r in range(n))


def _times_elementary(rows, i: int, t):
    """Right-multiply by 1 + t E_{i,i+1}: column i+1 gains t times column i (1-based)."""
    out = [list(r) for r in rows]
    for r in out:
        r[i] = r[i] + r[i - 1] * t
    return tuple(tuple(r) for r in out)


def lusztig_product(word: Sequence[int], t: Sequence, n: int | None = None):
    """The product of ``1 + t_l E_{i_l, i_l + 1}`` over the letters of ``word``."""
    if len(word) != len(t):
        raise ValueError(f"{len(word)} letters but {len(t)} parameters")
    if any(x == 0 for x in t):
        raise ValueError("parameters must be nonzero")
    if n is None:
        n = max(word, default=0) + 1
    m = identity(n)
    for i, x in zip(word, t):
        m = _times_elementary(m, i, Fraction(x))
    return m


def symbolic_product(word: Sequence[int], n: int):
    k = len(word)
    m = identity(n, Poly.const(1, k), Poly({}, k))
    for l, i in enumerate(word):
        m = _times_elementary(m, i, Poly.var(l, k))
    return m


def det(rows) -> Fraction:
    """Determinant by fraction-free (Bareiss) elimination."""
    a = [list(r) for r in rows]
    size = len(a)
    if size == 0:
        return Fraction(1)
    sign = 1
    prev = Fraction(1)
    for k in range(size - 1):
        if a[k][k] == 0:
            swap = next((r for r in range(k + 1, size) if a[r][k] != 0), None)
            if swap is None:
                return Fraction(0)
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, size):
            for j in range(k + 1, size):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev
        prev = a[k][k]
    return sign * Fraction(a[-1][-1])


def _perm_sign(p: Sequence[int]) -> int:
    s = 1
    for a in range(len(p)):
        for b in range(a + 1, len(p)):
            if p[a] > p[b]:
                s = -s
    return s


def det_leibniz(rows, zero):
    """Determinant as a signed sum over permutations; works over any ring."""
    size = len(rows)
    total = zero
    for p in permutations(range(size)):
        term = None
        for r, c in enumerate(p):
            term = rows[r][c] if term is None else term * rows[r][c]
        if term is None:
            continue
        total = total + term if _perm_sign(p) > 0 else total - term
    return total


def _submatrix(m, cols: Sequence[int]):
    n = len(m)
    cols = list(cols)
    if not cols or any(c < 1 or c > n for c in cols) or any(a >= b for a, b in zip(cols, cols[1:])):
        raise ValueError(f"column set {cols} must be nonempty, increasing and inside 1..{n}")
    return [[m[r][c - 1] for c in cols] for r in range(len(cols))]


def minor_D(m, cols: Sequence[int]):
    """Determinant on the first ``len(cols)`` rows and the given (1-based) columns."""
    sub = _submatrix(m, cols)
    if isinstance(sub[0][0], Poly):
        return det_leibniz(sub, Poly({}, sub[0][0].nvars))
    return det(sub)


def corner_D(m, k: int):
    n = len(m)
    return minor_D(m, range(n - k + 1, n + 1))


def in_big_cell(m) -> bool:
    return all(corner_D(m, k) != 0 for k in range(1, len(m)))


def exponents_of(word: Sequence[int], n: int, k: int, rng: random.Random) -> tuple | None:
    """Exponent vector of corner minor ``k`` from scaling probes, or None if it
    is not a single monomial.

    Scaling ``t_j`` by 2 multiplies a monomial by ``2**e_j``; the candidate is
    then confirmed at fresh points with a constant coefficient.
    """
    def point():
        return [Fraction(rng.choice([-1, 1]) * rng.randint(1, 9), rng.randint(1, 9))
                for _ in word]

    t = point()
    base = corner_D(lusztig_product(word, t, n), k)
    if base == 0:
        return None
    exps = []
    for j in range(len(word)):
        s = list(t)
        s[j] *= 2
        ratio = corner_D(lusztig_product(word, s, n), k) / base
        if ratio <= 0 or ratio.denominator != 1 or ratio.numerator & (ratio.numerator - 1):
            return None
        exps.append(ratio.numerator.bit_length() - 1)
    coef = None
    for _ in range(3):
        t = point()
        mono = Fraction(1)
        for x, e in zip(t, exps):
            mono *= x ** e
        c = corner_D(lusztig_product(word, t, n), k) / mono
        if coef is None:
            coef = c
        elif c != coef:
            return None
    return tuple(exps), coef


def check_monomiality(word: Sequence[int], n: int | None = None, method: str = "auto",
                      seed: int = 0) -> dict:
    """Is every corner minor of the product a single monomial in the parameters?"""
    word = tuple(word)
    if n is None:
        n = max(word, default=0) + 1
    if method == "auto":
        method = "symbolic" if n <= 5 else "probe"
    minors = []
    if method == "symbolic":
        m = symbolic_product(word, n)
        for k in range(1, n):
            p = corner_D(m, k)
            if p.is_monomial():
                (e, c), = p.terms.items()
                minors.append({"k": k, "monomial": True, "exponents": list(e), "coefficient": str(c)})
            else:
                minors.append({"k": k, "monomial": False, "terms": len(p.terms)})
    elif method == "probe":
        rng = random.Random(seed)
        for k in range(1, n):
            found = exponents_of(word, n, k, rng)
            if found is None:
                minors.append({"k": k, "monomial": False})
            else:
                minors.append({"k": k, "monomial": True, "exponents": list(found[0]),
                               "coefficient": str(found[1])})
    else:
        raise ValueError(f"unknown method {method!r}")
    return {"word": list(word), "n": n, "method": method, "minors": minors,
            "ok": all(x["monomial"] for x in minors)}


def two_move_params(ti, tj):
    return tj, ti


def three_move_params(ti, tj, tk):
    """Parameters after replacing s_j s_{j+1} s_j by s_{j+1} s_j s_{j+1} (or back)."""
    ti, tj, tk = Fraction(ti), Fraction(tj), Fraction(tk)
    s = ti + tk
    if s == 0:
        raise ZeroDivisionError("singular 3-move: t_i + t_{i+2} = 0")
    return tj * tk / s, s, tj * ti / s


def moved_params(t: Sequence, pos: int, kind: str) -> list:
    t = list(t)
    if kind in ("two", "two_move"):
        t[pos], t[pos + 1] = two_move_params(t[pos], t[pos + 1])
    elif kind in ("three", "three_move"):
        t[pos:pos + 3] = three_move_params(*t[pos:pos + 3])
    else:
        raise ValueError(f"unknown move kind {kind!r}")
    return t


def verify_move_invariance(word: Sequence[int], pos: int, kind: str, t: Sequence,
                           n: int | None = None) -> bool:
    if n is None:
        n = max(word, default=0) + 1
    new_word = apply_move(word, pos, kind)
    new_t = moved_params(t, pos, kind)
    return lusztig_product(word, t, n) == lusztig_product(new_word, new_t, n)


def _legal_sites(word):
    sites = [(p, "two") for p in range(len(word) - 1) if abs(word[p] - word[p + 1]) >= 2]
    sites += [(p, "three") for p in range(len(word) - 2)
              if word[p] == word[p + 2] and abs(word[p] - word[p + 1]) == 1]
    return sites


def random_move_trials(n: int, trials: int, seed: int) -> dict:
    rng = random.Random(seed)
    words = reduced_words(longest_element(n))
    failures = []
    kinds = {"two": 0, "three": 0}
    done = 0
    while done < trials:
        word = rng.choice(words)
        pos, kind = rng.choice(_legal_sites(word))
        t = [Fraction(rng.choice([-1, 1]) * rng.randint(1, 30), rng.randint(1, 30)) for _ in word]
        if kind == "three" and t[pos] + t[pos + 2] == 0:
            continue
        done += 1
        kinds[kind] += 1
        if not verify_move_invariance(word, pos, kind, t, n):
            failures.append({"word": list(word), "pos": pos, "kind": kind, "t": [str(x) for x in t]})
    return {"n": n, "seed": seed, "trials": trials, "moves": kinds, "violations": failures}


def _signs(xs) -> tuple[str, ...]:
    return tuple("+" if x > 0 else "-" for x in xs)


def realize_sign_transitions(trials: int = 2000, seed: int = 0) -> dict:
    """Find parameter triples realising each branching sign change, and
    confirm that the forced ones are forced on random samples."""
    rng = random.Random(seed)

    def sample(signs):
        return [Fraction(rng.randint(1, 12), rng.randint(1, 12)) * (1 if s == "+" else -1)
                for s in signs]

    witnesses = []
    for src in (("+", "+", "-"), ("-", "-", "+"), ("+", "-", "-"), ("-", "+", "+")):
        for dst in transition(src).results:
            found = None
            for _ in range(trials):
                t = sample(src)
                if t[0] + t[2] == 0:
                    continue
                out = three_move_params(*t)
                if _signs(out) == dst:
                    found = t
                    break
            witnesses.append({"from": "".join(src), "to": "".join(dst),
                              "witness": [str(x) for x in found] if found else None,
                              "image": [str(x) for x in three_move_params(*found)] if found else None})
    forced = []
    for src in (("+", "+", "+"), ("-", "-", "-"), ("+", "-", "+"), ("-", "+", "-")):
        seen = set()
        for _ in range(trials):
            t = sample(src)
            if t[0] + t[2] != 0:
                seen.add(_signs(three_move_params(*t)))
        forced.append({"from": "".join(src), "images": sorted("".join(s) for s in seen),
                       "forced": seen == {transition(src).canonical}})
    return {"seed": seed, "trials": trials, "branching": witnesses, "forced": forced,
            "all_realized": all(w["witness"] for w in witnesses),
            "all_forced": all(f["forced"] for f in forced)}


def sign_bridge(word: Sequence[int], t: Sequence, n: int | None = None) -> bool:
    """Sign of every corner minor equals coefficient sign times the parameter signs
    raised to the monomial's exponents."""
    if n is None:
        n = max(word, default=0) + 1
    report = check_monomiality(word, n, "symbolic")
    m = lusztig_product(word, t, n)
    for entry in report["minors"]:
        if not entry["monomial"]:
            return False
        sign = 1 if Fraction(entry["coefficient"]) > 0 else -1
        for x, e in zip(t, entry["exponents"]):
            if x < 0 and e % 2:
                sign = -sign
        value = corner_D(m, entry["k"])
        if (value > 0) != (sign > 0) or value == 0:
            return False
    return True

