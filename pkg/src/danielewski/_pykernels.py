"""Pure-Python fallback for the hot arithmetic kernels.

Must stay behaviourally identical to ``_ckernels.pyx``; the test-suite runs
both backends against each other.

Monomials are packed into a single non-negative int.  The low ``8*nf`` bits
hold ``nf`` exponent fields of 8 bits each (7 value bits plus a guard bit);
above them sits the signed ``h`` exponent (``h > 0`` means ``x^h``, ``h < 0``
means ``y^-h``) stored with a bias.  Adding two packed keys and subtracting
one bias adds all exponents at once.
"""


class ExponentOverflow(ArithmeticError):
    pass


def mul_terms(a, b, ppow, hshift, hbias, guard, reduce=True):
    """Product of two sparse term maps.

    With ``reduce`` set, every product ``x^i * y^j`` is rewritten through
    ``xy -> p``: ``ppow[m]`` must hold the term map of ``p^m`` (pure ``z``
    keys) for every ``m`` that can occur.  Without ``reduce`` the keys are
    added blindly, which is Laurent multiplication in the ``(x, z)`` chart.
    """
    out = {}
    bias_sh = hbias << hshift
    get = out.get
    for ka, ca in a.items():
        ha = (ka >> hshift) - hbias
        for kb, cb in b.items():
            c = ca * cb
            key = ka + kb - bias_sh
            if reduce and ha != 0:
                hb = (kb >> hshift) - hbias
                if (ha > 0 and hb < 0) or (ha < 0 and hb > 0):
                    m = min(abs(ha), abs(hb))
                    for kp, cp in ppow[m].items():
                        k2 = key + kp - bias_sh
                        out[k2] = get(k2, 0) + c * cp
                    continue
            out[key] = get(key, 0) + c
    res = {}
    for k, c in out.items():
        if c != 0:
            if k < 0 or (k & guard):
                raise ExponentOverflow("exponent out of packed range")
            res[k] = c
    return res


def reduce_vector(vec, pivots, rows):
    """Reduce a sparse vector against a semi-echelon basis.

    ``pivots`` is sorted ascending; ``rows[piv]`` is a row with leading entry
    1 at column ``piv`` and no entries left of it.
    """
    v = dict(vec)
    if not v:
        return v
    lo = min(v)
    for piv in pivots:
        if piv < lo:
            continue
        c = v.get(piv)
        if c is None:
            continue
        for col, rc in rows[piv].items():
            nv = v.get(col, 0) - c * rc
            if nv != 0:
                v[col] = nv
            else:
                v.pop(col, None)
    return v
