# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled versions of the kernels in ``_pykernels``.

Keys are handled as C ``long long``; coefficients stay Python objects
(``gmpy2.mpq``), so the gain comes from the loop and dict overhead.
"""

from danielewski._pykernels import ExponentOverflow


def mul_terms(dict a, dict b, list ppow, long long hshift, long long hbias,
              long long guard, bint reduce=True):
    cdef dict out = {}
    cdef dict res = {}
    cdef dict pm
    cdef long long ka, kb, kp, key, k2, ha, hb, m
    cdef long long bias_sh = hbias << hshift
    cdef object ca, cb, cp, c, prev
    for ka_o, ca in a.items():
        ka = ka_o
        ha = (ka >> hshift) - hbias
        for kb_o, cb in b.items():
            kb = kb_o
            c = ca * cb
            key = ka + kb - bias_sh
            if reduce and ha != 0:
                hb = (kb >> hshift) - hbias
                if (ha > 0 and hb < 0) or (ha < 0 and hb > 0):
                    m = ha if ha > 0 else -ha
                    if (-hb if hb < 0 else hb) < m:
                        m = -hb if hb < 0 else hb
                    pm = <dict>ppow[m]
                    for kp_o, cp in pm.items():
                        kp = kp_o
                        k2 = key + kp - bias_sh
                        prev = out.get(k2)
                        if prev is None:
                            out[k2] = c * cp
                        else:
                            out[k2] = prev + c * cp
                    continue
            prev = out.get(key)
            if prev is None:
                out[key] = c
            else:
                out[key] = prev + c
    for k_o, c in out.items():
        if c != 0:
            key = k_o
            if key < 0 or (key & guard):
                raise ExponentOverflow("exponent out of packed range")
            res[k_o] = c
    return res


def reduce_vector(dict vec, list pivots, dict rows):
    cdef dict v = dict(vec)
    cdef dict row
    cdef long long lo, piv
    cdef object c, rc, nv, prev
    if not v:
        return v
    lo = min(v)
    for piv_o in pivots:
        piv = piv_o
        if piv < lo:
            continue
        c = v.get(piv_o)
        if c is None:
            continue
        row = <dict>rows[piv_o]
        for col, rc in row.items():
            prev = v.get(col)
            if prev is None:
                v[col] = -(c * rc)
            else:
                nv = prev - c * rc
                if nv != 0:
                    v[col] = nv
                else:
                    del v[col]
    return v
