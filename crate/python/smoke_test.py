"""Smoke test for the bsdnf Python module.

Build and install first:
    pip install maturin
    pip install --no-build-isolation -e crates/python
"""

import json

import bsdnf


def check_decomposition():
    z11 = bsdnf.Polynomial.z(1, 2, 0, 0)
    z12 = bsdnf.Polynomial.z(1, 2, 0, 1)
    zb11 = bsdnf.Polynomial.zbar(1, 2, 0, 0)
    zb12 = bsdnf.Polynomial.zbar(1, 2, 0, 1)
    p = z11 * zb11
    d = bsdnf.decompose(p, (1, 1))
    assert d.variant == "high"
    assert d.remainder_in_kernel()
    assert d.reconstruct() == p
    (j, q), = d.quotients
    assert j == [[1]]
    assert q == bsdnf.Polynomial.constant(1, 2, "1/2")
    expected = (z11 * zb11 - z12 * zb12).scale("1/2")
    assert d.remainder == expected
    doc = json.loads(d.to_json())
    assert doc["kernel_membership"] is True
    assert bsdnf.Polynomial.from_json(p.to_json()) == p


def check_kernel_basis():
    basis = bsdnf.kernel_basis(1, 2, (1, 1))
    assert len(basis) == 3
    low = bsdnf.kernel_basis(1, 2, (0, 2), "low:1")
    assert all(b.m == 1 and b.N == 2 for b in low)


def check_maps():
    h = bsdnf.FormalMap.standard((1, 2), (2, 3), 3)
    assert h.src == (1, 2) and h.dst == (2, 3)
    rows = h.residual((1, 1))
    assert all(p.is_zero() for row in rows for p in row)
    again = bsdnf.FormalMap.from_json(h.to_json())
    cert = bsdnf.compare_embeddings(h, again, 2)
    assert cert.verdict == "EQUIVALENT", cert.to_json()


def check_rigidity():
    cert = bsdnf.rigidity_check((1, 2), (1, 2), 3)
    assert cert.verdict == "RIGID" and cert.is_positive
    assert [r[0] for r in cert.per_degree] == [2, 3]
    holds, clauses = bsdnf.embedding_condition((1, 1), (1, 2))
    assert not holds and clauses
    try:
        bsdnf.rigidity_check((1, 1), (1, 2), 2)
    except bsdnf.ConditionError as e:
        assert "ConditionError" in str(e)
    else:
        raise AssertionError("expected ConditionError")
    assert issubclass(bsdnf.ConditionError, bsdnf.BsdnfError)


def check_errors():
    for bad in (
        lambda: bsdnf.Polynomial.z(1, 2, 3, 0),
        lambda: bsdnf.Polynomial.constant(1, 2, "1/0"),
        lambda: bsdnf.Polynomial.from_json("{"),
        lambda: bsdnf.Polynomial.z(1, 2, 0, 0) + bsdnf.Polynomial.z(2, 2, 0, 0),
        lambda: bsdnf.decompose(bsdnf.Polynomial.z(1, 2, 0, 0), (1, 1), "sideways"),
    ):
        try:
            bad()
        except bsdnf.BsdnfError:
            pass
        else:
            raise AssertionError("expected BsdnfError")


def main():
    for check in (check_decomposition, check_kernel_basis, check_maps, check_rigidity, check_errors):
        check()
        print(f"ok  {check.__name__}")
    print("python smoke test passed")


if __name__ == "__main__":
    main()
