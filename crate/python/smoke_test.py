"""Smoke test for the superqkz extension module.

Build and install first, e.g.
    pip install --no-build-isolation ./crates/python
then run
    python python/smoke_test.py
"""

import json
from fractions import Fraction

import superqkz


def main():
    # the two-site symmetric vector over one boson and one fermion
    om = superqkz.omega("sym-plus", 2, [1], [2, 1])
    assert om == {"112": 1, "121": 1, "211": 1}, om

    q = Fraction(2)
    om = superqkz.omega("q-plus", 3, [1], [1, 1, 1], q)
    assert om["123"] == 1 and om["321"] == -q**3, om

    # rational R at x = 0 is the graded swap
    r0 = superqkz.r_matrix("rational-plus", 0, Fraction(3, 7), 2, [1])
    assert r0[0][0] == 1 and r0[1][2] == 1 and r0[2][1] == 1 and r0[3][3] == -1, r0

    ok, e = superqkz.macdonald("rational-plus", 2, [1], [0, 1, 3], [2, 3], 1, 2, [2, 1])
    assert ok and e == 7, (ok, e)
    ok, e = superqkz.macdonald("trig-plus", 2, [1], [2, 3, 7], [2, 3], 2, 3, [2, 1])
    assert ok and e == 8, (ok, e)
    ok, e = superqkz.macdonald("rational-plus", 2, [1], [0, Fraction(5, 2), Fraction(-3, 7)], [2, 3], 1, 2, [2, 1], d=3)
    assert ok and e == 12, (ok, e)
    ok, e = superqkz.calogero(2, [1], [0, 1, 3], [2, 3], 1, 2, 1, [2, 1])
    assert ok and e == 17, (ok, e)

    code, text = superqkz.run(["--suite", "omega", "--K", "2", "--n", "3"])
    report = json.loads(text)
    assert code == 0 and report["summary"]["failed"] == 0, report["summary"]

    try:
        superqkz.run(["--K", "2", "--n", "3", "--weights", "1,1"])
    except ValueError as err:
        assert "weight" in str(err), err
    else:
        raise AssertionError("bad weights accepted")

    print("smoke test passed:", report["summary"])


if __name__ == "__main__":
    main()
