"""Smoke test for the qsmart extension module.

Build and install first:  pip install ./crates/py   (or: maturin develop -m crates/py/Cargo.toml)
"""

import qsmart

q9 = qsmart.Adder("qdma", 3)
c = q9.build()
r = c.resources()
assert (r["qubit_count"], r["toffoli_count"], r["cnot_count"]) == (14, 11, 13), r
assert q9.decode(c.run_exact(q9.encode(4), q9.encode(7))) == 2

assert qsmart.Adder("mod-pow2", 1).build().resources()["cnot_count"] == 1
assert qsmart.Adder.for_modulus(3).family == "qdma"

text = c.to_text()
assert qsmart.Circuit.from_text(text).to_text() == text

assert qsmart.select_rns(2**6) == [3, 4, 5]
assert qsmart.select_rns(2**9) == [7, 8, 9]
assert qsmart.select_rns(2**6, efficiency=1.0) == [3, 5, 8]
assert round(qsmart.rns_efficiency([7, 8, 9], 512) * 100, 2) == 98.44
assert qsmart.crt_reconstruct([0, 2, 2], [3, 4, 5]) == 42

zero = qsmart.NoiseModel.zero()
assert qsmart.Adder("mod-pow2", 2).output_probability(noise=zero, shots=10) == 1.0
p = qsmart.Adder("qdma", 2).output_probability(shots=200, seed=3)
assert 0.0 < p < 1.0

res = qsmart.distributed_add(17, 25, k=64, noise=zero, shots=20)
assert res["sum"] == 42 and res["residues"] == [0, 2, 2], res
assert res["set_output_probability"] == 1.0

try:
    qsmart.Adder("full", 0)
except ValueError:
    pass
else:
    raise AssertionError("n = 0 accepted")

print("qsmart smoke test passed")
