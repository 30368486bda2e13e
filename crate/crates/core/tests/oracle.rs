//! Every builder against plain classical arithmetic, over all legal inputs.

use qsmart_core::adders::{dim1_decode, dim1_encode, AdderSpec, Family};
use qsmart_core::circuit::{Circuit, RegisterRole};

/// Independent oracle: integer addition, reduced where the family says so.
fn oracle(family: Family, n: u32, a: u64, b: u64) -> u64 {
    let p = 1u64 << n;
    match family {
        Family::Full => a + b,
        Family::ModPow2 => (a + b) % p,
        Family::ModPow2Minus1 => (a + b) % (p - 1),
        Family::ModPow2Plus1 => (a + b) % (p + 1),
    }
}

fn domain(family: Family, n: u32) -> u64 {
    let p = 1u64 << n;
    match family {
        Family::ModPow2Minus1 => p - 1,
        Family::ModPow2Plus1 => p + 1,
        _ => p,
    }
}

/// Runs every pair and checks the result, the pass-through registers and
/// that zero-initialised qubits outside the result start at zero.
fn check_exhaustive(family: Family, n: u32) {
    let spec = AdderSpec::new(family, n).unwrap();
    let c: Circuit = spec.build();
    c.validate().unwrap();
    let out = c.output.as_ref().unwrap();
    let pass = c.passthrough_qubits();
    let v = domain(family, n);
    for a in 0..v {
        for b in 0..v {
            let (ea, eb) = match family {
                Family::ModPow2Plus1 => (dim1_encode(a, n).unwrap().bits, dim1_encode(b, n).unwrap().bits),
                _ => (a, b),
            };
            let s0 = c.input("B").unwrap().pack(eb, c.input("A").unwrap().pack(ea, 0));
            let s1 = c.run_basis(s0);
            let got = out.extract(s1);
            let got = match family {
                Family::ModPow2Plus1 => dim1_decode(got, n).unwrap().value,
                _ => got,
            };
            assert_eq!(got, oracle(family, n, a, b), "{spec}: {a} + {b}");
            for &q in &pass {
                assert_eq!(s0 >> q & 1, s1 >> q & 1, "{spec}: qubit {q} changed for {a} + {b}");
            }
        }
    }
}

#[test]
fn full_adders() {
    for n in 1..=7 {
        check_exhaustive(Family::Full, n);
    }
}

#[test]
fn mod_pow2_adders() {
    for n in 1..=6 {
        check_exhaustive(Family::ModPow2, n);
    }
}

#[test]
fn mod_pow2_minus1_adders() {
    for n in 2..=6 {
        check_exhaustive(Family::ModPow2Minus1, n);
    }
}

#[test]
fn qdma_adders() {
    for n in 1..=5 {
        check_exhaustive(Family::ModPow2Plus1, n);
    }
}

#[test]
fn dim1_round_trip() {
    for n in 1..=8 {
        for v in 0..=(1u64 << n) {
            let e = dim1_encode(v, n).unwrap();
            assert_eq!(e.bits, if v == 0 { 1 << n } else { v - 1 });
            assert_eq!(dim1_decode(e.bits, n).unwrap().value, v);
        }
    }
}

#[test]
fn documented_pass_through_registers() {
    let input = |c: &Circuit| -> Vec<String> {
        c.registers.iter().filter(|r| r.role == RegisterRole::Input).map(|r| r.name.clone()).collect()
    };
    assert_eq!(input(&AdderSpec::new(Family::ModPow2, 3).unwrap().build()), vec!["B"]);
    assert_eq!(input(&AdderSpec::new(Family::ModPow2Minus1, 2).unwrap().build()), vec!["A"]);
    let q = input(&AdderSpec::new(Family::ModPow2Plus1, 3).unwrap().build());
    assert!(q.contains(&"B".to_string()) && q.len() == 2, "{q:?}");
    assert_eq!(input(&AdderSpec::new(Family::Full, 4).unwrap().build()), vec!["A"]);
}

#[test]
fn builders_round_trip_through_text() {
    for f in [Family::Full, Family::ModPow2, Family::ModPow2Minus1, Family::ModPow2Plus1] {
        for n in f.min_n()..=6 {
            let c = AdderSpec::new(f, n).unwrap().build();
            let back = Circuit::from_text(&c.to_text()).unwrap();
            assert_eq!(back, c, "{f} n={n}");
            assert_eq!(back.resource_report().unwrap(), c.resource_report().unwrap());
        }
    }
}
