use dimerlg::dimer::{torus4, Turn};
use dimerlg::disks::{deformed_potential_parts, deformed_superpotential};
use dimerlg::mirror::Mirror;
use dimerlg::ncpoly::{DefSeries, NcPoly, QMonomial, QuiverPath, Rat};
use num::One;

// a family summand: mult(k,l) * prefix * A^l * B^k * q^{2kl}
struct Fam {
    prefix: Vec<u32>,   // variable exponents (q1,q2,q3,q4)
    a: Vec<u32>,        // exponents added per l
    b: Vec<u32>,        // per k
    mult: fn(u64, u64) -> i64,
}

fn q(e: [u32; 4]) -> Vec<u32> { e.to_vec() }
fn add(x: &[u32], y: &[u32], times: u64) -> Vec<u32> {
    x.iter().zip(y).map(|(a, b)| a + b * times as u32).collect()
}

fn eval(fams: &[Fam], n: u32, vars: &[u32; 4]) -> DefSeries {
    // vars maps q1..q4 -> variable indices in the quiver
    let mut s = DefSeries::zero(n);
    let full = [1u32, 1, 1, 1];
    for f in fams {
        for k in 0..=(n as u64) {
            for l in 0..=(n as u64) {
                let mut e = add(&f.prefix, &f.a, l);
                e = add(&e, &f.b, k);
                e = add(&e, &full, 2 * k * l);
                let deg: u32 = e.iter().sum();
                if deg > n { continue; }
                let m = (f.mult)(k, l);
                if m == 0 { continue; }
                let mono = QMonomial::from_pairs(&[
                    (vars[0], e[0]), (vars[1], e[1]), (vars[2], e[2]), (vars[3], e[3]),
                ]);
                s.add_term(mono, Rat::from_integer(m.into()));
            }
        }
    }
    s
}

const Q14: [u32; 4] = [1, 0, 0, 1];
const Q23: [u32; 4] = [0, 1, 1, 0];
const QF: [u32; 4] = [1, 1, 1, 1];
const Q14Q: [u32; 4] = [2, 1, 1, 2];
const Q23Q: [u32; 4] = [1, 2, 2, 1];

fn main() {
    let m = Mirror::new(torus4().unwrap()).unwrap();
    let n = 5u32;
    let qv = |s: &str| m.quiver.var_by_name(s).unwrap();
    let vars = [qv("q1"), qv("q2"), qv("q3"), qv("q4")];
    let arc = |s: &str| m.quiver.arc_by_name(s).unwrap();
    // identity a2 on L1 (germ (a2,L)) and on L2 (germ (a2,R))
    let a2 = arc("a2");
    let id1 = (a2, Turn::Left);
    let id2 = (a2, Turn::Right);
    let parts = deformed_potential_parts(&m, &[id1, id2], n).unwrap();
    let (ell1, ell2) = (&parts[0], &parts[1]);

    let word = |s: &[&str]| {
        let w: Vec<u32> = s.iter().map(|x| arc(x)).collect();
        QuiverPath::from_word(&m.quiver, &w).unwrap()
    };
    let kk = |_k: u64, _l: u64| 1i64;
    let _ = kk;
    // ell_{q,1} display rows: (path, [family, family])
    let rows1: Vec<(&[&str], Vec<Fam>)> = vec![
        (&["b1","a4","b2","a2"], vec![
            Fam { prefix: q([0,0,0,0]), a: Q23.to_vec(), b: Q14.to_vec(), mult: |_k,l| l as i64 },
            Fam { prefix: q(QF), a: Q14Q.to_vec(), b: Q23Q.to_vec(), mult: |_k,l| (l+1) as i64 },
        ]),
        (&["b1","a1","b3","a2"], vec![
            Fam { prefix: q([0,0,0,1]), a: Q23Q.to_vec(), b: Q14.to_vec(), mult: |_k,l| l as i64 },
            Fam { prefix: q([0,0,0,1]), a: Q14.to_vec(), b: Q23Q.to_vec(), mult: |_k,l| (l+1) as i64 },
        ]),
        (&["b4","a1","b2","a2"], vec![
            Fam { prefix: q([0,0,1,0]), a: Q23.to_vec(), b: Q14Q.to_vec(), mult: |_k,l| l as i64 },
            Fam { prefix: q([0,0,1,0]), a: Q14Q.to_vec(), b: Q23.to_vec(), mult: |_k,l| (l+1) as i64 },
        ]),
        (&["b4","a4","b3","a2"], vec![
            Fam { prefix: q(QF), a: Q23Q.to_vec(), b: Q14Q.to_vec(), mult: |_k,l| l as i64 },
            Fam { prefix: q([0,0,0,0]), a: Q14.to_vec(), b: Q23.to_vec(), mult: |_k,l| (l+1) as i64 },
        ]),
        (&["b1","a4","b3","a3"], vec![
            Fam { prefix: q([0,1,0,0]), a: Q23.to_vec(), b: Q14Q.to_vec(), mult: |_k,l| (l+1) as i64 },
            Fam { prefix: q([0,1,0,0]), a: Q14Q.to_vec(), b: Q23.to_vec(), mult: |_k,l| l as i64 },
        ]),
        (&["b1","a1","b2","a3"], vec![
            Fam { prefix: q(QF), a: Q23Q.to_vec(), b: Q14Q.to_vec(), mult: |_k,l| (l+1) as i64 },
            Fam { prefix: q([0,0,0,0]), a: Q14.to_vec(), b: Q23.to_vec(), mult: |_k,l| l as i64 },
        ]),
        (&["b4","a1","b3","a3"], vec![
            Fam { prefix: q([0,0,0,0]), a: Q23.to_vec(), b: Q14.to_vec(), mult: |_k,l| l as i64 },
            Fam { prefix: q(QF), a: Q14Q.to_vec(), b: Q23Q.to_vec(), mult: |_k,l| (l+1) as i64 },
        ]),
        (&["b4","a4","b2","a3"], vec![
            Fam { prefix: q([1,0,0,0]), a: Q23Q.to_vec(), b: Q14.to_vec(), mult: |_k,l| l as i64 },
            Fam { prefix: q([1,0,0,0]), a: Q14.to_vec(), b: Q23Q.to_vec(), mult: |_k,l| (l+1) as i64 },
        ]),
    ];
    let mut lhs_total = NcPoly::zero(m.quiver.clone(), n);
    for (w, fams) in &rows1 {
        let p = word(w);
        let got = ell1.coefficient(&p);
        let expect = eval(fams, n, &vars);
        if got != expect {
            println!("ELL1 MISMATCH on {:?}:\n got    {:?}\n expect {:?}", w, got.terms, expect.terms);
        } else {
            println!("ell1 row {:?} ok", w);
        }
        lhs_total.add_term(p, got);
    }
    if &lhs_total == ell1 { println!("ell1 fully covered by the 8 rows"); } else { println!("ELL1 HAS EXTRA TERMS"); }

    let rows2: Vec<(&[&str], Vec<Fam>)> = vec![
        (&["a2","b1","a4","b2"], vec![
            Fam { prefix: q([0,0,0,0]), a: Q23.to_vec(), b: Q14.to_vec(), mult: |k,_l| (k+1) as i64 },
            Fam { prefix: q(QF), a: Q14Q.to_vec(), b: Q23Q.to_vec(), mult: |k,_l| k as i64 },
        ]),
        (&["a2","b1","a1","b3"], vec![
            Fam { prefix: q([0,0,0,1]), a: Q23Q.to_vec(), b: Q14.to_vec(), mult: |k,_l| (k+1) as i64 },
            Fam { prefix: q([0,0,0,1]), a: Q14.to_vec(), b: Q23Q.to_vec(), mult: |k,_l| k as i64 },
        ]),
        (&["a2","b4","a1","b2"], vec![
            Fam { prefix: q([0,0,1,0]), a: Q23.to_vec(), b: Q14Q.to_vec(), mult: |k,_l| (k+1) as i64 },
            Fam { prefix: q([0,0,1,0]), a: Q14Q.to_vec(), b: Q23.to_vec(), mult: |k,_l| k as i64 },
        ]),
        (&["a2","b4","a4","b3"], vec![
            Fam { prefix: q(QF), a: Q23Q.to_vec(), b: Q14Q.to_vec(), mult: |k,_l| (k+1) as i64 },
            Fam { prefix: q([0,0,0,0]), a: Q14.to_vec(), b: Q23.to_vec(), mult: |k,_l| k as i64 },
        ]),
        (&["a3","b4","a1","b3"], vec![
            Fam { prefix: q([0,0,0,0]), a: Q23.to_vec(), b: Q14.to_vec(), mult: |k,_l| k as i64 },
            Fam { prefix: q(QF), a: Q14Q.to_vec(), b: Q23Q.to_vec(), mult: |k,_l| (k+1) as i64 },
        ]),
        (&["a3","b4","a4","b2"], vec![
            Fam { prefix: q([1,0,0,0]), a: Q23Q.to_vec(), b: Q14.to_vec(), mult: |k,_l| (k+1) as i64 },
            Fam { prefix: q([1,0,0,0]), a: Q14.to_vec(), b: Q23Q.to_vec(), mult: |k,_l| k as i64 },
        ]),
        (&["a3","b1","a4","b3"], vec![
            Fam { prefix: q([0,1,0,0]), a: Q23.to_vec(), b: Q14Q.to_vec(), mult: |k,_l| k as i64 },
            Fam { prefix: q([0,1,0,0]), a: Q14Q.to_vec(), b: Q23.to_vec(), mult: |k,_l| (k+1) as i64 },
        ]),
        (&["a3","b1","a1","b2"], vec![
            Fam { prefix: q(QF), a: Q23Q.to_vec(), b: Q14Q.to_vec(), mult: |k,_l| (k+1) as i64 },
            Fam { prefix: q([0,0,0,0]), a: Q14.to_vec(), b: Q23.to_vec(), mult: |k,_l| k as i64 },
        ]),
    ];
    let mut lhs_total = NcPoly::zero(m.quiver.clone(), n);
    for (w, fams) in &rows2 {
        let p = word(w);
        let got = ell2.coefficient(&p);
        let expect = eval(fams, n, &vars);
        if got != expect {
            println!("ELL2 MISMATCH on {:?}:\n got    {:?}\n expect {:?}", w, got.terms, expect.terms);
        } else {
            println!("ell2 row {:?} ok", w);
        }
        lhs_total.add_term(p, got);
    }
    if &lhs_total == ell2 { println!("ell2 fully covered by the 8 rows"); } else { println!("ELL2 HAS EXTRA TERMS"); }

    // Lemma A.1 coefficient checks at order 6
    let n6 = 6u32;
    let parts6 = deformed_potential_parts(&m, &[id1, id2], n6).unwrap();
    let (e1, e2) = (&parts6[0], &parts6[1]);
    // path a2 b1 a1 b3 a2: coefficient of ell2*a2 = e2's coefficient of a2b1a1b3
    let c_l2a2 = e2.coefficient(&word(&["a2","b1","a1","b3"]));
    let c_a2l1 = e1.coefficient(&word(&["b1","a1","b3","a2"]));
    let exp_l2a2 = eval(&[
        Fam { prefix: q([0,0,0,1]), a: Q23Q.to_vec(), b: Q14.to_vec(), mult: |k,_l| (k+1) as i64 },
        Fam { prefix: q([0,0,0,1]), a: Q14.to_vec(), b: Q23Q.to_vec(), mult: |k,_l| k as i64 },
    ], n6, &vars);
    let exp_a2l1 = eval(&[
        Fam { prefix: q([0,0,0,1]), a: Q23Q.to_vec(), b: Q14.to_vec(), mult: |_k,l| l as i64 },
        Fam { prefix: q([0,0,0,1]), a: Q14.to_vec(), b: Q23Q.to_vec(), mult: |_k,l| (l+1) as i64 },
    ], n6, &vars);
    println!("A.2 first path: l2a2 {} a2l1 {} equal {}",
        if c_l2a2 == exp_l2a2 {"ok"} else {"MISMATCH"},
        if c_a2l1 == exp_a2l1 {"ok"} else {"MISMATCH"},
        c_l2a2 == c_a2l1);

    // second path a2 b1 a1 b2 a3: LHS = -a2*ell1 coefficient of b1a1b2a3
    let lhs = e1.coefficient(&word(&["b1","a1","b2","a3"])).neg();
    let exp_a3 = eval(&[
        Fam { prefix: q(QF), a: Q23Q.to_vec(), b: Q14Q.to_vec(), mult: |_k,l| (l+1) as i64 },
        Fam { prefix: q([0,0,0,0]), a: Q14.to_vec(), b: Q23.to_vec(), mult: |_k,l| l as i64 },
    ], n6, &vars).neg();
    println!("A.3 lhs {}", if lhs == exp_a3 {"ok"} else {"MISMATCH"});
    // RHS per (A.4): prefactors times derivative extracts
    let wq = deformed_superpotential(&m, n6 + 8).unwrap();
    let db1 = wq.cyclic_derivative(arc("b1")).unwrap();
    let db3 = wq.cyclic_derivative(arc("b3")).unwrap();
    let db1_c = db1.coefficient(&word(&["a1","b2","a3"])).truncate(n6);
    let db3_c = db3.coefficient(&word(&["a2","b1","a1"])).truncate(n6);
    // paper extracts
    let exp_db1 = eval(&[
        Fam { prefix: add(&Q14, &Q23, 1).try_into().map(|v: Vec<u32>| Fam2(v)).unwrap_or_else(|_| unreachable!()).0.clone().try_into().unwrap(), a: vec![0,0,0,0], b: vec![0,0,0,0], mult: |_,_| 0 },
    ], n6, &vars);
    let _ = exp_db1;
    // simpler: build extracts directly
    let mut exp_db1 = DefSeries::zero(n6);
    let mut exp_db3 = DefSeries::zero(n6);
    for k in 0..=(n6 as u64) {
        for l in 0..=(n6 as u64) {
            let e14 = 2*k + 1 + l + 2*k*l;
            let e23 = 2*l + 1 + k + 2*k*l;
            if e14 + e23 <= n6 as u64 {
                exp_db1.add_term(QMonomial::from_pairs(&[(vars[0], e14 as u32), (vars[3], e14 as u32), (vars[1], e23 as u32), (vars[2], e23 as u32)]), Rat::one());
            }
            let e14b = l + 2*k*l;
            let e23b = k + 2*k*l;
            if e14b + e23b <= n6 as u64 {
                exp_db1.add_term(QMonomial::from_pairs(&[(vars[0], e14b as u32), (vars[3], e14b as u32), (vars[1], e23b as u32), (vars[2], e23b as u32)]), -Rat::one());
            }
            let f14 = k + l + 2*k*l;
            let f23a = 2*l + 2*k*l;
            let f23b = 2*k + 2*k*l;
            if 1 + f14 + f23a <= n6 as u64 {
                exp_db3.add_term(QMonomial::from_pairs(&[(vars[3], 1 + 0), (vars[0], f14 as u32), (vars[1], f23a as u32), (vars[2], f23a as u32)]), Rat::one());
            }
            if 1 + f14 + f23b <= n6 as u64 {
                exp_db3.add_term(QMonomial::from_pairs(&[(vars[3], 1), (vars[0], f14 as u32), (vars[1], f23b as u32), (vars[2], f23b as u32)]), -Rat::one());
            }
        }
    }
    // note: q14^e = q1^e q4^e accounted: db1 uses q14 exponent on vars 0 and 3... but f14 only on q1? fix: q14^{f14}: both
    println!("NOTE manual extract check below");
    // fix exp_db3: q14^{f14} means q1^{f14} q4^{f14}: rebuild
    let mut exp_db3 = DefSeries::zero(n6);
    for k in 0..=(n6 as u64) {
        for l in 0..=(n6 as u64) {
            let f14 = k + l + 2*k*l;
            for (sign, f23) in [(1i64, 2*l + 2*k*l), (-1, 2*k + 2*k*l)] {
                let deg = 1 + 2*f14 + 2*f23;
                if deg <= n6 as u64 {
                    exp_db3.add_term(QMonomial::from_pairs(&[
                        (vars[3], 1 + f14 as u32), (vars[0], f14 as u32),
                        (vars[1], f23 as u32), (vars[2], f23 as u32)]),
                        Rat::from_integer(sign.into()));
                }
            }
        }
    }
    // rebuild exp_db1 with correct total degrees
    let mut exp_db1 = DefSeries::zero(n6);
    for k in 0..=(n6 as u64) {
        for l in 0..=(n6 as u64) {
            for (sign, e14, e23) in [
                (1i64, 2*k + 1 + l + 2*k*l, 2*l + 1 + k + 2*k*l),
                (-1, l + 2*k*l, k + 2*k*l),
            ] {
                if 2*e14 + 2*e23 <= n6 as u64 {
                    exp_db1.add_term(QMonomial::from_pairs(&[
                        (vars[0], e14 as u32), (vars[3], e14 as u32),
                        (vars[1], e23 as u32), (vars[2], e23 as u32)]),
                        Rat::from_integer(sign.into()));
                }
            }
        }
    }
    println!("db1 extract {}", if db1_c == exp_db1 {"ok"} else {"MISMATCH"});
    println!("db3 extract {}", if db3_c == exp_db3 {"ok"} else {"MISMATCH"});
    if db1_c != exp_db1 { println!(" got {:?}\n exp {:?}", db1_c.terms, exp_db1.terms); }
    if db3_c != exp_db3 { println!(" got {:?}\n exp {:?}", db3_c.terms, exp_db3.terms); }

    // (A.4) prefactors
    let pre1 = eval(&[Fam { prefix: q([1,0,0,1]), a: q([2,2,2,2]), b: Q14.to_vec(), mult: |_,_| 1 }], n6, &vars);
    let pre2 = eval(&[Fam { prefix: q([0,1,1,0]), a: q([2,2,2,2]), b: Q23Q.to_vec(), mult: |_,_| 1 }], n6, &vars);
    let pre3 = eval(&[Fam { prefix: q([1,0,0,0]), a: Q14.to_vec(), b: QF.to_vec(), mult: |_,_| 1 }], n6, &vars);
    let pre4 = eval(&[Fam { prefix: q([1,1,1,0]), a: Q23Q.to_vec(), b: QF.to_vec(), mult: |_,_| 1 }], n6, &vars);
    let rhs = pre1.mul(&db1_c).sub(&pre2.mul(&db1_c)).add(&pre3.mul(&db3_c)).sub(&pre4.mul(&db3_c));
    println!("A.2 second-path identity lhs==rhs: {}", lhs == rhs.truncate(n6));
    if lhs != rhs.truncate(n6) {
        println!(" lhs {:?}\n rhs {:?}", lhs.terms, rhs.truncate(n6).terms);
    }
}

struct Fam2(Vec<u32>);
