use std::collections::HashMap;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::{FieldError, QuadIdeal, QuadraticField, ReducedIdeal, MAX_DISC};
use crate::arith;
use crate::linalg;

/// Coordinates of a class with respect to the stored generators, each
/// reduced modulo its elementary divisor.
pub type ClassCoords = Vec<u64>;

/// The (wide) ideal class group with Smith-form structure.
#[derive(Debug, Clone)]
pub struct ClassGroup {
    field: QuadraticField,
    pub order: u64,
    /// Nontrivial elementary divisors, `d_1 | d_2 | ...`; empty for h = 1.
    pub elementary_divisors: Vec<u64>,
    /// One reduced ideal per elementary divisor.
    pub generators: Vec<QuadIdeal>,
    table: HashMap<ReducedIdeal, ClassCoords>,
}

/// Structure of the p-Sylow subgroup.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SylowInfo {
    pub p: u64,
    /// |Cl_p| = p^w
    pub w: u32,
    /// p-parts of the elementary divisors (trivial ones dropped).
    pub divisors: Vec<u64>,
}

struct Element {
    rep: ReducedIdeal,
    exps: Vec<i64>,
}

impl ClassGroup {
    /// Factor base of prime ideals below the Minkowski bound, subgroup
    /// enumeration by reduced-cycle membership, then Smith form of the
    /// relation matrix.
    pub fn compute(field: &QuadraticField) -> Result<Self, FieldError> {
        if field.disc() > MAX_DISC {
            return Err(FieldError::DiscTooLarge(field.disc()));
        }
        let bound = field.minkowski_bound();
        let base: Vec<QuadIdeal> = arith::primes_in_range(2, bound)
            .into_iter()
            .filter_map(|l| field.small_prime_ideal(l))
            .collect();

        let mut elements: Vec<Element> = Vec::new();
        let mut index: HashMap<ReducedIdeal, usize> = HashMap::new();
        let mut gens: Vec<QuadIdeal> = Vec::new();
        let mut relations: Vec<Vec<i64>> = Vec::new();

        let insert = |rep: ReducedIdeal, exps: Vec<i64>, elements: &mut Vec<Element>, index: &mut HashMap<ReducedIdeal, usize>| {
            let k = elements.len();
            for r in rep.cycle(field) {
                index.insert(r, k);
            }
            elements.push(Element { rep, exps });
        };
        insert(field.reduce(&QuadIdeal::unit()), Vec::new(), &mut elements, &mut index);

        for prime in &base {
            let prime_rep = field.reduce(prime).to_ideal(field);
            // least j with prime^j in the current subgroup
            let mut powers = vec![field.reduce(&QuadIdeal::unit())];
            let mut cur = prime_rep.clone();
            let hit = loop {
                let red = field.reduce(&cur);
                if let Some(&k) = index.get(&red) {
                    break k;
                }
                powers.push(red);
                cur = red.to_ideal(field).mul(field, &prime_rep);
            };
            let j = powers.len();
            if j == 1 {
                continue;
            }
            let m = gens.len();
            gens.push(prime_rep.clone());
            for e in elements.iter_mut() {
                e.exps.push(0);
            }
            let mut rel = elements[hit].exps.iter().map(|x| -x).collect::<Vec<_>>();
            rel[m] += j as i64;
            relations.iter_mut().for_each(|r| r.push(0));
            relations.push(rel);

            let old = elements.len();
            for (t, pw) in powers.iter().enumerate().skip(1) {
                let pw_ideal = pw.to_ideal(field);
                for x in 0..old {
                    let prod = elements[x].rep.to_ideal(field).mul(field, &pw_ideal);
                    let rep = field.reduce(&prod);
                    debug_assert!(!index.contains_key(&rep));
                    let mut exps = elements[x].exps.clone();
                    exps[m] += t as i64;
                    insert(rep, exps, &mut elements, &mut index);
                }
            }
        }

        let m = gens.len();
        let rel128: Vec<Vec<i128>> = relations.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
        let (diag, v, vinv) = if m == 0 { (Vec::new(), Vec::new(), Vec::new()) } else { linalg::smith(&rel128) };
        let keep: Vec<usize> = (0..m).filter(|&i| diag[i] > 1).collect();
        let elementary_divisors: Vec<u64> = keep.iter().map(|&i| diag[i] as u64).collect();
        let order = elementary_divisors.iter().product::<u64>();
        debug_assert_eq!(order as usize, elements.len());

        let generators = keep
            .iter()
            .map(|&i| {
                let mut acc = QuadIdeal::unit();
                for (j, g) in gens.iter().enumerate() {
                    let e = vinv[i][j];
                    let factor = if e >= 0 { g.pow(field, e as u64) } else { g.conj(field).pow(field, (-e) as u64) };
                    acc = field.reduce(&acc.mul(field, &factor)).to_ideal(field);
                }
                acc
            })
            .collect();

        let coords_of = |exps: &[i64]| -> ClassCoords {
            keep.iter()
                .map(|&i| {
                    let y: i128 = (0..m).map(|j| exps[j] as i128 * v[j][i]).sum();
                    y.rem_euclid(diag[i]) as u64
                })
                .collect()
        };
        let coords: Vec<ClassCoords> = elements.iter().map(|e| coords_of(&e.exps)).collect();
        let table = index.into_iter().map(|(r, k)| (r, coords[k].clone())).collect();

        Ok(Self { field: *field, order, elementary_divisors, generators, table })
    }

    pub fn field(&self) -> &QuadraticField {
        &self.field
    }

    pub fn rank(&self) -> usize {
        self.elementary_divisors.len()
    }

    pub fn identity(&self) -> ClassCoords {
        vec![0; self.rank()]
    }

    pub fn is_identity(&self, c: &[u64]) -> bool {
        c.iter().all(|&x| x == 0)
    }

    /// Coordinates of the class of `ideal`.
    pub fn class_of(&self, ideal: &QuadIdeal) -> ClassCoords {
        let r = self.field.reduce(ideal);
        self.table.get(&r).cloned().expect("every reduced ideal lies in an enumerated class")
    }

    pub fn mul(&self, x: &[u64], y: &[u64]) -> ClassCoords {
        x.iter().zip(y).zip(&self.elementary_divisors).map(|((a, b), d)| (a + b) % d).collect()
    }

    pub fn inverse(&self, x: &[u64]) -> ClassCoords {
        x.iter().zip(&self.elementary_divisors).map(|(a, d)| (d - a) % d).collect()
    }

    pub fn pow(&self, x: &[u64], k: u64) -> ClassCoords {
        x.iter()
            .zip(&self.elementary_divisors)
            .map(|(a, d)| ((*a as u128 * k as u128) % *d as u128) as u64)
            .collect()
    }

    pub fn class_order(&self, x: &[u64]) -> u64 {
        x.iter()
            .zip(&self.elementary_divisors)
            .map(|(a, d)| d / num_integer::gcd(*a, *d))
            .fold(1, num_integer::lcm)
    }

    pub fn is_valid(&self, x: &[u64]) -> bool {
        x.len() == self.rank() && x.iter().zip(&self.elementary_divisors).all(|(a, d)| a < d)
    }

    /// A reduced integral ideal in the given class.
    pub fn ideal_of(&self, x: &[u64]) -> QuadIdeal {
        let mut acc = QuadIdeal::unit();
        for (g, &e) in self.generators.iter().zip(x) {
            acc = self.field.reduce(&acc.mul(&self.field, &g.pow(&self.field, e))).to_ideal(&self.field);
        }
        acc
    }

    pub fn sylow(&self, p: u64) -> SylowInfo {
        let divisors: Vec<u64> = self
            .elementary_divisors
            .iter()
            .map(|&d| p.pow(arith::valuation(d, p)))
            .filter(|&x| x > 1)
            .collect();
        let w = divisors.iter().map(|&x| arith::valuation(x, p)).sum();
        SylowInfo { p, w, divisors }
    }

    /// Whether the class has p-power order.
    pub fn in_sylow(&self, p: u64, x: &[u64]) -> bool {
        let mut o = self.class_order(x);
        while o % p == 0 {
            o /= p;
        }
        o == 1
    }

    /// An element of maximal order in the p-Sylow subgroup, if it is nontrivial.
    pub fn sylow_generator(&self, p: u64) -> Option<ClassCoords> {
        let (k, &d) = self
            .elementary_divisors
            .iter()
            .enumerate()
            .rev()
            .find(|(_, &d)| d % p == 0)?;
        let mut c = self.identity();
        c[k] = d / p.pow(arith::valuation(d, p));
        Some(c)
    }

    /// Check every generator has exactly its declared order, by powering and
    /// principality testing.
    pub fn verify_generators(&self) -> bool {
        self.generators.iter().zip(&self.elementary_divisors).all(|(g, &d)| {
            let full = g.pow(&self.field, d);
            let principal_at_d = self.field.is_principal(&full);
            let proper = arith::factor(d)
                .iter()
                .all(|&(p, _)| !self.field.is_principal(&g.pow(&self.field, d / p)));
            principal_at_d && proper
        })
    }

    /// Scale-free ideal for display.
    pub fn generator_norms(&self) -> Vec<Ratio<i64>> {
        self.generators.iter().map(QuadIdeal::norm).collect()
    }
}

impl std::fmt::Display for ClassGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.elementary_divisors.is_empty() {
            return write!(f, "trivial");
        }
        let parts: Vec<String> = self.elementary_divisors.iter().map(|d| format!("Z/{d}")).collect();
        write!(f, "{}", parts.join(" x "))
    }
}
