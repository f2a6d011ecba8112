//! Exact potential kernel on a small box, in rational arithmetic.
//!
//! Every value is `A + B/π` with rational `A`, `B`. The diagonal is known in
//! closed form and harmonicity fixes the rest column by column; the
//! recursion is numerically unstable in floating point but exact here.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

#[derive(Clone, Debug, PartialEq)]
pub struct Exact {
    pub rational: BigRational,
    pub over_pi: BigRational,
}

impl Exact {
    fn zero() -> Self {
        Self {
            rational: BigRational::zero(),
            over_pi: BigRational::zero(),
        }
    }

    fn lin(&self, c: i64, other: &Exact, d: i64) -> Exact {
        let c = BigRational::from_integer(BigInt::from(c));
        let d = BigRational::from_integer(BigInt::from(d));
        Exact {
            rational: &self.rational * &c + &other.rational * &d,
            over_pi: &self.over_pi * &c + &other.over_pi * &d,
        }
    }

    /// Evaluates with 1/π to 50 digits so that cancellation between the two
    /// parts does not cost precision.
    pub fn to_f64(&self) -> f64 {
        let inv_pi: BigRational = BigRational::new(
            "31830988618379067153776752674502872406891929148091".parse().unwrap(),
            BigInt::from(10).pow(50),
        );
        (&self.rational + &self.over_pi * inv_pi).to_f64().unwrap()
    }
}

/// `a(x, y)` for `0 ≤ y ≤ x ≤ n`, indexed `[x][y]`.
pub fn exact_kernel(n: usize) -> Vec<Vec<Exact>> {
    let mut a: Vec<Vec<Exact>> = vec![vec![Exact::zero()]];
    let diag = |m: usize| {
        let mut s = BigRational::zero();
        for k in 1..=m {
            s += BigRational::new(BigInt::from(4), BigInt::from(2 * k as i64 - 1));
        }
        Exact {
            rational: BigRational::zero(),
            over_pi: s,
        }
    };
    // a(y, x) for |x|, |y| up to the current column
    let get = |a: &Vec<Vec<Exact>>, x: i64, y: i64| -> Exact {
        let (x, y) = (x.unsigned_abs() as usize, y.unsigned_abs() as usize);
        let (x, y) = if x >= y { (x, y) } else { (y, x) };
        a[x][y].clone()
    };
    let mut one = Exact::zero();
    one.rational = BigRational::from_integer(BigInt::from(1));
    a.push(vec![one, diag(1)]);
    for x in 1..n {
        let xi = x as i64;
        let mut col = Vec::with_capacity(x + 2);
        for y in 0..x {
            let yi = y as i64;
            // 4a(x,y) = a(x+1,y) + a(x−1,y) + a(x,y+1) + a(x,y−1)
            let v = get(&a, xi, yi)
                .lin(4, &get(&a, xi - 1, yi), -1)
                .lin(1, &get(&a, xi, yi + 1), -1)
                .lin(1, &get(&a, xi, yi - 1), -1);
            col.push(v);
        }
        // a(x+1,x) = 2a(x,x) − a(x,x−1)
        col.push(get(&a, xi, xi).lin(2, &get(&a, xi, xi - 1), -1));
        col.push(diag(x + 1));
        a.push(col);
    }
    a
}
