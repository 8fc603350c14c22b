//! Angular-momentum algebra: half-integer labels, exact Clebsch–Gordan
//! coefficients and Wigner rotation matrices.
//!
//! All matrices use the descending-`m` index convention: row/column 0 is
//! `m = j`, the last one is `m = -j`.

use std::fmt;
use std::sync::{OnceLock, RwLock};

use nalgebra::DMatrix;
use num_bigint::{BigInt, BigUint, Sign};
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::geometry::EulerAngles;
use crate::CMatrix;

/// A half-integer stored as twice its value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct HalfInt(i32);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);
    pub const HALF: HalfInt = HalfInt(1);
    pub const ONE: HalfInt = HalfInt(2);

    pub const fn from_twice(twice: i32) -> Self {
        HalfInt(twice)
    }

    pub const fn from_int(n: i32) -> Self {
        HalfInt(2 * n)
    }

    /// Spin magnitude from `2S`; rejects negative values.
    pub fn spin(two_s: i32) -> Result<Self> {
        if two_s < 0 {
            return Err(Error::invalid(format!("spin 2S = {two_s} is negative")));
        }
        Ok(HalfInt(two_s))
    }

    pub const fn twice(self) -> i32 {
        self.0
    }

    pub fn value(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    pub const fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    /// Dimension `2j + 1` of the spin-`j` representation.
    pub fn dim(self) -> usize {
        debug_assert!(self.0 >= 0);
        self.0 as usize + 1
    }

    /// The labels `m = j, j-1, …, -j`.
    pub fn projections(self) -> impl Iterator<Item = HalfInt> + Clone {
        let j = self.0;
        (0..=j).map(move |k| HalfInt(j - 2 * k))
    }

    /// Row index of `m` in the descending convention.
    pub fn index_of(self, m: HalfInt) -> Option<usize> {
        if m.0.abs() > self.0 || (self.0 - m.0) % 2 != 0 {
            return None;
        }
        Some(((self.0 - m.0) / 2) as usize)
    }

    /// `m` label at row `idx`.
    pub fn projection_at(self, idx: usize) -> HalfInt {
        HalfInt(self.0 - 2 * idx as i32)
    }

    /// Checks that `m` is a valid projection of the spin `self`.
    pub fn check_projection(self, m: HalfInt) -> Result<()> {
        if self.0 < 0 {
            return Err(Error::invalid(format!("spin {self} is negative")));
        }
        if (self.0 - m.0).rem_euclid(2) != 0 {
            return Err(Error::invalid(format!("projection {m} has the wrong parity for spin {self}")));
        }
        if m.0.abs() > self.0 {
            return Err(Error::invalid(format!("|m| = |{m}| exceeds j = {self}")));
        }
        Ok(())
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// Exact value `sign · √(numerator / denominator)` with the fraction in
/// lowest terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignedSqrtRational {
    sign: i8,
    numerator: BigUint,
    denominator: BigUint,
}

impl SignedSqrtRational {
    pub fn zero() -> Self {
        Self { sign: 0, numerator: BigUint::zero(), denominator: BigUint::one() }
    }

    /// `sign · √(num/den)`; the fraction is reduced and a zero numerator
    /// forces a zero sign.
    pub fn new(sign: i8, numerator: BigUint, denominator: BigUint) -> Result<Self> {
        if denominator.is_zero() {
            return Err(Error::invalid("zero denominator"));
        }
        if numerator.is_zero() || sign == 0 {
            return Ok(Self::zero());
        }
        let g = numerator.gcd(&denominator);
        Ok(Self { sign: sign.signum(), numerator: numerator / &g, denominator: denominator / g })
    }

    /// `sign · √square` for a non-negative rational `square`.
    fn from_square(sign: i8, square: &BigRational) -> Self {
        let num = square.numer().abs().to_biguint().expect("non-negative");
        let den = square.denom().abs().to_biguint().expect("positive");
        Self::new(sign, num, den).expect("denominator of a rational is non-zero")
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn numerator(&self) -> &BigUint {
        &self.numerator
    }

    pub fn denominator(&self) -> &BigUint {
        &self.denominator
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    /// The square `sign · num/den` carried as a signed rational.
    pub fn signed_square(&self) -> BigRational {
        let s = match self.sign {
            1 => Sign::Plus,
            -1 => Sign::Minus,
            _ => return BigRational::zero(),
        };
        BigRational::new(
            BigInt::from_biguint(s, self.numerator.clone()),
            BigInt::from_biguint(Sign::Plus, self.denominator.clone()),
        )
    }

    pub fn to_f64(&self) -> f64 {
        if self.sign == 0 {
            return 0.0;
        }
        f64::from(self.sign) * ratio_to_f64(&self.numerator, &self.denominator).sqrt()
    }
}

impl fmt::Display for SignedSqrtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            0 => write!(f, "0"),
            s => write!(f, "{}√({}/{})", if s > 0 { "+" } else { "-" }, self.numerator, self.denominator),
        }
    }
}

impl From<&SignedSqrtRational> for f64 {
    fn from(v: &SignedSqrtRational) -> f64 {
        v.to_f64()
    }
}

/// `num/den` as `f64` without overflowing on huge operands.
fn ratio_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    let nb = num.bits() as i64;
    let db = den.bits() as i64;
    // Keep ~64 significant bits of each operand and track the exponent.
    let ns = (nb - 64).max(0);
    let ds = (db - 64).max(0);
    let n = (num >> ns as usize).to_f64().unwrap_or(f64::INFINITY);
    let d = (den >> ds as usize).to_f64().unwrap_or(f64::INFINITY);
    (n / d) * 2f64.powi((ns - ds) as i32)
}

static FACTORIALS: OnceLock<RwLock<Vec<BigUint>>> = OnceLock::new();

/// `n!`, memoized process-wide.
pub fn factorial(n: usize) -> BigUint {
    let table = FACTORIALS.get_or_init(|| RwLock::new(vec![BigUint::one()]));
    {
        let read = table.read().expect("factorial table poisoned");
        if let Some(v) = read.get(n) {
            return v.clone();
        }
    }
    let mut write = table.write().expect("factorial table poisoned");
    while write.len() <= n {
        let k = write.len();
        let next = &write[k - 1] * BigUint::from(k);
        write.push(next);
    }
    write[n].clone()
}

fn fact_int(n: i32) -> BigInt {
    BigInt::from(factorial(n as usize))
}

/// Clebsch–Gordan coefficient `⟨j1 m1; j2 m2 | J M⟩` in the Condon–Shortley
/// convention, computed exactly from the Racah formula.
///
/// Returns zero when `M ≠ m1 + m2` or the triangle rule fails. Projections
/// with the wrong parity or magnitude are rejected.
pub fn clebsch_gordan(
    j1: HalfInt,
    m1: HalfInt,
    j2: HalfInt,
    m2: HalfInt,
    j: HalfInt,
    m: HalfInt,
) -> Result<SignedSqrtRational> {
    j1.check_projection(m1)?;
    j2.check_projection(m2)?;
    j.check_projection(m)?;

    let (tj1, tj2, tj) = (j1.twice(), j2.twice(), j.twice());
    let (tm1, tm2, tm) = (m1.twice(), m2.twice(), m.twice());
    if tm != tm1 + tm2 {
        return Ok(SignedSqrtRational::zero());
    }
    if (tj1 + tj2 + tj) % 2 != 0 || tj < (tj1 - tj2).abs() || tj > tj1 + tj2 {
        return Ok(SignedSqrtRational::zero());
    }

    // All of these are integers once the parity checks above pass.
    let a = (tj1 + tj2 - tj) / 2; // j1 + j2 - J
    let b = (tj1 - tm1) / 2; // j1 - m1
    let c = (tj2 + tm2) / 2; // j2 + m2
    let d = (tj - tj2 + tm1) / 2; // J - j2 + m1
    let e = (tj - tj1 - tm2) / 2; // J - j1 - m2

    let k_min = 0.max(-d).max(-e);
    let k_max = a.min(b).min(c);
    let mut sum = BigRational::zero();
    for k in k_min..=k_max {
        let den = fact_int(k) * fact_int(a - k) * fact_int(b - k) * fact_int(c - k) * fact_int(d + k) * fact_int(e + k);
        let term = BigRational::new(BigInt::one(), den);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    if sum.is_zero() {
        return Ok(SignedSqrtRational::zero());
    }

    let triangle = BigRational::new(
        BigInt::from(tj + 1) * fact_int((tj + tj1 - tj2) / 2) * fact_int((tj - tj1 + tj2) / 2) * fact_int(a),
        fact_int((tj1 + tj2 + tj) / 2 + 1),
    );
    let projections = fact_int((tj + tm) / 2)
        * fact_int((tj - tm) / 2)
        * fact_int((tj1 - tm1) / 2)
        * fact_int((tj1 + tm1) / 2)
        * fact_int((tj2 - tm2) / 2)
        * fact_int((tj2 + tm2) / 2);
    let square = triangle * BigRational::from_integer(projections) * &sum * &sum;
    let sign = if sum.is_positive() { 1 } else { -1 };
    Ok(SignedSqrtRational::from_square(sign, &square))
}

/// Floating-point convenience wrapper around [`clebsch_gordan`].
pub fn clebsch_gordan_f64(j1: HalfInt, m1: HalfInt, j2: HalfInt, m2: HalfInt, j: HalfInt, m: HalfInt) -> Result<f64> {
    clebsch_gordan(j1, m1, j2, m2, j, m).map(|c| c.to_f64())
}

fn fact_f64(n: i32) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let t = TABLE.get_or_init(|| {
        let mut v = vec![1.0f64; 171];
        for k in 1..171 {
            v[k] = v[k - 1] * k as f64;
        }
        v
    });
    t[n as usize]
}

/// Wigner small-d matrix `d^j_{m'm}(β)` from Wigner's sum formula; rows
/// indexed by `m'`, columns by `m`, both descending.
pub fn wigner_small_d(j: HalfInt, beta: f64) -> Result<DMatrix<f64>> {
    if j.twice() < 0 {
        return Err(Error::invalid("spin must be non-negative"));
    }
    if !beta.is_finite() {
        return Err(Error::invalid("rotation angle must be finite"));
    }
    if j.twice() > 160 {
        return Err(Error::invalid("spin too large for the floating-point d-matrix"));
    }
    let dim = j.dim();
    let tj = j.twice();
    let (s, c) = (beta / 2.0).sin_cos();
    let mut out = DMatrix::zeros(dim, dim);
    for (row, mp) in j.projections().enumerate() {
        for (col, m) in j.projections().enumerate() {
            // Integer offsets: j+m', j-m', j+m, j-m, m'-m.
            let jpmp = (tj + mp.twice()) / 2;
            let jmmp = (tj - mp.twice()) / 2;
            let jpm = (tj + m.twice()) / 2;
            let jmm = (tj - m.twice()) / 2;
            let diff = (mp.twice() - m.twice()) / 2;
            let pref = (fact_f64(jpmp) * fact_f64(jmmp) * fact_f64(jpm) * fact_f64(jmm)).sqrt();
            let s_min = 0.max(-diff);
            let s_max = jpm.min(jmmp);
            let mut acc = 0.0;
            for k in s_min..=s_max {
                let den = fact_f64(jpm - k) * fact_f64(k) * fact_f64(diff + k) * fact_f64(jmmp - k);
                let sign = if (diff + k) % 2 == 0 { 1.0 } else { -1.0 };
                acc += sign * c.powi(tj - diff - 2 * k) * s.powi(diff + 2 * k) / den;
            }
            out[(row, col)] = pref * acc;
        }
    }
    Ok(out)
}

/// Wigner D-matrix `D^j_{m'm}(α,β,γ) = e^{-i m' α} d^j_{m'm}(β) e^{-i m γ}`
/// for the active z-y-z rotation.
pub fn wigner_big_d(j: HalfInt, angles: &EulerAngles) -> Result<CMatrix> {
    let small = wigner_small_d(j, angles.beta)?;
    let dim = j.dim();
    let phase = |m: HalfInt, angle: f64| Complex64::from_polar(1.0, -m.value() * angle);
    Ok(CMatrix::from_fn(dim, dim, |r, c| {
        phase(j.projection_at(r), angles.alpha) * small[(r, c)] * phase(j.projection_at(c), angles.gamma)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::EulerAngles;
    use crate::stokes::stokes_matrices;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashMap;
    use std::f64::consts::{FRAC_PI_2, SQRT_2};

    fn h(twice: i32) -> HalfInt {
        HalfInt::from_twice(twice)
    }

    /// Racah formula in plain floating point, written out independently.
    fn racah_f64(j1: f64, m1: f64, j2: f64, m2: f64, j: f64, m: f64) -> f64 {
        fn f(x: f64) -> f64 {
            let n = x.round() as i64;
            assert!(n >= 0);
            (1..=n).fold(1.0, |a, k| a * k as f64)
        }
        if (m1 + m2 - m).abs() > 1e-9 {
            return 0.0;
        }
        let pre = ((2.0 * j + 1.0) * f(j + j1 - j2) * f(j - j1 + j2) * f(j1 + j2 - j) / f(j1 + j2 + j + 1.0)).sqrt()
            * (f(j + m) * f(j - m) * f(j1 - m1) * f(j1 + m1) * f(j2 - m2) * f(j2 + m2)).sqrt();
        let mut sum = 0.0;
        for k in 0..=((j1 + j2 + j) as i64 + 2) {
            let k = k as f64;
            let args = [j1 + j2 - j - k, j1 - m1 - k, j2 + m2 - k, j - j2 + m1 + k, j - j1 - m2 + k];
            if args.iter().any(|a| *a < -1e-9) {
                continue;
            }
            let den = f(k) * args.iter().map(|a| f(*a)).product::<f64>();
            sum += if (k as i64) % 2 == 0 { 1.0 } else { -1.0 } / den;
        }
        pre * sum
    }

    #[test]
    fn cg_spin_zero_is_identity() {
        for tj in 0..8 {
            for tm in (-tj..=tj).step_by(2) {
                let c = clebsch_gordan(h(tj), h(tm), h(0), h(0), h(tj), h(tm)).unwrap();
                assert_eq!(c.sign(), 1);
                assert_eq!(c.to_f64(), 1.0);
            }
        }
    }

    #[test]
    fn cg_two_spin_halves_by_lowering() {
        // |1,1⟩ = |↑↑⟩; the total lowering operator S₋ ⊗ 1 + 1 ⊗ S₋ applied
        // to it gives |1,0⟩ on the product basis (↑↑, ↑↓, ↓↑, ↓↓).
        let lower = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 1.0, 0.0]);
        let id = DMatrix::<f64>::identity(2, 2);
        let total = lower.kronecker(&id) + id.kronecker(&lower);
        let lowered = total * nalgebra::DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0]);
        let oracle = lowered[1] / lowered.norm(); // ⟨↑↓|1,0⟩
        let c = clebsch_gordan(h(1), h(1), h(1), h(-1), h(2), h(0)).unwrap();
        assert_eq!(c, SignedSqrtRational::new(1, 1u32.into(), 2u32.into()).unwrap());
        assert!((c.to_f64() - oracle).abs() < 1e-15);
    }

    #[test]
    fn cg_against_float_racah() {
        let c = clebsch_gordan(h(2), h(2), h(4), h(0), h(2), h(2)).unwrap();
        assert_eq!(c, SignedSqrtRational::new(1, 1u32.into(), 10u32.into()).unwrap());
        assert!((c.to_f64() - racah_f64(1.0, 1.0, 2.0, 0.0, 1.0, 1.0)).abs() < 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..2000 {
            let tj1 = rng.gen_range(0..10);
            let tj2 = rng.gen_range(0..10);
            let lo = (tj1 - tj2).abs();
            let tj = lo + 2 * rng.gen_range(0..=((tj1 + tj2 - lo) / 2));
            let tm1 = -tj1 + 2 * rng.gen_range(0..=tj1);
            let tm2 = -tj2 + 2 * rng.gen_range(0..=tj2);
            let tm = tm1 + tm2;
            if tm.abs() > tj {
                continue;
            }
            let exact = clebsch_gordan(h(tj1), h(tm1), h(tj2), h(tm2), h(tj), h(tm)).unwrap().to_f64();
            let oracle = racah_f64(
                tj1 as f64 / 2.0,
                tm1 as f64 / 2.0,
                tj2 as f64 / 2.0,
                tm2 as f64 / 2.0,
                tj as f64 / 2.0,
                tm as f64 / 2.0,
            );
            assert!((exact - oracle).abs() < 1e-12, "{tj1} {tm1} {tj2} {tm2} {tj} {tm}");
        }
    }

    #[test]
    fn cg_selection_rules_and_errors() {
        assert!(clebsch_gordan(h(2), h(2), h(2), h(0), h(2), h(0)).unwrap().is_zero());
        assert!(clebsch_gordan(h(2), h(0), h(2), h(0), h(6), h(0)).unwrap().is_zero());
        assert!(clebsch_gordan(h(2), h(1), h(2), h(0), h(2), h(1)).is_err());
        assert!(clebsch_gordan(h(2), h(4), h(2), h(0), h(2), h(4)).is_err());
    }

    /// Exact `√(a)` of a non-negative rational when it is a perfect square.
    fn exact_sqrt(r: &BigRational) -> Option<BigRational> {
        let n = r.numer().to_biguint()?;
        let d = r.denom().to_biguint()?;
        let (sn, sd) = (n.sqrt(), d.sqrt());
        (&sn * &sn == n && &sd * &sd == d).then(|| BigRational::new(sn.into(), sd.into()))
    }

    #[test]
    fn cg_orthogonality_is_exact() {
        for tj1 in 0..=12 {
            for tj2 in 0..=12 {
                let lo = (tj1 - tj2).abs();
                let mut table: HashMap<(i32, i32, i32), SignedSqrtRational> = HashMap::new();
                for tj in (lo..=tj1 + tj2).step_by(2) {
                    for tm1 in (-tj1..=tj1).step_by(2) {
                        for tm2 in (-tj2..=tj2).step_by(2) {
                            if (tm1 + tm2).abs() > tj {
                                continue;
                            }
                            let c = clebsch_gordan(h(tj1), h(tm1), h(tj2), h(tm2), h(tj), h(tm1 + tm2)).unwrap();
                            table.insert((tj, tm1, tm2), c);
                        }
                    }
                }
                for tj in (lo..=tj1 + tj2).step_by(2) {
                    for tjp in (tj..=tj1 + tj2).step_by(2) {
                        for tm in (-tj..=tj).step_by(2) {
                            // Terms s·√(p_i); all p_i share one irrational factor, so
                            // dividing by the first leaves exact rational square roots.
                            let terms: Vec<(i8, BigRational)> = (-tj1..=tj1)
                                .step_by(2)
                                .filter_map(|tm1| {
                                    let a = table.get(&(tj, tm1, tm - tm1))?;
                                    let b = table.get(&(tjp, tm1, tm - tm1))?;
                                    if a.is_zero() || b.is_zero() {
                                        return None;
                                    }
                                    let p = a.signed_square().abs() * b.signed_square().abs();
                                    Some((a.sign() * b.sign(), p))
                                })
                                .collect();
                            let expected = i32::from(tj == tjp);
                            let Some((_, p0)) = terms.first() else {
                                assert_eq!(expected, 0);
                                continue;
                            };
                            let p0 = p0.clone();
                            let mut sum = BigRational::zero();
                            for (s, p) in &terms {
                                let ratio = exact_sqrt(&(p / &p0)).expect("common irrational factor");
                                sum += if *s > 0 { ratio } else { -ratio };
                            }
                            if expected == 1 {
                                // p0 is a perfect square when J = J'.
                                let root = exact_sqrt(&p0).unwrap();
                                assert_eq!(sum * root, BigRational::one());
                            } else {
                                assert!(sum.is_zero(), "{tj1} {tj2} {tj} {tjp} {tm}");
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn small_d_examples() {
        for tj in 0..10 {
            let d = wigner_small_d(h(tj), 0.0).unwrap();
            assert!((d.clone() - DMatrix::identity(tj as usize + 1, tj as usize + 1)).norm() < 1e-15);
        }
        let d = wigner_small_d(HalfInt::HALF, FRAC_PI_2).unwrap();
        assert!((d[(0, 0)] - SQRT_2 / 2.0).abs() < 1e-15);
        let beta = 0.83f64;
        let closed = DMatrix::from_row_slice(
            2,
            2,
            &[(beta / 2.0).cos(), -(beta / 2.0).sin(), (beta / 2.0).sin(), (beta / 2.0).cos()],
        );
        assert!((wigner_small_d(HalfInt::HALF, beta).unwrap() - closed).norm() < 1e-15);
    }

    #[test]
    fn small_d_orthogonal_and_additive() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for tj in 0..=20 {
            let (b1, b2) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let d1 = wigner_small_d(h(tj), b1).unwrap();
            let d2 = wigner_small_d(h(tj), b2).unwrap();
            let n = tj as usize + 1;
            assert!((&d1 * d1.transpose() - DMatrix::identity(n, n)).norm() < 1e-12);
            assert!((wigner_small_d(h(tj), b1 + b2).unwrap() - &d1 * &d2).norm() < 1e-12);
        }
    }

    #[test]
    fn big_d_examples() {
        let id = wigner_big_d(h(3), &EulerAngles::identity()).unwrap();
        assert!((id - CMatrix::identity(4, 4)).norm() < 1e-15);
        let g = 0.77;
        let d = wigner_big_d(HalfInt::HALF, &EulerAngles::new(0.0, 0.0, g).unwrap()).unwrap();
        assert!((d[(0, 0)] - Complex64::from_polar(1.0, -g / 2.0)).norm() < 1e-15);
        assert!((d[(1, 1)] - Complex64::from_polar(1.0, g / 2.0)).norm() < 1e-15);
        assert!(d[(0, 1)].norm() < 1e-15 && d[(1, 0)].norm() < 1e-15);
    }

    fn random_angles(rng: &mut ChaCha8Rng) -> EulerAngles {
        EulerAngles::new(rng.gen_range(-3.0..3.0), rng.gen_range(0.05..3.1), rng.gen_range(-3.0..3.0)).unwrap()
    }

    #[test]
    fn big_d_unitary_and_composes() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let (g1, g2) = (random_angles(&mut rng), random_angles(&mut rng));
            let d1 = wigner_big_d(HalfInt::ONE, &g1).unwrap();
            let d2 = wigner_big_d(HalfInt::ONE, &g2).unwrap();
            assert!((&d1 * d1.adjoint() - CMatrix::identity(3, 3)).norm() < 1e-12);
            let composed = EulerAngles::from_rotation_matrix(&(g1.rotation_matrix() * g2.rotation_matrix()));
            let d12 = wigner_big_d(HalfInt::ONE, &composed).unwrap();
            assert!((&d1 * &d2 - d12).norm() < 1e-12);
        }
    }

    #[test]
    fn big_d_rotates_spin_vector() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for tj in 1..=10 {
            let g = random_angles(&mut rng);
            let d = wigner_big_d(h(tj), &g).unwrap();
            let r = g.rotation_matrix();
            let s = stokes_matrices(h(tj));
            let comps = [&s.sx, &s.sy, &s.sz];
            for i in 0..3 {
                let lhs = &d * comps[i] * d.adjoint();
                let rhs = (0..3).fold(CMatrix::zeros(tj as usize + 1, tj as usize + 1), |acc, j| {
                    acc + comps[j] * Complex64::from(r[(j, i)])
                });
                assert!((lhs - rhs).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn ratio_handles_huge_operands() {
        let big = factorial(200);
        let v = ratio_to_f64(&(&big * 3u32), &big);
        assert!((v - 3.0).abs() < 1e-15);
    }
}
