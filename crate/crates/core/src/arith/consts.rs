//! Certified transcendental constants: pi, roots of unity, quantum integers,
//! and the distinguished degree-16 root `z`.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;

use super::ball::{Real, Scalar};
use super::ArithError;

const GUARD: u32 = 64;

/// `sum_k (-1)^k / ((2k+1) x^(2k+1))` in fixed point with `bits` fractional
/// bits; returns the value and an error bound in units of `2^-bits`.
fn atan_inv_fixed(x: u32, bits: u32) -> (BigInt, u64) {
    let scale = BigInt::one() << bits as usize;
    let x = BigInt::from(x);
    let x2 = &x * &x;
    let mut power = scale.div_floor(&x);
    let mut sum = power.clone();
    let mut k: u64 = 0;
    loop {
        power = power.div_floor(&x2);
        if power == BigInt::from(0) {
            break;
        }
        k += 1;
        let term = power.div_floor(&BigInt::from(2 * k + 1));
        if k % 2 == 1 {
            sum -= term;
        } else {
            sum += term;
        }
    }
    // each summand is off by < 2 units; the neglected tail is < 1 unit
    (sum, 2 * (k + 1) + 1)
}

fn compute_pi(prec: u32) -> Real {
    let bits = prec + GUARD;
    let (a, ea) = atan_inv_fixed(5, bits);
    let (b, eb) = atan_inv_fixed(239, bits);
    let man = a * 16 - b * 4;
    let err_units = 16 * ea + 4 * eb;
    let unit = 2f64.powi(-(bits as i32));
    Real::from_dyadic(man, -(bits as i64), prec).with_radius((err_units as f64 * unit).next_up())
}

fn cache<K: std::hash::Hash + Eq + Copy, V: Clone>(
    cell: &'static OnceLock<Mutex<HashMap<K, V>>>,
    key: K,
    make: impl FnOnce() -> V,
) -> V {
    let map = cell.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = map.lock().expect("constant cache poisoned").get(&key) {
        return v.clone();
    }
    let v = make();
    map.lock().expect("constant cache poisoned").insert(key, v.clone());
    v
}

/// Enclosure of pi at `prec` bits.
pub fn pi(prec: u32) -> Real {
    static PI: OnceLock<Mutex<HashMap<u32, Real>>> = OnceLock::new();
    cache(&PI, prec, || compute_pi(prec))
}

/// `(cos x, sin x)` for a ball `|x| <= 4` via Taylor series with a tail bound.
fn cos_sin(x: &Real, prec: u32) -> (Real, Real) {
    let x2 = x.sqr();
    let target = 2f64.powi(-(prec as i32) - 16);
    let xmax = x.abs_upper();
    let mut cos = Real::from_int(1, prec);
    let mut sin = x.clone();
    let mut ct = Real::from_int(1, prec);
    let mut st = x.clone();
    let mut n: i64 = 1;
    loop {
        // ct = (-1)^k x^(2k)/(2k)!, st = (-1)^k x^(2k+1)/(2k+1)!
        ct = ct.mul(&x2).neg().div(&Real::from_int((2 * n - 1) * (2 * n), prec)).expect("nonzero");
        st = st.mul(&x2).neg().div(&Real::from_int((2 * n) * (2 * n + 1), prec)).expect("nonzero");
        cos = cos.add(&ct);
        sin = sin.add(&st);
        n += 1;
        if (2 * n) as f64 > 2.0 * xmax + 2.0 && ct.abs_upper() < target && st.abs_upper() < target {
            break;
        }
    }
    // alternating tails past the peak are bounded by the first omitted term,
    // which is below the last computed term
    let tail = ct.abs_upper().max(st.abs_upper());
    (cos.with_radius(tail), sin.with_radius(tail))
}

/// `e^{2 pi i k / l}` as a complex ball.
pub fn root_of_unity(l: u32, k: i64, prec: u32) -> Result<Scalar, ArithError> {
    if l == 0 {
        return Err(ArithError::InvalidArgument("root of unity order must be positive".into()));
    }
    let l64 = l as i64;
    let r = k.rem_euclid(l64);
    // exact axis points
    if r == 0 {
        return Ok(Scalar::one(prec));
    }
    if 2 * r == l64 {
        return Ok(Scalar::from_int(-1, prec));
    }
    if 4 * r == l64 {
        return Ok(Scalar::i(prec));
    }
    if 4 * r == 3 * l64 {
        return Ok(Scalar::i(prec).neg());
    }
    static ROOTS: OnceLock<Mutex<HashMap<(u32, i64, u32), Scalar>>> = OnceLock::new();
    Ok(cache(&ROOTS, (l, r, prec), || {
        let wp = prec + 32;
        // reduce to an angle in (-pi, pi]
        let signed = if 2 * r > l64 { r - l64 } else { r };
        let angle = pi(wp)
            .mul_int(2 * signed)
            .div(&Real::from_int(l64, wp))
            .expect("nonzero order");
        let (c, s) = cos_sin(&angle, wp);
        Scalar::new(c, s)
    }))
}

/// Quantum integer `[n]_q` at `q = e^{2 pi i / order}`, i.e. `sin(n t)/sin(t)` with `t = 2pi/order`.
pub fn quantum_integer(n: i64, order: u32, prec: u32) -> Result<Real, ArithError> {
    let top = root_of_unity(order, n, prec)?;
    let bottom = root_of_unity(order, 1, prec)?;
    top.im.div(&bottom.im)
}

/// Which of the sixteen roots of `9x^16 - 14x^8 + 9` is meant by `z`.
///
/// `z^8` is one of `(7 +- 4 sqrt(2) i)/9`; `z` is `zeta_8^octant` times the
/// principal eighth root of that value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RootSelection {
    pub conjugate_branch: bool,
    pub octant: u8,
}

/// Printed approximation used to pick the root.
pub const Z_APPROX: (f64, f64) = (-0.996393, 0.0848571);

fn eighth_power_value(conjugate_branch: bool, prec: u32) -> Result<Scalar, ArithError> {
    let sqrt2 = Real::from_int(2, prec).sqrt()?;
    let nine = Real::from_int(9, prec);
    let re = Real::from_int(7, prec).div(&nine)?;
    let mut im = sqrt2.mul_int(4).div(&nine)?;
    if conjugate_branch {
        im = im.neg();
    }
    Ok(Scalar::new(re, im))
}

fn candidate(sel: RootSelection, prec: u32) -> Result<Scalar, ArithError> {
    let y = eighth_power_value(sel.conjugate_branch, prec)?;
    let w = y.sqrt()?.sqrt()?.sqrt()?;
    Ok(w.mul(&root_of_unity(8, sel.octant as i64, prec)?))
}

fn all_candidates(prec: u32) -> Result<Vec<(RootSelection, Scalar)>, ArithError> {
    let mut out = Vec::with_capacity(16);
    for conjugate_branch in [false, true] {
        for octant in 0..8u8 {
            let sel = RootSelection { conjugate_branch, octant };
            out.push((sel, candidate(sel, prec)?));
        }
    }
    Ok(out)
}

/// Isolate all sixteen roots and pick the one nearest to [`Z_APPROX`].
pub fn select_z_root(prec: u32) -> Result<RootSelection, ArithError> {
    let cands = all_candidates(prec)?;
    let mut dists: Vec<(f64, RootSelection)> = cands
        .iter()
        .map(|(sel, s)| {
            let (re, im) = s.to_c64();
            (((re - Z_APPROX.0).powi(2) + (im - Z_APPROX.1).powi(2)).sqrt(), *sel)
        })
        .collect();
    dists.sort_by(|a, b| a.0.total_cmp(&b.0));
    if dists[1].0 - dists[0].0 < 1e-3 {
        return Err(ArithError::RootIsolation(prec));
    }
    Ok(dists[0].1)
}

/// The fixed selection for `z`, computed once.
pub fn z_selection() -> RootSelection {
    static SEL: OnceLock<RootSelection> = OnceLock::new();
    *SEL.get_or_init(|| select_z_root(64).expect("z root isolation at 64 bits"))
}

/// Certified enclosure of `z` at `prec >= 64` bits.
pub fn z_value(prec: u32) -> Result<Scalar, ArithError> {
    if prec < 64 {
        return Err(ArithError::RootIsolation(prec));
    }
    static Z: OnceLock<Mutex<HashMap<u32, Result<Scalar, ArithError>>>> = OnceLock::new();
    cache(&Z, prec, || {
        let sel = z_selection();
        let cands = all_candidates(prec)?;
        let chosen = candidate(sel, prec)?;
        for (other, s) in &cands {
            if *other != sel && !s.sub(&chosen).excludes_zero() {
                return Err(ArithError::RootIsolation(prec));
            }
        }
        Ok(chosen)
    })
}
