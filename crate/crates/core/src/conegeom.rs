//! Schur-cone membership and exact two-dimensional ray hulls.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::charpoly::SchurVector;
use crate::combinat::Partition;
use crate::error::{Error, Result};
use crate::poly::{rat, Poly};

/// Non-negativity of every Schur coordinate, with the negative ones as witness.
pub fn in_schur_cone(v: &SchurVector) -> (bool, Vec<Partition>) {
    crate::charpoly::nonnegative_coords(v)
}

/// Exact plane vector.
pub type Ray = [BigInt; 2];

fn cross(a: &Ray, b: &Ray) -> BigInt {
    &a[0] * &b[1] - &a[1] * &b[0]
}

fn dot(a: &Ray, b: &Ray) -> BigInt {
    &a[0] * &b[0] + &a[1] * &b[1]
}

fn is_zero(a: &Ray) -> bool {
    a[0].is_zero() && a[1].is_zero()
}

/// 0 for angles in `[0, π)`, 1 for `[π, 2π)`.
fn half(a: &Ray) -> u8 {
    if a[1].is_positive() || (a[1].is_zero() && a[0].is_positive()) {
        0
    } else {
        1
    }
}

/// Exact polar-angle order on non-zero vectors.
pub fn angle_cmp(a: &Ray, b: &Ray) -> Ordering {
    half(a).cmp(&half(b)).then_with(|| BigInt::zero().cmp(&cross(a, b)))
}

/// A family of plane rays given by two polynomial coordinates in ordered
/// parameters `p_1 > p_2 > … > p_k ≥ 0`.
///
/// Both coordinates are homogeneous of the same degree, so the top parameter
/// is normalized to `N` and the rest range over the integers `0..N`.
#[derive(Clone, Debug)]
pub struct RayFamily2D {
    pub name: String,
    pub x: Poly,
    pub y: Poly,
}

impl RayFamily2D {
    pub fn new(name: &str, x: Poly, y: Poly) -> Self {
        assert_eq!(x.nvars(), y.nvars());
        assert!(x.nvars() >= 1);
        Self {
            name: name.into(),
            x,
            y,
        }
    }

    pub fn params(&self) -> usize {
        self.x.nvars()
    }

    /// Evaluate at an integer parameter point.
    pub fn eval(&self, p: &[i64]) -> Ray {
        let vals: Vec<BigRational> = p.iter().map(|&v| rat(v)).collect();
        let ev = |q: &Poly| -> BigInt {
            let v = q.substitute(&vals, &rat(1), |c| c.clone());
            assert!(v.is_integer(), "integer coefficients expected");
            v.to_integer()
        };
        [ev(&self.x), ev(&self.y)]
    }

    /// Rays on the grid `p_1 = N > p_2 > … > p_k ≥ 0`.
    pub fn sample(&self, n: i64) -> Vec<(Vec<i64>, Ray)> {
        let k = self.params();
        let mut out = Vec::new();
        let mut cur = vec![n];
        fn rec(fam: &RayFamily2D, k: usize, cur: &mut Vec<i64>, out: &mut Vec<(Vec<i64>, Ray)>) {
            if cur.len() == k {
                out.push((cur.clone(), fam.eval(cur)));
                return;
            }
            let top = *cur.last().unwrap();
            for v in 0..top {
                cur.push(v);
                rec(fam, k, cur, out);
                cur.pop();
            }
        }
        rec(self, k, &mut cur, &mut out);
        out
    }
}

fn var(n: usize, i: usize) -> Poly {
    Poly::var(n, i)
}

fn c(n: usize, v: i64) -> Poly {
    Poly::constant(n, rat(v))
}

/// Built-in families, by name.
pub fn builtin_family(name: &str) -> Option<RayFamily2D> {
    let fam = match name {
        "fcone-r3-proj" => {
            // [2a(a^3 - 3ab^2 + 2b^3), 3a^4 - 4a^3 b + b^4]
            let (a, b) = (var(2, 0), var(2, 1));
            let x = a
                .pow(3)
                .sub(&c(2, 3).mul(&a).mul(&b.pow(2)))
                .add(&c(2, 2).mul(&b.pow(3)))
                .mul(&a)
                .mul(&c(2, 2));
            let y = c(2, 3)
                .mul(&a.pow(4))
                .sub(&c(2, 4).mul(&a.pow(3)).mul(&b))
                .add(&b.pow(4));
            RayFamily2D::new(name, x, y)
        }
        "fcone-r3-hyper" => {
            // [2b(2a^3 - 3a^2 b + b^3), a^4 - 4ab^3 + 3b^4]
            let (a, b) = (var(2, 0), var(2, 1));
            let x = c(2, 2)
                .mul(&a.pow(3))
                .sub(&c(2, 3).mul(&a.pow(2)).mul(&b))
                .add(&b.pow(3))
                .mul(&b)
                .mul(&c(2, 2));
            let y = a
                .pow(4)
                .sub(&c(2, 4).mul(&a).mul(&b.pow(3)))
                .add(&c(2, 3).mul(&b.pow(4)));
            RayFamily2D::new(name, x, y)
        }
        "fcone-r3-complete" => {
            // [10(a^2b^2(a-b) - a^2c^2(a-c) + b^2c^2(b-c)),
            //  5(ab(a^3-b^3) - ac(a^3-c^3) + bc(b^3-c^3))]
            let (a, b, cc) = (var(3, 0), var(3, 1), var(3, 2));
            let t1 = |p: &Poly, q: &Poly| p.pow(2).mul(&q.pow(2)).mul(&p.sub(q));
            let t2 = |p: &Poly, q: &Poly| p.mul(q).mul(&p.pow(3).sub(&q.pow(3)));
            let x = t1(&a, &b).sub(&t1(&a, &cc)).add(&t1(&b, &cc)).mul(&c(3, 10));
            let y = t2(&a, &b).sub(&t2(&a, &cc)).add(&t2(&b, &cc)).mul(&c(3, 5));
            RayFamily2D::new(name, x, y)
        }
        "fcone-r2" => {
            // [3ab(a-b), a^3 - b^3]
            let (a, b) = (var(2, 0), var(2, 1));
            let x = c(2, 3).mul(&a).mul(&b).mul(&a.sub(&b));
            let y = a.pow(3).sub(&b.pow(3));
            RayFamily2D::new(name, x, y)
        }
        _ => return None,
    };
    Some(fam)
}

pub const BUILTIN_FAMILIES: [&str; 4] = ["fcone-r3-proj", "fcone-r3-hyper", "fcone-r3-complete", "fcone-r2"];

/// Convex hull of a set of plane rays.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RayHull {
    /// Rays counter-clockwise from `lo` to `hi`, opening at most `π`.
    Sector { lo: Ray, hi: Ray },
    /// The rays positively span the whole plane.
    Plane,
}

impl RayHull {
    /// Opening angle in radians (reporting only).
    pub fn opening(&self) -> f64 {
        match self {
            RayHull::Plane => 2.0 * core::f64::consts::PI,
            RayHull::Sector { lo, hi } => {
                let d = angle_of(hi) - angle_of(lo);
                if d < 0.0 {
                    d + 2.0 * core::f64::consts::PI
                } else {
                    d
                }
            }
        }
    }
}

fn to_f64(a: &BigInt) -> f64 {
    a.to_f64().unwrap_or(f64::NAN)
}

/// Polar angle in `[0, 2π)` (reporting only).
pub fn angle_of(a: &Ray) -> f64 {
    let t = num_traits::Float::atan2(to_f64(&a[1]), to_f64(&a[0]));
    if t < 0.0 {
        t + 2.0 * core::f64::consts::PI
    } else {
        t
    }
}

/// Hull of the given rays; zero rays are ignored.
pub fn hull_of_rays(rays: &[Ray]) -> Result<RayHull> {
    let mut v: Vec<Ray> = rays.iter().filter(|r| !is_zero(r)).cloned().collect();
    if v.is_empty() {
        return Err(Error::AllRaysZero);
    }
    v.sort_by(angle_cmp);
    v.dedup_by(|a, b| angle_cmp(a, b) == Ordering::Equal);
    if v.len() == 1 {
        return Ok(RayHull::Sector {
            lo: v[0].clone(),
            hi: v[0].clone(),
        });
    }
    // A gap between consecutive rays (counter-clockwise) is "wide" when it
    // is at least π: cross ≤ 0, excluding the zero-angle same-direction case.
    let n = v.len();
    let mut wide: Option<usize> = None;
    for i in 0..n {
        let a = &v[i];
        let b = &v[(i + 1) % n];
        let cr = cross(a, b);
        let is_wide = cr.is_negative() || (cr.is_zero() && dot(a, b).is_negative());
        if is_wide {
            match wide {
                None => wide = Some(i),
                Some(_) => {
                    // Two gaps of at least π: two opposite rays, reported as a half-plane.
                    return Ok(RayHull::Sector {
                        lo: v[0].clone(),
                        hi: v[1].clone(),
                    });
                }
            }
        }
    }
    match wide {
        None => Ok(RayHull::Plane),
        Some(i) => Ok(RayHull::Sector {
            lo: v[(i + 1) % n].clone(),
            hi: v[i].clone(),
        }),
    }
}

/// Sampled hull of one or more families on the grid with denominator `grid`.
pub fn ray_hull_2d(families: &[RayFamily2D], grid: i64) -> Result<RayHull> {
    let rays: Vec<Ray> = families
        .iter()
        .flat_map(|f| f.sample(grid).into_iter().map(|(_, r)| r))
        .collect();
    hull_of_rays(&rays)
}

/// Membership of a target ray, with the angular distance to the nearest
/// boundary ray expressed as a sine (1 beyond a right angle).
#[derive(Clone, Debug, PartialEq)]
pub struct Membership {
    pub inside: bool,
    pub margin: f64,
}

fn sine_distance(a: &Ray, t: &Ray) -> f64 {
    if !dot(a, t).is_positive() {
        return 1.0;
    }
    let cr = to_f64(&cross(a, t).abs());
    let na = (to_f64(&a[0]).powi(2) + to_f64(&a[1]).powi(2)).sqrt();
    let nt = (to_f64(&t[0]).powi(2) + to_f64(&t[1]).powi(2)).sqrt();
    cr / (na * nt)
}

pub fn cone_membership_2d(target: &Ray, hull: &RayHull) -> Result<Membership> {
    if is_zero(target) {
        return Err(Error::ZeroTarget);
    }
    let (lo, hi) = match hull {
        RayHull::Plane => {
            return Ok(Membership {
                inside: true,
                margin: 1.0,
            })
        }
        RayHull::Sector { lo, hi } => (lo, hi),
    };
    let c1 = cross(lo, target);
    let c2 = cross(target, hi);
    let span = cross(lo, hi);
    let inside = if span.is_zero() && dot(lo, hi).is_negative() {
        // Half-plane.
        !c1.is_negative()
    } else if span.is_zero() {
        c1.is_zero() && dot(lo, target).is_positive()
    } else {
        !c1.is_negative() && !c2.is_negative()
    };
    let margin = sine_distance(lo, target).min(sine_distance(hi, target));
    Ok(Membership { inside, margin })
}

/// Rays of the family that leave the second coordinate axis.
pub fn off_axis_rays(fam: &RayFamily2D, grid: i64) -> Vec<(Vec<i64>, Ray)> {
    fam.sample(grid)
        .into_iter()
        .filter(|(_, r)| !r[0].is_zero())
        .collect()
}

pub fn ray(x: i64, y: i64) -> Ray {
    [BigInt::from(x), BigInt::from(y)]
}

pub fn describe(hull: &RayHull) -> String {
    match hull {
        RayHull::Plane => "whole plane".into(),
        RayHull::Sector { lo, hi } => format!(
            "sector from {:.4} to {:.4} rad",
            angle_of(lo),
            angle_of(hi)
        ),
    }
}
