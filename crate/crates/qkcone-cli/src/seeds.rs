//! Built-in example loop elements.
//!
//! These follow external conventions for small J-function-shaped inputs. They
//! are not claimed to be cone points; suites only compare transforms of them.

use qkcone::json::{Target, TargetModel};
use qkcone::kring::KClass;
use qkcone::loopspace::LoopElement;
use qkcone::{Error, Result, Scalar};

pub const SEEDS: &[(&str, &str)] = &[
    ("P1-trivial", "1 - q at degree 0 only, on P^1"),
    ("hypergeometric", "(1 - q) / prod_i prod_{s=1}^{d_i} (1 - P_i q^s)^(n_i + 1) on products of projective spaces"),
];

pub fn is_seed(name: &str) -> bool {
    SEEDS.iter().any(|(n, _)| *n == name)
}

pub fn seed(name: &str, target: &Target, dmax: u32) -> Result<LoopElement> {
    let ring = &target.ring;
    match name {
        "P1-trivial" => {
            if ring.n_generators() != 1 || ring.dim() != 2 {
                return Err(Error::Config("P1-trivial needs a P^1 target".into()));
            }
            let mut j = LoopElement::new(ring, 1, dmax);
            j.insert(vec![0], KClass::constant(ring, Scalar::one().sub(&Scalar::q())))?;
            Ok(j)
        }
        "hypergeometric" => {
            let TargetModel::Projective { dims } = &target.config.model else {
                return Err(Error::Config("hypergeometric seed needs a projective target".into()));
            };
            let n = dims.len();
            let mut j = LoopElement::new(ring, n, dmax);
            for d in LoopElement::all_degrees(n, dmax) {
                let mut f = KClass::constant(ring, Scalar::one().sub(&Scalar::q()));
                for (i, &di) in d.iter().enumerate() {
                    let p = KClass::generator(ring, i);
                    for s in 1..=di {
                        let fac = KClass::one(ring).sub(&p.scale(&Scalar::q().pow(s)?))?;
                        f = f.mul(&fac.pow(-(dims[i] as i64 + 1))?)?;
                    }
                }
                j.insert(d, f)?;
            }
            Ok(j)
        }
        other => Err(Error::Config(format!("unknown seed {:?}", other))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use qkcone::json::TargetConfig;

    #[test]
    fn seeds_check_their_target() {
        let p2 = TargetConfig::projective(&[2]).build().unwrap();
        assert!(seed("P1-trivial", &p2, 2).is_err());
        assert!(seed("unknown", &p2, 2).is_err());
        let j = seed("hypergeometric", &p2, 2).unwrap();
        assert_eq!(j.entries.len(), 3);
    }

    #[test]
    fn hypergeometric_degree_zero_is_one_minus_q() {
        let p = TargetConfig::projective(&[1, 1]).build().unwrap();
        let j = seed("hypergeometric", &p, 1).unwrap();
        let want = KClass::constant(&p.ring, Scalar::one().sub(&Scalar::q()));
        assert_eq!(j.get(&[0, 0]), want);
    }
}
