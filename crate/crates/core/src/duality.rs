//! Binary Fourier (Hadamard) duality of bond Boltzmann factors.
//!
//! The dual cluster factor uses the same cluster graph as the primal one; only
//! the per-slot weights change, `w*(parity) = x*_parity`. Normalisations (`1/√2`
//! per single-layer bond, `1/2` per two-layer slot) are kept inside the
//! transforms so both sides of the duality condition compare directly.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::cluster::{ClusterFactor, ClusterSpec, DisorderAssignment};
use crate::error::{Error, Result};
use crate::evaluate::{evaluate, FactorTable};
use crate::model::{EdgeDisorder, NishimoriCoupling};

/// Bond weights indexed by parity. Single layer: `(x_0, x_1)` for parallel and
/// antiparallel spins. Two layers: `(x_00, x_01, x_10, x_11)` indexed by
/// `(primal parity, dual-layer parity)`. Dual components can be negative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EdgeFactorComponents {
    Single([f64; 2]),
    TwoLayer([f64; 4]),
}

impl EdgeFactorComponents {
    /// Boltzmann weights of a bond state at coupling `K`.
    pub fn boltzmann(disorder: &EdgeDisorder, coupling: NishimoriCoupling) -> Self {
        let k = coupling.value();
        match *disorder {
            EdgeDisorder::Single(t) => {
                let e = k * t as f64;
                EdgeFactorComponents::Single([e.exp(), (-e).exp()])
            }
            EdgeDisorder::Pair(t, u) => {
                let (t, u) = (t as f64, u as f64);
                let mut x = [0.0; 4];
                for (i, xi) in x.iter_mut().enumerate() {
                    let s = if i & 2 == 0 { 1.0 } else { -1.0 };
                    let sd = if i & 1 == 0 { 1.0 } else { -1.0 };
                    *xi = (k * (t * s + u * sd + t * u * s * sd)).exp();
                }
                EdgeFactorComponents::TwoLayer(x)
            }
        }
    }

    /// Components padded to four entries; unused entries are zero.
    pub fn components(&self) -> [f64; 4] {
        match *self {
            EdgeFactorComponents::Single([a, b]) => [a, b, 0.0, 0.0],
            EdgeFactorComponents::TwoLayer(x) => x,
        }
    }

    pub(crate) fn log_components(&self) -> [f64; 4] {
        self.components().map(f64::ln)
    }

    pub fn dual(&self) -> Self {
        match self {
            EdgeFactorComponents::Single(x) => dual_edge_factor_single(*x),
            EdgeFactorComponents::TwoLayer(x) => dual_edge_factor_twolayer(*x),
        }
    }
}

/// `(x_0*, x_1*) = ((x_0 + x_1)/√2, (x_0 - x_1)/√2)`.
pub fn dual_edge_factor_single(x: [f64; 2]) -> EdgeFactorComponents {
    EdgeFactorComponents::Single([(x[0] + x[1]) * FRAC_1_SQRT_2, (x[0] - x[1]) * FRAC_1_SQRT_2])
}

/// Four-point Hadamard transform with overall factor `1/2`, i.e. the tensor
/// product of the single-layer transform on each layer.
pub fn dual_edge_factor_twolayer(x: [f64; 4]) -> EdgeFactorComponents {
    let [x00, x01, x10, x11] = x;
    let (s0, d0) = (x00 + x01, x00 - x01);
    let (s1, d1) = (x10 + x11, x10 - x11);
    EdgeFactorComponents::TwoLayer([0.5 * (s0 + s1), 0.5 * (d0 + d1), 0.5 * (s0 - s1), 0.5 * (d0 - d1)])
}

/// `ln x_0^cl*`: same graph and boundary conditions as the primal factor with
/// every slot weight replaced by its dual components.
pub fn dual_cluster_partition(
    cluster: &ClusterSpec,
    disorder: &DisorderAssignment,
    coupling: NishimoriCoupling,
) -> Result<ClusterFactor> {
    if disorder.len() != cluster.slot_count() {
        return Err(Error::ShapeMismatch { expected: cluster.slot_count(), got: disorder.len() });
    }
    if disorder.iter().any(|d| d.layers() != cluster.layers()) {
        return Err(Error::Domain("disorder layer count does not match cluster".into()));
    }
    let table = FactorTable::new(disorder, coupling);
    let states: Vec<usize> = (0..disorder.len()).collect();
    let sums = evaluate(cluster, &table, &states);
    let (log_principal, sum) = (sums.dual_log_scale, sums.dual_scaled);
    if sum.is_nan() || sum <= 0.0 {
        return Err(Error::NonPositiveDual { cluster: cluster.name().to_string(), value: sum });
    }
    let v = log_principal + sum.ln();
    if !v.is_finite() {
        return Err(Error::NonFinite { coupling: coupling.value() });
    }
    Ok(ClusterFactor { log_value: v, sign: 1.0 })
}

/// Self-dual coupling of the pure Ising model, `exp(-2K) = tanh K`, by bisection.
pub fn pure_self_dual_point() -> f64 {
    let f = |k: f64| (-2.0 * k).exp() - k.tanh();
    let (mut lo, mut hi) = (0.1, 1.0);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::builtin_cluster;

    fn k(v: f64) -> NishimoriCoupling {
        NishimoriCoupling::from_value(v).unwrap()
    }

    #[test]
    fn single_transform_examples() {
        let d = dual_edge_factor_single([1.0, 1.0]).components();
        assert!((d[0] - 2f64.sqrt()).abs() < 1e-15 && d[1] == 0.0);
        let kv: f64 = 0.6;
        let d = dual_edge_factor_single([kv.exp(), (-kv).exp()]).components();
        assert!((d[0] - 2f64.sqrt() * kv.cosh()).abs() < 1e-14);
        assert!((d[1] - 2f64.sqrt() * kv.sinh()).abs() < 1e-14);
    }

    #[test]
    fn twolayer_transform_examples() {
        assert_eq!(dual_edge_factor_twolayer([1.0; 4]).components(), [2.0, 0.0, 0.0, 0.0]);
        let kv: f64 = 0.45;
        let x = EdgeFactorComponents::boltzmann(&EdgeDisorder::Pair(1, 1), k(kv));
        let e3 = (3.0 * kv).exp();
        let em = (-kv).exp();
        assert_eq!(x, EdgeFactorComponents::TwoLayer([e3, em, em, em]));
        let d = x.dual().components();
        assert!((d[0] - 0.5 * (e3 + 3.0 * em)).abs() < 1e-14);
    }

    #[test]
    fn transforms_are_involutions() {
        let xs = [[0.3, 2.5], [1.0, 1e-3], [7.0, 7.0]];
        for x in xs {
            let back = dual_edge_factor_single(x).dual().components();
            assert!((back[0] - x[0]).abs() <= 1e-14 * x[0].abs().max(1.0));
            assert!((back[1] - x[1]).abs() <= 1e-14 * x[1].abs().max(1.0));
        }
        let y = [0.2, 3.0, 1.5, 0.01];
        let back = dual_edge_factor_twolayer(y).dual().components();
        for i in 0..4 {
            assert!((back[i] - y[i]).abs() <= 1e-14 * y[i].max(1.0));
        }
    }

    #[test]
    fn self_dual_point() {
        let kc = pure_self_dual_point();
        assert!(((-2.0 * kc).exp() - kc.tanh()).abs() < 1e-10);
        // closed form ½ ln(1 + √2)
        assert!((kc - 0.5 * (1.0 + 2f64.sqrt()).ln()).abs() < 1e-11);
        assert!((kc - 0.440687).abs() < 1e-6);
    }

    #[test]
    fn dual_single_edge() {
        let s = builtin_cluster("SINGLE").unwrap();
        for t in [-1i8, 0, 1] {
            for kv in [0.0, 0.2, 1.7, 9.0] {
                let v = dual_cluster_partition(&s, &[EdgeDisorder::Single(t)], k(kv)).unwrap();
                let expect = (2f64.sqrt() * (kv * t as f64).cosh()).ln();
                assert!((v.log_value - expect).abs() < 1e-14, "t={t} K={kv}");
            }
        }
    }

    #[test]
    fn dual_star_closed_form() {
        let a = builtin_cluster("A").unwrap();
        let kv: f64 = 0.9;
        let v = dual_cluster_partition(&a, &[EdgeDisorder::Single(1); 4], k(kv)).unwrap();
        let expect = (4.0 * (kv.cosh().powi(4) + kv.sinh().powi(4))).ln();
        assert!((v.log_value - expect).abs() < 1e-13);

        // general prescription 4(Π cosh(Kτ) + Π sinh(Kτ)) with √2 per diluted bond
        let ts = [1i8, -1, -1, 1];
        let d: Vec<_> = ts.iter().map(|&t| EdgeDisorder::Single(t)).collect();
        let c: f64 = ts.iter().map(|&t| (kv * t as f64).cosh()).product();
        let sh: f64 = ts.iter().map(|&t| (kv * t as f64).sinh()).product();
        let v = dual_cluster_partition(&a, &d, k(kv)).unwrap();
        assert!((v.log_value - (4.0 * (c + sh)).ln()).abs() < 1e-13);
    }

    #[test]
    fn dual_crossing_slot() {
        let c = builtin_cluster("C").unwrap();
        let kv: f64 = 0.33;
        let v = dual_cluster_partition(&c, &[EdgeDisorder::Pair(1, 1)], k(kv)).unwrap();
        let expect = (0.5 * ((3.0 * kv).exp() + 3.0 * (-kv).exp())).ln();
        assert!((v.log_value - expect).abs() < 1e-14);
        let v = dual_cluster_partition(&c, &[EdgeDisorder::Pair(0, 0)], k(kv)).unwrap();
        assert!((v.log_value - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn star_depends_on_dilution_and_sign_parity_only() {
        let a = builtin_cluster("A").unwrap();
        let kv = 0.7;
        let mut seen: Vec<((usize, usize), f64)> = Vec::new();
        for m in 0..81 {
            let ts: Vec<i8> = (0..4).map(|s| [1, -1, 0][(m / 3usize.pow(s)) % 3]).collect();
            let d: Vec<_> = ts.iter().map(|&t| EdgeDisorder::Single(t)).collect();
            let v = dual_cluster_partition(&a, &d, k(kv)).unwrap().log_value;
            let key = (ts.iter().filter(|&&t| t == 0).count(), ts.iter().filter(|&&t| t == -1).count() % 2);
            match seen.iter().find(|(kk, _)| *kk == key) {
                Some((_, prev)) => assert!((prev - v).abs() < 1e-13, "{ts:?}"),
                None => seen.push((key, v)),
            }
        }
    }

    #[test]
    fn rejects_wrong_shape() {
        let a = builtin_cluster("A").unwrap();
        assert!(matches!(
            dual_cluster_partition(&a, &[EdgeDisorder::Single(1)], k(1.0)),
            Err(Error::ShapeMismatch { .. })
        ));
    }
}
