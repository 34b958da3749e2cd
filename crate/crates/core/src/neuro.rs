//! Sine-activated predictors and the six-gene genome.
//!
//! Each predictor is a fully connected network with one hidden layer of two
//! neurons and no biases. Input-to-hidden weights are drawn once from a
//! seeded stream and never change; the two hidden-to-output weights of each
//! predictor are the evolved genes.
//!
//! Input layouts (one-hot segments, in this order):
//!
//! | predictor | layout                                              |
//! |-----------|-----------------------------------------------------|
//! | HVPP      | `sfcr (n_sfcrs) ‖ vnf (4)`                          |
//! | HMHP      | `forwarding graph (n_sfcrs) ‖ vnf (4) ‖ instance`   |
//! | HLCP      | `embedding graph (n_sfcrs) ‖ src (n_nodes) ‖ dst (n_nodes)` |

use std::cmp::Ordering;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::topology::{NodeId, Topology};
use crate::workload::VnfKind;

pub const GENOME_LEN: usize = 6;

/// Range of HVPP and HLCP input weights.
pub const SIGNED_WEIGHT_RANGE: (f64, f64) = (-PI, PI);

/// Range of HMHP input weights. With three active inputs the hidden
/// pre-activation stays inside `(0, pi)`, so both hidden activations are
/// positive and a single output direction can place every VNF.
pub const HMHP_WEIGHT_RANGE: (f64, f64) = (0.0, PI / 3.0);

/// Hidden-to-output weights of one predictor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutputWeights {
    pub w21: f64,
    pub w22: f64,
}

impl OutputWeights {
    pub const fn new(w21: f64, w22: f64) -> Self {
        Self { w21, w22 }
    }
}

/// `(w21, w22)` for HVPP, HMHP and HLCP, in that order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Genome(pub [f64; GENOME_LEN]);

impl Genome {
    pub const ZERO: Genome = Genome([0.0; GENOME_LEN]);

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn hvpp(&self) -> OutputWeights {
        OutputWeights::new(self.0[0], self.0[1])
    }

    pub fn hmhp(&self) -> OutputWeights {
        OutputWeights::new(self.0[2], self.0[3])
    }

    pub fn hlcp(&self) -> OutputWeights {
        OutputWeights::new(self.0[4], self.0[5])
    }

    /// Lexicographic total order over the genes.
    pub fn lex_cmp(&self, other: &Genome) -> Ordering {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.total_cmp(b))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Activation {
    Sine,
    Relu,
}

impl Activation {
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Sine => z.sin(),
            Activation::Relu => z.max(0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector(pub Vec<f64>);

impl FeatureVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn from_sparse(width: usize, entries: &[(usize, f64)]) -> Self {
        let mut values = vec![0.0; width];
        for &(i, v) in entries {
            values[i] = v;
        }
        FeatureVector(values)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredictorSpec {
    pub input_width: usize,
    /// `input_width` rows of (to hidden 1, to hidden 2).
    pub fixed_weights: Vec<[f64; 2]>,
    pub seed: u64,
    pub amplitude: f64,
    pub activation: Activation,
}

impl PredictorSpec {
    pub fn random(input_width: usize, seed: u64, amplitude: f64, range: (f64, f64)) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fixed_weights = (0..input_width)
            .map(|_| [rng.random_range(range.0..range.1), rng.random_range(range.0..range.1)])
            .collect();
        Self {
            input_width,
            fixed_weights,
            seed,
            amplitude,
            activation: Activation::Sine,
        }
    }

    pub fn from_weights(fixed_weights: Vec<[f64; 2]>, amplitude: f64) -> Self {
        Self {
            input_width: fixed_weights.len(),
            fixed_weights,
            seed: 0,
            amplitude,
            activation: Activation::Sine,
        }
    }

    pub fn with_activation(mut self, activation: Activation) -> Self {
        self.activation = activation;
        self
    }

    /// `amplitude * act(w21*h1 + w22*h2)` with `h_j = act(sum_i W[i][j] * x[i])`.
    pub fn forward(&self, weights: OutputWeights, x: &FeatureVector) -> Result<f64> {
        if x.len() != self.input_width {
            return Err(Error::Shape {
                expected: self.input_width,
                got: x.len(),
            });
        }
        let mut pre = [0.0f64; 2];
        for (row, &xi) in self.fixed_weights.iter().zip(&x.0) {
            pre[0] += row[0] * xi;
            pre[1] += row[1] * xi;
        }
        Ok(self.output(weights, pre))
    }

    /// Same as [`forward`](Self::forward) for an input that is zero outside
    /// `entries`, which must be in ascending index order. Bit-identical to
    /// the dense path.
    pub(crate) fn forward_sparse(&self, weights: OutputWeights, entries: &[(usize, f64)]) -> f64 {
        let mut pre = [0.0f64; 2];
        for &(i, xi) in entries {
            let row = self.fixed_weights[i];
            pre[0] += row[0] * xi;
            pre[1] += row[1] * xi;
        }
        self.output(weights, pre)
    }

    fn output(&self, weights: OutputWeights, pre: [f64; 2]) -> f64 {
        let h1 = self.activation.apply(pre[0]);
        let h2 = self.activation.apply(pre[1]);
        self.amplitude * self.activation.apply(weights.w21 * h1 + weights.w22 * h2)
    }
}

/// Sizes of the one-hot segments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Universe {
    pub n_sfcrs: usize,
    pub n_nodes: usize,
}

impl Universe {
    pub fn new(n_sfcrs: usize, topo: &Topology) -> Self {
        Self {
            n_sfcrs,
            n_nodes: topo.n_nodes(),
        }
    }

    pub fn hvpp_width(&self) -> usize {
        self.n_sfcrs + VnfKind::COUNT
    }

    pub fn hmhp_width(&self) -> usize {
        self.n_sfcrs + VnfKind::COUNT + 1
    }

    pub fn hlcp_width(&self) -> usize {
        self.n_sfcrs + 2 * self.n_nodes
    }

    fn check_sfcr(&self, id: usize) -> Result<()> {
        if id >= self.n_sfcrs {
            return Err(Error::Encoding(format!(
                "sfcr {id} outside a universe of {} requests",
                self.n_sfcrs
            )));
        }
        Ok(())
    }

    fn hvpp_entries(&self, sfcr_id: usize, vnf: VnfKind) -> Result<[(usize, f64); 2]> {
        self.check_sfcr(sfcr_id)?;
        Ok([(sfcr_id, 1.0), (self.n_sfcrs + vnf.ordinal(), 1.0)])
    }

    fn hmhp_entries(&self, fg_id: usize, vnf: VnfKind, instance: i64) -> Result<[(usize, f64); 3]> {
        self.check_sfcr(fg_id)?;
        if instance < 0 {
            return Err(Error::Encoding(format!("negative VNF instance {instance}")));
        }
        Ok([
            (fg_id, 1.0),
            (self.n_sfcrs + vnf.ordinal(), 1.0),
            (self.n_sfcrs + VnfKind::COUNT, instance as f64),
        ])
    }

    fn hlcp_entries(&self, peg_id: usize, src: usize, dst: usize) -> Result<[(usize, f64); 3]> {
        self.check_sfcr(peg_id)?;
        for pos in [src, dst] {
            if pos >= self.n_nodes {
                return Err(Error::Encoding(format!(
                    "node slot {pos} outside {} nodes",
                    self.n_nodes
                )));
            }
        }
        Ok([
            (peg_id, 1.0),
            (self.n_sfcrs + src, 1.0),
            (self.n_sfcrs + self.n_nodes + dst, 1.0),
        ])
    }
}

pub fn encode_hvpp_input(sfcr_id: usize, vnf: VnfKind, universe: &Universe) -> Result<FeatureVector> {
    let entries = universe.hvpp_entries(sfcr_id, vnf)?;
    Ok(FeatureVector::from_sparse(universe.hvpp_width(), &entries))
}

pub fn encode_hmhp_input(fg_id: usize, vnf: VnfKind, instance: i64, universe: &Universe) -> Result<FeatureVector> {
    let entries = universe.hmhp_entries(fg_id, vnf, instance)?;
    Ok(FeatureVector::from_sparse(universe.hmhp_width(), &entries))
}

pub fn encode_hlcp_input(
    peg_id: usize,
    src: NodeId,
    dst: NodeId,
    topo: &Topology,
    universe: &Universe,
) -> Result<FeatureVector> {
    let src = topo.position(src).map_err(|e| Error::Encoding(e.to_string()))?;
    let dst = topo.position(dst).map_err(|e| Error::Encoding(e.to_string()))?;
    let entries = universe.hlcp_entries(peg_id, src, dst)?;
    Ok(FeatureVector::from_sparse(universe.hlcp_width(), &entries))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct PredictorSeeds {
    pub hvpp: u64,
    pub hmhp: u64,
    pub hlcp: u64,
}

impl Default for PredictorSeeds {
    fn default() -> Self {
        Self {
            hvpp: 101,
            hmhp: 202,
            hlcp: 303,
        }
    }
}

/// The three predictors for one (request set, topology) pair.
#[derive(Debug, Clone)]
pub struct Predictors {
    pub hvpp: PredictorSpec,
    pub hmhp: PredictorSpec,
    pub hlcp: PredictorSpec,
    pub universe: Universe,
}

impl Predictors {
    pub fn new(universe: Universe, n_hosts: usize, seeds: PredictorSeeds) -> Self {
        Self {
            hvpp: PredictorSpec::random(universe.hvpp_width(), seeds.hvpp, 1.0, SIGNED_WEIGHT_RANGE),
            hmhp: PredictorSpec::random(universe.hmhp_width(), seeds.hmhp, n_hosts as f64, HMHP_WEIGHT_RANGE),
            hlcp: PredictorSpec::random(universe.hlcp_width(), seeds.hlcp, 1.0, SIGNED_WEIGHT_RANGE),
            universe,
        }
    }

    pub fn for_topology(n_sfcrs: usize, topo: &Topology, seeds: PredictorSeeds) -> Self {
        Self::new(Universe::new(n_sfcrs, topo), topo.n_hosts(), seeds)
    }

    pub fn seeds(&self) -> PredictorSeeds {
        PredictorSeeds {
            hvpp: self.hvpp.seed,
            hmhp: self.hmhp.seed,
            hlcp: self.hlcp.seed,
        }
    }

    pub fn with_activation(mut self, activation: Activation) -> Self {
        self.hvpp.activation = activation;
        self.hmhp.activation = activation;
        self.hlcp.activation = activation;
        self
    }

    /// HVPP output.
    pub fn priority(&self, genome: &Genome, sfcr_id: usize, vnf: VnfKind) -> Result<f64> {
        let entries = self.universe.hvpp_entries(sfcr_id, vnf)?;
        Ok(self.hvpp.forward_sparse(genome.hvpp(), &entries))
    }

    /// HMHP output, in `[-n_hosts, n_hosts]`.
    pub fn mean_host(&self, genome: &Genome, fg_id: usize, vnf: VnfKind, instance: i64) -> Result<f64> {
        let entries = self.universe.hmhp_entries(fg_id, vnf, instance)?;
        Ok(self.hmhp.forward_sparse(genome.hmhp(), &entries))
    }

    /// HLCP output between two dense node positions, in `[-1, 1]`.
    pub fn link_heuristic(&self, genome: &Genome, peg_id: usize, src: usize, dst: usize) -> Result<f64> {
        let entries = self.universe.hlcp_entries(peg_id, src, dst)?;
        Ok(self.hlcp.forward_sparse(genome.hlcp(), &entries))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::generate_fat_tree;

    fn universe2() -> Universe {
        Universe {
            n_sfcrs: 2,
            n_nodes: 36,
        }
    }

    #[test]
    fn zero_output_weights_give_zero() {
        let spec = PredictorSpec::random(6, 7, 16.0, SIGNED_WEIGHT_RANGE);
        let x = encode_hvpp_input(1, VnfKind::TrafficMonitor, &universe2()).unwrap();
        assert_eq!(spec.forward(OutputWeights::new(0.0, 0.0), &x).unwrap(), 0.0);
    }

    #[test]
    fn quarter_period_hits_amplitude() {
        // h1 = sin(pi/2) = 1, h2 = sin(0) = 0, so w21 = pi/2 gives sin(pi/2).
        let spec = PredictorSpec::from_weights(vec![[PI / 2.0, 0.0]], 16.0);
        let out = spec
            .forward(OutputWeights::new(PI / 2.0, 5.0), &FeatureVector(vec![1.0]))
            .unwrap();
        assert_eq!(out, 16.0);
    }

    #[test]
    fn hand_computed_three_input_net() {
        let w = vec![[0.3, -1.2], [2.0, 0.7], [-0.4, 0.9]];
        let spec = PredictorSpec::from_weights(w, 1.0);
        let x = FeatureVector(vec![1.0, 0.0, 1.0]);
        // pre1 = 0.3 - 0.4 = -0.1, pre2 = -1.2 + 0.9 = -0.3
        let h1 = (-0.1f64).sin();
        let h2 = (-0.3f64).sin();
        let expected = (1.5 * h1 + -2.5 * h2).sin();
        let got = spec.forward(OutputWeights::new(1.5, -2.5), &x).unwrap();
        assert!((got - expected).abs() < 1e-12, "{got} vs {expected}");
        // sin(-0.1) = -0.0998334166, sin(-0.3) = -0.2955202067
        // 1.5*h1 - 2.5*h2 = 0.58905039168..., sin of that = 0.55557170400...
        assert!((got - 0.555_571_704_000_742_4).abs() < 1e-12, "{got}");
    }

    #[test]
    fn width_mismatch_is_shape_error() {
        let spec = PredictorSpec::random(6, 1, 1.0, SIGNED_WEIGHT_RANGE);
        let err = spec.forward(OutputWeights::new(1.0, 1.0), &FeatureVector(vec![0.0; 5]));
        assert!(matches!(err, Err(Error::Shape { expected: 6, got: 5 })));
    }

    #[test]
    fn hvpp_one_hot() {
        let u = Universe { n_sfcrs: 2, n_nodes: 0 };
        assert_eq!(
            encode_hvpp_input(0, VnfKind::LoadBalancer, &u).unwrap().0,
            vec![1.0, 0.0, 1.0, 0.0, 0.0, 0.0]
        );
        assert_eq!(
            encode_hvpp_input(1, VnfKind::WebAppFirewall, &u).unwrap().0,
            vec![0.0, 1.0, 0.0, 1.0, 0.0, 0.0]
        );
        assert!(matches!(
            encode_hvpp_input(5, VnfKind::LoadBalancer, &u),
            Err(Error::Encoding(_))
        ));
    }

    #[test]
    fn hmhp_layout() {
        let u = Universe { n_sfcrs: 2, n_nodes: 0 };
        assert_eq!(
            encode_hmhp_input(0, VnfKind::TrafficMonitor, 1, &u).unwrap().0,
            vec![1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0]
        );
        assert!(matches!(
            encode_hmhp_input(0, VnfKind::TrafficMonitor, -1, &u),
            Err(Error::Encoding(_))
        ));
    }

    #[test]
    fn hlcp_layout_k4() {
        let topo = generate_fat_tree(4, 1.0, 10.0, 5.0).unwrap();
        let u = Universe::new(2, &topo);
        let x = encode_hlcp_input(1, NodeId::host(0), NodeId::host(0), &topo, &u).unwrap();
        assert_eq!(x.len(), 2 + 36 + 36);
        assert_eq!(x.0[1], 1.0);
        assert_eq!(x.0[2], 1.0);
        assert_eq!(x.0[2 + 36], 1.0);
        assert_eq!(x.0.iter().sum::<f64>(), 3.0);
        assert!(matches!(
            encode_hlcp_input(2, NodeId::host(0), NodeId::host(1), &topo, &u),
            Err(Error::Encoding(_))
        ));
        assert!(matches!(
            encode_hlcp_input(0, NodeId::host(0), NodeId::core(9), &topo, &u),
            Err(Error::Encoding(_))
        ));
    }

    #[test]
    fn sparse_matches_dense_bitwise() {
        let topo = generate_fat_tree(4, 1.0, 10.0, 5.0).unwrap();
        let p = Predictors::for_topology(8, &topo, PredictorSeeds::default());
        let g = Genome([0.3, -2.9, 1.7, 0.4, -1.1, 2.2]);
        for sfcr in 0..8 {
            for vnf in VnfKind::ALL {
                let x = encode_hvpp_input(sfcr, vnf, &p.universe).unwrap();
                assert_eq!(
                    p.hvpp.forward(g.hvpp(), &x).unwrap().to_bits(),
                    p.priority(&g, sfcr, vnf).unwrap().to_bits()
                );
                let x = encode_hmhp_input(sfcr, vnf, 1, &p.universe).unwrap();
                assert_eq!(
                    p.hmhp.forward(g.hmhp(), &x).unwrap().to_bits(),
                    p.mean_host(&g, sfcr, vnf, 1).unwrap().to_bits()
                );
            }
            for (a, b) in [(0, 35), (17, 3), (20, 20)] {
                let x = encode_hlcp_input(sfcr, topo.node_at(a), topo.node_at(b), &topo, &p.universe).unwrap();
                assert_eq!(
                    p.hlcp.forward(g.hlcp(), &x).unwrap().to_bits(),
                    p.link_heuristic(&g, sfcr, a, b).unwrap().to_bits()
                );
            }
        }
    }

    #[test]
    fn genome_length_is_six() {
        for n in [8, 32, 48] {
            for k in [2, 4] {
                let topo = generate_fat_tree(k, 1.0, 10.0, 5.0).unwrap();
                let p = Predictors::for_topology(n, &topo, PredictorSeeds::default());
                assert_eq!(p.hvpp.input_width, n + 4);
                assert_eq!(Genome::ZERO.len(), 6);
            }
        }
    }

    #[test]
    fn fixed_weights_reproducible_and_in_range() {
        let a = PredictorSpec::random(40, 9, 1.0, SIGNED_WEIGHT_RANGE);
        let b = PredictorSpec::random(40, 9, 1.0, SIGNED_WEIGHT_RANGE);
        assert_eq!(a, b);
        assert!(a.fixed_weights.iter().flatten().all(|w| (-PI..PI).contains(w)));
        let h = PredictorSpec::random(40, 9, 16.0, HMHP_WEIGHT_RANGE);
        assert!(h.fixed_weights.iter().flatten().all(|w| (0.0..PI / 3.0).contains(w)));
    }

    #[test]
    fn lex_order() {
        let a = Genome([0.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        let b = Genome([0.0, 2.0, -5.0, 0.0, 0.0, 0.0]);
        assert_eq!(a.lex_cmp(&b), Ordering::Less);
        assert_eq!(a.lex_cmp(&a), Ordering::Equal);
    }
}
