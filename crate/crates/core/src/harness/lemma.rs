//! Chain-rule decomposition of the divergence between two sequential coding
//! distributions, each conditioning variable `i` on its own subset of the
//! earlier variables.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `prod_i p(x_i | x_{C_i})` over finite alphabets.
#[derive(Clone, Debug)]
pub struct ContextChain {
    pub sizes: Vec<usize>,
    /// `contexts[i]` is a sorted subset of `0..i`.
    pub contexts: Vec<Vec<usize>>,
    /// `tables[i][ctx]` is the distribution of `x_i` given the context
    /// assignment packed in mixed radix (first context variable fastest).
    pub tables: Vec<Vec<Vec<f64>>>,
}

fn random_distribution(rng: &mut impl Rng, k: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

fn random_subset(rng: &mut impl Rng, below: usize) -> Vec<usize> {
    (0..below).filter(|_| rng.gen_bool(0.5)).collect()
}

impl ContextChain {
    pub fn random(rng: &mut impl Rng, sizes: &[usize], contexts: Vec<Vec<usize>>) -> Self {
        let tables = contexts
            .iter()
            .enumerate()
            .map(|(i, ctx)| {
                let n_ctx: usize = ctx.iter().map(|&j| sizes[j]).product();
                (0..n_ctx).map(|_| random_distribution(rng, sizes[i])).collect()
            })
            .collect();
        Self { sizes: sizes.to_vec(), contexts, tables }
    }

    pub fn len(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.is_empty()
    }

    pub fn configs(&self) -> usize {
        self.sizes.iter().product()
    }

    /// Digits of configuration `k` (first variable fastest).
    pub fn decode(&self, mut k: usize) -> Vec<usize> {
        self.sizes
            .iter()
            .map(|&s| {
                let d = k % s;
                k /= s;
                d
            })
            .collect()
    }

    fn context_index(&self, i: usize, x: &[usize]) -> usize {
        let mut idx = 0;
        let mut scale = 1;
        for &j in &self.contexts[i] {
            idx += x[j] * scale;
            scale *= self.sizes[j];
        }
        idx
    }

    pub fn conditional(&self, i: usize, x: &[usize]) -> &[f64] {
        &self.tables[i][self.context_index(i, x)]
    }

    pub fn joint(&self) -> Vec<f64> {
        (0..self.configs())
            .map(|k| {
                let x = self.decode(k);
                (0..self.len()).map(|i| self.conditional(i, &x)[x[i]]).product()
            })
            .collect()
    }
}

/// `D(p || q)` in nats by enumerating every configuration.
pub fn joint_divergence(p: &ContextChain, q: &ContextChain) -> f64 {
    let (pj, qj) = (p.joint(), q.joint());
    pj.iter().zip(&qj).filter(|(a, _)| **a > 0.0).map(|(a, b)| a * (a / b).ln()).sum()
}

/// `sum_i sum_{x_{C_i u D_i}} p(x_{C_i u D_i}) D(p_i(.|x_{C_i}) || q_i(.|x_{D_i}))`
/// with the union marginals taken from the joint of `p`.
pub fn decomposed_divergence(p: &ContextChain, q: &ContextChain) -> f64 {
    let joint = p.joint();
    let mut total = 0.0;
    for i in 0..p.len() {
        let mut union: Vec<usize> = p.contexts[i].iter().chain(&q.contexts[i]).copied().collect();
        union.sort_unstable();
        union.dedup();
        let radix: Vec<usize> = union.iter().map(|&j| p.sizes[j]).collect();
        let n_assign: usize = radix.iter().product();
        let mut marginal = vec![0.0; n_assign];
        for (k, &pk) in joint.iter().enumerate() {
            let x = p.decode(k);
            let mut idx = 0;
            let mut scale = 1;
            for (&j, &r) in union.iter().zip(&radix) {
                idx += x[j] * scale;
                scale *= r;
            }
            marginal[idx] += pk;
        }
        for (a, &m) in marginal.iter().enumerate() {
            // a full assignment with zeros outside the union is enough to
            // look up both conditionals
            let mut x = vec![0; p.len()];
            let mut rest = a;
            for (&j, &r) in union.iter().zip(&radix) {
                x[j] = rest % r;
                rest /= r;
            }
            let (pc, qc) = (p.conditional(i, &x), q.conditional(i, &x));
            total += m * pc.iter().zip(qc).filter(|(a, _)| **a > 0.0).map(|(a, b)| a * (a / b).ln()).sum::<f64>();
        }
    }
    total
}

#[derive(Clone, Debug)]
pub struct LemmaCase {
    pub p: ContextChain,
    pub q: ContextChain,
    pub lhs: f64,
    pub rhs: f64,
}

/// Random cases with `2..=max_len` variables over alphabets of size 2 or 3
/// and independent random contexts for `p` and `q`.
pub fn random_lemma_cases(count: usize, max_len: usize, seed: u64) -> Vec<LemmaCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(2..=max_len.max(2));
            let sizes: Vec<usize> = (0..n).map(|_| rng.gen_range(2..=3)).collect();
            let pc = (0..n).map(|i| random_subset(&mut rng, i)).collect();
            let qc = (0..n).map(|i| random_subset(&mut rng, i)).collect();
            let p = ContextChain::random(&mut rng, &sizes, pc);
            let q = ContextChain::random(&mut rng, &sizes, qc);
            let (lhs, rhs) = (joint_divergence(&p, &q), decomposed_divergence(&p, &q));
            LemmaCase { p, q, lhs, rhs }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_chains_have_zero_divergence() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = ContextChain::random(&mut rng, &[2, 2], vec![vec![], vec![0]]);
        assert!(joint_divergence(&p, &p).abs() < 1e-15);
        assert!(decomposed_divergence(&p, &p).abs() < 1e-15);
    }

    #[test]
    fn three_variables_hand_built() {
        // p: x1 ~ (.3,.7), x2 | x1, x3 | x1 ; q: independent uniform
        let p = ContextChain {
            sizes: vec![2, 2, 2],
            contexts: vec![vec![], vec![0], vec![0]],
            tables: vec![vec![vec![0.3, 0.7]], vec![vec![0.9, 0.1], vec![0.2, 0.8]], vec![vec![0.5, 0.5], vec![0.6, 0.4]]],
        };
        let q = ContextChain {
            sizes: vec![2, 2, 2],
            contexts: vec![vec![], vec![], vec![]],
            tables: vec![vec![vec![0.5, 0.5]]; 3],
        };
        // D(p || uniform) = 3 ln 2 - H(p)
        let h: f64 = p.joint().iter().map(|x| -x * x.ln()).sum();
        let expected = 3.0 * 2f64.ln() - h;
        assert!((joint_divergence(&p, &q) - expected).abs() < 1e-12);
        assert!((decomposed_divergence(&p, &q) - expected).abs() < 1e-12);
    }

    #[test]
    fn random_cases_agree() {
        for c in random_lemma_cases(30, 5, 11) {
            assert!((c.lhs - c.rhs).abs() < 1e-10, "{} vs {}", c.lhs, c.rhs);
        }
    }
}
