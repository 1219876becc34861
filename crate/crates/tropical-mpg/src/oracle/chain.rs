//! Exact analysis of finite Markov reward chains.
//!
//! Everything is computed over the rationals: recurrent-class decomposition
//! by reachability, stationary distributions by linear solves, the Cesàro
//! limit `T°`, the deviation matrix `D = (I - T + T°)⁻¹(I - T°)` and the
//! Laurent expansion of discounted values at discount `α → 1⁻`:
//!
//! `v_α = y₋₁/(1-α) + y₀ + y₁(1-α) + …` with `y₋₁ = T°r`, `y₀ = Dr` and
//! `y_t = -D T y_{t-1}` for `t ≥ 1`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::rngs::StdRng;
use rand::Rng;

use crate::linalg::QMatrix;
use crate::{Error, Q};

/// The chain induced by a strategy pair: a row-stochastic transition matrix
/// and the per-round reward collected from each start state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainModel {
    pub t: QMatrix,
    pub r: Vec<Q>,
}

/// Reflexive-transitive closure of the positive-probability edges.
fn reachability(t: &QMatrix) -> Vec<Vec<bool>> {
    let n = t.rows();
    let mut reach: Vec<Vec<bool>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| i == j || t.get(i, j).is_positive())
                .collect()
        })
        .collect();
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                for j in 0..n {
                    if reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    reach
}

/// Recurrent classes and, for each state, the class it belongs to (`None`
/// for transient states).
pub fn recurrent_classes(t: &QMatrix) -> (Vec<Vec<usize>>, Vec<Option<usize>>) {
    let n = t.rows();
    let reach = reachability(t);
    // i is recurrent iff every state reachable from i reaches back.
    let recurrent: Vec<bool> = (0..n)
        .map(|i| (0..n).all(|j| !reach[i][j] || reach[j][i]))
        .collect();
    let mut class_of = vec![None; n];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        if !recurrent[i] || class_of[i].is_some() {
            continue;
        }
        let members: Vec<usize> = (0..n)
            .filter(|&j| recurrent[j] && reach[i][j] && reach[j][i])
            .collect();
        for &j in &members {
            class_of[j] = Some(classes.len());
        }
        classes.push(members);
    }
    (classes, class_of)
}

pub fn is_irreducible(t: &QMatrix) -> bool {
    let reach = reachability(t);
    reach.iter().all(|row| row.iter().all(|&v| v))
}

/// Stationary distribution of an irreducible chain, together with the least
/// common denominator of its entries.
pub fn stationary_distribution(t: &QMatrix) -> Result<(Vec<Q>, BigInt), Error> {
    if t.rows() != t.cols() {
        return Err(Error::BadDimensions(t.rows(), t.cols()));
    }
    if !is_irreducible(t) {
        return Err(Error::ReducibleChain);
    }
    let n = t.rows();
    // pi T = pi, sum pi = 1: take (T' - I) with the last equation replaced
    // by the normalization.
    let mut sys = t.transpose();
    for i in 0..n {
        let v = sys.get(i, i) - Q::one();
        sys.set(i, i, v);
    }
    let mut rhs = vec![Q::zero(); n];
    for j in 0..n {
        sys.set(n - 1, j, Q::one());
    }
    rhs[n - 1] = Q::one();
    let pi = sys
        .solve(&rhs)?
        .ok_or_else(|| Error::Internal("singular stationary system".into()))?;
    let mut lcm = BigInt::one();
    for v in &pi {
        lcm = lcm.lcm(v.denom());
    }
    Ok((pi, lcm))
}

/// The Cesàro limit `T° = lim (1/N) Σ T^p`, built from the recurrent-class
/// decomposition and exact absorption probabilities.
pub fn cesaro_limit(t: &QMatrix) -> Result<QMatrix, Error> {
    let n = t.rows();
    let (classes, class_of) = recurrent_classes(t);
    let transient: Vec<usize> = (0..n).filter(|&i| class_of[i].is_none()).collect();

    // Stationary distribution of each closed class, embedded in [n].
    let mut stationary: Vec<Vec<Q>> = Vec::with_capacity(classes.len());
    for class in &classes {
        let sub = QMatrix::from_rows(
            class
                .iter()
                .map(|&i| class.iter().map(|&j| t.get(i, j).clone()).collect())
                .collect(),
        )?;
        let (pi, _) = stationary_distribution(&sub)?;
        let mut dense = vec![Q::zero(); n];
        for (slot, &state) in class.iter().enumerate() {
            dense[state] = pi[slot].clone();
        }
        stationary.push(dense);
    }

    // Absorption probabilities of transient states into each class.
    let absorb: Vec<Vec<Q>> = if transient.is_empty() {
        Vec::new()
    } else {
        let k = transient.len();
        let mut i_minus_q = QMatrix::zeros(k, k)?;
        for (a, &i) in transient.iter().enumerate() {
            for (b, &j) in transient.iter().enumerate() {
                let v = if a == b {
                    Q::one() - t.get(i, j)
                } else {
                    -t.get(i, j).clone()
                };
                i_minus_q.set(a, b, v);
            }
        }
        let mut rhs = QMatrix::zeros(k, classes.len())?;
        for (a, &i) in transient.iter().enumerate() {
            for (c, class) in classes.iter().enumerate() {
                let mass: Q = class.iter().map(|&j| t.get(i, j).clone()).sum();
                rhs.set(a, c, mass);
            }
        }
        let h = i_minus_q
            .solve_matrix(&rhs)?
            .ok_or_else(|| Error::Internal("singular absorption system".into()))?;
        (0..k)
            .map(|a| (0..classes.len()).map(|c| h.get(a, c).clone()).collect())
            .collect()
    };

    let mut limit = QMatrix::zeros(n, n)?;
    for i in 0..n {
        match class_of[i] {
            Some(c) => {
                for j in 0..n {
                    limit.set(i, j, stationary[c][j].clone());
                }
            }
            None => {
                let slot = transient.iter().position(|&s| s == i).unwrap();
                for (c, pi) in stationary.iter().enumerate() {
                    let weight = &absorb[slot][c];
                    if weight.is_zero() {
                        continue;
                    }
                    for j in 0..n {
                        if !pi[j].is_zero() {
                            let v = limit.get(i, j) + weight * &pi[j];
                            limit.set(i, j, v);
                        }
                    }
                }
            }
        }
    }
    Ok(limit)
}

/// Exact limit average reward `g = T°r` of every start state.
pub fn gain(chain: &ChainModel) -> Result<Vec<Q>, Error> {
    cesaro_limit(&chain.t)?.matvec(&chain.r)
}

/// Deviation matrix `D = (I - T + T°)⁻¹ (I - T°)`; maps rewards to biases.
pub fn deviation_matrix(t: &QMatrix, cesaro: &QMatrix) -> Result<QMatrix, Error> {
    let n = t.rows();
    let id = QMatrix::identity(n)?;
    let lhs = id.sub(t)?.add(cesaro)?;
    let rhs = id.sub(cesaro)?;
    lhs.solve_matrix(&rhs)?
        .ok_or_else(|| Error::Internal("fundamental matrix is singular".into()))
}

/// Laurent coefficients `y₋₁, y₀, …, y_{terms-2}` of the discounted value of
/// the chain at `α → 1⁻` (so `terms` vectors in total).
pub fn laurent_stack(chain: &ChainModel, terms: usize) -> Result<Vec<Vec<Q>>, Error> {
    let cesaro = cesaro_limit(&chain.t)?;
    let dev = deviation_matrix(&chain.t, &cesaro)?;
    let mut stack = Vec::with_capacity(terms);
    stack.push(cesaro.matvec(&chain.r)?); // y_{-1}
    if terms > 1 {
        stack.push(dev.matvec(&chain.r)?); // y_0
    }
    for _ in 2..terms {
        let prev = stack.last().unwrap();
        let ty = chain.t.matvec(prev)?;
        let y: Vec<Q> = dev.matvec(&ty)?.into_iter().map(|v| -v).collect();
        stack.push(y);
    }
    Ok(stack)
}

/// Random row-stochastic chain with denominators dividing `m_den`,
/// guaranteed irreducible (a covering cycle is seeded if rejection sampling
/// keeps producing reducible chains).
pub fn random_irreducible_chain(n: usize, m_den: u32, rng: &mut StdRng) -> Result<QMatrix, Error> {
    for attempt in 0..16 {
        let mut p = QMatrix::zeros(n, n)?;
        for i in 0..n {
            let mut counts = vec![0u32; n];
            let mut budget = m_den;
            if attempt >= 8 && n > 1 {
                // Seed the cycle i -> i+1 to force irreducibility.
                counts[(i + 1) % n] += 1;
                budget -= 1;
            }
            for _ in 0..budget {
                counts[rng.gen_range(0..n)] += 1;
            }
            for (j, &c) in counts.iter().enumerate() {
                p.set(i, j, Q::new(c.into(), m_den.into()));
            }
        }
        if is_irreducible(&p) {
            return Ok(p);
        }
    }
    Err(Error::Internal(
        "could not build an irreducible chain".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{qi, qq};
    use rand::SeedableRng;

    fn mat(rows: Vec<Vec<Q>>) -> QMatrix {
        QMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn stationary_uniform_chain() {
        let t = mat(vec![vec![qq(1, 2), qq(1, 2)], vec![qq(1, 2), qq(1, 2)]]);
        let (pi, lcm) = stationary_distribution(&t).unwrap();
        assert_eq!(pi, vec![qq(1, 2), qq(1, 2)]);
        assert_eq!(lcm, BigInt::from(2));
    }

    #[test]
    fn stationary_two_cycle() {
        let t = mat(vec![vec![qi(0), qi(1)], vec![qi(1), qi(0)]]);
        let (pi, lcm) = stationary_distribution(&t).unwrap();
        assert_eq!(pi, vec![qq(1, 2), qq(1, 2)]);
        assert_eq!(lcm, BigInt::from(2));
    }

    #[test]
    fn stationary_weighted_chain() {
        let t = mat(vec![vec![qi(0), qi(1)], vec![qq(1, 2), qq(1, 2)]]);
        let (pi, lcm) = stationary_distribution(&t).unwrap();
        assert_eq!(pi, vec![qq(1, 3), qq(2, 3)]);
        assert_eq!(lcm, BigInt::from(3));
    }

    #[test]
    fn reducible_chain_rejected() {
        let t = mat(vec![vec![qi(1), qi(0)], vec![qi(0), qi(1)]]);
        assert!(matches!(
            stationary_distribution(&t),
            Err(Error::ReducibleChain)
        ));
        let (classes, class_of) = recurrent_classes(&t);
        assert_eq!(classes.len(), 2);
        assert!(class_of.iter().all(|c| c.is_some()));
    }

    #[test]
    fn transient_state_detected() {
        // 0 -> {0,1} equally; 1 absorbing.
        let t = mat(vec![vec![qq(1, 2), qq(1, 2)], vec![qi(0), qi(1)]]);
        let (classes, class_of) = recurrent_classes(&t);
        assert_eq!(classes, vec![vec![1]]);
        assert_eq!(class_of[0], None);
        let limit = cesaro_limit(&t).unwrap();
        assert_eq!(*limit.get(0, 1), qi(1));
        assert_eq!(*limit.get(1, 1), qi(1));
    }

    #[test]
    fn gain_of_uniform_reward_chain() {
        let chain = ChainModel {
            t: mat(vec![vec![qq(1, 2), qq(1, 2)], vec![qq(1, 2), qq(1, 2)]]),
            r: vec![qi(2), qi(-1)],
        };
        assert_eq!(gain(&chain).unwrap(), vec![qq(1, 2), qq(1, 2)]);
    }

    #[test]
    fn deviation_matrix_of_uniform_chain() {
        // T = T°, so D = I - T°.
        let t = mat(vec![vec![qq(1, 2), qq(1, 2)], vec![qq(1, 2), qq(1, 2)]]);
        let c = cesaro_limit(&t).unwrap();
        let d = deviation_matrix(&t, &c).unwrap();
        let bias = d.matvec(&[qi(2), qi(-1)]).unwrap();
        assert_eq!(bias, vec![qq(3, 2), qq(-3, 2)]);
    }

    #[test]
    fn laurent_of_self_loop() {
        let chain = ChainModel {
            t: mat(vec![vec![qi(1)]]),
            r: vec![qi(7)],
        };
        let stack = laurent_stack(&chain, 4).unwrap();
        assert_eq!(stack[0], vec![qi(7)]);
        for term in &stack[1..] {
            assert_eq!(term, &vec![qi(0)]);
        }
    }

    #[test]
    fn laurent_satisfies_resolvent_recursion() {
        // (I - T) y_t + T y_{t-1} = 0 for t >= 1, and
        // (I - T) y_0 + T y_{-1} = r.
        let t = mat(vec![vec![qi(0), qi(1)], vec![qq(1, 4), qq(3, 4)]]);
        let chain = ChainModel {
            t: t.clone(),
            r: vec![qi(3), qi(-2)],
        };
        let stack = laurent_stack(&chain, 6).unwrap();
        let id = QMatrix::identity(2).unwrap();
        let i_minus_t = id.sub(&t).unwrap();
        let lhs0: Vec<Q> = i_minus_t
            .matvec(&stack[1])
            .unwrap()
            .iter()
            .zip(t.matvec(&stack[0]).unwrap())
            .map(|(a, b)| a + b)
            .collect();
        assert_eq!(lhs0, chain.r);
        for w in stack.windows(2).skip(1) {
            let lhs: Vec<Q> = i_minus_t
                .matvec(&w[1])
                .unwrap()
                .iter()
                .zip(t.matvec(&w[0]).unwrap())
                .map(|(a, b)| a + b)
                .collect();
            assert!(lhs.iter().all(|v| v.is_zero()));
        }
    }

    #[test]
    fn cesaro_agrees_with_partial_sums() {
        // |(1/N) sum_{p<N} (T^p r)_j - g_j| <= 2 max|y_0| / N, exactly.
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..4 {
            let t = random_irreducible_chain(3, 3, &mut rng).unwrap();
            let r: Vec<Q> = (0..3).map(|_| qi(rng.gen_range(-4..=4))).collect();
            let chain = ChainModel {
                t: t.clone(),
                r: r.clone(),
            };
            let g = gain(&chain).unwrap();
            let stack = laurent_stack(&chain, 2).unwrap();
            let bias_sup = stack[1].iter().map(|v| v.abs()).max().unwrap();
            for n_steps in [256usize, 1024] {
                let mut partial = vec![Q::zero(); 3];
                for _ in 0..n_steps {
                    let tp = t.matvec(&partial).unwrap();
                    partial = r.iter().zip(tp).map(|(a, b)| a + b).collect();
                }
                let n_q = qi(n_steps as i64);
                for (s, gj) in partial.iter().zip(&g) {
                    let err = (s / &n_q - gj).abs();
                    assert!(err <= qi(2) * &bias_sup / &n_q);
                }
            }
        }
    }

    #[test]
    fn random_chain_generator_contract() {
        let mut rng = StdRng::seed_from_u64(3);
        for n in 1..=5 {
            let p = random_irreducible_chain(n, 4, &mut rng).unwrap();
            assert!(is_irreducible(&p));
            for i in 0..n {
                assert_eq!(p.row(i).iter().sum::<Q>(), Q::one());
            }
        }
    }
}
