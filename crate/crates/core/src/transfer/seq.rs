//! Bijections `pi : Z+ -> A` with `a_(pi(n)) <= b_n`, and the block
//! permutation that rebuilds a biorthogonal system from a larger one.

use std::collections::{HashMap, HashSet};

use num_traits::Signed;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::Rational;
use crate::report::rational_str;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeqRule {
    /// Elements of `A` with `a <= c` that are sent through `psi`.
    pub b_set: Vec<u64>,
    /// The rest of `A`, enumerated by `phi`.
    pub c_set: Vec<u64>,
    /// Positions `j_k` receiving `phi(k)`.
    pub j: Vec<u64>,
    /// `Z+ \ {j_k}` on the represented range.
    pub d_set: Vec<u64>,
    #[serde(with = "rational_str")]
    pub c: Rational,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PermutationPlan {
    pub domain: String,
    /// `pi(0), ..., pi(N - 1)`.
    pub prefix: Vec<u64>,
    pub seq_rule: Option<SeqRule>,
    /// `n_k` and `m_k = n_k + k` for block permutations.
    pub blocks: Option<(Vec<u64>, Vec<u64>)>,
    pub injective: bool,
    /// `a_(pi(n)) <= b_n` on the prefix (always true for block plans).
    pub dominance: bool,
    /// Every represented element has the preimage the rule predicts.
    pub bijective_on_range: bool,
}

impl PermutationPlan {
    pub fn valid(&self) -> bool {
        self.injective && self.dominance && self.bijective_on_range
    }
}

fn injective(v: &[u64]) -> bool {
    let mut seen = HashSet::with_capacity(v.len());
    v.iter().all(|x| seen.insert(*x))
}

/// Canonical construction: walk `A` in the given order; elements with
/// `a > c` go to `C`, small elements alternate `B, C, B, ...`. `phi` and
/// `psi` enumerate `C` and `B` in order, and `j_k` is the least admissible
/// index with `j_k >= j_(k-1) + 2` and `a_(phi(k)) <= b_(j_k)`.
///
/// `domain` is an increasing enumeration of a prefix of `A`; it must be
/// long enough to fill `N` positions, otherwise the error names the
/// position that could not be filled.
pub fn lemma_seq_bijection(
    domain: &[u64],
    a: &dyn Fn(u64) -> Rational,
    c: &Rational,
    b: &dyn Fn(u64) -> Rational,
    n: usize,
) -> Result<PermutationPlan> {
    if !c.is_positive() {
        return Err(Error::Precondition(format!("c must be positive, got {c}")));
    }
    for i in 0..n as u64 {
        if b(i) < *c {
            return Err(Error::Precondition(format!("b_{i} = {} is below c = {c}", b(i))));
        }
    }
    let mut b_set = Vec::new();
    let mut c_set = Vec::new();
    let mut small = 0usize;
    for &x in domain {
        let v = a(x);
        if v.is_negative() {
            return Err(Error::Precondition(format!("a_{x} = {v} is negative")));
        }
        if v > *c {
            c_set.push(x);
        } else {
            if small % 2 == 0 {
                b_set.push(x);
            } else {
                c_set.push(x);
            }
            small += 1;
        }
    }
    // positions j_k below n
    let mut j = Vec::new();
    let mut next = 0u64;
    let mut k = 0usize;
    loop {
        // remaining positions fall to D when the probed C runs out
        let Some(&target) = c_set.get(k) else {
            break;
        };
        let need = a(target);
        let mut p = next;
        while p < n as u64 && b(p) < need {
            p += 1;
        }
        if p >= n as u64 {
            break;
        }
        j.push(p);
        next = p + 2;
        k += 1;
    }
    let j_set: HashSet<u64> = j.iter().copied().collect();
    let d_set: Vec<u64> = (0..n as u64).filter(|p| !j_set.contains(p)).collect();
    if d_set.len() > b_set.len() {
        return Err(Error::Precondition(format!(
            "probed range has only {} small elements for B; position {} unfilled",
            b_set.len(),
            d_set[b_set.len()]
        )));
    }
    let mut prefix = vec![0u64; n];
    for (k, &p) in j.iter().enumerate() {
        prefix[p as usize] = c_set[k];
    }
    for (i, &p) in d_set.iter().enumerate() {
        prefix[p as usize] = b_set[i];
    }
    let dominance = prefix.iter().enumerate().all(|(p, &x)| a(x) <= b(p as u64));
    // preimages: phi(k) <- j_k, psi^-1(B_i) = D_i
    let pos: HashMap<u64, usize> = prefix.iter().enumerate().map(|(p, &x)| (x, p)).collect();
    let bij = j.iter().enumerate().all(|(k, &p)| pos.get(&c_set[k]) == Some(&(p as usize)))
        && d_set.iter().enumerate().all(|(i, &p)| pos.get(&b_set[i]) == Some(&(p as usize)));
    Ok(PermutationPlan {
        domain: "lemma-seq".into(),
        injective: injective(&prefix),
        prefix,
        seq_rule: Some(SeqRule {
            b_set: b_set[..d_set.len()].to_vec(),
            c_set: c_set[..j.len()].to_vec(),
            j,
            d_set,
            c: c.clone(),
        }),
        blocks: None,
        dominance,
        bijective_on_range: bij,
    })
}

/// `m_k = n_k + k`; `A = {m_k} u {m_k + 1}`, in increasing order.
pub fn prop1_domain(n_k: &[u64]) -> Vec<u64> {
    let mut out = Vec::with_capacity(2 * n_k.len());
    for (k, &n) in n_k.iter().enumerate() {
        let m = n + k as u64;
        out.push(m);
        out.push(m + 1);
    }
    out
}

pub fn check_blocks(n_k: &[u64]) -> Result<()> {
    if n_k.first() != Some(&0) {
        return Err(Error::Precondition("n_0 must be 0".into()));
    }
    for (k, w) in n_k.windows(2).enumerate() {
        if w[1] < w[0] + 2 {
            return Err(Error::Precondition(format!(
                "gap n_{} - n_{k} = {} is below 2",
                k + 1,
                w[1] as i64 - w[0] as i64
            )));
        }
    }
    Ok(())
}

/// `pi(n_k) = phi(k)`, `pi(n_k + l) = m_k + l + 1` for `1 <= l < n_(k+1) - n_k`.
/// `n_k` must reach past `N`; `phi` must cover every `k` with `n_k < N`.
pub fn prop1_permutation(n_k: &[u64], phi: &[u64], n: usize) -> Result<PermutationPlan> {
    check_blocks(n_k)?;
    let Some(last) = n_k.last() else {
        return Err(Error::Precondition("empty n_k".into()));
    };
    if (*last as usize) < n {
        return Err(Error::Precondition(format!("n_k must reach N = {n}, last is {last}")));
    }
    let m: Vec<u64> = n_k.iter().enumerate().map(|(k, &x)| x + k as u64).collect();
    let a: HashSet<u64> = prop1_domain(n_k).into_iter().collect();
    let used = n_k.iter().take_while(|&&x| (x as usize) < n).count();
    if phi.len() < used {
        return Err(Error::Precondition(format!(
            "phi prefix has {} entries, {used} needed",
            phi.len()
        )));
    }
    if let Some(bad) = phi.iter().find(|x| !a.contains(x)) {
        return Err(Error::Precondition(format!("phi value {bad} is not in A")));
    }
    let mut prefix = Vec::with_capacity(n);
    let mut block_ok = true;
    for k in 0..used {
        let lo = n_k[k];
        let hi = n_k[k + 1];
        prefix.push(phi[k]);
        let mut image = Vec::new();
        for l in 1..(hi - lo) {
            let v = m[k] + l + 1;
            image.push(v);
            if ((lo + l) as usize) < n {
                prefix.push(v);
            }
        }
        // pi({n_k+1..n_(k+1)-1}) = {m_k+2..m_(k+1)-1}
        let want: Vec<u64> = (m[k] + 2..m[k + 1]).collect();
        block_ok &= image == want && image.iter().all(|v| !a.contains(v));
    }
    prefix.truncate(n);
    let inj = injective(&prefix) && injective(&phi[..used]);
    Ok(PermutationPlan {
        domain: "prop1".into(),
        injective: inj,
        prefix,
        seq_rule: None,
        blocks: Some((n_k.to_vec(), m)),
        dominance: true,
        bijective_on_range: block_ok,
    })
}
