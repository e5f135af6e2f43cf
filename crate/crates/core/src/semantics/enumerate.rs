use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::eval::holds;
use super::model::{Model, ModelKind, PureTable};
use crate::syntax::{Name, Signature};

/// Function spaces larger than this are sampled rather than enumerated.
pub const TABLE_CAP: usize = 4096;

/// Seed for the sampling cap, from `DECOR_SEED` (default 0).
pub fn sampling_seed() -> u64 {
    std::env::var("DECOR_SEED").ok().and_then(|s| s.trim().parse().ok()).unwrap_or(0)
}

/// Options for `enumerate_models`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumOptions {
    pub max_size: usize,
    pub kind: ModelKind,
    /// Carrier sizes fixed in advance.
    pub forced: Vec<(Name, usize)>,
    pub seed: u64,
}

impl EnumOptions {
    pub fn new(kind: ModelKind, max_size: usize) -> Self {
        EnumOptions { max_size, kind, forced: Vec::new(), seed: sampling_seed() }
    }

    pub fn force(mut self, ty: &str, n: usize) -> Self {
        self.forced.push((ty.into(), n));
        self
    }
}

fn all_functions(dom: usize, cod: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<u32>> {
    if dom == 0 {
        return vec![Vec::new()];
    }
    if cod == 0 {
        return Vec::new();
    }
    let count = (cod as u128).checked_pow(dom as u32).unwrap_or(u128::MAX);
    if count > TABLE_CAP as u128 {
        return (0..TABLE_CAP).map(|_| (0..dom).map(|_| rng.gen_range(0..cod as u32)).collect()).collect();
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut cur = vec![0u32; dom];
    loop {
        out.push(cur.clone());
        // Odometer increment, last position fastest.
        let mut i = dom;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            cur[i] += 1;
            if (cur[i] as usize) < cod {
                break;
            }
            cur[i] = 0;
        }
    }
}

/// All models of `sig` with carrier sizes in `1..=max_size` (`0..=max_size`
/// for exception models) and all pure tables, in a deterministic order,
/// keeping those that satisfy the declared pure axioms.
pub fn enumerate_models(sig: &Signature, opts: &EnumOptions) -> Vec<Model> {
    let lo = if opts.kind == ModelKind::Exception { 0 } else { 1 };
    let ranges: Vec<(Name, Vec<usize>)> = sig
        .types
        .iter()
        .map(|t| match opts.forced.iter().find(|(n, _)| n == t) {
            Some((_, k)) => (t.clone(), vec![*k]),
            None => (t.clone(), (lo..=opts.max_size.max(lo)).collect()),
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut out = Vec::new();
    let mut sizes: Vec<(Name, usize)> = Vec::new();
    size_combos(&ranges, &mut sizes, &mut |sizes| {
        let skel = Model::skeleton(sig, opts.kind, sizes);
        let mut per_sym: Vec<(usize, Vec<Vec<u32>>)> = Vec::new();
        for (i, p) in sig.pures.iter().enumerate() {
            let (Ok(a), Ok(b)) = (skel.size(&p.src), skel.size(&p.tgt)) else { return };
            per_sym.push((i, all_functions(a, b, &mut rng)));
        }
        let mut choice = vec![0usize; per_sym.len()];
        if per_sym.iter().any(|(_, fs)| fs.is_empty()) {
            return;
        }
        loop {
            let mut m = skel.clone();
            m.tables = per_sym
                .iter()
                .zip(&choice)
                .map(|((i, fs), &c)| {
                    let p = &sig.pures[*i];
                    PureTable { name: p.name.clone(), src: p.src.clone(), tgt: p.tgt.clone(), map: fs[c].clone() }
                })
                .collect();
            if sig.axioms.iter().all(|ax| holds(&ax.eq, &m, sig).unwrap_or(false)) {
                out.push(m);
            }
            let mut i = choice.len();
            loop {
                if i == 0 {
                    return;
                }
                i -= 1;
                choice[i] += 1;
                if choice[i] < per_sym[i].1.len() {
                    break;
                }
                choice[i] = 0;
            }
        }
    });
    out
}

fn size_combos(ranges: &[(Name, Vec<usize>)], acc: &mut Vec<(Name, usize)>, f: &mut dyn FnMut(&[(Name, usize)])) {
    if acc.len() == ranges.len() {
        f(acc);
        return;
    }
    let (n, r) = &ranges[acc.len()];
    for &k in r {
        acc.push((n.clone(), k));
        size_combos(ranges, acc, f);
        acc.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_signature;

    fn count(src: &str, opts: EnumOptions) -> usize {
        enumerate_models(&parse_signature(src).unwrap(), &opts).len()
    }

    #[test]
    fn counts_match_function_spaces() {
        let st = || EnumOptions::new(ModelKind::State, 3);
        assert_eq!(count("location X : V;", st().force("V", 2)), 1);
        assert_eq!(count("location X : V; pure c : 1 -> V;", st().force("V", 2)), 2);
        assert_eq!(count("location X : V; pure s : V -> V;", st().force("V", 2)), 4);
        assert_eq!(count("location X : V; pure c : 1 -> V; pure s : V -> V;", st()), 1 + 2 * 4 + 3 * 27);
    }

    #[test]
    fn axioms_filter_models() {
        let src = "location X : V; pure s : V -> V; axiom inv : s . s == id(V);";
        // Involutions on sets of size 1, 2, 3: 1 + 2 + 4.
        assert_eq!(count(src, EnumOptions::new(ModelKind::State, 3)), 7);
    }

    #[test]
    fn large_spaces_are_sampled_deterministically() {
        let sig = parse_signature("type A; pure f : A -> A;").unwrap();
        let opts = EnumOptions { seed: 7, ..EnumOptions::new(ModelKind::State, 6).force("A", 6) };
        let a = enumerate_models(&sig, &opts);
        assert_eq!(a.len(), TABLE_CAP);
        assert_eq!(a, enumerate_models(&sig, &opts));
    }
}
