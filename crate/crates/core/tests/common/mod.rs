#![allow(dead_code)]

use hbgrowth::freegroup::{compose_endos, FreeEndomorphism, Letter, Word};
use hbgrowth::graph::{EdgePath, Graph, GraphMap, Token};
use hbgrowth::NonNegMatrix;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Roses with 1–4 petals and two-vertex graphs with up to 4 edges.
pub fn random_graph(rng: &mut impl Rng) -> Graph {
    let names = ["a", "b", "c", "d"];
    match rng.gen_range(0..3) {
        0 => Graph::rose(&names[..rng.gen_range(1..=4)]).unwrap(),
        1 => Graph::new(&["u", "w"], &[("a", "u", "u"), ("t", "u", "w"), ("b", "w", "w")]).unwrap(),
        _ => Graph::new(&["u", "w"], &[("a", "u", "u"), ("s", "u", "w"), ("t", "u", "w"), ("b", "w", "w")]).unwrap(),
    }
}

fn tokens_at(g: &Graph, v: usize) -> Vec<Token> {
    (0..g.edge_count())
        .flat_map(|e| [Token::forward(e), Token::backward(e)])
        .filter(|&t| g.initial(t) == v)
        .collect()
}

/// Shortest token path from `from` to `to`.
fn route(g: &Graph, from: usize, to: usize) -> Vec<Token> {
    let mut prev: Vec<Option<Token>> = vec![None; g.vertex_count()];
    let mut seen = vec![false; g.vertex_count()];
    seen[from] = true;
    let mut queue = std::collections::VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        for t in tokens_at(g, v) {
            let w = g.terminal(t);
            if !seen[w] {
                seen[w] = true;
                prev[w] = Some(t);
                queue.push_back(w);
            }
        }
    }
    let mut path = Vec::new();
    let mut v = to;
    while v != from {
        let t = prev[v].expect("graph is connected");
        path.push(t);
        v = g.initial(t);
    }
    path.reverse();
    path
}

/// Random walk of `len` tokens from `from`, then the shortest route to `to`.
/// Not reduced in general.
pub fn random_path(g: &Graph, rng: &mut impl Rng, from: usize, to: usize, len: usize) -> Vec<Token> {
    let mut out = Vec::new();
    let mut v = from;
    for _ in 0..len {
        let t = *tokens_at(g, v).choose(rng).unwrap();
        out.push(t);
        v = g.terminal(t);
    }
    out.extend(route(g, v, to));
    out
}

/// Random endomorphism with nonempty images of length at most `max_len`.
pub fn random_map(g: &Graph, rng: &mut impl Rng, max_len: usize) -> GraphMap {
    let vertex_map: Vec<usize> = (0..g.vertex_count()).map(|_| rng.gen_range(0..g.vertex_count())).collect();
    let images = g
        .edges()
        .iter()
        .enumerate()
        .map(|(e, _)| {
            let (a, b) = (vertex_map[g.initial(Token::forward(e))], vertex_map[g.terminal(Token::forward(e))]);
            loop {
                let walk = rng.gen_range(0..=max_len);
                let p = random_path(g, rng, a, b, walk);
                if !p.is_empty() && p.len() <= max_len {
                    return EdgePath::new(p);
                }
            }
        })
        .collect();
    GraphMap::new(g.clone(), g.clone(), vertex_map, images).unwrap()
}

/// Irreducible matrix: a random cyclic permutation plus random entries.
pub fn random_irreducible(rng: &mut impl Rng, dim: usize, max_entry: u64) -> NonNegMatrix {
    let mut order: Vec<usize> = (0..dim).collect();
    order.shuffle(rng);
    let mut rows = vec![vec![0u64; dim]; dim];
    for k in 0..dim {
        rows[order[k]][order[(k + 1) % dim]] = 1;
    }
    for row in rows.iter_mut() {
        for x in row.iter_mut() {
            if rng.gen_bool(0.4) {
                *x += rng.gen_range(0..=max_entry);
            }
        }
    }
    NonNegMatrix::new(rows).unwrap()
}

pub fn random_permutation(rng: &mut impl Rng, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

fn word(letters: &[(usize, bool)]) -> Word {
    Word::new(letters.iter().map(|&(g, inv)| Letter::new(g, inv)).collect())
}

/// A single elementary Nielsen transformation of `F_rank`.
pub fn random_nielsen_move(rng: &mut impl Rng, rank: usize) -> FreeEndomorphism {
    let mut images: Vec<Word> = (0..rank).map(|g| word(&[(g, false)])).collect();
    let i = rng.gen_range(0..rank);
    let kind = if rank == 1 { 0 } else { rng.gen_range(0..4) };
    match kind {
        0 => images[i] = word(&[(i, true)]),
        1 => {
            let j = (i + rng.gen_range(1..rank)) % rank;
            images.swap(i, j);
        }
        2 => {
            let j = (i + rng.gen_range(1..rank)) % rank;
            images[i] = word(&[(i, false), (j, rng.gen())]);
        }
        _ => {
            let j = (i + rng.gen_range(1..rank)) % rank;
            images[i] = word(&[(j, rng.gen()), (i, false)]);
        }
    }
    FreeEndomorphism::new(rank, images).unwrap()
}

/// Product of `moves` elementary Nielsen transformations.
pub fn random_automorphism(rng: &mut impl Rng, rank: usize, moves: usize) -> FreeEndomorphism {
    let mut e = FreeEndomorphism::identity(rank);
    for _ in 0..moves {
        e = compose_endos(&random_nielsen_move(rng, rank), &e).unwrap();
    }
    e
}
