//! Seeded circuit generators for tests and benchmarking.

use std::collections::BTreeSet;

use rand::rngs::StdRng;
use rand::Rng;

use crate::netlist::{CubeLit, Gate, Latch, Network};

/// Random multi-level sequential circuit. Gates read earlier signals only,
/// so the combinational core is acyclic by construction.
pub fn random_network(
    rng: &mut StdRng,
    n_inputs: usize,
    n_latches: usize,
    n_outputs: usize,
    n_gates: usize,
) -> Network {
    assert!(n_inputs >= 1 && n_latches >= 1 && n_outputs >= 1);
    let inputs: Vec<String> = (0..n_inputs).map(|k| format!("i{k}")).collect();
    let states: Vec<String> = (0..n_latches).map(|k| format!("l{k}")).collect();

    let mut available: Vec<String> = inputs.iter().chain(states.iter()).cloned().collect();
    let mut gates = Vec::new();
    for g in 0..n_gates {
        let fanin = rng.gen_range(1..=3.min(available.len()));
        let mut picks = BTreeSet::new();
        while picks.len() < fanin {
            picks.insert(rng.gen_range(0..available.len()));
        }
        let gate_inputs: Vec<String> = picks.iter().map(|&k| available[k].clone()).collect();
        let rows = rng.gen_range(1..=3);
        let mut cover = Vec::new();
        for _ in 0..rows {
            let row: Vec<CubeLit> = (0..fanin)
                .map(|_| match rng.gen_range(0..3) {
                    0 => CubeLit::Zero,
                    1 => CubeLit::One,
                    _ => CubeLit::DontCare,
                })
                .collect();
            cover.push(row);
        }
        let name = format!("g{g}");
        gates.push(Gate {
            output: name.clone(),
            inputs: gate_inputs,
            cover,
            phase: rng.gen_bool(0.85),
        });
        available.push(name);
    }

    let latches: Vec<Latch> = states
        .iter()
        .map(|s| Latch {
            data_in: available[rng.gen_range(0..available.len())].clone(),
            state: s.clone(),
            init: rng.gen(),
        })
        .collect();

    let mut out_pool: Vec<String> = available.clone();
    let mut outputs = Vec::new();
    for _ in 0..n_outputs.min(out_pool.len()) {
        let k = rng.gen_range(0..out_pool.len());
        outputs.push(out_pool.swap_remove(k));
    }

    let net = Network {
        name: "rand".to_string(),
        inputs,
        outputs,
        latches,
        gates,
    };
    debug_assert!(net.validate().is_ok());
    net
}

/// Random nonempty proper subset of the latches.
pub fn random_split(rng: &mut StdRng, net: &Network) -> BTreeSet<String> {
    let names = net.latch_names();
    loop {
        let picked: BTreeSet<String> = names
            .iter()
            .filter(|_| rng.gen_bool(0.5))
            .cloned()
            .collect();
        if !picked.is_empty() && picked.len() < names.len() {
            return picked;
        }
    }
}

/// Benchmark family member with `n_latches` total latches.
///
/// The fixed part is an input-driven shift scrambler whose reachable state
/// set is the full `2^(n-3)` cube, plus a frozen flag latch exporting the
/// `u` wire. The unknown part is a two-latch delay chain whose value feeds
/// one primary output. Monolithic processing has to enumerate the scrambler
/// states explicitly, while the fused subset construction saturates over
/// them after a linear prefix. Returns the circuit and the latch set to
/// assign to the unknown component.
pub fn bench_family(n_latches: usize, variant: u64) -> (Network, BTreeSet<String>) {
    assert!(n_latches >= 5, "family members need at least 5 latches");
    let m = n_latches - 3; // scrambler width
    let tap = variant as usize % (m - 1).max(1); // strictly below m-1

    let mut text = String::new();
    text.push_str(&format!(".model fam{n_latches}v{variant}\n"));
    text.push_str(".inputs i\n.outputs o1 o2\n");
    text.push_str(".latch f0 f0 0\n");
    text.push_str(&format!(".latch dc0 c0 0\n"));
    for k in 1..m {
        text.push_str(&format!(".latch c{} c{} 0\n", k - 1, k));
    }
    text.push_str(".latch f0 x0 0\n");
    text.push_str(".latch x0 x1 0\n");
    // scrambler head: dc0 = i xor c_{m-1}
    text.push_str(&format!(".names i c{} dc0\n10 1\n01 1\n", m - 1));
    // o1 observes the scrambler
    text.push_str(&format!(".names c{} c{} o1\n10 1\n01 1\n", tap, m - 1));
    // o2 mixes the unknown part into the interface
    text.push_str(".names x1 c0 o2\n10 1\n01 1\n");
    text.push_str(".end\n");

    let net = crate::netlist::parse_blif_lite(&text).expect("family circuit must parse");
    let x: BTreeSet<String> = ["x0".to_string(), "x1".to_string()].into_iter().collect();
    (net, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn random_networks_validate() {
        let mut rng = StdRng::seed_from_u64(1);
        for _ in 0..50 {
            let net = random_network(&mut rng, 2, 5, 2, 6);
            net.validate().unwrap();
        }
    }

    #[test]
    fn random_split_is_proper() {
        let mut rng = StdRng::seed_from_u64(2);
        let net = random_network(&mut rng, 2, 5, 2, 6);
        for _ in 0..20 {
            let s = random_split(&mut rng, &net);
            assert!(!s.is_empty() && s.len() < net.latches.len());
        }
    }

    #[test]
    fn family_members_parse_and_split() {
        for n in [5, 8, 12] {
            let (net, x) = bench_family(n, 0);
            assert_eq!(net.latches.len(), n);
            assert_eq!(x.len(), 2);
            crate::netlist::latch_split(&net, &x).unwrap();
        }
    }
}
