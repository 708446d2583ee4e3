//! Sequential circuits in a BLIF-like text format, their elaboration into
//! symbolic machines, and latch splitting.
//!
//! The grammar is one directive per line with `\` continuations and `#`
//! comments: `.model`, `.inputs`, `.outputs`, `.latch <data_in> <state>
//! [<init>]`, `.names <in...> <out>` followed by cover rows, `.end`.
//! Covers are single-phase; a cover whose rows assert output 0 denotes the
//! complement of its cube union.

use std::collections::{BTreeSet, HashMap, HashSet};

use crate::dd::{Assignment, Func, Manager, VarId, VarSet};
use crate::{CsfError, Result};

/// One position of a cover row.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CubeLit {
    Zero,
    One,
    DontCare,
}

#[derive(Clone, Debug)]
pub struct Gate {
    pub output: String,
    pub inputs: Vec<String>,
    pub cover: Vec<Vec<CubeLit>>,
    /// Output value asserted by the rows; `false` means the function is the
    /// complement of the cube union.
    pub phase: bool,
}

impl Gate {
    /// Buffer gate `output = input`.
    pub fn buffer(output: &str, input: &str) -> Gate {
        Gate {
            output: output.to_string(),
            inputs: vec![input.to_string()],
            cover: vec![vec![CubeLit::One]],
            phase: true,
        }
    }

    /// Evaluates the cover on concrete input values.
    pub fn eval(&self, values: &[bool]) -> bool {
        let hit = self.cover.iter().any(|row| {
            row.iter().zip(values).all(|(lit, &v)| match lit {
                CubeLit::Zero => !v,
                CubeLit::One => v,
                CubeLit::DontCare => true,
            })
        });
        if self.phase {
            hit
        } else {
            !hit
        }
    }
}

#[derive(Clone, Debug)]
pub struct Latch {
    pub data_in: String,
    pub state: String,
    pub init: bool,
}

/// A parsed multi-level sequential circuit.
#[derive(Clone, Debug)]
pub struct Network {
    pub name: String,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub latches: Vec<Latch>,
    pub gates: Vec<Gate>,
}

impl Network {
    pub fn latch_names(&self) -> Vec<String> {
        self.latches.iter().map(|l| l.state.clone()).collect()
    }

    fn defined_signals(&self) -> HashSet<&str> {
        let mut s: HashSet<&str> = self.inputs.iter().map(|x| x.as_str()).collect();
        s.extend(self.latches.iter().map(|l| l.state.as_str()));
        s.extend(self.gates.iter().map(|g| g.output.as_str()));
        s
    }

    /// Structural validation: unique definitions, defined references, and an
    /// acyclic combinational core.
    pub fn validate(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for name in self
            .inputs
            .iter()
            .chain(self.latches.iter().map(|l| &l.state))
            .chain(self.gates.iter().map(|g| &g.output))
        {
            if !seen.insert(name.as_str()) {
                return Err(CsfError::usage(format!("signal defined twice: {name}")));
            }
        }
        let defined = self.defined_signals();
        let check = |name: &str, what: &str| -> Result<()> {
            if !defined.contains(name) {
                return Err(CsfError::usage(format!("undefined signal {name} ({what})")));
            }
            Ok(())
        };
        for o in &self.outputs {
            check(o, "primary output")?;
        }
        for l in &self.latches {
            check(&l.data_in, "latch data input")?;
        }
        for g in &self.gates {
            for i in &g.inputs {
                check(i, &format!("input of gate {}", g.output))?;
            }
            for row in &g.cover {
                if row.len() != g.inputs.len() {
                    return Err(CsfError::usage(format!(
                        "cover row width mismatch in gate {}",
                        g.output
                    )));
                }
            }
        }
        self.topo_gate_order()?;
        Ok(())
    }

    /// Gate indices in dependency order; errors on a combinational cycle.
    pub fn topo_gate_order(&self) -> Result<Vec<usize>> {
        let by_output: HashMap<&str, usize> = self
            .gates
            .iter()
            .enumerate()
            .map(|(i, g)| (g.output.as_str(), i))
            .collect();
        let mut state = vec![0u8; self.gates.len()]; // 0 new, 1 open, 2 done
        let mut order = Vec::with_capacity(self.gates.len());
        fn visit(
            net: &Network,
            by_output: &HashMap<&str, usize>,
            state: &mut [u8],
            order: &mut Vec<usize>,
            g: usize,
        ) -> Result<()> {
            match state[g] {
                2 => return Ok(()),
                1 => {
                    return Err(CsfError::usage(format!(
                        "combinational cycle through gate {}",
                        net.gates[g].output
                    )))
                }
                _ => {}
            }
            state[g] = 1;
            for input in &net.gates[g].inputs {
                if let Some(&dep) = by_output.get(input.as_str()) {
                    visit(net, by_output, state, order, dep)?;
                }
            }
            state[g] = 2;
            order.push(g);
            Ok(())
        }
        for g in 0..self.gates.len() {
            visit(self, &by_output, &mut state, &mut order, g)?;
        }
        Ok(order)
    }
}

// --- parsing -----------------------------------------------------------------

/// Logical lines with comments stripped and continuations joined; keeps the
/// source line number of each line's start.
fn logical_lines(text: &str) -> Vec<(usize, Vec<String>)> {
    let mut out: Vec<(usize, String)> = Vec::new();
    let mut pending: Option<(usize, String)> = None;
    for (idx, raw) in text.lines().enumerate() {
        let no_comment = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        };
        let (cont, body) = match no_comment.trim_end().strip_suffix('\\') {
            Some(b) => (true, b.to_string()),
            None => (false, no_comment.to_string()),
        };
        match pending.take() {
            Some((start, mut acc)) => {
                acc.push(' ');
                acc.push_str(&body);
                if cont {
                    pending = Some((start, acc));
                } else {
                    out.push((start, acc));
                }
            }
            None => {
                if cont {
                    pending = Some((idx + 1, body));
                } else {
                    out.push((idx + 1, body));
                }
            }
        }
    }
    if let Some(p) = pending {
        out.push(p);
    }
    out.into_iter()
        .map(|(n, s)| (n, s.split_whitespace().map(str::to_string).collect::<Vec<_>>()))
        .filter(|(_, toks)| !toks.is_empty())
        .collect()
}

/// Parses a BLIF-lite description into a validated [`Network`].
pub fn parse_blif_lite(text: &str) -> Result<Network> {
    let mut net = Network {
        name: String::from("main"),
        inputs: Vec::new(),
        outputs: Vec::new(),
        latches: Vec::new(),
        gates: Vec::new(),
    };
    let mut open_gate: Option<Gate> = None;
    let mut saw_model = false;
    let mut ended = false;

    for (line, toks) in logical_lines(text) {
        if ended {
            break;
        }
        let head = toks[0].as_str();
        if head.starts_with('.') {
            if let Some(gate) = open_gate.take() {
                net.gates.push(gate);
            }
        }
        match head {
            ".model" => {
                if saw_model {
                    return Err(CsfError::parse(line, "second .model directive"));
                }
                saw_model = true;
                if let Some(n) = toks.get(1) {
                    net.name = n.clone();
                }
            }
            ".inputs" => net.inputs.extend(toks[1..].iter().cloned()),
            ".outputs" => net.outputs.extend(toks[1..].iter().cloned()),
            ".latch" => {
                if toks.len() < 3 || toks.len() > 4 {
                    return Err(CsfError::parse(line, ".latch takes <data_in> <state> [init]"));
                }
                let init = match toks.get(3).map(String::as_str) {
                    None | Some("0") => false,
                    Some("1") => true,
                    Some(other) => {
                        return Err(CsfError::parse(
                            line,
                            format!("latch init must be 0 or 1, got {other}"),
                        ))
                    }
                };
                net.latches.push(Latch {
                    data_in: toks[1].clone(),
                    state: toks[2].clone(),
                    init,
                });
            }
            ".names" => {
                if toks.len() < 2 {
                    return Err(CsfError::parse(line, ".names needs an output signal"));
                }
                let output = toks.last().unwrap().clone();
                let inputs = toks[1..toks.len() - 1].to_vec();
                open_gate = Some(Gate {
                    output,
                    inputs,
                    cover: Vec::new(),
                    phase: true,
                });
            }
            ".end" => {
                ended = true;
            }
            other if other.starts_with('.') => {
                return Err(CsfError::parse(line, format!("unknown directive {other}")));
            }
            _ => {
                let Some(gate) = open_gate.as_mut() else {
                    return Err(CsfError::parse(line, "cover row outside a .names block"));
                };
                let (cube_str, out_str) = if gate.inputs.is_empty() {
                    if toks.len() != 1 {
                        return Err(CsfError::parse(
                            line,
                            "constant cover row must be a single bit",
                        ));
                    }
                    ("", toks[0].as_str())
                } else {
                    if toks.len() != 2 {
                        return Err(CsfError::parse(line, "cover row must be <cube> <bit>"));
                    }
                    (toks[0].as_str(), toks[1].as_str())
                };
                if cube_str.len() != gate.inputs.len() {
                    return Err(CsfError::parse(
                        line,
                        format!(
                            "cube width {} does not match {} gate inputs",
                            cube_str.len(),
                            gate.inputs.len()
                        ),
                    ));
                }
                let mut row = Vec::with_capacity(cube_str.len());
                for c in cube_str.chars() {
                    row.push(match c {
                        '0' => CubeLit::Zero,
                        '1' => CubeLit::One,
                        '-' => CubeLit::DontCare,
                        other => {
                            return Err(CsfError::parse(
                                line,
                                format!("invalid cube character {other:?}"),
                            ))
                        }
                    });
                }
                let bit = match out_str {
                    "0" => false,
                    "1" => true,
                    other => {
                        return Err(CsfError::parse(
                            line,
                            format!("cover output must be 0 or 1, got {other}"),
                        ))
                    }
                };
                if gate.cover.is_empty() {
                    gate.phase = bit;
                } else if gate.phase != bit {
                    return Err(CsfError::parse(line, "mixed output phases in one cover"));
                }
                gate.cover.push(row);
            }
        }
    }
    if let Some(gate) = open_gate.take() {
        net.gates.push(gate);
    }
    net.validate().map_err(|e| match e {
        CsfError::Usage(msg) => CsfError::parse(0, msg),
        other => other,
    })?;
    Ok(net)
}

// --- elaboration ---------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct SymbolicLatch {
    pub name: String,
    pub cs: VarId,
    pub ns: VarId,
    pub next: Func,
}

#[derive(Clone, Debug)]
pub struct SymbolicOutput {
    pub name: String,
    pub var: VarId,
    pub func: Func,
}

/// A circuit elaborated into per-latch next-state functions and per-output
/// functions over (inputs, current state).
#[derive(Clone, Debug)]
pub struct PartitionedMachine {
    pub manager: Manager,
    pub input_vars: VarSet,
    pub latches: Vec<SymbolicLatch>,
    pub outputs: Vec<SymbolicOutput>,
    /// Outputs wired to the unknown component rather than the environment.
    pub internal_outputs: Vec<SymbolicOutput>,
    pub init: Assignment,
}

impl PartitionedMachine {
    pub fn cs_vars(&self) -> VarSet {
        VarSet::from_vars(self.latches.iter().map(|l| l.cs))
    }

    pub fn ns_vars(&self) -> VarSet {
        VarSet::from_vars(self.latches.iter().map(|l| l.ns))
    }

    pub fn state_pairs(&self) -> Vec<(VarId, VarId)> {
        self.latches.iter().map(|l| (l.cs, l.ns)).collect()
    }

    pub fn ns_to_cs(&self) -> Vec<(VarId, VarId)> {
        self.latches.iter().map(|l| (l.ns, l.cs)).collect()
    }

    pub fn init_cube(&self) -> Result<Func> {
        self.manager.cube(&self.init)
    }

    /// Moves the named outputs into `internal_outputs`, preserving order.
    pub fn mark_internal(&mut self, names: &BTreeSet<String>) {
        let outputs = std::mem::take(&mut self.outputs);
        let (internal, external): (Vec<_>, Vec<_>) =
            outputs.into_iter().partition(|o| names.contains(&o.name));
        self.outputs = external;
        self.internal_outputs.extend(internal);
    }

    pub fn all_label_vars(&self) -> VarSet {
        let mut vs = self.input_vars.clone();
        for o in self.outputs.iter().chain(self.internal_outputs.iter()) {
            vs.insert(o.var);
        }
        vs
    }
}

/// Builds the symbolic machine of a network. `var_map` must name a manager
/// variable for every input, latch state (plus its primed next-state twin)
/// and output of the network.
pub fn elaborate(
    net: &Network,
    manager: &Manager,
    var_map: &HashMap<String, VarId>,
) -> Result<PartitionedMachine> {
    let need = |name: &str| -> Result<VarId> {
        var_map
            .get(name)
            .copied()
            .ok_or_else(|| CsfError::usage(format!("var_map misses signal {name}")))
    };

    let mut signal: HashMap<String, Func> = HashMap::new();
    for i in &net.inputs {
        signal.insert(i.clone(), manager.var(need(i)?)?);
    }
    for l in &net.latches {
        signal.insert(l.state.clone(), manager.var(need(&l.state)?)?);
    }
    for &g in net.topo_gate_order()?.iter() {
        let gate = &net.gates[g];
        let mut func = manager.constant(false);
        for row in &gate.cover {
            let mut cube = manager.constant(true);
            for (lit, input) in row.iter().zip(&gate.inputs) {
                let f = &signal[input];
                match lit {
                    CubeLit::One => cube = cube.and(f)?,
                    CubeLit::Zero => cube = cube.and(&f.not()?)?,
                    CubeLit::DontCare => {}
                }
            }
            func = func.or(&cube)?;
        }
        if !gate.phase {
            func = func.not()?;
        }
        signal.insert(gate.output.clone(), func);
    }

    let mut latches = Vec::new();
    let mut init = Assignment::new();
    for l in &net.latches {
        let cs = need(&l.state)?;
        let ns = need(&format!("{}'", l.state))?;
        latches.push(SymbolicLatch {
            name: l.state.clone(),
            cs,
            ns,
            next: signal[&l.data_in].clone(),
        });
        init.set(cs, l.init);
    }
    let mut outputs = Vec::new();
    for o in &net.outputs {
        outputs.push(SymbolicOutput {
            name: o.clone(),
            var: need(o)?,
            func: signal[o].clone(),
        });
    }
    Ok(PartitionedMachine {
        manager: manager.clone(),
        input_vars: net
            .inputs
            .iter()
            .map(|i| need(i))
            .collect::<Result<VarSet>>()?,
        latches,
        outputs,
        internal_outputs: Vec::new(),
        init,
    })
}

// --- latch splitting -----------------------------------------------------------

/// Result of cutting a circuit into a fixed part and a particular solution of
/// the unknown part.
#[derive(Clone, Debug)]
pub struct SplitResult {
    /// Keeps the primary inputs/outputs, exports `u` wires, imports `v` wires.
    pub fixed: Network,
    /// Holds the selected latches; reads only `u` wires, drives only `v`.
    pub unknown: Network,
    pub u_signals: Vec<String>,
    pub v_signals: Vec<String>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Producer {
    Input,
    LatchState,
    Gate(usize),
}

/// Splits a circuit at the given latch-state signals. The unknown component
/// receives those latches and the gates feeding them exclusively; gates
/// needed by both sides are duplicated. Primary inputs consumed by the
/// unknown side are forwarded through the fixed side as buffered `u` wires,
/// so the unknown component sees only `u`.
pub fn latch_split(net: &Network, x_latches: &BTreeSet<String>) -> Result<SplitResult> {
    let latch_set: HashSet<&str> = net.latches.iter().map(|l| l.state.as_str()).collect();
    if x_latches.is_empty() {
        return Err(CsfError::usage("latch split needs at least one latch"));
    }
    for name in x_latches {
        if !latch_set.contains(name.as_str()) {
            return Err(CsfError::usage(format!("unknown latch {name}")));
        }
    }
    if x_latches.len() == net.latches.len() {
        return Err(CsfError::usage(
            "latch split must leave at least one latch in the fixed part",
        ));
    }

    let mut producer: HashMap<&str, Producer> = HashMap::new();
    for i in &net.inputs {
        producer.insert(i, Producer::Input);
    }
    for l in &net.latches {
        producer.insert(&l.state, Producer::LatchState);
    }
    for (g, gate) in net.gates.iter().enumerate() {
        producer.insert(&gate.output, Producer::Gate(g));
    }

    // transitive fanin over gates, stopping at inputs and latch states
    let mark = |roots: &[&str]| -> Vec<bool> {
        let mut marked = vec![false; net.gates.len()];
        let mut stack: Vec<&str> = roots.to_vec();
        while let Some(s) = stack.pop() {
            if let Some(Producer::Gate(g)) = producer.get(s) {
                if !marked[*g] {
                    marked[*g] = true;
                    stack.extend(net.gates[*g].inputs.iter().map(String::as_str));
                }
            }
        }
        marked
    };

    let x_roots: Vec<&str> = net
        .latches
        .iter()
        .filter(|l| x_latches.contains(&l.state))
        .map(|l| l.data_in.as_str())
        .collect();
    let mut f_roots: Vec<&str> = net
        .latches
        .iter()
        .filter(|l| !x_latches.contains(&l.state))
        .map(|l| l.data_in.as_str())
        .collect();
    f_roots.extend(net.outputs.iter().map(String::as_str));

    let reaches_x = mark(&x_roots);
    let reaches_f = mark(&f_roots);

    let in_x_cone = reaches_x.clone();
    // gates outside both cones are dead logic; keep them with F
    let in_f_cone: Vec<bool> = reaches_f
        .iter()
        .zip(&reaches_x)
        .map(|(&f, &x)| f || !x)
        .collect();

    let mut computed_x: HashSet<&str> = HashSet::new();
    let mut computed_f: HashSet<&str> = HashSet::new();
    for i in &net.inputs {
        computed_f.insert(i);
    }
    for l in &net.latches {
        if x_latches.contains(&l.state) {
            computed_x.insert(&l.state);
        } else {
            computed_f.insert(&l.state);
        }
    }
    for (g, gate) in net.gates.iter().enumerate() {
        if in_x_cone[g] {
            computed_x.insert(&gate.output);
        }
        if in_f_cone[g] {
            computed_f.insert(&gate.output);
        }
    }

    let mut consumed_x: BTreeSet<&str> = BTreeSet::new();
    let mut consumed_f: BTreeSet<&str> = BTreeSet::new();
    for (g, gate) in net.gates.iter().enumerate() {
        if in_x_cone[g] {
            consumed_x.extend(gate.inputs.iter().map(String::as_str));
        }
        if in_f_cone[g] {
            consumed_f.extend(gate.inputs.iter().map(String::as_str));
        }
    }
    for l in &net.latches {
        if x_latches.contains(&l.state) {
            consumed_x.insert(&l.data_in);
        } else {
            consumed_f.insert(&l.data_in);
        }
    }
    consumed_f.extend(net.outputs.iter().map(String::as_str));

    let u_sources: Vec<&str> = consumed_x
        .iter()
        .copied()
        .filter(|s| computed_f.contains(s) && !computed_x.contains(s))
        .collect();
    let v_sources: Vec<&str> = consumed_f
        .iter()
        .copied()
        .filter(|s| computed_x.contains(s) && !computed_f.contains(s))
        .collect();

    let u_signals: Vec<String> = u_sources.iter().map(|s| format!("u_{s}")).collect();
    let v_signals: Vec<String> = v_sources.iter().map(|s| format!("v_{s}")).collect();

    let mut fixed = Network {
        name: format!("{}_f", net.name),
        inputs: net.inputs.clone(),
        outputs: net.outputs.clone(),
        latches: Vec::new(),
        gates: Vec::new(),
    };
    fixed.inputs.extend(v_signals.iter().cloned());
    fixed.outputs.extend(u_signals.iter().cloned());
    for (s, wire) in v_sources.iter().zip(&v_signals) {
        fixed.gates.push(Gate::buffer(s, wire));
    }
    for (g, gate) in net.gates.iter().enumerate() {
        if in_f_cone[g] {
            fixed.gates.push(gate.clone());
        }
    }
    for (s, wire) in u_sources.iter().zip(&u_signals) {
        fixed.gates.push(Gate::buffer(wire, s));
    }
    for l in &net.latches {
        if !x_latches.contains(&l.state) {
            fixed.latches.push(l.clone());
        }
    }

    let mut unknown = Network {
        name: format!("{}_x", net.name),
        inputs: u_signals.clone(),
        outputs: v_signals.clone(),
        latches: Vec::new(),
        gates: Vec::new(),
    };
    for (s, wire) in u_sources.iter().zip(&u_signals) {
        unknown.gates.push(Gate::buffer(s, wire));
    }
    for (g, gate) in net.gates.iter().enumerate() {
        if in_x_cone[g] {
            unknown.gates.push(gate.clone());
        }
    }
    for (s, wire) in v_sources.iter().zip(&v_signals) {
        unknown.gates.push(Gate::buffer(wire, s));
    }
    for l in &net.latches {
        if x_latches.contains(&l.state) {
            unknown.latches.push(l.clone());
        }
    }

    fixed.validate()?;
    unknown.validate()?;
    Ok(SplitResult {
        fixed,
        unknown,
        u_signals,
        v_signals,
    })
}

/// Split specs are either `k:N` (the first `N` latches in declaration order)
/// or a comma-separated list of latch state names.
pub fn parse_split_spec(net: &Network, spec: &str) -> Result<BTreeSet<String>> {
    if let Some(rest) = spec.strip_prefix("k:") {
        let n: usize = rest
            .parse()
            .map_err(|_| CsfError::usage(format!("bad split count in {spec:?}")))?;
        if n == 0 || n >= net.latches.len() {
            return Err(CsfError::usage(format!(
                "split count must be in 1..{} for this circuit",
                net.latches.len()
            )));
        }
        return Ok(net
            .latches
            .iter()
            .take(n)
            .map(|l| l.state.clone())
            .collect());
    }
    Ok(spec.split(',').map(|s| s.trim().to_string()).collect())
}

// --- shared variable layout ------------------------------------------------------

/// Manager layout for one split: primary inputs, v wires, u wires, outputs,
/// then interleaved (current, next) state pairs — fixed part first,
/// specification copy second, particular-solution copy last.
pub struct VarLayout {
    pub manager: Manager,
    pub i_vars: VarSet,
    pub v_vars: VarSet,
    pub u_vars: VarSet,
    pub o_vars: VarSet,
    pub map_s: HashMap<String, VarId>,
    pub map_f: HashMap<String, VarId>,
    pub map_x: HashMap<String, VarId>,
}

pub fn build_var_layout(
    net: &Network,
    split: &SplitResult,
    node_limit: Option<usize>,
) -> Result<VarLayout> {
    let mut names: Vec<String> = Vec::new();
    names.extend(net.inputs.iter().cloned());
    names.extend(split.v_signals.iter().cloned());
    names.extend(split.u_signals.iter().cloned());
    let out_names: Vec<String> = net.outputs.iter().map(|o| format!("{o}$o")).collect();
    names.extend(out_names.iter().cloned());

    let mut push_pairs = |names: &mut Vec<String>, latches: &[Latch], tag: &str| {
        let mut pairs = Vec::new();
        for l in latches {
            let cs = format!("{}${}", l.state, tag);
            let ns = format!("{}${}'", l.state, tag);
            names.push(cs.clone());
            names.push(ns.clone());
            pairs.push((l.state.clone(), cs, ns));
        }
        pairs
    };
    let f_pairs = push_pairs(&mut names, &split.fixed.latches, "f");
    let s_pairs = push_pairs(&mut names, &net.latches, "s");
    let x_pairs = push_pairs(&mut names, &split.unknown.latches, "x");

    let manager = Manager::new(&names, node_limit)?;
    let var = |name: &str| manager.var_by_name(name).unwrap();

    let i_vars: VarSet = net.inputs.iter().map(|n| var(n)).collect();
    let v_vars: VarSet = split.v_signals.iter().map(|n| var(n)).collect();
    let u_vars: VarSet = split.u_signals.iter().map(|n| var(n)).collect();
    let o_vars: VarSet = out_names.iter().map(|n| var(n)).collect();

    let mut map_s = HashMap::new();
    let mut map_f = HashMap::new();
    let mut map_x = HashMap::new();
    for n in &net.inputs {
        map_s.insert(n.clone(), var(n));
        map_f.insert(n.clone(), var(n));
    }
    for n in &split.v_signals {
        map_f.insert(n.clone(), var(n));
        map_x.insert(n.clone(), var(n));
    }
    for n in &split.u_signals {
        map_f.insert(n.clone(), var(n));
        map_x.insert(n.clone(), var(n));
    }
    for (o, tagged) in net.outputs.iter().zip(&out_names) {
        map_s.insert(o.clone(), var(tagged));
        map_f.insert(o.clone(), var(tagged));
    }
    for (state, cs, ns) in &f_pairs {
        map_f.insert(state.clone(), var(cs));
        map_f.insert(format!("{state}'"), var(ns));
    }
    for (state, cs, ns) in &s_pairs {
        map_s.insert(state.clone(), var(cs));
        map_s.insert(format!("{state}'"), var(ns));
    }
    for (state, cs, ns) in &x_pairs {
        map_x.insert(state.clone(), var(cs));
        map_x.insert(format!("{state}'"), var(ns));
    }

    Ok(VarLayout {
        manager,
        i_vars,
        v_vars,
        u_vars,
        o_vars,
        map_s,
        map_f,
        map_x,
    })
}

#[cfg(test)]
pub(crate) const SAMPLE_BLIF: &str = "\
.model twobit
.inputs i
.outputs o
.latch n1 cs1 0
.latch n2 cs2 0
.names i cs2 n1
11 1
.names i cs1 n2
0- 1
-1 1
.names cs1 cs2 o
10 1
01 1
.end
";
