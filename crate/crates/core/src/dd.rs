//! Reduced ordered binary decision diagrams.
//!
//! A [`Manager`] owns a hash-consed node table with a variable order fixed at
//! creation (new variables may only be appended at the end of the order).
//! [`Func`] is a handle to one function in a manager; canonicity makes
//! semantic equality a root-pointer comparison. There are no complement
//! edges: the diagram has two terminals and negation is a cached traversal.
//!
//! A manager and its functions are confined to one thread (`Rc` interior),
//! distinct managers are independent. Dead nodes are reclaimed by a
//! mark-and-sweep pass over the externally referenced roots; collection runs
//! only between operations, never while a recursion is holding raw node ids.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::rc::Rc;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

use crate::{CsfError, Result};

/// Default cap on live nodes per manager.
pub const DEFAULT_NODE_LIMIT: usize = 1 << 22;

const FALSE: u32 = 0;
const TRUE: u32 = 1;
const TERMINAL_VAR: u32 = u32::MAX;
const GC_MIN_THRESHOLD: usize = 1 << 16;

static NEXT_MANAGER_ID: AtomicU64 = AtomicU64::new(1);

/// Position of a variable in a manager's order (the order is the identity,
/// so the index doubles as the level).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct VarId(pub u32);

impl VarId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Sorted, duplicate-free set of variables.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct VarSet(Vec<VarId>);

impl VarSet {
    pub fn new() -> Self {
        VarSet(Vec::new())
    }

    pub fn from_vars<I: IntoIterator<Item = VarId>>(vars: I) -> Self {
        let mut v: Vec<VarId> = vars.into_iter().collect();
        v.sort();
        v.dedup();
        VarSet(v)
    }

    pub fn singleton(v: VarId) -> Self {
        VarSet(vec![v])
    }

    pub fn insert(&mut self, v: VarId) {
        if let Err(pos) = self.0.binary_search(&v) {
            self.0.insert(pos, v);
        }
    }

    pub fn contains(&self, v: VarId) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn union(&self, other: &VarSet) -> VarSet {
        VarSet::from_vars(self.0.iter().chain(other.0.iter()).copied())
    }

    pub fn difference(&self, other: &VarSet) -> VarSet {
        VarSet(self.0.iter().copied().filter(|v| !other.contains(*v)).collect())
    }

    pub fn intersection(&self, other: &VarSet) -> VarSet {
        VarSet(self.0.iter().copied().filter(|v| other.contains(*v)).collect())
    }

    pub fn is_subset_of(&self, other: &VarSet) -> bool {
        self.0.iter().all(|v| other.contains(*v))
    }

    pub fn is_disjoint_from(&self, other: &VarSet) -> bool {
        self.0.iter().all(|v| !other.contains(*v))
    }

    pub fn iter(&self) -> impl Iterator<Item = VarId> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[VarId] {
        &self.0
    }
}

impl FromIterator<VarId> for VarSet {
    fn from_iter<I: IntoIterator<Item = VarId>>(iter: I) -> Self {
        VarSet::from_vars(iter)
    }
}

/// Total or partial valuation of variables.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Assignment(BTreeMap<VarId, bool>);

impl Assignment {
    pub fn new() -> Self {
        Assignment(BTreeMap::new())
    }

    pub fn from_pairs<I: IntoIterator<Item = (VarId, bool)>>(pairs: I) -> Self {
        Assignment(pairs.into_iter().collect())
    }

    pub fn set(&mut self, v: VarId, value: bool) {
        self.0.insert(v, value);
    }

    pub fn get(&self, v: VarId) -> Option<bool> {
        self.0.get(&v).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarId, bool)> + '_ {
        self.0.iter().map(|(v, b)| (*v, *b))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Binary Boolean connectives accepted by [`Func::apply`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum BinOp {
    And,
    Or,
    Xor,
    Iff,
    Implies,
}

impl BinOp {
    fn commutative(self) -> bool {
        !matches!(self, BinOp::Implies)
    }

    pub fn eval(self, a: bool, b: bool) -> bool {
        match self {
            BinOp::And => a && b,
            BinOp::Or => a || b,
            BinOp::Xor => a != b,
            BinOp::Iff => a == b,
            BinOp::Implies => !a || b,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
struct Node {
    var: u32,
    low: u32,
    high: u32,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum CacheKey {
    Bin(BinOp, u32, u32),
    Not(u32),
    Ite(u32, u32, u32),
    Quant(bool, u32, u32),
    AndExists(u32, u32, u32),
    Restrict(u32, u32, bool),
}

struct Store {
    id: u64,
    names: Vec<String>,
    by_name: HashMap<String, u32>,
    nodes: Vec<Node>,
    unique: HashMap<Node, u32>,
    cache: HashMap<CacheKey, u32>,
    external: HashMap<u32, u32>,
    free: Vec<u32>,
    live: usize,
    node_limit: usize,
    gc_threshold: usize,
    deadline: Option<Instant>,
    alloc_tick: u32,
    fresh_counter: u32,
}

impl Store {
    fn new(names: Vec<String>, node_limit: usize) -> Result<Store> {
        let mut by_name = HashMap::new();
        for (i, n) in names.iter().enumerate() {
            if by_name.insert(n.clone(), i as u32).is_some() {
                return Err(CsfError::usage(format!("duplicate variable name: {n}")));
            }
        }
        let terminal = Node {
            var: TERMINAL_VAR,
            low: 0,
            high: 0,
        };
        Ok(Store {
            id: NEXT_MANAGER_ID.fetch_add(1, Ordering::Relaxed),
            names,
            by_name,
            nodes: vec![
                terminal,
                Node {
                    var: TERMINAL_VAR,
                    low: 1,
                    high: 1,
                },
            ],
            unique: HashMap::new(),
            cache: HashMap::new(),
            external: HashMap::new(),
            free: Vec::new(),
            live: 0,
            node_limit,
            gc_threshold: GC_MIN_THRESHOLD,
            deadline: None,
            alloc_tick: 0,
            fresh_counter: 0,
        })
    }

    fn level(&self, n: u32) -> u32 {
        self.nodes[n as usize].var
    }

    fn mk(&mut self, var: u32, low: u32, high: u32) -> Result<u32> {
        if low == high {
            return Ok(low);
        }
        let node = Node { var, low, high };
        if let Some(&id) = self.unique.get(&node) {
            return Ok(id);
        }
        if self.live >= self.node_limit {
            return Err(CsfError::NodeLimit(self.node_limit));
        }
        self.alloc_tick = self.alloc_tick.wrapping_add(1);
        if self.alloc_tick & 0x3fff == 0 {
            if let Some(d) = self.deadline {
                if Instant::now() > d {
                    return Err(CsfError::Timeout);
                }
            }
        }
        let id = match self.free.pop() {
            Some(slot) => {
                self.nodes[slot as usize] = node;
                slot
            }
            None => {
                let id = self.nodes.len() as u32;
                self.nodes.push(node);
                id
            }
        };
        self.unique.insert(node, id);
        self.live += 1;
        Ok(id)
    }

    fn not(&mut self, f: u32) -> Result<u32> {
        match f {
            FALSE => return Ok(TRUE),
            TRUE => return Ok(FALSE),
            _ => {}
        }
        let key = CacheKey::Not(f);
        if let Some(&r) = self.cache.get(&key) {
            return Ok(r);
        }
        let n = self.nodes[f as usize];
        let low = self.not(n.low)?;
        let high = self.not(n.high)?;
        let res = self.mk(n.var, low, high)?;
        self.cache.insert(key, res);
        Ok(res)
    }

    fn bin(&mut self, op: BinOp, f: u32, g: u32) -> Result<u32> {
        match op {
            BinOp::And => {
                if f == FALSE || g == FALSE {
                    return Ok(FALSE);
                }
                if f == TRUE {
                    return Ok(g);
                }
                if g == TRUE || f == g {
                    return Ok(f);
                }
            }
            BinOp::Or => {
                if f == TRUE || g == TRUE {
                    return Ok(TRUE);
                }
                if f == FALSE {
                    return Ok(g);
                }
                if g == FALSE || f == g {
                    return Ok(f);
                }
            }
            BinOp::Xor => {
                if f == g {
                    return Ok(FALSE);
                }
                if f == FALSE {
                    return Ok(g);
                }
                if g == FALSE {
                    return Ok(f);
                }
                if f == TRUE {
                    return self.not(g);
                }
                if g == TRUE {
                    return self.not(f);
                }
            }
            BinOp::Iff => {
                if f == g {
                    return Ok(TRUE);
                }
                if f == TRUE {
                    return Ok(g);
                }
                if g == TRUE {
                    return Ok(f);
                }
                if f == FALSE {
                    return self.not(g);
                }
                if g == FALSE {
                    return self.not(f);
                }
            }
            BinOp::Implies => {
                if f == FALSE || g == TRUE || f == g {
                    return Ok(TRUE);
                }
                if f == TRUE {
                    return Ok(g);
                }
                if g == FALSE {
                    return self.not(f);
                }
            }
        }
        let (a, b) = if op.commutative() && f > g { (g, f) } else { (f, g) };
        let key = CacheKey::Bin(op, a, b);
        if let Some(&r) = self.cache.get(&key) {
            return Ok(r);
        }
        let (na, nb) = (self.nodes[a as usize], self.nodes[b as usize]);
        let v = na.var.min(nb.var);
        let (a0, a1) = if na.var == v { (na.low, na.high) } else { (a, a) };
        let (b0, b1) = if nb.var == v { (nb.low, nb.high) } else { (b, b) };
        let r0 = self.bin(op, a0, b0)?;
        let r1 = self.bin(op, a1, b1)?;
        let res = self.mk(v, r0, r1)?;
        self.cache.insert(key, res);
        Ok(res)
    }

    fn ite(&mut self, c: u32, t: u32, e: u32) -> Result<u32> {
        match c {
            TRUE => return Ok(t),
            FALSE => return Ok(e),
            _ => {}
        }
        if t == e {
            return Ok(t);
        }
        if t == TRUE && e == FALSE {
            return Ok(c);
        }
        if t == FALSE && e == TRUE {
            return self.not(c);
        }
        let key = CacheKey::Ite(c, t, e);
        if let Some(&r) = self.cache.get(&key) {
            return Ok(r);
        }
        let v = self
            .level(c)
            .min(self.level(t))
            .min(self.level(e));
        let cof = |st: &Store, n: u32, hi: bool| -> u32 {
            let node = st.nodes[n as usize];
            if node.var == v {
                if hi {
                    node.high
                } else {
                    node.low
                }
            } else {
                n
            }
        };
        let (c0, t0, e0) = (cof(self, c, false), cof(self, t, false), cof(self, e, false));
        let (c1, t1, e1) = (cof(self, c, true), cof(self, t, true), cof(self, e, true));
        let r0 = self.ite(c0, t0, e0)?;
        let r1 = self.ite(c1, t1, e1)?;
        let res = self.mk(v, r0, r1)?;
        self.cache.insert(key, res);
        Ok(res)
    }

    /// Positive cube over a variable set, used as the quantification prefix.
    fn cube_of_set(&mut self, vs: &VarSet) -> Result<u32> {
        let mut acc = TRUE;
        for v in vs.as_slice().iter().rev() {
            acc = self.mk(v.0, FALSE, acc)?;
        }
        Ok(acc)
    }

    fn quant(&mut self, exists: bool, f: u32, cube: u32) -> Result<u32> {
        if f == FALSE || f == TRUE {
            return Ok(f);
        }
        let vf = self.level(f);
        let mut cb = cube;
        while cb != TRUE && self.level(cb) < vf {
            cb = self.nodes[cb as usize].high;
        }
        if cb == TRUE {
            return Ok(f);
        }
        let key = CacheKey::Quant(exists, f, cb);
        if let Some(&r) = self.cache.get(&key) {
            return Ok(r);
        }
        let nf = self.nodes[f as usize];
        let vc = self.level(cb);
        let res = if vf == vc {
            let rest = self.nodes[cb as usize].high;
            let l = self.quant(exists, nf.low, rest)?;
            if exists && l == TRUE {
                TRUE
            } else if !exists && l == FALSE {
                FALSE
            } else {
                let h = self.quant(exists, nf.high, rest)?;
                if exists {
                    self.bin(BinOp::Or, l, h)?
                } else {
                    self.bin(BinOp::And, l, h)?
                }
            }
        } else {
            let l = self.quant(exists, nf.low, cb)?;
            let h = self.quant(exists, nf.high, cb)?;
            self.mk(vf, l, h)?
        };
        self.cache.insert(key, res);
        Ok(res)
    }

    /// Relational product: `∃ cube. f ∧ g` without building the conjunction.
    fn and_exists(&mut self, f: u32, g: u32, cube: u32) -> Result<u32> {
        if f == FALSE || g == FALSE {
            return Ok(FALSE);
        }
        if cube == TRUE {
            return self.bin(BinOp::And, f, g);
        }
        if f == TRUE && g == TRUE {
            return Ok(TRUE);
        }
        if f == TRUE {
            return self.quant(true, g, cube);
        }
        if g == TRUE || f == g {
            return self.quant(true, f, cube);
        }
        let (a, b) = if f > g { (g, f) } else { (f, g) };
        let v = self.level(a).min(self.level(b));
        let mut cb = cube;
        while cb != TRUE && self.level(cb) < v {
            cb = self.nodes[cb as usize].high;
        }
        if cb == TRUE {
            return self.bin(BinOp::And, a, b);
        }
        let key = CacheKey::AndExists(a, b, cb);
        if let Some(&r) = self.cache.get(&key) {
            return Ok(r);
        }
        let (na, nb) = (self.nodes[a as usize], self.nodes[b as usize]);
        let (a0, a1) = if na.var == v { (na.low, na.high) } else { (a, a) };
        let (b0, b1) = if nb.var == v { (nb.low, nb.high) } else { (b, b) };
        let res = if self.level(cb) == v {
            let rest = self.nodes[cb as usize].high;
            let r0 = self.and_exists(a0, b0, rest)?;
            if r0 == TRUE {
                TRUE
            } else {
                let r1 = self.and_exists(a1, b1, rest)?;
                self.bin(BinOp::Or, r0, r1)?
            }
        } else {
            let r0 = self.and_exists(a0, b0, cb)?;
            let r1 = self.and_exists(a1, b1, cb)?;
            self.mk(v, r0, r1)?
        };
        self.cache.insert(key, res);
        Ok(res)
    }

    fn restrict(&mut self, f: u32, var: u32, value: bool) -> Result<u32> {
        if f == FALSE || f == TRUE || self.level(f) > var {
            return Ok(f);
        }
        let n = self.nodes[f as usize];
        if n.var == var {
            return Ok(if value { n.high } else { n.low });
        }
        let key = CacheKey::Restrict(f, var, value);
        if let Some(&r) = self.cache.get(&key) {
            return Ok(r);
        }
        let l = self.restrict(n.low, var, value)?;
        let h = self.restrict(n.high, var, value)?;
        let res = self.mk(n.var, l, h)?;
        self.cache.insert(key, res);
        Ok(res)
    }

    fn support_into(&self, f: u32, out: &mut BTreeSet<u32>) {
        let mut stack = vec![f];
        let mut seen = BTreeSet::new();
        while let Some(n) = stack.pop() {
            if n == FALSE || n == TRUE || !seen.insert(n) {
                continue;
            }
            let node = self.nodes[n as usize];
            out.insert(node.var);
            stack.push(node.low);
            stack.push(node.high);
        }
    }

    fn rename_rec(
        &mut self,
        f: u32,
        map: &HashMap<u32, u32>,
        memo: &mut HashMap<u32, u32>,
    ) -> Result<u32> {
        if f == FALSE || f == TRUE {
            return Ok(f);
        }
        if let Some(&r) = memo.get(&f) {
            return Ok(r);
        }
        let n = self.nodes[f as usize];
        let l = self.rename_rec(n.low, map, memo)?;
        let h = self.rename_rec(n.high, map, memo)?;
        let var = map.get(&n.var).copied().unwrap_or(n.var);
        let res = self.mk(var, l, h)?;
        memo.insert(f, res);
        Ok(res)
    }

    /// Satisfying-assignment count over all manager variables.
    fn count_all(&self, f: u32) -> Result<u128> {
        let total = self.names.len() as u32;
        if total > 127 {
            return Err(CsfError::usage(
                "sat_count supports at most 127 variables".to_string(),
            ));
        }
        fn level_of(store: &Store, n: u32, total: u32) -> u32 {
            if n == FALSE || n == TRUE {
                total
            } else {
                store.nodes[n as usize].var
            }
        }
        fn rec(store: &Store, n: u32, total: u32, memo: &mut HashMap<u32, u128>) -> u128 {
            if n == FALSE {
                return 0;
            }
            if n == TRUE {
                return 1;
            }
            if let Some(&c) = memo.get(&n) {
                return c;
            }
            let node = store.nodes[n as usize];
            let lo = rec(store, node.low, total, memo)
                << (level_of(store, node.low, total) - node.var - 1);
            let hi = rec(store, node.high, total, memo)
                << (level_of(store, node.high, total) - node.var - 1);
            let c = lo + hi;
            memo.insert(n, c);
            c
        }
        let mut memo = HashMap::new();
        let base = rec(self, f, total, &mut memo);
        Ok(base << level_of_root(self, f, total))
    }

    fn gc(&mut self) -> usize {
        let mut marked = vec![false; self.nodes.len()];
        marked[FALSE as usize] = true;
        marked[TRUE as usize] = true;
        let mut stack: Vec<u32> = self.external.keys().copied().collect();
        while let Some(n) = stack.pop() {
            if marked[n as usize] {
                continue;
            }
            marked[n as usize] = true;
            let node = self.nodes[n as usize];
            if node.var != TERMINAL_VAR {
                stack.push(node.low);
                stack.push(node.high);
            }
        }
        let mut freed = 0;
        let free = &mut self.free;
        self.unique.retain(|_, id| {
            if marked[*id as usize] {
                true
            } else {
                free.push(*id);
                freed += 1;
                false
            }
        });
        self.live -= freed;
        self.cache.clear();
        freed
    }

    fn maybe_gc(&mut self) {
        if self.live > self.gc_threshold {
            self.gc();
            self.gc_threshold = (self.live * 2).max(GC_MIN_THRESHOLD);
        }
    }

    fn inc_external(&mut self, root: u32) {
        if root > TRUE {
            *self.external.entry(root).or_insert(0) += 1;
        }
    }

    fn dec_external(&mut self, root: u32) {
        if root > TRUE {
            if let Some(c) = self.external.get_mut(&root) {
                *c -= 1;
                if *c == 0 {
                    self.external.remove(&root);
                }
            }
        }
    }
}

fn level_of_root(store: &Store, n: u32, total: u32) -> u32 {
    if n == FALSE || n == TRUE {
        total
    } else {
        store.nodes[n as usize].var
    }
}

/// Shared handle to a decision-diagram store.
#[derive(Clone)]
pub struct Manager {
    store: Rc<RefCell<Store>>,
    id: u64,
}

impl Manager {
    /// Creates a manager whose variable order is the given name list.
    pub fn new<S: AsRef<str>>(var_names: &[S], node_limit: Option<usize>) -> Result<Manager> {
        if var_names.is_empty() {
            return Err(CsfError::usage("variable list must not be empty"));
        }
        let names: Vec<String> = var_names.iter().map(|s| s.as_ref().to_string()).collect();
        let store = Store::new(names, node_limit.unwrap_or(DEFAULT_NODE_LIMIT))?;
        let id = store.id;
        Ok(Manager {
            store: Rc::new(RefCell::new(store)),
            id,
        })
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    /// Appends a variable at the end of the order; existing functions are
    /// unaffected.
    pub fn add_var(&self, name: &str) -> Result<VarId> {
        let mut st = self.store.borrow_mut();
        if st.by_name.contains_key(name) {
            return Err(CsfError::usage(format!("duplicate variable name: {name}")));
        }
        let id = st.names.len() as u32;
        st.names.push(name.to_string());
        st.by_name.insert(name.to_string(), id);
        Ok(VarId(id))
    }

    /// Appends an adjacent (current, next) state-variable pair with generated
    /// names; adjacency keeps next-to-current renaming order-compatible.
    pub fn add_state_pair(&self, hint: &str) -> Result<(VarId, VarId)> {
        let n = {
            let mut st = self.store.borrow_mut();
            st.fresh_counter += 1;
            st.fresh_counter
        };
        let cs = self.add_var(&format!("{hint}{n}"))?;
        let ns = self.add_var(&format!("{hint}{n}'"))?;
        Ok((cs, ns))
    }

    pub fn var_count(&self) -> usize {
        self.store.borrow().names.len()
    }

    pub fn var_name(&self, v: VarId) -> String {
        self.store.borrow().names[v.index()].clone()
    }

    pub fn var_by_name(&self, name: &str) -> Option<VarId> {
        self.store.borrow().by_name.get(name).map(|&i| VarId(i))
    }

    pub fn all_vars(&self) -> VarSet {
        VarSet::from_vars((0..self.var_count() as u32).map(VarId))
    }

    pub fn constant(&self, value: bool) -> Func {
        Func::from_root(self.clone(), if value { TRUE } else { FALSE })
    }

    /// The literal function of a variable.
    pub fn var(&self, v: VarId) -> Result<Func> {
        if v.index() >= self.var_count() {
            return Err(CsfError::usage(format!("variable {} out of range", v.0)));
        }
        let root = {
            let mut st = self.store.borrow_mut();
            st.mk(v.0, FALSE, TRUE)?
        };
        Ok(Func::from_root(self.clone(), root))
    }

    /// Conjunction of literals for a (partial) assignment.
    pub fn cube(&self, a: &Assignment) -> Result<Func> {
        let root = {
            let mut st = self.store.borrow_mut();
            let mut acc = TRUE;
            for (v, b) in a.iter().collect::<Vec<_>>().into_iter().rev() {
                if v.index() >= st.names.len() {
                    return Err(CsfError::usage(format!("variable {} out of range", v.0)));
                }
                acc = if b {
                    st.mk(v.0, FALSE, acc)?
                } else {
                    st.mk(v.0, acc, FALSE)?
                };
            }
            acc
        };
        Ok(Func::from_root(self.clone(), root))
    }

    pub fn live_nodes(&self) -> usize {
        self.store.borrow().live
    }

    pub fn node_limit(&self) -> usize {
        self.store.borrow().node_limit
    }

    /// Aborts in-flight and future operations once the instant has passed.
    pub fn set_deadline(&self, deadline: Option<Instant>) {
        self.store.borrow_mut().deadline = deadline;
    }

    /// Reclaims nodes unreachable from live [`Func`] roots; returns the
    /// number of freed nodes.
    pub fn gc(&self) -> usize {
        self.store.borrow_mut().gc()
    }

    /// Structural audit: every stored node is reduced and hash-consed.
    pub fn audit_reduced(&self) -> bool {
        let st = self.store.borrow();
        st.unique.iter().all(|(node, &id)| {
            node.low != node.high && st.nodes[id as usize] == *node
        })
    }

    fn enter(&self) {
        self.store.borrow_mut().maybe_gc();
    }
}

impl fmt::Debug for Manager {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let st = self.store.borrow();
        write!(
            f,
            "Manager(id={}, vars={}, live={})",
            st.id,
            st.names.len(),
            st.live
        )
    }
}

/// Handle to one Boolean function inside a manager. Equality of handles is
/// semantic equality of the functions (canonicity).
pub struct Func {
    mgr: Manager,
    root: u32,
}

impl Func {
    fn from_root(mgr: Manager, root: u32) -> Func {
        mgr.store.borrow_mut().inc_external(root);
        Func { mgr, root }
    }

    pub fn manager(&self) -> &Manager {
        &self.mgr
    }

    pub fn is_true(&self) -> bool {
        self.root == TRUE
    }

    pub fn is_false(&self) -> bool {
        self.root == FALSE
    }

    pub fn is_constant(&self) -> bool {
        self.root <= TRUE
    }

    fn check_same(&self, other: &Func) -> Result<()> {
        if self.mgr.id != other.mgr.id {
            return Err(CsfError::ManagerMismatch);
        }
        Ok(())
    }

    fn unary<F: FnOnce(&mut Store) -> Result<u32>>(&self, f: F) -> Result<Func> {
        self.mgr.enter();
        let root = f(&mut self.mgr.store.borrow_mut())?;
        Ok(Func::from_root(self.mgr.clone(), root))
    }

    pub fn apply(&self, op: BinOp, other: &Func) -> Result<Func> {
        self.check_same(other)?;
        let (a, b) = (self.root, other.root);
        self.unary(|st| st.bin(op, a, b))
    }

    pub fn and(&self, other: &Func) -> Result<Func> {
        self.apply(BinOp::And, other)
    }

    pub fn or(&self, other: &Func) -> Result<Func> {
        self.apply(BinOp::Or, other)
    }

    pub fn xor(&self, other: &Func) -> Result<Func> {
        self.apply(BinOp::Xor, other)
    }

    pub fn iff(&self, other: &Func) -> Result<Func> {
        self.apply(BinOp::Iff, other)
    }

    pub fn implies(&self, other: &Func) -> Result<Func> {
        self.apply(BinOp::Implies, other)
    }

    pub fn not(&self) -> Result<Func> {
        let f = self.root;
        self.unary(|st| st.not(f))
    }

    pub fn ite(&self, then: &Func, els: &Func) -> Result<Func> {
        self.check_same(then)?;
        self.check_same(els)?;
        let (c, t, e) = (self.root, then.root, els.root);
        self.unary(|st| st.ite(c, t, e))
    }

    pub fn exists(&self, vars: &VarSet) -> Result<Func> {
        let f = self.root;
        self.unary(|st| {
            let cube = st.cube_of_set(vars)?;
            st.quant(true, f, cube)
        })
    }

    pub fn forall(&self, vars: &VarSet) -> Result<Func> {
        let f = self.root;
        self.unary(|st| {
            let cube = st.cube_of_set(vars)?;
            st.quant(false, f, cube)
        })
    }

    /// `∃ vars. self ∧ other`, computed without materializing the conjunction.
    pub fn and_exists(&self, other: &Func, vars: &VarSet) -> Result<Func> {
        self.check_same(other)?;
        let (f, g) = (self.root, other.root);
        self.unary(|st| {
            let cube = st.cube_of_set(vars)?;
            st.and_exists(f, g, cube)
        })
    }

    pub fn cofactor(&self, var: VarId, value: bool) -> Result<Func> {
        let f = self.root;
        self.unary(|st| st.restrict(f, var.0, value))
    }

    pub fn support(&self) -> VarSet {
        let st = self.mgr.store.borrow();
        let mut out = BTreeSet::new();
        st.support_into(self.root, &mut out);
        VarSet::from_vars(out.into_iter().map(VarId))
    }

    /// Evaluates under a total-on-support assignment.
    pub fn eval(&self, a: &Assignment) -> Result<bool> {
        for v in self.support().iter() {
            if a.get(v).is_none() {
                return Err(CsfError::usage(format!(
                    "assignment misses support variable {}",
                    self.mgr.var_name(v)
                )));
            }
        }
        let st = self.mgr.store.borrow();
        let mut n = self.root;
        while n > TRUE {
            let node = st.nodes[n as usize];
            n = if a.get(VarId(node.var)).unwrap() {
                node.high
            } else {
                node.low
            };
        }
        Ok(n == TRUE)
    }

    /// Variable substitution. The map must be injective and preserve the
    /// relative order of the support; adjacent current/next pairs satisfy
    /// this by construction.
    pub fn rename(&self, pairs: &[(VarId, VarId)]) -> Result<Func> {
        let mut map: HashMap<u32, u32> = HashMap::new();
        let mut targets = BTreeSet::new();
        for (from, to) in pairs {
            if map.insert(from.0, to.0).is_some() {
                return Err(CsfError::usage("rename map lists a variable twice"));
            }
            if !targets.insert(to.0) {
                return Err(CsfError::usage("rename map is not injective"));
            }
        }
        let sup = self.support();
        let mut mapped: Vec<u32> = sup
            .iter()
            .map(|v| map.get(&v.0).copied().unwrap_or(v.0))
            .collect();
        let sorted = mapped.windows(2).all(|w| w[0] < w[1]);
        if !sorted {
            return Err(CsfError::usage(
                "rename map does not preserve the variable order on the support",
            ));
        }
        mapped.sort();
        mapped.dedup();
        if mapped.len() != sup.len() {
            return Err(CsfError::usage("rename map merges support variables"));
        }
        let f = self.root;
        self.unary(|st| {
            let mut memo = HashMap::new();
            st.rename_rec(f, &map, &mut memo)
        })
    }

    /// Number of satisfying assignments over exactly the given variables;
    /// the support must be contained in them.
    pub fn sat_count(&self, over: &VarSet) -> Result<u128> {
        if !self.support().is_subset_of(over) {
            return Err(CsfError::usage(
                "sat_count scope does not cover the support",
            ));
        }
        let st = self.mgr.store.borrow();
        let all = st.count_all(self.root)?;
        let spare = st.names.len() - over.len();
        Ok(all >> spare)
    }

    /// Path cubes leading to true, as partial assignments over `over`.
    pub fn cubes(&self, over: &VarSet) -> Result<Vec<Assignment>> {
        if !self.support().is_subset_of(over) {
            return Err(CsfError::usage("cube scope does not cover the support"));
        }
        let st = self.mgr.store.borrow();
        let mut out = Vec::new();
        let mut path = Assignment::new();
        fn rec(st: &Store, n: u32, path: &mut Assignment, out: &mut Vec<Assignment>) {
            if n == FALSE {
                return;
            }
            if n == TRUE {
                out.push(path.clone());
                return;
            }
            let node = st.nodes[n as usize];
            path.set(VarId(node.var), false);
            rec(st, node.low, path, out);
            path.set(VarId(node.var), true);
            rec(st, node.high, path, out);
            path.0.remove(&VarId(node.var));
        }
        rec(&st, self.root, &mut path, &mut out);
        Ok(out)
    }

    /// Number of nodes in this function's diagram.
    pub fn node_count(&self) -> usize {
        let st = self.mgr.store.borrow();
        let mut seen = BTreeSet::new();
        let mut stack = vec![self.root];
        while let Some(n) = stack.pop() {
            if n <= TRUE || !seen.insert(n) {
                continue;
            }
            let node = st.nodes[n as usize];
            stack.push(node.low);
            stack.push(node.high);
        }
        seen.len()
    }
}

impl Clone for Func {
    fn clone(&self) -> Func {
        Func::from_root(self.mgr.clone(), self.root)
    }
}

impl Drop for Func {
    fn drop(&mut self) {
        self.mgr.store.borrow_mut().dec_external(self.root);
    }
}

impl PartialEq for Func {
    fn eq(&self, other: &Func) -> bool {
        self.mgr.id == other.mgr.id && self.root == other.root
    }
}

impl Eq for Func {}

impl std::hash::Hash for Func {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.mgr.id.hash(state);
        self.root.hash(state);
    }
}

impl fmt::Debug for Func {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_false() {
            write!(f, "Func(false)")
        } else if self.is_true() {
            write!(f, "Func(true)")
        } else {
            write!(f, "Func(root={}, nodes={})", self.root, self.node_count())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn mgr(n: usize) -> Manager {
        let names: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
        Manager::new(&names, None).unwrap()
    }

    #[test]
    fn manager_construction() {
        let m = Manager::new(&["i", "cs1", "cs2", "ns1", "ns2", "o"], None).unwrap();
        assert_eq!(m.var_count(), 6);
        assert!(Manager::new::<&str>(&[], None).is_err());
        let names: Vec<String> = (0..64).map(|i| format!("v{i}")).collect();
        let m = Manager::new(&names, None).unwrap();
        assert!(m.var(VarId(63)).is_ok());
        assert!(m.var(VarId(64)).is_err());
        assert!(Manager::new(&["a", "a"], None).is_err());
    }

    #[test]
    fn constants_and_literals() {
        let m = mgr(3);
        assert!(m.constant(true).is_true());
        let x = m.var(VarId(0)).unwrap();
        let a = Assignment::from_pairs([(VarId(0), true)]);
        assert!(x.eval(&a).unwrap());
        let y = m.var(VarId(1)).unwrap();
        assert_ne!(x, y);
    }

    #[test]
    fn apply_basics() {
        let m = mgr(4);
        let x = m.var(VarId(0)).unwrap();
        let contradiction = x.and(&x.not().unwrap()).unwrap();
        assert!(contradiction.is_false());

        // next-state equivalence for a 2-input AND, evaluated at a point
        let ns1 = m.var(VarId(3)).unwrap();
        let i = m.var(VarId(0)).unwrap();
        let cs2 = m.var(VarId(2)).unwrap();
        let t1 = ns1.iff(&i.and(&cs2).unwrap()).unwrap();
        let a = Assignment::from_pairs([(VarId(3), true), (VarId(0), true), (VarId(2), true)]);
        assert!(t1.eval(&a).unwrap());

        let c = m.var(VarId(1)).unwrap();
        let t = m.var(VarId(2)).unwrap();
        assert_eq!(c.ite(&t, &t).unwrap(), t);
    }

    #[test]
    fn quantification() {
        let m = mgr(3);
        let x = m.var(VarId(0)).unwrap();
        let y = m.var(VarId(1)).unwrap();
        let f = x.and(&y).unwrap();
        assert_eq!(f.exists(&VarSet::singleton(VarId(0))).unwrap(), y);
        assert_eq!(f.exists(&VarSet::new()).unwrap(), f);
        assert!(f.exists(&f.support()).unwrap().is_true());
        // ∀x. x∧y is false, ∀x. x∨¬x is true
        assert!(f.forall(&VarSet::singleton(VarId(0))).unwrap().is_false());
        let taut = x.or(&x.not().unwrap()).unwrap();
        assert!(taut.forall(&VarSet::singleton(VarId(0))).unwrap().is_true());
    }

    #[test]
    fn and_exists_identity() {
        let m = mgr(3);
        let x = m.var(VarId(0)).unwrap();
        let y = m.var(VarId(1)).unwrap();
        let f = x.or(&y).unwrap();
        assert_eq!(
            f.and_exists(&m.constant(true), &VarSet::new()).unwrap(),
            f
        );
    }

    // expected image frozen from enumerating i ∈ {0,1} with both latches at 0:
    // next1 = i & cs2 = 0, next2 = !i | cs1 ∈ {1, 0} → ns ∈ {00, 01}
    #[test]
    fn and_exists_image_of_sample_relation() {
        let m = Manager::new(&["i", "cs1", "ns1", "cs2", "ns2"], None).unwrap();
        let i = m.var(VarId(0)).unwrap();
        let cs1 = m.var(VarId(1)).unwrap();
        let ns1 = m.var(VarId(2)).unwrap();
        let cs2 = m.var(VarId(3)).unwrap();
        let ns2 = m.var(VarId(4)).unwrap();
        let t1 = ns1.iff(&i.and(&cs2).unwrap()).unwrap();
        let t2 = ns2.iff(&i.not().unwrap().or(&cs1).unwrap()).unwrap();
        let t = t1.and(&t2).unwrap();
        let zeta = m
            .cube(&Assignment::from_pairs([(VarId(1), false), (VarId(3), false)]))
            .unwrap();
        let img = t
            .and_exists(&zeta, &VarSet::from_vars([VarId(0), VarId(1), VarId(3)]))
            .unwrap();
        let expect_00 = Assignment::from_pairs([(VarId(2), false), (VarId(4), false)]);
        let expect_01 = Assignment::from_pairs([(VarId(2), false), (VarId(4), true)]);
        let expect_10 = Assignment::from_pairs([(VarId(2), true), (VarId(4), false)]);
        let expect_11 = Assignment::from_pairs([(VarId(2), true), (VarId(4), true)]);
        assert!(img.eval(&expect_00).unwrap());
        assert!(img.eval(&expect_01).unwrap());
        assert!(!img.eval(&expect_10).unwrap());
        assert!(!img.eval(&expect_11).unwrap());
    }

    #[test]
    fn sat_count_basics() {
        let m = mgr(2);
        let all = VarSet::from_vars([VarId(0), VarId(1)]);
        assert_eq!(m.constant(true).sat_count(&all).unwrap(), 4);
        let x = m.var(VarId(0)).unwrap();
        assert_eq!(x.sat_count(&all).unwrap(), 2);
        assert!(x.sat_count(&VarSet::singleton(VarId(1))).is_err());
    }

    // ns1 ≡ (i & cs2) over 4 variables: half of the 16 rows satisfy it
    #[test]
    fn sat_count_of_equivalence_part() {
        let m = Manager::new(&["i", "cs1", "cs2", "ns1"], None).unwrap();
        let i = m.var(VarId(0)).unwrap();
        let cs2 = m.var(VarId(2)).unwrap();
        let ns1 = m.var(VarId(3)).unwrap();
        let t1 = ns1.iff(&i.and(&cs2).unwrap()).unwrap();
        assert_eq!(t1.sat_count(&m.all_vars()).unwrap(), 8);
    }

    #[test]
    fn rename_moves_support() {
        let m = Manager::new(&["cs1", "ns1", "cs2", "ns2"], None).unwrap();
        let ns1 = m.var(VarId(1)).unwrap();
        let ns2 = m.var(VarId(3)).unwrap();
        let f = ns1.xor(&ns2).unwrap();
        let renamed = f
            .rename(&[(VarId(1), VarId(0)), (VarId(3), VarId(2))])
            .unwrap();
        let sup = renamed.support();
        assert!(sup.contains(VarId(0)) && sup.contains(VarId(2)));
        assert!(!sup.contains(VarId(1)) && !sup.contains(VarId(3)));
        // order-incompatible map: moving ns1 past ns2 flips the support order
        assert!(f.rename(&[(VarId(1), VarId(3)), (VarId(3), VarId(1))]).is_err());
        let g = m.var(VarId(0)).unwrap().xor(&ns1).unwrap();
        assert!(g.rename(&[(VarId(0), VarId(2))]).is_err());
    }

    #[test]
    fn eval_requires_support() {
        let m = mgr(2);
        let x = m.var(VarId(0)).unwrap();
        let y = m.var(VarId(1)).unwrap();
        let f = x.or(&y).unwrap();
        let partial = Assignment::from_pairs([(VarId(0), true)]);
        assert!(f.eval(&partial).is_err());
    }

    #[test]
    fn cubes_enumeration() {
        let m = mgr(3);
        let x = m.var(VarId(0)).unwrap();
        let y = m.var(VarId(1)).unwrap();
        let f = x.xor(&y).unwrap();
        let cubes = f.cubes(&m.all_vars()).unwrap();
        assert_eq!(cubes.len(), 2);
        for c in &cubes {
            let mut probe = c.clone();
            // pad don't-cares arbitrarily before evaluating
            for v in f.support().iter() {
                if probe.get(v).is_none() {
                    probe.set(v, false);
                }
            }
            assert!(f.eval(&probe).unwrap());
        }
    }

    #[test]
    fn manager_mismatch_is_rejected() {
        let m1 = mgr(2);
        let m2 = mgr(2);
        let x = m1.var(VarId(0)).unwrap();
        let y = m2.var(VarId(0)).unwrap();
        assert!(matches!(x.and(&y), Err(CsfError::ManagerMismatch)));
    }

    #[test]
    fn node_limit_aborts() {
        let names: Vec<String> = (0..16).map(|i| format!("v{i}")).collect();
        let m = Manager::new(&names, Some(8)).unwrap();
        let mut acc = m.constant(false);
        let mut failed = false;
        for i in 0..16 {
            let v = match m.var(VarId(i)) {
                Ok(v) => v,
                Err(CsfError::NodeLimit(_)) => {
                    failed = true;
                    break;
                }
                Err(e) => panic!("unexpected error {e}"),
            };
            match acc.xor(&v) {
                Ok(f) => acc = f,
                Err(CsfError::NodeLimit(_)) => {
                    failed = true;
                    break;
                }
                Err(e) => panic!("unexpected error {e}"),
            }
        }
        assert!(failed);
    }

    #[test]
    fn dead_nodes_are_reclaimed() {
        let m = mgr(12);
        {
            let mut acc = m.constant(false);
            for i in 0..12 {
                let v = m.var(VarId(i)).unwrap();
                acc = acc.xor(&v).unwrap();
                let tmp = acc.and(&v).unwrap();
                acc = acc.or(&tmp).unwrap();
            }
            assert!(m.live_nodes() > 12);
        }
        let freed = m.gc();
        assert!(freed > 0);
        assert_eq!(m.live_nodes(), 0);
        assert!(m.audit_reduced());
    }

    // --- randomized structural/semantic checks -------------------------------

    #[derive(Clone, Debug)]
    enum Form {
        Const(bool),
        Var(usize),
        Not(Box<Form>),
        Bin(BinOp, Box<Form>, Box<Form>),
    }

    fn random_form(rng: &mut StdRng, nvars: usize, depth: usize) -> Form {
        if depth == 0 || rng.gen_range(0..8) == 0 {
            if rng.gen_range(0..8) == 0 {
                return Form::Const(rng.gen());
            }
            return Form::Var(rng.gen_range(0..nvars));
        }
        match rng.gen_range(0..6) {
            0 => Form::Not(Box::new(random_form(rng, nvars, depth - 1))),
            1 => Form::Bin(
                BinOp::And,
                Box::new(random_form(rng, nvars, depth - 1)),
                Box::new(random_form(rng, nvars, depth - 1)),
            ),
            2 => Form::Bin(
                BinOp::Or,
                Box::new(random_form(rng, nvars, depth - 1)),
                Box::new(random_form(rng, nvars, depth - 1)),
            ),
            3 => Form::Bin(
                BinOp::Xor,
                Box::new(random_form(rng, nvars, depth - 1)),
                Box::new(random_form(rng, nvars, depth - 1)),
            ),
            4 => Form::Bin(
                BinOp::Iff,
                Box::new(random_form(rng, nvars, depth - 1)),
                Box::new(random_form(rng, nvars, depth - 1)),
            ),
            _ => Form::Bin(
                BinOp::Implies,
                Box::new(random_form(rng, nvars, depth - 1)),
                Box::new(random_form(rng, nvars, depth - 1)),
            ),
        }
    }

    fn eval_form(f: &Form, bits: u32) -> bool {
        match f {
            Form::Const(b) => *b,
            Form::Var(i) => bits >> i & 1 == 1,
            Form::Not(g) => !eval_form(g, bits),
            Form::Bin(op, a, b) => op.eval(eval_form(a, bits), eval_form(b, bits)),
        }
    }

    fn build(f: &Form, m: &Manager) -> Func {
        match f {
            Form::Const(b) => m.constant(*b),
            Form::Var(i) => m.var(VarId(*i as u32)).unwrap(),
            Form::Not(g) => build(g, m).not().unwrap(),
            Form::Bin(op, a, b) => build(a, m).apply(*op, &build(b, m)).unwrap(),
        }
    }

    // semantically-preserving random rewrite, to get a syntactically
    // different formula with the same truth table
    fn rewrite(f: &Form, rng: &mut StdRng) -> Form {
        match f {
            Form::Const(b) => Form::Const(*b),
            Form::Var(i) => {
                if rng.gen() {
                    Form::Not(Box::new(Form::Not(Box::new(Form::Var(*i)))))
                } else {
                    Form::Var(*i)
                }
            }
            Form::Not(g) => Form::Not(Box::new(rewrite(g, rng))),
            Form::Bin(op, a, b) => {
                let (ra, rb) = (rewrite(a, rng), rewrite(b, rng));
                match op {
                    BinOp::And if rng.gen() => Form::Not(Box::new(Form::Bin(
                        BinOp::Or,
                        Box::new(Form::Not(Box::new(ra))),
                        Box::new(Form::Not(Box::new(rb))),
                    ))),
                    BinOp::Or if rng.gen() => Form::Not(Box::new(Form::Bin(
                        BinOp::And,
                        Box::new(Form::Not(Box::new(ra))),
                        Box::new(Form::Not(Box::new(rb))),
                    ))),
                    BinOp::Implies if rng.gen() => Form::Bin(
                        BinOp::Or,
                        Box::new(Form::Not(Box::new(ra))),
                        Box::new(rb),
                    ),
                    op if op.commutative() && rng.gen() => {
                        Form::Bin(*op, Box::new(rb), Box::new(ra))
                    }
                    op => Form::Bin(*op, Box::new(ra), Box::new(rb)),
                }
            }
        }
    }

    #[test]
    fn canonicity_matches_truth_tables() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..120 {
            let nvars = rng.gen_range(1..=6);
            let m = mgr(nvars);
            let fa = random_form(&mut rng, nvars, 4);
            let fb = rewrite(&fa, &mut rng);
            let fc = random_form(&mut rng, nvars, 4);
            let (ba, bb, bc) = (build(&fa, &m), build(&fb, &m), build(&fc, &m));
            assert_eq!(ba, bb, "rewritten formula must share the root");
            let equal_cc = (0..1u32 << nvars).all(|bits| eval_form(&fa, bits) == eval_form(&fc, bits));
            assert_eq!(ba == bc, equal_cc);
        }
    }

    #[test]
    fn eval_agrees_with_formula() {
        let mut rng = StdRng::seed_from_u64(12);
        for _ in 0..60 {
            let nvars = rng.gen_range(1..=7);
            let m = mgr(nvars);
            let form = random_form(&mut rng, nvars, 5);
            let f = build(&form, &m);
            for bits in 0..1u32 << nvars {
                let a = Assignment::from_pairs(
                    (0..nvars).map(|i| (VarId(i as u32), bits >> i & 1 == 1)),
                );
                assert_eq!(f.eval(&a).unwrap(), eval_form(&form, bits));
            }
        }
    }

    #[test]
    fn de_morgan_holds_structurally() {
        let mut rng = StdRng::seed_from_u64(13);
        for _ in 0..80 {
            let nvars = rng.gen_range(1..=6);
            let m = mgr(nvars);
            let f = build(&random_form(&mut rng, nvars, 4), &m);
            let g = build(&random_form(&mut rng, nvars, 4), &m);
            let lhs = f.and(&g).unwrap().not().unwrap();
            let rhs = f.not().unwrap().or(&g.not().unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn exists_is_cofactor_disjunction() {
        let mut rng = StdRng::seed_from_u64(14);
        for _ in 0..80 {
            let nvars = rng.gen_range(1..=6);
            let m = mgr(nvars);
            let f = build(&random_form(&mut rng, nvars, 4), &m);
            let v = VarId(rng.gen_range(0..nvars) as u32);
            let lhs = f.exists(&VarSet::singleton(v)).unwrap();
            let rhs = f
                .cofactor(v, false)
                .unwrap()
                .or(&f.cofactor(v, true).unwrap())
                .unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn and_exists_matches_two_step_computation() {
        let mut rng = StdRng::seed_from_u64(15);
        for _ in 0..120 {
            let nvars = rng.gen_range(1..=10);
            let m = mgr(nvars);
            let f = build(&random_form(&mut rng, nvars, 5), &m);
            let g = build(&random_form(&mut rng, nvars, 5), &m);
            let vars = VarSet::from_vars(
                (0..nvars as u32).map(VarId).filter(|_| rng.gen::<bool>()),
            );
            let fused = f.and_exists(&g, &vars).unwrap();
            let two_step = f.and(&g).unwrap().exists(&vars).unwrap();
            assert_eq!(fused, two_step);
        }
    }
}
