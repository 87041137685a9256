//! Dinic max-flow with real capacities, used for Strassen-type feasibility.

const EPS: f64 = 1e-15;

#[derive(Debug, Clone)]
struct Edge {
    to: usize,
    cap: f64,
    rev: usize,
}

#[derive(Debug, Clone)]
pub struct FlowNetwork {
    adj: Vec<Vec<Edge>>,
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        Self { adj: vec![Vec::new(); nodes] }
    }

    pub fn add_edge(&mut self, from: usize, to: usize, cap: f64) {
        let rf = self.adj[to].len();
        let rt = self.adj[from].len();
        self.adj[from].push(Edge { to, cap, rev: rf });
        self.adj[to].push(Edge { to: from, cap: 0.0, rev: rt });
    }

    pub fn max_flow(&mut self, s: usize, t: usize) -> f64 {
        let n = self.adj.len();
        let mut total = 0.0;
        let mut level = vec![usize::MAX; n];
        let mut it = vec![0usize; n];
        loop {
            level.iter_mut().for_each(|l| *l = usize::MAX);
            level[s] = 0;
            let mut queue = std::collections::VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for e in &self.adj[v] {
                    if e.cap > EPS && level[e.to] == usize::MAX {
                        level[e.to] = level[v] + 1;
                        queue.push_back(e.to);
                    }
                }
            }
            if level[t] == usize::MAX {
                return total;
            }
            it.iter_mut().for_each(|i| *i = 0);
            loop {
                let f = self.augment(s, t, f64::INFINITY, &level, &mut it);
                if f <= EPS {
                    break;
                }
                total += f;
            }
        }
    }

    fn augment(&mut self, v: usize, t: usize, pushed: f64, level: &[usize], it: &mut [usize]) -> f64 {
        if v == t {
            return pushed;
        }
        while it[v] < self.adj[v].len() {
            let Edge { to, cap, rev } = self.adj[v][it[v]];
            if cap > EPS && level[to] == level[v] + 1 {
                let d = self.augment(to, t, pushed.min(cap), level, it);
                if d > EPS {
                    self.adj[v][it[v]].cap -= d;
                    self.adj[to][rev].cap += d;
                    return d;
                }
            }
            it[v] += 1;
        }
        0.0
    }
}
