//! Linearized mixed-integer model of the full problem.
//!
//! Variable names use 0-based indices: DCs `d{k}`, retailers `r{i}`, the
//! supplier `s0`; e.g. `x_0`, `y_3_1`, `w_d0_r3_v1`, `w_s0_d1_v2`.

use super::linearize::{
    emit_subset_indicators, linearize_bilinear, linearize_binary_product, linearize_binary_times, linearize_sqrt,
    pattern_mask,
};
use super::model::{MilpModel, Sense, VarKind};
use super::ExactError;
use crate::decoder::Plan;
use crate::instance::{Instance, Node};
use crate::inventory::{classify, z_quantile};

/// Largest retailer count for the subset enumeration of the square-root term.
pub const DEFAULT_SUBSET_CAP: usize = 16;

fn node_name(node: Node) -> String {
    match node {
        Node::Supplier => "s0".into(),
        Node::Dc(k) => format!("d{k}"),
        Node::Retailer(i) => format!("r{i}"),
    }
}

/// Outbound arcs: DC to retailer, retailer to retailer, retailer to DC.
pub fn outbound_arcs(instance: &Instance) -> Vec<(Node, Node)> {
    let nk = instance.dcs.len();
    let ni = instance.retailers.len();
    let mut arcs = Vec::new();
    for k in 0..nk {
        for i in 0..ni {
            arcs.push((Node::Dc(k), Node::Retailer(i)));
        }
    }
    for i in 0..ni {
        for j in 0..ni {
            if i != j {
                arcs.push((Node::Retailer(i), Node::Retailer(j)));
            }
        }
        for k in 0..nk {
            arcs.push((Node::Retailer(i), Node::Dc(k)));
        }
    }
    arcs
}

pub fn arc_var_name(prefix: &str, a: Node, b: Node, v: usize) -> String {
    format!("{prefix}_{}_{}_v{v}", node_name(a), node_name(b))
}

/// Builds the linearized model. Frequencies range over `1..=n_max`.
pub fn build_milp(instance: &Instance, subset_cap: usize, n_max: u32) -> Result<MilpModel, ExactError> {
    let nk = instance.dcs.len();
    let ni = instance.retailers.len();
    if ni > subset_cap {
        return Err(ExactError::SubsetCap {
            retailers: ni,
            cap: subset_cap,
        });
    }
    let n_max = n_max.max(1);
    let big_n = f64::from(n_max);
    let w = &instance.weights;
    let big_m = w.big_m;
    let z_alpha = z_quantile(w.alpha).map_err(|e| ExactError::Model(e.to_string()))?;
    let mu_all: f64 = instance.retailers.iter().map(|r| r.demand_mean).sum();
    let var_all: f64 = instance.retailers.iter().map(|r| r.demand_var).sum();
    let arcs = outbound_arcs(instance);

    let mut m = MilpModel::new();
    use VarKind::{Binary, Continuous, Integer};

    let x: Vec<usize> = (0..nk)
        .map(|k| m.add_var(format!("x_{k}"), Binary, 0.0, 1.0))
        .collect::<Result<_, _>>()?;
    let mut y = vec![vec![0; nk]; ni];
    for (i, row) in y.iter_mut().enumerate() {
        for (k, slot) in row.iter_mut().enumerate() {
            *slot = m.add_var(format!("y_{i}_{k}"), Binary, 0.0, 1.0)?;
        }
    }
    let mut n = Vec::new();
    let mut q = Vec::new();
    let mut sig = Vec::new();
    let mut lam = Vec::new();
    for k in 0..nk {
        let cap = instance.dcs[k].capacity;
        n.push(m.add_var(format!("n_{k}"), Integer, 0.0, big_n)?);
        q.push(m.add_var(format!("q_{k}"), Continuous, 0.0, cap)?);
        sig.push(m.add_var(format!("sigma_{k}"), Continuous, 0.0, cap * big_n)?);
        lam.push(
            (1..=n_max)
                .map(|mm| m.add_var(format!("lambda_{k}_{mm}"), Binary, 0.0, 1.0))
                .collect::<Result<Vec<_>, _>>()?,
        );
    }
    let nv_in = instance.vehicles_in.len();
    let nv_out = instance.vehicles_out.len();
    let mut r_in = vec![vec![0; nv_in]; nk];
    let mut w_in = vec![vec![0; nv_in]; nk];
    let mut u_in = vec![vec![0; nv_in]; nk];
    let mut om_in = vec![vec![0; nv_in]; nk];
    let mut psi_in = vec![vec![0; nv_in]; nk];
    for k in 0..nk {
        for v in 0..nv_in {
            let cap = instance.vehicles_in[v].capacity;
            r_in[k][v] = m.add_var(format!("r_in_{k}_{v}"), Binary, 0.0, 1.0)?;
            w_in[k][v] = m.add_var(arc_var_name("w", Node::Supplier, Node::Dc(k), v), Binary, 0.0, 1.0)?;
            u_in[k][v] = m.add_var(arc_var_name("u", Node::Supplier, Node::Dc(k), v), Continuous, 0.0, cap)?;
            om_in[k][v] = m.add_var(format!("wn_s0_d{k}_v{v}"), Continuous, 0.0, big_n)?;
            psi_in[k][v] = m.add_var(format!("un_s0_d{k}_v{v}"), Continuous, 0.0, cap * big_n)?;
        }
    }
    let mut r_out = vec![vec![0; nv_out]; nk];
    let mut rho = vec![vec![Vec::new(); nv_out]; nk];
    for k in 0..nk {
        for v in 0..nv_out {
            r_out[k][v] = m.add_var(format!("r_out_{k}_{v}"), Binary, 0.0, 1.0)?;
            rho[k][v] = (1..=n_max)
                .map(|mm| m.add_var(format!("rl_{k}_{v}_{mm}"), Binary, 0.0, 1.0))
                .collect::<Result<Vec<_>, _>>()?;
        }
    }
    let freq_v: Vec<usize> = (0..nv_out)
        .map(|v| m.add_var(format!("nv_{v}"), Continuous, 0.0, big_n))
        .collect::<Result<_, _>>()?;
    // Arc families per outbound vehicle, indexed like `arcs`.
    let mut w_arc = vec![Vec::new(); nv_out];
    let mut u_arc = vec![Vec::new(); nv_out];
    let mut pi_arc = vec![Vec::new(); nv_out];
    let mut un_arc = vec![Vec::new(); nv_out];
    for v in 0..nv_out {
        let cap = instance.vehicles_out[v].capacity;
        for &(a, b) in &arcs {
            w_arc[v].push(m.add_var(arc_var_name("w", a, b, v), Binary, 0.0, 1.0)?);
            u_arc[v].push(m.add_var(arc_var_name("u", a, b, v), Continuous, 0.0, cap)?);
            pi_arc[v].push(m.add_var(arc_var_name("wn", a, b, v), Continuous, 0.0, big_n)?);
            un_arc[v].push(m.add_var(arc_var_name("un", a, b, v), Continuous, 0.0, cap * big_n)?);
        }
    }
    let mut mtz = vec![vec![0; nv_out]; ni];
    for (i, row) in mtz.iter_mut().enumerate() {
        for (v, slot) in row.iter_mut().enumerate() {
            *slot = m.add_var(format!("m_{i}_{v}"), Continuous, 0.0, ni as f64)?;
        }
    }
    let mut t = Vec::new();
    let mut tp = Vec::new();
    let mut th = Vec::new();
    let mut tau = Vec::new();
    let mut p_td = Vec::new();
    let mut p_tps = Vec::new();
    let mut p_ths = Vec::new();
    let mut ss_terms: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut d_terms: Vec<Vec<(usize, f64)>> = Vec::new();
    let sigma2: Vec<f64> = instance.retailers.iter().map(|r| r.demand_var).collect();
    for k in 0..nk {
        t.push(m.add_var(format!("t_{k}"), Binary, 0.0, 1.0)?);
        tp.push(m.add_var(format!("tp_{k}"), Binary, 0.0, 1.0)?);
        th.push(m.add_var(format!("theta_{k}"), Binary, 0.0, 1.0)?);
        tau.push(
            (0..1usize << ni)
                .map(|j| m.add_var(format!("tau_{j}_{k}"), Binary, 0.0, 1.0))
                .collect::<Result<Vec<_>, _>>()?,
        );
        let (_, roots) = linearize_sqrt(&sigma2, instance.dcs[k].lead_time, subset_cap)?;
        ss_terms.push(tau[k].iter().zip(&roots).map(|(&tv, &rt)| (tv, z_alpha * rt)).collect());
        // D = sum(mu y) - sigma (shortage before safety stock).
        let mut d: Vec<(usize, f64)> = (0..ni).map(|i| (y[i][k], instance.retailers[i].demand_mean)).collect();
        d.push((sig[k], -1.0));
        d_terms.push(d);
        let cap_n = instance.dcs[k].capacity * big_n;
        let ss_max = z_alpha * (instance.dcs[k].lead_time * var_all).sqrt();
        p_td.push(m.add_var(format!("td_{k}"), Continuous, -cap_n, mu_all)?);
        p_tps.push(m.add_var(format!("tpsd_{k}"), Continuous, -cap_n, mu_all + ss_max)?);
        p_ths.push(m.add_var(format!("thsd_{k}"), Continuous, -cap_n, mu_all + ss_max)?);
    }

    // Assignment and location: (3), (4), (15).
    for i in 0..ni {
        for k in 0..nk {
            m.add_constraint(format!("open_{i}_{k}"), [(x[k], 1.0), (y[i][k], -1.0)], Sense::Ge, 0.0);
        }
        m.add_constraint(format!("assign_{i}"), (0..nk).map(|k| (y[i][k], 1.0)), Sense::Eq, 1.0);
    }
    for k in 0..nk {
        m.add_constraint(
            format!("dccap_{k}"),
            (0..ni).map(|i| (y[i][k], instance.retailers[i].demand_mean)),
            Sense::Le,
            instance.dcs[k].capacity,
        );
    }
    // Frequency encoding: one level per open DC.
    for k in 0..nk {
        let mut pick: Vec<(usize, f64)> = lam[k].iter().map(|&l| (l, 1.0)).collect();
        pick.push((x[k], -1.0));
        m.add_constraint(format!("freq_pick_{k}"), pick, Sense::Eq, 0.0);
        let mut level: Vec<(usize, f64)> = lam[k].iter().enumerate().map(|(j, &l)| (l, (j + 1) as f64)).collect();
        level.push((n[k], -1.0));
        m.add_constraint(format!("freq_level_{k}"), level, Sense::Eq, 0.0);
        linearize_bilinear(&mut m, q[k], n[k], sig[k], instance.dcs[k].capacity, big_n, &format!("qn_{k}"))?;
    }
    // Inbound: (6), (9), (13), (16), (17) and the w*n, u*n products.
    for k in 0..nk {
        let mut dispatch: Vec<(usize, f64)> = (0..nv_in).map(|v| (w_in[k][v], 1.0)).collect();
        dispatch.push((x[k], -1.0));
        m.add_constraint(format!("inbound_open_{k}"), dispatch, Sense::Ge, 0.0);
        let mut qty: Vec<(usize, f64)> = (0..nv_in).map(|v| (u_in[k][v], 1.0)).collect();
        qty.push((q[k], -1.0));
        m.add_constraint(format!("order_qty_{k}"), qty, Sense::Eq, 0.0);
        for v in 0..nv_in {
            let cap = instance.vehicles_in[v].capacity;
            m.add_constraint(format!("incap_{k}_{v}"), [(u_in[k][v], 1.0), (w_in[k][v], -cap)], Sense::Le, 0.0);
            m.add_constraint(format!("inassign_{k}_{v}"), [(r_in[k][v], 1.0), (w_in[k][v], -1.0)], Sense::Eq, 0.0);
            linearize_binary_times(&mut m, w_in[k][v], &[(n[k], 1.0)], 0.0, big_n, om_in[k][v], &format!("wn_in_{k}_{v}"));
            linearize_bilinear(&mut m, u_in[k][v], n[k], psi_in[k][v], cap, big_n, &format!("un_in_{k}_{v}"))?;
        }
    }
    for v in 0..nv_in {
        m.add_constraint(format!("inbound_once_{v}"), (0..nk).map(|k| (w_in[k][v], 1.0)), Sense::Le, 1.0);
    }
    // Outbound routing: (5), (7), (8), (10), (11), (14), (18).
    let arc_pos = |a: Node, b: Node| arcs.iter().position(|&x| x == (a, b)).expect("arc exists");
    for i in 0..ni {
        let mut leave = Vec::new();
        for v in 0..nv_out {
            for (e, &(a, _)) in arcs.iter().enumerate() {
                if a == Node::Retailer(i) {
                    leave.push((w_arc[v][e], 1.0));
                }
            }
        }
        m.add_constraint(format!("visit_{i}"), leave, Sense::Eq, 1.0);
    }
    let nodes: Vec<Node> = (0..nk).map(Node::Dc).chain((0..ni).map(Node::Retailer)).collect();
    for v in 0..nv_out {
        for &node in &nodes {
            let mut bal = Vec::new();
            for (e, &(a, b)) in arcs.iter().enumerate() {
                if a == node {
                    bal.push((w_arc[v][e], 1.0));
                }
                if b == node {
                    bal.push((w_arc[v][e], -1.0));
                }
            }
            m.add_constraint(format!("balance_{}_v{v}", node_name(node)), bal, Sense::Eq, 0.0);
        }
        let starts: Vec<(usize, f64)> = (0..nk)
            .flat_map(|k| (0..ni).map(move |i| (k, i)))
            .map(|(k, i)| (w_arc[v][arc_pos(Node::Dc(k), Node::Retailer(i))], 1.0))
            .collect();
        m.add_constraint(format!("outbound_once_{v}"), starts, Sense::Le, 1.0);
        for k in 0..nk {
            let mut link: Vec<(usize, f64)> = (0..ni)
                .map(|i| (w_arc[v][arc_pos(Node::Dc(k), Node::Retailer(i))], -1.0))
                .collect();
            link.push((r_out[k][v], 1.0));
            m.add_constraint(format!("outassign_{k}_{v}"), link, Sense::Eq, 0.0);
            for i in 0..ni {
                let mut tie: Vec<(usize, f64)> = Vec::new();
                for (e, &(a, _)) in arcs.iter().enumerate() {
                    if a == Node::Retailer(i) || a == Node::Dc(k) {
                        tie.push((w_arc[v][e], 1.0));
                    }
                }
                tie.push((y[i][k], -1.0));
                m.add_constraint(format!("route_link_{k}_{i}_v{v}"), tie, Sense::Le, 1.0);
            }
        }
        for i in 0..ni {
            for j in 0..ni {
                if i != j {
                    let e = arc_pos(Node::Retailer(i), Node::Retailer(j));
                    m.add_constraint(
                        format!("mtz_{i}_{j}_v{v}"),
                        [(mtz[i][v], 1.0), (mtz[j][v], -1.0), (w_arc[v][e], ni as f64)],
                        Sense::Le,
                        ni as f64 - 1.0,
                    );
                }
            }
        }
        let cap = instance.vehicles_out[v].capacity;
        for e in 0..arcs.len() {
            m.add_constraint(format!("outcap_{e}_v{v}"), [(u_arc[v][e], 1.0), (w_arc[v][e], -cap)], Sense::Le, 0.0);
        }
    }
    // Delivery balance at each retailer: inflow - outflow = mu_i / n_k when served by k.
    for i in 0..ni {
        let mut net = Vec::new();
        for v in 0..nv_out {
            for (e, &(a, b)) in arcs.iter().enumerate() {
                if b == Node::Retailer(i) {
                    net.push((u_arc[v][e], 1.0));
                }
                if a == Node::Retailer(i) {
                    net.push((u_arc[v][e], -1.0));
                }
            }
        }
        let mu = instance.retailers[i].demand_mean;
        for k in 0..nk {
            let per_cycle: Vec<(usize, f64)> = lam[k].iter().enumerate().map(|(j, &l)| (l, -mu / (j + 1) as f64)).collect();
            let mut upper = net.clone();
            upper.extend(per_cycle.iter().copied());
            upper.push((y[i][k], big_m));
            m.add_constraint(format!("deliver_hi_{i}_{k}"), upper, Sense::Le, big_m);
            let mut lower = net.clone();
            lower.extend(per_cycle.iter().copied());
            lower.push((y[i][k], -big_m));
            m.add_constraint(format!("deliver_lo_{i}_{k}"), lower, Sense::Ge, -big_m);
        }
    }
    // Frequency seen by each outbound vehicle, and the arc products.
    for v in 0..nv_out {
        let mut fv = vec![(freq_v[v], -1.0)];
        for k in 0..nk {
            for (j, &rl) in rho[k][v].iter().enumerate() {
                linearize_binary_product(&mut m, &[r_out[k][v], lam[k][j]], rl, &format!("rl_{k}_{v}_{}", j + 1));
                fv.push((rl, (j + 1) as f64));
            }
        }
        m.add_constraint(format!("vehicle_freq_{v}"), fv, Sense::Eq, 0.0);
        let cap = instance.vehicles_out[v].capacity;
        for e in 0..arcs.len() {
            linearize_binary_times(&mut m, w_arc[v][e], &[(freq_v[v], 1.0)], 0.0, big_n, pi_arc[v][e], &format!("wn_{e}_v{v}"));
            linearize_bilinear(&mut m, u_arc[v][e], freq_v[v], un_arc[v][e], cap, big_n, &format!("un_{e}_v{v}"))?;
        }
    }
    // Inventory scenarios (19)-(22), the t*t' product and the square root.
    for k in 0..nk {
        let d = &d_terms[k];
        let ss = &ss_terms[k];
        let mut r19 = vec![(t[k], big_m)];
        r19.extend(d.iter().map(|&(v, c)| (v, -c)));
        m.add_constraint(format!("short_hi_{k}"), r19, Sense::Ge, 0.0);
        let mut r20 = d.clone();
        r20.push((t[k], -big_m));
        m.add_constraint(format!("short_lo_{k}"), r20, Sense::Ge, -big_m);
        // Surplus beyond safety stock: -D - SS.
        let surplus: Vec<(usize, f64)> = d.iter().map(|&(v, c)| (v, -c)).chain(ss.iter().map(|&(v, c)| (v, -c))).collect();
        let mut r21 = vec![(tp[k], big_m)];
        r21.extend(surplus.iter().map(|&(v, c)| (v, -c)));
        m.add_constraint(format!("surplus_hi_{k}"), r21, Sense::Ge, 0.0);
        let mut r22 = surplus.clone();
        r22.push((tp[k], -big_m));
        m.add_constraint(format!("surplus_lo_{k}"), r22, Sense::Ge, -big_m);
        linearize_binary_product(&mut m, &[t[k], tp[k]], th[k], &format!("tt_{k}"));
        let ys: Vec<usize> = (0..ni).map(|i| y[i][k]).collect();
        emit_subset_indicators(&mut m, &ys, &tau[k], &format!("d{k}"));
        let cap_n = instance.dcs[k].capacity * big_n;
        let ss_max = z_alpha * (instance.dcs[k].lead_time * var_all).sqrt();
        linearize_binary_times(&mut m, t[k], d, -cap_n, mu_all, p_td[k], &format!("td_{k}"));
        let s_plus_d: Vec<(usize, f64)> = ss.iter().chain(d.iter()).copied().collect();
        linearize_binary_times(&mut m, tp[k], &s_plus_d, -cap_n, mu_all + ss_max, p_tps[k], &format!("tpsd_{k}"));
        linearize_binary_times(&mut m, th[k], &s_plus_d, -cap_n, mu_all + ss_max, p_ths[k], &format!("thsd_{k}"));
    }

    // Expected inventory per DC: SS + t D - t'(SS + D) + theta (SS + D).
    let inventory = |k: usize, scale: f64| -> Vec<(usize, f64)> {
        ss_terms[k]
            .iter()
            .map(|&(v, c)| (v, scale * c))
            .chain([(p_td[k], scale), (p_tps[k], -scale), (p_ths[k], scale)])
            .collect()
    };
    let mut z1 = Vec::new();
    let mut z2 = Vec::new();
    for k in 0..nk {
        let dc = &instance.dcs[k];
        z1.push((x[k], dc.fixed_cost));
        z1.push((n[k], w.beta * dc.inbound_fixed_cost + dc.order_cost));
        z1.push((sig[k], w.beta * dc.supply_cost));
        z1.extend(inventory(k, w.theta * dc.holding_cost));
        z2.extend(inventory(k, dc.emission_weight * dc.holding_cost));
        let d_in = instance.distance(Node::Supplier, Node::Dc(k));
        for v in 0..nv_in {
            let veh = &instance.vehicles_in[v];
            z1.push((w_in[k][v], veh.fixed_cost));
            z2.push((om_in[k][v], veh.emission_factor * 2.0 * veh.fuel_empty * d_in));
            z2.push((psi_in[k][v], veh.emission_factor * veh.load_slope() * d_in));
        }
    }
    for v in 0..nv_out {
        let veh = &instance.vehicles_out[v];
        for (e, &(a, b)) in arcs.iter().enumerate() {
            if matches!(a, Node::Dc(_)) {
                z1.push((w_arc[v][e], veh.fixed_cost));
            }
            z1.push((pi_arc[v][e], w.beta * instance.ship_cost(a, b)));
            let d = instance.distance(a, b);
            z2.push((pi_arc[v][e], veh.emission_factor * veh.fuel_empty * d));
            z2.push((un_arc[v][e], veh.emission_factor * veh.load_slope() * d));
        }
    }
    m.set_objective(0, z1);
    m.set_objective(1, z2);
    Ok(m)
}

/// Values of every model variable implied by a feasible plan.
pub fn induce_assignment(model: &MilpModel, plan: &Plan, instance: &Instance) -> Result<Vec<f64>, ExactError> {
    if !plan.is_feasible() {
        return Err(ExactError::Model("plan leaves retailers unserved".into()));
    }
    let mut vals = vec![0.0; model.variables.len()];
    let mut set = |name: String, value: f64| -> Result<(), ExactError> {
        let idx = model
            .var(&name)
            .ok_or_else(|| ExactError::Model(format!("model has no variable {name}")))?;
        vals[idx] = value;
        Ok(())
    };
    let nk = instance.dcs.len();
    let ni = instance.retailers.len();
    let n_max = model
        .var("n_0")
        .map(|i| model.variables[i].ub as u32)
        .unwrap_or(1);
    let z_alpha = z_quantile(instance.weights.alpha).map_err(|e| ExactError::Model(e.to_string()))?;
    let arcs = outbound_arcs(instance);

    let mut freq = vec![0u32; nk];
    for order in &plan.orders {
        freq[order.dc] = order.n;
    }
    for k in 0..nk {
        let open = plan.open_dcs.contains(&k);
        set(format!("x_{k}"), f64::from(u8::from(open)))?;
        let nk_f = f64::from(freq[k]);
        let qk = plan.order_for(k).map_or(0.0, |o| o.q);
        set(format!("n_{k}"), nk_f)?;
        set(format!("q_{k}"), qk)?;
        let sigma = qk * nk_f;
        set(format!("sigma_{k}"), sigma)?;
        for mm in 1..=n_max {
            set(format!("lambda_{k}_{mm}"), f64::from(u8::from(freq[k] == mm)))?;
        }
        let members: Vec<usize> = (0..ni).filter(|&i| plan.assignment[i] == Some(k)).collect();
        for i in 0..ni {
            set(format!("y_{i}_{k}"), f64::from(u8::from(members.contains(&i))))?;
        }
        let mu: f64 = members.iter().map(|&i| instance.retailers[i].demand_mean).sum();
        let pattern: Vec<bool> = (0..ni).map(|i| members.contains(&i)).collect();
        let mask = pattern_mask(&pattern);
        for j in 0..1usize << ni {
            set(format!("tau_{j}_{k}"), f64::from(u8::from(j == mask)))?;
        }
        let (sums, roots) = linearize_sqrt(
            &instance.retailers.iter().map(|r| r.demand_var).collect::<Vec<_>>(),
            instance.dcs[k].lead_time,
            usize::MAX,
        )?;
        let ss = z_alpha * roots[mask];
        let d = mu - sigma;
        let (tk, tpk) = if open {
            classify(mu, sums[mask], nk_f, qk, instance.dcs[k].lead_time, z_alpha)
        } else {
            (false, false)
        };
        let (tk, tpk) = (f64::from(u8::from(tk)), f64::from(u8::from(tpk)));
        set(format!("t_{k}"), tk)?;
        set(format!("tp_{k}"), tpk)?;
        set(format!("theta_{k}"), tk * tpk)?;
        set(format!("td_{k}"), tk * d)?;
        set(format!("tpsd_{k}"), tpk * (ss + d))?;
        set(format!("thsd_{k}"), tk * tpk * (ss + d))?;
        for v in 0..instance.vehicles_in.len() {
            let trip = plan
                .order_for(k)
                .and_then(|o| o.inbound.iter().find(|tr| tr.vehicle == v));
            let used = f64::from(u8::from(trip.is_some()));
            let load = trip.map_or(0.0, |tr| tr.load);
            set(format!("r_in_{k}_{v}"), used)?;
            set(arc_var_name("w", Node::Supplier, Node::Dc(k), v), used)?;
            set(arc_var_name("u", Node::Supplier, Node::Dc(k), v), load)?;
            set(format!("wn_s0_d{k}_v{v}"), used * nk_f)?;
            set(format!("un_s0_d{k}_v{v}"), load * nk_f)?;
        }
    }
    for v in 0..instance.vehicles_out.len() {
        let tour = plan.tours.iter().find(|tr| tr.vehicle == v);
        let fv = tour.map_or(0.0, |tr| f64::from(freq[tr.dc]));
        set(format!("nv_{v}"), fv)?;
        for k in 0..nk {
            let assigned = tour.is_some_and(|tr| tr.dc == k);
            set(format!("r_out_{k}_{v}"), f64::from(u8::from(assigned)))?;
            for mm in 1..=n_max {
                set(format!("rl_{k}_{v}_{mm}"), f64::from(u8::from(assigned && freq[k] == mm)))?;
            }
        }
        let mut on_arc: Vec<(Node, Node, f64)> = Vec::new();
        if let Some(tr) = tour {
            on_arc = tr.arcs().collect();
        }
        for &(a, b) in &arcs {
            let hit = on_arc.iter().find(|&&(x, y, _)| x == a && y == b);
            let used = f64::from(u8::from(hit.is_some()));
            let load = hit.map_or(0.0, |h| h.2);
            set(arc_var_name("w", a, b, v), used)?;
            set(arc_var_name("u", a, b, v), load)?;
            set(arc_var_name("wn", a, b, v), used * fv)?;
            set(arc_var_name("un", a, b, v), load * fv)?;
        }
        for i in 0..ni {
            let pos = tour
                .and_then(|tr| tr.retailers.iter().position(|&r| r == i))
                .map_or(1.0, |p| (p + 1) as f64);
            set(format!("m_{i}_{v}"), pos)?;
        }
    }
    Ok(vals)
}
