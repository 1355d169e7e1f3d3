//! Random-key representation and the chromosome → [`Plan`] decoding procedure.
//!
//! A chromosome holds one key in (0, 1) per DC, retailer, inbound vehicle and
//! outbound vehicle, in that order. Sorting each sub-string gives a priority
//! order. Retailers are packed greedily into DCs by priority; every open DC
//! then picks an order frequency that both vehicle layers can serve, takes
//! inbound vehicles in priority order, and packs its retailers first-fit into
//! outbound vehicles. Tours visit retailers in priority order.
//!
//! The per-DC steps are exposed through [`PlanBuilder`] so the exhaustive
//! enumerator in [`crate::exact`] walks exactly the same decision space.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::{Instance, Node, SizeSpec};

const CAPACITY_EPS: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum DecodeError {
    #[error("chromosome has {got} keys, instance needs {expected}")]
    Length { expected: usize, got: usize },
    #[error("key {index} = {value} is outside (0, 1)")]
    KeyRange { index: usize, value: f64 },
}

/// Vector of random keys in the open interval (0, 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chromosome(Vec<f64>);

impl Chromosome {
    pub fn new(keys: Vec<f64>, size: SizeSpec) -> Result<Self, DecodeError> {
        let expected = size.dcs + size.retailers + size.vehicles_in + size.vehicles_out;
        if keys.len() != expected {
            return Err(DecodeError::Length {
                expected,
                got: keys.len(),
            });
        }
        if let Some((index, &value)) = keys.iter().enumerate().find(|(_, &k)| !(k > 0.0 && k < 1.0)) {
            return Err(DecodeError::KeyRange { index, value });
        }
        Ok(Chromosome(keys))
    }

    /// Wraps keys already known to be valid (variation operators keep them in range).
    pub(crate) fn from_keys_unchecked(keys: Vec<f64>) -> Self {
        debug_assert!(keys.iter().all(|&k| k > 0.0 && k < 1.0));
        Chromosome(keys)
    }

    pub fn keys(&self) -> &[f64] {
        &self.0
    }

    pub fn into_keys(self) -> Vec<f64> {
        self.0
    }
}

/// Indices sorted by ascending key; ties keep the lower index first.
pub fn priority_order(keys: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..keys.len()).collect();
    idx.sort_by(|&a, &b| keys[a].total_cmp(&keys[b]));
    idx
}

/// Priority orders of the four sub-strings.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Priorities {
    pub dc: Vec<usize>,
    pub retailer: Vec<usize>,
    pub inbound: Vec<usize>,
    pub outbound: Vec<usize>,
}

impl Priorities {
    pub fn from_keys(keys: &[f64], size: SizeSpec) -> Self {
        let (dc, rest) = keys.split_at(size.dcs);
        let (retailer, rest) = rest.split_at(size.retailers);
        let (inbound, outbound) = rest.split_at(size.vehicles_in);
        Priorities {
            dc: priority_order(dc),
            retailer: priority_order(retailer),
            inbound: priority_order(inbound),
            outbound: priority_order(outbound),
        }
    }
}

/// Retailer → DC map plus the retailers that fit nowhere.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub dc_of: Vec<Option<usize>>,
    pub unassigned: Vec<usize>,
}

/// Packs retailers (in priority order) into DCs (in priority order), moving
/// to the next DC whenever the current one would exceed its capacity.
pub fn assign_retailers(retailer_order: &[usize], dc_order: &[usize], instance: &Instance) -> Assignment {
    let mut dc_of = vec![None; instance.retailers.len()];
    let mut unassigned = Vec::new();
    let mut slot = 0;
    let mut load = 0.0;
    for &i in retailer_order {
        let demand = instance.retailers[i].demand_mean;
        while slot < dc_order.len() && load + demand > instance.dcs[dc_order[slot]].capacity * (1.0 + CAPACITY_EPS) {
            slot += 1;
            load = 0.0;
        }
        if slot == dc_order.len() {
            unassigned.push(i);
        } else {
            dc_of[i] = Some(dc_order[slot]);
            load += demand;
        }
    }
    Assignment { dc_of, unassigned }
}

/// Minimum number of vehicles (largest first) covering `annual_demand / n`
/// for each `n` in `1..=n_max`; `None` where the whole fleet falls short.
pub fn vehicle_count_table(annual_demand: f64, capacities: &[f64], n_max: u32) -> Vec<Option<usize>> {
    let mut sorted = capacities.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    (1..=n_max)
        .map(|n| min_vehicles(annual_demand / f64::from(n), &sorted))
        .collect()
}

fn min_vehicles(quantity: f64, sorted_desc: &[f64]) -> Option<usize> {
    let mut covered = 0.0;
    for (count, cap) in sorted_desc.iter().enumerate() {
        if covered >= quantity * (1.0 - CAPACITY_EPS) {
            return Some(count);
        }
        covered += cap;
    }
    (covered >= quantity * (1.0 - CAPACITY_EPS)).then_some(sorted_desc.len())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InboundTrip {
    pub vehicle: usize,
    /// Load per shipment.
    pub load: f64,
}

/// Inventory policy and inbound shipments of one open DC.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DcOrder {
    pub dc: usize,
    /// Orders per year.
    pub n: u32,
    /// Order quantity.
    pub q: f64,
    pub inbound: Vec<InboundTrip>,
}

/// One outbound vehicle's cycle: DC → retailers → DC.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tour {
    pub dc: usize,
    pub vehicle: usize,
    pub retailers: Vec<usize>,
    /// Load on each arc; `loads[j]` leaves the j-th stop (stop 0 is the DC),
    /// so the last entry is the empty return leg.
    pub loads: Vec<f64>,
}

impl Tour {
    /// Node sequence including both DC endpoints.
    pub fn nodes(&self) -> impl Iterator<Item = Node> + '_ {
        std::iter::once(Node::Dc(self.dc))
            .chain(self.retailers.iter().map(|&i| Node::Retailer(i)))
            .chain(std::iter::once(Node::Dc(self.dc)))
    }

    /// Arcs paired with their loads.
    pub fn arcs(&self) -> impl Iterator<Item = (Node, Node, f64)> + '_ {
        let nodes: Vec<Node> = self.nodes().collect();
        (0..nodes.len() - 1).map(move |j| (nodes[j], nodes[j + 1], self.loads[j]))
    }
}

/// A decoded solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Plan {
    /// Open DCs, ascending.
    pub open_dcs: Vec<usize>,
    /// Serving DC of each retailer.
    pub assignment: Vec<Option<usize>>,
    /// One entry per open DC, in processing order.
    pub orders: Vec<DcOrder>,
    pub tours: Vec<Tour>,
    /// Retailers that fit in no DC.
    pub unassigned: Vec<usize>,
    /// Retailers whose DC had no order frequency serviceable by the remaining fleet.
    pub unserved: Vec<usize>,
}

impl Plan {
    pub fn is_feasible(&self) -> bool {
        self.unassigned.is_empty() && self.unserved.is_empty()
    }

    /// Retailers left without service, the quantity the penalty counts.
    pub fn missing_retailers(&self) -> usize {
        self.unassigned.len() + self.unserved.len()
    }

    pub fn order_for(&self, dc: usize) -> Option<&DcOrder> {
        self.orders.iter().find(|o| o.dc == dc)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecodeOptions {
    pub n_max: u32,
    /// Improve each tour with 2-opt after priority sequencing.
    pub two_opt: bool,
}

impl DecodeOptions {
    pub fn new(n_max: u32) -> Self {
        DecodeOptions {
            n_max: n_max.max(1),
            two_opt: false,
        }
    }

    /// `n_max = min(20, ceil(total demand / smallest outbound capacity))`.
    pub fn for_instance(instance: &Instance) -> Self {
        Self::new(default_n_max(instance))
    }
}

pub fn default_n_max(instance: &Instance) -> u32 {
    let min_cap = instance
        .vehicles_out
        .iter()
        .map(|v| v.capacity)
        .fold(f64::INFINITY, f64::min);
    let ratio = (instance.total_demand() / min_cap).ceil();
    if ratio.is_finite() && ratio >= 1.0 {
        (ratio as u32).min(20)
    } else {
        1
    }
}

/// Penalty added to both objectives: `rate` per retailer left without service.
pub fn penalty(plan: &Plan, rate: f64) -> (f64, f64) {
    let p = rate * plan.missing_retailers() as f64;
    (p, p)
}

/// Maps a DC key onto one of `len` feasible frequencies. The key range is cut
/// into `stripes` equal bands (one per DC) and the position inside the band
/// picks the frequency, so every rank and frequency combination is reachable
/// while nearby keys keep the same choice.
pub fn frequency_index(key: f64, len: usize, stripes: usize) -> usize {
    debug_assert!(len > 0);
    let u = (key * stripes.max(1) as f64).fract();
    ((u * len as f64) as usize).min(len - 1)
}

/// Decodes a chromosome. Total: every valid chromosome yields a plan,
/// possibly with unassigned or unserved retailers.
pub fn decode(chromosome: &Chromosome, instance: &Instance, opts: &DecodeOptions) -> Plan {
    let size = instance.size();
    let keys = chromosome.keys();
    let prio = Priorities::from_keys(keys, size);
    let mut builder = PlanBuilder::new(instance, opts, &prio);
    while let Some(dc) = builder.current_dc() {
        let options = builder.feasible_frequencies();
        let choice = (!options.is_empty()).then(|| options[frequency_index(keys[dc], options.len(), size.dcs)]);
        builder.commit(choice);
    }
    builder.finish()
}

/// Step-wise plan construction shared by the decoder and the enumerator.
#[derive(Debug, Clone)]
pub struct PlanBuilder<'a> {
    instance: &'a Instance,
    opts: DecodeOptions,
    inbound_order: &'a [usize],
    outbound_order: &'a [usize],
    /// Open DCs in processing order with their retailers in priority order.
    groups: Vec<(usize, Vec<usize>)>,
    next: usize,
    free_in: Vec<bool>,
    free_out: Vec<bool>,
    plan: Plan,
}

impl<'a> PlanBuilder<'a> {
    pub fn new(instance: &'a Instance, opts: &DecodeOptions, prio: &'a Priorities) -> Self {
        let assignment = assign_retailers(&prio.retailer, &prio.dc, instance);
        let groups: Vec<(usize, Vec<usize>)> = prio
            .dc
            .iter()
            .filter_map(|&k| {
                let members: Vec<usize> = prio
                    .retailer
                    .iter()
                    .copied()
                    .filter(|&i| assignment.dc_of[i] == Some(k))
                    .collect();
                (!members.is_empty()).then_some((k, members))
            })
            .collect();
        PlanBuilder {
            instance,
            opts: *opts,
            inbound_order: &prio.inbound,
            outbound_order: &prio.outbound,
            groups,
            next: 0,
            free_in: vec![true; instance.vehicles_in.len()],
            free_out: vec![true; instance.vehicles_out.len()],
            plan: Plan {
                open_dcs: Vec::new(),
                assignment: assignment.dc_of,
                orders: Vec::new(),
                tours: Vec::new(),
                unassigned: assignment.unassigned,
                unserved: Vec::new(),
            },
        }
    }

    /// DC awaiting a frequency decision.
    pub fn current_dc(&self) -> Option<usize> {
        self.groups.get(self.next).map(|(k, _)| *k)
    }

    fn current_demand(&self) -> f64 {
        let (_, members) = &self.groups[self.next];
        members.iter().map(|&i| self.instance.retailers[i].demand_mean).sum()
    }

    /// Frequencies in `1..=n_max` both vehicle layers can serve with the
    /// vehicles still free, ascending.
    pub fn feasible_frequencies(&self) -> Vec<u32> {
        let demand = self.current_demand();
        let free_in: Vec<f64> = self
            .instance
            .vehicles_in
            .iter()
            .zip(&self.free_in)
            .filter_map(|(v, &free)| free.then_some(v.capacity))
            .collect();
        let free_out: Vec<f64> = self
            .instance
            .vehicles_out
            .iter()
            .zip(&self.free_out)
            .filter_map(|(v, &free)| free.then_some(v.capacity))
            .collect();
        let inbound = vehicle_count_table(demand, &free_in, self.opts.n_max);
        let outbound = vehicle_count_table(demand, &free_out, self.opts.n_max);
        (1..=self.opts.n_max)
            .filter(|&n| {
                let idx = (n - 1) as usize;
                inbound[idx].is_some() && outbound[idx].is_some() && self.pack_outbound(n).is_some()
            })
            .collect()
    }

    /// First-fit packing of the current DC's per-cycle deliveries.
    fn pack_outbound(&self, n: u32) -> Option<Vec<(usize, Vec<usize>)>> {
        let (_, members) = &self.groups[self.next];
        let fleet = &self.instance.vehicles_out;
        let mut taken = vec![false; fleet.len()];
        let mut bins: Vec<(usize, f64, Vec<usize>)> = Vec::new();
        for &i in members {
            let amount = self.instance.retailers[i].demand_mean / f64::from(n);
            let fits = |residual: f64| amount <= residual + CAPACITY_EPS * amount.max(1.0);
            if let Some(bin) = bins.iter_mut().find(|b| fits(b.1)) {
                bin.1 -= amount;
                bin.2.push(i);
                continue;
            }
            let v = self
                .outbound_order
                .iter()
                .copied()
                .find(|&v| self.free_out[v] && !taken[v] && fits(fleet[v].capacity))?;
            taken[v] = true;
            bins.push((v, fleet[v].capacity - amount, vec![i]));
        }
        Some(bins.into_iter().map(|(v, _, stops)| (v, stops)).collect())
    }

    /// Fixes the current DC's frequency; `None` leaves its retailers unserved.
    pub fn commit(&mut self, n: Option<u32>) {
        let Some(n) = n else {
            let (_, members) = &self.groups[self.next];
            for &i in members {
                self.plan.assignment[i] = None;
                self.plan.unserved.push(i);
            }
            self.next += 1;
            return;
        };
        let dc = self.groups[self.next].0;
        let demand = self.current_demand();
        let q = demand / f64::from(n);

        let fleet_in = &self.instance.vehicles_in;
        let mut taken = Vec::new();
        let mut covered = 0.0;
        for &v in self.inbound_order {
            if covered >= q * (1.0 - CAPACITY_EPS) {
                break;
            }
            if self.free_in[v] {
                taken.push(v);
                covered += fleet_in[v].capacity;
            }
        }
        // Fill the largest vehicles first; the sort is stable so priority breaks ties.
        taken.sort_by(|&a, &b| fleet_in[b].capacity.total_cmp(&fleet_in[a].capacity));
        let mut remaining = q;
        let mut inbound = Vec::new();
        for v in taken {
            if remaining <= 0.0 {
                break;
            }
            let load = remaining.min(fleet_in[v].capacity);
            remaining -= load;
            self.free_in[v] = false;
            inbound.push(InboundTrip { vehicle: v, load });
        }
        // Rounding: the last vehicle absorbs any sliver left by the tolerance.
        if remaining > 0.0 {
            if let Some(last) = inbound.last_mut() {
                last.load += remaining;
            }
        }

        let packed = self
            .pack_outbound(n)
            .expect("commit called with a frequency outside feasible_frequencies");
        for (v, mut stops) in packed {
            self.free_out[v] = false;
            if self.opts.two_opt {
                two_opt(self.instance, dc, &mut stops);
            }
            let deliveries: Vec<f64> = stops
                .iter()
                .map(|&i| self.instance.retailers[i].demand_mean / f64::from(n))
                .collect();
            let mut loads = vec![0.0; stops.len() + 1];
            for j in (0..stops.len()).rev() {
                loads[j] = loads[j + 1] + deliveries[j];
            }
            self.plan.tours.push(Tour {
                dc,
                vehicle: v,
                retailers: stops,
                loads,
            });
        }
        self.plan.orders.push(DcOrder { dc, n, q, inbound });
        self.plan.open_dcs.push(dc);
        self.next += 1;
    }

    pub fn finish(mut self) -> Plan {
        debug_assert!(self.current_dc().is_none());
        self.plan.open_dcs.sort_unstable();
        self.plan.unserved.sort_unstable();
        self.plan
    }
}

fn tour_length(instance: &Instance, dc: usize, stops: &[usize]) -> f64 {
    let mut prev = Node::Dc(dc);
    let mut total = 0.0;
    for &i in stops {
        total += instance.distance(prev, Node::Retailer(i));
        prev = Node::Retailer(i);
    }
    total + instance.distance(prev, Node::Dc(dc))
}

/// First-improvement 2-opt on a single tour anchored at its DC.
fn two_opt(instance: &Instance, dc: usize, stops: &mut [usize]) {
    if stops.len() < 3 {
        return;
    }
    let mut best = tour_length(instance, dc, stops);
    let mut improved = true;
    while improved {
        improved = false;
        for a in 0..stops.len() - 1 {
            for b in a + 1..stops.len() {
                stops[a..=b].reverse();
                let len = tour_length(instance, dc, stops);
                if len + 1e-12 < best {
                    best = len;
                    improved = true;
                } else {
                    stops[a..=b].reverse();
                }
            }
        }
    }
}

/// Re-derives the network constraints from a plan; returns the first violation.
pub fn validate_plan(plan: &Plan, instance: &Instance) -> Result<(), String> {
    let n_ret = instance.retailers.len();
    if plan.assignment.len() != n_ret {
        return Err("assignment length differs from retailer count".into());
    }
    let mut in_used = vec![false; instance.vehicles_in.len()];
    let mut out_used = vec![false; instance.vehicles_out.len()];
    let mut visited = vec![0usize; n_ret];
    let mut served_demand = vec![0.0; instance.dcs.len()];

    for (i, dc) in plan.assignment.iter().enumerate() {
        if let Some(k) = dc {
            if !plan.open_dcs.contains(k) {
                return Err(format!("retailer {i} assigned to closed DC {k}"));
            }
            served_demand[*k] += instance.retailers[i].demand_mean;
        }
    }
    for (k, &d) in served_demand.iter().enumerate() {
        if d > instance.dcs[k].capacity * (1.0 + 1e-9) {
            return Err(format!("DC {k} capacity exceeded"));
        }
    }
    for order in &plan.orders {
        if order.n == 0 || order.q <= 0.0 {
            return Err(format!("DC {} has non-positive policy", order.dc));
        }
        if order.inbound.is_empty() {
            return Err(format!("open DC {} has no inbound vehicle", order.dc));
        }
        let mut total = 0.0;
        for trip in &order.inbound {
            if std::mem::replace(&mut in_used[trip.vehicle], true) {
                return Err(format!("inbound vehicle {} used twice", trip.vehicle));
            }
            if trip.load > instance.vehicles_in[trip.vehicle].capacity * (1.0 + 1e-9) {
                return Err(format!("inbound vehicle {} overloaded", trip.vehicle));
            }
            total += trip.load;
        }
        if (total - order.q).abs() > 1e-9 * order.q.max(1.0) {
            return Err(format!("DC {} inbound loads do not sum to q", order.dc));
        }
        let received = order.q * f64::from(order.n);
        if (received - served_demand[order.dc]).abs() > 1e-9 * received.max(1.0) {
            return Err(format!("DC {} n*q differs from assigned demand", order.dc));
        }
    }
    for tour in &plan.tours {
        let Some(order) = plan.order_for(tour.dc) else {
            return Err(format!("tour from closed DC {}", tour.dc));
        };
        if std::mem::replace(&mut out_used[tour.vehicle], true) {
            return Err(format!("outbound vehicle {} used twice", tour.vehicle));
        }
        if tour.retailers.is_empty() || tour.loads.len() != tour.retailers.len() + 1 {
            return Err(format!("malformed tour of vehicle {}", tour.vehicle));
        }
        let cap = instance.vehicles_out[tour.vehicle].capacity;
        for (j, &i) in tour.retailers.iter().enumerate() {
            if plan.assignment[i] != Some(tour.dc) {
                return Err(format!("retailer {i} visited from DC {} it is not assigned to", tour.dc));
            }
            visited[i] += 1;
            let drop = tour.loads[j] - tour.loads[j + 1];
            let expected = instance.retailers[i].demand_mean / f64::from(order.n);
            if (drop - expected).abs() > 1e-9 * expected.max(1.0) {
                return Err(format!("load drop at retailer {i} is {drop}, expected {expected}"));
            }
        }
        if tour.loads.iter().any(|&l| l > cap * (1.0 + 1e-9) || l < -1e-9) {
            return Err(format!("outbound vehicle {} overloaded", tour.vehicle));
        }
        if tour.loads.last().copied().unwrap_or(0.0).abs() > 1e-9 {
            return Err(format!("vehicle {} returns loaded", tour.vehicle));
        }
    }
    for (i, dc) in plan.assignment.iter().enumerate() {
        let expected = usize::from(dc.is_some());
        if visited[i] != expected {
            return Err(format!("retailer {i} visited {} times", visited[i]));
        }
    }
    let missing = plan.assignment.iter().filter(|a| a.is_none()).count();
    if missing != plan.missing_retailers() {
        return Err("unassigned/unserved lists disagree with assignment".into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{DcSite, Point, Retailer, Vehicle, Weights, SCHEMA_VERSION};

    fn vehicle(capacity: f64) -> Vehicle {
        Vehicle {
            capacity,
            fixed_cost: 50.0,
            fuel_empty: 0.1,
            fuel_full: 0.3,
            emission_factor: 2.6,
        }
    }

    fn dc(capacity: f64, x: f64) -> DcSite {
        DcSite {
            coord: Point::new(x, 0.0),
            fixed_cost: 700.0,
            inbound_fixed_cost: 12.0,
            order_cost: 12.0,
            supply_cost: 7.0,
            lead_time: 8.0,
            holding_cost: 7.0,
            capacity,
            emission_weight: 1.0,
        }
    }

    /// Two DCs of capacity 1000, retailers with demands 300/700/400/600 and
    /// three vehicles of capacity 300 in each layer.
    pub(crate) fn walkthrough_instance() -> Instance {
        let demands = [300.0, 700.0, 400.0, 600.0];
        Instance {
            schema: SCHEMA_VERSION,
            dcs: vec![dc(1000.0, 10.0), dc(1000.0, 90.0)],
            retailers: demands
                .iter()
                .enumerate()
                .map(|(i, &d)| Retailer {
                    coord: Point::new(20.0 * i as f64, 30.0),
                    demand_mean: d,
                    demand_var: 50.0,
                })
                .collect(),
            vehicles_in: vec![vehicle(300.0); 3],
            vehicles_out: vec![vehicle(300.0); 3],
            supplier: Point::new(50.0, 80.0),
            weights: Weights {
                beta: 1.0,
                theta: 1.0,
                alpha: 0.95,
                big_m: 4000.0,
                ship_rate: 1.0,
            },
            seed: 0,
        }
    }

    #[test]
    fn priority_order_examples() {
        assert_eq!(priority_order(&[0.8, 0.3]), vec![1, 0]);
        assert_eq!(priority_order(&[0.1, 0.1]), vec![0, 1]);
    }

    #[test]
    fn walkthrough_assignment() {
        let inst = walkthrough_instance();
        // Retailers [3,4,1,2] and DCs [2,1] in one-based labels.
        let a = assign_retailers(&[2, 3, 0, 1], &[1, 0], &inst);
        assert_eq!(a.dc_of, vec![Some(0), Some(0), Some(1), Some(1)]);
        assert!(a.unassigned.is_empty());

        let b = assign_retailers(&[2, 0, 1, 3], &[1, 0], &inst);
        assert_eq!(b.dc_of, vec![Some(1), Some(0), Some(1), None]);
        assert_eq!(b.unassigned, vec![3]);
    }

    #[test]
    fn single_retailer_goes_to_first_dc() {
        let inst = walkthrough_instance();
        let mut one = inst.clone();
        one.retailers.truncate(1);
        let a = assign_retailers(&[0], &[1, 0], &one);
        assert_eq!(a.dc_of, vec![Some(1)]);
    }

    #[test]
    fn vehicle_table_walkthrough() {
        let table = vehicle_count_table(1000.0, &[300.0, 300.0, 300.0], 6);
        assert_eq!(table, vec![None, Some(2), Some(2), Some(1), Some(1), Some(1)]);
    }

    #[test]
    fn walkthrough_vehicle_allocation() {
        let inst = walkthrough_instance();
        let prio = Priorities {
            dc: vec![1, 0],
            retailer: vec![2, 3, 0, 1],
            inbound: vec![2, 1, 0],
            outbound: vec![2, 1, 0],
        };
        let opts = DecodeOptions::new(6);
        let mut b = PlanBuilder::new(&inst, &opts, &prio);
        assert_eq!(b.current_dc(), Some(1));
        b.commit(Some(2));
        assert_eq!(b.current_dc(), Some(0));
        // One vehicle of 300 is left per layer, so DC 1 (1000 units) needs n >= 4.
        assert_eq!(b.feasible_frequencies(), vec![4, 5, 6]);
        b.commit(Some(4));
        let plan = b.finish();
        validate_plan(&plan, &inst).unwrap();
        assert!(plan.is_feasible());
        let dc2 = plan.order_for(1).unwrap();
        assert_eq!(dc2.q, 500.0);
        assert_eq!(
            dc2.inbound,
            vec![
                InboundTrip { vehicle: 2, load: 300.0 },
                InboundTrip { vehicle: 1, load: 200.0 }
            ]
        );
        let dc1 = plan.order_for(0).unwrap();
        assert_eq!(dc1.inbound, vec![InboundTrip { vehicle: 0, load: 250.0 }]);
    }

    #[test]
    fn deterministic_decode() {
        let inst = walkthrough_instance();
        let keys = vec![0.6, 0.2, 0.7, 0.9, 0.1, 0.3, 0.5, 0.4, 0.8, 0.15, 0.25, 0.35];
        let c = Chromosome::new(keys, inst.size()).unwrap();
        let opts = DecodeOptions::new(6);
        assert_eq!(decode(&c, &inst, &opts), decode(&c, &inst, &opts));
    }

    #[test]
    fn penalty_counts_missing_retailers() {
        let inst = walkthrough_instance();
        let prio = Priorities {
            dc: vec![1, 0],
            retailer: vec![2, 0, 1, 3],
            inbound: vec![0, 1, 2],
            outbound: vec![0, 1, 2],
        };
        let mut b = PlanBuilder::new(&inst, &DecodeOptions::new(6), &prio);
        while b.current_dc().is_some() {
            let n = b.feasible_frequencies().first().copied();
            b.commit(n);
        }
        let plan = b.finish();
        assert_eq!(plan.unassigned, vec![3]);
        assert_eq!(penalty(&plan, 1e6), (1e6, 1e6));
        validate_plan(&plan, &inst).unwrap();
    }

    #[test]
    fn unique_plan_for_singleton_instance() {
        let mut inst = walkthrough_instance();
        inst.dcs.truncate(1);
        inst.retailers.truncate(1);
        inst.vehicles_in.truncate(1);
        inst.vehicles_out.truncate(1);
        inst.vehicles_in[0].capacity = 1e4;
        inst.vehicles_out[0].capacity = 1e4;
        let c = Chromosome::new(vec![0.5; 4], inst.size()).unwrap();
        let plan = decode(&c, &inst, &DecodeOptions::new(1));
        assert!(plan.is_feasible());
        assert_eq!(plan.orders[0].n, 1);
        assert_eq!(plan.tours[0].loads, vec![300.0, 0.0]);
        validate_plan(&plan, &inst).unwrap();
    }

    #[test]
    fn chromosome_validation() {
        let size = SizeSpec::new(1, 1, 1, 1);
        assert!(Chromosome::new(vec![0.5; 4], size).is_ok());
        assert_eq!(
            Chromosome::new(vec![0.5; 3], size),
            Err(DecodeError::Length { expected: 4, got: 3 })
        );
        assert!(matches!(
            Chromosome::new(vec![0.5, 1.0, 0.5, 0.5], size),
            Err(DecodeError::KeyRange { index: 1, .. })
        ));
    }

    #[test]
    fn frequency_index_covers_range() {
        for stripes in 1..4 {
            for len in 1..6 {
                let mut seen = vec![false; len];
                for step in 1..1000 {
                    let idx = frequency_index(step as f64 / 1000.0, len, stripes);
                    seen[idx] = true;
                }
                assert!(seen.iter().all(|&s| s));
            }
        }
        // Two DCs: the earlier-ranked one (smaller key) can still take the
        // larger frequency.
        assert_eq!(frequency_index(0.45, 4, 2), 3);
        assert_eq!(frequency_index(0.55, 4, 2), 0);
    }
}
