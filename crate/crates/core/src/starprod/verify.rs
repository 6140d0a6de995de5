//! Checks of the characterizing identities of `∗ᵤ`, reported per identity.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{CMatrix, GaussianRational, MatrixJet};
use crate::geometry::{Chart, ConnectionData};
use crate::report::{series_difference, CheckRecord, Discrepancy, Report};
use crate::tensors::{
    c_from_graphs, delta_tensor, e_from_calabi, fock_invert, g_tensors, lift_c, lift_e, rank, CBounds, EBounds,
    FockOperator, IndexedTensor, TensorContext, Variance,
};

use super::random::{random_section, SectionSpec, Variables};
use super::{GraphProduct, Oracle, ScalarStar, Section, StarError};

/// Parameters of [`verify_suite`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SuiteOptions {
    pub seed: u64,
    /// ν-order `R` through which products are compared.
    pub order: i32,
    /// Random inputs per identity.
    pub cases: usize,
    pub spec: SectionSpec,
    /// Ranks of the inversion check.
    pub inversion_rank: u32,
}

impl SuiteOptions {
    pub fn new(seed: u64, order: i32) -> Self {
        SuiteOptions { seed, order, cases: 4, spec: SectionSpec::default(), inversion_rank: 1 }
    }
}

type Product<'a> = &'a (dyn Fn(&Section, &Section) -> Result<Section, StarError> + Sync);

/// The two constructions of `∗ᵤ` on one chart.
pub struct Routes {
    pub graph: GraphProduct,
    pub oracle: Oracle,
}

impl Routes {
    pub fn new(chart: &Chart, order: i32) -> Result<Self, StarError> {
        Ok(Routes { graph: GraphProduct::new(chart, order)?, oracle: Oracle::new(chart, order)? })
    }
}

/// First disagreement of two results through `ν^through`, or a note when
/// either result is not determined that far.
pub fn compare(lhs: &Section, rhs: &Section, through: i32) -> Option<Discrepancy> {
    for s in [lhs, rhs] {
        if let Some(mx) = s.max_order() {
            if mx < through {
                return Some(Discrepancy::note(format!("result is determined only through ν^{mx}")));
            }
        }
        for (o, c) in s.iter() {
            if let Some(a) = c.accuracy() {
                if a < 0 {
                    return Some(Discrepancy::note(format!("jet accuracy exhausted at ν^{o}")));
                }
            }
        }
    }
    series_difference(&lhs.truncate(through), &rhs.truncate(through))
}

fn rng(seed: u64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn sections(chart: &Chart, rng: &mut ChaCha8Rng, spec: &SectionSpec, vars: Variables) -> Section {
    random_section(rng, chart.m(), chart.d(), spec, vars)
}

/// The first failing case, labelled by its number.
fn first_failure(
    cases: usize,
    mut case: impl FnMut(usize) -> Result<Option<Discrepancy>, StarError>,
) -> Result<Option<Discrepancy>, StarError> {
    for i in 0..cases {
        if let Some(d) = case(i)? {
            return Ok(Some(d.with_index(format!("case {i}"))));
        }
    }
    Ok(None)
}

/// `graph = oracle` on random pairs.
pub fn check_routes(chart: &Chart, routes: &Routes, opts: &SuiteOptions) -> Result<CheckRecord, StarError> {
    let mut r = rng(opts.seed, 1);
    let d = first_failure(opts.cases, |_| {
        let f = sections(chart, &mut r, &opts.spec, Variables::All);
        let g = sections(chart, &mut r, &opts.spec, Variables::All);
        Ok(compare(&routes.graph.mul(&f, &g)?, &routes.oracle.mul(&f, &g)?, opts.order))
    })?;
    Ok(record("route_equivalence", d, opts))
}

/// `(f ∗ g) ∗ h = f ∗ (g ∗ h)` on random triples.
pub fn check_associativity(name: &str, chart: &Chart, mul: Product, opts: &SuiteOptions) -> Result<CheckRecord, StarError> {
    let mut r = rng(opts.seed, 2);
    let d = first_failure(opts.cases, |_| {
        let f = sections(chart, &mut r, &opts.spec, Variables::All);
        let g = sections(chart, &mut r, &opts.spec, Variables::All);
        let h = sections(chart, &mut r, &opts.spec, Variables::All);
        let left = mul(&mul(&f, &g)?, &h)?;
        let right = mul(&f, &mul(&g, &h)?)?;
        Ok(compare(&left, &right, opts.order))
    })?;
    Ok(record(name, d, opts))
}

/// `1 ∗ f = f ∗ 1 = f`.
pub fn check_unit(name: &str, chart: &Chart, mul: Product, opts: &SuiteOptions) -> Result<CheckRecord, StarError> {
    let mut r = rng(opts.seed, 3);
    let one = Section::constant(chart.identity());
    let d = first_failure(opts.cases, |_| {
        let f = sections(chart, &mut r, &opts.spec, Variables::All);
        Ok(compare(&mul(&one, &f)?, &f, opts.order).or(compare(&mul(&f, &one)?, &f, opts.order)))
    })?;
    Ok(record(name, d, opts))
}

/// `f ∗ g = f g` for holomorphic `f`, and for `g = u a ũ` with
/// antiholomorphic `a`.
pub fn check_separation(name: &str, chart: &Chart, mul: Product, opts: &SuiteOptions) -> Result<CheckRecord, StarError> {
    let mut r = rng(opts.seed, 4);
    let (u, ut) = (&chart.data.u, &chart.u_inv);
    let d = first_failure(opts.cases, |_| {
        let f = sections(chart, &mut r, &opts.spec, Variables::Holomorphic);
        let g = sections(chart, &mut r, &opts.spec, Variables::All);
        if let Some(d) = compare(&mul(&f, &g)?, &f.mul(&g), opts.order) {
            return Ok(Some(d));
        }
        let f = sections(chart, &mut r, &opts.spec, Variables::All);
        let a = sections(chart, &mut r, &opts.spec, Variables::Antiholomorphic);
        let g = a.map_same(|x| &(u * x) * ut);
        Ok(compare(&mul(&f, &g)?, &f.mul(&g), opts.order))
    })?;
    Ok(record(name, d, opts))
}

/// `ψ⁻¹(ψ(f)) = f`.
pub fn check_psi(chart: &Chart, oracle: &Oracle, opts: &SuiteOptions) -> Result<CheckRecord, StarError> {
    let mut r = rng(opts.seed, 5);
    let d = first_failure(opts.cases, |_| {
        let f = sections(chart, &mut r, &opts.spec, Variables::All);
        Ok(compare(&oracle.psi_inverse(&oracle.psi(&f)?)?, &f, opts.order))
    })?;
    Ok(record("psi_round_trip", d, opts))
}

/// `C_r^{L̄K} = 0` unless `|L|, |K| ≤ r`.
pub fn check_naturality(c: &IndexedTensor, opts: &SuiteOptions) -> CheckRecord {
    let mut d = None;
    'outer: for ((l, k), v) in c.iter() {
        for (s, x) in v.iter() {
            if !x.is_zero() && (rank(l) as i32 > s || rank(k) as i32 > s) {
                d = Some(Discrepancy {
                    nu_order: Some(s),
                    index: Some(format!("L={l:?} K={k:?}")),
                    entry: None,
                    monomial: None,
                    lhs: "nonzero".into(),
                    rhs: "0".into(),
                });
                break 'outer;
            }
        }
    }
    record("naturality", d, opts)
}

/// First disagreement of two tensors on the kept index pairs.
pub fn tensor_difference(a: &IndexedTensor, b: &IndexedTensor, keep: impl Fn(&[u32], &[u32]) -> bool) -> Option<Discrepancy> {
    let ((x, y), s) = a.first_difference(b, keep)?;
    let p = a.coeff(&x, &y, s).unwrap_or_else(|_| a.zero_entry().template().clone());
    let q = b.coeff(&x, &y, s).unwrap_or_else(|_| b.zero_entry().template().clone());
    let index = Some(format!("{x:?} {y:?}"));
    Some(match p.first_difference(&q) {
        Some((i, j, e, l, r)) => Discrepancy {
            nu_order: Some(s),
            index,
            entry: Some((i, j)),
            monomial: Some(crate::algebra::jet::format_monomial(&e)),
            lhs: l.to_string(),
            rhs: r.to_string(),
        },
        None => Discrepancy { nu_order: Some(s), index, entry: None, monomial: None, lhs: format!("{p}"), rhs: format!("{q}") },
    })
}

/// `E_{KL̄} C^{L̄I} = Δ_K^I` and `C^{L̄I} E_{IJ̄} = Δ^{L̄}_{J̄}` for ranks
/// `≤ max_rank` and ν-orders `≤ max_order`, with `E` from the Calabi
/// functions and `C` from graphs.
pub fn check_inversion(
    chart: &Chart,
    max_rank: u32,
    max_order: i32,
    c_route: impl Fn(&TensorContext, &CBounds) -> Result<IndexedTensor, StarError>,
) -> Result<Vec<CheckRecord>, StarError> {
    let wide = max_rank + max_order.max(0) as u32;
    let c_order = max_order + max_rank as i32;
    let ctx = TensorContext::for_degree(chart, c_order)?;
    let keep = |a: &[u32], b: &[u32]| rank(a) <= max_rank && rank(b) <= max_rank;
    let (m, d, n) = (chart.m(), chart.d(), chart.nvars());

    let c = c_route(&ctx, &CBounds { max_order: c_order, max_l: Some(wide), max_k: Some(max_rank) })?;
    let e = e_from_calabi(chart, &EBounds { max_k: max_rank, max_l: wide, max_order })?;
    let left = e.contract(&c)?.truncate(max_order);
    let delta = delta_tensor(Variance::Mixed, m, d, n, max_rank);
    let first = tensor_difference(&left, &delta, keep);

    let c = c_route(&ctx, &CBounds { max_order: c_order, max_l: Some(max_rank), max_k: Some(wide) })?;
    let e = e_from_calabi(chart, &EBounds { max_k: wide, max_l: max_rank, max_order })?;
    let right = c.contract(&e)?.truncate(max_order);
    let delta_bar = delta_tensor(Variance::MixedBar, m, d, n, max_rank);
    let second = tensor_difference(&right, &delta_bar, keep);

    let tag = |r: CheckRecord| r.param("rank", max_rank).param("order", max_order);
    Ok(vec![tag(CheckRecord::new("inversion_EC", first)), tag(CheckRecord::new("inversion_CE", second))])
}

/// `C_K^I` from graphs equals the Fock-space inverse of `E_K^I` for
/// `|K| ≤ max_rank` through `ν^max_order`.
pub fn check_inverse_operator(chart: &Chart, max_rank: u32, max_order: i32) -> Result<CheckRecord, StarError> {
    let reach = max_rank + max_order.max(0) as u32;
    let (gl, gu) = g_tensors(chart, reach + max_order.max(0) as u32);
    let e = e_from_calabi(chart, &EBounds { max_k: reach, max_l: reach + max_order as u32, max_order })?;
    let e_op = FockOperator::new(lift_e(&e, &gu)?.truncate(max_order), 0)?;
    let inv = fock_invert(&e_op, max_order, max_rank)?;
    let ctx = TensorContext::for_degree(chart, max_order + max_rank as i32)?;
    let c = c_from_graphs(&ctx, &CBounds { max_order: max_order + max_rank as i32, max_l: Some(max_rank), max_k: None })?;
    let lifted = lift_c(&c, &gl)?.truncate(max_order);
    let d = tensor_difference(&inv.tensor, &lifted, |k, _| rank(k) <= max_rank);
    Ok(CheckRecord::new("inverse_operator", d).param("rank", max_rank).param("order", max_order))
}

/// The chart with `u` replaced by its value at the origin.
fn frozen_chart(chart: &Chart) -> Result<Chart, StarError> {
    let mut data = chart.data.clone();
    data.u = MatrixJet::constant(&chart.data.u.value_at_origin()?, chart.nvars());
    Ok(Chart::new(data)?)
}

/// For constant `u` both routes reduce to the entrywise scalar product.
pub fn check_constant_u(chart: &Chart, opts: &SuiteOptions) -> Result<CheckRecord, StarError> {
    let frozen = frozen_chart(chart)?;
    let graph = GraphProduct::new(&frozen, opts.order)?;
    let oracle = Oracle::new(&frozen, opts.order)?;
    let scalar = &oracle.star;
    let mut r = rng(opts.seed, 6);
    let d = first_failure(opts.cases, |_| {
        let f = sections(&frozen, &mut r, &opts.spec, Variables::All);
        let g = sections(&frozen, &mut r, &opts.spec, Variables::All);
        let s = scalar.star(&f, &g)?;
        Ok(compare(&graph.mul(&f, &g)?, &s, opts.order).or(compare(&oracle.mul(&f, &g)?, &s, opts.order)))
    })?;
    Ok(record("constant_u", d, opts))
}

/// A constant frame change `S`: `u ↦ S u S†`, `f ↦ S f S⁻¹`.
fn frame_change(d: usize) -> CMatrix {
    let mut s = CMatrix::identity(d);
    s.data[0] = GaussianRational::from_int(2);
    if d > 1 {
        s.data[1] = GaussianRational::i();
        s.data[d] = GaussianRational::from_int(-1);
    }
    s
}

/// Products computed in two trivializations related by a constant frame
/// change agree.
pub fn check_trivializations(chart: &Chart, routes: &Routes, opts: &SuiteOptions) -> Result<CheckRecord, StarError> {
    let (d, n) = (chart.d(), chart.nvars());
    let s = frame_change(d);
    let s_inv = s.inverse()?;
    let (sj, sj_inv) = (MatrixJet::constant(&s, n), MatrixJet::constant(&s_inv, n));
    let sj_adj = MatrixJet::constant(&s.adjoint(), n);
    let mut data = chart.data.clone();
    data.u = &(&sj * &chart.data.u) * &sj_adj;
    let other = Chart::new(data)?;
    let graph = GraphProduct::new(&other, opts.order)?;
    let oracle = Oracle::new(&other, opts.order)?;
    let conj = |x: &Section| x.map_same(|y| &(&sj * y) * &sj_inv);
    let mut r = rng(opts.seed, 7);
    let dd = first_failure(opts.cases, |_| {
        let f = sections(chart, &mut r, &opts.spec, Variables::All);
        let g = sections(chart, &mut r, &opts.spec, Variables::All);
        let want = conj(&routes.graph.mul(&f, &g)?);
        let (f2, g2) = (conj(&f), conj(&g));
        Ok(compare(&graph.mul(&f2, &g2)?, &want, opts.order).or(compare(&oracle.mul(&f2, &g2)?, &want, opts.order)))
    })?;
    Ok(record("trivialization_change", dd, opts))
}

fn record(name: &str, d: Option<Discrepancy>, opts: &SuiteOptions) -> CheckRecord {
    CheckRecord::new(name, d).param("seed", opts.seed).param("order", opts.order).param("cases", opts.cases)
}

/// `∂_kΦ` as a ν-series of scalar matrices.
fn potential_derivative(chart: &Chart, var: usize) -> Section {
    let d = chart.d();
    chart.potential.map(&MatrixJet::zero(d, chart.nvars()), |p| MatrixJet::scalar(d, &p.derive(var)))
}

/// `(∂_kΦ + Γ_k) ∗ᵤ g = ∂_k g + (∂_kΦ) g + g Γ_k` on both routes, and the
/// scalar identities `(∂_kΦ) ∗ f = (∂_kΦ) f + ∂_k f`,
/// `f ∗ (∂_l̄Φ) = (∂_l̄Φ) f + ∂_l̄ f`, through `ν^order`.
pub fn verify_left_mult(chart: &Chart, order: i32, seed: u64, cases: usize) -> Result<Report, StarError> {
    let routes = Routes::new(chart, order + 1)?;
    let conn = ConnectionData::new(chart);
    let opts = SuiteOptions { cases, ..SuiteOptions::new(seed, order) };
    let mut report = Report::default();
    for k in 0..chart.m() {
        let f = potential_derivative(chart, chart.hol(k)).add(&Section::constant(conn.christoffel[k].clone()));
        let mut r = rng(seed, 8 + k as u64);
        let mut one_route = |name: &str, mul: Product| -> Result<(), StarError> {
            let mut r2 = r.clone();
            let d = first_failure(cases, |i| {
                let g = if i == 0 { Section::constant(chart.identity()) } else { sections(chart, &mut r2, &opts.spec, Variables::All) };
                let rhs = g
                    .map_same(|x| x.derive(chart.hol(k)))
                    .add(&f.sub(&Section::constant(conn.christoffel[k].clone())).mul(&g))
                    .add(&g.right_mul(&conn.christoffel[k]));
                Ok(compare(&mul(&f, &g)?, &rhs, order))
            })?;
            report.push(record(name, d, &opts).param("k", k));
            Ok(())
        };
        one_route("left_mult_graph", &|a, b| routes.graph.mul(a, b))?;
        one_route("left_mult_oracle", &|a, b| routes.oracle.mul(a, b))?;

        let scalar = &routes.oracle.star;
        let sc = chart.scalar_chart()?;
        let phi_k = potential_derivative(&sc, sc.hol(k));
        let phi_l = potential_derivative(&sc, sc.antihol(k));
        let mut dk = None;
        let mut dl = None;
        for i in 0..cases {
            let g = random_section(&mut r, sc.m(), 1, &opts.spec, Variables::All);
            let lhs = scalar.star(&phi_k, &g)?;
            let rhs = phi_k.mul(&g).add(&g.map_same(|x| x.derive(sc.hol(k))));
            dk = dk.or(compare(&lhs, &rhs, order).map(|x| x.with_index(format!("case {i}"))));
            let lhs = scalar.star(&g, &phi_l)?;
            let rhs = phi_l.mul(&g).add(&g.map_same(|x| x.derive(sc.antihol(k))));
            dl = dl.or(compare(&lhs, &rhs, order).map(|x| x.with_index(format!("case {i}"))));
        }
        report.push(record("scalar_left_potential", dk, &opts).param("k", k));
        report.push(record("scalar_right_potential", dl, &opts).param("l", k));
    }
    Ok(report)
}

/// For a line bundle, `∗ᵤ` equals the scalar product of the potential
/// `Φ + log u`.
pub fn verify_twisted(chart: &Chart, order: i32, seed: u64, cases: usize) -> Result<Report, StarError> {
    if chart.d() != 1 {
        return Err(StarError::NotLineBundle(chart.d()));
    }
    let u = chart.data.u.entry(0, 0);
    let u0 = u.value_at_origin()?;
    let log_u = u.scale(&u0.recip()?).log(chart.accuracy())?;
    let mut data = chart.data.clone();
    let phi0 = data.potentials.get(&0).cloned().unwrap_or_else(|| crate::algebra::Jet::zero(chart.nvars()));
    data.potentials.insert(0, &phi0 + &log_u);
    data.u = MatrixJet::identity(1, chart.nvars());
    let twisted = ScalarStar::new(&Chart::new(data)?, order)?;
    let routes = Routes::new(chart, order)?;
    let opts = SuiteOptions { cases, ..SuiteOptions::new(seed, order) };
    let mut r = rng(seed, 9);
    let d = first_failure(cases, |_| {
        let f = sections(chart, &mut r, &opts.spec, Variables::All);
        let g = sections(chart, &mut r, &opts.spec, Variables::All);
        let want = twisted.star(&f, &g)?;
        Ok(compare(&routes.oracle.mul(&f, &g)?, &want, order).or(compare(&routes.graph.mul(&f, &g)?, &want, order)))
    })?;
    let mut report = Report::default();
    report.push(record("line_bundle_twist", d, &opts));
    Ok(report)
}

/// Every identity on one chart: route equivalence, associativity, unit,
/// separation of variables, `ψ` round trip, naturality, inversion, the
/// inverse operator, constant-`u` degeneration, frame changes and the
/// left-multiplication identities.
pub fn verify_suite(chart: &Chart, opts: &SuiteOptions) -> Result<Report, StarError> {
    super::check_headroom(chart, opts.order, opts.spec.max_degree)?;
    let routes = Routes::new(chart, opts.order)?;
    let graph: Product = &|a, b| routes.graph.mul(a, b);
    let oracle: Product = &|a, b| routes.oracle.mul(a, b);
    let mut report = Report::default();
    report.push(check_routes(chart, &routes, opts)?);
    report.push(check_associativity("associativity_graph", chart, graph, opts)?);
    report.push(check_associativity("associativity_oracle", chart, oracle, opts)?);
    report.push(check_unit("unit_graph", chart, graph, opts)?);
    report.push(check_unit("unit_oracle", chart, oracle, opts)?);
    report.push(check_separation("separation_graph", chart, graph, opts)?);
    report.push(check_separation("separation_oracle", chart, oracle, opts)?);
    report.push(check_psi(chart, &routes.oracle, opts)?);
    report.push(check_naturality(&routes.graph.c, opts));
    for r in check_inversion(chart, opts.inversion_rank, opts.order, |ctx, b| Ok(c_from_graphs(ctx, b)?))? {
        report.push(r);
    }
    report.push(check_inverse_operator(chart, opts.inversion_rank, opts.order)?);
    report.push(check_constant_u(chart, opts)?);
    report.push(check_trivializations(chart, &routes, opts)?);
    report.extend(verify_left_mult(chart, opts.order, opts.seed, opts.cases)?);
    if chart.d() == 1 {
        report.extend(verify_twisted(chart, opts.order, opts.seed, opts.cases)?);
    }
    Ok(report.sorted())
}
