//! Exhaustive verification suites. Each suite walks every `(n, chi)` up to a
//! size limit and reports one check per instance family, with any
//! counterexamples spelled out in full.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde_json::json;

use crate::cumulants::{free_cumulant, index_words, is_combinatorially_bifree_upto, LrCumulants, PchiCache};
use crate::deque::{
    chi_opposite, combined_standings, pchi_by_enumeration, pchi_by_sigma, sigma_chi, simulate, tau_u,
    ChiWord, DequeScenario, Side,
};
use crate::error::{invalid, Error, Result};
use crate::exec::{self, Execution};
use crate::fock::{
    bimixture_symbol, c_word, canonical_operator, format_index_word, scenario_vector, scenario_vector_by_expr,
    moment_via_pchi_cached, reverse_bimixture_product, vacuum_expectation, CanonicalElem, CoefficientSource,
    FockEngine, RationalTable, SymbolicTable,
};
use crate::lukasiewicz::{enumerate_luk, psi, LukPath};
use crate::partitions::{
    act, catalan, enumerate_noncrossing, enumerate_partitions, leq, meet, opposite, Partition, Permutation,
};
use crate::poly::{PolyScalar, SymbolId};
use crate::report::{Check, RunReport};
use crate::cumulants::MomentFunctional;
use crate::scalar::Scalar;

/// Largest `n` accepted by the partition suites.
pub const MAX_COMBINATORIAL_N: usize = 8;
/// Largest `n` accepted by the operator suites.
pub const MAX_FOCK_N: usize = 7;
/// Largest alphabet accepted by the operator suites.
pub const MAX_D: usize = 6;

/// Counterexamples kept per check.
const MAX_SHOWN: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suite {
    PchiRoutes,
    Standings,
    SigmaTransport,
    Opposites,
    PchiLattice,
    ScenarioProducts,
    MomentSum,
    Cumulants,
    LrlrMoment,
    LrlrCumulant,
    Bifree,
}

impl Suite {
    pub const ALL: [Suite; 11] = [
        Suite::PchiRoutes,
        Suite::Standings,
        Suite::SigmaTransport,
        Suite::Opposites,
        Suite::PchiLattice,
        Suite::ScenarioProducts,
        Suite::MomentSum,
        Suite::Cumulants,
        Suite::LrlrMoment,
        Suite::LrlrCumulant,
        Suite::Bifree,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::PchiRoutes => "thm49",
            Suite::Standings => "prop46",
            Suite::SigmaTransport => "lemma48",
            Suite::Opposites => "prop413",
            Suite::PchiLattice => "cor410",
            Suite::ScenarioProducts => "lemma67",
            Suite::MomentSum => "prop610",
            Suite::Cumulants => "thm65",
            Suite::LrlrMoment => "eq12x",
            Suite::LrlrCumulant => "eq12y",
            Suite::Bifree => "bifree",
        }
    }

    /// Whether the suite runs on the operator model (as opposed to pure
    /// partition combinatorics).
    pub fn uses_operators(self) -> bool {
        matches!(
            self,
            Suite::ScenarioProducts | Suite::MomentSum | Suite::Cumulants | Suite::LrlrMoment | Suite::LrlrCumulant | Suite::Bifree
        )
    }

    pub fn default_max_n(self) -> usize {
        if self.uses_operators() {
            4
        } else {
            6
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
                Error::InvalidArgument(format!("unknown suite {s:?}; expected one of {}", names.join(", ")))
            })
    }
}

/// Where operator-suite coefficients come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoefficientMode {
    /// Independent formal symbols.
    Symbolic,
    /// Seeded random rationals.
    Random { seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SuiteConfig {
    pub max_n: usize,
    pub d: usize,
    pub mode: CoefficientMode,
    pub exec: Execution,
}

impl SuiteConfig {
    pub fn new(suite: Suite) -> Self {
        SuiteConfig {
            max_n: suite.default_max_n(),
            d: 2,
            mode: CoefficientMode::Symbolic,
            exec: Execution::default(),
        }
    }
}

/// Runs one suite and returns its report.
pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Result<RunReport> {
    let start = Instant::now();
    validate(suite, cfg)?;
    let mut report = RunReport::new(format!("verify {suite}")).param("max_n", cfg.max_n);
    if suite.uses_operators() {
        report = report.param("d", cfg.d);
        report = match cfg.mode {
            CoefficientMode::Symbolic => report.param("mode", "symbolic"),
            CoefficientMode::Random { seed } => report.param("mode", "random").param("seed", seed),
        };
    }
    match suite {
        Suite::PchiRoutes => pchi_routes(cfg, &mut report)?,
        Suite::Standings => standings(cfg, &mut report)?,
        Suite::SigmaTransport => sigma_transport(cfg, &mut report)?,
        Suite::Opposites => opposites(cfg, &mut report)?,
        Suite::PchiLattice => pchi_lattice(cfg, &mut report)?,
        Suite::ScenarioProducts => with_table(cfg, |t| scenario_products(t, cfg, &mut report))?,
        Suite::MomentSum => with_table(cfg, |t| moment_sum(t, cfg, &mut report))?,
        Suite::Cumulants => with_table(cfg, |t| cumulants(t, cfg, &mut report))?,
        Suite::LrlrMoment => lrlr_moment(cfg, &mut report)?,
        Suite::LrlrCumulant => lrlr_cumulant(cfg, &mut report)?,
        Suite::Bifree => bifreeness(cfg, &mut report)?,
    }
    Ok(report.finish(start.elapsed().as_secs_f64()))
}

fn validate(suite: Suite, cfg: &SuiteConfig) -> Result<()> {
    let limit = if suite.uses_operators() { MAX_FOCK_N } else { MAX_COMBINATORIAL_N };
    if cfg.max_n == 0 || cfg.max_n > limit {
        return invalid(format!("{suite} needs 1 <= max_n <= {limit}, got {}", cfg.max_n));
    }
    if suite.uses_operators() && (cfg.d == 0 || cfg.d > MAX_D) {
        return invalid(format!("{suite} needs 1 <= d <= {MAX_D}, got {}", cfg.d));
    }
    let symbolic_only = matches!(suite, Suite::LrlrMoment | Suite::LrlrCumulant | Suite::Bifree);
    if symbolic_only && cfg.mode != CoefficientMode::Symbolic {
        return invalid(format!("{suite} is a symbolic identity; random tables are not supported"));
    }
    if suite == Suite::Bifree && cfg.max_n < 2 {
        return invalid("bifree needs max_n >= 2");
    }
    Ok(())
}

/// Counts instances and keeps the first few counterexamples of one check.
#[derive(Default)]
struct Tally {
    checked: usize,
    failed: usize,
    shown: Vec<String>,
}

impl Tally {
    fn record(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failed += 1;
            if self.shown.len() < MAX_SHOWN {
                self.shown.push(detail());
            }
        }
    }

    fn merge(&mut self, other: Tally) {
        self.checked += other.checked;
        self.failed += other.failed;
        for s in other.shown {
            if self.shown.len() < MAX_SHOWN {
                self.shown.push(s);
            }
        }
    }

    fn into_check(self, name: impl Into<String>, expected: impl Into<String>) -> (Check, usize) {
        let actual = if self.failed == 0 {
            format!("{} of {} hold", self.checked, self.checked)
        } else {
            format!(
                "{} of {} fail: {}",
                self.failed,
                self.checked,
                self.shown.join("; ")
            )
        };
        let ok = self.failed == 0 && self.checked > 0;
        let n = self.checked;
        (Check::new(name, expected, actual, ok), n)
    }
}

fn chi_instances(max_n: usize) -> Result<Vec<ChiWord>> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        out.extend(ChiWord::all(n)?);
    }
    Ok(out)
}

fn push_all(report: &mut RunReport, checks: Vec<Result<(Check, usize)>>) -> Result<()> {
    for c in checks {
        let (check, n) = c?;
        report.push(check, n);
    }
    Ok(())
}

fn chi_label(chi: &ChiWord) -> String {
    format!("n={} chi={chi}", chi.len())
}

fn pchi_routes(cfg: &SuiteConfig, report: &mut RunReport) -> Result<()> {
    for n in 1..=cfg.max_n {
        let c = catalan(n);
        let nc = enumerate_noncrossing(n)?.len();
        let luk = enumerate_luk(n)?.len();
        report.push(
            Check::new(
                format!("n={n} |NC(n)|, |Luk(n)|"),
                format!("{c}, {c}"),
                format!("{nc}, {luk}"),
                c == nc.into() && c == luk.into(),
            ),
            1,
        );
    }
    let chis = chi_instances(cfg.max_n)?;
    let checks = exec::map(cfg.exec, &chis, |chi| -> Result<(Check, usize)> {
        let by_enum = pchi_by_enumeration(chi)?;
        let by_sigma = pchi_by_sigma(chi)?;
        let c = catalan(chi.len());
        let ok = by_enum == by_sigma && c == by_enum.len().into();
        let mut actual = format!(
            "{} by enumeration, {} by sigma, {}",
            by_enum.len(),
            by_sigma.len(),
            if by_enum == by_sigma { "same set" } else { "different sets" }
        );
        if by_enum != by_sigma {
            let only_enum: Vec<String> =
                by_enum.iter().filter(|p| !by_sigma.contains(p)).map(|p| p.to_string()).collect();
            let only_sigma: Vec<String> =
                by_sigma.iter().filter(|p| !by_enum.contains(p)).map(|p| p.to_string()).collect();
            actual.push_str(&format!(
                "; only by enumeration: [{}]; only by sigma: [{}]",
                only_enum.join(", "),
                only_sigma.join(", ")
            ));
        }
        Ok((
            Check::new(chi_label(chi), format!("{c} partitions, same set"), actual, ok),
            1,
        ))
    });
    push_all(report, checks)
}

/// The combined-standings block of the last insertion time.
fn last_combined_block(path: &LukPath, chi: &ChiWord) -> Result<Vec<usize>> {
    let trace = simulate(&DequeScenario::new(path.clone(), chi.clone())?);
    let n = chi.len();
    let t_last = trace.output_blocks.last().expect("every scenario inserts at time 1");
    let mut block: Vec<usize> = chi
        .left_times()
        .iter()
        .enumerate()
        .filter(|(_, m)| t_last.contains(m))
        .map(|(q, _)| q + 1)
        .collect();
    block.extend(
        chi.right_times()
            .iter()
            .enumerate()
            .filter(|(_, m)| t_last.contains(m))
            .map(|(q, _)| n - q),
    );
    block.sort_unstable();
    Ok(block)
}

fn is_interval(block: &[usize]) -> bool {
    match (block.first(), block.last()) {
        (Some(&lo), Some(&hi)) => hi + 1 - lo == block.len(),
        _ => false,
    }
}

fn paths_by_n(max_n: usize) -> Result<Vec<Vec<LukPath>>> {
    (0..=max_n)
        .map(|n| if n == 0 { Ok(Vec::new()) } else { enumerate_luk(n) })
        .collect()
}

fn standings(cfg: &SuiteConfig, report: &mut RunReport) -> Result<()> {
    let paths = paths_by_n(cfg.max_n)?;
    let chis = chi_instances(cfg.max_n)?;
    let checks = exec::map(cfg.exec, &chis, |chi| -> Result<(Check, usize)> {
        let mut tally = Tally::default();
        for path in &paths[chi.len()] {
            let rho = combined_standings(path, chi)?;
            tally.record(rho.is_noncrossing(), || format!("path={path}: rho={rho} is crossing"));
            let block = last_combined_block(path, chi)?;
            tally.record(is_interval(&block), || {
                format!("path={path}: last-time block {block:?} is not an interval")
            });
        }
        Ok(tally.into_check(
            chi_label(chi),
            "combined standings non-crossing; last-time block an interval",
        ))
    });
    push_all(report, checks)
}

fn sigma_transport(cfg: &SuiteConfig, report: &mut RunReport) -> Result<()> {
    let paths = paths_by_n(cfg.max_n)?;
    let chis = chi_instances(cfg.max_n)?;
    let checks = exec::map(cfg.exec, &chis, |chi| -> Result<(Check, usize)> {
        let sigma = sigma_chi(chi);
        let mut tally = Tally::default();
        for path in &paths[chi.len()] {
            let pi = simulate(&DequeScenario::new(path.clone(), chi.clone())?).output_partition;
            let rho = combined_standings(path, chi)?;
            let moved = act(&sigma, &rho)?;
            tally.record(moved == pi, || {
                format!("path={path}: sigma.rho = {moved} but output partition = {pi}")
            });
            let back = psi(&pi);
            tally.record(&back == path, || format!("path={path}: psi(output partition) = {back}"));
        }
        Ok(tally.into_check(chi_label(chi), "sigma.rho = output partition; psi(output partition) = path"))
    });
    push_all(report, checks)
}

fn opposites(cfg: &SuiteConfig, report: &mut RunReport) -> Result<()> {
    for n in 1..=cfg.max_n {
        let nc = enumerate_noncrossing(n)?;
        let mut tally = Tally::default();
        for u in 0..=n {
            let tau = tau_u(n, u)?;
            let mut moved = nc.iter().map(|p| act(&tau, p)).collect::<Result<Vec<_>>>()?;
            moved.sort();
            tally.record(moved == nc, || format!("u={u}: tau_u.NC(n) != NC(n)"));
        }
        let (check, k) = tally.into_check(format!("n={n} tau_u.NC(n)"), "tau_u.NC(n) = NC(n) for every u");
        report.push(check, k);
    }
    let chis = chi_instances(cfg.max_n)?;
    let checks = exec::map(cfg.exec, &chis, |chi| -> Result<(Check, usize)> {
        let n = chi.len();
        let opp = chi_opposite(chi);
        let mut tally = Tally::default();
        let mut flipped: Vec<Partition> = pchi_by_enumeration(chi)?.iter().map(opposite).collect();
        flipped.sort();
        let direct = pchi_by_enumeration(&opp)?;
        tally.record(flipped == direct, || format!("P({opp}) differs from opposite(P({chi}))"));
        let lhs = sigma_chi(&opp);
        let rhs = Permutation::reversal(n)?.compose(&sigma_chi(chi).compose(&tau_u(n, chi.u())?)?)?;
        tally.record(lhs == rhs, || {
            format!("sigma_opp = {:?} but tau_o.sigma.tau_u = {:?}", lhs.images(), rhs.images())
        });
        Ok(tally.into_check(
            chi_label(chi),
            "P(chi_opp) = opposite(P(chi)); sigma_opp = tau_o.sigma.tau_u",
        ))
    });
    push_all(report, checks)
}

fn pchi_lattice(cfg: &SuiteConfig, report: &mut RunReport) -> Result<()> {
    let nc: Vec<Vec<Partition>> = (0..=cfg.max_n)
        .map(|n| if n == 0 { Ok(Vec::new()) } else { enumerate_noncrossing(n) })
        .collect::<Result<_>>()?;
    let chis = chi_instances(cfg.max_n)?;
    let checks = exec::map(cfg.exec, &chis, |chi| -> Result<(Check, usize)> {
        let n = chi.len();
        let pchi = pchi_by_enumeration(chi)?;
        let contains = |p: &Partition| pchi.binary_search(p).is_ok();
        let mut tally = Tally::default();
        let zero = Partition::zero(n)?;
        let one = Partition::one(n)?;
        tally.record(contains(&zero), || format!("{zero} missing"));
        tally.record(contains(&one), || format!("{one} missing"));
        for p in enumerate_partitions(n)?.iter().filter(|p| n > 1 && p.num_blocks() == n - 1) {
            tally.record(contains(p), || format!("{p} missing"));
        }
        let sigma = sigma_chi(chi);
        let images = nc[n].iter().map(|p| act(&sigma, p)).collect::<Result<Vec<_>>>()?;
        let mut sorted = images.clone();
        sorted.sort();
        tally.record(sorted == pchi, || "sigma.NC(n) is not P(chi)".to_string());
        for (a, sa) in nc[n].iter().zip(&images) {
            for (b, sb) in nc[n].iter().zip(&images) {
                let before = leq(a, b)?;
                let after = leq(sa, sb)?;
                tally.record(before == after, || {
                    format!("{a} <= {b} is {before} but {sa} <= {sb} is {after}")
                });
            }
        }
        for a in &pchi {
            for b in &pchi {
                let m = meet(a, b)?;
                tally.record(contains(&m), || format!("meet({a}, {b}) = {m} is outside P(chi)"));
            }
        }
        Ok(tally.into_check(
            chi_label(chi),
            "0_n, 1_n and all (n-1)-block partitions present; order isomorphism; closed under meets",
        ))
    });
    push_all(report, checks)
}

fn with_table<F>(cfg: &SuiteConfig, mut body: F) -> Result<()>
where
    F: FnMut(TableRef<'_>) -> Result<()>,
{
    match cfg.mode {
        CoefficientMode::Symbolic => body(TableRef::Symbolic(&SymbolicTable::new(cfg.d, cfg.max_n)?)),
        CoefficientMode::Random { seed } => {
            body(TableRef::Rational(&RationalTable::random(cfg.d, cfg.max_n, seed)?))
        }
    }
}

enum TableRef<'a> {
    Symbolic(&'a SymbolicTable),
    Rational(&'a RationalTable),
}

macro_rules! dispatch {
    ($table:expr, $f:ident ( $($arg:expr),* )) => {
        match $table {
            TableRef::Symbolic(t) => $f(t, $($arg),*),
            TableRef::Rational(t) => $f(t, $($arg),*),
        }
    };
}

fn scenario_products(table: TableRef<'_>, cfg: &SuiteConfig, report: &mut RunReport) -> Result<()> {
    dispatch!(table, scenario_products_with(cfg, report))
}

fn moment_sum(table: TableRef<'_>, cfg: &SuiteConfig, report: &mut RunReport) -> Result<()> {
    dispatch!(table, moment_sum_with(cfg, report))
}

fn cumulants(table: TableRef<'_>, cfg: &SuiteConfig, report: &mut RunReport) -> Result<()> {
    dispatch!(table, cumulants_with(cfg, report))
}

/// Index words on which both routes of the generator-level cross-check are
/// cheap enough to run.
const EXPR_ROUTE_MAX_N: usize = 4;

fn scenario_products_with<C: CoefficientSource>(table: &C, cfg: &SuiteConfig, report: &mut RunReport) -> Result<()> {
    let paths = paths_by_n(cfg.max_n)?;
    let words: Vec<Vec<Vec<usize>>> = (0..=cfg.max_n).map(|n| index_words(cfg.d, n)).collect();
    let chis = chi_instances(cfg.max_n)?;
    let checks = exec::map(cfg.exec, &chis, |chi| -> Result<(Check, usize)> {
        let n = chi.len();
        let mut tally = Tally::default();
        for path in &paths[n] {
            let pi = simulate(&DequeScenario::new(path.clone(), chi.clone())?).output_partition;
            for omega in &words[n] {
                let v = scenario_vector(path, chi, omega, table)?;
                let expected = reverse_bimixture_product(&pi, chi, omega, table)?;
                let ok = v.as_vacuum_multiple().as_ref() == Some(&expected);
                tally.record(ok, || {
                    format!(
                        "path={path} omega={}: vector {v}, expected ({expected})·vac",
                        format_index_word(omega)
                    )
                });
                if n <= EXPR_ROUTE_MAX_N {
                    let by_expr = scenario_vector_by_expr(path, chi, omega, table)?;
                    tally.record(by_expr == v, || {
                        format!(
                            "path={path} omega={}: generator route gives {by_expr}, word route {v}",
                            format_index_word(omega)
                        )
                    });
                }
            }
        }
        Ok(tally.into_check(chi_label(chi), "vector = (product of reverse bi-mixtures over output blocks)·vac"))
    });
    push_all(report, checks)
}

fn moment_sum_with<C: CoefficientSource>(table: &C, cfg: &SuiteConfig, report: &mut RunReport) -> Result<()> {
    let engine = FockEngine::new(table);
    engine.prefill(cfg.max_n, cfg.exec);
    let pchi = PchiCache::new();
    let chis = chi_instances(cfg.max_n)?;
    let checks = exec::map(cfg.exec, &chis, |chi| -> Result<(Check, usize)> {
        let mut tally = Tally::default();
        for omega in index_words(cfg.d, chi.len()) {
            let direct = engine.moment(&c_word(&omega, chi)?);
            let summed = moment_via_pchi_cached(&omega, chi, table, &pchi)?;
            tally.record(direct == summed, || {
                format!(
                    "omega={}: vacuum moment {direct}, partition sum {summed}",
                    format_index_word(&omega)
                )
            });
        }
        Ok(tally.into_check(chi_label(chi), "vacuum moment = sum over P(chi) of bi-mixture products"))
    });
    push_all(report, checks)
}

fn cumulants_with<C: CoefficientSource>(table: &C, cfg: &SuiteConfig, report: &mut RunReport) -> Result<()> {
    let engine = FockEngine::new(table);
    engine.prefill(cfg.max_n, cfg.exec);
    let eval = LrCumulants::new(&engine);
    let chis = chi_instances(cfg.max_n)?;
    let checks = exec::map(cfg.exec, &chis, |chi| -> Result<(Check, usize)> {
        let mut tally = Tally::default();
        for omega in index_words(cfg.d, chi.len()) {
            let kappa = eval.cumulant(chi, &c_word(&omega, chi)?)?;
            let symbol = bimixture_symbol(&omega, chi)?;
            let expected = table.coefficient(&symbol);
            tally.record(kappa == expected, || {
                format!(
                    "omega={}: cumulant {kappa}, bi-mixture {symbol} = {expected}",
                    format_index_word(&omega)
                )
            });
        }
        Ok(tally.into_check(chi_label(chi), "(l,r)-cumulant of the C-word = its bi-mixture"))
    });
    push_all(report, checks)
}

fn alpha(w: &[usize]) -> PolyScalar {
    PolyScalar::symbol(SymbolId::alpha(w.to_vec()))
}

fn beta(w: &[usize]) -> PolyScalar {
    PolyScalar::symbol(SymbolId::beta(w.to_vec()))
}

fn product(factors: &[PolyScalar]) -> PolyScalar {
    factors.iter().fold(PolyScalar::one(), |acc, f| acc.mul_ref(f))
}

/// The fourteen-term expansion of `φ_vac(A_{i1} B_{i2} A_{i3} B_{i4})`.
pub fn lrlr_moment_polynomial(i: [usize; 4]) -> PolyScalar {
    let [i1, i2, i3, i4] = i;
    let terms = [
        product(&[beta(&[i3, i1, i2, i4])]),
        product(&[alpha(&[i1]), beta(&[i3, i2, i4])]),
        product(&[beta(&[i2]), beta(&[i3, i1, i4])]),
        product(&[alpha(&[i3]), beta(&[i1, i2, i4])]),
        product(&[alpha(&[i2, i1, i3]), beta(&[i4])]),
        product(&[beta(&[i1, i2]), beta(&[i3, i4])]),
        product(&[alpha(&[i1, i3]), beta(&[i2, i4])]),
        product(&[beta(&[i1, i2]), alpha(&[i3]), beta(&[i4])]),
        product(&[alpha(&[i1, i3]), beta(&[i2]), beta(&[i4])]),
        product(&[beta(&[i1, i4]), beta(&[i2]), alpha(&[i3])]),
        product(&[alpha(&[i1]), alpha(&[i2, i3]), beta(&[i4])]),
        product(&[alpha(&[i1]), beta(&[i2, i4]), alpha(&[i3])]),
        product(&[alpha(&[i1]), beta(&[i2]), beta(&[i3, i4])]),
        product(&[alpha(&[i1]), beta(&[i2]), alpha(&[i3]), beta(&[i4])]),
    ];
    let mut total = PolyScalar::zero();
    for t in &terms {
        total.add_assign_ref(t);
    }
    total
}

/// `κ_4(A_{i1}, B_{i2}, A_{i3}, B_{i4})`.
pub fn lrlr_free_cumulant_polynomial(i: [usize; 4]) -> PolyScalar {
    let [i1, i2, i3, i4] = i;
    let mut total = beta(&[i3, i1, i2, i4]);
    total.add_assign_ref(&alpha(&[i1, i3]).mul_ref(&beta(&[i2, i4])));
    total.sub_assign_ref(&alpha(&[i2, i3]).mul_ref(&beta(&[i1, i4])));
    total
}

fn lrlr() -> ChiWord {
    ChiWord::new(vec![Side::Left, Side::Right, Side::Left, Side::Right]).expect("non-empty")
}

fn four_index_words(d: usize) -> Vec<[usize; 4]> {
    index_words(d, 4)
        .into_iter()
        .map(|w| [w[0], w[1], w[2], w[3]])
        .collect()
}

fn lrlr_moment(cfg: &SuiteConfig, report: &mut RunReport) -> Result<()> {
    let table = SymbolicTable::new(cfg.d, 4)?;
    let engine = FockEngine::new(&table);
    let pchi = PchiCache::new();
    let chi = lrlr();
    let words = four_index_words(cfg.d);
    let tallies = exec::map(cfg.exec, &words, |&i| -> Result<Tally> {
        let mut tally = Tally::default();
        let ops = [
            canonical_operator(i[0], Side::Left, &table)?,
            canonical_operator(i[1], Side::Right, &table)?,
            canonical_operator(i[2], Side::Left, &table)?,
            canonical_operator(i[3], Side::Right, &table)?,
        ];
        let expected = lrlr_moment_polynomial(i);
        let by_generators = vacuum_expectation(&ops);
        let by_engine = engine.moment(&c_word(&i, &chi)?);
        let by_partitions = moment_via_pchi_cached(&i, &chi, &table, &pchi)?;
        let label = format_index_word(&i);
        tally.record(by_generators == expected, || {
            format!("i={label}: generator route {by_generators}, expansion {expected}")
        });
        tally.record(by_engine == expected, || format!("i={label}: engine {by_engine}, expansion {expected}"));
        tally.record(by_partitions == expected, || {
            format!("i={label}: partition sum {by_partitions}, expansion {expected}")
        });
        Ok(tally)
    });
    let mut all = Tally::default();
    for t in tallies {
        all.merge(t?);
    }
    let (check, k) = all.into_check(
        "phi(A B A B) over all index words",
        "generator route, engine and partition sum all equal the 14-term expansion",
    );
    report.push(check, k);

    // With pairwise distinct indices no two of the fourteen terms merge.
    let wide = SymbolicTable::new(4, 4)?;
    let ops = [
        canonical_operator(1, Side::Left, &wide)?,
        canonical_operator(2, Side::Right, &wide)?,
        canonical_operator(3, Side::Left, &wide)?,
        canonical_operator(4, Side::Right, &wide)?,
    ];
    let m = vacuum_expectation(&ops);
    report.push(
        Check::new(
            "phi(A1 B2 A3 B4) term count",
            "14",
            m.num_terms().to_string(),
            m.num_terms() == 14 && m == lrlr_moment_polynomial([1, 2, 3, 4]),
        ),
        1,
    );
    Ok(())
}

fn lrlr_cumulant(cfg: &SuiteConfig, report: &mut RunReport) -> Result<()> {
    let table = SymbolicTable::new(cfg.d, 4)?;
    let engine = FockEngine::new(&table);
    engine.prefill(4, cfg.exec);
    let chi = lrlr();
    let words = four_index_words(cfg.d);
    let tallies = exec::map(cfg.exec, &words, |&i| -> Result<Tally> {
        let mut tally = Tally::default();
        let k4 = free_cumulant(&c_word(&i, &chi)?, &engine)?;
        let expected = lrlr_free_cumulant_polynomial(i);
        tally.record(k4 == expected, || {
            format!("i={}: free cumulant {k4}, expected {expected}", format_index_word(&i))
        });
        Ok(tally)
    });
    let mut all = Tally::default();
    for t in tallies {
        all.merge(t?);
    }
    let (check, k) = all.into_check(
        "kappa_4(A B A B) over all index words",
        "b[i3,i1,i2,i4] + a[i1,i3]*b[i2,i4] - a[i2,i3]*b[i1,i4]",
    );
    report.push(check, k);
    Ok(())
}

fn pairs(d: usize) -> Vec<(CanonicalElem, CanonicalElem)> {
    (1..=d)
        .map(|index| {
            (
                CanonicalElem { index, side: Side::Left },
                CanonicalElem { index, side: Side::Right },
            )
        })
        .collect()
}

fn bifreeness(cfg: &SuiteConfig, report: &mut RunReport) -> Result<()> {
    let separated = SymbolicTable::separated(cfg.d, cfg.max_n)?;
    let engine = FockEngine::new(&separated);
    engine.prefill(cfg.max_n, cfg.exec);
    let found = is_combinatorially_bifree_upto(&pairs(cfg.d), &engine, cfg.max_n, cfg.exec)?;
    let shown: Vec<String> = found
        .violations
        .iter()
        .take(MAX_SHOWN)
        .map(|v| format!("chi={} i={}: {}", v.chi, format_index_word(&v.indices), v.value))
        .collect();
    report.push(
        Check::new(
            "separated coefficients",
            "every mixed cumulant vanishes",
            if found.holds {
                format!("{} mixed cumulants vanish", found.checked)
            } else {
                format!("{} violations: {}", found.violations.len(), shown.join("; "))
            },
            found.holds,
        ),
        found.checked,
    );
    if cfg.d < 2 {
        return Ok(());
    }

    let injected_symbol = SymbolId::alpha(vec![1, 2]);
    let injected = SymbolicTable::separated(cfg.d, cfg.max_n)?.with_symbol(injected_symbol.clone())?;
    let engine = FockEngine::new(&injected);
    engine.prefill(cfg.max_n, cfg.exec);
    let found = is_combinatorially_bifree_upto(&pairs(cfg.d), &engine, cfg.max_n, cfg.exec)?;
    let value = PolyScalar::symbol(injected_symbol.clone());
    let short: Vec<String> = found
        .violations
        .iter()
        .filter(|v| v.indices.len() == 2)
        .map(|v| format!("chi={} i={}: {}", v.chi, format_index_word(&v.indices), v.value))
        .collect();
    let expected_short = vec![
        format!("chi=ll i=1,2: {value}"),
        format!("chi=rl i=1,2: {value}"),
    ];
    report.push(
        Check::new(
            format!("injected {injected_symbol}: length-2 witnesses"),
            expected_short.join("; "),
            short.join("; "),
            !found.holds && short == expected_short,
        ),
        found.checked,
    );
    let mut tally = Tally::default();
    for v in &found.violations {
        let omega = v.indices.clone();
        let expected = injected.coefficient(&bimixture_symbol(&omega, &v.chi)?);
        tally.record(v.value == expected, || {
            format!("chi={} i={}: {} vs bi-mixture {expected}", v.chi, format_index_word(&omega), v.value)
        });
    }
    let (check, _) = tally.into_check(
        format!("injected {injected_symbol}: every violation"),
        "each violating cumulant equals its bi-mixture coefficient",
    );
    report.push(check, 0);
    report.result(
        "violations_after_injection",
        json!(found.violations.len()),
        found.violations.len(),
    );
    Ok(())
}
