//! The full transformation as a sequence of stages, plus the invariant suite.

use std::fmt;
use std::str::FromStr;

use crate::bigrecon::{flatness_check, reconstruct_big, BigConnection, ReconMode};
use crate::birkhoff::{birkhoff_factorize, canonical_connection, canonical_j, neumann_l_plus, BirkhoffFactors};
use crate::connection::{connection_from_frame, flatness_defect, pf_reduce, SmallConnection};
use crate::algebra::Coeff;
use crate::error::{Error, Result};
use crate::geometry::GeometryInput;
use crate::ifunction::{frame_columns, i_function, CohVectorSeries, LambdaMode};
use crate::laurent::Laurent;
use crate::matrix::Matrix;
use crate::mirrormap::{flat_products, gw_extract, mirror_locus, mirror_map, GwReport, Locus, MirrorMap, QuantumProductTable};
use crate::novikov::{NovikovSeries, ScalarSeries, Truncation};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    IFunction,
    Connection,
    Canonical,
    Reconstruct,
    Products,
    Gw,
    Verify,
}

impl Stage {
    pub const ALL: [Stage; 7] = [
        Stage::IFunction,
        Stage::Connection,
        Stage::Canonical,
        Stage::Reconstruct,
        Stage::Products,
        Stage::Gw,
        Stage::Verify,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::IFunction => "ifunction",
            Stage::Connection => "connection",
            Stage::Canonical => "canonical",
            Stage::Reconstruct => "reconstruct",
            Stage::Products => "products",
            Stage::Gw => "gw",
            Stage::Verify => "verify",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Stage::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown stage {s:?}")))
    }
}

/// Parse `all` or a comma-separated stage list.
pub fn parse_stages(text: &str) -> Result<Vec<Stage>> {
    if text.trim() == "all" {
        return Ok(Stage::ALL.to_vec());
    }
    let mut out = text.split(',').map(|s| s.trim().parse()).collect::<Result<Vec<Stage>>>()?;
    out.sort();
    out.dedup();
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub q_order: u32,
    pub t_order: u32,
    /// Novikov weights; uniform when absent.
    pub weights: Option<Vec<u32>>,
    pub lambda: LambdaMode,
    pub mode: ReconMode,
    /// Stages whose artifacts are wanted; earlier stages run as needed.
    pub stages: Vec<Stage>,
    /// Cross-check the connection against the Picard–Fuchs oracle.
    pub oracle: bool,
    /// Also report the mirror-map locus with the products.
    pub locus: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            q_order: 6,
            t_order: 5,
            weights: None,
            lambda: LambdaMode::Zero,
            mode: ReconMode::Reduced,
            stages: Stage::ALL.to_vec(),
            oracle: false,
            locus: false,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.q_order < 1 {
            return Err(Error::Config("--q-order must be at least 1".into()));
        }
        if self.stages.is_empty() {
            return Err(Error::Config("no stages requested".into()));
        }
        if self.lambda == LambdaMode::Poly && self.stages.contains(&Stage::Gw) {
            return Err(Error::Config("Gromov–Witten extraction needs --lambda zero".into()));
        }
        Ok(())
    }

    pub fn truncation(&self, rank: usize) -> Result<Truncation> {
        match &self.weights {
            Some(w) if w.len() != rank => Err(Error::Config(format!(
                "--weights has {} entries but the geometry has r = {rank}",
                w.len()
            ))),
            Some(w) => Truncation::new(self.q_order, w.clone()),
            None => Ok(Truncation::uniform(rank, self.q_order)),
        }
    }

    fn last_stage(&self) -> Stage {
        *self.stages.iter().max().expect("validated")
    }

    fn needs(&self, s: Stage) -> bool {
        let last = self.last_stage();
        last == Stage::Verify || s <= last
    }
}

/// Everything computed by a run; stages not reached stay `None`.
#[derive(Clone, Debug, Default)]
pub struct Artifacts<F: Scalar> {
    pub truncation: Option<Truncation>,
    pub i_function: Option<CohVectorSeries<F>>,
    pub frame: Option<NovikovSeries<Matrix<F>>>,
    pub connection: Option<SmallConnection<F>>,
    pub oracle: Option<Vec<ScalarSeries<F>>>,
    pub factors: Option<BirkhoffFactors<F>>,
    pub canonical: Option<Vec<NovikovSeries<Matrix<F>>>>,
    pub j_function: Option<CohVectorSeries<F>>,
    pub big: Option<BigConnection<F>>,
    pub mirror_map: Option<MirrorMap<F>>,
    pub products: Option<QuantumProductTable<F>>,
    pub locus: Option<Locus<F>>,
    pub gw: Option<GwReport<F>>,
    pub verify: Option<VerifyReport>,
}

/// `ℙ^{N−1}` in the basis `1, p, …, p^{N−1}` with at most one line bundle: `(N, k)`.
fn projective_data<F: Scalar>(geom: &GeometryInput<F>) -> Option<(usize, u32)> {
    let pres = geom.presentation().ok()?;
    let standard = pres.basis_monomials().iter().enumerate().all(|(i, m)| m == &[i as u32]);
    if !standard || geom.weights().iter().any(|u| u != &[1]) || geom.weights().len() != pres.dim() {
        return None;
    }
    match geom.bundle() {
        [] => Some((pres.dim(), 0)),
        [v] if v[0] > 0 => Some((pres.dim(), v[0] as u32)),
        _ => None,
    }
}

/// Run the stages through the last one requested. Artifacts already present
/// in `seed` (e.g. read back from files) are reused instead of recomputed;
/// derived quantities such as the frame are always rebuilt.
pub fn run<F: Scalar>(geom: &GeometryInput<F>, config: &RunConfig, seed: Artifacts<F>) -> Result<Artifacts<F>> {
    config.validate()?;
    let pres = geom.presentation()?;
    let trunc = config.truncation(pres.rank())?;
    let mut out = seed;
    out.truncation = Some(trunc.clone());

    let i = match out.i_function.take() {
        Some(i) => i,
        None => i_function(geom, &trunc, config.lambda)?,
    };
    out.i_function = Some(i.clone());
    if !config.needs(Stage::Connection) {
        return Ok(out);
    }
    let frame = frame_columns(pres, &i);
    out.frame = Some(frame.clone());
    let conn = match out.connection.take() {
        Some(c) => c,
        None => connection_from_frame(pres, &frame)?,
    };
    out.connection = Some(conn.clone());
    if out.oracle.is_none() && config.oracle {
        match projective_data(geom) {
            Some((n, k)) if trunc.weights() == [1] => out.oracle = Some(pf_reduce(n, k, trunc.order())?),
            _ => return Err(Error::Config("--oracle needs a projective space with at most one line bundle".into())),
        }
    }
    if !config.needs(Stage::Canonical) {
        return Ok(out);
    }
    let factors = match out.factors.take() {
        Some(f) => f,
        None => birkhoff_factorize(&frame)?,
    };
    let canonical = match out.canonical.take() {
        Some(c) => c,
        None => canonical_connection(&conn, &factors)?,
    };
    out.j_function = Some(canonical_j(&factors));
    out.factors = Some(factors);
    out.canonical = Some(canonical.clone());
    if !config.needs(Stage::Reconstruct) {
        return Ok(out);
    }
    let big = match out.big.take() {
        Some(b) => b,
        None => reconstruct_big(&canonical, pres, config.t_order, config.mode)?,
    };
    out.big = Some(big.clone());
    if !config.needs(Stage::Products) {
        return Ok(out);
    }
    let map = match out.mirror_map.take() {
        Some(m) => m,
        None => mirror_map(&canonical)?,
    };
    let table = match out.products.take() {
        Some(t) => t,
        None => flat_products(&big, geom, &map)?,
    };
    if config.locus {
        out.locus = Some(mirror_locus(&big, &map));
    }
    out.mirror_map = Some(map);
    out.products = Some(table.clone());
    if config.needs(Stage::Gw) && config.lambda == LambdaMode::Zero && out.gw.is_none() {
        match gw_extract(&table, geom) {
            Ok(report) => out.gw = Some(report),
            // rank > 1 or a bare ambient: fatal only when gw is all that was asked for
            Err(e) if config.stages != [Stage::Gw] && e.exit_code() == 3 => {}
            Err(e) => return Err(e),
        }
    }
    if config.stages.contains(&Stage::Verify) {
        out.verify = Some(verify(geom, config, &out)?);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Turn the first failure into an error.
    pub fn into_result(self) -> Result<Self> {
        match self.checks.iter().find(|c| !c.passed) {
            Some(c) => Err(Error::Invariant(format!("{}: {}", c.name, c.detail))),
            None => Ok(self),
        }
    }
}

fn check(name: &str, passed: bool, detail: impl Into<String>) -> CheckResult {
    CheckResult { name: name.into(), passed, detail: detail.into() }
}

/// The invariant suite over a completed run. Several of these identities
/// are also enforced while computing; they are re-checked here because
/// artifacts may have been read back from files.
pub fn verify<F: Scalar>(geom: &GeometryInput<F>, config: &RunConfig, art: &Artifacts<F>) -> Result<VerifyReport> {
    let missing = || Error::Invariant("verify needs a complete run".into());
    let trunc = art.truncation.as_ref().ok_or_else(missing)?;
    let conn = art.connection.as_ref().ok_or_else(missing)?;
    let factors = art.factors.as_ref().ok_or_else(missing)?;
    let frame = art.frame.as_ref().ok_or_else(missing)?;
    let canonical = art.canonical.as_ref().ok_or_else(missing)?;
    let big = art.big.as_ref().ok_or_else(missing)?;
    let mut checks = Vec::new();

    let small = flatness_defect(&conn.matrices);
    checks.push(check("small connection flatness", small.is_none(), located(&small)));

    let identity = frame.mul(&factors.l_plus) == factors.l_minus_inv;
    checks.push(check("Birkhoff identity L⁻¹L₊ = L₋⁻¹", identity, ""));
    let bad_minus = factors.l_minus_inv.iter().find(|(d, m)| {
        let plus = m.pi_plus();
        if d.is_zero() { !plus.is_identity() } else { !plus.is_zero() }
    });
    checks.push(check("π₊(L₋⁻¹) = id", bad_minus.is_none(), located(&bad_minus.map(|(d, _)| d))));
    let bad_plus = factors.l_plus.iter().find(|(_, m)| m.nonzero_entries().any(|(_, _, e)| e.min_hbar().is_some_and(|h| h < 0)));
    checks.push(check("L₊ has no negative ħ powers", bad_plus.is_none(), located(&bad_plus.map(|(d, _)| d))));
    checks.push(check("recursive and Neumann-sum L₊ agree", neumann_l_plus(frame) == factors.l_plus, ""));

    let with_hbar = canonical
        .iter()
        .enumerate()
        .find_map(|(a, s)| s.iter().find(|(_, m)| !m.is_hbar_free()).map(|(d, _)| (a, d.clone())));
    checks.push(check("ħ-independence of the canonical connection", with_hbar.is_none(), located(&with_hbar)));
    let regauged = canonical_connection(conn, factors)?;
    let off = regauged.iter().zip(canonical).position(|(x, y)| x != y);
    checks.push(check("canonical connection is the Birkhoff gauge of A", off.is_none(), located(&off)));
    let off = big.big_a.iter().zip(canonical).position(|(x, y)| &x.at_zero() != y);
    checks.push(check("big connection restricts to the canonical one at t = 0", off.is_none(), located(&off)));
    let can_flat = flatness_defect(canonical);
    checks.push(check("canonical connection flatness", can_flat.is_none(), located(&can_flat)));

    let oracle = match (&art.oracle, projective_data(geom)) {
        (Some(o), _) => Some(o.clone()),
        (None, Some((n, k))) if trunc.weights() == [1] => Some(pf_reduce(n, k, trunc.order())?),
        _ => None,
    };
    if let Some(oracle) = &oracle {
        let n = oracle.len();
        let a = &conn.matrices[0];
        let mut bad = None;
        'outer: for d in trunc.exponents().into_iter().filter(|d| !d.is_zero()) {
            for (k, col) in oracle.iter().enumerate() {
                let from_frame = a.get(&d).map_or_else(Laurent::zero, |m| m.get(k, n - 1).clone());
                let from_oracle = col.get(&d).cloned().unwrap_or_else(Laurent::zero);
                if from_frame != from_oracle {
                    bad = Some((k, d));
                    break 'outer;
                }
            }
        }
        checks.push(check("Picard–Fuchs oracle equals frame extraction", bad.is_none(), located(&bad)));
    }

    let report = flatness_check(big);
    let first = report.failures().next().map(|c| format!("{} at {:?}", c.name, c.witness));
    checks.push(check("big connection flatness", report.all_passed(), first.unwrap_or_default()));

    if let Some(table) = &art.products {
        let unit = table.check_unit_and_commutativity();
        checks.push(check("product table unit and commutativity", unit.is_ok(), unit.err().map(|e| e.to_string()).unwrap_or_default()));
    }
    if let Some(gw) = &art.gw {
        let n = gw.three_point.len();
        let mut bad = None;
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    let x = &gw.three_point[i][j][l];
                    if x != &gw.three_point[j][i][l] || x != &gw.three_point[i][l][j] {
                        bad.get_or_insert((i, j, l));
                    }
                }
            }
        }
        checks.push(check("Frobenius symmetry of three-point functions", bad.is_none(), located(&bad)));
    }

    // recomputing with one more Q-order must not change anything already known
    let pres = geom.presentation()?;
    let wider = trunc.with_order(trunc.order() + 1);
    let s = frame_columns(pres, &i_function(geom, &wider, config.lambda)?);
    let c = connection_from_frame(pres, &s)?;
    let wide = canonical_connection(&c, &birkhoff_factorize(&s)?)?;
    let unstable = wide
        .iter()
        .zip(canonical)
        .position(|(w, a)| &w.truncate(trunc.order()) != a);
    checks.push(check("truncation stability (D vs D+1)", unstable.is_none(), located(&unstable)));

    VerifyReport { checks }.into_result()
}

fn located<T: fmt::Debug>(w: &Option<T>) -> String {
    w.as_ref().map(|w| format!("witness {w:?}")).unwrap_or_default()
}
