//! Identities among the printed numbers themselves.

use serde::Serialize;

use super::{lambda_column, state_column, FixtureSet, Table, TableRow};
use crate::information::{CRAMER_RAO_BOUND, FISHER_PRODUCT_BOUND};
use crate::observables::uncertainty_bound;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// I[ρ] = 4⟨p²⟩ (Tables 10–14 against 2–6).
    FisherPosition,
    /// I[γ] = 4⟨r²⟩ (Tables 10–14 against 2–6).
    FisherMomentum,
    /// Product column = ⟨r²⟩⟨p²⟩ (Tables 2–6).
    UncertaintyProduct,
    /// Table 15 cell = I[ρ]⟨r²⟩.
    CramerRao,
    /// Fisher product column = I[ρ]I[γ] (Tables 10–14).
    FisherProduct,
    /// Table 9 = Table 7 × Table 8.
    DeltaProduct,
    /// A printed product lies at or above its lower bound.
    Bound,
    /// A printed `min_*` column equals the theoretical bound.
    BoundColumn,
}

impl CheckKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::FisherPosition => "fisher_position",
            Self::FisherMomentum => "fisher_momentum",
            Self::UncertaintyProduct => "uncertainty_product",
            Self::CramerRao => "cramer_rao",
            Self::FisherProduct => "fisher_product",
            Self::DeltaProduct => "delta_product",
            Self::Bound => "bound",
            Self::BoundColumn => "bound_column",
        }
    }
}

/// Pass when `|residual| ≤ max(abs, rel·|expected|)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Tolerance {
    pub const PRINT: Self = Self {
        rel: 1e-5,
        abs: 5e-3,
    };
    pub const PRODUCT: Self = Self {
        rel: 1e-4,
        abs: 0.0,
    };
    pub const CRAMER_RAO: Self = Self {
        rel: 1e-3,
        abs: 0.0,
    };
    /// Bound columns are printed to two decimals.
    pub const EXACT: Self = Self {
        rel: 0.0,
        abs: 1e-9,
    };

    pub fn allowed(&self, expected: f64) -> f64 {
        self.abs.max(self.rel * expected.abs())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub kind: CheckKind,
    /// Table holding the printed value under test.
    pub table_id: u8,
    /// Table the expected value was derived from, if different.
    pub source_table: Option<u8>,
    pub column: String,
    pub lambda: Option<f64>,
    pub n: Option<u32>,
    pub l: Option<u32>,
    pub printed: f64,
    /// Value implied by the identity; the bound itself for `Bound` checks.
    pub expected: f64,
    pub residual: f64,
    pub rel_residual: f64,
    pub tolerance: Option<Tolerance>,
    pub pass: bool,
    pub note: Option<String>,
}

impl IdentityCheck {
    pub fn label(&self) -> String {
        let mut s = format!("table {} {}", self.table_id, self.column);
        if let Some(src) = self.source_table {
            s.push_str(&format!(" vs table {src}"));
        }
        if let Some(n) = self.n {
            s.push_str(&format!(" n={n}"));
        }
        if let Some(l) = self.l {
            s.push_str(&format!(" l={l}"));
        }
        if let Some(lambda) = self.lambda {
            s.push_str(&format!(" lambda={lambda}"));
        }
        s
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<IdentityCheck>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &IdentityCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn of_kind(&self, kind: CheckKind) -> impl Iterator<Item = &IdentityCheck> {
        self.checks.iter().filter(move |c| c.kind == kind)
    }

    pub fn count(&self) -> (usize, usize) {
        let passed = self.checks.iter().filter(|c| c.pass).count();
        (passed, self.checks.len())
    }
}

/// When a residual is one nonzero digit in one decimal place, the printed
/// value most likely has a single wrong digit.
fn digit_slip(printed: f64, residual: f64, allowed: f64) -> Option<String> {
    if residual == 0.0 || !residual.is_finite() {
        return None;
    }
    // Rounding can push the leading digit up a decade (99.99998 → 100).
    let k0 = residual.abs().log10().floor();
    let (digit, k) = [k0, k0 + 1.0].into_iter().find_map(|k| {
        let place = 10f64.powf(k);
        let digit = (residual.abs() / place).round();
        let slip = digit * place * residual.signum();
        ((1.0..=9.0).contains(&digit)
            && place <= printed.abs().max((printed + residual).abs())
            && (residual - slip).abs() <= allowed)
            .then_some((digit, k))
    })?;
    Some(format!(
        "residual is {}×10^{} within print rounding: the printed {} likely has a \
         single wrong digit (identity implies {:.6})",
        digit,
        k,
        printed,
        printed + residual
    ))
}

struct Builder {
    checks: Vec<IdentityCheck>,
}

struct Site<'a> {
    table: u8,
    source: Option<u8>,
    column: &'a str,
    lambda: Option<f64>,
    n: Option<u32>,
    l: Option<u32>,
}

impl Builder {
    fn identity(
        &mut self,
        kind: CheckKind,
        site: Site,
        printed: f64,
        expected: f64,
        tol: Tolerance,
    ) {
        // Residual is expected − printed so that printed + residual recovers
        // the implied value.
        let residual = expected - printed;
        let allowed = tol.allowed(expected);
        let pass = residual.abs() <= allowed;
        let note = if pass {
            None
        } else {
            digit_slip(printed, residual, allowed)
        };
        self.checks.push(IdentityCheck {
            kind,
            table_id: site.table,
            source_table: site.source,
            column: site.column.to_string(),
            lambda: site.lambda,
            n: site.n,
            l: site.l,
            printed,
            expected,
            residual,
            rel_residual: residual / expected,
            tolerance: Some(tol),
            pass,
            note,
        });
    }

    fn bound(&mut self, site: Site, printed: f64, bound: f64) {
        let residual = printed - bound;
        self.checks.push(IdentityCheck {
            kind: CheckKind::Bound,
            table_id: site.table,
            source_table: site.source,
            column: site.column.to_string(),
            lambda: site.lambda,
            n: site.n,
            l: site.l,
            printed,
            expected: bound,
            residual,
            rel_residual: residual / bound,
            tolerance: None,
            pass: printed >= bound,
            note: None,
        });
    }
}

fn site<'a>(table: &Table, source: Option<u8>, column: &'a str, row: &TableRow) -> Site<'a> {
    Site {
        table: table.id,
        source,
        column,
        lambda: row.lambda,
        n: row.n,
        l: row.l,
    }
}

fn uncertainty_table(fx: &FixtureSet, n: u32, l: u32) -> Option<&Table> {
    fx.tables
        .iter()
        .filter(|t| (2..=6).contains(&t.id))
        .find(|t| t.units.n == Some(n) && t.units.l == Some(l))
}

fn fisher_table(fx: &FixtureSet, n: u32, l: u32) -> Option<&Table> {
    fx.tables
        .iter()
        .filter(|t| (10..=14).contains(&t.id))
        .find(|t| t.units.n == Some(n) && t.units.l == Some(l))
}

pub fn validate_identities(fx: &FixtureSet) -> ValidationReport {
    let mut b = Builder { checks: Vec::new() };

    for t in fx.tables.iter().filter(|t| (2..=6).contains(&t.id)) {
        for row in &t.rows {
            let (Some(r2), Some(p2)) = (row.get("r2"), row.get("p2")) else {
                continue;
            };
            let l = row.l.unwrap_or(0);
            if let Some(prod) = row.get("product2") {
                b.identity(
                    CheckKind::UncertaintyProduct,
                    site(t, None, "product2", row),
                    prod,
                    r2 * p2,
                    Tolerance::PRODUCT,
                );
                b.bound(site(t, None, "product2", row), prod, uncertainty_bound(l));
            }
            if let Some(min) = row.get("min_product2") {
                b.identity(
                    CheckKind::BoundColumn,
                    site(t, None, "min_product2", row),
                    min,
                    uncertainty_bound(l),
                    Tolerance::EXACT,
                );
            }
        }
    }

    for t in fx.tables.iter().filter(|t| (10..=14).contains(&t.id)) {
        let source = t
            .units
            .n
            .zip(t.units.l)
            .and_then(|(n, l)| uncertainty_table(fx, n, l));
        for row in &t.rows {
            let lambda = row.lambda.unwrap_or(f64::NAN);
            let src_row = source.and_then(|s| s.row_at(lambda));
            let src_id = source.map(|s| s.id);
            let rho = row.get("fisher_rho");
            let gamma = row.get("fisher_gamma");
            if let Some(src) = src_row {
                if let (Some(rho), Some(p2)) = (rho, src.get("p2")) {
                    b.identity(
                        CheckKind::FisherPosition,
                        site(t, src_id, "fisher_rho", row),
                        rho,
                        4.0 * p2,
                        Tolerance::PRINT,
                    );
                }
                if let (Some(gamma), Some(r2)) = (gamma, src.get("r2")) {
                    b.identity(
                        CheckKind::FisherMomentum,
                        site(t, src_id, "fisher_gamma", row),
                        gamma,
                        4.0 * r2,
                        Tolerance::PRINT,
                    );
                }
            }
            if let Some(prod) = row.get("fisher_product") {
                if let (Some(rho), Some(gamma)) = (rho, gamma) {
                    b.identity(
                        CheckKind::FisherProduct,
                        site(t, None, "fisher_product", row),
                        prod,
                        rho * gamma,
                        Tolerance::PRODUCT,
                    );
                }
                b.bound(
                    site(t, None, "fisher_product", row),
                    prod,
                    FISHER_PRODUCT_BOUND,
                );
            }
            if let Some(min) = row.get("min_fisher_product") {
                b.identity(
                    CheckKind::BoundColumn,
                    site(t, None, "min_fisher_product", row),
                    min,
                    FISHER_PRODUCT_BOUND,
                    Tolerance::EXACT,
                );
            }
        }
    }

    if let (Ok(t7), Ok(t8), Ok(t9)) = (fx.table(7), fx.table(8), fx.table(9)) {
        for row in &t9.rows {
            let find = |t: &'_ Table| {
                t.rows
                    .iter()
                    .find(|r| r.n == row.n && r.l == row.l)
                    .cloned()
            };
            let (r7, r8) = (find(t7), find(t8));
            let bound = f64::from(row.l.unwrap_or(0)) + 1.5;
            for col in &row.columns {
                let Some(lambda) = lambda_column(&col.name) else {
                    continue;
                };
                let Some(printed) = col.value else { continue };
                let s = Site {
                    table: 9,
                    source: Some(7),
                    column: &col.name,
                    lambda: Some(lambda),
                    n: row.n,
                    l: row.l,
                };
                if let (Some(dr), Some(dp)) = (
                    r7.as_ref().and_then(|r| r.get(&col.name)),
                    r8.as_ref().and_then(|r| r.get(&col.name)),
                ) {
                    b.identity(
                        CheckKind::DeltaProduct,
                        s,
                        printed,
                        dr * dp,
                        Tolerance::PRODUCT,
                    );
                }
                let s = Site {
                    table: 9,
                    source: None,
                    column: &col.name,
                    lambda: Some(lambda),
                    n: row.n,
                    l: row.l,
                };
                b.bound(s, printed, bound);
            }
            if let Some(min) = row.get("min_delta_r_delta_p") {
                b.identity(
                    CheckKind::BoundColumn,
                    site(t9, None, "min_delta_r_delta_p", row),
                    min,
                    bound,
                    Tolerance::EXACT,
                );
            }
        }
    }

    if let Ok(t15) = fx.table(15) {
        for row in &t15.rows {
            let lambda = row.lambda.unwrap_or(f64::NAN);
            for col in &row.columns {
                let Some((n, l)) = state_column(&col.name) else {
                    continue;
                };
                let Some(printed) = col.value else { continue };
                let s = Site {
                    table: 15,
                    source: None,
                    column: &col.name,
                    lambda: row.lambda,
                    n: Some(n),
                    l: Some(l),
                };
                b.bound(s, printed, CRAMER_RAO_BOUND);
                let fisher = fisher_table(fx, n, l);
                let unc = uncertainty_table(fx, n, l);
                let rho = fisher
                    .and_then(|t| t.row_at(lambda))
                    .and_then(|r| r.get("fisher_rho"));
                let r2 = unc.and_then(|t| t.row_at(lambda)).and_then(|r| r.get("r2"));
                if let (Some(rho), Some(r2)) = (rho, r2) {
                    let s = Site {
                        table: 15,
                        source: fisher.map(|t| t.id),
                        column: &col.name,
                        lambda: row.lambda,
                        n: Some(n),
                        l: Some(l),
                    };
                    b.identity(
                        CheckKind::CramerRao,
                        s,
                        printed,
                        rho * r2,
                        Tolerance::CRAMER_RAO,
                    );
                }
            }
            if let Some(min) = row.get("min_cramer_rao") {
                b.identity(
                    CheckKind::BoundColumn,
                    site(t15, None, "min_cramer_rao", row),
                    min,
                    CRAMER_RAO_BOUND,
                    Tolerance::EXACT,
                );
            }
        }
    }

    ValidationReport { checks: b.checks }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report() -> ValidationReport {
        validate_identities(&FixtureSet::embedded().unwrap())
    }

    fn find<'a>(
        r: &'a ValidationReport,
        kind: CheckKind,
        table: u8,
        column: &str,
        lambda: f64,
    ) -> &'a IdentityCheck {
        r.checks
            .iter()
            .find(|c| {
                c.kind == kind
                    && c.table_id == table
                    && c.column == column
                    && c.lambda == Some(lambda)
            })
            .unwrap()
    }

    #[test]
    fn first_row_identities() {
        let r = report();
        let c = find(&r, CheckKind::FisherPosition, 10, "fisher_rho", 0.5);
        assert!(c.pass);
        assert!((c.expected - 23.96416).abs() < 1e-12);
        let c = find(&r, CheckKind::FisherMomentum, 10, "fisher_gamma", 0.5);
        assert!(c.pass);
        assert!((c.expected - 2.207436).abs() < 1e-12);
        let c = find(&r, CheckKind::UncertaintyProduct, 2, "product2", 0.5);
        assert!(c.pass);
        assert!((c.expected - 3.3062093).abs() < 1e-6);
        let c = find(&r, CheckKind::CramerRao, 15, "n0_l0", 0.5);
        assert!(c.pass);
        assert!((c.expected - 13.22483).abs() < 1e-5);
    }

    #[test]
    fn every_family_is_exercised() {
        let r = report();
        let count = |k| r.of_kind(k).count();
        assert_eq!(count(CheckKind::FisherPosition), 42);
        assert_eq!(count(CheckKind::FisherMomentum), 42);
        assert_eq!(count(CheckKind::UncertaintyProduct), 42);
        assert_eq!(count(CheckKind::FisherProduct), 42);
        assert_eq!(count(CheckKind::DeltaProduct), 24);
        assert_eq!(count(CheckKind::CramerRao), 10 + 9 + 7 + 6);
    }

    #[test]
    fn table_fifteen_digit_slips_are_flagged() {
        let r = report();
        let failures: Vec<_> = r.failures().collect();
        assert_eq!(failures.len(), 2, "{failures:#?}");
        let c = find(&r, CheckKind::CramerRao, 15, "n0_l0", 7.5);
        assert!(!c.pass);
        assert!((c.residual - 100.0).abs() < 1e-3);
        assert!(c.note.as_deref().unwrap().contains("1×10^2"));
        let c = find(&r, CheckKind::CramerRao, 15, "n3_l2", 8.5);
        assert!(!c.pass);
        assert!((c.residual - 1000.0).abs() < 1e-2);
        assert!(c.note.is_some());
    }

    #[test]
    fn bounds_hold_on_every_row() {
        let r = report();
        assert!(r.of_kind(CheckKind::Bound).all(|c| c.pass));
        assert!(r.of_kind(CheckKind::BoundColumn).all(|c| c.pass));
        // Tables 2–6, 9, 10–14 and every filled Table 15 cell.
        assert_eq!(r.of_kind(CheckKind::Bound).count(), 42 + 24 + 42 + 32);
    }

    #[test]
    fn tolerance_floor() {
        assert_eq!(Tolerance::PRINT.allowed(2.0), 5e-3);
        assert_eq!(Tolerance::PRINT.allowed(1000.0), 1e-2);
    }

    #[test]
    fn digit_slip_detection() {
        assert!(digit_slip(247.6847, 99.99998, 0.35).is_some());
        assert!(digit_slip(247.6847, 37.2, 0.35).is_none());
        assert!(digit_slip(5.0, 15.0, 0.35).is_none());
    }
}
