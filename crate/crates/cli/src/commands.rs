use serde_json::{json, Value};

use iwalambda::asymptotics::{
    fit_depth, fit_parameters, level_order_lattice, ElementaryModuleSpec, FitOutcome,
    LevelOrderTable, LATTICE_MAX_SIZE, LEVEL_MAX_SIZE,
};
use iwalambda::characters::{all_ladic_chars, mirror, LadicChar};
use iwalambda::cohomology::{
    ambiguous_valuation, herbrand_quotient, tate_h0, tate_h0_enumerated, tate_h1,
    tate_h1_enumerated, AmbiguousInput, FiniteGammaModule,
};
use iwalambda::defect::{
    defect_character, defect_oracle, kappa, lambda_shift_imaginary, lambda_shift_real,
    lambda_wild, reflection_check, CaseTag,
};
use iwalambda::splitting::FieldSpec;
use iwalambda::arith::IntMatrix;

use crate::render::{char_map, field_json, ladic_label, lambda_json, Report};
use crate::settings::{parse_matrix, parse_poly, CliError, CliResult, Settings};

fn load_field(s: &Settings) -> CliResult<(FieldSpec, Vec<LadicChar>)> {
    let ell: u64 = s.required("ell")?;
    let m: u64 = s.required("conductor")?;
    let h: Vec<i64> = s.list("subgroup")?;
    let field = FieldSpec::new(ell, m, &h)?;
    field.require_valid()?;
    let chars = all_ladic_chars(field.delta(), ell, Some(field.tau_bar()))?;
    Ok((field, chars))
}

/// `--primes`, falling back to `--S`.
fn tame_primes(s: &Settings) -> CliResult<Vec<u64>> {
    if s.has("primes") {
        s.list("primes")
    } else {
        s.list("S")
    }
}

fn mismatch(what: &str, got: &Value, oracle: &Value) -> CliError {
    CliError::OracleMismatch(format!("{what}: computed {got}, oracle {oracle}"))
}

pub fn chars(s: &Settings) -> CliResult<Report> {
    let (field, chars) = load_field(s)?;
    let g = field.delta();
    let mut rows = Vec::new();
    for phi in &chars {
        let image = mirror(&phi.as_virtual(g), &field)?;
        let partner = chars
            .iter()
            .find(|psi| image.multiplicity(&psi.rep) != 0)
            .expect("mirror permutes the ℓ-adic characters");
        rows.push(json!({
            "character": ladic_label(&field, phi),
            "rep": phi.rep.coeffs(),
            "degree": phi.degree(),
            "parity": phi.parity.map(|p| p.label()),
            "mirror": ladic_label(&field, partner),
        }));
    }
    Ok(Report {
        command: "chars",
        field: Some(field_json(&field)),
        input: json!({}),
        result: Value::Array(rows),
        oracle_checked: false,
    })
}

pub fn defect(s: &Settings) -> CliResult<Report> {
    let (field, chars) = load_field(s)?;
    let primes = tame_primes(s)?;
    let value = defect_character(&field, &primes)?;
    let result = char_map(&field, &chars, &value);
    let mut checked = false;
    if s.verify()? {
        let oracle = defect_oracle(&field, &primes)?;
        if oracle != value {
            return Err(mismatch("defect", &result, &char_map(&field, &chars, &oracle)));
        }
        checked = true;
    }
    Ok(Report {
        command: "defect",
        field: Some(field_json(&field)),
        input: json!({ "primes": primes }),
        result,
        oracle_checked: checked,
    })
}

pub fn lambda(s: &Settings) -> CliResult<Report> {
    let (field, chars) = load_field(s)?;
    let primes = tame_primes(s)?;
    let parity = s.raw("parity").unwrap_or("");
    let expr = match parity {
        "real" => lambda_shift_real(&field, &primes)?,
        "imaginary" => {
            if primes.is_empty() {
                eprintln!(
                    "warning: S is empty; the imaginary shift is the literal (0 - one)* = -omega, \
                     not the baseline lambda_L-"
                );
            }
            lambda_shift_imaginary(&field, &primes)?
        }
        "wild" => lambda_wild(&field, &primes)?,
        other => {
            return Err(CliError::Usage(format!(
                "--parity must be real, imaginary or wild, got {other:?}"
            )))
        }
    };
    Ok(Report {
        command: "lambda",
        field: Some(field_json(&field)),
        input: json!({ "primes": primes, "parity": parity }),
        result: lambda_json(&field, &chars, &expr),
        oracle_checked: false,
    })
}

pub fn reflect(s: &Settings) -> CliResult<Report> {
    let (field, chars) = load_field(s)?;
    let sup: Vec<u64> = s.list("S")?;
    let sub: Vec<u64> = s.list("T")?;
    let r = reflection_check(&field, &sup, &sub)?;
    let mut checked = false;
    if s.verify()? {
        // Compare every defect-valued κ with the counting oracle.
        for (a, b, value) in [(&sup, &sub, &r.kappa_st), (&sub, &sup, &r.kappa_ts)] {
            if kappa(&field, a, b)?.case != CaseTag::WildMirror {
                continue;
            }
            let oracle = defect_oracle(&field, b)?;
            if &oracle != value {
                return Err(mismatch(
                    "kappa",
                    &char_map(&field, &chars, value),
                    &char_map(&field, &chars, &oracle),
                ));
            }
            checked = true;
        }
    }
    Ok(Report {
        command: "reflect",
        field: Some(field_json(&field)),
        input: json!({ "S": sup, "T": sub }),
        result: json!({
            "identity_holds": r.holds,
            "case": r.case.label(),
            "kappa_st": char_map(&field, &chars, &r.kappa_st),
            "kappa_ts": char_map(&field, &chars, &r.kappa_ts),
            "lhs": lambda_json(&field, &chars, &r.lhs),
            "rhs": lambda_json(&field, &chars, &r.rhs),
        }),
        oracle_checked: checked,
    })
}

pub fn simulate(s: &Settings) -> CliResult<Report> {
    let ell: u64 = s.required("ell")?;
    let rho: u32 = s.int("rho")?.unwrap_or(0);
    let n: u32 = s.required("n")?;
    let k: u32 = s.int("k")?.unwrap_or(0);
    let poly_src: Vec<String> = s.list("poly")?;
    let polys = poly_src.iter().map(|p| parse_poly(p)).collect::<CliResult<Vec<_>>>()?;
    let mus: Vec<u32> = s.list("mu")?;
    let spec = ElementaryModuleSpec::new(ell, rho, polys, mus.clone())?;

    // The fit needs a stability window, so levels past n may be computed.
    let mut reachable = 0;
    while ell.pow(reachable + 1) <= LEVEL_MAX_SIZE {
        reachable += 1;
    }
    let top = n.max(fit_depth(&spec).min(reachable));
    let table = LevelOrderTable::compute(&spec, 0..=top, k)?;
    let orders = &table.values[..=n as usize];
    let fit = match fit_parameters(&table).unwrap_or(FitOutcome::NotYetStable) {
        FitOutcome::Stable(f) => json!({ "rho": f.rho, "mu": f.mu, "lambda": f.lambda, "nu": f.nu }),
        FitOutcome::NotYetStable => json!("not yet stable"),
    };
    let mut checked = false;
    if s.verify()? {
        for (level, &x) in orders.iter().enumerate() {
            let level = level as u32;
            if ell.checked_pow(level).map_or(true, |size| size > LATTICE_MAX_SIZE) {
                break;
            }
            let oracle = level_order_lattice(&spec, level, k)?;
            if oracle != x {
                return Err(mismatch(&format!("x({level})"), &json!(x), &json!(oracle)));
            }
            checked = true;
        }
    }
    Ok(Report {
        command: "simulate",
        field: None,
        input: json!({
            "ell": ell, "rho": rho, "polys": poly_src, "mus": mus, "n": n, "k": k,
        }),
        result: json!({
            "orders": orders,
            "fit": fit,
            "fit_levels": [top.saturating_sub(4), top],
        }),
        oracle_checked: checked,
    })
}

pub fn ambig(s: &Settings) -> CliResult<Report> {
    let input = AmbiguousInput {
        h: s.required("h")?,
        ram: s.list("ram")?,
        deg: s.required("deg")?,
        unit_index: s.int("unit-index")?.unwrap_or(0),
    };
    let v = ambiguous_valuation(&input)?;
    Ok(Report {
        command: "ambig",
        field: None,
        input: json!({
            "h": input.h, "ram": input.ram, "deg": input.deg, "unit_index": input.unit_index,
        }),
        result: json!({ "valuation": v }),
        oracle_checked: false,
    })
}

pub fn cohomology(s: &Settings) -> CliResult<Report> {
    let orders: Vec<u64> = s.list("orders")?;
    if orders.is_empty() {
        return Err(CliError::Usage("missing --orders".into()));
    }
    let order_n: u64 = s.required("order-n")?;
    let sigma = match s.raw("sigma") {
        Some(src) => parse_matrix(src)?,
        None => IntMatrix::identity(orders.len()),
    };
    let m = FiniteGammaModule::from_cyclic_blocks(&orders, &sigma, order_n)?;
    let (h1, h0) = (tate_h1(&m), tate_h0(&m));
    let mut checked = false;
    if s.verify()? {
        let (e1, e0) = (tate_h1_enumerated(&m)?, tate_h0_enumerated(&m)?);
        if (e1, e0) != (h1, h0) {
            return Err(mismatch("(h1, h0)", &json!([h1, h0]), &json!([e1, e0])));
        }
        checked = true;
    }
    let sigma_src: Vec<String> = (0..sigma.rows())
        .map(|i| sigma.row(i).iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
        .collect();
    Ok(Report {
        command: "cohomology",
        field: None,
        input: json!({ "orders": orders, "sigma": sigma_src.join(";"), "order_n": order_n }),
        result: json!({
            "module": m.module().invariant_factors(),
            "h1": h1,
            "h0": h0,
            "herbrand_quotient": herbrand_quotient(&m).to_string(),
        }),
        oracle_checked: checked,
    })
}
