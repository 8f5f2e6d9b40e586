use serde::Serialize;

use commgames::audit::{merit_audit, AuditConfig, MeritRow};
use commgames::classical::{
    hull_membership_oracle, mixed_feasibility, mixed_strategy_from_certificate, strict_sr_protocol,
    synth_sr_strategy, HullResult, MixedFeasibility, SearchConfig,
};
use commgames::nsbox::{
    chsh, chsh_from_table, classical_cup_bound, cup_game_success, success_law, CupBound, NsBox,
};
use commgames::polygon::{polygon_search, synth_even_gon, synth_square_h3, PolygonSearchResult, PolygonTheory, SearchBudget};
use commgames::qubit::{
    aligned_trine_strategy, classical_embedding, h3_locus, h3_solution, montecarlo_classical_floor,
    noise_advantage_region, synth_h4_symmetric, synth_sic_strict, synth_uniform_odd, MonteCarloConfig,
};
use commgames::sweep::sweep_game_space;
use commgames::tol::INFEASIBLE_RESIDUAL;
use commgames::worstcase::{
    classical_guess_strategy, classical_worstcase_bound, sr_guess_strategy, worst_case_success, GuessStrategy,
    WorstCaseBound,
};
use commgames::{check_game, GameSpec, Verdict, VisitMatrix};

use crate::args::{Cli, Command, Figure, Format, Resource, ResourceGame, SweepArgs};
use crate::io::{csv_rows, json, load_game, load_strategy};
use crate::{AnyStrategy, CliError, Outcome, Status};

/// Every (resource, game) pair `synth` and `feasibility` accept.
pub const SUPPORTED: &str = "  cbit        feasibility: any non-strict game (n <= 20); synth: non-strict games it can win
  cbit-sr     any non-strict game (n <= 12 for feasibility); strict games H^n[1/(n-1)], n >= 3
  qubit       any 3-Restaurant game; strict H^4[1/3]; H^n(1/n) for odd n;
              H^4(g, (1-g)/3, (1-g)/3, (1-g)/3) with g <= 3/4; any game a cbit wins
  polygon:<m> synth: H^(m/2)(2/m) for even m >= 6, any non-strict 3-Restaurant game for m = 4;
              feasibility: any game with n <= 6 (numeric search)";

fn describe(spec: &GameSpec) -> String {
    let g: Vec<String> = spec.gamma().as_slice().iter().map(|x| format!("{x:.6}")).collect();
    if spec.is_strict() {
        format!("H^{}[1/{}]", spec.n(), spec.n() - 1)
    } else {
        format!("H^{}({})", spec.n(), g.join(", "))
    }
}

fn capability(resource: Resource, spec: &GameSpec) -> CliError {
    CliError::Capability {
        resource: resource.to_string(),
        game: describe(spec),
    }
}

fn only_json(cli: &Cli) -> Result<(), CliError> {
    match cli.format {
        Some(Format::Csv) => Err(CliError::Format("csv")),
        _ => Ok(()),
    }
}

pub fn dispatch(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Check { game, strategy } => {
            only_json(cli)?;
            check(&load_game(game)?, &load_strategy(strategy)?, cli.tol)
        }
        Command::Synth(rg) => {
            only_json(cli)?;
            synth(rg, cli.tol)
        }
        Command::Feasibility(rg) => {
            only_json(cli)?;
            feasibility(rg, cli)
        }
        Command::Sweep(s) => sweep(s, cli.format.unwrap_or(Format::Csv)),
        Command::Montecarlo { samples, refine_top } => {
            only_json(cli)?;
            let mut cfg = MonteCarloConfig {
                samples: *samples,
                refine_top: *refine_top,
                ..Default::default()
            };
            if let Some(seed) = cli.seed {
                cfg.seed = seed;
            }
            let result = montecarlo_classical_floor(&cfg)?;
            #[derive(Serialize)]
            struct Report<'a> {
                config: MonteCarloConfig,
                result: &'a commgames::qubit::MonteCarloResult,
            }
            Ok(success(json(&Report {
                config: cfg,
                result: &result,
            })))
        }
        Command::Nsbox { box_path } => nsbox(box_path.as_deref(), cli.format.unwrap_or(Format::Json)),
        Command::Worstcase => worstcase(cli.format.unwrap_or(Format::Json)),
        Command::StrictAudit { starts, polygon_max } => strict_audit(*starts, *polygon_max, cli),
    }
}

fn success(body: String) -> Outcome {
    Outcome {
        status: Status::Success,
        body,
    }
}

#[derive(Serialize)]
struct CheckReport<'a> {
    kind: &'a str,
    game: &'a GameSpec,
    verdict: &'a Verdict,
    visit_matrix: &'a VisitMatrix,
}

fn check(spec: &GameSpec, s: &AnyStrategy, tol: f64) -> Result<Outcome, CliError> {
    let m = s.visit_matrix();
    let verdict = check_game(spec, &m, tol)?;
    let body = json(&CheckReport {
        kind: s.kind(),
        game: spec,
        verdict: &verdict,
        visit_matrix: &m,
    });
    Ok(Outcome {
        status: if verdict.wins { Status::Success } else { Status::Negative },
        body,
    })
}

/// A winning strategy, `Ok(None)` when the resource provably cannot win.
pub fn synthesize(resource: Resource, spec: &GameSpec) -> Result<Option<AnyStrategy>, CliError> {
    let n = spec.n();
    let g = spec.gamma().as_slice();
    let s = match resource {
        Resource::Cbit => {
            if spec.is_strict() {
                return Err(capability(resource, spec));
            }
            match mixed_feasibility(spec)? {
                MixedFeasibility::Feasible(c) => AnyStrategy::Mixed(mixed_strategy_from_certificate(&c, spec)?),
                _ => return Ok(None),
            }
        }
        Resource::CbitSr => {
            if spec.is_strict() {
                AnyStrategy::Correlated(strict_sr_protocol(n)?)
            } else {
                AnyStrategy::Correlated(synth_sr_strategy(spec)?)
            }
        }
        Resource::Qubit => {
            let uniform = g.iter().all(|&x| (x - 1.0 / n as f64).abs() < 1e-12);
            let rest_equal = n == 4 && g[1..].iter().all(|&x| (x - g[1]).abs() < 1e-12);
            if n == 3 {
                AnyStrategy::Qubit(h3_solution(spec)?.strategy)
            } else if spec.is_strict() && n == 4 {
                AnyStrategy::Qubit(synth_sic_strict())
            } else if spec.is_strict() {
                return Err(capability(resource, spec));
            } else if uniform && n % 2 == 1 {
                AnyStrategy::Qubit(synth_uniform_odd(n)?)
            } else if rest_equal && g[0] > 0.0 && g[0] <= 0.75 {
                AnyStrategy::Qubit(synth_h4_symmetric(g[0])?)
            } else if let MixedFeasibility::Feasible(c) = mixed_feasibility(spec)? {
                AnyStrategy::Qubit(classical_embedding(&mixed_strategy_from_certificate(&c, spec)?)?)
            } else {
                return Err(capability(resource, spec));
            }
        }
        Resource::Polygon(m) => {
            let uniform = g.iter().all(|&x| (x - 1.0 / n as f64).abs() < 1e-12);
            if !spec.is_strict() && uniform && m == 2 * n && n >= 3 {
                AnyStrategy::Polygon(synth_even_gon(n)?)
            } else if !spec.is_strict() && m == 4 && n == 3 {
                AnyStrategy::Polygon(synth_square_h3(spec)?.strategy)
            } else {
                return Err(capability(resource, spec));
            }
        }
    };
    Ok(Some(s))
}

#[derive(Serialize)]
struct SynthReport<'a> {
    resource: String,
    game: &'a GameSpec,
    verdict: &'a Verdict,
    visit_matrix: &'a VisitMatrix,
    strategy: &'a AnyStrategy,
}

#[derive(Serialize)]
struct NoStrategy<'a, T: Serialize> {
    resource: String,
    game: &'a GameSpec,
    status: &'static str,
    reason: T,
}

fn synth(rg: &ResourceGame, tol: f64) -> Result<Outcome, CliError> {
    let spec = load_game(&rg.game)?;
    let Some(s) = synthesize(rg.resource, &spec)? else {
        return Ok(Outcome {
            status: Status::Negative,
            body: json(&NoStrategy {
                resource: rg.resource.to_string(),
                game: &spec,
                status: "infeasible",
                reason: mixed_feasibility(&spec)?,
            }),
        });
    };
    let m = s.visit_matrix();
    let verdict = check_game(&spec, &m, tol)?;
    let body = json(&SynthReport {
        resource: rg.resource.to_string(),
        game: &spec,
        verdict: &verdict,
        visit_matrix: &m,
        strategy: &s,
    });
    Ok(Outcome {
        status: if verdict.wins { Status::Success } else { Status::Negative },
        body,
    })
}

#[derive(Serialize)]
#[serde(untagged)]
enum Evidence {
    Mixed(MixedFeasibility),
    Hull(HullResult),
    Strategy(AnyStrategy),
    Search(PolygonSearchResult),
}

#[derive(Serialize)]
struct FeasibilityReport<'a> {
    resource: String,
    game: &'a GameSpec,
    /// feasible, infeasible or indeterminate.
    status: &'static str,
    evidence: Evidence,
}

fn feasibility(rg: &ResourceGame, cli: &Cli) -> Result<Outcome, CliError> {
    let spec = load_game(&rg.game)?;
    let (status, evidence) = match rg.resource {
        Resource::Cbit => {
            if spec.is_strict() {
                return Err(capability(rg.resource, &spec));
            }
            let f = mixed_feasibility(&spec)?;
            let status = match f {
                MixedFeasibility::Feasible(_) => "feasible",
                MixedFeasibility::Infeasible { .. } => "infeasible",
                MixedFeasibility::BoundaryIndeterminate { .. } => "indeterminate",
            };
            (status, Evidence::Mixed(f))
        }
        Resource::CbitSr if !spec.is_strict() => {
            let h = hull_membership_oracle(&spec)?;
            let status = if h.feasible_with_unbounded_sr { "feasible" } else { "infeasible" };
            (status, Evidence::Hull(h))
        }
        Resource::CbitSr | Resource::Qubit => {
            let s = synthesize(rg.resource, &spec)?.expect("these resources never report infeasible");
            let wins = check_game(&spec, &s.visit_matrix(), cli.tol)?.wins;
            (if wins { "feasible" } else { "indeterminate" }, Evidence::Strategy(s))
        }
        Resource::Polygon(m) => {
            if spec.n() > 6 {
                return Err(capability(rg.resource, &spec));
            }
            let mut budget = SearchBudget::default();
            if let Some(seed) = cli.seed {
                budget.seed = seed;
            }
            let r = polygon_search(m, &spec, &budget)?;
            let status = if r.min_residual <= cli.tol {
                "feasible"
            } else if r.min_residual > INFEASIBLE_RESIDUAL {
                "infeasible"
            } else {
                "indeterminate"
            };
            (status, Evidence::Search(r))
        }
    };
    Ok(Outcome {
        status: if status == "feasible" { Status::Success } else { Status::Negative },
        body: json(&FeasibilityReport {
            resource: rg.resource.to_string(),
            game: &spec,
            status,
            evidence,
        }),
    })
}

fn sweep(s: &SweepArgs, format: Format) -> Result<Outcome, CliError> {
    fn emit<T: Serialize>(rows: &[T], format: Format) -> Result<Outcome, CliError> {
        Ok(success(match format {
            Format::Csv => csv_rows(rows)?,
            Format::Json => json(&rows),
        }))
    }
    match s.figure() {
        Figure::GameSpace => emit(&sweep_game_space(s.resolution.unwrap_or(60))?, format),
        Figure::Noise => emit(&noise_advantage_region(s.resolution.unwrap_or(200))?, format),
        Figure::Locus => {
            let gammas = s.gamma1.clone().unwrap_or_else(|| vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6]);
            let mut rows = Vec::new();
            for g in gammas {
                rows.extend(h3_locus(g, s.points)?);
            }
            emit(&rows, format)
        }
        Figure::PolygonTable => {
            let n = s.n.ok_or_else(|| CliError::Usage("polygon-table needs --n".into()))?;
            let t = PolygonTheory::new(n)?;
            let table = t.probability_table();
            match format {
                Format::Json => Ok(success(json(&table))),
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(Vec::new());
                    let mut header = vec!["effect".to_string()];
                    header.extend((1..=n).map(|j| format!("omega_{j}")));
                    w.write_record(&header)?;
                    for (i, row) in table.iter().enumerate() {
                        let mut rec = vec![format!("e_{}", i + 1)];
                        rec.extend(row.iter().map(|p| format!("{p:?}")));
                        w.write_record(&rec)?;
                    }
                    let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
                    Ok(success(String::from_utf8(bytes).expect("utf-8")))
                }
            }
        }
    }
}

#[derive(Serialize)]
struct BoxRow {
    name: String,
    chsh: f64,
    chsh_from_table: f64,
    p12: f64,
    p34: f64,
    p13: f64,
    p24: f64,
    p14: f64,
    p23: f64,
    average: f64,
    law: f64,
}

#[derive(Serialize)]
struct BoxReport {
    boxes: Vec<(BoxRow, NsBox)>,
    classical_bound: CupBound,
    constant_encoding_bound: CupBound,
}

fn nsbox(path: Option<&std::path::Path>, format: Format) -> Result<Outcome, CliError> {
    let boxes: Vec<(String, NsBox)> = match path {
        Some(p) => vec![(p.display().to_string(), crate::io::parse_file(p)?)],
        None => vec![
            ("pr".into(), NsBox::pr()),
            ("tsirelson".into(), NsBox::pr().mix(&NsBox::product(), std::f64::consts::FRAC_1_SQRT_2)),
            ("local".into(), NsBox::deterministic([0, 0], [0, 0])),
            ("product".into(), NsBox::product()),
        ],
    };
    let rows: Vec<(BoxRow, NsBox)> = boxes
        .into_iter()
        .map(|(name, b)| {
            let o = cup_game_success(&b);
            let [p12, p34, p13, p24, p14, p23] = o.per_pair;
            let row = BoxRow {
                name,
                chsh: chsh(&b),
                chsh_from_table: chsh_from_table(&b),
                p12,
                p34,
                p13,
                p24,
                p14,
                p23,
                average: o.average,
                law: success_law(&b),
            };
            (row, b)
        })
        .collect();
    Ok(success(match format {
        Format::Csv => csv_rows(&rows.iter().map(|(r, _)| r).collect::<Vec<_>>())?,
        Format::Json => json(&BoxReport {
            boxes: rows,
            classical_bound: classical_cup_bound(false),
            constant_encoding_bound: classical_cup_bound(true),
        }),
    }))
}

#[derive(Serialize)]
struct GuessRow {
    resource: &'static str,
    value: f64,
    correlation: VisitMatrix,
}

#[derive(Serialize)]
struct GuessReport {
    resources: Vec<GuessRow>,
    classical_bound: WorstCaseBound,
}

fn worstcase(format: Format) -> Result<Outcome, CliError> {
    let strategies = [
        ("cbit", GuessStrategy::ClassicalMixed(classical_guess_strategy())),
        ("cbit-sr", GuessStrategy::ClassicalCorrelated(sr_guess_strategy())),
        ("qubit", GuessStrategy::Quantum(aligned_trine_strategy())),
    ];
    let resources: Vec<GuessRow> = strategies
        .into_iter()
        .map(|(resource, s)| GuessRow {
            resource,
            value: worst_case_success(&s),
            correlation: s.correlation(),
        })
        .collect();
    Ok(success(match format {
        Format::Csv => {
            #[derive(Serialize)]
            struct Flat {
                resource: &'static str,
                value: f64,
            }
            csv_rows(&resources.iter().map(|r| Flat { resource: r.resource, value: r.value }).collect::<Vec<_>>())?
        }
        Format::Json => json(&GuessReport {
            resources,
            classical_bound: classical_worstcase_bound(),
        }),
    }))
}

#[derive(Serialize)]
struct AuditReport<'a> {
    config: &'a AuditConfig,
    rows: &'a [MeritRow],
}

fn strict_audit(starts: usize, polygon_max: usize, cli: &Cli) -> Result<Outcome, CliError> {
    if polygon_max < 3 {
        return Err(CliError::Usage("--polygon-max must be at least 3".into()));
    }
    let mut cfg = AuditConfig {
        strict_search: SearchConfig {
            starts,
            ..Default::default()
        },
        polygon_sizes: (4.min(polygon_max)..=polygon_max).collect(),
        ..Default::default()
    };
    if let Some(seed) = cli.seed {
        cfg.strict_search.seed = seed;
        cfg.polygon_budget.seed = seed;
    }
    let rows = merit_audit(&cfg)?;
    let status = if rows.iter().all(|r| r.holds) { Status::Success } else { Status::Negative };
    let body = match cli.format.unwrap_or(Format::Json) {
        Format::Json => json(&AuditReport { config: &cfg, rows: &rows }),
        Format::Csv => {
            #[derive(Serialize)]
            struct Flat<'a> {
                relation: &'a str,
                task: &'a str,
                holds: bool,
                evidence: String,
            }
            let flat: Vec<Flat> = rows
                .iter()
                .map(|r| Flat {
                    relation: &r.relation,
                    task: &r.task,
                    holds: r.holds,
                    evidence: r
                        .evidence
                        .iter()
                        .map(|e| format!("{} [{}]", e.claim, if e.holds { "pass" } else { "fail" }))
                        .collect::<Vec<_>>()
                        .join("; "),
                })
                .collect();
            csv_rows(&flat)?
        }
    };
    Ok(Outcome { status, body })
}
