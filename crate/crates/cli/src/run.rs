//! Command dispatch.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value as Json};

use monorep::convexfn::{eps_subdiff_test, fenchel_duality, fenchel_young_gap};
use monorep::operators::eps_enlargement_test;
use monorep::refine::{br_refine, br_refine_scaled, br_step, maximality_probe, strict_br};
use monorep::representations::{
    check_dual_condition, family_membership, fitzpatrick_eval, sigma_eval, translation_conjugate_check,
    translation_gap_deviation, TestSet,
};
use monorep::tolerance::{PROBE_BUDGET, TOL_GAP};
use monorep::{Bifunction, ExtReal, PrimalDualPoint, RefinementTrace, Result, TolClass};

use crate::build::{build_objects, Object, Objects};
use crate::scenario::{Scenario, Verb};

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Replaces the scenario seed.
    pub seed: Option<u64>,
    /// Floor on the tolerance class. `Grid` loosens every verdict to the
    /// grid tolerances; `ClosedForm` leaves results unchanged.
    pub tol_class: Option<TolClass>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub scenario: String,
    pub command: &'static str,
    pub seed: u64,
    pub tol_class: TolClass,
    pub outputs: Json,
    pub warnings: Vec<String>,
    pub elapsed_ms: f64,
    /// Refinement trace of `br-refine` and `strict-br`, for CSV export.
    #[serde(skip)]
    pub trace: Option<RefinementTrace>,
}

impl RunReport {
    /// Pretty JSON with sorted keys.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

fn to_json<T: Serialize>(v: &T) -> Json {
    serde_json::to_value(v).expect("reports serialize")
}

fn point(x: Vec<f64>, xstar: Vec<f64>) -> Result<PrimalDualPoint> {
    PrimalDualPoint::new(x, xstar)
}

fn gap_at(h: &Bifunction, p: &PrimalDualPoint) -> Result<ExtReal> {
    Ok(h.eval(p)?.add_finite(-p.duality_product()))
}

struct Ctx<'a> {
    s: &'a Scenario,
    objects: Objects,
    warnings: Vec<String>,
    floor: TolClass,
}

impl Ctx<'_> {
    fn name(&self, key: &str) -> &str {
        self.s.command.params.name(key).expect("validated reference")
    }

    fn num(&self, key: &str, default: f64) -> f64 {
        self.s.command.params.num_or(key, default)
    }

    fn vector(&self, key: &str) -> Vec<f64> {
        self.s.command.params.vector(key).expect("validated vector")
    }

    fn point(&self) -> Result<PrimalDualPoint> {
        point(self.vector("x"), self.vector("xstar"))
    }

    fn dim(&self, key: &str) -> usize {
        self.s.object_dim(self.name(key)).expect("validated reference")
    }

    fn class(&self, c: TolClass) -> TolClass {
        c.join(self.floor)
    }

    fn bifunction(&mut self, key: &str) -> Bifunction {
        let name = self.name(key).to_string();
        let h = self.objects.bifunction(&name).clone();
        if h.is_lower_bound() {
            self.warnings.push(format!(
                "{name} is a lower bound built from graph samples, not an exact representation"
            ));
        }
        h
    }
}

/// Builds the scenario objects and runs its command.
pub fn run(s: &Scenario, opts: &RunOptions) -> Result<RunReport> {
    let start = Instant::now();
    let seed = opts.seed.unwrap_or(s.seed);
    let mut cx = Ctx {
        s,
        objects: build_objects(s)?,
        warnings: Vec::new(),
        floor: opts.tol_class.unwrap_or_default(),
    };
    let mut trace = None;
    let (outputs, class) = dispatch(&mut cx, seed, &mut trace)?;
    Ok(RunReport {
        scenario: s.name.clone(),
        command: s.command.verb.as_str(),
        seed,
        tol_class: class,
        outputs,
        warnings: cx.warnings,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        trace,
    })
}

fn dispatch(cx: &mut Ctx<'_>, seed: u64, trace: &mut Option<RefinementTrace>) -> Result<(Json, TolClass)> {
    let verb = cx.s.command.verb;
    Ok(match verb {
        Verb::CheckFamily => {
            let h = cx.bifunction("h");
            let t = cx.objects.operator(cx.name("op")).clone();
            let set = TestSet::box_grid(h.dim(), cx.num("r", 2.0), cx.num("m", 21.0) as usize)?;
            let mut rep = family_membership(&h, &t, &set)?;
            rep.tol_class = cx.class(rep.tol_class);
            let tol = rep.tol_class.rep();
            rep.member = rep.min_gap.is_none_or(|g| g.value() >= -tol)
                && rep.graph_max_deviation <= tol
                && rep.convexity_violations == 0;
            (to_json(&rep), rep.tol_class)
        }
        Verb::FitzEval | Verb::SigmaEval => {
            let t = cx.objects.operator(cx.name("op"));
            let p = cx.point()?;
            let value = if verb == Verb::FitzEval {
                fitzpatrick_eval(t, &p)?
            } else {
                sigma_eval(t, &p)?
            };
            let class = cx.class(t.tol_class());
            if matches!(t.kind(), monorep::operators::OperatorKind::SampledGraph(_)) {
                cx.warnings.push("sampled graph: the value is a lower bound of the exact function".into());
            }
            (
                json!({
                    "value": value,
                    "pairing": p.duality_product(),
                    "gap": value.add_finite(-p.duality_product()),
                }),
                class,
            )
        }
        Verb::Conjugate => {
            let name = cx.name("of").to_string();
            let at = cx.vector("at");
            match cx.objects.get(&name).expect("validated reference") {
                Object::Function(f) => {
                    let fc = f.conjugate()?;
                    if let Some(w) = f.boundary_warning(&at) {
                        cx.warnings.push(w);
                    }
                    let class = cx.class(f.tol_class());
                    (json!({ "value": fc.eval(&at)? }), class)
                }
                Object::Bifunction(_) => {
                    let h = cx.bifunction("of");
                    let hc = h.conjugate()?;
                    if !hc.is_valid_at(&at) {
                        cx.warnings.push(format!(
                            "argument lies outside the slope region where the conjugate of {name} is exact"
                        ));
                    }
                    let class = cx.class(h.tol_class());
                    (json!({ "value": ExtReal::from_f64(hc.eval_w(&at)?) }), class)
                }
                Object::Operator(_) => unreachable!("validated category"),
            }
        }
        Verb::DualCondition => {
            let h = cx.bifunction("h");
            let set = TestSet::box_grid(h.dim(), cx.num("r", 2.0), cx.num("m", 21.0) as usize)?;
            let mut rep = check_dual_condition(&h, &set)?;
            rep.tol_class = cx.class(rep.tol_class);
            let tol = rep.tol_class.dual();
            rep.verdict = rep.primal_min_gap.value() >= -tol && rep.dual_min_gap.value() >= -tol;
            if rep.skipped_invalid > 0 {
                cx.warnings.push(format!(
                    "{} test points lie outside the slope region of the grid conjugate and were skipped",
                    rep.skipped_invalid
                ));
            }
            (to_json(&rep), rep.tol_class)
        }
        Verb::FenchelDuality => {
            let f = cx.objects.function(cx.name("f"));
            let g = cx.objects.function(cx.name("g"));
            let rep = fenchel_duality(f, g)?;
            let class = cx.class(rep.tol_class);
            let mut out = to_json(&rep);
            out["tol_class"] = to_json(&class);
            (out, class)
        }
        Verb::EpsTest => {
            let f = cx.objects.function(cx.name("f"));
            let p = point(cx.vector("x"), cx.vector("s"))?;
            let eps = cx.num("eps", 0.0);
            let inside = eps_subdiff_test(f, &p, eps)?;
            if let Some(w) = f.boundary_warning(&p.xstar) {
                cx.warnings.push(w);
            }
            let class = cx.class(f.tol_class());
            (json!({ "inside": inside, "fenchel_young_gap": fenchel_young_gap(f, &p)? }), class)
        }
        Verb::EnlargementTest => {
            let t = cx.objects.operator(cx.name("op"));
            let mut rep = eps_enlargement_test(t, &cx.point()?, cx.num("eps", 0.0))?;
            rep.tol_class = cx.class(rep.tol_class);
            let eps = cx.num("eps", 0.0);
            rep.inside = rep.inf.is_finite() && rep.inf.value() >= -eps - rep.tol_class.mono();
            (to_json(&rep), rep.tol_class)
        }
        Verb::BrStep => {
            let h = cx.bifunction("h");
            let z = cx.point()?;
            let q = br_step(&h, &z, cx.num("eps", 0.0))?;
            let class = cx.class(h.tol_class());
            (
                json!({
                    "point": q,
                    "gap_before": gap_at(&h, &z)?,
                    "gap_after": gap_at(&h, &q)?,
                    "distance": q.distance(&z),
                }),
                class,
            )
        }
        Verb::BrRefine => {
            let h = cx.bifunction("h");
            let p = cx.point()?;
            let eps = cx.num("eps", 0.0);
            let tr = match cx.s.command.params.num("lambda") {
                Some(lambda) => br_refine_scaled(&h, &p, eps, lambda, TOL_GAP)?,
                None => br_refine(&h, &p, eps, TOL_GAP)?,
            };
            if !tr.converged {
                cx.warnings.push(tr.diagnostic.clone().unwrap_or_else(|| "refinement did not converge".into()));
            }
            let class = cx.class(tr.tol_class);
            let out = json!({
                "limit": tr.limit,
                "gaps": tr.gaps.iter().map(|g| ExtReal::from_f64(*g)).collect::<Vec<_>>(),
                "summary": tr.summary(),
            });
            *trace = Some(tr);
            (out, class)
        }
        Verb::StrictBr => {
            let t = cx.objects.operator(cx.name("op"));
            let rep = strict_br(t, &cx.point()?, cx.num("eps", 0.0), cx.num("eta", 0.0), cx.num("lambda", 0.0))?;
            let class = cx.class(rep.trace.tol_class.join(t.tol_class()));
            let mut out = to_json(&rep);
            out["trace"] = to_json(&rep.trace.summary());
            *trace = Some(rep.trace);
            (out, class)
        }
        Verb::MaximalityProbe => {
            let h = cx.bifunction("h");
            let t = cx.objects.operator(cx.name("op")).clone();
            let budget = cx.num("budget", PROBE_BUDGET as f64) as usize;
            let mut rep = maximality_probe(&h, &t, &cx.point()?, budget)?;
            rep.tol_class = cx.class(rep.tol_class);
            (to_json(&rep), rep.tol_class)
        }
        Verb::TranslateCheck => {
            let h = cx.bifunction("h");
            let n = cx.dim("h");
            let (z, zstar) = (cx.vector("z"), cx.vector("zstar"));
            let r = cx.num("r", 2.0);
            let count = cx.num("count", 100.0) as usize;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let points = (0..count)
                .map(|_| {
                    let mut draw = || (0..n).map(|_| rng.random_range(-r..=r)).collect::<Vec<_>>();
                    let x = draw();
                    point(x, draw())
                })
                .collect::<Result<Vec<_>>>()?;
            let gap = translation_gap_deviation(&h, &z, &zstar, &points)?;
            let conj = translation_conjugate_check(&h, &z, &zstar, &points)?;
            cx.warnings.extend(conj.warnings.iter().cloned());
            let class = cx.class(h.tol_class().join(conj.tol_class));
            let tol = class.rep();
            (
                json!({
                    "gap_max_deviation": ExtReal::from_f64(gap),
                    "gap_identity_holds": gap <= tol,
                    "conjugate": conj,
                    "conjugate_identity_holds": conj.max_deviation <= tol,
                    "points": count,
                }),
                class,
            )
        }
    })
}
