//! Materializes scenario declarations as core objects.

use std::collections::BTreeMap;

use monorep::linalg::from_rows;
use monorep::{Bifunction, ConvexFunction, GridFn, MonotoneOperator, PrimalDualPoint, ProductGrid, Result};

use crate::scenario::{Declaration, Scenario};

#[derive(Debug, Clone)]
pub enum Object {
    Function(ConvexFunction),
    Operator(MonotoneOperator),
    Bifunction(Bifunction),
}

/// Core objects by name.
#[derive(Debug, Default)]
pub struct Objects(BTreeMap<String, Object>);

impl Objects {
    pub fn get(&self, name: &str) -> Option<&Object> {
        self.0.get(name)
    }

    pub fn function(&self, name: &str) -> &ConvexFunction {
        match self.0.get(name) {
            Some(Object::Function(f)) => f,
            _ => panic!("{name} is not a built function"),
        }
    }

    pub fn operator(&self, name: &str) -> &MonotoneOperator {
        match self.0.get(name) {
            Some(Object::Operator(t)) => t,
            _ => panic!("{name} is not a built operator"),
        }
    }

    pub fn bifunction(&self, name: &str) -> &Bifunction {
        match self.0.get(name) {
            Some(Object::Bifunction(h)) => h,
            _ => panic!("{name} is not a built bifunction"),
        }
    }
}

fn sample_fn(f: &ConvexFunction, grid: ProductGrid) -> Result<GridFn> {
    let mut values = Vec::with_capacity(grid.len());
    for x in grid.points() {
        values.push(f.eval(&x)?.value());
    }
    GridFn::new(grid, values)
}

fn build_one(s: &Scenario, d: &Declaration, built: &Objects) -> Result<Object> {
    let p = &d.params;
    let n = s.object_dim(&d.name).unwrap_or(s.dimension);
    let vec_or_zero = |key: &str| p.vector(key).unwrap_or_else(|| vec![0.0; n]);
    let name = |key: &str| p.name(key).expect("validated reference");
    let grid = |dim: usize| {
        let m = p.num("m").expect("validated count") as usize;
        ProductGrid::uniform_box(dim, p.num("r").expect("validated number"), m)
    };
    Ok(match d.kind.as_str() {
        "half-square" => Object::Function(ConvexFunction::half_square(n)?),
        "quadratic" => Object::Function(ConvexFunction::quadratic(
            from_rows(&p.matrix("a").expect("validated matrix"))?,
            vec_or_zero("b"),
            p.num_or("c", 0.0),
        )?),
        "abs" => Object::Function(ConvexFunction::abs_norm(n)?),
        "box-indicator" => Object::Function(ConvexFunction::box_indicator(vec_or_zero("lo"), vec_or_zero("hi"))?),
        "box-support" => Object::Function(ConvexFunction::box_support(vec_or_zero("lo"), vec_or_zero("hi"))?),
        "point-indicator" => Object::Function(ConvexFunction::point_indicator(vec_or_zero("p"))?),
        "shifted" => Object::Function(ConvexFunction::translated(
            built.function(name("base")).clone(),
            vec_or_zero("shift"),
            vec_or_zero("tilt"),
            p.num_or("offset", 0.0),
        )?),
        "sum" => {
            let parts = p.names("parts").expect("validated names");
            Object::Function(ConvexFunction::separable(
                parts.iter().map(|q| built.function(q).clone()).collect(),
            )?)
        }
        "fn-grid" => Object::Function(ConvexFunction::grid(sample_fn(built.function(name("base")), grid(n)?)?)),
        "identity" => Object::Operator(MonotoneOperator::identity(n)?),
        "affine" => Object::Operator(MonotoneOperator::affine(
            from_rows(&p.matrix("a").expect("validated matrix"))?,
            vec_or_zero("b"),
        )?),
        "rotation2d" => Object::Operator(MonotoneOperator::rotation2d()),
        "subdiff" => Object::Operator(MonotoneOperator::subdifferential(built.function(name("f")).clone())?),
        "graph-points" => {
            let xs = p.matrix("x").expect("validated rows");
            let ys = p.matrix("xstar").expect("validated rows");
            let pts = xs
                .into_iter()
                .zip(ys)
                .map(|(x, y)| PrimalDualPoint::new(x, y))
                .collect::<Result<Vec<_>>>()?;
            Object::Operator(MonotoneOperator::sampled(pts)?)
        }
        "graph-sample" => {
            let base = built.operator(name("base"));
            let xs: Vec<Vec<f64>> = grid(n)?.points().collect();
            Object::Operator(MonotoneOperator::sampled(base.sample_graph(&xs)?)?)
        }
        "separable" => Object::Bifunction(Bifunction::separable(built.function(name("f")).clone())?),
        "fitzpatrick" => Object::Bifunction(Bifunction::fitzpatrick(built.operator(name("op")))?),
        "sigma" => Object::Bifunction(Bifunction::sigma(built.operator(name("op")))?),
        "quadratic-form" => Object::Bifunction(Bifunction::quadratic_form(
            from_rows(&p.matrix("q").expect("validated matrix"))?,
            p.vector("l").unwrap_or_else(|| vec![0.0; 2 * n]),
            p.num_or("k", 0.0),
        )?),
        "pairing" => Object::Bifunction(Bifunction::shifted_pairing(n, p.num_or("shift", 0.0))?),
        "bi-grid" => Object::Bifunction(built.bifunction(name("base")).sample_on(grid(2 * n)?)?),
        "translated" => Object::Bifunction(
            built
                .bifunction(name("base"))
                .translate(&vec_or_zero("z"), &vec_or_zero("zstar"))?,
        ),
        other => unreachable!("unvalidated kind {other}"),
    })
}

/// Builds every declared object in order. The scenario must be validated.
pub fn build_objects(s: &Scenario) -> Result<Objects> {
    let mut built = Objects::default();
    for d in &s.objects {
        let obj = build_one(s, d, &built)?;
        built.0.insert(d.name.clone(), obj);
    }
    Ok(built)
}
