//! Named regression series: the rank-two examples, the D₄ spin displays and
//! the B₂ determinant `Q^{(3)}_{(2,2̄,1̄)}`, in canonical text form.

use crate::builders::{
    build_q1, build_q1_hat, BuildError, SeriesBank, SpinProvider, SpinSign, SwapProvider,
};
use crate::determinant::casorati;
use crate::root_data::{parse_tuple, AlgebraContext};
use crate::series::GradedSeries;

/// Truncation used for every stored fixture.
pub const FIXTURE_DEPTH: u32 = 3;

pub struct Fixture {
    pub name: &'static str,
    pub series: GradedSeries,
}

impl Fixture {
    pub fn file_name(&self) -> String {
        format!("{}.txt", self.name)
    }

    pub fn text(&self) -> String {
        self.series.to_canonical_string()
    }
}

fn q1(name: &'static str, ctx: AlgebraContext, i: &str, d: u32) -> Result<Fixture, BuildError> {
    let idx = parse_tuple(i).expect("literal index")[0];
    Ok(Fixture {
        name,
        series: build_q1(&ctx, idx, d)?,
    })
}

fn spin(name: &'static str, ctx: AlgebraContext, node: usize, eps: &str, d: u32) -> Fixture {
    let e: SpinSign = eps.parse().expect("literal sign");
    let series = SwapProvider::new()
        .spin_series(&ctx, node, &e, d)
        .expect("swap provider covers D4");
    Fixture { name, series }
}

/// Every fixture at truncation `d`, in a fixed order.
pub fn all_fixtures(d: u32) -> Result<Vec<Fixture>, BuildError> {
    let a2 = AlgebraContext::a(2);
    let b2 = AlgebraContext::b(2);
    let c2 = AlgebraContext::c(2);
    let d4 = AlgebraContext::d(4);
    let mut out = vec![
        q1("a2-q1-1", a2, "1", d)?,
        q1("a2-q1-2", a2, "2", d)?,
        q1("a2-q1-3", a2, "3", d)?,
        q1("b2-q1-1", b2, "1", d)?,
        q1("b2-q1-2", b2, "2", d)?,
        q1("b2-q1-2b", b2, "2b", d)?,
        q1("b2-q1-1b", b2, "1b", d)?,
        q1("c2-q1-1", c2, "1", d)?,
        q1("c2-q1-2", c2, "2", d)?,
        Fixture {
            name: "c2-q1-0-hat",
            series: build_q1_hat(&c2, false, d)?,
        },
        Fixture {
            name: "c2-q1-0b-hat",
            series: build_q1_hat(&c2, true, d)?,
        },
        q1("c2-q1-2b", c2, "2b", d)?,
        q1("c2-q1-1b", c2, "1b", d)?,
        q1("d4-q1-2b", d4, "2b", d)?,
        q1("d4-q1-1b", d4, "1b", d)?,
        spin("d4-r3-mmpm", d4, 3, "(--+-)", d),
        spin("d4-r3-mmmp", d4, 3, "(---+)", d),
        spin("d4-r4-mmpp", d4, 4, "(--++)", d),
        spin("d4-r4-mmmm", d4, 4, "(----)", d),
    ];
    let j = parse_tuple("2,2b,1b").expect("literal tuple");
    out.push(Fixture {
        name: "b2-q3-2-2b-1b",
        series: casorati(&b2, &j, d, 0, &SeriesBank::new())?,
    });
    Ok(out)
}
