//! Compiles and runs every code snippet in the guide as a doctest, so
//! `book/src` cannot drift from the library.

#![cfg(doctest)]

macro_rules! chapter {
    ($name:ident, $file:literal) => {
        #[doc = include_str!(concat!("../../../book/src/", $file))]
        mod $name {}
    };
}

chapter!(introduction, "introduction.md");
chapter!(wirtinger_calculus, "wirtinger-calculus.md");
chapter!(metrics_and_chern, "metrics-and-chern.md");
chapter!(dbar_operators, "dbar-operators.md");
chapter!(connections_and_curvature, "connections-and-curvature.md");
chapter!(higgs_and_conjugation, "higgs-and-conjugation.md");
chapter!(transforms, "transforms.md");
chapter!(harmonicity, "harmonicity.md");
chapter!(monodromy, "monodromy.md");
chapter!(degree_growth, "degree-growth.md");
chapter!(rank_one_variations, "rank-one-variations.md");
chapter!(cli, "cli.md");
