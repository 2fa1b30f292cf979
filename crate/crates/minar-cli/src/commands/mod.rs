pub mod compare;
pub mod fit;
pub mod moments;
pub mod simulate;
pub mod study;

use clap::ValueEnum;
use minar::mixtures::Family;

/// Innovation family flag shared by the subcommands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    /// Poisson counts mixed over a lognormal rate.
    Pl,
    /// Geometric counts mixed over a logit-normal success probability.
    Gl,
}

impl From<FamilyArg> for Family {
    fn from(arg: FamilyArg) -> Family {
        match arg {
            FamilyArg::Pl => Family::PoissonLognormal,
            FamilyArg::Gl => Family::GeometricLogitnormal,
        }
    }
}
