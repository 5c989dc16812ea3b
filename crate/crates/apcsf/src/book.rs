//! Runs the guide's code snippets as doctests so the book cannot drift from
//! the library; each chapter becomes one documented item.

#[doc = include_str!("../../../book/src/introduction.md")]
pub struct GuideIntroduction;

#[doc = include_str!("../../../book/src/geometry.md")]
pub struct GuideGeometry;

#[doc = include_str!("../../../book/src/semidiscrete.md")]
pub struct GuideSemidiscrete;

#[doc = include_str!("../../../book/src/fulldiscrete.md")]
pub struct GuideFulldiscrete;

#[doc = include_str!("../../../book/src/convergence.md")]
pub struct GuideConvergence;

#[doc = include_str!("../../../book/src/cli.md")]
pub struct GuideCli;
