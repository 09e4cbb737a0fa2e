//! Morphisms between free cdgas, given on generators.

use num_traits::Zero;

use super::SullivanError;
use crate::exactla::{RationalMatrix, RowSpace};
use crate::gca::{GcaElement, GcaPresentation};

#[derive(Debug, Clone)]
pub struct CdgaMorphism {
    source: GcaPresentation,
    target: GcaPresentation,
    images: Vec<GcaElement>,
}

impl CdgaMorphism {
    /// `images` lists `(source generator, image in target)`; unlisted
    /// generators map to zero. Images must have the generator's degree.
    pub fn new(
        source: GcaPresentation,
        target: GcaPresentation,
        images: Vec<(String, GcaElement)>,
    ) -> Result<Self, SullivanError> {
        let mut table = vec![GcaElement::zero(); source.num_generators()];
        for (name, image) in images {
            let i = source
                .index_of(&name)
                .ok_or_else(|| SullivanError::InvalidMorphism(format!("unknown source generator `{name}`")))?;
            let degree = source.generator(i).degree;
            if !image.is_zero() && target.element_degree(&image) != Some(degree) {
                return Err(SullivanError::InvalidMorphism(format!(
                    "image of `{name}` must be homogeneous of degree {degree}"
                )));
            }
            table[i] = image;
        }
        Ok(CdgaMorphism {
            source,
            target,
            images: table,
        })
    }

    /// Sends each source generator to the target generator of the same name.
    pub fn inclusion(source: GcaPresentation, target: GcaPresentation) -> Result<Self, SullivanError> {
        let images = source
            .generators()
            .iter()
            .map(|g| Ok((g.name.clone(), target.named(&g.name)?)))
            .collect::<Result<Vec<_>, SullivanError>>()?;
        CdgaMorphism::new(source, target, images)
    }

    pub fn source(&self) -> &GcaPresentation {
        &self.source
    }

    pub fn target(&self) -> &GcaPresentation {
        &self.target
    }

    pub fn image_of(&self, index: usize) -> &GcaElement {
        &self.images[index]
    }

    pub fn apply(&self, e: &GcaElement) -> GcaElement {
        let t = &self.target;
        let mut out = GcaElement::zero();
        for (m, c) in e.terms() {
            let mut value = t.one();
            for (i, &exp) in m.exponents().iter().enumerate() {
                if exp > 0 {
                    value = t.multiply(&value, &t.power(&self.images[i], exp));
                }
            }
            out.add_scaled(c, &value);
        }
        out
    }

    /// First generator `g` with `d f(g) != f(d g)`, among generators whose
    /// differential lies inside both truncation windows.
    pub fn commutation_failure(&self) -> Option<String> {
        let limit = self.source.truncation().min(self.target.truncation());
        (0..self.source.num_generators())
            .filter(|&i| self.source.generator(i).degree < limit)
            .find(|&i| {
                let lhs = self.target.apply_differential(&self.images[i]);
                let rhs = self.apply(self.source.d_of(i));
                lhs != rhs
            })
            .map(|i| self.source.generator(i).name.clone())
    }

    pub fn check(&self) -> Result<(), SullivanError> {
        match self.commutation_failure() {
            None => Ok(()),
            Some(g) => Err(SullivanError::InvalidMorphism(format!("does not commute with d on `{g}`"))),
        }
    }

    /// Matrix of the induced map `H^degree(source) -> H^degree(target)` in
    /// the representative bases returned by `GcaPresentation::cohomology`.
    pub fn induced_on_cohomology(&self, degree: u32) -> Result<RationalMatrix, SullivanError> {
        let src = self.source.cohomology(degree)?;
        let tgt = self.target.cohomology(degree)?;
        let basis = self.target.monomial_basis(degree)?;
        let index = GcaPresentation::basis_index(&basis);
        let coords = |e: &GcaElement| self.target.coordinates(e, &index);

        let mut space = RowSpace::new();
        if degree > 0 {
            for col in self.target.differential_columns(degree - 1)?.1 {
                space.insert(col);
            }
        }
        let offset = space.inserted();
        for r in &tgt.representatives {
            space.insert(coords(r));
        }
        let mut mat = RationalMatrix::zeros(tgt.dim(), src.dim());
        for (j, r) in src.representatives.iter().enumerate() {
            let image = coords(&self.apply(r));
            let comb = space
                .express(&image)
                .expect("image of a cocycle is a cocycle when the morphism commutes with d");
            for (id, c) in comb {
                if id >= offset && !c.is_zero() {
                    mat.set(id - offset, j, c);
                }
            }
        }
        Ok(mat)
    }
}
