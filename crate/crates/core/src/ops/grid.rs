use std::collections::HashSet;

use crate::error::{Error, Result};

/// Integer displacement of one kernel element from the output position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridOffset {
    pub dx: i64,
    pub dy: i64,
}

/// The sampling grid of a convolution: one [`GridOffset`] per kernel element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelGrid {
    offsets: Vec<GridOffset>,
}

impl KernelGrid {
    pub fn new(offsets: Vec<GridOffset>) -> Result<Self> {
        if offsets.is_empty() {
            return Err(Error::arg("kernel grid must have at least one element"));
        }
        let distinct: HashSet<_> = offsets.iter().collect();
        if distinct.len() != offsets.len() {
            return Err(Error::arg("kernel grid positions must be distinct"));
        }
        Ok(Self { offsets })
    }

    /// Odd `size x size` grid centred on the origin, row-major from
    /// `(-r, -r)` to `(+r, +r)`.
    pub fn square(size: usize) -> Result<Self> {
        if size == 0 || size.is_multiple_of(2) {
            return Err(Error::arg(format!("square kernel size must be odd, got {size}")));
        }
        let r = (size / 2) as i64;
        let offsets = (-r..=r)
            .flat_map(|dy| (-r..=r).map(move |dx| GridOffset { dx, dy }))
            .collect();
        Self::new(offsets)
    }

    pub fn pointwise() -> Self {
        Self {
            offsets: vec![GridOffset { dx: 0, dy: 0 }],
        }
    }

    /// Number of kernel elements `K`.
    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    pub fn offsets(&self) -> &[GridOffset] {
        &self.offsets
    }

    /// Index of the `(0, 0)` element, if the grid has one.
    pub fn center_index(&self) -> Option<usize> {
        self.offsets.iter().position(|o| o.dx == 0 && o.dy == 0)
    }
}
