//! Structured box meshes split into tetrahedra, used for tests, benchmarks and
//! the `gen-box` command.

use super::{Mesh, MeshError};
use crate::vec3::Vec3;

/// Patch names for the six box sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatchNames {
    pub xmin: String,
    pub xmax: String,
    pub ymin: String,
    pub ymax: String,
    pub zmin: String,
    pub zmax: String,
}

impl PatchNames {
    /// `in`/`out` on x, `front`/`back` on y, `bottom`/`upper` on z.
    pub fn cube() -> Self {
        PatchNames {
            xmin: "in".into(),
            xmax: "out".into(),
            ymin: "front".into(),
            ymax: "back".into(),
            zmin: "bottom".into(),
            zmax: "upper".into(),
        }
    }

    /// `inlet`/`outlet` on x and `lateral` everywhere else.
    pub fn channel() -> Self {
        PatchNames {
            xmin: "inlet".into(),
            xmax: "outlet".into(),
            ymin: "lateral".into(),
            ymax: "lateral".into(),
            zmin: "lateral".into(),
            zmax: "lateral".into(),
        }
    }

    fn sides(&self) -> [&str; 6] {
        [
            &self.xmin, &self.xmax, &self.ymin, &self.ymax, &self.zmin, &self.zmax,
        ]
    }
}

/// Builder for an axis-aligned box cut into `nx * ny * nz` hexahedra, each
/// split into six tetrahedra around its main diagonal. Interior nodes can be
/// jittered by a fraction of the local spacing with a seeded generator.
#[derive(Debug, Clone)]
pub struct BoxMeshBuilder {
    pub divisions: [usize; 3],
    pub origin: Vec3,
    pub lengths: Vec3,
    pub jitter: f64,
    pub seed: u64,
    pub patches: PatchNames,
}

impl BoxMeshBuilder {
    pub fn unit_cube(n: usize) -> Self {
        BoxMeshBuilder {
            divisions: [n, n, n],
            origin: [0.0; 3],
            lengths: [1.0; 3],
            jitter: 0.0,
            seed: 1,
            patches: PatchNames::cube(),
        }
    }

    pub fn divisions(mut self, d: [usize; 3]) -> Self {
        self.divisions = d;
        self
    }

    pub fn lengths(mut self, l: Vec3) -> Self {
        self.lengths = l;
        self
    }

    pub fn origin(mut self, o: Vec3) -> Self {
        self.origin = o;
        self
    }

    pub fn jitter(mut self, fraction: f64, seed: u64) -> Self {
        self.jitter = fraction;
        self.seed = seed;
        self
    }

    pub fn patches(mut self, p: PatchNames) -> Self {
        self.patches = p;
        self
    }

    pub fn num_cells(&self) -> usize {
        6 * self.divisions.iter().product::<usize>()
    }

    pub fn build(&self) -> Result<Mesh, MeshError> {
        let [nx, ny, nz] = self.divisions;
        assert!(nx > 0 && ny > 0 && nz > 0, "box divisions must be positive");
        let h = [
            self.lengths[0] / nx as f64,
            self.lengths[1] / ny as f64,
            self.lengths[2] / nz as f64,
        ];
        let nid = |i: usize, j: usize, k: usize| i + (nx + 1) * (j + (ny + 1) * k);
        let mut rng = SplitMix64(self.seed);
        let mut positions = Vec::with_capacity((nx + 1) * (ny + 1) * (nz + 1));
        for k in 0..=nz {
            for j in 0..=ny {
                for i in 0..=nx {
                    let mut p = [
                        self.origin[0] + i as f64 * h[0],
                        self.origin[1] + j as f64 * h[1],
                        self.origin[2] + k as f64 * h[2],
                    ];
                    let interior = [(i, nx), (j, ny), (k, nz)]
                        .iter()
                        .all(|&(a, n)| a > 0 && a < n);
                    // the jitter draws happen for every node to keep the
                    // sequence independent of the boundary layout
                    let r = [rng.unit() - 0.5, rng.unit() - 0.5, rng.unit() - 0.5];
                    if interior && self.jitter > 0.0 {
                        for d in 0..3 {
                            p[d] += self.jitter * h[d] * r[d];
                        }
                    }
                    positions.push(p);
                }
            }
        }

        // Kuhn split: all six tets share the diagonal v0 -> v7
        const KUHN: [[usize; 4]; 6] = [
            [0, 1, 3, 7],
            [0, 3, 2, 7],
            [0, 2, 6, 7],
            [0, 6, 4, 7],
            [0, 4, 5, 7],
            [0, 5, 1, 7],
        ];
        let mut tets = Vec::with_capacity(self.num_cells());
        for k in 0..nz {
            for j in 0..ny {
                for i in 0..nx {
                    let v = |b: usize| nid(i + (b & 1), j + ((b >> 1) & 1), k + ((b >> 2) & 1));
                    for t in KUHN {
                        tets.push(t.map(v));
                    }
                }
            }
        }

        let mut names: Vec<String> = Vec::new();
        let sides = self.patches.sides();
        let side_patch: Vec<usize> = sides
            .iter()
            .map(|s| match names.iter().position(|n| n == s) {
                Some(p) => p,
                None => {
                    names.push(s.to_string());
                    names.len() - 1
                }
            })
            .collect();
        let mut tris = Vec::new();
        let mut quad = |a: usize, b: usize, c: usize, d: usize, side: usize| {
            // both diagonals of a boundary quad follow the Kuhn split, which
            // always cuts from the lowest to the highest corner
            tris.push(([a, b, d], side_patch[side]));
            tris.push(([a, c, d], side_patch[side]));
        };
        for (side, fixed) in [(0usize, 0usize), (1, nx)] {
            for k in 0..nz {
                for j in 0..ny {
                    quad(nid(fixed, j, k), nid(fixed, j + 1, k), nid(fixed, j, k + 1), nid(fixed, j + 1, k + 1), side);
                }
            }
        }
        for (side, fixed) in [(2usize, 0usize), (3, ny)] {
            for k in 0..nz {
                for i in 0..nx {
                    quad(nid(i, fixed, k), nid(i + 1, fixed, k), nid(i, fixed, k + 1), nid(i + 1, fixed, k + 1), side);
                }
            }
        }
        for (side, fixed) in [(4usize, 0usize), (5, nz)] {
            for j in 0..ny {
                for i in 0..nx {
                    quad(nid(i, j, fixed), nid(i + 1, j, fixed), nid(i, j + 1, fixed), nid(i + 1, j + 1, fixed), side);
                }
            }
        }
        Mesh::from_elements(positions, tets, tris, names)
    }
}

/// Deterministic 64-bit generator for mesh jitter.
struct SplitMix64(u64);

impl SplitMix64 {
    fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }
}
