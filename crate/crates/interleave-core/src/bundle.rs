//! Precomputed constant data shared by every loss evaluation at a fixed shift.

use alloc::string::String;
use alloc::vec::Vec;

use crate::graph::{DistanceTable, MapperGraph, SmoothSystem};
use crate::matrix::{BlockMatrix, Partition, StructureClass};

/// Both graphs with their smoothings and the four distance tables needed to
/// score an assignment at shift `n`.
#[derive(Clone, Debug)]
pub struct Bundle {
    pub f: SmoothSystem,
    pub g: SmoothSystem,
    pub dist_f_n: DistanceTable,
    pub dist_f_2n: DistanceTable,
    pub dist_g_n: DistanceTable,
    pub dist_g_2n: DistanceTable,
}

impl Bundle {
    pub fn new(f: MapperGraph, g: MapperGraph, n: u64) -> Bundle {
        let f = SmoothSystem::build(f, n);
        let g = SmoothSystem::build(g, n);
        let dist_f_n = f.smooth_n.distance_tables();
        let dist_f_2n = f.smooth_2n.distance_tables();
        let dist_g_n = g.smooth_n.distance_tables();
        let dist_g_2n = g.smooth_2n.distance_tables();
        Bundle { f, g, dist_f_n, dist_f_2n, dist_g_n, dist_g_2n }
    }

    pub fn n(&self) -> u64 {
        self.f.n
    }
}

/// The constant matrices of a bundle in explicit form: boundaries, inclusion
/// maps, and distance matrices. Used for matrix-form cross checks, CSV dumps,
/// and the integer program.
#[derive(Clone, Debug)]
pub struct MatrixBundle {
    pub b_f_up: BlockMatrix,
    pub b_f_down: BlockMatrix,
    pub b_g_up: BlockMatrix,
    pub b_g_down: BlockMatrix,
    pub b_fn_up: BlockMatrix,
    pub b_fn_down: BlockMatrix,
    pub b_gn_up: BlockMatrix,
    pub b_gn_down: BlockMatrix,
    pub i_f_v: BlockMatrix,
    pub i_f_e: BlockMatrix,
    pub i_g_v: BlockMatrix,
    pub i_g_e: BlockMatrix,
    pub i_fn_v: BlockMatrix,
    pub i_fn_e: BlockMatrix,
    pub i_gn_v: BlockMatrix,
    pub i_gn_e: BlockMatrix,
    pub d_fn_v: BlockMatrix,
    pub d_fn_e: BlockMatrix,
    pub d_f2n_v: BlockMatrix,
    pub d_f2n_e: BlockMatrix,
    pub d_gn_v: BlockMatrix,
    pub d_gn_e: BlockMatrix,
    pub d_g2n_v: BlockMatrix,
    pub d_g2n_e: BlockMatrix,
}

fn inclusion_v(from: &MapperGraph, to: &MapperGraph, map: &[usize]) -> BlockMatrix {
    BlockMatrix::from_map(
        Partition::vertices(to),
        Partition::vertices(from),
        map,
        StructureClass::Inclusion,
    )
}

fn inclusion_e(from: &MapperGraph, to: &MapperGraph, map: &[usize]) -> BlockMatrix {
    BlockMatrix::from_map(
        Partition::edges(to),
        Partition::edges(from),
        map,
        StructureClass::Inclusion,
    )
}

impl MatrixBundle {
    pub fn build(b: &Bundle) -> MatrixBundle {
        MatrixBundle {
            b_f_up: BlockMatrix::boundary_up(&b.f.base),
            b_f_down: BlockMatrix::boundary_down(&b.f.base),
            b_g_up: BlockMatrix::boundary_up(&b.g.base),
            b_g_down: BlockMatrix::boundary_down(&b.g.base),
            b_fn_up: BlockMatrix::boundary_up(&b.f.smooth_n),
            b_fn_down: BlockMatrix::boundary_down(&b.f.smooth_n),
            b_gn_up: BlockMatrix::boundary_up(&b.g.smooth_n),
            b_gn_down: BlockMatrix::boundary_down(&b.g.smooth_n),
            i_f_v: inclusion_v(&b.f.base, &b.f.smooth_n, &b.f.incl_v_base),
            i_f_e: inclusion_e(&b.f.base, &b.f.smooth_n, &b.f.incl_e_base),
            i_g_v: inclusion_v(&b.g.base, &b.g.smooth_n, &b.g.incl_v_base),
            i_g_e: inclusion_e(&b.g.base, &b.g.smooth_n, &b.g.incl_e_base),
            i_fn_v: inclusion_v(&b.f.smooth_n, &b.f.smooth_2n, &b.f.incl_v_n),
            i_fn_e: inclusion_e(&b.f.smooth_n, &b.f.smooth_2n, &b.f.incl_e_n),
            i_gn_v: inclusion_v(&b.g.smooth_n, &b.g.smooth_2n, &b.g.incl_v_n),
            i_gn_e: inclusion_e(&b.g.smooth_n, &b.g.smooth_2n, &b.g.incl_e_n),
            d_fn_v: BlockMatrix::distance_vertices(&b.f.smooth_n, &b.dist_f_n),
            d_fn_e: BlockMatrix::distance_edges(&b.f.smooth_n, &b.dist_f_n),
            d_f2n_v: BlockMatrix::distance_vertices(&b.f.smooth_2n, &b.dist_f_2n),
            d_f2n_e: BlockMatrix::distance_edges(&b.f.smooth_2n, &b.dist_f_2n),
            d_gn_v: BlockMatrix::distance_vertices(&b.g.smooth_n, &b.dist_g_n),
            d_gn_e: BlockMatrix::distance_edges(&b.g.smooth_n, &b.dist_g_n),
            d_g2n_v: BlockMatrix::distance_vertices(&b.g.smooth_2n, &b.dist_g_2n),
            d_g2n_e: BlockMatrix::distance_edges(&b.g.smooth_2n, &b.dist_g_2n),
        }
    }

    /// Stable names for every matrix, for dumping and for the LP variables.
    pub fn named(&self) -> Vec<(&'static str, &BlockMatrix)> {
        alloc::vec![
            ("B_F_up", &self.b_f_up),
            ("B_F_down", &self.b_f_down),
            ("B_G_up", &self.b_g_up),
            ("B_G_down", &self.b_g_down),
            ("B_Fn_up", &self.b_fn_up),
            ("B_Fn_down", &self.b_fn_down),
            ("B_Gn_up", &self.b_gn_up),
            ("B_Gn_down", &self.b_gn_down),
            ("I_F_V", &self.i_f_v),
            ("I_F_E", &self.i_f_e),
            ("I_G_V", &self.i_g_v),
            ("I_G_E", &self.i_g_e),
            ("I_Fn_V", &self.i_fn_v),
            ("I_Fn_E", &self.i_fn_e),
            ("I_Gn_V", &self.i_gn_v),
            ("I_Gn_E", &self.i_gn_e),
            ("D_Fn_V", &self.d_fn_v),
            ("D_Fn_E", &self.d_fn_e),
            ("D_F2n_V", &self.d_f2n_v),
            ("D_F2n_E", &self.d_f2n_e),
            ("D_Gn_V", &self.d_gn_v),
            ("D_Gn_E", &self.d_gn_e),
            ("D_G2n_V", &self.d_g2n_v),
            ("D_G2n_E", &self.d_g2n_e),
        ]
    }

    pub fn check(&self) -> Result<(), String> {
        for (name, m) in self.named() {
            m.check_class().map_err(|e| alloc::format!("{name}: {e}"))?;
        }
        Ok(())
    }
}
