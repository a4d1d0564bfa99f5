//! Equations of motion, in two independently coded forms.
//!
//! [`rhs`] evaluates the complex-valued equations term by term.
//! [`assemble_generator`] writes the same dynamics as a 9x9 real matrix over
//! the coordinate chart of [`RealStateVector`]. The two routes are kept
//! separate on purpose and cross-checked in tests; the steady-state solver
//! uses the matrix while residual reporting goes through `rhs`.

use num_complex::Complex64;

use crate::model::{derive_delta2, EquationMode, ModelParams};
use crate::state::{DensityMatrix, RealStateVector};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Time derivative of the state under the equations of motion.
///
/// The populations follow the decay network Γ10, Γ12, Γ20 plus the drive and
/// tunneling source terms; rho22's equation is fixed by trace conservation.
/// The returned value has (numerically) zero trace and lives in the same
/// upper-triangle representation as the input.
pub fn rhs(rho: &DensityMatrix, p: &ModelParams) -> DensityMatrix {
    let om = p.omega_rabi;
    let te = p.t_e;
    let d1 = p.delta1;
    let d2 = derive_delta2(p);

    let r01 = rho.rho01;
    let r02 = rho.rho02;
    let r12 = rho.rho12;

    // d/dt rho01 = i(d1 + i g1) rho01 - i om/2 (rho11 - rho00) + i te rho02
    let d_r01 = I * (Complex64::new(d1, p.gamma1)) * r01
        - I * (om / 2.0) * Complex64::new(rho.rho11 - rho.rho00, 0.0)
        + I * te * r02;

    // d/dt rho12 = -i(d1 - d2 - i g2) rho12 - i om/2 rho02 - i te (rho22 - rho11)
    let d_r12 = -I * Complex64::new(d1 - d2, -p.gamma2) * r12
        - I * (om / 2.0) * r02
        - I * te * Complex64::new(rho.rho22 - rho.rho11, 0.0);

    // d/dt rho02 = i(d2 + i g3) rho02 - i om/2 rho12 + i te * (rho01 | rho02)
    let tunneling = match p.mode {
        EquationMode::Corrected => r01,
        EquationMode::Verbatim => r02,
    };
    let d_r02 = I * Complex64::new(d2, p.gamma3) * r02 - I * (om / 2.0) * r12 + I * te * tunneling;

    // Populations, written directly in real arithmetic:
    //   i om/2 (rho10 - rho01) = om * Im rho01
    //   i te  (rho21 - rho12) = 2 te * Im rho12
    let drive = om * r01.im;
    let tunnel = 2.0 * te * r12.im;
    let d_p0 = p.big_gamma20 * rho.rho22 + p.big_gamma10 * rho.rho11 - drive;
    let d_p1 = -(p.big_gamma10 + p.big_gamma12) * rho.rho11 + drive - tunnel;
    let d_p2 = p.big_gamma12 * rho.rho11 - p.big_gamma20 * rho.rho22 + tunnel;

    DensityMatrix {
        rho00: d_p0,
        rho11: d_p1,
        rho22: d_p2,
        rho01: d_r01,
        rho02: d_r02,
        rho12: d_r12,
    }
}

/// The 9x9 real linear map L with L·to_real(rho) = to_real(rhs(rho, p)).
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorMatrix(pub [[f64; 9]; 9]);

impl GeneratorMatrix {
    pub fn matvec(&self, x: &RealStateVector) -> RealStateVector {
        let mut out = [0.0; 9];
        for (row, o) in self.0.iter().zip(out.iter_mut()) {
            let mut acc = 0.0;
            for (l, v) in row.iter().zip(x.0.iter()) {
                acc += l * v;
            }
            *o = acc;
        }
        RealStateVector(out)
    }
}

/// Fills the generator entries directly from the equations of motion.
///
/// Chart order: x = (p0, p1, p2, a, b, c, d, e, f) with rho01 = a+ib,
/// rho02 = c+id, rho12 = e+if.
pub fn assemble_generator(p: &ModelParams) -> GeneratorMatrix {
    let om = p.omega_rabi;
    let te = p.t_e;
    let d1 = p.delta1;
    let d2 = derive_delta2(p);
    let (g1, g2, g3) = (p.gamma1, p.gamma2, p.gamma3);
    let (gg10, gg12, gg20) = (p.big_gamma10, p.big_gamma12, p.big_gamma20);

    let mut l = [[0.0f64; 9]; 9];

    // populations
    l[0][1] = gg10;
    l[0][2] = gg20;
    l[0][4] = -om;
    l[1][1] = -(gg10 + gg12);
    l[1][4] = om;
    l[1][8] = -2.0 * te;
    l[2][1] = gg12;
    l[2][2] = -gg20;
    l[2][8] = 2.0 * te;

    // rho01:  a' = -g1 a - d1 b - te d
    //         b' = om/2 (p0 - p1) + d1 a - g1 b + te c
    l[3][3] = -g1;
    l[3][4] = -d1;
    l[3][6] = -te;
    l[4][0] = om / 2.0;
    l[4][1] = -om / 2.0;
    l[4][3] = d1;
    l[4][4] = -g1;
    l[4][5] = te;

    // rho02
    match p.mode {
        EquationMode::Corrected => {
            // c' = -te b - g3 c - d2 d + om/2 f
            // d' =  te a + d2 c - g3 d - om/2 e
            l[5][4] = -te;
            l[5][5] = -g3;
            l[5][6] = -d2;
            l[5][8] = om / 2.0;
            l[6][3] = te;
            l[6][5] = d2;
            l[6][6] = -g3;
            l[6][7] = -om / 2.0;
        }
        EquationMode::Verbatim => {
            // self term: pure shift of the two-photon detuning by te
            l[5][5] = -g3;
            l[5][6] = -(d2 + te);
            l[5][8] = om / 2.0;
            l[6][5] = d2 + te;
            l[6][6] = -g3;
            l[6][7] = -om / 2.0;
        }
    }

    // rho12:  e' = om/2 d - g2 e + w12 f
    //         f' = te (p1 - p2) - om/2 c - w12 e - g2 f
    l[7][6] = om / 2.0;
    l[7][7] = -g2;
    l[7][8] = p.omega12;
    l[8][1] = te;
    l[8][2] = -te;
    l[8][5] = -om / 2.0;
    l[8][7] = -p.omega12;
    l[8][8] = -g2;

    GeneratorMatrix(l)
}
