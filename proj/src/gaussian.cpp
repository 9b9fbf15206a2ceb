#include "carlsim/gaussian.hpp"

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

namespace carlsim {

GaussianState GaussianState::vacuum(int modes) {
    GaussianState s;
    s.mean = RealVector::Zero(2 * modes);
    s.cov = 0.25 * RealMatrix::Identity(2 * modes, 2 * modes);
    return s;
}

void QuadraticHamiltonian::validate() const {
    const int m = num_modes();
    if (hermitian_block.rows() != m || hermitian_block.cols() != m ||
        squeezing_block.rows() != m || squeezing_block.cols() != m)
        throw std::invalid_argument("QuadraticHamiltonian: block size mismatch");
    if ((hermitian_block - hermitian_block.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
        throw std::invalid_argument("QuadraticHamiltonian: A not Hermitian");
    if ((squeezing_block - squeezing_block.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw std::invalid_argument("QuadraticHamiltonian: B not symmetric");
}

RealMatrix symplectic_form(int modes) {
    RealMatrix omega = RealMatrix::Zero(2 * modes, 2 * modes);
    for (int k = 0; k < modes; ++k) {
        omega(2 * k, 2 * k + 1) = 1.0;
        omega(2 * k + 1, 2 * k) = -1.0;
    }
    return omega;
}

namespace {

// Permutation taking block layout (x0..x_{M-1}, y0..y_{M-1}) to the
// interleaved public layout.
Eigen::PermutationMatrix<Eigen::Dynamic> block_to_interleaved(int m) {
    Eigen::VectorXi idx(2 * m);
    for (int k = 0; k < m; ++k) {
        idx[k] = 2 * k;          // x_k
        idx[m + k] = 2 * k + 1;  // y_k
    }
    return Eigen::PermutationMatrix<Eigen::Dynamic>(idx);
}

}  // namespace

LinearFlow gaussian_flow(const QuadraticHamiltonian& h, double t) {
    h.validate();
    if (t < 0.0) throw std::invalid_argument("gaussian_flow: t < 0");
    const int m = h.num_modes();
    const Complex i1(0.0, 1.0);

    // Heisenberg flow on (a; a^dag):
    //   d/dt a = -i (A a + 2 B a^dag + c)
    //   d/dt a^dag = +i (conj(A) a^dag + 2 conj(B) a + conj(c))
    Matrix g = Matrix::Zero(2 * m, 2 * m);
    g.topLeftCorner(m, m) = -i1 * h.hermitian_block;
    g.topRightCorner(m, m) = -2.0 * i1 * h.squeezing_block;
    g.bottomLeftCorner(m, m) = 2.0 * i1 * h.squeezing_block.conjugate();
    g.bottomRightCorner(m, m) = i1 * h.hermitian_block.conjugate();
    Vector dc(2 * m);
    dc.head(m) = -i1 * h.linear;
    dc.tail(m) = i1 * h.linear.conjugate();

    // Transform to quadrature block layout: u = T (a; a^dag).
    Matrix tr = Matrix::Zero(2 * m, 2 * m);
    tr.topLeftCorner(m, m) = 0.5 * Matrix::Identity(m, m);
    tr.topRightCorner(m, m) = 0.5 * Matrix::Identity(m, m);
    tr.bottomLeftCorner(m, m) = -0.5 * i1 * Matrix::Identity(m, m);
    tr.bottomRightCorner(m, m) = 0.5 * i1 * Matrix::Identity(m, m);
    Matrix tr_inv = Matrix::Zero(2 * m, 2 * m);
    tr_inv.topLeftCorner(m, m) = Matrix::Identity(m, m);
    tr_inv.topRightCorner(m, m) = i1 * Matrix::Identity(m, m);
    tr_inv.bottomLeftCorner(m, m) = Matrix::Identity(m, m);
    tr_inv.bottomRightCorner(m, m) = -i1 * Matrix::Identity(m, m);

    Matrix gen_c = tr * g * tr_inv;
    Vector drift_c = tr * dc;
    if (gen_c.imag().cwiseAbs().maxCoeff() > 1e-12 * (1.0 + gen_c.cwiseAbs().maxCoeff()) ||
        drift_c.imag().cwiseAbs().maxCoeff() > 1e-12 * (1.0 + drift_c.cwiseAbs().maxCoeff()))
        throw std::logic_error("gaussian_flow: quadrature generator not real");

    // Affine flow via one augmented exponential; no time stepping.
    RealMatrix aug = RealMatrix::Zero(2 * m + 1, 2 * m + 1);
    aug.topLeftCorner(2 * m, 2 * m) = gen_c.real();
    aug.topRightCorner(2 * m, 1) = drift_c.real();
    RealMatrix exp_aug = (t * aug).exp();

    auto p = block_to_interleaved(m);
    LinearFlow flow;
    flow.propagator = p * exp_aug.topLeftCorner(2 * m, 2 * m) * p.transpose();
    flow.drift = p * exp_aug.topRightCorner(2 * m, 1);
    return flow;
}

GaussianState evolve_gaussian(const QuadraticHamiltonian& h, double t,
                              const GaussianState& initial) {
    if (initial.num_modes() != h.num_modes())
        throw std::invalid_argument("evolve_gaussian: mode count mismatch");
    LinearFlow flow = gaussian_flow(h, t);
    GaussianState out;
    out.mean = flow.propagator * initial.mean + flow.drift;
    out.cov = flow.propagator * initial.cov * flow.propagator.transpose();
    out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
    return out;
}

std::vector<double> mode_populations(const GaussianState& s) {
    std::vector<double> pops(s.num_modes());
    for (int k = 0; k < s.num_modes(); ++k) {
        double vx = s.cov(2 * k, 2 * k);
        double vy = s.cov(2 * k + 1, 2 * k + 1);
        double mx = s.mean[2 * k];
        double my = s.mean[2 * k + 1];
        pops[k] = vx + vy - 0.5 + mx * mx + my * my;
    }
    return pops;
}

Complex mode_mean(const GaussianState& s, int mode) {
    return {s.mean[2 * mode], s.mean[2 * mode + 1]};
}

Complex moment_aa(const GaussianState& s, int mode_i, int mode_j) {
    const int i = mode_i, j = mode_j;
    double re = s.cov(2 * i, 2 * j) - s.cov(2 * i + 1, 2 * j + 1);
    double im = s.cov(2 * i, 2 * j + 1) + s.cov(2 * i + 1, 2 * j);
    return Complex(re, im) + mode_mean(s, i) * mode_mean(s, j);
}

GaussianState fock_moments(const DensityOperator& rho) {
    double leak = rho.leakage();
    if (leak > kTruncationGuard)
        throw TruncationError("fock_moments: truncation leakage too large", leak);
    const int m = rho.space().num_modes();
    GaussianState s;
    s.mean = RealVector::Zero(2 * m);
    s.cov = RealMatrix::Zero(2 * m, 2 * m);

    std::vector<Complex> a_mean(m);
    for (int k = 0; k < m; ++k) {
        a_mean[k] = expect_a(rho, k);
        s.mean[2 * k] = a_mean[k].real();
        s.mean[2 * k + 1] = a_mean[k].imag();
    }
    for (int i = 0; i < m; ++i) {
        for (int j = i; j < m; ++j) {
            Complex aa = expect_aa(rho, i, j) - a_mean[i] * a_mean[j];
            Complex ad_a = expect_adag_a(rho, i, j) - std::conj(a_mean[i]) * a_mean[j];
            double delta = (i == j) ? 1.0 : 0.0;
            // Symmetrized quadrature covariances from normally ordered moments.
            double sxx = 0.5 * aa.real() + 0.5 * ad_a.real() + 0.25 * delta;
            double syy = -0.5 * aa.real() + 0.5 * ad_a.real() + 0.25 * delta;
            double sxy = 0.5 * aa.imag() + 0.5 * ad_a.imag();
            double syx = 0.5 * aa.imag() - 0.5 * ad_a.imag();
            s.cov(2 * i, 2 * j) = sxx;
            s.cov(2 * i + 1, 2 * j + 1) = syy;
            s.cov(2 * i, 2 * j + 1) = sxy;
            s.cov(2 * i + 1, 2 * j) = syx;
            if (i != j) {
                s.cov(2 * j, 2 * i) = sxx;
                s.cov(2 * j + 1, 2 * i + 1) = syy;
                s.cov(2 * j + 1, 2 * i) = sxy;
                s.cov(2 * j, 2 * i + 1) = syx;
            } else {
                s.cov(2 * i, 2 * i + 1) = 0.5 * (sxy + syx);
                s.cov(2 * i + 1, 2 * i) = 0.5 * (sxy + syx);
            }
        }
    }
    return s;
}

double uncertainty_margin(const GaussianState& s) {
    const int n = static_cast<int>(s.mean.size());
    Matrix m = s.cov.cast<Complex>() +
               Complex(0.0, 0.25) * symplectic_form(n / 2).cast<Complex>();
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

}  // namespace carlsim
