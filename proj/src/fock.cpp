#include "carlsim/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <unsupported/Eigen/MatrixFunctions>

namespace carlsim {

FockSpace::FockSpace(std::vector<int> mode_dims) : dims_(std::move(mode_dims)) {
    if (dims_.empty()) throw std::invalid_argument("FockSpace: no modes");
    strides_.resize(dims_.size());
    total_ = 1;
    for (std::size_t m = 0; m < dims_.size(); ++m) {
        if (dims_[m] < 2) throw std::invalid_argument("FockSpace: mode_dim < 2");
        strides_[m] = total_;
        total_ *= dims_[m];
    }
}

long FockSpace::index(std::span<const int> occupation) const {
    if (static_cast<int>(occupation.size()) != num_modes())
        throw std::invalid_argument("FockSpace::index: wrong mode count");
    long idx = 0;
    for (int m = 0; m < num_modes(); ++m) {
        if (occupation[m] < 0 || occupation[m] >= dims_[m])
            throw std::invalid_argument("FockSpace::index: occupation out of range");
        idx += occupation[m] * strides_[m];
    }
    return idx;
}

std::vector<int> FockSpace::occupation(long index) const {
    std::vector<int> occ(num_modes());
    for (int m = 0; m < num_modes(); ++m) occ[m] = occupation_of(index, m);
    return occ;
}

StateVector::StateVector(FockSpace space, Vector amplitudes, bool renormalize)
    : space_(std::move(space)), amp_(std::move(amplitudes)) {
    if (amp_.size() != space_.total_dim())
        throw std::invalid_argument("StateVector: amplitude length mismatch");
    double nrm = amp_.norm();
    if (renormalize) {
        if (nrm == 0.0) throw std::invalid_argument("StateVector: zero vector");
        amp_ /= nrm;
    } else if (std::abs(nrm - 1.0) > 1e-10) {
        throw std::invalid_argument("StateVector: not normalized, |norm-1| = " +
                                    std::to_string(std::abs(nrm - 1.0)));
    }
}

double StateVector::top_level_population(int mode) const {
    const int top = space_.dim(mode) - 1;
    double p = 0.0;
    for (long i = 0; i < amp_.size(); ++i)
        if (space_.occupation_of(i, mode) == top) p += std::norm(amp_[i]);
    return p;
}

double StateVector::leakage() const {
    double worst = 0.0;
    for (int m = 0; m < space_.num_modes(); ++m) {
        const int top = space_.dim(m) - 1;
        double p = 0.0;
        for (long i = 0; i < amp_.size(); ++i) {
            int n = space_.occupation_of(i, m);
            if (n >= top - 1) p += std::norm(amp_[i]);
        }
        worst = std::max(worst, p);
    }
    return worst;
}

std::vector<double> StateVector::mode_populations() const {
    std::vector<double> pops(space_.num_modes(), 0.0);
    for (long i = 0; i < amp_.size(); ++i) {
        double w = std::norm(amp_[i]);
        if (w == 0.0) continue;
        for (int m = 0; m < space_.num_modes(); ++m)
            pops[m] += w * space_.occupation_of(i, m);
    }
    return pops;
}

DensityOperator::DensityOperator(FockSpace space, Matrix matrix)
    : space_(std::move(space)), mat_(std::move(matrix)) {
    const long d = space_.total_dim();
    if (mat_.rows() != d || mat_.cols() != d)
        throw std::invalid_argument("DensityOperator: matrix size mismatch");
    double herm_dev = (mat_ - mat_.adjoint()).cwiseAbs().maxCoeff();
    if (herm_dev > 1e-10)
        throw std::invalid_argument("DensityOperator: not Hermitian, deviation " +
                                    std::to_string(herm_dev));
    double tr_dev = std::abs(mat_.trace() - Complex(1.0, 0.0));
    if (tr_dev > 1e-8)
        throw std::invalid_argument("DensityOperator: trace deviates from 1 by " +
                                    std::to_string(tr_dev));
    mat_ = 0.5 * (mat_ + mat_.adjoint()).eval();
}

DensityOperator DensityOperator::from_pure(const StateVector& psi) {
    Matrix m = psi.amplitudes() * psi.amplitudes().adjoint();
    return DensityOperator(psi.space(), std::move(m));
}

double DensityOperator::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(mat_, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

double DensityOperator::leakage() const {
    double worst = 0.0;
    for (int m = 0; m < space_.num_modes(); ++m) {
        const int top = space_.dim(m) - 1;
        double p = 0.0;
        for (long i = 0; i < space_.total_dim(); ++i) {
            int n = space_.occupation_of(i, m);
            if (n >= top - 1) p += std::real(mat_(i, i));
        }
        worst = std::max(worst, p);
    }
    return worst;
}

std::vector<double> DensityOperator::mode_populations() const {
    std::vector<double> pops(space_.num_modes(), 0.0);
    for (long i = 0; i < space_.total_dim(); ++i) {
        double w = std::real(mat_(i, i));
        for (int m = 0; m < space_.num_modes(); ++m)
            pops[m] += w * space_.occupation_of(i, m);
    }
    return pops;
}

RealVector DensityOperator::diagonal() const { return mat_.diagonal().real(); }

Matrix annihilation(const FockSpace& space, int mode) {
    if (mode < 0 || mode >= space.num_modes())
        throw std::invalid_argument("annihilation: invalid mode index");
    const int d = space.dim(mode);
    Matrix a = Matrix::Zero(d, d);
    for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(double(n));
    return embed(space, mode, a);
}

Matrix creation(const FockSpace& space, int mode) {
    return annihilation(space, mode).adjoint();
}

Matrix number_operator(const FockSpace& space, int mode) {
    if (mode < 0 || mode >= space.num_modes())
        throw std::invalid_argument("number_operator: invalid mode index");
    const long d = space.total_dim();
    Matrix n = Matrix::Zero(d, d);
    for (long i = 0; i < d; ++i) n(i, i) = double(space.occupation_of(i, mode));
    return n;
}

Matrix embed(const FockSpace& space, int mode, const Matrix& op) {
    if (mode < 0 || mode >= space.num_modes())
        throw std::invalid_argument("embed: invalid mode index");
    const int d = space.dim(mode);
    if (op.rows() != d || op.cols() != d)
        throw std::invalid_argument("embed: operator dimension mismatch");
    const long total = space.total_dim();
    const long stride = space.stride(mode);
    Matrix full = Matrix::Zero(total, total);
    // Composite index i = lo + stride*(n + d*hi); the operator couples only
    // the n digit.
    const long lo_count = stride;
    const long hi_count = total / (stride * d);
    for (long hi = 0; hi < hi_count; ++hi) {
        for (int r = 0; r < d; ++r) {
            for (int c = 0; c < d; ++c) {
                if (op(r, c) == Complex(0, 0)) continue;
                long base_r = stride * (r + long(d) * hi);
                long base_c = stride * (c + long(d) * hi);
                for (long lo = 0; lo < lo_count; ++lo)
                    full(base_r + lo, base_c + lo) = op(r, c);
            }
        }
    }
    return full;
}

namespace {

// Poisson tail mass P(n >= k) for mean lambda; coherent-state occupation.
double poisson_tail(double lambda, int k) {
    if (k <= 0) return 1.0;
    double term = std::exp(-lambda);
    double cum = term;
    for (int n = 1; n < k; ++n) {
        term *= lambda / n;
        cum += term;
    }
    return std::max(0.0, 1.0 - cum);
}

}  // namespace

Matrix displacement(const FockSpace& space, int mode, Complex alpha, bool guarded) {
    if (mode < 0 || mode >= space.num_modes())
        throw std::invalid_argument("displacement: invalid mode index");
    const int d = space.dim(mode);
    if (guarded) {
        double tail = poisson_tail(std::norm(alpha), d - 2);
        if (tail > kTruncationGuard)
            throw TruncationError("displacement: amplitude too large for truncation",
                                  tail);
    }
    Matrix gen = Matrix::Zero(d, d);
    for (int n = 1; n < d; ++n) {
        double s = std::sqrt(double(n));
        gen(n, n - 1) = alpha * s;          // alpha a^dag
        gen(n - 1, n) = -std::conj(alpha) * s;  // -conj(alpha) a
    }
    Matrix dd = gen.exp();
    if (space.num_modes() == 1) return dd;
    return embed(space, mode, dd);
}

StateVector vacuum_state(const FockSpace& space) {
    Vector amp = Vector::Zero(space.total_dim());
    amp[0] = 1.0;
    return StateVector(space, std::move(amp));
}

StateVector basis_state(const FockSpace& space, std::span<const int> occupation) {
    Vector amp = Vector::Zero(space.total_dim());
    amp[space.index(occupation)] = 1.0;
    return StateVector(space, std::move(amp));
}

StateVector coherent_state(const FockSpace& space, int mode, Complex alpha) {
    const int d = space.dim(mode);
    Vector one_mode = Vector::Zero(d);
    Complex c = std::exp(-0.5 * std::norm(alpha));
    for (int n = 0; n < d; ++n) {
        one_mode[n] = c;
        c *= alpha / std::sqrt(double(n + 1));
    }
    double top2 = std::norm(one_mode[d - 1]) + std::norm(one_mode[d - 2]);
    if (top2 > kTruncationGuard)
        throw TruncationError("coherent_state: amplitude too large for truncation",
                              top2);
    Vector amp = Vector::Zero(space.total_dim());
    const long stride = space.stride(mode);
    for (int n = 0; n < d; ++n) amp[n * stride] = one_mode[n];
    return StateVector(space, std::move(amp), /*renormalize=*/true);
}

StateVector squeezed_vacuum(const FockSpace& space, int mode, double r) {
    const int d = space.dim(mode);
    Vector one_mode = Vector::Zero(d);
    double th = std::tanh(r);
    double c = 1.0 / std::sqrt(std::cosh(r));
    for (int n = 0; 2 * n < d; ++n) {
        one_mode[2 * n] = c;
        c *= -th * std::sqrt(double((2 * n + 1) * (2 * n + 2))) / (2.0 * (n + 1));
    }
    double top2 = std::norm(one_mode[d - 1]) + std::norm(one_mode[d - 2]);
    if (top2 > kTruncationGuard)
        throw TruncationError("squeezed_vacuum: r too large for truncation", top2);
    Vector amp = Vector::Zero(space.total_dim());
    const long stride = space.stride(mode);
    for (int n = 0; n < d; ++n) amp[n * stride] = one_mode[n];
    return StateVector(space, std::move(amp), /*renormalize=*/true);
}

DensityOperator partial_trace(const DensityOperator& rho,
                              std::span<const int> keep_modes) {
    const FockSpace& space = rho.space();
    if (keep_modes.empty())
        throw std::invalid_argument("partial_trace: empty keep set");
    std::vector<int> keep(keep_modes.begin(), keep_modes.end());
    std::sort(keep.begin(), keep.end());
    if (std::adjacent_find(keep.begin(), keep.end()) != keep.end())
        throw std::invalid_argument("partial_trace: duplicate mode");
    for (int m : keep)
        if (m < 0 || m >= space.num_modes())
            throw std::invalid_argument("partial_trace: invalid mode");

    std::vector<int> traced;
    for (int m = 0; m < space.num_modes(); ++m)
        if (!std::binary_search(keep.begin(), keep.end(), m)) traced.push_back(m);

    std::vector<int> keep_dims;
    for (int m : keep) keep_dims.push_back(space.dim(m));
    FockSpace reduced(keep_dims);

    long traced_count = 1;
    for (int m : traced) traced_count *= space.dim(m);

    // Full index for (reduced index k, traced index t).
    auto compose = [&](long k, long t) {
        long full = 0;
        for (std::size_t j = 0; j < keep.size(); ++j) {
            full += (k % keep_dims[j]) * space.stride(keep[j]);
            k /= keep_dims[j];
        }
        for (int m : traced) {
            full += (t % space.dim(m)) * space.stride(m);
            t /= space.dim(m);
        }
        return full;
    };

    const long dr = reduced.total_dim();
    Matrix out = Matrix::Zero(dr, dr);
    const Matrix& in = rho.matrix();
    for (long i = 0; i < dr; ++i)
        for (long j = 0; j < dr; ++j) {
            Complex acc = 0.0;
            for (long t = 0; t < traced_count; ++t)
                acc += in(compose(i, t), compose(j, t));
            out(i, j) = acc;
        }
    return DensityOperator(reduced, std::move(out));
}

StateMetrics state_metrics(const DensityOperator& a, const DensityOperator& b) {
    if (a.space() != b.space())
        throw std::invalid_argument("state_metrics: dimension mismatch");
    Eigen::SelfAdjointEigenSolver<Matrix> ea(a.matrix());
    RealVector ev = ea.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    Matrix sqrt_a = ea.eigenvectors() * ev.asDiagonal().toDenseMatrix().cast<Complex>() *
                    ea.eigenvectors().adjoint();
    Matrix m = sqrt_a * b.matrix() * sqrt_a;
    Eigen::SelfAdjointEigenSolver<Matrix> em(m, Eigen::EigenvaluesOnly);
    double fid = em.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
    fid = std::clamp(fid, 0.0, 1.0);

    Eigen::SelfAdjointEigenSolver<Matrix> ed(a.matrix() - b.matrix(),
                                             Eigen::EigenvaluesOnly);
    double dist = 0.5 * ed.eigenvalues().cwiseAbs().sum();
    dist = std::clamp(dist, 0.0, 1.0);
    return {fid, dist};
}

double von_neumann_entropy(const DensityOperator& rho) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix(), Eigen::EigenvaluesOnly);
    double s = 0.0;
    for (long i = 0; i < es.eigenvalues().size(); ++i) {
        double p = es.eigenvalues()[i];
        if (p > 1e-14) s -= p * std::log(p);
    }
    return s;
}

Complex expect_a(const DensityOperator& rho, int mode) {
    const FockSpace& sp = rho.space();
    const long s = sp.stride(mode);
    Complex acc = 0.0;
    for (long i = 0; i < sp.total_dim(); ++i) {
        int n = sp.occupation_of(i, mode);
        if (n >= 1) acc += std::sqrt(double(n)) * rho.matrix()(i, i - s);
    }
    return acc;
}

Complex expect_aa(const DensityOperator& rho, int mode_i, int mode_j) {
    const FockSpace& sp = rho.space();
    const long si = sp.stride(mode_i);
    const long sj = sp.stride(mode_j);
    Complex acc = 0.0;
    for (long m = 0; m < sp.total_dim(); ++m) {
        int nj = sp.occupation_of(m, mode_j);
        if (nj < 1) continue;
        int ni = sp.occupation_of(m, mode_i) - (mode_i == mode_j ? 1 : 0);
        if (ni < 1) continue;
        acc += std::sqrt(double(nj) * double(ni)) * rho.matrix()(m, m - si - sj);
    }
    return acc;
}

Complex expect_adag_a(const DensityOperator& rho, int mode_i, int mode_j) {
    const FockSpace& sp = rho.space();
    const long si = sp.stride(mode_i);
    const long sj = sp.stride(mode_j);
    Complex acc = 0.0;
    for (long m = 0; m < sp.total_dim(); ++m) {
        int nj = sp.occupation_of(m, mode_j);
        if (nj < 1) continue;
        int ni_after = sp.occupation_of(m, mode_i) - (mode_i == mode_j ? 1 : 0);
        if (ni_after + 1 >= sp.dim(mode_i)) continue;  // raised out of truncation
        acc += std::sqrt(double(nj) * double(ni_after + 1)) *
               rho.matrix()(m, m - sj + si);
    }
    return acc;
}

}  // namespace carlsim
