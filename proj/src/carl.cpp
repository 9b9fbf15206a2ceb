#include "carlsim/carl.hpp"

#include <cmath>

namespace carlsim {

namespace {
constexpr double kHbar = 1.054571817e-34;     // J s
constexpr double kEpsilon0 = 8.8541878128e-12;  // F/m
constexpr long kDenseLimit = 4096;
}  // namespace

void CarlParams::validate() const {
    if (g <= 0.0) throw std::invalid_argument("CarlParams: g must be > 0");
    if (n_atoms < 1.0) throw std::invalid_argument("CarlParams: n_atoms must be >= 1");
    if (omega_r <= 0.0) throw std::invalid_argument("CarlParams: omega_r must be > 0");
}

ModelConversion physical_to_model(const PhysicalParams& p) {
    Eigen::Vector3d qvec = p.k1 - p.k2;
    double q = qvec.norm();
    if (q == 0.0)
        throw std::invalid_argument("physical_to_model: degenerate geometry k1 = k2");
    if (p.mass <= 0.0 || p.volume <= 0.0 || p.detuning20 == 0.0)
        throw std::invalid_argument("physical_to_model: invalid physical parameters");
    ModelConversion out;
    out.q = q;
    out.params.omega_r = kHbar * q * q / (2.0 * p.mass);
    out.params.g = (p.rabi / (2.0 * p.detuning20)) *
                   std::sqrt(p.pump_frequency * p.dipole * p.dipole /
                             (2.0 * kHbar * kEpsilon0 * p.volume));
    out.params.n_atoms = p.n_atoms;
    out.params.delta = 0.0;
    out.delocalization_ok = p.condensate_size > 10.0 * p.wavelength;
    return out;
}

QuadraticHamiltonian build_three_mode_hamiltonian(const CarlParams& params) {
    params.validate();
    const Complex ig(0.0, params.g_sqrt_n());
    QuadraticHamiltonian h;
    h.hermitian_block = Matrix::Zero(3, 3);
    h.hermitian_block(0, 0) = -params.delta_minus();
    h.hermitian_block(1, 1) = params.delta_plus();
    h.hermitian_block(2, 1) = ig;   // i g sqrt(N) a3^dag a2
    h.hermitian_block(1, 2) = -ig;  // h.c.
    h.squeezing_block = Matrix::Zero(3, 3);
    h.squeezing_block(0, 2) = 0.5 * ig;  // i g sqrt(N) a1^dag a3^dag, symmetric split
    h.squeezing_block(2, 0) = 0.5 * ig;
    h.linear = Vector::Zero(3);
    return h;
}

SparseMatrix fock_hamiltonian_sparse(const QuadraticHamiltonian& h,
                                     const FockSpace& space) {
    h.validate();
    if (h.num_modes() != space.num_modes())
        throw std::invalid_argument("fock_hamiltonian: mode count mismatch");
    const int m = h.num_modes();
    const long d = space.total_dim();
    std::vector<Eigen::Triplet<Complex>> trip;
    trip.reserve(static_cast<std::size_t>(d) * (m * m + 2));

    auto add = [&](long row, long col, Complex v) {
        if (v != Complex(0, 0)) trip.emplace_back(row, col, v);
    };

    for (long idx = 0; idx < d; ++idx) {
        for (int i = 0; i < m; ++i) {
            int ni = space.occupation_of(idx, i);
            for (int j = 0; j < m; ++j) {
                int nj = space.occupation_of(idx, j);
                // A_ij a_i^dag a_j
                if (h.hermitian_block(i, j) != Complex(0, 0) && nj >= 1) {
                    int ni_mid = ni - (i == j ? 1 : 0);
                    if (ni_mid + 1 < space.dim(i)) {
                        long row = idx - space.stride(j) + space.stride(i);
                        add(row, idx,
                            h.hermitian_block(i, j) *
                                std::sqrt(double(nj) * double(ni_mid + 1)));
                    }
                }
                // B_ij a_i^dag a_j^dag and its Hermitian conjugate
                if (h.squeezing_block(i, j) != Complex(0, 0) &&
                    nj + 1 < space.dim(j)) {
                    int ni_mid = ni + (i == j ? 1 : 0);
                    if (ni_mid + 1 < space.dim(i)) {
                        long row = idx + space.stride(j) + space.stride(i);
                        Complex v = h.squeezing_block(i, j) *
                                    std::sqrt(double(nj + 1) * double(ni_mid + 1));
                        add(row, idx, v);
                        add(idx, row, std::conj(v));
                    }
                }
            }
            // c_i a_i^dag + h.c.
            if (h.linear[i] != Complex(0, 0) && ni + 1 < space.dim(i)) {
                long row = idx + space.stride(i);
                Complex v = h.linear[i] * std::sqrt(double(ni + 1));
                add(row, idx, v);
                add(idx, row, std::conj(v));
            }
        }
    }
    SparseMatrix out(d, d);
    out.setFromTriplets(trip.begin(), trip.end());
    return out;
}

Matrix fock_hamiltonian(const QuadraticHamiltonian& h, const FockSpace& space) {
    return Matrix(fock_hamiltonian_sparse(h, space));
}

FockPropagator::FockPropagator(const QuadraticHamiltonian& h, const FockSpace& space)
    : space_(space), dense_(space.total_dim() <= kDenseLimit) {
    if (dense_) {
        Matrix hm = fock_hamiltonian(h, space);
        Eigen::SelfAdjointEigenSolver<Matrix> es(hm);
        eigvecs_ = es.eigenvectors();
        eigvals_ = es.eigenvalues();
    } else {
        h_sparse_ = fock_hamiltonian_sparse(h, space);
    }
}

namespace {

// One adaptive Lanczos substep of exp(-iHt)v with full reorthogonalization.
// Returns the advanced vector; err_out gets the a posteriori estimate.
Vector lanczos_step(const SparseMatrix& h, double t, const Vector& v, int m,
                    double& err_out) {
    const long d = v.size();
    m = static_cast<int>(std::min<long>(m, d));
    Matrix basis(d, m);
    RealVector alpha = RealVector::Zero(m);
    RealVector beta = RealVector::Zero(m);  // beta[k] couples k and k+1
    basis.col(0) = v.normalized();
    int k = 0;
    double beta_next = 0.0;
    for (; k < m; ++k) {
        Vector w = h * basis.col(k);
        alpha[k] = std::real(basis.col(k).dot(w));
        w -= alpha[k] * basis.col(k);
        if (k > 0) w -= beta[k - 1] * basis.col(k - 1);
        // full reorthogonalization
        w -= basis.leftCols(k + 1) * (basis.leftCols(k + 1).adjoint() * w);
        beta_next = w.norm();
        if (k + 1 < m) {
            if (beta_next < 1e-14) {  // invariant subspace: exact
                ++k;
                beta_next = 0.0;
                break;
            }
            beta[k] = beta_next;
            basis.col(k + 1) = w / beta_next;
        }
    }
    const int used = k == m ? m : k;
    RealMatrix tri = RealMatrix::Zero(used, used);
    for (int i = 0; i < used; ++i) {
        tri(i, i) = alpha[i];
        if (i + 1 < used) tri(i, i + 1) = tri(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(tri);
    Vector phase(used);
    for (int i = 0; i < used; ++i)
        phase[i] = std::exp(Complex(0.0, -es.eigenvalues()[i] * t));
    Vector small = es.eigenvectors().cast<Complex>() *
                   (phase.array() *
                    es.eigenvectors().row(0).transpose().cast<Complex>().array())
                       .matrix();
    err_out = (used == m) ? beta_next * std::abs(small[used - 1]) : 0.0;
    return v.norm() * (basis.leftCols(used) * small);
}

}  // namespace

StateVector FockPropagator::evolve(double t, const StateVector& initial) const {
    if (initial.space() != space_)
        throw std::invalid_argument("FockPropagator: space mismatch");
    double leak0 = initial.leakage();
    if (leak0 > kTruncationGuard)
        throw TruncationError("evolve_fock: initial state leakage", leak0);

    Vector out;
    if (dense_) {
        Vector coeff = eigvecs_.adjoint() * initial.amplitudes();
        for (long i = 0; i < coeff.size(); ++i)
            coeff[i] *= std::exp(Complex(0.0, -eigvals_[i] * t));
        out = eigvecs_ * coeff;
    } else {
        out = initial.amplitudes();
        double remaining = t;
        double dt = t;
        const double tol = 1e-11;
        int guard = 0;
        // Stop once the residue is below the time resolution; subtracting
        // steps leaves O(eps * t) behind, and the error estimator has a
        // noise floor, so demanding exactly zero never terminates.
        while (remaining > 1e-14 * t) {
            if (++guard > 10000)
                throw std::runtime_error("evolve_fock: Lanczos failed to converge");
            double step = std::min(dt, remaining);
            double err = 0.0;
            Vector next = lanczos_step(h_sparse_, step, out, 60, err);
            // Per-step budget proportional to the step share, floored above
            // the ~1e-15 noise of the a posteriori estimate.
            if (err > tol * std::max(step / t, 1e-3) && step > 1e-12 * t) {
                dt = 0.5 * step;
                continue;
            }
            out = std::move(next);
            remaining -= step;
            if (err < 1e-2 * tol) dt = std::min(2.0 * step, t);
        }
    }
    double nrm = out.norm();
    if (std::abs(nrm - 1.0) > 1e-9)
        throw std::runtime_error("evolve_fock: norm drift " +
                                 std::to_string(std::abs(nrm - 1.0)));
    StateVector result(space_, std::move(out), /*renormalize=*/true);
    double leak = result.leakage();
    if (leak > kTruncationGuard)
        throw TruncationError("evolve_fock: result leakage", leak);
    return result;
}

StateVector evolve_fock(const QuadraticHamiltonian& h, double t,
                        const StateVector& initial) {
    return FockPropagator(h, initial.space()).evolve(t, initial);
}

double constant_of_motion(const StateVector& psi) {
    auto pops = psi.mode_populations();
    if (pops.size() != 3)
        throw std::invalid_argument("constant_of_motion: expects three modes");
    return pops[1] - pops[0] + pops[2];
}

AnalyticPopulations analytic_populations(const CarlParams& params, double t) {
    params.validate();
    const double gn = params.g_sqrt_n();
    const double ratio = gn / (2.0 * params.omega_r);
    const double grow = 0.25 * std::exp(2.0 * gn * t);
    AnalyticPopulations out;
    out.n1 = grow * (1.0 + ratio * ratio);
    out.n2 = grow * ratio * ratio;
    out.n3 = grow;
    out.quantum_limit_ok = params.quantum_limit();
    out.asymptotic_ok = 2.0 * gn * t >= 4.0;
    return out;
}

InteractionWindow interaction_window(const CarlParams& params) {
    params.validate();
    const double gn = params.g_sqrt_n();
    const double arg = 4.0 * params.omega_r / gn;
    if (arg <= 1.0)
        throw EmptyWindowError("interaction_window: g sqrt(N) >= 4 omega_r");
    return {1.0 / gn, std::log(arg) / gn};
}

State0 build_state_0(const CarlParams& params, double t, const FockSpace& space) {
    if (space.num_modes() != 3)
        throw std::invalid_argument("build_state_0: expects a three-mode space");
    QuadraticHamiltonian h = build_three_mode_hamiltonian(params);
    GaussianState g = evolve_gaussian(h, t, GaussianState::vacuum(3));
    auto pops = mode_populations(g);
    const double n1 = pops[0], n2 = pops[1], n3 = pops[2];

    Complex m12 = moment_aa(g, 0, 1);
    Complex m13 = moment_aa(g, 0, 2);
    double amp_a = std::sqrt(std::max(0.0, n2 / (1.0 + n1)));
    double amp_b = std::sqrt(std::max(0.0, n3 / (1.0 + n1)));
    Complex alpha = amp_a * (std::abs(m12) > 0.0 ? m12 / std::abs(m12) : Complex(1.0));
    Complex beta = amp_b * (std::abs(m13) > 0.0 ? m13 / std::abs(m13) : Complex(1.0));

    // c_{mn} = alpha^m beta^n sqrt((m+n)!/(m! n!)) / sqrt(1+N1) at |m+n, m, n>.
    Vector amp = Vector::Zero(space.total_dim());
    const double norm0 = 1.0 / std::sqrt(1.0 + n1);
    double kept = 0.0;
    const int d1 = space.dim(0), d2 = space.dim(1), d3 = space.dim(2);
    std::vector<Complex> col(d2, Complex(0, 0));
    Complex cm = norm0;  // c_{m,0} along n = 0
    for (int mi = 0; mi < d2 && mi < d1; ++mi) {
        if (mi > 0) cm *= alpha;  // sqrt((m)!/(m!0!)) ratio = 1
        Complex c = cm;
        for (int n = 0; mi + n < d1 && n < d3; ++n) {
            if (n > 0) c *= beta * std::sqrt(double(mi + n) / double(n));
            int occ[3] = {mi + n, mi, n};
            amp[space.index(occ)] = c;
            kept += std::norm(c);
        }
    }
    State0 out{StateVector(space, std::move(amp), /*renormalize=*/true),
               alpha, beta, n1, n2, n3, std::max(0.0, 1.0 - kept)};
    if (out.truncated_mass > kTruncationGuard)
        throw TruncationError("build_state_0: truncation too small for populations",
                              out.truncated_mass);
    return out;
}

StateVector twin_state_vector(double n3_mean, const FockSpace& two_mode_space) {
    if (two_mode_space.num_modes() != 2)
        throw std::invalid_argument("twin_state_vector: expects a two-mode space");
    if (n3_mean < 0.0)
        throw std::invalid_argument("twin_state_vector: negative mean population");
    const double beta = std::sqrt(n3_mean / (1.0 + n3_mean));
    Vector amp = Vector::Zero(two_mode_space.total_dim());
    double c = 1.0 / std::sqrt(1.0 + n3_mean);
    const int dmax = std::min(two_mode_space.dim(0), two_mode_space.dim(1));
    const double tail = std::pow(beta * beta, dmax);
    if (tail > kTruncationGuard)
        throw TruncationError("twin_state_vector: thermal tail exceeds guard", tail);
    for (int n = 0; n < dmax; ++n) {
        int occ[2] = {n, n};
        amp[two_mode_space.index(occ)] = c;
        c *= beta;
    }
    return StateVector(two_mode_space, std::move(amp), /*renormalize=*/true);
}

DensityOperator reduced_twin_state(double n3_mean, const FockSpace& two_mode_space) {
    return DensityOperator::from_pure(twin_state_vector(n3_mean, two_mode_space));
}

double classical_hamiltonian(const CarlParams& params, const ClassicalAtomState& s) {
    double h = -params.delta * std::norm(s.field);
    for (std::size_t j = 0; j < s.theta.size(); ++j) {
        h += params.omega_r * s.p[j] * s.p[j];
        h += 2.0 * params.g * std::imag(s.field * std::exp(Complex(0.0, s.theta[j])));
    }
    return h;
}

namespace {

struct ClassicalDeriv {
    std::vector<double> dtheta, dp;
    Complex dfield;
};

ClassicalDeriv classical_rhs(const CarlParams& prm, const ClassicalAtomState& s) {
    const std::size_t n = s.theta.size();
    ClassicalDeriv d{std::vector<double>(n), std::vector<double>(n), Complex(0, 0)};
    Complex sum_exp(0, 0);
    for (std::size_t j = 0; j < n; ++j) {
        Complex e = std::exp(Complex(0.0, s.theta[j]));
        d.dtheta[j] = 2.0 * prm.omega_r * s.p[j];
        d.dp[j] = -2.0 * prm.g * std::real(s.field * e);
        sum_exp += std::conj(e);
    }
    d.dfield = prm.g * sum_exp + Complex(0.0, prm.delta) * s.field;
    return d;
}

ClassicalAtomState axpy(const ClassicalAtomState& s, double h,
                        const ClassicalDeriv& d) {
    ClassicalAtomState out = s;
    for (std::size_t j = 0; j < s.theta.size(); ++j) {
        out.theta[j] += h * d.dtheta[j];
        out.p[j] += h * d.dp[j];
    }
    out.field += h * d.dfield;
    return out;
}

}  // namespace

std::vector<ClassicalSample> classical_carl_simulate(const CarlParams& params,
                                                     const ClassicalAtomState& initial,
                                                     double t_final, double dt,
                                                     int sample_stride) {
    params.validate();
    if (initial.theta.empty() || initial.theta.size() != initial.p.size())
        throw std::invalid_argument("classical_carl_simulate: bad initial state");
    double fastest = std::max({params.omega_r, params.g_sqrt_n(),
                               std::abs(params.delta)});
    if (dt <= 0.0 || dt * fastest >= 0.05)
        throw std::invalid_argument(
            "classical_carl_simulate: dt does not resolve the fastest frequency");
    if (sample_stride < 1) sample_stride = 1;

    auto record = [&](double t, const ClassicalAtomState& s) {
        double psum = 0.0;
        for (double pj : s.p) psum += pj;
        return ClassicalSample{t, s, classical_hamiltonian(params, s),
                               std::norm(s.field) + psum};
    };

    std::vector<ClassicalSample> traj;
    ClassicalAtomState s = initial;
    long steps = std::lround(std::ceil(t_final / dt - 1e-12));
    traj.push_back(record(0.0, s));
    for (long k = 0; k < steps; ++k) {
        double h = std::min(dt, t_final - k * dt);
        auto k1 = classical_rhs(params, s);
        auto k2 = classical_rhs(params, axpy(s, 0.5 * h, k1));
        auto k3 = classical_rhs(params, axpy(s, 0.5 * h, k2));
        auto k4 = classical_rhs(params, axpy(s, h, k3));
        for (std::size_t j = 0; j < s.theta.size(); ++j) {
            s.theta[j] += h / 6.0 * (k1.dtheta[j] + 2 * k2.dtheta[j] +
                                     2 * k3.dtheta[j] + k4.dtheta[j]);
            s.p[j] += h / 6.0 * (k1.dp[j] + 2 * k2.dp[j] + 2 * k3.dp[j] + k4.dp[j]);
        }
        s.field += h / 6.0 * (k1.dfield + 2.0 * k2.dfield + 2.0 * k3.dfield +
                              k4.dfield);
        if ((k + 1) % sample_stride == 0 || k + 1 == steps)
            traj.push_back(record((k + 1) * dt, s));
    }
    return traj;
}

}  // namespace carlsim
