#include "carlsim/teleport.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

namespace carlsim {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kNegligibleOutcome = 1e-14;

// Gauss-Legendre nodes/weights on [a, b].
void gauss_legendre(int n, double a, double b, std::vector<double>& x,
                    std::vector<double>& w) {
    x.resize(n);
    w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        double xm = 0.5 * (b + a), xl = 0.5 * (b - a);
        x[i] = xm - xl * z;
        x[n - 1 - i] = xm + xl * z;
        w[i] = 2.0 * xl / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
}

// Single-mode D(r) for real r >= 0 as the top-left block of the infinite
// operator. Unlike the exponential of the truncated generator (which stays
// unitary), this block is a contraction, so matrix elements far outside the
// truncation are exponentially small instead of aliased back in. The block
// is computed from a padded generator: the pad absorbs everything D(r) can
// push past the block before it could reflect back. With phases
// P = diag(i^n), P [i r(a^dag - a)] P^dag is real symmetric tridiagonal with
// off-diagonal -r sqrt(n), so a tridiagonal eigensolve does the work.
Matrix displacement_radial(int dim, double r) {
    const int pad = int(std::ceil(r * r + 10.0 * r + 20.0));
    const int n_full = dim + pad;
    RealVector diag = RealVector::Zero(n_full);
    RealVector sub(n_full - 1);
    for (int n = 1; n < n_full; ++n) sub[n - 1] = -r * std::sqrt(double(n));
    Eigen::SelfAdjointEigenSolver<RealMatrix> es;
    es.computeFromTridiagonal(diag, sub);

    Vector phase(n_full);
    for (int i = 0; i < n_full; ++i)
        phase[i] = std::exp(Complex(0.0, -es.eigenvalues()[i]));
    // block of P^dag exp(-iT) P
    Matrix rows = es.eigenvectors().topRows(dim).cast<Complex>();
    Matrix block = rows * phase.asDiagonal() * rows.adjoint();
    Vector p(dim);
    for (int n = 0; n < dim; ++n) p[n] = std::exp(Complex(0.0, 0.5 * kPi * n));
    return p.conjugate().asDiagonal() * block * p.asDiagonal();
}

// D(r e^{i theta}) = P(theta) D(r) P(theta)^dag with P = diag(e^{i theta n}).
Matrix rotate_displacement(const Matrix& dr, double theta) {
    const long d = dr.rows();
    Vector ph(d);
    for (long n = 0; n < d; ++n) ph[n] = std::exp(Complex(0.0, theta * n));
    return ph.asDiagonal() * dr * ph.conjugate().asDiagonal();
}

double mean_photon(const DensityOperator& sigma) {
    return sigma.mode_populations().at(0);
}

}  // namespace

ChannelSpec channel_parameter(double n1, double n3, double time) {
    if (n1 < 0.0 || n3 < 0.0)
        throw std::invalid_argument("channel_parameter: negative populations");
    double s = n1 + n3;
    ChannelSpec spec;
    spec.k = 1.0 + s - std::sqrt(s * (s + 2.0));
    spec.provenance = ChannelSpec::Provenance{n1, n3, time};
    return spec;
}

PolarGrid PolarGrid::build(double radius, int radial, int angular) {
    if (radius <= 0.0 || radial < 2 || angular < 2)
        throw std::invalid_argument("PolarGrid: bad spec");
    // integral f d^2a = (1/2) int_0^{R^2} du int_0^{2pi} dth f(sqrt(u) e^{i th})
    std::vector<double> u, wu;
    gauss_legendre(radial, 0.0, radius * radius, u, wu);
    PolarGrid grid;
    grid.radius = radius;
    grid.angular = angular;
    grid.radii.resize(radial);
    grid.nodes.reserve(static_cast<std::size_t>(radial) * angular);
    grid.weights.reserve(static_cast<std::size_t>(radial) * angular);
    const double wth = 2.0 * kPi / angular;
    for (int i = 0; i < radial; ++i) {
        double r = std::sqrt(u[i]);
        grid.radii[i] = r;
        for (int j = 0; j < angular; ++j) {
            double th = wth * j;
            grid.nodes.push_back(r * std::exp(Complex(0.0, th)));
            grid.weights.push_back(0.5 * wu[i] * wth);
        }
    }
    return grid;
}

Matrix povm_element(Complex alpha, const DensityOperator& sigma) {
    if (sigma.space().num_modes() != 1)
        throw std::invalid_argument("povm_element: sigma must be single-mode");
    Matrix d = rotate_displacement(displacement_radial(sigma.space().dim(0),
                                                       std::abs(alpha)),
                                   std::arg(alpha));
    return (d * sigma.matrix().transpose() * d.adjoint()) / kPi;
}

namespace {

// Tr_3[rho (I (x) Pi)] for a two-mode (a1, a3) resource; mode a1 is the
// fast index.
Matrix reduce_with_povm(const Matrix& rho, long d1, long d3, const Matrix& pi) {
    Matrix m1 = Matrix::Zero(d1, d1);
    for (long n = 0; n < d3; ++n)
        for (long np = 0; np < d3; ++np) {
            Complex c = pi(np, n);
            if (c == Complex(0, 0)) continue;
            m1 += c * rho.block(n * d1, np * d1, d1, d1);
        }
    return m1;
}

// Pure-resource fast path: Psi Pi^T Psi^dag with Psi(m, n) = amp[m + d1 n].
Matrix reduce_with_povm(const Eigen::Map<const Matrix>& psi, const Matrix& pi) {
    return psi * pi.transpose() * psi.adjoint();
}

Eigen::Map<const Matrix> as_matrix(const StateVector& resource) {
    const long d1 = resource.space().dim(0);
    const long d3 = resource.space().dim(1);
    return Eigen::Map<const Matrix>(resource.amplitudes().data(), d1, d3);
}

void check_two_mode(const FockSpace& resource_space, const DensityOperator& sigma) {
    if (resource_space.num_modes() != 2)
        throw std::invalid_argument("resource must be two-mode (a1, a3)");
    if (sigma.space().num_modes() != 1 ||
        sigma.space().dim(0) != resource_space.dim(1))
        throw std::invalid_argument("sigma must be single-mode, a3-sized");
}

ConditionalState finish_conditional(Matrix m1, const FockSpace& mode1_space,
                                    Complex alpha) {
    ConditionalState out;
    out.p_alpha = m1.trace().real();
    if (out.p_alpha <= kNegligibleOutcome) return out;
    m1 /= out.p_alpha;
    m1 = 0.5 * (m1 + m1.adjoint()).eval();
    out.rho_alpha = DensityOperator(mode1_space, m1);
    // In the Fock basis D(alpha)^T = D(-conj(alpha)), so the POVM transpose
    // shifts the conditional state by conj(alpha); displace by -conj(alpha)
    // to undo it.
    const Complex corr = -std::conj(alpha);
    Matrix d = rotate_displacement(displacement_radial(mode1_space.dim(0),
                                                       std::abs(corr)),
                                   std::arg(corr));
    Matrix tau = d * m1 * d.adjoint();
    tau = 0.5 * (tau + tau.adjoint()).eval();
    // The correction displacement leaks a little trace at the truncation
    // edge; renormalize so the conditional state stays a density operator.
    tau /= tau.trace().real();
    out.tau_alpha = DensityOperator(mode1_space, tau);
    return out;
}

}  // namespace

ConditionalState conditional_state(const DensityOperator& resource,
                                   const DensityOperator& sigma, Complex alpha) {
    check_two_mode(resource.space(), sigma);
    const long d1 = resource.space().dim(0), d3 = resource.space().dim(1);
    Matrix pi = povm_element(alpha, sigma);
    return finish_conditional(reduce_with_povm(resource.matrix(), d1, d3, pi),
                              FockSpace({int(d1)}), alpha);
}

ConditionalState conditional_state(const StateVector& resource,
                                   const DensityOperator& sigma, Complex alpha) {
    check_two_mode(resource.space(), sigma);
    Matrix pi = povm_element(alpha, sigma);
    return finish_conditional(reduce_with_povm(as_matrix(resource), pi),
                              FockSpace({resource.space().dim(0)}), alpha);
}

namespace {

double coverage_radius(double k, double n_sigma, double n3) {
    double heuristic = 3.0 * (std::sqrt(k) + std::sqrt(n_sigma) + 1.0);
    double tail = std::sqrt((n3 + n_sigma + 1.0) * std::log(1e5));
    return std::max(heuristic, tail);
}

struct QuadratureContext {
    PolarGrid grid;
    std::vector<Matrix> d1_radial;  // correction displacements per radius
    std::vector<Matrix> d3_radial;  // measurement displacements per radius
};

QuadratureContext make_context(const GridSpec& spec, double auto_radius, long d1,
                               long d3) {
    double radius = spec.radius > 0.0 ? spec.radius : auto_radius;
    if (radius < auto_radius)
        throw std::invalid_argument("grid radius below the coverage heuristic");
    QuadratureContext ctx{PolarGrid::build(radius, spec.radial, spec.angular), {}, {}};
    ctx.d1_radial.reserve(ctx.grid.radii.size());
    ctx.d3_radial.reserve(ctx.grid.radii.size());
    for (double r : ctx.grid.radii) {
        ctx.d1_radial.push_back(displacement_radial(int(d1), r));
        if (d3 == d1)
            ctx.d3_radial.push_back(ctx.d1_radial.back());
        else
            ctx.d3_radial.push_back(displacement_radial(int(d3), r));
    }
    return ctx;
}

template <typename ReduceFn>
TeleportedState run_teleport_quadrature(ReduceFn&& reduce, const Matrix& sigma_t,
                                        long d1, long d3, double k,
                                        double n_sigma, double n3,
                                        const GridSpec& spec) {
    QuadratureContext ctx = make_context(spec, coverage_radius(k, n_sigma, n3),
                                         d1, d3);
    const int na = ctx.grid.angular;
    Matrix tau_acc = Matrix::Zero(d1, d1);
    double mass = 0.0;
    for (std::size_t ri = 0; ri < ctx.grid.radii.size(); ++ri) {
        for (int j = 0; j < na; ++j) {
            std::size_t node = ri * na + j;
            double theta = 2.0 * kPi * j / na;
            Matrix d3m = rotate_displacement(ctx.d3_radial[ri], theta);
            Matrix pi = (d3m * sigma_t * d3m.adjoint()) / kPi;
            Matrix m1 = reduce(pi);
            double p = m1.trace().real();
            double w = ctx.grid.weights[node];
            mass += w * p;
            // Correction amplitude for node r e^{i theta} is -r e^{-i theta}.
            Matrix d1m = rotate_displacement(ctx.d1_radial[ri], kPi - theta);
            tau_acc.noalias() += w * (d1m * m1 * d1m.adjoint());
        }
    }
    tau_acc = 0.5 * (tau_acc + tau_acc.adjoint()).eval();
    double tr = tau_acc.trace().real();
    if (tr <= 0.0)
        throw std::runtime_error("teleported_state_quadrature: vanishing mass");
    tau_acc /= tr;
    return {DensityOperator(FockSpace({int(d1)}), std::move(tau_acc)),
            std::abs(mass - 1.0), ctx.grid.radius};
}

}  // namespace

TeleportedState teleported_state_quadrature(const StateVector& resource,
                                            const DensityOperator& sigma,
                                            const GridSpec& grid) {
    check_two_mode(resource.space(), sigma);
    auto pops = resource.mode_populations();
    double k = channel_parameter(pops[0], pops[1]).k;
    auto psi = as_matrix(resource);
    Matrix sigma_t = sigma.matrix().transpose();
    return run_teleport_quadrature(
        [&](const Matrix& pi) { return reduce_with_povm(psi, pi); }, sigma_t,
        resource.space().dim(0), resource.space().dim(1), k, mean_photon(sigma),
        pops[1], grid);
}

TeleportedState teleported_state_quadrature(const DensityOperator& resource,
                                            const DensityOperator& sigma,
                                            const GridSpec& grid) {
    check_two_mode(resource.space(), sigma);
    auto pops = resource.mode_populations();
    double k = channel_parameter(pops[0], pops[1]).k;
    const long d1 = resource.space().dim(0), d3 = resource.space().dim(1);
    Matrix sigma_t = sigma.matrix().transpose();
    return run_teleport_quadrature(
        [&](const Matrix& pi) {
            return reduce_with_povm(resource.matrix(), d1, d3, pi);
        },
        sigma_t, d1, d3, k, mean_photon(sigma), pops[1], grid);
}

DensityOperator gaussian_channel_apply(const DensityOperator& sigma,
                                       const ChannelSpec& spec,
                                       const GridSpec& grid) {
    if (sigma.space().num_modes() != 1)
        throw std::invalid_argument("gaussian_channel_apply: sigma must be single-mode");
    if (spec.k < 0.0)
        throw std::invalid_argument("gaussian_channel_apply: negative K");
    if (spec.k < 1e-12) return sigma;

    const int d = sigma.space().dim(0);
    // The Gaussian weight carries all the mass; integrate to where its tail
    // is below 1e-14.
    double radius = grid.radius > 0.0 ? grid.radius
                                      : std::sqrt(spec.k * std::log(1e14));
    PolarGrid pg = PolarGrid::build(radius, grid.radial, grid.angular);

    Matrix tau_acc = Matrix::Zero(d, d);
    double mass = 0.0;
    const int na = pg.angular;
    for (std::size_t ri = 0; ri < pg.radii.size(); ++ri) {
        double r = pg.radii[ri];
        Matrix dr = displacement_radial(d, r);
        double gauss = std::exp(-r * r / spec.k) / (kPi * spec.k);
        for (int j = 0; j < na; ++j) {
            double w = pg.weights[ri * na + j] * gauss;
            Matrix dm = rotate_displacement(dr, 2.0 * kPi * j / na);
            tau_acc.noalias() += w * (dm * sigma.matrix() * dm.adjoint());
            mass += w;
        }
    }
    tau_acc = 0.5 * (tau_acc + tau_acc.adjoint()).eval();
    tau_acc /= tau_acc.trace().real();
    DensityOperator out(sigma.space(), std::move(tau_acc));
    double leak = out.leakage();
    if (leak > kTruncationGuard)
        throw TruncationError("gaussian_channel_apply: output leakage", leak);
    (void)mass;
    return out;
}

namespace {

// Node probabilities and sampled node indices shared by outcome sampling and
// the Monte Carlo average.
struct SampledNodes {
    PolarGrid grid;
    std::vector<double> density;  // p_alpha at each node
    std::vector<long> draws;      // node index per sample
};

double next_uniform(std::mt19937_64& eng) {
    return double(eng() >> 11) * 0x1.0p-53;
}

SampledNodes sample_nodes(const StateVector& resource, const DensityOperator& sigma,
                          std::uint64_t seed, long count, const GridSpec& spec) {
    check_two_mode(resource.space(), sigma);
    if (count < 1) throw std::invalid_argument("sample count must be >= 1");
    auto pops = resource.mode_populations();
    double k = channel_parameter(pops[0], pops[1]).k;
    double radius = spec.radius > 0.0
                        ? spec.radius
                        : coverage_radius(k, mean_photon(sigma), pops[1]);
    PolarGrid pg = PolarGrid::build(radius, spec.radial, spec.angular);

    auto psi = as_matrix(resource);
    Matrix gram = psi.adjoint() * psi;  // p = Tr(Pi^T Psi^dag Psi)
    Matrix sigma_t = sigma.matrix().transpose();
    const int na = pg.angular;
    const long d3 = resource.space().dim(1);

    SampledNodes out{std::move(pg), {}, {}};
    out.density.resize(out.grid.nodes.size());
    std::vector<double> cdf(out.grid.nodes.size());
    double total = 0.0;
    for (std::size_t ri = 0; ri < out.grid.radii.size(); ++ri) {
        Matrix dr = displacement_radial(int(d3), out.grid.radii[ri]);
        for (int j = 0; j < na; ++j) {
            std::size_t node = ri * na + j;
            Matrix dm = rotate_displacement(dr, 2.0 * kPi * j / na);
            Matrix pi = (dm * sigma_t * dm.adjoint()) / kPi;
            double p = (pi.transpose() * gram).trace().real();
            out.density[node] = std::max(0.0, p);
            total += out.grid.weights[node] * out.density[node];
            cdf[node] = total;
        }
    }
    if (total < 0.98)
        throw std::invalid_argument("sample_bell_outcome: grid coverage failure");

    std::mt19937_64 eng(seed);
    out.draws.reserve(count);
    for (long s = 0; s < count; ++s) {
        double u = next_uniform(eng) * total;
        auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
        out.draws.push_back(std::min<long>(it - cdf.begin(), cdf.size() - 1));
    }
    return out;
}

}  // namespace

std::vector<BellOutcome> sample_bell_outcome(const StateVector& resource,
                                             const DensityOperator& sigma,
                                             std::uint64_t rng_seed, long count,
                                             const GridSpec& grid) {
    SampledNodes s = sample_nodes(resource, sigma, rng_seed, count, grid);
    std::vector<BellOutcome> out;
    out.reserve(s.draws.size());
    for (long node : s.draws)
        out.push_back({s.grid.nodes[node], s.density[node]});
    return out;
}

DensityOperator teleported_state_sampled(const StateVector& resource,
                                         const DensityOperator& sigma,
                                         std::uint64_t rng_seed, long count,
                                         const GridSpec& grid) {
    SampledNodes s = sample_nodes(resource, sigma, rng_seed, count, grid);
    std::vector<long> mult(s.grid.nodes.size(), 0);
    for (long node : s.draws) ++mult[node];

    const long d1 = resource.space().dim(0);
    Matrix acc = Matrix::Zero(d1, d1);
    long used = 0;
    for (std::size_t node = 0; node < mult.size(); ++node) {
        if (mult[node] == 0) continue;
        ConditionalState cs = conditional_state(resource, sigma, s.grid.nodes[node]);
        if (!cs.tau_alpha) continue;
        acc += double(mult[node]) * cs.tau_alpha->matrix();
        used += mult[node];
    }
    if (used == 0)
        throw std::runtime_error("teleported_state_sampled: no usable samples");
    acc /= double(used);
    acc = 0.5 * (acc + acc.adjoint()).eval();
    acc /= acc.trace().real();
    return DensityOperator(FockSpace({int(d1)}), std::move(acc));
}

DisplacementPulse displacement_pulse(const CarlParams& params, Complex gamma,
                                     double tau_pulse, const FockSpace& space) {
    params.validate();
    if (space.num_modes() != 2)
        throw std::invalid_argument("displacement_pulse: expects a two-mode (a1, a2) space");
    const double gn = params.g_sqrt_n();
    const Complex alpha = -gn * std::conj(gamma) * tau_pulse;

    // H2 = i g sqrt(N) [conj(gamma)(a1^dag + a2) - gamma (a1 + a2^dag)]
    QuadraticHamiltonian h2;
    h2.hermitian_block = Matrix::Zero(2, 2);
    h2.squeezing_block = Matrix::Zero(2, 2);
    h2.linear = Vector::Zero(2);
    h2.linear[0] = Complex(0, 1) * gn * std::conj(gamma);
    h2.linear[1] = Complex(0, -1) * gn * gamma;
    Matrix hm = fock_hamiltonian(h2, space);
    Matrix u = (Complex(0, 1) * tau_pulse * hm).exp();

    Matrix d1 = displacement(space, 0, alpha);
    Matrix d2 = displacement(space, 1, alpha);
    Matrix factored = d1 * d2.adjoint();

    // Compare on the central block (lower half of each mode's ladder) up to
    // a global phase.
    std::vector<long> central;
    for (long i = 0; i < space.total_dim(); ++i)
        if (space.occupation_of(i, 0) <= (space.dim(0) - 1) / 2 &&
            space.occupation_of(i, 1) <= (space.dim(1) - 1) / 2)
            central.push_back(i);
    Matrix uc(central.size(), central.size());
    Matrix fc(central.size(), central.size());
    for (std::size_t r = 0; r < central.size(); ++r)
        for (std::size_t c = 0; c < central.size(); ++c) {
            uc(r, c) = u(central[r], central[c]);
            fc(r, c) = factored(central[r], central[c]);
        }
    Complex overlap = (fc.adjoint() * uc).trace();
    Complex phase = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap)
                                            : Complex(1.0);
    double deviation = (uc - phase * fc).norm();
    return {alpha, std::move(u), deviation, phase};
}

PulseSetting inverse_pulse_for(Complex alpha_target, const CarlParams& params,
                               double tau_pulse) {
    params.validate();
    if (!std::isfinite(alpha_target.real()) || !std::isfinite(alpha_target.imag()))
        throw std::invalid_argument("inverse_pulse_for: alpha_target not finite");
    if (tau_pulse == 0.0)
        throw std::invalid_argument("inverse_pulse_for: zero tau_pulse");
    Complex gamma = -std::conj(alpha_target) / (params.g_sqrt_n() * tau_pulse);
    return {gamma, tau_pulse};
}

DensityOperator channel_with_number_fluctuations(
    const DensityOperator& sigma, const CarlParams& params, double t,
    const std::vector<std::pair<double, double>>& n_distribution,
    const GridSpec& grid) {
    if (n_distribution.empty())
        throw std::invalid_argument("channel_with_number_fluctuations: empty distribution");
    double total = 0.0;
    for (auto& [n, p] : n_distribution) {
        if (n <= 0.0 || p < 0.0)
            throw std::invalid_argument("channel_with_number_fluctuations: bad entry");
        total += p;
    }
    if (total <= 0.0)
        throw std::invalid_argument("channel_with_number_fluctuations: zero mass");

    Matrix acc = Matrix::Zero(sigma.space().total_dim(), sigma.space().total_dim());
    for (auto& [n, p] : n_distribution) {
        if (p == 0.0) continue;
        CarlParams local = params;
        local.n_atoms = n;
        QuadraticHamiltonian h = build_three_mode_hamiltonian(local);
        auto pops = mode_populations(evolve_gaussian(h, t, GaussianState::vacuum(3)));
        ChannelSpec spec = channel_parameter(pops[0], pops[2], t);
        acc += (p / total) * gaussian_channel_apply(sigma, spec, grid).matrix();
    }
    return DensityOperator(sigma.space(), std::move(acc));
}

}  // namespace carlsim
