#pragma once

#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace carlsim {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Thrown when probability mass in the top Fock levels exceeds the guard
/// threshold; carries the offending leakage estimate.
class TruncationError : public std::runtime_error {
public:
    TruncationError(const std::string& msg, double leakage)
        : std::runtime_error(msg + " (leakage " + std::to_string(leakage) + ")"),
          leakage_(leakage) {}
    double leakage() const { return leakage_; }

private:
    double leakage_;
};

/// Population mass above this in the top two Fock levels of a touched mode
/// makes an operation fail with TruncationError.
inline constexpr double kTruncationGuard = 1e-6;

/// Truncated multimode Fock space. Composite indices are little-endian:
/// mode 0 varies fastest.
class FockSpace {
public:
    explicit FockSpace(std::vector<int> mode_dims);

    int num_modes() const { return static_cast<int>(dims_.size()); }
    int dim(int mode) const { return dims_.at(mode); }
    const std::vector<int>& dims() const { return dims_; }
    long total_dim() const { return total_; }
    long stride(int mode) const { return strides_.at(mode); }

    long index(std::span<const int> occupation) const;
    int occupation_of(long index, int mode) const {
        return static_cast<int>((index / strides_[mode]) % dims_[mode]);
    }
    std::vector<int> occupation(long index) const;

    bool operator==(const FockSpace& other) const { return dims_ == other.dims_; }
    bool operator!=(const FockSpace& other) const { return !(*this == other); }

private:
    std::vector<int> dims_;
    std::vector<long> strides_;
    long total_ = 0;
};

/// Pure state on a FockSpace. Normalized on construction (1e-10 tolerance
/// unless `renormalize` is set, in which case the norm is fixed up).
class StateVector {
public:
    StateVector(FockSpace space, Vector amplitudes, bool renormalize = false);

    const FockSpace& space() const { return space_; }
    const Vector& amplitudes() const { return amp_; }

    /// Population of the highest Fock level of `mode`.
    double top_level_population(int mode) const;
    /// Max over modes of the top-two-level population.
    double leakage() const;
    /// <a_m^dag a_m> per mode.
    std::vector<double> mode_populations() const;

private:
    FockSpace space_;
    Vector amp_;
};

/// Trace-one positive operator. Hermiticity (1e-10) and unit trace (1e-8)
/// are enforced at construction; positivity is exposed via min_eigenvalue().
class DensityOperator {
public:
    DensityOperator(FockSpace space, Matrix matrix);
    static DensityOperator from_pure(const StateVector& psi);

    const FockSpace& space() const { return space_; }
    const Matrix& matrix() const { return mat_; }

    double min_eigenvalue() const;
    double leakage() const;
    std::vector<double> mode_populations() const;
    RealVector diagonal() const;

private:
    FockSpace space_;
    Matrix mat_;
};

// --- bosonic operators ----------------------------------------------------

/// Single-mode lowering operator embedded on `mode`: <n-1|a|n> = sqrt(n).
Matrix annihilation(const FockSpace& space, int mode);
Matrix creation(const FockSpace& space, int mode);
Matrix number_operator(const FockSpace& space, int mode);
/// Embed a single-mode operator (dim(mode) x dim(mode)) into the full space.
Matrix embed(const FockSpace& space, int mode, const Matrix& op);

/// exp(alpha a^dag - conj(alpha) a) on `mode` by dense matrix exponential.
/// With `guarded`, fails when the coherent top-two-level mass exceeds the
/// truncation guard; quadrature code that manages its own error budget may
/// disable the guard.
Matrix displacement(const FockSpace& space, int mode, Complex alpha,
                    bool guarded = true);

StateVector vacuum_state(const FockSpace& space);
StateVector basis_state(const FockSpace& space, std::span<const int> occupation);
StateVector coherent_state(const FockSpace& space, int mode, Complex alpha);

/// Squeezed vacuum on `mode` (x-quadrature squeezed for r > 0), vacuum on
/// the other modes.
StateVector squeezed_vacuum(const FockSpace& space, int mode, double r);

// --- reductions and metrics -------------------------------------------------

DensityOperator partial_trace(const DensityOperator& rho,
                              std::span<const int> keep_modes);

struct StateMetrics {
    double fidelity;        // Uhlmann, Tr sqrt(sqrt(a) b sqrt(a))
    double trace_distance;  // (1/2) ||a - b||_1
};
StateMetrics state_metrics(const DensityOperator& a, const DensityOperator& b);

/// -Tr[rho ln rho]; eigenvalues below 1e-14 are clamped to zero.
double von_neumann_entropy(const DensityOperator& rho);

// --- cheap moment accessors (no full-space operator build) ------------------

Complex expect_a(const DensityOperator& rho, int mode);
Complex expect_aa(const DensityOperator& rho, int mode_i, int mode_j);
Complex expect_adag_a(const DensityOperator& rho, int mode_i, int mode_j);

}  // namespace carlsim
