#pragma once

#include <string>

#include <json.hpp>

#include "carlsim/fock.hpp"
#include "carlsim/gaussian.hpp"

namespace carlsim {

/// Full round-trip decimal formatting (17 significant digits).
std::string format_full(double x);

/// Complex numbers serialize as [re, im]; matrices row-major.
nlohmann::json to_json(Complex z);
nlohmann::json to_json(const Vector& v);
nlohmann::json to_json(const Matrix& m);
nlohmann::json to_json(const StateVector& psi);
nlohmann::json to_json(const DensityOperator& rho);
nlohmann::json to_json(const GaussianState& s);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace carlsim
