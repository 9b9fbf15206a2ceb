#include "carlsim/report.hpp"

#include <cstdio>
#include <fstream>

namespace carlsim {

std::string format_full(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

nlohmann::json to_json(Complex z) {
    return nlohmann::json::array({z.real(), z.imag()});
}

nlohmann::json to_json(const Vector& v) {
    nlohmann::json out = nlohmann::json::array();
    for (long i = 0; i < v.size(); ++i) out.push_back(to_json(v[i]));
    return out;
}

nlohmann::json to_json(const Matrix& m) {
    nlohmann::json out = nlohmann::json::array();
    for (long r = 0; r < m.rows(); ++r)
        for (long c = 0; c < m.cols(); ++c) out.push_back(to_json(m(r, c)));
    return out;
}

nlohmann::json to_json(const StateVector& psi) {
    return {{"mode_dims", psi.space().dims()}, {"amplitudes", to_json(psi.amplitudes())}};
}

nlohmann::json to_json(const DensityOperator& rho) {
    return {{"mode_dims", rho.space().dims()}, {"matrix", to_json(rho.matrix())}};
}

nlohmann::json to_json(const GaussianState& s) {
    nlohmann::json mean = nlohmann::json::array();
    for (long i = 0; i < s.mean.size(); ++i) mean.push_back(s.mean[i]);
    nlohmann::json cov = nlohmann::json::array();
    for (long r = 0; r < s.cov.rows(); ++r)
        for (long c = 0; c < s.cov.cols(); ++c) cov.push_back(s.cov(r, c));
    return {{"mean", mean}, {"cov", cov}};
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << content;
    if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace carlsim
