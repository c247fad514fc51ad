#include "mbo/field.hpp"

#include <cmath>

#include <json.hpp>

namespace mbo {

SpectralField& SpectralField::operator+=(const SpectralField& o) {
    require_same_window(*this, o, "operator+=");
    for (size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    is_real_ = is_real_ && o.is_real_;
    return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
    require_same_window(*this, o, "operator-=");
    for (size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    is_real_ = is_real_ && o.is_real_;
    return *this;
}

SpectralField& SpectralField::operator*=(cplx a) {
    for (auto& v : c_) v *= a;
    if (a.imag() != 0.0) is_real_ = false;
    return *this;
}

double SpectralField::l2() const {
    double s = 0.0;
    for (const auto& v : c_) s += std::norm(v);
    return std::sqrt(s);
}

double SpectralField::max_abs() const {
    double m = 0.0;
    for (const auto& v : c_) m = std::max(m, std::abs(v));
    return m;
}

double SpectralField::conj_symmetry_defect() const {
    double worst = 0.0;
    for (int n = 0; n <= n_max_; ++n)
        worst = std::max(worst, std::abs((*this)(n) - std::conj((*this)(-n))));
    return worst;
}

void SpectralField::symmetrize_real() {
    for (int n = 1; n <= n_max_; ++n) {
        const cplx avg = 0.5 * (at(n) + std::conj(at(-n)));
        at(n) = avg;
        at(-n) = std::conj(avg);
    }
    at(0) = cplx{at(0).real(), 0.0};
}

std::string SpectralField::to_json() const {
    nlohmann::json j;
    j["n_max"] = n_max_;
    j["is_real"] = is_real_;
    auto arr = nlohmann::json::array();
    for (const auto& v : c_) arr.push_back({v.real(), v.imag()});
    j["coeffs"] = std::move(arr);
    return j.dump();
}

SpectralField SpectralField::from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    SpectralField f(j.at("n_max").get<int>(), j.at("is_real").get<bool>());
    const auto& arr = j.at("coeffs");
    if (static_cast<int>(arr.size()) != f.size())
        throw ConfigInvalid("field json: coefficient count does not match n_max");
    for (int i = 0; i < f.size(); ++i)
        f.raw()[static_cast<size_t>(i)] =
            cplx{arr[static_cast<size_t>(i)][0].get<double>(),
                 arr[static_cast<size_t>(i)][1].get<double>()};
    return f;
}

}  // namespace mbo
