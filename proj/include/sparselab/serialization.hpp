#pragma once
// JSON serialization for the persistent types. Doubles round-trip exactly
// (nlohmann emits shortest-exact representations). Dictionaries serialize as
// a (kind, n, m, seed) reference, never as a matrix payload.

#include <string>
#include <vector>

#include <json.hpp>

#include "estimators.hpp"
#include "model.hpp"
#include "polybasis.hpp"
#include "relu_approx.hpp"

namespace sparselab {

inline void to_json(nlohmann::json& j, const Polynomial& p) {
  j = nlohmann::json{
      {"basis", p.basis == PolyBasis::Monomial ? "monomial" : "chebyshev"},
      {"coeffs", p.coeffs}};
  if (p.basis == PolyBasis::Chebyshev) j["interval"] = {p.a, p.b};
}

inline void from_json(const nlohmann::json& j, Polynomial& p) {
  const std::string basis = j.at("basis").get<std::string>();
  auto coeffs = j.at("coeffs").get<std::vector<double>>();
  if (basis == "monomial") {
    p = Polynomial::monomial(std::move(coeffs));
  } else if (basis == "chebyshev") {
    const auto iv = j.at("interval").get<std::vector<double>>();
    if (iv.size() != 2) {
      throw std::invalid_argument("polynomial: interval must be [a, b]");
    }
    p = Polynomial::chebyshev(std::move(coeffs), iv[0], iv[1]);
  } else {
    throw std::invalid_argument("polynomial: unknown basis '" + basis + "'");
  }
}

inline void to_json(nlohmann::json& j, const HermiteExpansion& h) {
  j = nlohmann::json{{"scale", h.scale}, {"coeffs", h.coeffs}};
}

inline void from_json(const nlohmann::json& j, HermiteExpansion& h) {
  h.scale = j.at("scale").get<double>();
  h.coeffs = j.at("coeffs").get<std::vector<double>>();
  if (!(h.scale > 0.0)) throw std::invalid_argument("expansion: scale > 0");
  if (h.coeffs.empty()) h.coeffs.push_back(0.0);
}

inline void to_json(nlohmann::json& j, const LinearPredictor& lp) {
  j = nlohmann::json{
      {"wtilde", std::vector<double>(lp.wtilde.data(),
                                     lp.wtilde.data() + lp.wtilde.size())},
      {"R", lp.R}};
}

inline void from_json(const nlohmann::json& j, LinearPredictor& lp) {
  const auto v = j.at("wtilde").get<std::vector<double>>();
  lp.wtilde = Eigen::Map<const Eigen::VectorXd>(v.data(), v.size());
  lp.R = j.at("R").get<double>();
}

inline void to_json(nlohmann::json& j, const SoftThresholdPolySpec& s) {
  j = nlohmann::json{{"d", s.d},
                     {"tau", s.tau},
                     {"M", s.M},
                     {"M_tau", s.M_tau},
                     {"eps", s.eps}};
}

inline void from_json(const nlohmann::json& j, SoftThresholdPolySpec& s) {
  s = SoftThresholdPolySpec::make(j.at("d").get<int>(),
                                  j.at("tau").get<double>(),
                                  j.at("M").get<double>(),
                                  j.at("eps").get<double>());
}

inline void to_json(nlohmann::json& j, const ModelParams& p) {
  j = nlohmann::json{
      {"n", p.n},
      {"m", p.m},
      {"k", p.k},
      {"sigma", p.sigma},
      {"gamma", p.gamma},
      {"M", p.M},
      {"latent_mode", to_string(p.latent_mode)},
      {"w", std::vector<double>(p.w.data(), p.w.data() + p.w.size())}};
}

inline LatentMode latent_mode_from_string(const std::string& s) {
  if (s == "spike_gaussian") return LatentMode::SpikeGaussian;
  if (s == "exact_k_support") return LatentMode::ExactKSupport;
  throw std::invalid_argument("unknown latent mode '" + s + "'");
}

inline DictionaryKind dictionary_kind_from_string(const std::string& s) {
  if (s == "identity") return DictionaryKind::Identity;
  if (s == "haar_orthogonal") return DictionaryKind::HaarOrthogonal;
  if (s == "random_sign") return DictionaryKind::RandomSign;
  throw std::invalid_argument("unknown dictionary kind '" + s + "'");
}

// Reference to a dictionary by construction recipe.
struct DictionaryRef {
  DictionaryKind kind = DictionaryKind::Identity;
  int n = 0, m = 0;
  std::uint64_t seed = 0;

  Dictionary build() const { return Dictionary::build(kind, n, m, seed); }
};

inline void to_json(nlohmann::json& j, const DictionaryRef& d) {
  j = nlohmann::json{{"kind", to_string(d.kind)},
                     {"n", d.n},
                     {"m", d.m},
                     {"seed", d.seed}};
}

inline void from_json(const nlohmann::json& j, DictionaryRef& d) {
  d.kind = dictionary_kind_from_string(j.at("kind").get<std::string>());
  d.n = j.at("n").get<int>();
  d.m = j.value("m", d.n);
  d.seed = j.value("seed", static_cast<std::uint64_t>(0));
}

}  // namespace sparselab
