#pragma once

// JSON encodings of index sets, grid samples and spectral functions.

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "lzcross/indexsets.hpp"
#include "lzcross/norms.hpp"
#include "lzcross/spectral.hpp"

namespace lzcross::io {

using nlohmann::json;

/// Accepts a JSON number, an integer, or a string such as "2/3" or "0.25".
inline Rational rational_from_json(const json& v) {
  if (v.is_string()) return Rational::parse(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
  if (v.is_number()) return Rational::approximate(v.get<double>());
  throw std::invalid_argument("expected a rational (number or \"a/b\" string)");
}

inline json rational_to_json(const Rational& r) {
  if (r.is_integer()) return r.num();
  return r.to_string();
}

/// Accepts a number or the strings "inf"/"infinity".
inline double exponent_from_json(const json& v) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "infinity" || s == "Infinity") return kInfinity;
    return std::stod(s);
  }
  return v.get<double>();
}

inline json exponent_to_json(double x) {
  if (std::isinf(x)) return "inf";
  return x;
}

inline Anisotropy anisotropy_from_json(const json& v) {
  std::vector<Rational> w;
  for (const auto& e : v) w.push_back(rational_from_json(e));
  return Anisotropy(std::move(w));
}

inline json anisotropy_to_json(const Anisotropy& g) {
  json out = json::array();
  for (const auto& w : g.weights()) out.push_back(rational_to_json(w));
  return out;
}

template <class Tag>
json tuple_to_json(const IndexTuple<Tag>& t) {
  return json(t.entries());
}

template <class Tag>
IndexTuple<Tag> tuple_from_json(const json& v) {
  return IndexTuple<Tag>(v.get<std::vector<std::int64_t>>());
}

/// {"m": m, "indices": [[...], ...]}
template <class Tag>
json index_set_to_json(std::size_t m, const std::vector<IndexTuple<Tag>>& items) {
  json idx = json::array();
  for (const auto& t : items) idx.push_back(tuple_to_json(t));
  return json{{"m", m}, {"indices", std::move(idx)}};
}

/// {"m": m, "terms": [{"k": [...], "re": x, "im": y}, ...]}, harmonics in lexicographic order.
inline json spectral_to_json(const SpectralFunction& f) {
  json terms = json::array();
  for (const auto& [k, a] : f)
    terms.push_back(json{{"k", tuple_to_json(k)}, {"re", a.real()}, {"im", a.imag()}});
  return json{{"m", f.dim()}, {"terms", std::move(terms)}};
}

inline SpectralFunction spectral_from_json(const json& v) {
  const auto m = v.at("m").get<std::size_t>();
  SpectralFunction f(m);
  for (const auto& t : v.at("terms")) {
    const double re = t.value("re", 0.0);
    const double im = t.value("im", 0.0);
    f.add(tuple_from_json<FrequencyIndexTag>(t.at("k")), {re, im});
  }
  return f;
}

/// {"m": m, "shape": [...], "re": [...], "im": [...]} in row-major order; "im" may be omitted.
inline GridFunction grid_from_json(const json& v) {
  const auto shape = v.at("shape").get<std::vector<std::size_t>>();
  if (v.contains("m") && v.at("m").get<std::size_t>() != shape.size())
    throw std::invalid_argument("grid: m does not match shape");
  GridFunction g(shape);
  const auto re = v.at("re").get<std::vector<double>>();
  std::vector<double> im(re.size(), 0.0);
  if (v.contains("im")) im = v.at("im").get<std::vector<double>>();
  if (re.size() != g.volume() || im.size() != g.volume())
    throw std::invalid_argument("grid: sample count does not match shape");
  for (std::size_t i = 0; i < re.size(); ++i) g.samples[i] = {re[i], im[i]};
  return g;
}

inline json grid_to_json(const GridFunction& g) {
  std::vector<double> re, im;
  re.reserve(g.volume());
  im.reserve(g.volume());
  for (const auto& z : g.samples) {
    re.push_back(z.real());
    im.push_back(z.imag());
  }
  return json{{"m", g.dim()}, {"shape", g.shape}, {"re", re}, {"im", im}};
}

inline ScalarSpaceParams scalar_params_from_json(const json& v) {
  ScalarSpaceParams p{v.at("p").get<double>(), v.value("alpha", 0.0), exponent_from_json(v.at("tau"))};
  p.validate();
  return p;
}

/// Either {"axes": [{p, alpha, tau}, ...]} or a single {p, alpha, tau} plus "m".
inline MixedSpaceParams mixed_params_from_json(const json& v, std::size_t m_default = 1) {
  MixedSpaceParams out;
  if (v.contains("axes")) {
    for (const auto& a : v.at("axes")) out.axes.push_back(scalar_params_from_json(a));
  } else {
    out = MixedSpaceParams::uniform(v.value("m", m_default), scalar_params_from_json(v));
  }
  out.validate();
  return out;
}

inline std::vector<double> exponents_from_json(const json& v) {
  std::vector<double> out;
  for (const auto& e : v) out.push_back(exponent_from_json(e));
  return out;
}

}  // namespace lzcross::io
