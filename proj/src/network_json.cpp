#include "gjn/network_json.hpp"

#include <fstream>
#include <sstream>

#include "gjn/json_util.hpp"

namespace gjn {

namespace json_util {

json parse(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw Error(ErrorKind::Config, source + ":" + std::to_string(line) + ":" + std::to_string(column) +
                                       ": malformed JSON (" + e.what() + ")");
  }
}

json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, "cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str(), path);
}

void fail(const std::string& path, const std::string& what) {
  throw Error(ErrorKind::Config, path + ": " + what);
}

const json& require(const json& node, const std::string& key, const std::string& path) {
  if (!node.is_object()) fail(path, "expected an object");
  auto it = node.find(key);
  if (it == node.end()) fail(path + "." + key, "missing required key");
  return *it;
}

double number(const json& node, const std::string& path) {
  if (!node.is_number()) fail(path, "expected a number");
  return node.get<double>();
}

std::int64_t integer(const json& node, const std::string& path) {
  if (!node.is_number_integer()) fail(path, "expected an integer");
  return node.get<std::int64_t>();
}

std::string string(const json& node, const std::string& path) {
  if (!node.is_string()) fail(path, "expected a string");
  return node.get<std::string>();
}

std::vector<double> doubles(const json& node, const std::string& path) {
  if (!node.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < node.size(); ++i) {
    out.push_back(number(node[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

Vector vector(const json& node, const std::string& path) {
  const auto values = doubles(node, path);
  return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

Matrix matrix(const json& node, const std::string& path) {
  if (!node.is_array()) fail(path, "expected an array of rows");
  const auto rows = static_cast<Index>(node.size());
  Matrix m;
  for (Index i = 0; i < rows; ++i) {
    const std::string row_path = path + "[" + std::to_string(i) + "]";
    const Vector row = vector(node[static_cast<std::size_t>(i)], row_path);
    if (i == 0) m.resize(rows, row.size());
    if (row.size() != m.cols()) fail(row_path, "row length differs from row 0");
    m.row(i) = row.transpose();
  }
  return m;
}

json to_json(const Vector& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json to_json(const Matrix& m) {
  json out = json::array();
  for (Index i = 0; i < m.rows(); ++i) out.push_back(to_json(Vector(m.row(i).transpose())));
  return out;
}

}  // namespace json_util

using namespace json_util;

DistributionSpec distribution_from_json(const json& node, const std::string& path) {
  std::string name;
  json params = json::object();
  if (node.is_string()) {
    name = node.get<std::string>();
  } else if (node.is_object()) {
    name = string(require(node, "family", path), path + ".family");
    if (node.contains("params")) params = node.at("params");
  } else {
    fail(path, "expected a family name or {\"family\": ..., \"params\": {...}}");
  }
  const std::string ppath = path + ".params";
  auto param = [&](const char* key) { return number(require(params, key, ppath), ppath + "." + key); };
  try {
    switch (family_from_string(name)) {
      case Family::Exponential: return DistributionSpec::exponential();
      case Family::Deterministic: return DistributionSpec::deterministic();
      case Family::Uniform: return DistributionSpec::uniform(param("lo"), param("hi"));
      case Family::Erlang:
        return DistributionSpec::erlang(static_cast<int>(integer(require(params, "k", ppath), ppath + ".k")));
      case Family::Hyperexponential:
        return DistributionSpec::hyperexponential(doubles(require(params, "probs", ppath), ppath + ".probs"),
                                                  doubles(require(params, "rates", ppath), ppath + ".rates"));
      case Family::Lognormal: return DistributionSpec::lognormal(param("sigma"));
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Config) throw;
    fail(path, e.what());
  }
  fail(path, "unreachable");
}

json to_json(const DistributionSpec& dist) {
  json out{{"family", std::string(to_string(dist.family()))}, {"scv", dist.scv()}};
  json params = json::object();
  switch (dist.family()) {
    case Family::Uniform:
      params = {{"lo", dist.params()[0]}, {"hi", dist.params()[1]}};
      break;
    case Family::Erlang:
      params = {{"k", dist.shape()}};
      break;
    case Family::Hyperexponential:
      params = {{"probs", dist.params()}, {"rates", dist.rates()}};
      break;
    case Family::Lognormal:
      params = {{"sigma", dist.params()[1]}};
      break;
    default:
      break;
  }
  out["params"] = params;
  return out;
}

NetworkSpec network_from_json(const json& node, const std::string& path) {
  NetworkSpec spec;
  const auto J = integer(require(node, "J", path), path + ".J");
  if (J < 1) fail(path + ".J", "must be >= 1");
  spec.routing = matrix(require(node, "P", path), path + ".P");
  if (spec.routing.rows() != J || spec.routing.cols() != J) fail(path + ".P", "must be J x J");
  spec.alpha = vector(require(node, "alpha", path), path + ".alpha");
  if (spec.alpha.size() != J) fail(path + ".alpha", "must have J entries");

  for (const char* key : {"arrival_dists", "service_dists"}) {
    const json& list = require(node, key, path);
    const std::string lpath = path + "." + key;
    if (!list.is_array() || static_cast<std::int64_t>(list.size()) != J) fail(lpath, "must be an array of J laws");
    auto& target = std::string(key) == "arrival_dists" ? spec.arrival : spec.service;
    for (std::size_t j = 0; j < list.size(); ++j) {
      target.push_back(distribution_from_json(list[j], lpath + "[" + std::to_string(j) + "]"));
    }
  }

  if (!node.contains("blocks")) {
    spec.regime = ScaleRegime::fully_multiscale(J);
  } else {
    const json& blocks = node.at("blocks");
    const std::string bpath = path + ".blocks";
    if (!blocks.is_array() || blocks.empty()) fail(bpath, "must be a non-empty array");
    for (std::size_t k = 0; k < blocks.size(); ++k) {
      const std::string kpath = bpath + "[" + std::to_string(k) + "]";
      const auto range = doubles(require(blocks[k], "stations", kpath), kpath + ".stations");
      if (range.size() != 2) fail(kpath + ".stations", "expected [lo, hi]");
      const auto lo = static_cast<Index>(range[0]);
      const auto hi = static_cast<Index>(range[1]);
      if (lo < 1 || hi < lo || hi > J || range[0] != lo || range[1] != hi) {
        fail(kpath + ".stations", "expected integer 1 <= lo <= hi <= J");
      }
      Block b{lo - 1, hi - 1, number(require(blocks[k], "exponent", kpath), kpath + ".exponent"),
              Vector::Ones(hi - lo + 1)};
      if (blocks[k].contains("b")) b.drift = vector(blocks[k].at("b"), kpath + ".b");
      spec.regime.blocks.push_back(std::move(b));
    }
  }
  return spec;
}

json to_json(const NetworkSpec& spec) {
  json out;
  out["J"] = spec.stations();
  out["P"] = json_util::to_json(spec.routing);
  out["alpha"] = json_util::to_json(spec.alpha);
  out["arrival_dists"] = json::array();
  out["service_dists"] = json::array();
  for (const auto& d : spec.arrival) out["arrival_dists"].push_back(to_json(d));
  for (const auto& d : spec.service) out["service_dists"].push_back(to_json(d));
  out["blocks"] = json::array();
  for (const Block& b : spec.regime.blocks) {
    out["blocks"].push_back({{"stations", {b.first + 1, b.last + 1}},
                             {"exponent", b.exponent},
                             {"b", json_util::to_json(b.drift)}});
  }
  return out;
}

}  // namespace gjn
