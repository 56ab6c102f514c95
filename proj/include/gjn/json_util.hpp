#pragma once

#include <string>
#include <vector>

#include "gjn/error.hpp"
#include "gjn/types.hpp"
#include "json.hpp"

namespace gjn::json_util {

using nlohmann::json;

/// Parses text, reporting the line and column of syntax errors.
json parse(const std::string& text, const std::string& source);
json parse_file(const std::string& path);

[[noreturn]] void fail(const std::string& path, const std::string& what);

const json& require(const json& node, const std::string& key, const std::string& path);
double number(const json& node, const std::string& path);
std::int64_t integer(const json& node, const std::string& path);
std::string string(const json& node, const std::string& path);
Vector vector(const json& node, const std::string& path);
Matrix matrix(const json& node, const std::string& path);
std::vector<double> doubles(const json& node, const std::string& path);

json to_json(const Vector& v);
json to_json(const Matrix& m);

}  // namespace gjn::json_util
