#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "jnr/errors.hpp"
#include "jnr/hermitian.hpp"

namespace jnr {

/// Shortest decimal representation that round-trips to the same double.
/// All file output goes through this so reruns produce byte-identical files.
inline std::string format_double(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

/// Operator text format shared by every module:
///   {"d": n, "re": [[...]], "im": [[...]]}
/// with row-major real/imaginary parts; "im" may be omitted for real input.
inline HermitianOperator parse_operator_json(const nlohmann::json& j,
                                             const std::string& context) {
  if (!j.is_object() || !j.contains("d") || !j.contains("re"))
    throw ParseError(context + ": expected object with fields \"d\" and \"re\"");
  if (!j["d"].is_number_integer() || j["d"].get<long>() < 1)
    throw ParseError(context + ": \"d\" must be a positive integer");
  const int d = j["d"].get<int>();

  auto read_part = [&](const char* key) {
    Eigen::MatrixXd part = Eigen::MatrixXd::Zero(d, d);
    if (!j.contains(key)) return part;
    const auto& rows = j[key];
    if (!rows.is_array() || static_cast<int>(rows.size()) != d)
      throw ParseError(context + ": \"" + key + "\" must be a " +
                       std::to_string(d) + "x" + std::to_string(d) + " array");
    for (int r = 0; r < d; ++r) {
      const auto& row = rows[r];
      if (!row.is_array() || static_cast<int>(row.size()) != d)
        throw ParseError(context + ": row " + std::to_string(r) + " of \"" +
                         key + "\" has wrong length");
      for (int c = 0; c < d; ++c) {
        if (!row[c].is_number())
          throw ParseError(context + ": non-numeric entry at [" +
                           std::to_string(r) + "][" + std::to_string(c) +
                           "] of \"" + key + "\"");
        part(r, c) = row[c].get<double>();
      }
    }
    return part;
  };

  const Eigen::MatrixXd re = read_part("re");
  const Eigen::MatrixXd im = read_part("im");
  Matrix entries = re.cast<Complex>() + Complex(0, 1) * im.cast<Complex>();
  try {
    return HermitianOperator(std::move(entries));
  } catch (const NonHermitianInput& e) {
    throw NonHermitianInput(context + ": " + e.what());
  }
}

inline HermitianOperator parse_operator_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return parse_operator_json(j, path);
}

inline nlohmann::json operator_to_json(const HermitianOperator& op) {
  const int d = op.dim();
  nlohmann::json re = nlohmann::json::array();
  nlohmann::json im = nlohmann::json::array();
  bool any_imag = false;
  for (int r = 0; r < d; ++r) {
    nlohmann::json re_row = nlohmann::json::array();
    nlohmann::json im_row = nlohmann::json::array();
    for (int c = 0; c < d; ++c) {
      re_row.push_back(op.mat()(r, c).real());
      im_row.push_back(op.mat()(r, c).imag());
      if (op.mat()(r, c).imag() != 0.0) any_imag = true;
    }
    re.push_back(std::move(re_row));
    im.push_back(std::move(im_row));
  }
  nlohmann::json j;
  j["d"] = d;
  j["re"] = std::move(re);
  if (any_imag) j["im"] = std::move(im);
  return j;
}

/// Writes content to a temporary file in the target directory, then renames
/// it over the destination.
inline void write_file_atomic(const std::string& path,
                              const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidArgument("cannot open " + tmp.string() + " for writing");
    out << content;
    if (!out.flush()) throw InvalidArgument("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw InvalidArgument("rename to " + path + " failed: " + ec.message());
}

inline void write_operator_file(const std::string& path,
                                const HermitianOperator& op) {
  write_file_atomic(path, operator_to_json(op).dump(2) + "\n");
}

}  // namespace jnr
