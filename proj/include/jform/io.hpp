#pragma once

// File formats: JSON matrix files with complex entries as [re, im] pairs,
// and the line-oriented banded format for semi-infinite matrices.

#include "jform/core.hpp"
#include "jform/decomp.hpp"
#include "jform/jspace.hpp"
#include "jform/matrep.hpp"

#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

namespace jform {

using Json = nlohmann::ordered_json;

/// Unreadable or malformed input.
class IoError : public Error {
 public:
  using Error::Error;
};

struct MatrixFile {
  Matrix a;
  std::optional<Matrix> conjugation;  // absent or "standard": C = E

  Conjugation conj() const {
    return conjugation ? Conjugation::from_matrix(*conjugation) : Conjugation::standard(a.rows());
  }
};

inline Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

inline Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix matrix_from_json(const Json& rows, Eigen::Index n, const std::string& what) {
  if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != n)
    throw IoError(what + ": expected " + std::to_string(n) + " rows");
  Matrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const Json& row = rows[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
      throw IoError(what + ": row " + std::to_string(r) + " must have " + std::to_string(n) + " entries");
    for (Eigen::Index c = 0; c < n; ++c) {
      const Json& e = row[static_cast<std::size_t>(c)];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
        throw IoError(what + ": entry (" + std::to_string(r) + "," + std::to_string(c) + ") must be [re, im]");
      m(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
    }
  }
  return m;
}

inline MatrixFile parse_matrix_file(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError("malformed JSON at byte offset " + std::to_string(e.byte) + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("n") || !doc["n"].is_number_integer())
    throw IoError("matrix file: missing integer field \"n\"");
  const auto n = doc["n"].get<std::int64_t>();
  if (n <= 0) throw IoError("matrix file: \"n\" must be positive");
  if (!doc.contains("entries")) throw IoError("matrix file: missing field \"entries\"");

  MatrixFile out;
  out.a = matrix_from_json(doc["entries"], n, "entries");
  if (!out.a.allFinite()) throw IoError("entries: non-finite value");
  if (doc.contains("conjugation")) {
    const Json& c = doc["conjugation"];
    if (c.is_string()) {
      if (c.get<std::string>() != "standard") throw IoError("conjugation: expected \"standard\" or a matrix");
    } else {
      out.conjugation = matrix_from_json(c, n, "conjugation");
    }
  }
  return out;
}

inline Json matrix_file_json(const MatrixFile& f) {
  Json doc;
  doc["n"] = f.a.rows();
  doc["entries"] = matrix_to_json(f.a);
  if (f.conjugation) doc["conjugation"] = matrix_to_json(*f.conjugation);
  return doc;
}

inline std::string serialize_matrix_file(const MatrixFile& f) { return matrix_file_json(f).dump(2) + "\n"; }

/// 64-bit FNV-1a of the raw input bytes, as 16 hex digits.
inline std::string input_digest(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------------------------
// Banded text format
//
//   # comment
//   symmetry symmetric|skew
//   band <offset>
//   <entries...>
//
// Entries are whitespace separated; each is a decimal real or "re,im".
// A band's last entry repeats down the rest of the diagonal. Negative
// offsets may be given and must agree with the declared symmetry.

inline Complex parse_band_entry(const std::string& tok, std::size_t line) {
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.empty())
      throw IoError("banded file line " + std::to_string(line) + ": bad number '" + s + "'");
    return v;
  };
  const auto comma = tok.find(',');
  if (comma == std::string::npos) return {number(tok), 0.0};
  return {number(tok.substr(0, comma)), number(tok.substr(comma + 1))};
}

inline SemiInfiniteMatrix parse_banded(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::optional<Symmetry> symmetry;
  std::map<long, std::vector<Complex>> bands;
  std::optional<long> current;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    if (tok == "symmetry") {
      std::string s;
      ls >> s;
      if (s == "symmetric")
        symmetry = Symmetry::symmetric;
      else if (s == "skew")
        symmetry = Symmetry::skew;
      else
        throw IoError("banded file line " + std::to_string(lineno) + ": unknown symmetry '" + s + "'");
    } else if (tok == "band") {
      std::string off;
      if (!(ls >> off)) throw IoError("banded file line " + std::to_string(lineno) + ": band needs an offset");
      std::size_t used = 0;
      long o = 0;
      try {
        o = std::stol(off, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != off.size()) throw IoError("banded file line " + std::to_string(lineno) + ": bad offset");
      if (bands.count(o)) throw IoError("banded file line " + std::to_string(lineno) + ": duplicate band");
      bands[o];
      current = o;
    } else {
      if (!current) throw IoError("banded file line " + std::to_string(lineno) + ": entries before any band header");
      bands[*current].push_back(parse_band_entry(tok, lineno));
      while (ls >> tok) bands[*current].push_back(parse_band_entry(tok, lineno));
    }
  }
  if (!symmetry) throw IoError("banded file: missing 'symmetry' line");
  const Complex sign = *symmetry == Symmetry::symmetric ? 1.0 : -1.0;

  long width = 0;
  for (const auto& [o, v] : bands) width = std::max(width, std::labs(o));
  std::vector<std::vector<Complex>> upper(static_cast<std::size_t>(width) + 1);
  for (const auto& [o, v] : bands)
    if (o >= 0) upper[static_cast<std::size_t>(o)] = v;
  for (const auto& [o, v] : bands) {
    if (o >= 0) continue;
    auto& mirror = upper[static_cast<std::size_t>(-o)];
    if (!bands.count(-o)) {
      for (const Complex& x : v) mirror.push_back(sign * x);
      continue;
    }
    if (mirror.size() != v.size())
      throw IoError("banded file: band " + std::to_string(o) + " disagrees with band " + std::to_string(-o));
    for (std::size_t k = 0; k < v.size(); ++k)
      if (v[k] != sign * mirror[k])
        throw IoError("banded file: band " + std::to_string(o) + " violates the declared symmetry");
  }
  try {
    return SemiInfiniteMatrix::banded(*symmetry, std::move(upper));
  } catch (const PreconditionError& e) {
    throw IoError(std::string("banded file: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Report payloads

inline Json ray_to_json(const BranchRay& r) { return Json{{"phi", r.phi()}, {"clearance", r.clearance()}}; }

inline Json classification_to_json(const ClassificationFlags& f) {
  const auto& d = f.deviations;
  Json flags{{"j_symmetric", f.j_symmetric}, {"j_skew_symmetric", f.j_skew_symmetric},
             {"j_isometric", f.j_isometric}, {"j_unitary", f.j_unitary},
             {"j_normal", f.j_normal},       {"j_real", f.j_real}};
  Json dev{{"j_symmetric", d.j_symmetric}, {"j_skew_symmetric", d.j_skew_symmetric},
           {"j_isometric", d.j_isometric}, {"j_unitary", d.j_unitary},
           {"j_normal", d.j_normal},       {"j_real", d.j_real}};
  return Json{{"flags", flags}, {"deviations", dev}, {"tol", f.tol}};
}

inline Json record_to_json(const DecompositionRecord& rec) {
  Json out;
  out["kind"] = to_string(rec.kind);
  Json factors = Json::object();
  for (const auto& [name, m] : rec.factors) factors[name] = Json{{"n", m.rows()}, {"entries", matrix_to_json(m)}};
  out["factors"] = factors;
  out["ray"] = rec.ray ? ray_to_json(*rec.ray) : Json(nullptr);
  out["residual_reconstruction"] = rec.residual_reconstruction;
  Json fr = Json::object();
  for (const auto& [name, v] : rec.factor_residuals) fr[name] = v;
  out["factor_residuals"] = fr;
  Json diag = Json::object();
  for (const auto& [name, v] : rec.diagnostics) diag[name] = v;
  out["diagnostics"] = diag;
  if (!rec.joint_pairs.empty()) {
    Json pairs = Json::array();
    for (const auto& [l, z] : rec.joint_pairs) pairs.push_back(Json::array({l, z}));
    out["joint_pairs"] = pairs;
    out["locus_residual"] = rec.locus_residual;
  }
  return out;
}

}  // namespace jform
