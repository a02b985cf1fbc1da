#include "blockqd/problem_io.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <utility>

#include <json.hpp>

namespace blockqd {

namespace {

using nlohmann::json;

std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Matrix block_from_json(const json& j, std::size_t p, const char* what) {
  if (!j.is_array() || j.size() != p)
    throw InputError(InputError::Kind::Dimension,
                     std::string(what) + ": expected " + std::to_string(p) +
                         " rows per block");
  Matrix b(p, p);
  for (std::size_t r = 0; r < p; ++r) {
    const json& row = j[r];
    if (!row.is_array() || row.size() != p)
      throw InputError(InputError::Kind::Dimension,
                       std::string(what) + ": expected " + std::to_string(p) +
                           " entries per block row");
    for (std::size_t c = 0; c < p; ++c) {
      if (!row[c].is_number())
        throw InputError(InputError::Kind::Parse,
                         std::string(what) + ": non-numeric entry");
      b(r, c) = row[c].get<double>();
    }
  }
  if (!b.all_finite())
    throw InputError(InputError::Kind::Dimension,
                     std::string(what) + ": non-finite entry");
  return b;
}

json block_to_json(const Matrix& b) {
  json rows = json::array();
  for (std::size_t r = 0; r < b.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < b.cols(); ++c) row.push_back(b(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::size_t positive_int_field(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number_integer() ||
      j[key].get<long long>() <= 0)
    throw InputError(InputError::Kind::Parse,
                     std::string("expected positive integer field \"") + key +
                         "\"");
  return static_cast<std::size_t>(j[key].get<long long>());
}

json parse_json_text(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded())
    throw InputError(InputError::Kind::Parse, "malformed JSON");
  return j;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw InputError(InputError::Kind::Io,
                     "cannot open " + path.string() + " for reading");
  std::ostringstream out;
  out << in.rdbuf();
  if (in.bad())
    throw InputError(InputError::Kind::Io, "read failure on " + path.string());
  return std::move(out).str();
}

}  // namespace

ProblemFile parse_problem(const std::string& json_text) {
  const json j = parse_json_text(json_text);
  if (!j.is_object())
    throw InputError(InputError::Kind::Parse, "problem must be a JSON object");

  ProblemFile pf;
  pf.theta = positive_int_field(j, "theta");
  pf.n = positive_int_field(j, "n");
  pf.p = positive_int_field(j, "p");

  if (!j.contains("q") || !j["q"].is_array() || j["q"].size() != pf.n)
    throw InputError(InputError::Kind::Dimension,
                     "field \"q\" must list n blocks");
  for (const json& b : j["q"]) pf.q.push_back(block_from_json(b, pf.p, "q"));

  if (!j.contains("e") || !j["e"].is_array() || j["e"].size() != pf.theta)
    throw InputError(InputError::Kind::Dimension,
                     "field \"e\" must list theta layers");
  for (const json& layer : j["e"]) {
    if (!layer.is_array() || layer.size() != pf.n - 1)
      throw InputError(InputError::Kind::Dimension,
                       "each \"e\" layer must list n-1 blocks");
    std::vector<Matrix> blocks;
    for (const json& b : layer) blocks.push_back(block_from_json(b, pf.p, "e"));
    pf.e.push_back(std::move(blocks));
  }

  if (j.contains("reference_eigenvalues")) {
    const json& refs = j["reference_eigenvalues"];
    if (!refs.is_array())
      throw InputError(InputError::Kind::Parse,
                       "\"reference_eigenvalues\" must be a list");
    std::vector<std::complex<double>> values;
    for (const json& v : refs) {
      if (!v.is_array() || v.size() != 2 || !v[0].is_number() ||
          !v[1].is_number())
        throw InputError(InputError::Kind::Parse,
                         "reference eigenvalue must be [re, im]");
      values.emplace_back(v[0].get<double>(), v[1].get<double>());
    }
    pf.reference_eigenvalues = std::move(values);
  }
  return pf;
}

std::string serialize_problem(const ProblemFile& pf) {
  json j;
  j["theta"] = pf.theta;
  j["n"] = pf.n;
  j["p"] = pf.p;
  json q = json::array();
  for (const Matrix& b : pf.q) q.push_back(block_to_json(b));
  j["q"] = std::move(q);
  json e = json::array();
  for (const auto& layer : pf.e) {
    json l = json::array();
    for (const Matrix& b : layer) l.push_back(block_to_json(b));
    e.push_back(std::move(l));
  }
  j["e"] = std::move(e);
  if (pf.reference_eigenvalues) {
    json refs = json::array();
    for (const auto& v : *pf.reference_eigenvalues)
      refs.push_back(json::array({v.real(), v.imag()}));
    j["reference_eigenvalues"] = std::move(refs);
  }
  return j.dump(2) + "\n";
}

ProblemFile load_problem(const std::filesystem::path& path) {
  return parse_problem(read_file(path));
}

void save_problem(const std::filesystem::path& path, const ProblemFile& pf) {
  write_text_atomic(path, serialize_problem(pf));
}

HungryState to_state(const ProblemFile& pf) {
  HungryState s;
  s.toda.theta = pf.theta;
  s.toda.n = pf.n;
  s.toda.p = pf.p;
  s.toda.alpha = 0;
  s.toda.q = pf.q;
  s.toda.e = pf.e;
  s.toda.validate();
  return s;
}

MeasureFile parse_measure(const std::string& json_text) {
  const json j = parse_json_text(json_text);
  if (!j.is_object())
    throw InputError(InputError::Kind::Parse, "measure must be a JSON object");

  MeasureFile mf;
  mf.measure.p = positive_int_field(j, "p");
  mf.theta = positive_int_field(j, "theta");

  if (!j.contains("nodes") || !j["nodes"].is_array() || j["nodes"].empty())
    throw InputError(InputError::Kind::Parse,
                     "field \"nodes\" must be a non-empty list");
  for (const json& v : j["nodes"]) {
    if (!v.is_number())
      throw InputError(InputError::Kind::Parse, "non-numeric node");
    mf.measure.nodes.push_back(v.get<double>());
  }
  if (!j.contains("weights") || !j["weights"].is_array() ||
      j["weights"].size() != mf.measure.nodes.size())
    throw InputError(InputError::Kind::Dimension,
                     "field \"weights\" must list one block per node");
  for (const json& b : j["weights"])
    mf.measure.weights.push_back(block_from_json(b, mf.measure.p, "weights"));

  try {
    mf.measure.validate();
  } catch (const std::invalid_argument& err) {
    throw InputError(InputError::Kind::Dimension, err.what());
  }
  return mf;
}

MeasureFile load_measure(const std::filesystem::path& path) {
  return parse_measure(read_file(path));
}

void write_text_atomic(const std::filesystem::path& path,
                       std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw InputError(InputError::Kind::Io,
                       "cannot open " + tmp.string() + " for writing");
    out.write(content.data(),
              static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out)
      throw InputError(InputError::Kind::Io,
                       "write failure on " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec)
    throw InputError(InputError::Kind::Io,
                     "cannot move " + tmp.string() + " into place: " +
                         ec.message());
}

std::string matrix_csv(const Matrix& m) {
  std::string out;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j != 0) out += ',';
      out += format_full(m(i, j));
    }
    out += '\n';
  }
  return out;
}

std::string trace_csv(const SweepTrace& trace, std::size_t theta,
                      std::size_t n) {
  std::string out = "sweep";
  for (std::size_t m = 1; m <= n; ++m) out += ",q_" + std::to_string(m);
  for (std::size_t layer = 0; layer < theta; ++layer)
    for (std::size_t m = 1; m + 1 <= n; ++m)
      out += ",e_" + std::to_string(layer) + "_" + std::to_string(m);
  out += '\n';

  for (std::size_t row = 0; row < trace.rows.size(); ++row) {
    out += std::to_string(row + 1);
    const SweepRecord& rec = trace.rows[row];
    for (double v : rec.q_norms) out += ',' + format_full(v);
    for (const auto& layer : rec.e_norms)
      for (double v : layer) out += ',' + format_full(v);
    out += '\n';
  }
  return out;
}

std::string spectrum_json(const std::vector<SpectrumRow>& rows) {
  json values = json::array();
  for (const SpectrumRow& r : rows) {
    json v;
    v["re"] = r.re;
    v["im"] = r.im;
    v["residual"] = r.residual;
    values.push_back(std::move(v));
  }
  return values.dump(2) + "\n";
}

}  // namespace blockqd
