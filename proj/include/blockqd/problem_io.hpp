#pragma once

#include <complex>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "blockqd/moments.hpp"
#include "blockqd/qdalgo.hpp"

namespace blockqd {

// On-disk problem: the inputs of one algorithm run.
// JSON schema: {"theta": int, "n": int, "p": int, "q": [n][p][p],
//               "e": [theta][n-1][p][p],
//               "reference_eigenvalues": [[re, im], ...] (optional)}
struct ProblemFile {
  std::size_t theta = 0;
  std::size_t n = 0;
  std::size_t p = 0;
  std::vector<Matrix> q;
  std::vector<std::vector<Matrix>> e;
  std::optional<std::vector<std::complex<double>>> reference_eigenvalues;
};

ProblemFile parse_problem(const std::string& json_text);
std::string serialize_problem(const ProblemFile& pf);
ProblemFile load_problem(const std::filesystem::path& path);
void save_problem(const std::filesystem::path& path, const ProblemFile& pf);

HungryState to_state(const ProblemFile& pf);

// Measure input: {"p": int, "theta": int, "nodes": [real],
//                 "weights": [[[real]]]}
struct MeasureFile {
  DiscreteMeasure measure;
  std::size_t theta = 0;
};

MeasureFile parse_measure(const std::string& json_text);
MeasureFile load_measure(const std::filesystem::path& path);

// Whole-file atomic write (temp file in the same directory, then rename).
void write_text_atomic(const std::filesystem::path& path,
                       std::string_view content);

// Plain scalar grid, one row per line, no header.
std::string matrix_csv(const Matrix& m);

// Header: sweep,q_1,...,q_n,e_0_1,...,e_{theta-1}_{n-1}; Frobenius norms
// with 17 significant digits.
std::string trace_csv(const SweepTrace& trace, std::size_t theta,
                      std::size_t n);

// [{"re": ..., "im": ..., "residual": ...}] ascending by modulus. The
// residual column is whatever certificate the caller computed.
struct SpectrumRow {
  double re = 0.0;
  double im = 0.0;
  double residual = 0.0;
};
std::string spectrum_json(const std::vector<SpectrumRow>& rows);

}  // namespace blockqd
